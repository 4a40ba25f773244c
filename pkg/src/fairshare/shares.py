"""Share functions for goods and chores, plus the Sylvester tables.

Goods shares take a valuation and an entitlement; chores shares take a cost
function and a responsibility and return a cost ceiling.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .core import AdditiveValuation, ResourceCapExceeded, as_valuation, to_rational

DEFAULT_MMS_CAP = 10**12


class ShareKind(str, enum.Enum):
    PS = "ps"
    MMS = "mms"
    TPS = "tps"
    MES = "mes"
    RRR = "rrr"
    MMS_HAT = "mms-hat"
    PS_HAT = "ps-hat"
    TPS_HAT = "tps-hat"
    MMS_BAR = "mms-bar"
    PS_BAR = "ps-bar"
    PERSONALIZED = "personalized"


@dataclass(frozen=True)
class ShareValue:
    value: Fraction
    kind: ShareKind


class MMSResult(NamedTuple):
    value: Fraction
    partition: tuple[frozenset[int], ...]


def proportional_share(v, b) -> Fraction:
    return to_rational(b) * as_valuation(v).total


def _check_entitlement(b: Fraction, allow_one: bool = True) -> None:
    if b <= 0 or b > 1 or (b == 1 and not allow_one):
        raise ValueError(f"entitlement {b} out of range")


def _partition_search(values: list[Fraction], k: int, minimize_max: bool,
                      cap: int) -> MMSResult:
    m = len(values)
    if k < 1:
        raise ValueError("k must be positive")
    if k**m > cap:
        raise ResourceCapExceeded(f"{k}^{m} partitions exceed cap {cap}")
    order = sorted(range(m), key=lambda j: (-values[j], j))
    vals = [values[j] for j in order]
    suffix = [Fraction(0)] * (m + 1)
    for i in range(m - 1, -1, -1):
        suffix[i] = suffix[i + 1] + vals[i]

    # Greedy (largest item to lightest bundle) seeds the incumbent.
    loads = [Fraction(0)] * k
    assign = [0] * m
    for i, x in enumerate(vals):
        t = min(range(k), key=lambda g: (loads[g], g))
        loads[t] += x
        assign[i] = t
    best_obj = max(loads) if minimize_max else min(loads)
    best_assign = assign[:]

    loads = [Fraction(0)] * k
    cur = [0] * m

    def dfs(i: int, used: int) -> None:
        nonlocal best_obj, best_assign
        if i == m:
            obj = max(loads) if minimize_max else min(loads)
            if (obj < best_obj) if minimize_max else (obj > best_obj):
                best_obj = obj
                best_assign = cur[:]
            return
        if minimize_max:
            lb = max(max(loads), (suffix[0]) / k)
            if lb >= best_obj:
                return
        else:
            # Remaining value can lift the lightest bundles at most to the water level.
            if (sum(loads) + suffix[i]) / k <= best_obj or min(loads) + suffix[i] <= best_obj:
                return
        x = vals[i]
        seen: set[Fraction] = set()
        for g in range(min(used + 1, k)):
            if loads[g] in seen:
                continue
            seen.add(loads[g])
            loads[g] += x
            cur[i] = g
            dfs(i + 1, max(used, g + 1))
            loads[g] -= x

    dfs(0, 0)
    bundles = [set() for _ in range(k)]
    for i, g in enumerate(best_assign):
        bundles[g].add(order[i])
    return MMSResult(best_obj, tuple(frozenset(b) for b in bundles))


def mms(v, k: int, cap: int = DEFAULT_MMS_CAP) -> MMSResult:
    """Maximin share of goods valuation ``v`` for ``k`` equal agents, with a witness."""
    return _partition_search(list(as_valuation(v)), k, minimize_max=False, cap=cap)


def chores_mms(c, k: int, cap: int = DEFAULT_MMS_CAP) -> MMSResult:
    """Minimax cost share for ``k`` equally responsible agents, with a witness."""
    return _partition_search(list(as_valuation(c)), k, minimize_max=True, cap=cap)


def tps(v, b) -> Fraction:
    """Truncated proportional share: largest z with b * sum(min(v_j, z)) == z."""
    v = as_valuation(v)
    b = to_rational(b)
    _check_entitlement(b)
    vals = sorted(v, reverse=True)
    m = len(vals)
    tail = sum(vals, Fraction(0))
    best = Fraction(0)
    for p in range(m + 1):
        # p largest items are truncated down to z
        if p > 0:
            tail -= vals[p - 1]
        denom = 1 - p * b
        hi = vals[p - 1] if p > 0 else None
        lo = vals[p] if p < m else Fraction(0)
        if denom > 0:
            z = b * tail / denom
        elif denom == 0 and tail == 0 and hi is not None:
            z = hi
        else:
            continue
        if z < lo or (hi is not None and z > hi):
            continue
        if b * sum((min(x, z) for x in vals), Fraction(0)) == z and z > best:
            best = z
    return best


def unit_upper_bound(b) -> Fraction:
    """1/k for the unique k with 1/(k+1) < b <= 1/k."""
    b = to_rational(b)
    _check_entitlement(b)
    return Fraction(1, math.floor(1 / b))


def unit_lower_bound(b) -> Fraction:
    """1/(k+1) for the unique k with 1/(k+1) <= b < 1/k.

    ``b == 1`` (a lone agent) has no such k; it maps to 1.
    """
    b = to_rational(b)
    _check_entitlement(b)
    return Fraction(1, math.ceil(1 / b))


def mms_hat(v, b, cap: int = DEFAULT_MMS_CAP) -> Fraction:
    return mms(v, unit_upper_bound(b).denominator, cap).value


def ps_hat(v, b) -> Fraction:
    return proportional_share(v, unit_upper_bound(b))


def tps_hat(v, b) -> Fraction:
    return tps(v, unit_upper_bound(b))


def mms_bar(c, b, cap: int = DEFAULT_MMS_CAP) -> Fraction:
    return chores_mms(c, unit_lower_bound(b).denominator, cap).value


def ps_bar(c, b) -> Fraction:
    return proportional_share(c, unit_lower_bound(b))


def rrr_k(b) -> int:
    """The k with 1/(k+1) <= b < 1/k (0 for a lone agent with b == 1)."""
    return unit_lower_bound(b).denominator - 1


def rrr_share(c, b) -> Fraction:
    """Sum of the costs at sorted-descending positions 1, 1+k, 1+2k, ..."""
    c = as_valuation(c)
    k = rrr_k(b)
    if k == 0:
        return c.total
    costs = sorted(c, reverse=True)
    return sum(costs[::k], Fraction(0))


def share_value(kind: ShareKind | str, v, b, cap: int = DEFAULT_MMS_CAP) -> Fraction:
    """Dispatch by share name.  Plain ``mms``/``mes`` need b = 1/k."""
    kind = ShareKind(kind)
    b = to_rational(b)
    if kind is ShareKind.PS or kind is ShareKind.MES:
        if kind is ShareKind.MES and b.numerator != 1:
            raise ValueError("MES is defined for b = 1/k")
        return proportional_share(v, b)
    if kind is ShareKind.MMS:
        if b.numerator != 1:
            raise ValueError("MMS is defined for b = 1/k")
        return mms(v, b.denominator, cap).value
    table = {
        ShareKind.TPS: lambda: tps(v, b),
        ShareKind.RRR: lambda: rrr_share(v, b),
        ShareKind.MMS_HAT: lambda: mms_hat(v, b, cap),
        ShareKind.PS_HAT: lambda: ps_hat(v, b),
        ShareKind.TPS_HAT: lambda: tps_hat(v, b),
        ShareKind.MMS_BAR: lambda: mms_bar(v, b, cap),
        ShareKind.PS_BAR: lambda: ps_bar(v, b),
    }
    if kind not in table:
        raise ValueError(f"share {kind.value} needs an anchor; see fairshare.personalized")
    return table[kind]()


@dataclass(frozen=True)
class SylvesterTables:
    q: tuple[int, ...]
    a: tuple[int, ...]
    s: tuple[Fraction, ...]

    @property
    def gamma_lower(self) -> Fraction:
        return self.s[-1]


def sylvester(n: int) -> SylvesterTables:
    """First n Sylvester terms q, the shifted terms a = q - 1 and partial sums of 1/a."""
    if n < 1:
        raise ValueError("n must be positive")
    q = [2]
    while len(q) < n + 1:
        q.append(q[-1] * (q[-1] - 1) + 1)
    a = [x - 1 for x in q]
    s, acc = [], Fraction(0)
    for i in range(n):
        acc += Fraction(1, a[i])
        s.append(acc)
    recip = sum((Fraction(1, x) for x in q[:n]), Fraction(0))
    assert recip == 1 - Fraction(1, a[n]), "sum of 1/q_i != 1 - 1/a_{n+1}"
    return SylvesterTables(tuple(q[:n]), tuple(a[:n]), tuple(s))


def sylvester_tight_entitlements(n: int) -> list[Fraction]:
    """b_i = 1/q_i + 1/(n a_{n+1}): sums to 1 and its unit upper bounds sum to s_n."""
    q = [2]
    while len(q) < n + 1:
        q.append(q[-1] * (q[-1] - 1) + 1)
    a_next = q[n] - 1
    return [Fraction(1, q[i]) + Fraction(1, n * a_next) for i in range(n)]


def hat_sum_bound(entitlements) -> tuple[Fraction, Fraction, bool]:
    bs = [to_rational(b) for b in entitlements]
    if sum(bs, Fraction(0)) != 1:
        raise ValueError("entitlements must sum to 1")
    if len(bs) < 2:
        raise ValueError("need at least two agents")
    total = sum((unit_upper_bound(b) for b in bs), Fraction(0))
    bound = sylvester(len(bs)).s[-1]
    return total, bound, total <= bound
