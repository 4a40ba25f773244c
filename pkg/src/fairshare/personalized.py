"""Personalized shares anchored at one agent's (valuation, entitlement).

An anchor ``(v, b)`` fixes k and the family of acceptable bundles.  Every
other agent j is then entitled to ``f_j`` of those bundles, where f_j counts
how many "representatives" b_j can pay for.  These shares are feasible and,
at the anchor itself, coincide with the rounded shares of :mod:`shares`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .core import (CHORES, GOODS, Allocation, Instance, InstanceError, ResourceCapExceeded,
                   as_valuation, to_rational)
from .shares import DEFAULT_MMS_CAP, chores_mms, mms, unit_lower_bound, unit_upper_bound

DEFAULT_SUBSET_CAP = 1 << 14


@dataclass(frozen=True)
class PersonalizedContext:
    kind: str
    anchor_valuation: object
    anchor_entitlement: Fraction
    k: int
    threshold: Fraction            # MMS(v, 1/k) for goods, MMS(c, 1/(k+1)) for chores
    partition: tuple[frozenset[int], ...]
    acceptable_bundles: tuple[int, ...]  # bitmasks, increasing
    _packing: list = field(default_factory=list, repr=False, compare=False)

    @property
    def m(self) -> int:
        return len(self.anchor_valuation)


def _subset_values(values, m: int) -> list[Fraction]:
    out = [Fraction(0)] * (1 << m)
    for mask in range(1, 1 << m):
        low = mask & -mask
        out[mask] = out[mask ^ low] + values[low.bit_length() - 1]
    return out


def build_context(kind: str, v, b, cap: int = DEFAULT_SUBSET_CAP,
                  mms_cap: int = DEFAULT_MMS_CAP) -> PersonalizedContext:
    v = as_valuation(v)
    b = to_rational(b)
    m = len(v)
    if (1 << m) > cap:
        raise ResourceCapExceeded(f"2^{m} bundles exceed cap {cap}")
    sums = _subset_values(v, m)
    if kind == GOODS:
        k = unit_upper_bound(b).denominator
        res = mms(v, k, mms_cap)
        ok = tuple(s for s in range(1 << m) if sums[s] >= res.value)
    elif kind == CHORES:
        k = unit_lower_bound(b).denominator - 1
        res = chores_mms(v, k + 1, mms_cap)
        ok = tuple(s for s in range(1 << m) if sums[s] <= res.value)
    else:
        raise InstanceError(f"unknown kind {kind!r}")
    return PersonalizedContext(kind, v, b, k, res.value, res.partition, ok)


def representative_count(ctx_or_kind, b_j, k: int | None = None) -> int:
    """f_j: goods f/(k+1) < b_j <= (f+1)/(k+1); chores (f-1)/k <= b_j < f/k."""
    if isinstance(ctx_or_kind, PersonalizedContext):
        kind, k = ctx_or_kind.kind, ctx_or_kind.k
    else:
        kind = ctx_or_kind
    b_j = to_rational(b_j)
    if kind == GOODS:
        return math.ceil(b_j * (k + 1)) - 1
    if k == 0:
        return 1
    return math.floor(b_j * k) + 1


def _packing_table(ctx: PersonalizedContext) -> list[int]:
    """Per mask U: most disjoint acceptable bundles inside U (goods), or fewest
    acceptable parts partitioning U (chores, -1 when impossible)."""
    m = ctx.m
    ok = bytearray(1 << m)
    for s in ctx.acceptable_bundles:
        ok[s] = 1
    size = 1 << m
    goods = ctx.kind == GOODS
    table = [0] * size
    for u in range(1, size):
        low = u & -u
        rest = u ^ low
        if goods:
            best = table[rest]
            sub = rest
            while True:
                s = sub | low
                if ok[s] and table[u ^ s] + 1 > best:
                    best = table[u ^ s] + 1
                if sub == 0:
                    break
                sub = (sub - 1) & rest
        else:
            best = -1
            sub = rest
            while True:
                s = sub | low
                t = table[u ^ s]
                if ok[s] and t >= 0 and (best < 0 or t + 1 < best):
                    best = t + 1
                if sub == 0:
                    break
                sub = (sub - 1) & rest
        table[u] = best
    return table


def personalized_mms(ctx: PersonalizedContext, v_j, b_j) -> Fraction:
    v_j = as_valuation(v_j)
    if len(v_j) != ctx.m:
        raise InstanceError("valuation length differs from the anchor's")
    f = representative_count(ctx, b_j)
    if ctx.kind == GOODS and (f == 0 or ctx.threshold <= 0):
        return Fraction(0)
    if not ctx._packing:
        ctx._packing.extend(_packing_table(ctx))
    table = ctx._packing
    sums = _subset_values(v_j, ctx.m)
    if ctx.kind == GOODS:
        # v_j is monotone, so supersets of a union of f bundles never help
        return min(sums[u] for u in range(len(table)) if table[u] >= f)
    return max(sums[u] for u in range(len(table)) if 0 <= table[u] <= f)


def personalized_ps(kind: str, k: int, v_j, b_j) -> Fraction:
    v_j = as_valuation(v_j)
    f = representative_count(kind, b_j, k)
    if kind == GOODS:
        return Fraction(f, k) * v_j.total
    return Fraction(f, k + 1) * v_j.total


def coupon_values(v) -> list[Fraction]:
    """Coupon r is worth the r-th most valuable item."""
    return sorted(as_valuation(v), reverse=True)


def coupon_set_value(v, coupons) -> Fraction:
    """Value of a set of 1-based coupon indices."""
    vals = coupon_values(v)
    return sum((vals[r - 1] for r in coupons), Fraction(0))


def personalized_share_matrix(instance: Instance, anchor: int) -> list[Fraction]:
    a = instance.agents[anchor]
    ctx = build_context(instance.kind, a.valuation, a.entitlement)
    return [personalized_mms(ctx, ag.valuation, ag.entitlement) for ag in instance.agents]


def verify_personalized_feasibility(ctx: PersonalizedContext, instance: Instance) -> Allocation:
    """Hand each agent f_j bundles of the anchor's MMS partition and check the shares."""
    if instance.kind != ctx.kind:
        raise InstanceError("instance kind differs from the context's")
    fs = [representative_count(ctx, a.entitlement) for a in instance.agents]
    parts = [set(p) for p in ctx.partition]
    bundles: list[set[int]] = [set() for _ in range(instance.n)]
    nxt = 0
    if ctx.kind == GOODS:
        if sum(fs) > len(parts):
            raise AssertionError("representative counts exceed k")
        for i, f in enumerate(fs):
            for _ in range(f):
                bundles[i] |= parts[nxt]
                nxt += 1
        for p in parts[nxt:]:
            bundles[0] |= p
    else:
        if sum(fs) < len(parts):
            raise AssertionError("representative counts do not cover k + 1 bundles")
        for i, f in enumerate(fs):
            for _ in range(f):
                if nxt < len(parts):
                    bundles[i] |= parts[nxt]
                    nxt += 1
    alloc = Allocation.from_lists(bundles)
    alloc.validate(instance.m)
    for i, a in enumerate(instance.agents):
        share = personalized_mms(ctx, a.valuation, a.entitlement)
        got = a.valuation.value(alloc.bundles[i])
        if (got < share) if ctx.kind == GOODS else (got > share):
            raise AssertionError(f"agent {i} gets {got}, personalized share {share}")
    return alloc


__all__ = [
    "PersonalizedContext", "build_context", "representative_count", "personalized_mms",
    "personalized_ps", "coupon_values", "coupon_set_value", "personalized_share_matrix",
    "verify_personalized_feasibility",
]
