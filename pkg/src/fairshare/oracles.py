"""Brute-force checkers and a catalog of small counterexample instances.

Everything here enumerates: allocations, adversary bit strings, bid grids.
The fixtures shrink the "m very large" constructions down to the smallest
size at which the inequality being demonstrated still holds; each one comes
with a certificate that recomputes that inequality from scratch.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator, Sequence

from .core import (CHORES, GOODS, Allocation, Instance, InstanceError, ResourceCapExceeded,
                   format_rational, to_rational)
from .shares import (mms_bar, mms_hat, ps_bar, sylvester, sylvester_tight_entitlements,
                     unit_upper_bound)

DEFAULT_ENUM_CAP = 10**7


# --- enumeration -------------------------------------------------------------


def enumerate_allocations(instance: Instance, cap: int = DEFAULT_ENUM_CAP) -> Iterator[Allocation]:
    """All n^m complete allocations; item 0 varies slowest."""
    n, m = instance.n, instance.m
    if n**m > cap:
        raise ResourceCapExceeded(f"{n}^{m} allocations exceed cap {cap}")
    for owners in itertools.product(range(n), repeat=m):
        bundles: list[list[int]] = [[] for _ in range(n)]
        for item, i in enumerate(owners):
            bundles[i].append(item)
        yield Allocation.from_lists(bundles)


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    shares: tuple[Fraction, ...]
    witness: Allocation | None
    checked: int

    def to_json(self) -> dict:
        return {
            "feasible": self.feasible,
            "shares": [format_rational(s) for s in self.shares],
            "witness": self.witness.to_json() if self.witness else None,
            "allocations_checked": self.checked,
        }


def check_feasibility(instance: Instance, share_fn: Callable | Sequence,
                      cap: int = DEFAULT_ENUM_CAP) -> FeasibilityResult:
    """Search for an allocation meeting every agent's share.

    ``share_fn`` is either ``f(valuation, entitlement)`` or a list of share
    values.  Goods need value >= share, chores cost <= share.  An infeasible
    result is a refutation: every one of the ``checked`` allocations failed.
    """
    if callable(share_fn):
        shares = tuple(to_rational(share_fn(a.valuation, a.entitlement)) for a in instance.agents)
    else:
        shares = tuple(to_rational(s) for s in share_fn)
    if len(shares) != instance.n:
        raise InstanceError("one share per agent expected")
    goods = instance.kind == GOODS
    vals = [list(a.valuation) for a in instance.agents]
    n, m = instance.n, instance.m
    if n**m > cap:
        raise ResourceCapExceeded(f"{n}^{m} allocations exceed cap {cap}")
    checked = 0
    for owners in itertools.product(range(n), repeat=m):
        checked += 1
        got = [Fraction(0)] * n
        for item, i in enumerate(owners):
            got[i] += vals[i][item]
        if all((g >= s) if goods else (g <= s) for g, s in zip(got, shares)):
            bundles: list[list[int]] = [[] for _ in range(n)]
            for item, i in enumerate(owners):
                bundles[i].append(item)
            return FeasibilityResult(True, shares, Allocation.from_lists(bundles), checked)
    return FeasibilityResult(False, shares, None, checked)


# --- set-function valuations (tiny m only) -------------------------------------


@dataclass(frozen=True)
class TableValuation:
    """Arbitrary monotone set function given as a table over bitmasks."""

    m: int
    table: tuple[Fraction, ...]

    def value(self, bundle) -> Fraction:
        mask = 0
        for j in bundle:
            mask |= 1 << j
        return self.table[mask]


def _labelings(m: int, k: int):
    return itertools.product(range(k), repeat=m)


def table_mms(v: TableValuation, k: int) -> Fraction:
    """Best worst bundle over k-partitions, by enumeration (m <= 8)."""
    if v.m > 8:
        raise ResourceCapExceeded("table valuations are limited to 8 items")
    best = None
    for lab in _labelings(v.m, k):
        masks = [0] * k
        for j, p in enumerate(lab):
            masks[p] |= 1 << j
        worst = min(v.table[x] for x in masks)
        best = worst if best is None else max(best, worst)
    return best


def table_mes(v: TableValuation, k: int) -> Fraction:
    """Best average bundle value over k-partitions, by enumeration (m <= 8)."""
    if v.m > 8:
        raise ResourceCapExceeded("table valuations are limited to 8 items")
    best = None
    for lab in _labelings(v.m, k):
        masks = [0] * k
        for j, p in enumerate(lab):
            masks[p] |= 1 << j
        avg = sum((v.table[x] for x in masks), Fraction(0)) / k
        best = avg if best is None else max(best, avg)
    return best


# --- Sylvester bound ---------------------------------------------------------------


def sylvester_vector_oracle(n: int, K: int) -> tuple[int, tuple[int, ...] | None]:
    """Check sum 1/(k_i - 1) <= s_n for every 2 <= k_1 <= ... <= k_n <= K with sum 1/k_i < 1.

    Returns the number of vectors checked and the first violation, if any.
    """
    s_n = sylvester(n).s[-1]
    checked = 0
    for ks in itertools.combinations_with_replacement(range(2, K + 1), n):
        if sum(Fraction(1, k) for k in ks) >= 1:
            continue
        checked += 1
        if sum(Fraction(1, k - 1) for k in ks) > s_n:
            return checked, ks
    return checked, None


# --- bidding-game searches ---------------------------------------------------------


def best_monotone_value(values: Sequence, b, grid: int) -> Fraction:
    """Best guarantee of a strategy whose bids never increase, bids restricted to multiples of 1/grid.

    The agent always takes the best remaining item, and the adversary may take
    any round whose bid it can match, paying that bid.  ``b * grid`` must be
    an integer.
    """
    vals = sorted((to_rational(x) for x in values), reverse=True)
    b = to_rational(b)
    units = b * grid
    if units.denominator != 1:
        raise ValueError("b * grid must be an integer")
    mine, theirs = int(units), grid - int(units)

    @lru_cache(maxsize=None)
    def val(r: int, a: int, t: int, cap: int) -> Fraction:
        if r == len(vals):
            return Fraction(0)
        best = None
        for bid in range(min(cap, a) + 1):
            w = vals[r] + val(r + 1, a - bid, t, bid)
            if t >= bid:
                w = min(w, val(r + 1, a, t - bid, bid))
            if best is None or w > best:
                best = w
        return best

    return val(0, mine, theirs, mine)


def first_bid_window(values: Sequence, b, target) -> tuple[Fraction, Fraction] | None:
    """Open interval of round-1 bids from which ``target`` is still guaranteed.

    None when no first bid works.  A lower end below 0 means bid 0 works too.
    """
    from .bidding.solver import solve_counts

    s = solve_counts(values)
    b, target = to_rational(b), to_rational(target)
    vals = s.values
    A = s.threshold(1, target - vals[0])
    B = s.threshold(1, target)
    hi = (b - A) / (1 - A) if A < 1 else Fraction(-1)
    lo = 1 - b / B if B > 0 else Fraction(-1)
    hi = min(hi, b)
    if hi <= max(lo, Fraction(0)) and not (lo < 0 <= hi):
        return None
    return lo, hi


def increasing_bid_path(strategy, v, b, depth: int = 3):
    """Search the first ``depth`` rounds of the adversary tree for a bid that rises.

    Returns ``(bits, bids)`` for the first such path.
    """
    from .bidding.engine import Round, View
    from .core import as_valuation, order_items

    v = as_valuation(v)
    b = to_rational(b)
    rank = order_items(v).rank
    items = frozenset(range(len(v)))

    def walk(remaining, mine, theirs, bundle, history, bids, bits):
        if len(bids) >= 2 and bids[-1] > bids[-2]:
            return bits, bids
        if len(bids) == depth or not remaining:
            return None
        mv = strategy.decide(View(0, b, items, remaining, (mine, theirs), bundle, history))
        bid = Fraction(mv.bid)
        rnd = len(history) + 1
        found = walk(remaining - {mv.pick}, mine - bid, theirs, bundle | {mv.pick},
                     history + (Round(rnd, (bid, Fraction(0)), 0, mv.pick, bid),),
                     bids + (bid,), bits + (False,))
        if found or theirs < bid:
            return found
        e = min(remaining, key=rank.__getitem__)
        return walk(remaining - {e}, mine, theirs - bid, bundle,
                    history + (Round(rnd, (bid, bid), 1, e, bid),), bids + (bid,), bits + (True,))

    return walk(items, b, 1 - b, frozenset(), (), (), ())


# --- fixtures -------------------------------------------------------------------------


@dataclass
class Certificate:
    holds: bool
    facts: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        def enc(x):
            if isinstance(x, Fraction):
                return format_rational(x)
            if isinstance(x, (list, tuple)):
                return [enc(y) for y in x]
            if isinstance(x, dict):
                return {k: enc(y) for k, y in x.items()}
            return x
        return {"holds": self.holds, "facts": enc(self.facts)}


@dataclass
class Fixture:
    name: str
    params: dict
    instance: Instance | None
    check: Callable[[], Certificate]
    note: str = ""

    def certify(self) -> Certificate:
        return self.check()


def _unit_instance(kind, m, bs):
    return Instance.build(kind, [[1] * m] * len(bs), bs)


def _ratio_minmax(instance: Instance, baseline: Sequence[Fraction]) -> Fraction:
    """min over assignments of max_i cost_i / baseline_i."""
    best = None
    for alloc in enumerate_allocations(instance):
        worst = max(c / s for c, s in zip(alloc.values(instance), baseline))
        best = worst if best is None or worst < best else best
    return best


def goods_halfmms_lb(n: int = 3, eps=Fraction(1, 10)) -> Fixture:
    """m = 2n-2 unit goods; agent n-1 has b in (1/(n+1), 1/n), the rest b in (1/n, 1/(n-1))."""
    if n < 2:
        raise ValueError("n >= 2")
    eps = to_rational(eps)
    m = 2 * n - 2
    # spreading the gap evenly keeps agent n-1 strictly inside (1/(n+1), 1/n)
    high = Fraction(1, n) + (Fraction(1, n) - Fraction(1, n + 1)) / (2 * (n - 1))
    low = 1 - (n - 1) * high
    inst = _unit_instance(GOODS, m, [high] * (n - 1) + [low])

    def check():
        hats = [mms_hat(a.valuation, a.entitlement) for a in inst.agents]
        over = check_feasibility(inst, [(Fraction(1, 2) + eps) * h for h in hats])
        half = check_feasibility(inst, [h / 2 for h in hats])
        ok = (not over.feasible) and half.feasible and hats == [2] * (n - 1) + [1]
        return Certificate(ok, {"mms_hat": hats, "factor": Fraction(1, 2) + eps,
                                "refuted_over": over.checked, "half_feasible": half.feasible})

    return Fixture("goods-halfmms-lb", {"n": n, "eps": eps}, inst, check,
                   "every allocation leaves some agent below (1/2 + eps) of its MMS-hat")


def chores_2domination_lb(t: int = 3) -> Fixture:
    if t < 2:
        raise ValueError("t >= 2")
    m = 2 * t
    inst = _unit_instance(CHORES, m, [Fraction(2 * t - 1, 2 * t), Fraction(1, 2 * t)])

    def check():
        bars = [mms_bar(a.valuation, a.entitlement) for a in inst.agents]
        ratio = _ratio_minmax(inst, bars)
        psb = [ps_bar(a.valuation, a.entitlement) for a in inst.agents]
        # expected counts x_1 + x_2 = m; the best max ratio splits m in proportion to ps_bar
        exante = Fraction(m) / sum(psb)
        ok = bars == [t, 1] and ratio >= 2 - Fraction(1, t) and exante >= 2 - Fraction(2, t)
        return Certificate(ok, {"mms_bar": bars, "min_max_ratio": ratio,
                                "ps_bar": psb, "exante_min_max_ratio": exante})

    return Fixture("chores-2domination-lb", {"t": t}, inst, check,
                   "some agent pays (2 - 1/t) times its MMS-bar in every assignment")


def chores_three_halves_lb(n: int = 4) -> Fixture:
    if n < 3:
        raise ValueError("n >= 3")
    other = Fraction(2 * n - 1, 2 * n * (n - 1))
    inst = _unit_instance(CHORES, 2 * n, [other] * (n - 1) + [Fraction(1, 2 * n)])

    def check():
        bars = [mms_bar(a.valuation, a.entitlement) for a in inst.agents]
        ratio = _ratio_minmax(inst, bars)
        ok = bars == [2] * (n - 1) + [1] and ratio >= Fraction(3, 2)
        return Certificate(ok, {"mms_bar": bars, "min_max_ratio": ratio,
                                "max_responsibility": max(inst.entitlements)})

    return Fixture("chores-3half-lb", {"n": n}, inst, check,
                   "some agent pays 3/2 of its MMS-bar in every assignment")


def chores_bobw_lb(m: int = 4) -> Fixture:
    """m unit chores; agent 0 has b in (1/m, 1/(m-1)), three others share the rest."""
    if m < 3:
        raise ValueError("m >= 3")
    b0 = (Fraction(1, m) + Fraction(1, m - 1)) / 2
    rest = (1 - b0) / 3
    inst = _unit_instance(CHORES, m, [b0, rest, rest, rest])

    def check():
        from .chores import assign_bobw

        bars = [mms_bar(a.valuation, a.entitlement) for a in inst.agents]
        # identical unit costs: expected costs sum to m = sum of PS, so each is exactly PS
        expected0 = b0 * m
        p_lower = (expected0 - 1) / (m - 1)  # E <= P(>=2)*m + (1 - P(>=2))*1
        ra = assign_bobw(inst)
        marg = all(ra.coupon_marginal(i, c) == inst.entitlements[i]
                   for i in range(inst.n) for c in range(1, m + 1))
        heavy = sum((o.weight for o in ra.outcomes if len(o.allocation.bundles[0]) >= 2), Fraction(0))
        ok = bars[0] == 1 and expected0 > 1 and p_lower > 0 and marg and heavy > 0
        return Certificate(ok, {"mms_bar_0": bars[0], "expected_cost_0": expected0,
                                "prob_two_or_more_lower_bound": p_lower,
                                "bobw_prob_two_or_more": heavy, "marginals_proportional": marg})

    return Fixture("chores-bobw-lb", {"m": m}, inst, check,
                   "proportional marginals force agent 0 to twice its MMS-bar with positive probability")


def nonadditive_zero_share() -> Fixture:
    """Items A, B, C, D = 0..3; v pairs AB/CD, v' pairs AC/BD; 3+ items are worth 1."""
    def table(pairs):
        out = []
        for mask in range(16):
            size = bin(mask).count("1")
            out.append(Fraction(1) if size > 2 or mask in pairs else Fraction(0))
        return TableValuation(4, tuple(out))

    v = table({0b0011, 0b1100})
    w = table({0b0101, 0b1010})

    def check():
        both = 0
        for owners in itertools.product(range(2), repeat=4):
            s0 = [j for j in range(4) if owners[j] == 0]
            s1 = [j for j in range(4) if owners[j] == 1]
            if v.value(s0) > 0 and w.value(s1) > 0:
                both += 1
        shares = [table_mms(v, 2), table_mms(w, 2)]
        ok = both == 0 and all(s > 0 for s in shares)
        return Certificate(ok, {"mms_half": shares, "allocations_with_both_positive": both,
                                "mes_half": [table_mes(v, 2), table_mes(w, 2)]})

    fx = Fixture("nonadditive-zero-share", {}, None, check,
                 "both MMS values at 1/2 are 1, yet no allocation gives both agents anything")
    fx.params["valuations"] = (v, w)
    return fx


def nonmonotone(fillers: int = 10, grid: int = 90) -> Fixture:
    """b = (1/3, 2/3); three items of 1/4 and ``fillers`` items of 1/(4 fillers)."""
    values = [Fraction(1, 4)] * 3 + [Fraction(1, 4 * fillers)] * fillers
    b = Fraction(1, 3)
    inst = Instance.build(GOODS, [values, values], [b, 1 - b])

    def check():
        from .bidding.adversary import exhaustive_adversary_value
        from .bidding.strategies import optimal_strategy

        strat = optimal_strategy(values, b)
        opt = exhaustive_adversary_value(values, b, strat).value
        mono = best_monotone_value(values, b, grid)
        path = increasing_bid_path(strat, values, b)
        ok = opt > mono and path is not None
        return Certificate(ok, {"optimal": opt, "best_monotone_on_grid": mono,
                                "rising_path_bits": path[0] if path else None,
                                "rising_path_bids": path[1] if path else None})

    return Fixture("nonmonotone", {"fillers": fillers, "grid": grid}, inst, check,
                   "the optimal strategy beats every grid monotone strategy and raises its bid")


def nonmonotone_half(fillers: int = 10, grid: int = 90, e0=Fraction(39, 100)) -> Fixture:
    """Adds an item e0 to the nonmonotone fixture and sets b = 1/2 + 1/grid."""
    e0 = to_rational(e0)
    values = [e0] + [Fraction(1, 4)] * 3 + [Fraction(1, 4 * fillers)] * fillers
    b = Fraction(1, 2) + Fraction(1, grid)
    inst = Instance.build(GOODS, [values, values], [b, 1 - b])

    def check():
        from .bidding.solver import solve_counts

        from .bidding.adversary import exhaustive_adversary_value
        from .bidding.strategies import safe_strategy

        half = sum(values, Fraction(0)) / 2
        opt = solve_counts(values).value(0, b)
        safe = exhaustive_adversary_value(values, b, safe_strategy(values, b)).value
        mono = best_monotone_value(values, b, grid)
        ok = opt >= half > mono and safe >= half
        return Certificate(ok, {"half_total": half, "optimal": opt, "safe_strategy": safe,
                                "best_monotone_on_grid": mono})

    return Fixture("nonmonotone-half", {"fillers": fillers, "grid": grid, "e0": e0}, inst, check,
                   "only non-monotone play reaches half the total value")


def myopic_pair(b=Fraction(51, 100)) -> Fixture:
    b = to_rational(b)
    first = [Fraction(34, 100), Fraction(33, 100), Fraction(33, 100)]
    second = [Fraction(34, 100)] + [Fraction(1, 100)] * 66

    def check():
        w1 = first_bid_window(first, b, Fraction(1, 2))
        w2 = first_bid_window(second, b, Fraction(1, 2))
        disjoint = w1 is None or w2 is None or w1[1] <= w2[0] or w2[1] <= w1[0]
        ok = w1 is not None and w2 is not None and disjoint
        return Certificate(ok, {"window_three_items": w1, "window_many_items": w2})

    fx = Fixture("myopic-pair", {"b": b}, None, check,
                 "same top item, disjoint sets of first bids that still secure 1/2")
    fx.params["valuations"] = (first, second)
    return fx


def lookahead(eps=Fraction(1, 24)) -> Fixture:
    eps = to_rational(eps)
    if not 0 < eps < Fraction(1, 12):
        raise ValueError("eps must lie in (0, 1/12)")
    b = Fraction(1, 3) + eps / 72
    values = [(14 + eps) / 72, (10 - eps) / 72] + [Fraction(8, 72)] * 6
    inst = Instance.build(GOODS, [values, values], [b, 1 - b])

    def check():
        from .bidding.adversary import exhaustive_adversary_value
        from .bidding.strategies import K2TableStrategy

        blind = exhaustive_adversary_value(values, b, K2TableStrategy(values, b, lookahead=False))
        full = exhaustive_adversary_value(values, b, K2TableStrategy(values, b))
        goal = Fraction(1, 4)
        ok = blind.value < goal <= full.value
        return Certificate(ok, {"goal": goal, "table_without_lookahead": blind.value,
                                "worst_bits": blind.bits, "table_with_lookahead": full.value})

    return Fixture("lookahead", {"eps": eps}, inst, check,
                   "ignoring the eighth item lets the adversary hold the table below 1/4")


def sylvester_tight(n: int = 3) -> Fixture:
    from .goods_exante import exante_grand_bundle_lottery, verify_exante_tightness

    bs = sylvester_tight_entitlements(n)
    inst = Instance.build(GOODS, [[1]] * n, bs)

    def check():
        hats = sum((unit_upper_bound(x) for x in bs), Fraction(0))
        s_n = sylvester(n).s[-1]
        lot = exante_grand_bundle_lottery(inst)
        cert = verify_exante_tightness(n)
        ok = hats == s_n and lot.total_weight() == 1 and cert.infeasible
        return Certificate(ok, {"sum_hat": hats, "s_n": s_n, "demanded": cert.demanded,
                                "available": cert.available})

    return Fixture("sylvester-tight", {"n": n}, inst, check,
                   "unit upper bounds sum to s_n exactly")


def bobw_goods(n: int = 3, m: int = 2) -> Fixture:
    from .goods_exante import bobw_goods_impossibility_fixture, bobw_goods_instance

    inst, _ = bobw_goods_instance(n, m)

    def check():
        _, cert = bobw_goods_impossibility_fixture(n, m)
        return Certificate(cert.holds, {"favoured": list(cert.favoured),
                                        "allocations_checked": cert.allocations_checked})

    return Fixture("bobw-goods", {"n": n, "m": m}, inst, check,
                   "serving every favoured agent starves another agent")


FIXTURES: dict[str, Callable[..., Fixture]] = {
    "goods-halfmms-lb": goods_halfmms_lb,
    "chores-2domination-lb": chores_2domination_lb,
    "chores-3half-lb": chores_three_halves_lb,
    "chores-bobw-lb": chores_bobw_lb,
    "nonadditive-zero-share": nonadditive_zero_share,
    "nonmonotone": nonmonotone,
    "nonmonotone-half": nonmonotone_half,
    "myopic-pair": myopic_pair,
    "lookahead": lookahead,
    "sylvester-tight": sylvester_tight,
    "bobw-goods": bobw_goods,
}


def fixture(name: str, **params) -> Fixture:
    try:
        factory = FIXTURES[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(sorted(FIXTURES))}") from None
    return factory(**params)


__all__ = [
    "enumerate_allocations", "check_feasibility", "FeasibilityResult", "TableValuation",
    "table_mms", "table_mes", "sylvester_vector_oracle", "best_monotone_value",
    "first_bid_window", "increasing_bid_path", "Certificate", "Fixture", "FIXTURES", "fixture",
    "DEFAULT_ENUM_CAP",
]
