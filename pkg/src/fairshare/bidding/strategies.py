"""Bidding strategies.

Every strategy is a pure function of the :class:`View` it is shown: anything
that depends on earlier rounds is recomputed by replaying ``view.history``.
This keeps strategies safe to explore under the exhaustive adversary, which
branches on every round.

Budgets are absolute (entitlements sum to 1).  ``opponent_bound`` is the
pessimistic estimate used by the safe strategy: the opponents start with
``1 - b`` and, whenever one of them beats us, it pays at least our bid.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from ..core import PerturbedValue, as_valuation, order_items, to_rational
from ..shares import tps, unit_upper_bound
from .engine import Move, View
from .solver import TwoPlayerSolver, perturbed_sequence


SAFE_SOLVER_CAP = 14


def opponent_bound(view: View) -> Fraction:
    lost = sum((h.bids[view.agent] for h in view.history if h.winner != view.agent), Fraction(0))
    return max(1 - view.entitlement - lost, Fraction(0))


def public_opponents(view: View) -> Fraction:
    return view.others_budget


@dataclass(frozen=True)
class Snapshot:
    """Agent-side state at the start of a round, rebuilt from history."""

    round: int
    remaining: frozenset[int]
    budget: Fraction
    opponents: Fraction
    gained: Fraction
    won: tuple[bool, ...]  # per past round: did we win it


def replay(view: View, v, pessimistic: bool = True) -> list[Snapshot]:
    """Snapshots at the start of every round so far, the current one last."""
    remaining = set(view.items)
    budget = view.entitlement
    opp = 1 - view.entitlement
    gained = Fraction(0)
    won: list[bool] = []
    snaps = [Snapshot(1, frozenset(remaining), budget, opp, gained, ())]
    for h in view.history:
        if h.winner == view.agent:
            budget -= h.payment
            gained += v[h.item]
            won.append(True)
        else:
            opp -= h.bids[view.agent] if pessimistic else h.payment
            won.append(False)
        remaining.discard(h.item)
        snaps.append(Snapshot(h.round + 1, frozenset(remaining), budget, max(opp, Fraction(0)),
                              gained, tuple(won)))
    return snaps


class _Base:
    def __init__(self, v, b):
        self.v = as_valuation(v)
        self.b = to_rational(b)
        self.ov = order_items(self.v)

    def best(self, remaining) -> int:
        return min(remaining, key=self.ov.rank.__getitem__)


class OptimalStrategy(_Base):
    """Worst-case-optimal bids from the exact two-player solver.

    The opponents are merged into one player.  Bids are chosen to keep the
    current max-min value ``V(f)``, or a caller-supplied raw target.
    """

    def __init__(self, v, b, pessimistic: bool = False):
        super().__init__(v, b)
        self.pessimistic = pessimistic
        self._solvers: dict[frozenset[int], TwoPlayerSolver] = {}

    def solver(self, remaining: frozenset[int]) -> TwoPlayerSolver:
        s = self._solvers.get(remaining)
        if s is None:
            s = TwoPlayerSolver(perturbed_sequence(self.ov, remaining))
            self._solvers[remaining] = s
        return s

    def guaranteed(self, remaining, budget, opponents) -> Fraction:
        total = budget + opponents
        if not remaining or total == 0:
            return Fraction(0)
        return self.solver(frozenset(remaining)).value(0, budget / total).value

    def bid_for(self, remaining, budget, opponents, target: Fraction | None = None) -> Fraction:
        total = budget + opponents
        if not remaining or total == 0:
            return Fraction(0)
        solver = self.solver(frozenset(remaining))
        f = budget / total
        w = None
        if target is not None:
            w = PerturbedValue(target, 0)
            if solver.threshold(0, w) >= f:
                w = None
        q = solver.bid(0, f, w)
        return min(q * total, budget)

    def decide(self, view: View) -> Move:
        opp = opponent_bound(view) if self.pessimistic else view.others_budget
        return Move(self.bid_for(view.remaining, view.budget, opp), self.best(view.remaining))


class BidYourValueStrategy(_Base):
    """Bid the best remaining item's share of the total value, in budget units.

    The exchange rate is fixed when the strategy starts (round ``start``):
    total budget in play divided by the value still on the table.
    """

    def __init__(self, v, b, start: int = 1, pessimistic: bool = False):
        super().__init__(v, b)
        self.start = start
        self.pessimistic = pessimistic

    def rate(self, snap: Snapshot) -> Fraction:
        value = self.v.value(snap.remaining)
        if value == 0:
            return Fraction(0)
        return (snap.budget + snap.opponents) / value

    def bid_at(self, rate: Fraction, remaining, budget) -> tuple[Fraction, int]:
        e = self.best(remaining)
        return min(budget, self.v[e] * rate), e

    def decide(self, view: View) -> Move:
        snaps = replay(view, self.v, self.pessimistic)
        anchor = snaps[min(self.start, len(snaps)) - 1]
        bid, e = self.bid_at(self.rate(anchor), view.remaining, view.budget)
        return Move(bid, e)


def table_f(x72: Fraction) -> Fraction | None:
    """The k = 2 bid schedule: item worth x/72 gets a bid of f(x)/72; None above 18/72."""
    if x72 < 8:
        return x72
    if x72 < 9:
        return Fraction(8)
    if x72 < 13:
        return x72 - 1
    if x72 < 14:
        return Fraction(12)
    if x72 < 18:
        return x72 - 2
    return None


class K2TableStrategy(_Base):
    """Table strategy for 1/3 < b <= 1/2, on values scaled so that TPS(v, 1/2) = 1/2.

    Exceptions bid the whole budget: when the table bid is unaffordable and
    when winning the item reaches the goal of 1/4.  If the eighth item is
    worth at least 1/12, bid 1/9 on each of the first eight items instead.
    After winning e1 and losing e2 with v(e1) + v(e3) < 1/4 the strategy
    hands over to bid-your-value on what remains.

    ``lookahead=False`` drops the eighth-item check and always uses the table.
    """

    def __init__(self, v, b, lookahead: bool = True):
        super().__init__(v, b)
        if not (Fraction(1, 3) < self.b <= Fraction(1, 2)):
            raise ValueError("table strategy needs 1/3 < b <= 1/2")
        t = tps(self.v, Fraction(1, 2))
        self.scale = Fraction(1, 2) / t if t > 0 else Fraction(0)
        self.goal = Fraction(1, 4)
        order = self.ov.order
        self.ninths = lookahead and len(order) >= 8 and self.x(order[7]) >= Fraction(1, 12)

    def x(self, item: int) -> Fraction:
        return self.v[item] * self.scale

    def preconditions(self) -> bool:
        """Item value bounds the table is designed for: v(e1) < 1/4 and v(e2) + v(e3) < 1/4.

        The ninths plan needs neither.
        """
        if self.ninths or self.scale == 0:
            return True
        xs = [self.x(j) for j in self.ov.order[:3]] + [Fraction(0)] * 3
        return xs[0] < self.goal and xs[1] + xs[2] < self.goal

    def switch_round(self, snaps: list[Snapshot]) -> int | None:
        """Round at which the bid-your-value hand-over starts, if it happened."""
        o = self.ov.order
        if len(snaps) >= 3 and len(o) >= 3 and snaps[2].won[:2] == (True, False):
            if self.x(o[0]) + self.x(o[2]) < self.goal:
                return 3
        return None

    def table_move(self, snap: Snapshot, remaining, budget) -> Move:
        e = self.best(remaining)
        need = self.goal - snap.gained * self.scale
        if need <= 0 or self.scale == 0:
            return Move(Fraction(0), e)
        x = self.x(e)
        if x >= need:
            return Move(budget, e)
        if self.ninths and snap.round <= 8:
            return Move(min(budget, Fraction(1, 9)), e)
        f = table_f(72 * x)
        bid = budget if f is None else f / 72
        return Move(min(bid, budget), e)

    def decide(self, view: View) -> Move:
        snaps = replay(view, self.v)
        start = None if self.ninths else self.switch_round(snaps)
        if start is not None:
            byv = BidYourValueStrategy(self.v, self.b, start, pessimistic=True)
            return byv.decide(view)
        return self.table_move(snaps[-1], view.remaining, view.budget)


class LargeKStrategy(_Base):
    """Modified bid-your-value for b <= 1/3 (k >= 3), values scaled so TPS(v, 1/k) = 1/k.

    Whole budget while the best item alone reaches the goal 1/(2k) (this
    covers huge items, worth more than b); 1/(2(k+1)) on large items worth
    between that and the goal; the item's value otherwise.
    """

    def __init__(self, v, b):
        super().__init__(v, b)
        self.k = unit_upper_bound(self.b).denominator
        t = tps(self.v, Fraction(1, self.k))
        self.scale = Fraction(1, self.k) / t if t > 0 else Fraction(0)
        self.goal = Fraction(1, 2 * self.k)

    def move(self, snap: Snapshot, remaining, budget) -> Move:
        e = self.best(remaining)
        need = self.goal - snap.gained * self.scale
        if need <= 0 or self.scale == 0:
            return Move(Fraction(0), e)
        x = self.v[e] * self.scale
        if x >= need or x > self.b:
            bid = budget
        elif x > Fraction(1, 2 * (self.k + 1)):
            bid = Fraction(1, 2 * (self.k + 1))
        else:
            bid = x
        return Move(min(bid, budget), e)

    def decide(self, view: View) -> Move:
        return self.move(replay(view, self.v)[-1], view.remaining, view.budget)


class SafeStrategy(_Base):
    """Composite strategy aiming at half of TPS at the rounded-up entitlement.

    Dispatch on k = 1/b_hat: the exact solver for k = 1, the table strategy
    for k = 2 and modified bid-your-value for k >= 3.  Opponent budgets are
    tracked pessimistically.  Whenever our share of the (bounded) total budget
    exceeds 1/2 and half the remaining value still covers what we need, the
    strategy hands over to the exact solver, which then guarantees it.
    """

    def __init__(self, v, b, solver_cap: int = SAFE_SOLVER_CAP):
        super().__init__(v, b)
        self.k = unit_upper_bound(self.b).denominator
        self.target = tps(self.v, Fraction(1, self.k)) / 2
        self.optimal = OptimalStrategy(self.v, self.b, pessimistic=True)
        self.inner: Callable | None = None
        self.exact_from_start = self.k == 1
        if self.k == 2:
            self.inner = K2TableStrategy(self.v, self.b)
            # Outside the table's item value bounds, use the exact solver when it fits.
            if not self.inner.preconditions() and len(self.v) <= solver_cap:
                self.exact_from_start = True
        elif self.k >= 3:
            self.inner = LargeKStrategy(self.v, self.b)

    def handover(self, snaps: list[Snapshot]) -> int | None:
        """First round at which the exact solver takes over."""
        if self.exact_from_start:
            return 1
        for s in snaps:
            need = self.target - s.gained
            if need <= 0:
                return None
            total = s.budget + s.opponents
            if total > 0 and 2 * s.budget > total and self.v.value(s.remaining) >= 2 * need:
                return s.round
        return None

    def decide(self, view: View) -> Move:
        snaps = replay(view, self.v)
        snap = snaps[-1]
        e = self.best(view.remaining)
        need = self.target - snap.gained
        if need <= 0:
            return Move(Fraction(0), e)
        if self.handover(snaps) is not None:
            bid = self.optimal.bid_for(view.remaining, view.budget, snap.opponents, need)
            return Move(bid, e)
        return self.inner.decide(view)


class ApproxOptimalStrategy(_Base):
    """Near-optimal strategy: exact play on a coarsened valuation, then bid-your-value.

    With delta = eps/4, items worth more than delta * v(M) are kept; the rest
    are replaced by equal shares of their total.  The coarsened game is solved
    on raw values (identical items collapse), and the exact bids are used
    while kept items remain.  Afterwards the strategy bids its value.
    """

    def __init__(self, v, b, eps):
        super().__init__(v, b)
        self.eps = to_rational(eps)
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        delta = self.eps / 4
        total = self.v.total
        order = self.ov.order
        self.prefix = [j for j in order if self.v[j] > delta * total]
        rest = [j for j in order if j not in self.prefix]
        coarse = {j: self.v[j] for j in self.prefix}
        if rest:
            share = (total - sum((self.v[j] for j in self.prefix), Fraction(0))) / len(rest)
            coarse.update({j: share for j in rest})
        self.coarse = coarse
        self._solvers: dict[tuple, TwoPlayerSolver] = {}

    def solver(self, remaining) -> TwoPlayerSolver:
        key = tuple(sorted((self.coarse[j] for j in remaining), reverse=True))
        s = self._solvers.get(key)
        if s is None:
            s = TwoPlayerSolver(key, zero=Fraction(0))
            self._solvers[key] = s
        return s

    def decide(self, view: View) -> Move:
        e = self.best(view.remaining)
        q = len(self.prefix)
        if view.round <= q:
            total = view.budget + view.others_budget
            if total == 0:
                return Move(Fraction(0), e)
            solver = self.solver(view.remaining)
            bid = solver.bid(0, view.budget / total) * total
            return Move(min(bid, view.budget), e)
        byv = BidYourValueStrategy(self.v, self.b, start=q + 1)
        return byv.decide(view)


class ConstantStrategy(_Base):
    """Bid a fixed amount (capped by the budget) every round; handy as an opponent."""

    def __init__(self, v, b, amount):
        super().__init__(v, b)
        self.amount = to_rational(amount)

    def decide(self, view: View) -> Move:
        return Move(min(self.amount, view.budget), self.best(view.remaining))


class ScheduleStrategy(_Base):
    """Bid ``schedule[r-1]`` in round r (0 once the schedule runs out)."""

    def __init__(self, v, b, schedule):
        super().__init__(v, b)
        self.schedule = [to_rational(x) for x in schedule]

    def decide(self, view: View) -> Move:
        r = view.round - 1
        bid = self.schedule[r] if r < len(self.schedule) else Fraction(0)
        return Move(min(bid, view.budget), self.best(view.remaining))


def optimal_strategy(v, b) -> OptimalStrategy:
    return OptimalStrategy(v, b)


def bid_your_value_strategy(v, b) -> BidYourValueStrategy:
    return BidYourValueStrategy(v, b)


def k2_table_strategy(v, b) -> K2TableStrategy:
    return K2TableStrategy(v, b)


def safe_strategy(v, b) -> SafeStrategy:
    return SafeStrategy(v, b)


def approx_optimal_strategy(v, b, eps) -> ApproxOptimalStrategy:
    return ApproxOptimalStrategy(v, b, eps)


STRATEGIES = {
    "optimal": optimal_strategy,
    "safe": safe_strategy,
    "byv": bid_your_value_strategy,
    "table": k2_table_strategy,
}


def make_strategy(name: str, v, b) -> object:
    if name.startswith("const:"):
        return ConstantStrategy(v, b, name.split(":", 1)[1])
    if name.startswith("approx:"):
        return ApproxOptimalStrategy(v, b, name.split(":", 1)[1])
    try:
        return STRATEGIES[name](v, b)
    except KeyError:
        raise ValueError(f"unknown strategy {name!r}") from None
