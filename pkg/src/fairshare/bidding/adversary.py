"""Exhaustive adversary: the opponents act as one player choosing take/leave per round.

Taking a round requires the adversary's budget to cover the agent's bid; the
adversary then pays exactly that bid and removes the agent's most preferred
remaining item.  Every bit sequence is explored, so the returned minimum is
the strategy's guaranteed value.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..core import ResourceCapExceeded, as_valuation, order_items, to_rational
from .engine import IllegalMove, Move, Round, Strategy, View

DEFAULT_NODE_CAP = 2_000_000


@dataclass(frozen=True)
class AdversaryResult:
    value: Fraction
    bits: tuple[bool, ...]   # True where the adversary took the round on the worst path
    nodes: int


def exhaustive_adversary_value(v, b, strategy: Strategy, cap: int = DEFAULT_NODE_CAP,
                               target: Fraction | None = None) -> AdversaryResult:
    """Minimum final value of ``strategy`` over all adversary behaviours.

    With ``target`` set the search stops at the first path below it, which
    makes refutations cheap; the returned value is then that path's value.
    """
    v = as_valuation(v)
    b = to_rational(b)
    ov = order_items(v)
    rank = ov.rank
    items = frozenset(range(len(v)))
    nodes = 0

    def best(remaining):
        return min(remaining, key=rank.__getitem__)

    def search(remaining, mine, theirs, bundle, history, gained):
        nonlocal nodes
        nodes += 1
        if nodes > cap:
            raise ResourceCapExceeded(f"adversary search exceeded {cap} nodes")
        if not remaining:
            return gained, ()
        view = View(0, b, items, remaining, (mine, theirs), bundle, history)
        mv: Move = strategy.decide(view)
        bid = Fraction(mv.bid)
        if bid < 0 or bid > mine:
            raise IllegalMove(f"bid {bid} exceeds budget {mine}")
        if mv.pick not in remaining:
            raise IllegalMove(f"pick {mv.pick} not available")
        rnd = len(history) + 1
        lose_val, lose_bits = search(remaining - {mv.pick}, mine - bid, theirs, bundle | {mv.pick},
                                     history + (Round(rnd, (bid, Fraction(0)), 0, mv.pick, bid),),
                                     gained + v[mv.pick])
        worst, bits = lose_val, (False,) + lose_bits
        if target is not None and worst < target:
            return worst, bits
        if theirs >= bid:
            e = best(remaining)
            take_val, take_bits = search(remaining - {e}, mine, theirs - bid, bundle,
                                         history + (Round(rnd, (bid, bid), 1, e, bid),), gained)
            if take_val < worst:
                worst, bits = take_val, (True,) + take_bits
        return worst, bits

    value, bits = search(items, b, 1 - b, frozenset(), (), Fraction(0))
    return AdversaryResult(value, bits, nodes)
