"""n-player bidding game: highest bid wins, winner pays its bid and picks one item."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Protocol, Sequence

from ..core import GOODS, Allocation, Instance, InstanceError


class IllegalMove(ValueError):
    pass


@dataclass(frozen=True)
class Round:
    round: int
    bids: tuple[Fraction, ...]
    winner: int
    item: int
    payment: Fraction


@dataclass(frozen=True)
class View:
    """What agent ``agent`` sees before bidding in a round."""

    agent: int
    entitlement: Fraction
    items: frozenset[int]
    remaining: frozenset[int]
    budgets: tuple[Fraction, ...]
    bundle: frozenset[int]
    history: tuple[Round, ...]

    @property
    def round(self) -> int:
        return len(self.history) + 1

    @property
    def budget(self) -> Fraction:
        return self.budgets[self.agent]

    @property
    def others_budget(self) -> Fraction:
        return sum(self.budgets, Fraction(0)) - self.budget


@dataclass(frozen=True)
class Move:
    bid: Fraction
    pick: int


class Strategy(Protocol):
    def decide(self, view: View) -> Move: ...


@dataclass
class GameResult:
    allocation: Allocation
    history: list[Round]
    budgets: list[Fraction]
    order: list[int] = field(default_factory=list)

    def to_json(self) -> dict:
        from ..core import format_rational as fr
        return {
            "allocation": self.allocation.to_json(),
            "final_budgets": [fr(b) for b in self.budgets],
            "tiebreak_order": self.order,
            "rounds": [
                {"round": h.round, "bids": [fr(x) for x in h.bids], "winner": h.winner,
                 "item": h.item, "payment": fr(h.payment)}
                for h in self.history
            ],
        }


def tiebreak_order(n: int, rule: str = "index", seed: int | None = None) -> list[int]:
    """Priority order among tied bidders: lowest index, or a seeded random permutation."""
    if rule == "index":
        return list(range(n))
    if rule == "random":
        if seed is None:
            raise ValueError("random tiebreak needs an explicit seed")
        order = list(range(n))
        random.Random(seed).shuffle(order)
        return order
    raise ValueError(f"unknown tiebreak rule {rule!r}")


def run_game(instance: Instance, strategies: Sequence[Strategy], tiebreak: str = "index",
             seed: int | None = None) -> GameResult:
    if instance.kind != GOODS:
        raise InstanceError("the bidding game allocates goods")
    n, m = instance.n, instance.m
    if len(strategies) != n:
        raise ValueError(f"{len(strategies)} strategies for {n} agents")
    order = tiebreak_order(n, tiebreak, seed)
    priority = {a: p for p, a in enumerate(order)}
    items = frozenset(range(m))
    remaining = set(items)
    budgets = list(instance.entitlements)
    bundles: list[set[int]] = [set() for _ in range(n)]
    history: list[Round] = []
    while remaining:
        moves = []
        for i, strat in enumerate(strategies):
            view = View(i, instance.entitlements[i], items, frozenset(remaining), tuple(budgets),
                        frozenset(bundles[i]), tuple(history))
            mv = strat.decide(view)
            bid = Fraction(mv.bid)
            if bid < 0 or bid > budgets[i]:
                raise IllegalMove(f"agent {i} bid {bid} with budget {budgets[i]} in round {len(history) + 1}")
            moves.append(Move(bid, mv.pick))
        top = max(mv.bid for mv in moves)
        winner = min((i for i in range(n) if moves[i].bid == top), key=priority.__getitem__)
        pick = moves[winner].pick
        if pick not in remaining:
            raise IllegalMove(f"agent {winner} picked unavailable item {pick}")
        budgets[winner] -= top
        bundles[winner].add(pick)
        remaining.discard(pick)
        history.append(Round(len(history) + 1, tuple(mv.bid for mv in moves), winner, pick, top))
    return GameResult(Allocation.from_lists(bundles), history, budgets, order)
