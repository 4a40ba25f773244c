"""Chore assignment: debt-based picking sequences and the coupon lottery.

A *reverse* picking sequence ``pi`` lists, for r = 1..m, the agent who picks
when r chores remain.  Executed from r = m down to 1, each picker takes the
cheapest remaining chore, so agents who rarely appear early in ``pi`` avoid
the expensive tail.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .core import CHORES, Allocation, Instance, InstanceError, to_rational
from .shares import rrr_k


class InvariantBreach(AssertionError):
    """A property guaranteed by construction failed; indicates a bug."""


@dataclass(frozen=True)
class PickingSequence:
    pi: tuple[int, ...]  # pi[r - 1] picks when r chores remain

    def spreading_ok(self, responsibilities: Sequence[Fraction]) -> bool:
        for i, b in enumerate(responsibilities):
            k = rrr_k(b)
            if k == 0:
                continue
            count = 0
            for r, agent in enumerate(self.pi, start=1):
                count += agent == i
                if r % k == 0 and count > r // k:
                    return False
            # a partial final block still allows only ceil(r/k) picks
            if count > math.ceil(len(self.pi) / k):
                return False
        return True


def max_debt(debts: list[Fraction]) -> int:
    """Eligible agent with the largest debt, lowest index on ties."""
    best = None
    for i, d in enumerate(debts):
        if d > 0 and (best is None or d > debts[best]):
            best = i
    if best is None:
        raise InvariantBreach("no agent has positive debt")
    return best


def build_picking_sequence(responsibilities: Sequence, m: int,
                           select: Callable[[list[Fraction]], int] = max_debt) -> PickingSequence:
    bs = [to_rational(b) for b in responsibilities]
    if sum(bs, Fraction(0)) != 1:
        raise InstanceError("responsibilities must sum to 1")
    debts = list(bs)
    pi = []
    for _ in range(m):
        i = select(debts)
        if debts[i] <= 0:
            raise InvariantBreach(f"selected agent {i} has no positive debt")
        pi.append(i)
        debts = [d + b - (1 if j == i else 0) for j, (d, b) in enumerate(zip(debts, bs))]
        if any(d <= -1 for d in debts):
            raise InvariantBreach("debt fell to -1 or below")
    return PickingSequence(tuple(pi))


def execute_reverse(instance: Instance, holder_of_round: Sequence[int]) -> Allocation:
    """``holder_of_round[r-1]`` picks the cheapest remaining chore when r remain."""
    m = instance.m
    remaining = set(range(m))
    bundles: list[set[int]] = [set() for _ in range(instance.n)]
    for r in range(m, 0, -1):
        i = holder_of_round[r - 1]
        c = instance.agents[i].valuation
        j = min(remaining, key=lambda e: (c[e], e))
        remaining.discard(j)
        bundles[i].add(j)
    return Allocation.from_lists(bundles)


def assign_rrr(instance: Instance) -> Allocation:
    if instance.kind != CHORES:
        raise InstanceError("assign_rrr needs a chores instance")
    seq = build_picking_sequence(instance.entitlements, instance.m)
    return execute_reverse(instance, seq.pi)


# --- best of both worlds -----------------------------------------------------


@dataclass(frozen=True)
class CouponMatching:
    """Fractional matching of subagents (rows) to coupons (columns).

    Coupons 1..m are main coupons, m+1..m+t auxiliary.  ``owner[s]`` is the
    agent that subagent ``s`` belongs to.
    """

    m: int
    t: int
    owner: tuple[int, ...]
    fractional: tuple[tuple[Fraction, ...], ...]

    def check(self) -> None:
        size = self.m + self.t
        if len(self.fractional) != size or any(len(row) != size for row in self.fractional):
            raise InvariantBreach("fractional matrix is not square")
        for row in self.fractional:
            if sum(row, Fraction(0)) != 1:
                raise InvariantBreach("a subagent's fractions do not sum to 1")
        for col in zip(*self.fractional):
            if sum(col, Fraction(0)) != 1:
                raise InvariantBreach("a coupon's fractions do not sum to 1")


def build_coupon_matching(responsibilities: Sequence, m: int) -> CouponMatching:
    bs = [to_rational(b) for b in responsibilities]
    ceil_bm = [math.ceil(b * m) for b in bs]
    t = sum(c - b * m for c, b in zip(ceil_bm, bs))
    if t.denominator != 1:
        raise InvariantBreach("auxiliary coupon count is not an integer")
    t = int(t)
    size = m + t
    rows: list[list[Fraction]] = []
    owner: list[int] = []
    for i, b in enumerate(bs):
        shares = [b] * m + [(ceil_bm[i] - b * m) / t for _ in range(t)] if t else [b] * m
        # hand the agent's coupon fractions to its subagents in coupon order
        sub = [Fraction(0)] * size
        room = Fraction(1)
        for c, amount in enumerate(shares):
            while amount > 0:
                take = min(amount, room)
                sub[c] += take
                amount -= take
                room -= take
                if room == 0:
                    rows.append(sub)
                    owner.append(i)
                    sub = [Fraction(0)] * size
                    room = Fraction(1)
        if room != 1:
            raise InvariantBreach(f"agent {i} holds a non-integral coupon total")
    cm = CouponMatching(m, t, tuple(owner), tuple(tuple(r) for r in rows))
    cm.check()
    return cm


@dataclass(frozen=True)
class WeightedMatching:
    weight: Fraction
    match: tuple[int, ...]  # match[row] = column


def _perfect_matching(support: list[list[int]], size: int) -> tuple[int, ...]:
    rows, cols = [], []
    for r, cs in enumerate(support):
        rows.extend([r] * len(cs))
        cols.extend(cs)
    graph = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(size, size))
    match = maximum_bipartite_matching(graph, perm_type="column")
    if (match < 0).any():
        raise InvariantBreach("support graph has no perfect matching (Hall's condition fails)")
    return tuple(int(c) for c in match)


def bvn_decompose(matrix: Sequence[Sequence]) -> list[WeightedMatching]:
    """Birkhoff-von Neumann decomposition of a doubly stochastic rational matrix."""
    rem = [[to_rational(x) for x in row] for row in matrix]
    size = len(rem)
    for row in rem:
        if len(row) != size or sum(row, Fraction(0)) != 1 or any(x < 0 for x in row):
            raise InvariantBreach("matrix is not doubly stochastic")
    for col in zip(*rem):
        if sum(col, Fraction(0)) != 1:
            raise InvariantBreach("matrix is not doubly stochastic")
    out: list[WeightedMatching] = []
    left = Fraction(1)
    while left > 0:
        support = [[c for c in range(size) if rem[r][c] > 0] for r in range(size)]
        match = _perfect_matching(support, size)
        w = min(rem[r][match[r]] for r in range(size))
        for r in range(size):
            rem[r][match[r]] -= w
        left -= w
        out.append(WeightedMatching(w, match))
    return out


@dataclass(frozen=True)
class Outcome:
    weight: Fraction
    allocation: Allocation
    coupons: tuple[frozenset[int], ...]  # main coupons (1-based) held per agent


@dataclass(frozen=True)
class RandomizedAssignment:
    outcomes: tuple[Outcome, ...]

    def total_weight(self) -> Fraction:
        return sum((o.weight for o in self.outcomes), Fraction(0))

    def expected_values(self, instance: Instance) -> list[Fraction]:
        ev = [Fraction(0)] * instance.n
        for o in self.outcomes:
            for i, x in enumerate(o.allocation.values(instance)):
                ev[i] += o.weight * x
        return ev

    def coupon_marginal(self, agent: int, coupon: int) -> Fraction:
        return sum((o.weight for o in self.outcomes if coupon in o.coupons[agent]), Fraction(0))

    def sample(self, seed: int) -> Outcome:
        """Draw one outcome: u = getrandbits(64) / 2^64 against cumulative weights."""
        u = Fraction(random.Random(seed).getrandbits(64), 1 << 64)
        acc = Fraction(0)
        for o in self.outcomes:
            acc += o.weight
            if u < acc:
                return o
        return self.outcomes[-1]


def assign_bobw(instance: Instance) -> RandomizedAssignment:
    if instance.kind != CHORES:
        raise InstanceError("assign_bobw needs a chores instance")
    m, n = instance.m, instance.n
    if m == 0:
        return RandomizedAssignment((Outcome(Fraction(1), Allocation.from_lists([[]] * n),
                                             tuple(frozenset() for _ in range(n))),))
    cm = build_coupon_matching(instance.entitlements, m)
    outcomes = []
    for wm in bvn_decompose(cm.fractional):
        held: list[set[int]] = [set() for _ in range(n)]
        holder = [0] * m
        for s, c in enumerate(wm.match):
            if c < m:
                held[cm.owner[s]].add(c + 1)
                holder[c] = cm.owner[s]
        outcomes.append(Outcome(wm.weight, execute_reverse(instance, holder),
                                tuple(frozenset(h) for h in held)))
    return RandomizedAssignment(tuple(outcomes))


def support_edge_count(cm: CouponMatching) -> int:
    return sum(1 for row in cm.fractional for x in row if x > 0)
