"""Exact max-min solver for the two-player bidding game.

P1 holds a fraction ``f`` of the total remaining budget, P2 the rest.  In
round ``r`` P1 bids a fraction ``q`` of the total.  P2 may take the round
(ties go to P2) whenever ``q <= 1 - f``; the winner takes the best remaining
item ``e_r``.  Paying ``q`` and renormalising the total gives

    P1 wins:  f' = (f - q) / (1 - q)
    P2 wins:  f' = f / (1 - q)

P1 can guarantee a target ``w`` from round ``r`` iff ``f > T_r(w)`` where,
with ``A = T_{r+1}(w - v(e_r))`` and ``B = T_{r+1}(w)``,

    T_r(w) = B / (1 + B - A).

A target of zero or less costs nothing (threshold 0); a target above the
value of every remaining item is out of reach (threshold 1).  The recursion is
exact and only ever visits targets equal to subset sums of the remaining
suffix, so its state space is at most 2^(m+1).

Values may be plain Fractions or :class:`PerturbedValue` keys.  The latter
realise the tie-free bundle order; the former let instances with many
identical items be solved by counting rather than by bundle enumeration.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Sequence

from ..core import ZERO, OrderedValuation, ResourceCapExceeded, order_items

DEFAULT_STATE_CAP = 1 << 20
ONE = Fraction(1)


@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant map on [0, 1].

    ``values[j]`` applies on ``(breakpoints[j], breakpoints[j+1]]``; at or
    below the first breakpoint the function equals ``values[0]``.
    """

    breakpoints: tuple[Fraction, ...]
    values: tuple[Any, ...]

    def __call__(self, f: Fraction) -> Any:
        idx = bisect.bisect_left(self.breakpoints, f)
        return self.values[max(idx - 1, 0)]

    def __len__(self) -> int:
        return len(self.breakpoints)


@dataclass(frozen=True)
class ThresholdVector:
    ranks: tuple[frozenset[int], ...]
    T: tuple[Fraction, ...]

    def __len__(self) -> int:
        return len(self.T)

    def threshold_of(self, bundle) -> Fraction:
        return self.T[self.ranks.index(frozenset(bundle))]

    def check(self) -> list[str]:
        """Names of the structural properties this vector violates (empty if none)."""
        T, n = self.T, len(self.T)
        m = n.bit_length() - 1
        bad = []
        if T[0] != 0:
            bad.append("T(1) = 0")
        if any(T[j + 1] <= T[j] for j in range(n - 1)):
            bad.append("strict monotonicity")
        if any(T[j - 1] + T[n - j + 1] != 1 for j in range(2, n + 1)):
            bad.append("symmetry")
        if m >= 1:
            if T[1] != Fraction(1, m + 1):
                bad.append("T(2) = 1/(m+1)")
            if T[n - 1] != Fraction(m, m + 1):
                bad.append("T(2^m) = m/(m+1)")
            if T[n // 2] != Fraction(1, 2):
                bad.append("T(2^(m-1)+1) = 1/2")
        if any(not isinstance(t, Fraction) for t in T):
            bad.append("rationality")
        return bad


class TwoPlayerSolver:
    """Thresholds, values and optimal bids for P1 on a fixed item sequence.

    ``values`` must be sorted non-increasing; round ``r`` (0-based) sells
    ``values[r]``.
    """

    def __init__(self, values: Sequence, zero=None, cap: int = DEFAULT_STATE_CAP):
        self.values = tuple(values)
        self.m = len(self.values)
        self.zero = zero if zero is not None else (ZERO if self.values and not isinstance(self.values[0], Fraction) else Fraction(0))
        self.cap = cap
        self._memo: dict[tuple[int, Any], Fraction] = {}
        self._sums: list[list] | None = None

    @property
    def sums(self) -> list[list]:
        """sums[r]: sorted distinct subset sums of values[r:]."""
        if self._sums is None:
            out: list[list] = [[]] * (self.m + 1)
            cur = {self.zero}
            out[self.m] = [self.zero]
            total = 1
            for r in range(self.m - 1, -1, -1):
                x = self.values[r]
                cur = cur | {s + x for s in cur}
                total += len(cur)
                if total > self.cap:
                    raise ResourceCapExceeded(f"two-player solver exceeds {self.cap} states")
                out[r] = sorted(cur)
            self._sums = out
        return self._sums

    def _normalize(self, r: int, w):
        """Smallest subset sum of the suffix that is >= w, or None if none is."""
        sums = self.sums[r]
        idx = bisect.bisect_left(sums, w)
        return sums[idx] if idx < len(sums) else None

    def threshold(self, r: int, w) -> Fraction:
        if w <= self.zero:
            return Fraction(0)
        s = self._normalize(r, w)
        if s is None:
            return ONE
        key = (r, s)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        # Iterative deepening keeps the Python stack shallow for long suffixes.
        stack = [key]
        while stack:
            rr, ss = stack[-1]
            if (rr, ss) in self._memo:
                stack.pop()
                continue
            pending = []
            parts = []
            for target in (ss - self.values[rr], ss):
                if target <= self.zero:
                    parts.append(Fraction(0))
                    continue
                t = self._normalize(rr + 1, target)
                if t is None:
                    parts.append(ONE)
                elif (rr + 1, t) in self._memo:
                    parts.append(self._memo[(rr + 1, t)])
                else:
                    pending.append((rr + 1, t))
            if pending:
                stack.extend(pending)
                continue
            a, b = parts
            self._memo[(rr, ss)] = ONE if a == ONE else b / (1 + b - a)
            stack.pop()
        return self._memo[key]

    def value(self, r: int, f: Fraction):
        """V_r(f): the best target P1 can guarantee from round r with fraction f."""
        sums = self.sums[r]
        lo, hi = 0, len(sums) - 1
        # thresholds increase with the target, so binary search for the last T < f
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self.threshold(r, sums[mid]) < f:
                lo = mid
            else:
                hi = mid - 1
        return sums[lo]

    def feasible_interval(self, r: int, f: Fraction, w) -> tuple[Fraction, Fraction] | None:
        """Open interval of bid fractions q guaranteeing w, or None if f <= T_r(w).

        ``(0, 0)`` signals that a zero bid already works.
        """
        if w <= self.zero:
            return (Fraction(0), Fraction(0))
        if f >= 1:
            # P2 has nothing left; any positive bid wins every remaining round.
            return (Fraction(0), Fraction(1)) if self.threshold(r, w) < 1 else None
        if r >= self.m:
            return None
        a = self.threshold(r + 1, w - self.values[r])
        b = self.threshold(r + 1, w)
        if f > b:
            return (Fraction(0), Fraction(0))
        if a == ONE or f <= b / (1 + b - a):
            return None
        return (1 - f / b, (f - a) / (1 - a))

    def bid(self, r: int, f: Fraction, w=None) -> Fraction:
        """Bid fraction for target w (default V_r(f)).

        The feasible set is an open interval whose infimum is not attained, so
        the midpoint is used; zero whenever zero already works.
        """
        if w is None:
            w = self.value(r, f)
        iv = self.feasible_interval(r, f, w)
        if iv is None:
            raise ValueError("target not guaranteed at this budget fraction")
        lo, hi = iv
        return (lo + hi) / 2

    def value_function(self, r: int) -> StepFunction:
        pts: list[tuple[Fraction, Any]] = []
        for s in self.sums[r]:
            t = self.threshold(r, s)
            if pts and pts[-1][0] == t:
                pts[-1] = (t, s)
            else:
                pts.append((t, s))
        return StepFunction(tuple(t for t, _ in pts), tuple(s for _, s in pts))


@dataclass
class TwoPlayerSolution:
    valuation: OrderedValuation
    solver: TwoPlayerSolver

    @cached_property
    def thresholds(self) -> ThresholdVector:
        m = self.valuation.m
        by_value = {}
        for mask in range(1 << m):
            bundle = frozenset(self.valuation.order[r] for r in range(m) if mask >> r & 1)
            by_value[self.valuation.perturbed(bundle)] = bundle
        sums = self.solver.sums[0]
        return ThresholdVector(tuple(by_value[s] for s in sums),
                               tuple(self.solver.threshold(0, s) for s in sums))

    @cached_property
    def value_functions(self) -> list[StepFunction]:
        return [self.solver.value_function(r) for r in range(self.valuation.m + 1)]

    def value(self, f: Fraction) -> Fraction:
        """V_1(f) as a plain value (perturbation dropped)."""
        return self.solver.value(0, f).value


def perturbed_sequence(v: OrderedValuation, items=None) -> list:
    items = v.order if items is None else sorted(items, key=v.rank.__getitem__)
    return [v.item_key(j) for j in items]


def solve_two_player(v, cap_m: int = 16) -> TwoPlayerSolution:
    """Solve the two-player game for P1's valuation ``v`` on all of its items."""
    ov = v if isinstance(v, OrderedValuation) else order_items(v)
    if ov.m > cap_m:
        raise ResourceCapExceeded(f"m = {ov.m} exceeds solver cap {cap_m}")
    return TwoPlayerSolution(ov, TwoPlayerSolver(perturbed_sequence(ov)))


def solve_counts(values: Sequence[Fraction]) -> TwoPlayerSolver:
    """Solver on raw values, for instances with many identical items."""
    vals = sorted((Fraction(x) for x in values), reverse=True)
    return TwoPlayerSolver(vals, zero=Fraction(0))
