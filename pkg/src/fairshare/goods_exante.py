"""Ex-ante lotteries for goods, and the goods instance where ex-ante and ex-post
guarantees cannot be combined.

The lottery hands the whole item set to a single agent.  Agent i is chosen
with probability b̂_i / γ̃, where γ̃ = s_N is a rational stand-in for the
Sylvester constant (s_N increases towards it).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .chores import InvariantBreach, Outcome, RandomizedAssignment
from .core import GOODS, Allocation, Instance, InstanceError, to_rational
from .shares import mms_hat, proportional_share, ps_hat, sylvester, sylvester_tight_entitlements, unit_upper_bound

DEFAULT_N = 8


def grand_bundle_probabilities(instance: Instance, n_cap: int = DEFAULT_N) -> list[Fraction]:
    """Probability that each agent receives every item; leftover mass goes to agent 0."""
    if instance.kind != GOODS:
        raise InstanceError("the grand-bundle lottery is for goods")
    n = instance.n
    if n > n_cap:
        raise InstanceError(f"{n} agents exceed the Sylvester table size {n_cap}; raise n_cap")
    gamma = sylvester(n_cap).gamma_lower
    hats = [unit_upper_bound(b) for b in instance.entitlements]
    s_n = sylvester(n).s[-1]
    total = sum(hats, Fraction(0))
    if n > 1 and total > s_n:
        raise InvariantBreach(f"unit upper bounds sum to {total} > s_{n} = {s_n}")
    if s_n > gamma:
        raise InvariantBreach("s_n exceeds the certified constant")
    probs = [h / gamma for h in hats]
    if sum(probs, Fraction(0)) > 1:
        raise InvariantBreach("lottery probabilities exceed 1")
    probs[0] += 1 - sum(probs, Fraction(0))
    return probs


def exante_grand_bundle_lottery(instance: Instance, n_cap: int = DEFAULT_N) -> RandomizedAssignment:
    probs = grand_bundle_probabilities(instance, n_cap)
    n = instance.n
    gamma = sylvester(n_cap).gamma_lower
    everything = frozenset(range(instance.m))
    outcomes = []
    for i, p in enumerate(probs):
        if p == 0:
            continue
        bundles = [everything if j == i else frozenset() for j in range(n)]
        outcomes.append(Outcome(p, Allocation(tuple(bundles)), tuple(frozenset() for _ in range(n))))
    lottery = RandomizedAssignment(tuple(outcomes))
    ev = lottery.expected_values(instance)
    for i, a in enumerate(instance.agents):
        if ev[i] < ps_hat(a.valuation, a.entitlement) / gamma:
            raise InvariantBreach(f"agent {i} expects {ev[i]}, below PS-hat / {gamma}")
    return lottery


@dataclass(frozen=True)
class TightnessCertificate:
    n: int
    eps: Fraction
    s_n: Fraction
    demanded: Fraction   # sum over agents of (1/s_n + eps) * ps_hat_i
    available: Fraction  # v(M)

    @property
    def infeasible(self) -> bool:
        return self.demanded > self.available


def verify_exante_tightness(n: int, eps=Fraction(1, 100)) -> TightnessCertificate:
    """Identical agents with Sylvester-tight entitlements: (1/s_n + eps)·PS-hat demands more than v(M).

    Every allocation hands out at most v(M) in total, so no lottery meets the
    demanded expectations once ``demanded > available``.
    """
    if not 1 <= n <= 5:
        raise ValueError("n must be between 1 and 5")
    eps = to_rational(eps)
    bs = [Fraction(1)] if n == 1 else sylvester_tight_entitlements(n)
    v = [Fraction(1)]
    inst = Instance.build(GOODS, [v] * n, bs)
    s_n = sylvester(n).s[-1]
    demanded = sum(((1 / s_n + eps) * ps_hat(a.valuation, a.entitlement) for a in inst.agents), Fraction(0))
    return TightnessCertificate(n, eps, s_n, demanded, inst.agents[0].valuation.total)


@dataclass(frozen=True)
class BoBWCertificate:
    favoured: tuple[int, ...]        # agents whose MMS-hat is 1
    allocations_checked: int
    starved_everywhere: bool         # each allocation serving all favoured agents starves someone else
    positive_ps: bool

    @property
    def holds(self) -> bool:
        return self.starved_everywhere and self.positive_ps


def bobw_goods_instance(n: int, m: int) -> tuple[Instance, tuple[int, ...]]:
    if n < 2 or m < 1:
        raise ValueError("need n >= 2 and m >= 1")
    p = min(m, n - 1)                        # unit-value items
    values = [Fraction(1)] * p + [Fraction(0)] * (m - p)
    high = (Fraction(1, p + 1) + Fraction(1, p)) / 2
    low = (1 - p * high) / (n - p)
    bs = [high] * p + [low] * (n - p)
    return Instance.build(GOODS, [values] * n, bs), tuple(range(p))


def bobw_goods_impossibility_fixture(n: int, m: int) -> tuple[Instance, BoBWCertificate]:
    from .oracles import enumerate_allocations
    inst, favoured = bobw_goods_instance(n, m)
    for i in favoured:
        a = inst.agents[i]
        if mms_hat(a.valuation, a.entitlement) != 1:
            raise InvariantBreach("favoured agent's MMS-hat is not 1")
    count, ok = 0, True
    for alloc in enumerate_allocations(inst):
        count += 1
        vals = alloc.values(inst)
        if all(vals[i] > 0 for i in favoured) and all(vals[j] > 0 for j in range(n) if j not in favoured):
            ok = False
            break
    positive = all(proportional_share(a.valuation, a.entitlement) > 0 for a in inst.agents)
    return inst, BoBWCertificate(favoured, count, ok, positive)
