"""Acceptance criteria 1 to 10.  Each test prints one PASS/FAIL line.

Run ``pytest tests/test_acceptance.py`` (the lines appear in the terminal
output), or ``python3 tests/test_acceptance.py`` for the summary alone.
"""
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

from fairshare.bidding import (approx_optimal_strategy, exhaustive_adversary_value, optimal_strategy,
                               safe_strategy, solve_two_player)
from fairshare.chores import assign_bobw, assign_rrr, build_coupon_matching, bvn_decompose, support_edge_count
from fairshare.core import Instance
from fairshare.goods_exante import grand_bundle_probabilities, verify_exante_tightness
from fairshare.oracles import check_feasibility, fixture, sylvester_vector_oracle
from fairshare.shares import (mms_hat, proportional_share, rrr_share, sylvester, sylvester_tight_entitlements,
                              tps, unit_lower_bound, unit_upper_bound)

sys.path.insert(0, str(Path(__file__).parent))
from conftest import random_entitlements  # noqa: E402

HALF = Fraction(1, 2)


def set_partitions(items, k):
    """Partitions of ``items`` into at most k nonempty blocks."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for p in set_partitions(rest, k):
        for i in range(len(p)):
            yield p[:i] + [[first] + p[i]] + p[i + 1:]
        if len(p) < k:
            yield [[first]] + p


def brute_mms_goods(v, k):
    if len(v) < k:
        return Fraction(0)
    best = Fraction(0)
    for p in set_partitions(list(range(len(v))), k):
        if len(p) == k:
            best = max(best, min(sum((v[j] for j in blk), Fraction(0)) for blk in p))
    return best


def brute_mms_chores(c, k):
    if not c:
        return Fraction(0)
    return min(max(sum((c[j] for j in blk), Fraction(0)) for blk in p)
               for p in set_partitions(list(range(len(c))), k))


# --- criteria ------------------------------------------------------------------


def criterion_1():
    rng = random.Random(1)
    for _ in range(50):
        m = rng.randint(2, 6)
        v = [rng.randint(1, 20) for _ in range(m)]
        T = solve_two_player(v).thresholds.T        # T[j - 1] is T(j)
        N = 1 << m
        assert T[0] == 0
        assert all(a < b for a, b in zip(T, T[1:]))
        assert all(T[j - 1] + T[N - j + 1] == 1 for j in range(2, N + 1))
        assert T[1] == Fraction(1, m + 1) and T[N - 1] == Fraction(m, m + 1)
        assert T[N // 2] == HALF
    return "50 threshold vectors, m in 2..6"


def criterion_2():
    rng = random.Random(2)
    for _ in range(30):
        v = [Fraction(rng.randint(1, 15)) for _ in range(rng.randint(1, 8))]
        got = exhaustive_adversary_value(v, HALF, optimal_strategy(v, HALF)).value
        assert got == brute_mms_goods(v, 2), (v, got)
        for b in (Fraction(51, 100), Fraction(3, 5), Fraction(9, 10)):
            assert exhaustive_adversary_value(v, b, optimal_strategy(v, b)).value >= sum(v) / 2
    return "30 valuations, m <= 8"


def criterion_3():
    rng = random.Random(3)
    grid = [Fraction(3, 10), Fraction(1, 3), Fraction(2, 5), HALF, Fraction(3, 5), Fraction(7, 10)]
    runs = 0
    for b in grid:
        for _ in range(200):
            v = [Fraction(rng.randint(1, 40), rng.randint(1, 8)) for _ in range(rng.randint(1, 5))]
            target = tps(v, unit_upper_bound(b)) / 2
            got = exhaustive_adversary_value(v, b, safe_strategy(v, b)).value
            assert got >= target, (v, b, got, target)
            runs += 1
    return f"{runs} games, zero failures"


def criterion_4():
    for n in (3, 4):
        inst = fixture("goods-halfmms-lb", n=n).instance
        res = check_feasibility(inst, lambda v, b: (HALF + Fraction(1, 10)) * mms_hat(v, b))
        assert not res.feasible and res.checked == n ** inst.m
    return "n = 3 and n = 4 refuted by full enumeration"


def criterion_5():
    rng = random.Random(5)
    for _ in range(1000):
        n, m = rng.randint(1, 4), rng.randint(0, 8)
        inst = Instance.build("chores", [[rng.randint(0, 12) for _ in range(m)] for _ in range(n)],
                              random_entitlements(rng, n))
        costs = assign_rrr(inst).values(inst)
        for a, x in zip(inst.agents, costs):
            c, b = list(a.valuation), a.entitlement
            share = rrr_share(c, b)
            assert x <= share
            assert share <= 2 * brute_mms_chores(c, unit_lower_bound(b).denominator)
    return "1000 instances, n <= 4, m <= 8"


def criterion_6():
    facts = {}
    for name in ("chores-2domination-lb", "chores-3half-lb", "chores-bobw-lb"):
        cert = fixture(name).certify()
        assert cert.holds, (name, cert.facts)
        facts[name] = cert.facts
    assert facts["chores-2domination-lb"]["min_max_ratio"] >= 2 - Fraction(1, 3)
    assert facts["chores-3half-lb"]["min_max_ratio"] >= Fraction(3, 2)
    return "three chores lower-bound fixtures"


def criterion_7():
    rng = random.Random(7)
    for _ in range(300):
        n, m = rng.randint(1, 4), rng.randint(1, 7)
        inst = Instance.build("chores", [[rng.randint(0, 12) for _ in range(m)] for _ in range(n)],
                              random_entitlements(rng, n))
        cm = build_coupon_matching(inst.entitlements, m)
        assert len(bvn_decompose(cm.fractional)) <= support_edge_count(cm)
        ra = assign_bobw(inst)
        assert ra.total_weight() == 1
        for i, b in enumerate(inst.entitlements):
            assert all(ra.coupon_marginal(i, r) == b for r in range(1, m + 1))
        for a, e in zip(inst.agents, ra.expected_values(inst)):
            assert e <= proportional_share(a.valuation, a.entitlement)
        for o in ra.outcomes:
            for a, x in zip(inst.agents, o.allocation.values(inst)):
                assert x <= rrr_share(a.valuation, a.entitlement)
    return "300 randomized assignments"


def criterion_8():
    for n in range(1, 5):
        checked, bad = sylvester_vector_oracle(n, 50)
        assert bad is None and checked > 0
    assert sylvester(4).s == (1, Fraction(3, 2), Fraction(5, 3), Fraction(71, 42))
    for n in range(1, 6):
        bs = [Fraction(1)] if n == 1 else sylvester_tight_entitlements(n)
        inst = Instance.build("goods", [[1]] * n, bs)
        gamma = sylvester(8).gamma_lower
        assert sum(unit_upper_bound(b) for b in bs) / gamma <= 1
        assert sum(grand_bundle_probabilities(inst)) == 1
        cert = verify_exante_tightness(n)
        assert n == 1 or cert.infeasible
    return "vector oracle n <= 4, K <= 50; lottery and tightness n <= 5"


def criterion_9():
    for name in ("nonmonotone", "nonmonotone-half", "myopic-pair"):
        cert = fixture(name).certify()
        assert cert.holds, (name, cert.facts)
    return "non-monotone and myopic fixtures"


def criterion_10():
    rng = random.Random(10)
    eps = Fraction(1, 10)
    cases = [([Fraction(x, 35) for x in (30, 1, 1, 1, 1, 1)], Fraction(51, 100))]
    for _ in range(40):
        v = [Fraction(rng.randint(1, 20)) for _ in range(rng.randint(1, 6))]
        cases.append((v, rng.choice([Fraction(1, 4), Fraction(2, 5), HALF, Fraction(3, 5), Fraction(4, 5)])))
    for v, b in cases:
        exact = solve_two_player(v).value(b)
        got = exhaustive_adversary_value(v, b, approx_optimal_strategy(v, b, eps)).value
        assert got >= exact - eps * sum(v), (v, b, got, exact)
    return f"{len(cases)} instances, m <= 6"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def evaluate(number: int) -> tuple[bool, str]:
    start = time.perf_counter()
    try:
        detail = CRITERIA[number - 1]()
        ok = True
    except AssertionError as exc:
        detail, ok = f"assertion failed: {exc}", False
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail} ({time.perf_counter() - start:.1f}s)"
    return ok, line


@pytest.mark.parametrize("number", range(1, 11))
def test_criterion(number, capsys):
    ok, line = evaluate(number)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(k) for k in range(1, 11)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
