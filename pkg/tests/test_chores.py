import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fairshare.chores import (InvariantBreach, assign_bobw, assign_rrr, build_coupon_matching,
                              build_picking_sequence, bvn_decompose, support_edge_count)
from fairshare.core import Instance, InstanceError
from fairshare.shares import proportional_share, rrr_share

from conftest import random_entitlements

H, T3 = Fraction(1, 2), Fraction(1, 3)


def rrr_direct(c, b):
    k = 1
    while not Fraction(1, k + 1) <= b:
        k += 1
    costs = sorted(c, reverse=True)
    return sum(x for pos, x in enumerate(costs, start=1) if pos % k == 1 % k)


def spreads(pi, i, b):
    k = math.floor(1 / b)
    picks = [j for j, a in enumerate(pi, start=1) if a == i]
    return all(sum(1 for j in picks if j <= r) <= math.ceil(r / k) for r in range(1, len(pi) + 1))


def test_direct_rrr_matches_examples():
    assert rrr_direct([5, 4, 3, 2, 1], T3) == 9 == rrr_share([5, 4, 3, 2, 1], T3)
    assert rrr_direct([1, 1, 1, 1], H) == 4 == rrr_share([1, 1, 1, 1], H)


def test_single_agent_sequence():
    assert build_picking_sequence([1], 5).pi == (0,) * 5


def test_halves_alternate():
    pi = build_picking_sequence([H, H], 4).pi
    assert pi == (0, 1, 0, 1)
    assert all(spreads(pi, i, H) for i in range(2))


def test_two_thirds_one_third():
    seq = build_picking_sequence([Fraction(2, 3), T3], 6)
    assert seq.pi.count(1) == 2
    assert spreads(seq.pi, 1, T3)
    assert seq.spreading_ok([Fraction(2, 3), T3])


def test_sequence_rejects_bad_sum():
    with pytest.raises(InstanceError):
        build_picking_sequence([H, T3], 3)


def test_custom_selection_must_pick_debtor():
    with pytest.raises(InvariantBreach):
        build_picking_sequence([H, H], 3, select=lambda debts: 0)


@given(st.integers(0, 10**6), st.integers(1, 5), st.integers(0, 12))
def test_sequence_spreads(seed, n, m):
    rng = random.Random(seed)
    bs = random_entitlements(rng, n)
    seq = build_picking_sequence(bs, m)
    assert len(seq.pi) == m
    assert seq.spreading_ok(bs)
    assert all(spreads(seq.pi, i, b) for i, b in enumerate(bs))


def test_lopsided_unit_chores():
    t = 3
    inst = Instance.build("chores", [[1] * (2 * t)] * 2, [Fraction(2 * t - 1, 2 * t), Fraction(1, 2 * t)])
    costs = assign_rrr(inst).values(inst)
    assert costs[0] <= rrr_direct([1] * 6, Fraction(5, 6)) and costs[1] <= rrr_direct([1] * 6, Fraction(1, 6))
    assert sum(costs) == 6


def test_single_agent_takes_all_chores():
    inst = Instance.build("chores", [[4, 1, 2]], [1])
    assert assign_rrr(inst).values(inst) == [7]


@given(st.integers(0, 10**6))
def test_rrr_assignment_bound(seed):
    rng = random.Random(seed)
    n, m = rng.randint(1, 4), rng.randint(0, 8)
    costs = [[rng.randint(0, 9) for _ in range(m)] for _ in range(n)]
    inst = Instance.build("chores", costs, random_entitlements(rng, n))
    alloc = assign_rrr(inst)
    alloc.validate(m)
    for i, (a, x) in enumerate(zip(inst.agents, alloc.values(inst))):
        assert x <= rrr_direct(list(a.valuation), a.entitlement)


def test_assign_rrr_needs_chores():
    with pytest.raises(InstanceError):
        assign_rrr(Instance.build("goods", [[1]], [1]))


# --- Birkhoff-von Neumann ----------------------------------------------------


def reconstruct(parts, size):
    out = [[Fraction(0)] * size for _ in range(size)]
    for wm in parts:
        for r, c in enumerate(wm.match):
            out[r][c] += wm.weight
    return out


@pytest.mark.parametrize("matrix, count", [
    ([[H, H], [H, H]], 2),
    ([[1, 0], [0, 1]], 1),
    ([[T3] * 3] * 3, 3),
])
def test_bvn_examples(matrix, count):
    parts = bvn_decompose(matrix)
    assert len(parts) == count
    assert sum(p.weight for p in parts) == 1
    assert reconstruct(parts, len(matrix)) == [[Fraction(x) for x in row] for row in matrix]


def test_bvn_rejects_non_stochastic():
    with pytest.raises(InvariantBreach):
        bvn_decompose([[1, 0], [1, 0]])


@given(st.integers(0, 10**6))
def test_bvn_random_mixture(seed):
    rng = random.Random(seed)
    size = rng.randint(1, 5)
    perms = [rng.sample(range(size), size) for _ in range(rng.randint(1, 4))]
    ws = random_entitlements(rng, len(perms))
    matrix = [[Fraction(0)] * size for _ in range(size)]
    for w, p in zip(ws, perms):
        for r, c in enumerate(p):
            matrix[r][c] += w
    parts = bvn_decompose(matrix)
    assert reconstruct(parts, size) == matrix
    assert len(parts) <= sum(1 for row in matrix for x in row if x > 0)


# --- best of both worlds -----------------------------------------------------


def check_bobw(inst):
    ra = assign_bobw(inst)
    assert ra.total_weight() == 1
    for o in ra.outcomes:
        o.allocation.validate(inst.m)
        for a, x in zip(inst.agents, o.allocation.values(inst)):
            assert x <= rrr_direct(list(a.valuation), a.entitlement)
    for a, e in zip(inst.agents, ra.expected_values(inst)):
        assert e <= proportional_share(a.valuation, a.entitlement)
    for i, b in enumerate(inst.entitlements):
        for r in range(1, inst.m + 1):
            assert ra.coupon_marginal(i, r) == b
    return ra


@pytest.mark.parametrize("bs, m, t", [
    ((H, H), 2, 0),
    ((Fraction(2, 3), T3), 3, 0),
    ((Fraction(3, 5), Fraction(2, 5)), 3, 1),
])
def test_bobw_examples(bs, m, t):
    cm = build_coupon_matching(bs, m)
    assert cm.t == t
    assert support_edge_count(cm) >= m + t
    rng = random.Random(m)
    inst = Instance.build("chores", [[rng.randint(1, 9) for _ in range(m)] for _ in bs], list(bs))
    check_bobw(inst)


@given(st.integers(0, 10**6))
def test_bobw_random(seed):
    rng = random.Random(seed)
    n, m = rng.randint(1, 4), rng.randint(0, 6)
    inst = Instance.build("chores", [[rng.randint(0, 9) for _ in range(m)] for _ in range(n)],
                          random_entitlements(rng, n))
    check_bobw(inst)


def test_sample_is_deterministic():
    inst = Instance.build("chores", [[3, 2, 1], [1, 2, 3]], [Fraction(3, 5), Fraction(2, 5)])
    ra = assign_bobw(inst)
    assert ra.sample(7) == ra.sample(7)
    assert all(ra.sample(s) in ra.outcomes for s in range(20))
