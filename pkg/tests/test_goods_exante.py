import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fairshare.core import Instance, InstanceError
from fairshare.goods_exante import (DEFAULT_N, bobw_goods_impossibility_fixture, bobw_goods_instance,
                                    exante_grand_bundle_lottery, grand_bundle_probabilities,
                                    verify_exante_tightness)
from fairshare.oracles import enumerate_allocations
from fairshare.shares import mms_hat, ps_hat, sylvester, sylvester_tight_entitlements

from conftest import random_entitlements

GAMMA = sylvester(DEFAULT_N).gamma_lower


def test_single_agent_lottery():
    inst = Instance.build("goods", [[3, 4]], [1])
    assert grand_bundle_probabilities(inst) == [1]
    assert 1 / GAMMA <= 1


def test_two_halves():
    inst = Instance.build("goods", [[1, 1]] * 2, [Fraction(1, 2)] * 2)
    probs = grand_bundle_probabilities(inst)
    assert probs[1] == 1 / (2 * GAMMA)
    assert sum(probs) == 1 and probs[0] >= probs[1]


def test_sylvester_tight_three():
    bs = sylvester_tight_entitlements(3)
    inst = Instance.build("goods", [[1]] * 3, bs)
    hats = [Fraction(1, math.floor(1 / b)) for b in bs]
    assert sum(hats) == Fraction(5, 3)
    probs = grand_bundle_probabilities(inst)
    assert probs[1:] == [h / GAMMA for h in hats[1:]]
    assert Fraction(5, 3) / GAMMA <= 1


def test_lottery_rejects_chores_and_large_n():
    with pytest.raises(InstanceError):
        grand_bundle_probabilities(Instance.build("chores", [[1]], [1]))
    inst = Instance.build("goods", [[1]] * 3, [Fraction(1, 3)] * 3)
    with pytest.raises(InstanceError):
        grand_bundle_probabilities(inst, n_cap=2)


@given(st.integers(0, 10**6), st.integers(1, 5))
def test_lottery_meets_scaled_ps_hat(seed, n):
    rng = random.Random(seed)
    m = rng.randint(0, 4)
    inst = Instance.build("goods", [[rng.randint(0, 9) for _ in range(m)] for _ in range(n)],
                          random_entitlements(rng, n))
    lot = exante_grand_bundle_lottery(inst)
    assert lot.total_weight() == 1
    for a, ev in zip(inst.agents, lot.expected_values(inst)):
        assert ev >= ps_hat(a.valuation, a.entitlement) / GAMMA


@pytest.mark.parametrize("n, s_n", [(2, Fraction(3, 2)), (3, Fraction(5, 3))])
def test_tightness(n, s_n):
    cert = verify_exante_tightness(n)
    assert cert.s_n == s_n
    assert cert.infeasible
    assert cert.demanded == (1 / s_n + cert.eps) * s_n


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_tightness_boundary(n):
    cert = verify_exante_tightness(n, eps=0)
    assert cert.demanded <= cert.available
    assert not cert.infeasible


def test_tightness_rejects_large_n():
    with pytest.raises(ValueError):
        verify_exante_tightness(6)


@pytest.mark.parametrize("n, m", [(2, 1), (3, 2), (3, 5), (4, 3)])
def test_bobw_goods_fixture(n, m):
    inst, cert = bobw_goods_impossibility_fixture(n, m)
    assert inst.m == m
    assert cert.holds
    assert cert.allocations_checked == n**m
    for i in cert.favoured:
        a = inst.agents[i]
        assert mms_hat(a.valuation, a.entitlement) == 1


def test_bobw_two_agents_one_item():
    inst, favoured = bobw_goods_instance(2, 1)
    assert favoured == (0,)
    for alloc in enumerate_allocations(inst):
        vals = alloc.values(inst)
        assert vals[0] == 0 or vals[1] == 0


def test_bobw_pads_zero_items():
    inst, favoured = bobw_goods_instance(3, 6)
    v = list(inst.agents[0].valuation)
    assert v.count(0) == 6 - 3 + 1 and len(favoured) == 2
