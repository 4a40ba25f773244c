import itertools
import json
from fractions import Fraction

import pytest
from hypothesis import given

from fairshare.core import (Allocation, Instance, InstanceError, compare_bundles, format_rational,
                            order_items, parse_instance, serialize_instance, to_rational)

from conftest import valuations


def test_parse_symmetric_instance():
    inst = parse_instance('{"kind":"goods","items":2,"agents":[{"b":"1/2","v":[1,1]},{"b":"1/2","v":[1,1]}]}')
    assert inst.n == 2 and inst.m == 2
    assert inst.entitlements == [Fraction(1, 2)] * 2


def test_entitlement_sum_message():
    doc = {"kind": "goods", "items": 1, "agents": [{"b": "2/3", "v": [1]}, {"b": "1/2", "v": [1]}]}
    with pytest.raises(InstanceError, match="entitlement sum 7/6 ≠ 1"):
        parse_instance(doc)


@pytest.mark.parametrize("doc", [
    {"kind": "goods", "items": 1, "agents": [{"b": 1, "v": ["-1"]}]},
    {"items": 1, "agents": [{"b": 1, "v": [1]}]},
    {"kind": "goods", "items": 1, "agents": [{"b": "1/x", "v": [1]}]},
    {"kind": "goods", "items": 2, "agents": [{"b": 1, "v": [1]}]},
])
def test_malformed_instances_rejected(doc):
    with pytest.raises(InstanceError):
        parse_instance(doc)


def test_decimal_strings_are_exact():
    assert to_rational("0.51") == Fraction(51, 100)
    assert to_rational("3/9") == Fraction(1, 3)
    assert format_rational(Fraction(6, 3)) == "2"
    assert format_rational(Fraction(-1, 2)) == "-1/2"


def test_round_trip():
    inst = Instance.build("chores", [[1, "1/2", 3], [0, 2, "5/7"]], ["1/3", "2/3"], names=["x", "y"])
    again = parse_instance(serialize_instance(inst))
    assert again == inst
    assert json.loads(serialize_instance(again))["agents"][1]["v"] == ["0", "2", "5/7"]


@pytest.mark.parametrize("values, order", [
    ([3, 5, 5, 1], [1, 2, 0, 3]),
    ([1, 1, 1], [0, 1, 2]),
    ([Fraction(1, 2), Fraction(1, 3)], [0, 1]),
])
def test_order_items(values, order):
    assert list(order_items(values).order) == order


def test_compare_bundles_examples():
    assert compare_bundles(order_items([1, 1]), {0}, {1}) > 0
    ov = order_items([2, 1, 1])
    assert compare_bundles(ov, {1, 2}, {1, 2}) == 0
    # same value 2; {0} carries the rank-1 perturbation
    assert compare_bundles(ov, {1, 2}, {0}) < 0


@given(valuations(max_size=4))
def test_compare_bundles_is_strict_total_order(v):
    ov = order_items(v)
    m = len(v)
    bundles = [frozenset(j for j in range(m) if mask >> j & 1) for mask in range(1 << m)]
    ranked = sorted(bundles, key=ov.perturbed)
    for s, t in zip(ranked, ranked[1:]):
        assert compare_bundles(ov, s, t) < 0
    for s, t in itertools.combinations(bundles, 2):
        if ov.base.value(s) > ov.base.value(t):
            assert compare_bundles(ov, s, t) > 0


def test_allocation_validation():
    Allocation.from_lists([[0, 2], [1]]).validate(3)
    with pytest.raises(InstanceError):
        Allocation.from_lists([[0, 1], [1]]).validate(3)
    with pytest.raises(InstanceError):
        Allocation.from_lists([[0], [1]]).validate(3)
