"""Exact-rational instance model shared by every other module.

Item ids are 0-based. Bundles are passed around as ``frozenset`` of item ids
at API boundaries and as integer bitmasks inside the enumerators.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

Rational = Fraction

GOODS = "goods"
CHORES = "chores"


class InstanceError(ValueError):
    """Raised for malformed or inconsistent instance data."""


class ResourceCapExceeded(RuntimeError):
    """Raised when an exact enumeration would exceed its configured cap."""


def to_rational(x) -> Fraction:
    """Parse an int, a ``"p/q"`` string or a decimal string exactly.

    Floats are refused: they cannot be converted without picking a rounding.
    """
    if isinstance(x, bool):
        raise InstanceError(f"malformed rational {x!r}")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        raise InstanceError(f"floating point value {x!r} not accepted; quote it as a string")
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InstanceError(f"malformed rational {x!r}") from exc
    raise InstanceError(f"malformed rational {x!r}")


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def mask_of(items: Iterable[int]) -> int:
    mask = 0
    for j in items:
        mask |= 1 << j
    return mask


def items_of(mask: int) -> frozenset[int]:
    out = []
    j = 0
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return frozenset(out)


@dataclass(frozen=True)
class AdditiveValuation:
    """Item values (goods) or item costs (chores), all non-negative."""

    values: tuple[Fraction, ...]

    def __post_init__(self):
        vals = tuple(to_rational(x) for x in self.values)
        for x in vals:
            if x < 0:
                raise InstanceError(f"negative item value {x}")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, j: int) -> Fraction:
        return self.values[j]

    def __iter__(self):
        return iter(self.values)

    @cached_property
    def total(self) -> Fraction:
        return sum(self.values, Fraction(0))

    def value(self, bundle: Iterable[int]) -> Fraction:
        return sum((self.values[j] for j in bundle), Fraction(0))

    def scaled(self, alpha) -> "AdditiveValuation":
        alpha = to_rational(alpha)
        return AdditiveValuation(tuple(alpha * x for x in self.values))


def as_valuation(v) -> AdditiveValuation:
    if isinstance(v, AdditiveValuation):
        return v
    return AdditiveValuation(tuple(v))


@dataclass(frozen=True, order=True)
class PerturbedValue:
    """A bundle value under the associated tie-free valuation.

    Compared lexicographically: exact value first, then ``key``, where item of
    rank r (1-based) contributes ``2**(m - r)``.  This is the order induced by
    adding ``2**-r`` to the rank-r item, but stays valid for any rational
    values.  Differences may carry a negative key, which is fine for ordering.
    """

    value: Fraction
    key: int

    def __add__(self, other: "PerturbedValue") -> "PerturbedValue":
        return PerturbedValue(self.value + other.value, self.key + other.key)

    def __sub__(self, other: "PerturbedValue") -> "PerturbedValue":
        return PerturbedValue(self.value - other.value, self.key - other.key)


ZERO = PerturbedValue(Fraction(0), 0)


@dataclass(frozen=True)
class OrderedValuation:
    base: AdditiveValuation
    order: tuple[int, ...]

    @cached_property
    def rank(self) -> dict[int, int]:
        """Item id -> 1-based rank."""
        return {item: r + 1 for r, item in enumerate(self.order)}

    @property
    def m(self) -> int:
        return len(self.order)

    def item_key(self, item: int) -> PerturbedValue:
        return PerturbedValue(self.base[item], 1 << (self.m - self.rank[item]))

    def perturbed(self, bundle: Iterable[int]) -> PerturbedValue:
        total = ZERO
        for j in bundle:
            total = total + self.item_key(j)
        return total


def order_items(v) -> OrderedValuation:
    """Sort items by non-increasing value, ascending id on ties."""
    v = as_valuation(v)
    order = tuple(sorted(range(len(v)), key=lambda j: (-v[j], j)))
    return OrderedValuation(v, order)


def compare_bundles(v: OrderedValuation, S: Iterable[int], T: Iterable[int]) -> int:
    """Return 1 if S is strictly better than T, -1 if worse, 0 if S == T."""
    a, b = v.perturbed(set(S)), v.perturbed(set(T))
    return (a > b) - (a < b)


@dataclass(frozen=True)
class Agent:
    name: str
    valuation: AdditiveValuation
    entitlement: Fraction


@dataclass(frozen=True)
class Instance:
    kind: str
    m: int
    agents: tuple[Agent, ...]

    def __post_init__(self):
        if self.kind not in (GOODS, CHORES):
            raise InstanceError(f"unknown kind {self.kind!r}")
        if not self.agents:
            raise InstanceError("instance has no agents")
        for a in self.agents:
            if len(a.valuation) != self.m:
                raise InstanceError(
                    f"agent {a.name!r} has {len(a.valuation)} values, expected {self.m}")
            if a.entitlement <= 0 or a.entitlement > 1:
                raise InstanceError(f"entitlement {a.entitlement} of {a.name!r} outside (0, 1]")
        total = sum((a.entitlement for a in self.agents), Fraction(0))
        if total != 1:
            raise InstanceError(f"entitlement sum {format_rational(total)} ≠ 1")

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def valuations(self) -> list[AdditiveValuation]:
        return [a.valuation for a in self.agents]

    @property
    def entitlements(self) -> list[Fraction]:
        return [a.entitlement for a in self.agents]

    @classmethod
    def build(cls, kind: str, valuations: Sequence, entitlements: Sequence,
              names: Sequence[str] | None = None) -> "Instance":
        vals = [as_valuation(v) for v in valuations]
        if len(vals) != len(entitlements):
            raise InstanceError("valuations and entitlements differ in length")
        m = len(vals[0]) if vals else 0
        names = list(names) if names is not None else [f"agent{i}" for i in range(len(vals))]
        agents = tuple(Agent(nm, v, to_rational(b)) for nm, v, b in zip(names, vals, entitlements))
        return cls(kind, m, agents)


@dataclass(frozen=True)
class Allocation:
    bundles: tuple[frozenset[int], ...]

    @classmethod
    def from_lists(cls, bundles: Iterable[Iterable[int]]) -> "Allocation":
        return cls(tuple(frozenset(b) for b in bundles))

    def validate(self, m: int) -> None:
        seen: set[int] = set()
        for b in self.bundles:
            if seen & b:
                raise InstanceError("bundles are not disjoint")
            seen |= b
        if seen != set(range(m)):
            raise InstanceError("allocation does not assign every item")

    def values(self, instance: Instance) -> list[Fraction]:
        return [a.valuation.value(b) for a, b in zip(instance.agents, self.bundles)]

    def to_json(self) -> list[list[int]]:
        return [sorted(b) for b in self.bundles]


def parse_instance(text: str | dict) -> Instance:
    doc = json.loads(text) if isinstance(text, str) else text
    if not isinstance(doc, dict):
        raise InstanceError("instance must be a JSON object")
    if "kind" not in doc:
        raise InstanceError("kind missing")
    try:
        m = doc["items"]
        raw_agents = doc["agents"]
    except KeyError as exc:
        raise InstanceError(f"missing field {exc.args[0]!r}") from exc
    if not isinstance(m, int) or isinstance(m, bool) or m < 0:
        raise InstanceError(f"items must be a non-negative integer, got {m!r}")
    agents = []
    for i, a in enumerate(raw_agents):
        try:
            b, v = a["b"], a["v"]
        except KeyError as exc:
            raise InstanceError(f"agent {i} missing field {exc.args[0]!r}") from exc
        name = a.get("name", f"agent{i}")
        agents.append(Agent(name, AdditiveValuation(tuple(to_rational(x) for x in v)), to_rational(b)))
    return Instance(doc["kind"], m, tuple(agents))


def instance_to_dict(inst: Instance) -> dict:
    return {
        "kind": inst.kind,
        "items": inst.m,
        "agents": [
            {"name": a.name, "b": format_rational(a.entitlement),
             "v": [format_rational(x) for x in a.valuation]}
            for a in inst.agents
        ],
    }


def serialize_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), indent=2)
