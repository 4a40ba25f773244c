import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def rationals(max_num=20, max_den=6, min_value=0):
    return st.builds(Fraction, st.integers(min_value, max_num), st.integers(1, max_den))


def valuations(min_size=1, max_size=6, **kw):
    return st.lists(rationals(**kw), min_size=min_size, max_size=max_size)


def entitlements():
    """A rational in (0, 1]."""
    return st.builds(lambda p, q: Fraction(min(p, q), q), st.integers(1, 30), st.integers(1, 30))


def random_entitlements(rng: random.Random, n: int) -> list[Fraction]:
    w = [rng.randint(1, 12) for _ in range(n)]
    s = sum(w)
    return [Fraction(x, s) for x in w]


@pytest.fixture
def rng():
    return random.Random(20240611)
