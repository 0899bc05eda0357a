import pytest
from hypothesis import HealthCheck, settings, strategies as st

from frobhk.algebra import Polynomial, PolynomialRing
from frobhk.modules import QuotientRing

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")


def poly_strategy(ring: PolynomialRing, max_terms=4, max_exp=3, allow_zero=True):
    n = ring.nvars
    term = st.tuples(st.tuples(*[st.integers(0, max_exp)] * n), st.integers(1, ring.p - 1))
    lo = 0 if allow_zero else 1
    return st.lists(term, min_size=lo, max_size=max_terms).map(
        lambda ts: Polynomial(ring, _merge(ts, ring.p))
    ).filter(lambda f: allow_zero or not f.is_zero())


def _merge(ts, p):
    out = {}
    for e, c in ts:
        out[e] = (out.get(e, 0) + c) % p
    return out


@pytest.fixture(scope="session")
def fermat2():
    return QuotientRing.build(2, "xyz", ["x^3+y^3+z^3"])


@pytest.fixture(scope="session")
def quartic3():
    return QuotientRing.build(3, "xyz", ["x^4+y^4-z^4"])


@pytest.fixture(scope="session")
def nonis2():
    return QuotientRing.build(2, "xyt", ["x^3+t*x*y+y^3"])


@pytest.fixture(scope="session")
def weighted2():
    return QuotientRing.build(2, "xyz", ["x^2*y-z^2"], weights=(1, 2, 2))


@pytest.fixture(scope="session")
def quadric5():
    return QuotientRing.build(5, "xyuv", ["x*y-u*v"])
