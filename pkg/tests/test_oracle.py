import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from frobhk.engine import GuardExceeded
from frobhk.groebner import guarded
from frobhk.invariants import fhk, frobenius_module
from frobhk.modules import PresentedModule, QuotientRing, gamma_m_length
from frobhk.oracle import oracle_for_module, rank_mod_p, row_reduce


def test_rank_mod_p():
    A = np.array([[1, 1], [1, 1]])
    assert rank_mod_p(A, 2) == 1
    B = np.array([[1, 2], [3, 4]])
    assert rank_mod_p(B, 2) == 1  # det = -2
    assert rank_mod_p(B, 5) == 2
    R, piv = row_reduce(np.array([[2, 4, 1], [1, 2, 4]]), 5)
    assert piv == [0, 2]


def test_frobenius_power_of_maximal_ideal():
    R = QuotientRing.build(2, "xy")
    M = PresentedModule.cyclic(R, ["x^2", "y^2"])
    r = oracle_for_module(M, D=4)
    assert r.value == 4 and r.stable


def test_fermat_example_at_fixed_degree():
    R = QuotientRing.build(2, "xyz", ["x^3+y^3+z^3"])
    M = PresentedModule.cyclic(R, ["x^2", "(y+z)^2"])
    r = oracle_for_module(M, D=6)
    assert r.value == 4 and r.stable


def test_free_module_is_zero():
    R = QuotientRing.build(3, "xyz", ["x^3+y^3+z^3"])
    assert oracle_for_module(PresentedModule.free(R, 2)).value == 0


def test_auto_escalation_reports_degree():
    R = QuotientRing.build(3, "xy")
    r = oracle_for_module(PresentedModule.cyclic(R, ["x^3", "y^3"]))
    assert r.value == 9 and r.stable and r.degree >= 3


def test_cell_guard():
    R = QuotientRing.build(2, "xyz", ["x^3+y^3+z^3"])
    M = PresentedModule.cyclic(R, ["x^8", "(y+z)^8"])
    with guarded(oracle_cells=1000):
        with pytest.raises(GuardExceeded):
            oracle_for_module(M)


def test_degree_cap():
    R = QuotientRing.build(2, "xy")
    with pytest.raises(GuardExceeded):
        oracle_for_module(PresentedModule.cyclic(R, ["x^6", "y^6"]), max_degree=5)


@pytest.mark.parametrize(
    "p, variables, quotient, weights, gens",
    [
        (2, "xyz", ["x^2*y-z^2"], (1, 2, 2), ["x^2", "z^2"]),
        (5, "xyuv", ["x*y-u*v"], None, ["x^2", "v^3"]),
        (3, "xyz", ["x^4+y^4-z^4"], None, ["x^3", "y^3-z^3"]),
        (2, "xyt", ["x^3+t*x*y+y^3"], None, ["x^4", "y^4", "x^2*y^2"]),
    ],
)
def test_agrees_with_groebner_path(p, variables, quotient, weights, gens):
    R = QuotientRing.build(p, variables, quotient, weights=weights)
    M = PresentedModule.cyclic(R, gens)
    assert oracle_for_module(M).value == gamma_m_length(M).value


def test_rank_two_module():
    R = QuotientRing.build(2, "xyz", ["x^3+y^3+z^3"])
    M = PresentedModule(R, 2, [("y+z", "x"), ("x^2", "y^2+y*z+z^2")])
    N = frobenius_module(M, 1)
    assert oracle_for_module(N).value == fhk(M, 1)


monomial = st.tuples(st.integers(0, 3), st.integers(0, 3))


@settings(max_examples=25)
@given(st.sampled_from([2, 3, 5]), st.lists(monomial, min_size=1, max_size=3), st.integers(1, 3))
def test_random_monomial_ideals(p, mons, a):
    R = QuotientRing.build(p, "xy")
    gens = [f"x^{i}*y^{j}" for i, j in mons] + [f"x^{a}*y"]
    M = PresentedModule.cyclic(R, gens)
    assert oracle_for_module(M).value == gamma_m_length(M).value


@settings(max_examples=20)
@given(
    st.integers(0, 4),
    st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(1, 4)), min_size=1, max_size=3),
)
def test_random_binomial_ideals_over_node(c, terms):
    # inhomogeneous generators on k[x,y]/(x y) exercise the non-graded path
    R = QuotientRing.build(5, "xy", ["x*y"])
    f = " + ".join(f"{k}*x^{i}*y^{j}" for i, j, k in terms)
    M = PresentedModule.cyclic(R, [f"x^3 + {c}*y^2", f])
    assert oracle_for_module(M, max_degree=20).value == gamma_m_length(M).value
