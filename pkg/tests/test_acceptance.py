"""The twelve acceptance criteria, checked at exact integer tolerance.

Each test prints one line ``PASS criterion k: ...`` or ``FAIL criterion k: ...``
(capture is bypassed so the line shows up in plain ``pytest`` runs as well),
and a summary block is printed once the module finishes.
"""

from contextlib import contextmanager
from fractions import Fraction

import pytest

from frobhk.fit import SampleSeries, fit_quasi_polynomial, verify_closed_form
from frobhk.invariants import (
    fhk,
    frobenius_module,
    hk_estimate,
    local_cohomology_length,
    refl_pair,
    syzygy_module,
    theta,
    tor_frobenius_length,
)
from frobhk.modules import PresentedModule, QuotientRing
from frobhk.oracle import oracle_for_module

RESULTS: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="module", autouse=True)
def summary(pytestconfig):
    yield
    capman = pytestconfig.pluginmanager.getplugin("capturemanager")
    with capman.global_and_fixture_disabled():
        print("\n=== acceptance summary ===")
        for k in sorted(RESULTS):
            ok, text = RESULTS[k]
            print(f"{'PASS' if ok else 'FAIL'} criterion {k}: {text}")
        print(f"{sum(ok for ok, _ in RESULTS.values())}/{len(RESULTS)} criteria passed")


@pytest.fixture
def criterion(pytestconfig):
    capman = pytestconfig.pluginmanager.getplugin("capturemanager")

    @contextmanager
    def check(k: int, text: str):
        try:
            yield
        except BaseException as exc:
            RESULTS[k] = (False, f"{text} [{type(exc).__name__}: {exc}]")
            with capman.global_and_fixture_disabled():
                print(f"\nFAIL criterion {k}: {RESULTS[k][1]}")
            raise
        RESULTS[k] = (True, text)
        with capman.global_and_fixture_disabled():
            print(f"\nPASS criterion {k}: {text}")

    return check


def cyclic(ring, gens):
    return PresentedModule.cyclic(ring, gens)


FERMAT = QuotientRing.build(2, "xyz", ["x^3+y^3+z^3"])
QUARTIC = QuotientRing.build(3, "xyz", ["x^4+y^4-z^4"])
NONIS = QuotientRing.build(2, "xyt", ["x^3+t*x*y+y^3"])
WEIGHTED = QuotientRing.build(2, "xyz", ["x^2*y-z^2"], weights=(1, 2, 2))
QUADRIC = QuotientRing.build(5, "xyuv", ["x*y-u*v"])
PLANE = QuotientRing.build(3, "xy")

M1 = cyclic(FERMAT, ["x", "y+z"])
QUAD = {
    "R/(x,z^2,y^2-yz)": cyclic(FERMAT, ["x", "z^2", "y^2-y*z"]),
    "R/(x,y+z,z^2)": cyclic(FERMAT, ["x", "y+z", "z^2"]),
    "R/(x,z^2)": cyclic(FERMAT, ["x", "z^2"]),
}
M3a = cyclic(QUARTIC, ["x", "y^2-z^2"])
M3b = cyclic(QUARTIC, ["x", "y-z"])
M4a = cyclic(NONIS, ["x^3", "y^3"])
M4b = cyclic(NONIS, ["x^2", "y^2", "x*y"])
M5 = cyclic(WEIGHTED, ["x", "z"])
M12 = cyclic(PLANE, ["x", "y"])


def test_criterion_01_fermat_cubic(criterion):
    vals = [fhk(M1, n) for n in (1, 2, 3)]
    with criterion(1, f"Fermat cubic fhk at q=2,4,8 = {vals}, expected [4, 20, 84] = 4(q^2-1)/3"):
        assert vals == [4, 20, 84]
        assert all(ok for *_, ok in verify_closed_form(SampleSeries([(n, 2**n, v) for n, v in zip((1, 2, 3), vals)], 2, 2), "4*(q^2-1)/3"))


def test_criterion_02_quadruple_and_identity(criterion):
    expected = {
        "R/(x,z^2,y^2-yz)": [20, 84, 340],
        "R/(x,y+z,z^2)": [12, 52, 212],
        "R/(x,z^2)": [24, 96, 384],
    }
    vals = {k: [fhk(M, n) for n in (1, 2, 3)] for k, M in QUAD.items()}
    base = [fhk(M1, n) for n in (1, 2, 3)]
    oracle = {k: oracle_for_module(frobenius_module(M, 1)).value for k, M in QUAD.items()}
    text = f"values {list(vals.values())}; identity over q=2,4,8 with fhk_M={base}; q=2 oracle {list(oracle.values())}"
    with criterion(2, text):
        assert vals == expected
        a, b, c = vals.values()
        for i in range(3):
            assert Fraction(a[i] + b[i] - c[i], 2) == base[i]
        assert all(oracle[k] == vals[k][0] for k in QUAD)


def test_criterion_03_quartic(criterion):
    a = [fhk(M3a, n) for n in (1, 2)]
    b = [fhk(M3b, n) for n in (1, 2)]
    with criterion(3, f"quartic char 3 at q=3,9: R/(x,y^2-z^2) -> {a} (3q^2-3), R/(x,y-z) -> {b} (9(q^2-1)/4)"):
        assert a == [24, 240]
        assert b == [18, 180]


def test_criterion_04_non_isolated(criterion):
    a = [fhk(M4a, n) for n in (1, 2, 3)]
    b = [fhk(M4b, n) for n in (1, 2, 3)]
    with criterion(4, f"x^3+txy+y^3 at q=2,4,8: R/(x^3,y^3) -> {a} (3q^2+2q-1), R/(x^2,y^2,xy) -> {b} (q^2+q-2)"):
        assert a == [15, 55, 207]
        assert b == [4, 18, 70]
        for n, q in ((1, 2), (2, 4), (3, 8)):
            assert a[n - 1] == 3 * q * q + 2 * q - 1
            assert b[n - 1] == q * q + q - 2


def test_criterion_05_vanishing(criterion):
    vals = [fhk(M5, n) for n in (1, 2, 3, 4)]
    with criterion(5, f"x^2y-z^2 weights (1,2,2), R/(x,z) at q=2,4,8,16 -> {vals}"):
        assert vals == [0, 0, 0, 0]


def test_criterion_06_tor_syzygy(criterion):
    pairs = []
    for M in (M1, M3a):
        S = syzygy_module(M, 1)
        for n in (1, 2):
            t = tor_frobenius_length(M, 1, n)
            pairs.append((t.value if t.finite else None, fhk(S, n)))
    with criterion(6, f"(Tor_1, fhk(syz)) on instances 1 and 3, n=1,2: {pairs}"):
        assert all(t is not None and t == s for t, s in pairs)


def test_criterion_07_theta(criterion):
    tv = [theta(M1, n) for n in (1, 2)]
    text = ", ".join(f"q={t.q}: Tor4={t.tor_even} Tor5={t.tor_odd}" for t in tv)
    with criterion(7, f"theta on instance 1: {text}"):
        assert all(t.dim == 2 and t.tor_even == t.tor_odd for t in tv)


def test_criterion_08_finite_projective_dimension(criterion):
    N = cyclic(FERMAT, ["x"])
    vals = {(i, n): tor_frobenius_length(N, i, n) for i in (1, 2) for n in (1, 2)}
    with criterion(8, f"R/(x) over the Fermat cubic: Tor_i lengths (i,n)->{ {k: v.value for k, v in vals.items()} }"):
        assert all(v.finite and v.value == 0 for v in vals.values())


def test_criterion_09_reflexive_comparison(criterion):
    pairs = {q: refl_pair(QUADRIC, "x", "v", q) for q in range(2, 9)}
    diffs = {q: abs(h2 - h0) for q, (h2, h0) in pairs.items()}
    h2R = local_cohomology_length(PresentedModule.free(QUADRIC), 2)
    bound = diffs[2] + h2R.value
    golden = {2: 1, 3: 4, 4: 10, 5: 20, 6: 35, 7: 56, 8: 84}
    oracle = oracle_for_module(cyclic(QUADRIC, ["x^2", "v^2"])).value
    text = f"(h2, h0) for q=2..8: {list(pairs.values())}; |diff| {sorted(set(diffs.values()))} <= {bound}; q=2 oracle {oracle}"
    with criterion(9, text):
        assert h2R.finite and h2R.value == 0
        assert all(d <= bound for d in diffs.values())
        assert oracle == pairs[2][1]
        assert {q: p for q, p in pairs.items()} == {q: (v, v) for q, v in golden.items()}


ORACLE_CASES = [
    ("instance 1", M1, 1),
    *[(f"instance 2 {k}", M, 1) for k, M in QUAD.items()],
    ("instance 3 R/(x,y^2-z^2)", M3a, 1),
    ("instance 3 R/(x,y-z)", M3b, 1),
    ("instance 4 R/(x^3,y^3)", M4a, 1),
    ("instance 4 R/(x^2,y^2,xy)", M4b, 1),
    ("instance 5", M5, 1),
    ("instance 6 syz M", syzygy_module(M1, 1), 1),
    ("instance 9 R/(x^2,v^2)", cyclic(QUADRIC, ["x", "v"]), None),
    ("instance 12", M12, 1),
]


def test_criterion_10_oracle_equivalence(criterion):
    seen = []
    for name, M, n in ORACLE_CASES:
        if n is None:
            N = cyclic(QUADRIC, ["x^2", "v^2"])
            gb = refl_pair(QUADRIC, "x", "v", 2)[1]
        else:
            N = frobenius_module(M, n)
            gb = fhk(M, n)
        r = oracle_for_module(N)
        seen.append((name, gb, r.value, r.stable))
    with criterion(10, "Groebner vs oracle at smallest q: " + "; ".join(f"{a} {b}={c}" for a, b, c, _ in seen)):
        assert all(st and g == o for _, g, o, st in seen)


def test_criterion_11_fit_round_trip(criterion):
    series = SampleSeries([(n, 2**n, fhk(M1, n)) for n in (1, 2, 3, 4)], 2, 2)
    rep = fit_quasi_polynomial(series, 2, 1)
    held = [(q, v, str(pred)) for _, q, v, pred, _ in rep.holdout]
    with criterion(11, f"fit {rep.formula()} from q=2,4,8; holdout (q, value, predicted) {held}"):
        assert rep.ok and rep.period == 1 and rep.degree == 2
        assert rep.coefficients[0] == [Fraction(-4, 3), Fraction(0), Fraction(4, 3)]
        assert [h[1] for h in rep.holdout] == [16]


def test_criterion_12_regular_baseline(criterion):
    vals = [fhk(M12, n) for n in (1, 2, 3)]
    rep = hk_estimate(M12, 3)
    with criterion(12, f"F_3[x,y], M=k at q=3,9,27 -> {vals}; ratios {[str(r) for r in rep.ratios]}"):
        assert vals == [9, 81, 729]
        assert rep.ratios == [1, 1, 1] and rep.limit == 1
