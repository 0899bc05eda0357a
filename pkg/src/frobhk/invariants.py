"""Frobenius invariants of presented modules.

Everything is reduced to lengths of m-torsion subquotients:

* fhk(M, n) = ell(H^0_m(F^n M)), with F^n acting by q-th powers on the
  presentation matrix;
* Tor_i(M, F^n_* R) is the homology of a resolution of M with every matrix
  entry raised to the q-th power;
* H^k_m(N) is measured through Ext^{D-k}_P(N, P) over the ambient
  polynomial ring of dimension D (local duality).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .algebra import AlgebraError
from .groebner import Ideal, colon, syzygies
from .modules import (
    FreeComplex,
    LengthResult,
    PresentedModule,
    QuotientRing,
    cohomology_length,
    free_resolution,
    gamma_m_length,
    homology_length,
    minimal_generators,
)


@dataclass(frozen=True)
class InvariantSample:
    n: int
    q: int
    value: int | None
    kind: str = "fhk"
    finite: bool = True


@dataclass
class InvariantReport:
    samples: list[InvariantSample]
    dim: int
    ratios: list[Fraction] = field(default_factory=list)
    fit: object = None

    @property
    def last_ratio(self) -> Fraction | None:
        return self.ratios[-1] if self.ratios else None

    @property
    def limit(self) -> Fraction | None:
        """Leading coefficient of the fitted model, else the last ratio."""
        if self.fit is not None and getattr(self.fit, "ok", False):
            return self.fit.leading_coefficient(self.dim)
        return self.last_ratio


@dataclass(frozen=True)
class ThetaValue:
    n: int
    q: int
    dim: int
    tor_even: int
    tor_odd: int

    @property
    def theta(self) -> int:
        return self.tor_even - self.tor_odd


def frobenius_q(ring: QuotientRing, n: int) -> int:
    if n < 0:
        raise AlgebraError("Frobenius exponent must be non-negative")
    return ring.p**n


def frobenius_module(M: PresentedModule, n: int) -> PresentedModule:
    """F^n(M): q-th powers of the presentation entries, quotient block kept."""
    return M.twist(frobenius_q(M.ring, n))


def fhk(M: PresentedModule, n: int) -> int:
    res = gamma_m_length(frobenius_module(M, n))
    return int(res)


def hk_estimate(M: PresentedModule, n_max: int, n_min: int = 1) -> InvariantReport:
    """Sample fhk for n = n_min..n_max and compare with q^d."""
    from .fit import SampleSeries, fit_quasi_polynomial, leading_ratio, FitError

    if n_max < 2:
        raise AlgebraError("need n_max >= 2")
    d = M.ring.dim()
    samples = []
    for n in range(n_min, n_max + 1):
        samples.append(InvariantSample(n, frobenius_q(M.ring, n), fhk(M, n)))
    series = SampleSeries([(s.n, s.q, s.value) for s in samples], d, M.ring.p)
    report = InvariantReport(samples, d, leading_ratio(series).ratios)
    try:
        report.fit = fit_quasi_polynomial(series, d)
    except FitError:
        report.fit = None
    return report


# -- syzygies and resolutions ------------------------------------------------------------


_CACHE = {"on": True}


@lru_cache(maxsize=64)
def _cached_resolution(M: PresentedModule, length: int) -> FreeComplex:
    return free_resolution(M, length)


def set_resolution_cache(enabled: bool) -> None:
    """Turn reuse of resolutions across q on or off (results are identical)."""
    _CACHE["on"] = bool(enabled)
    if not enabled:
        _cached_resolution.cache_clear()


def resolution(M: PresentedModule, length: int) -> FreeComplex:
    """Resolution of M, computed once per module and reused across q."""
    if _CACHE["on"]:
        return _cached_resolution(M, length)
    return free_resolution(M, length)


def syzygy_module(M: PresentedModule, i: int = 1) -> PresentedModule:
    """syz^i M = coker(F_{i+1} -> F_i) for a pruned resolution of M."""
    if i < 1:
        return M
    C = resolution(M, i + 1)
    r = C.rank(i)
    return PresentedModule(M.ring, r, C.matrix(i + 1))


def tor_frobenius_length(M: PresentedModule, i: int, n: int) -> LengthResult:
    """ell(Gamma_m(Tor_i^R(M, F^n_* R))) via the q-twisted resolution."""
    if i < 1:
        raise AlgebraError("Tor index must be at least 1")
    C = resolution(M, i + 1)
    return homology_length(C.twist(frobenius_q(M.ring, n)), i)


def local_cohomology_length(M: PresentedModule, k: int, n: int = 0) -> LengthResult:
    """ell(H^k_m(F^n M)) from Ext^{D-k}_P(F^n M, P) with D = number of variables."""
    if k < 0:
        raise AlgebraError("cohomological degree must be non-negative")
    N = frobenius_module(M, n)
    if k == 0:
        return gamma_m_length(N)
    D = M.ring.poly.nvars
    j = D - k
    if j < 0:
        return LengthResult(0, True)
    C = free_resolution(N, j + 1, over_poly=True)
    return cohomology_length(C, j)


def theta(M: PresentedModule, n: int) -> ThetaValue:
    """ell(Tor_{2d}) - ell(Tor_{2d+1}) for the q-twist over a hypersurface."""
    ring = M.ring
    if not ring.is_hypersurface():
        raise AlgebraError("theta needs a hypersurface ring")
    d = ring.dim()
    C = resolution(M, 2 * d + 2)
    Cq = C.twist(frobenius_q(ring, n))
    even = homology_length(Cq, 2 * d)
    odd = homology_length(Cq, 2 * d + 1)
    if not (even.finite and odd.finite):
        raise AlgebraError("Tor lengths are not finite")
    return ThetaValue(n, frobenius_q(ring, n), d, even.value, odd.value)


# -- ideals ----------------------------------------------------------------------------------


def symbolic_power(ring: QuotientRing, a, b, q: int) -> Ideal:
    """((a^q) + I_R) : b^q in P, for I = (a) : (b)."""
    a, b = ring(a), ring(b)
    if a.is_zero() or b.is_zero():
        raise AlgebraError("symbolic power needs nonzero a and b")
    if q < 1:
        raise AlgebraError("exponent must be positive")
    base = Ideal(ring.poly, [a**q, *ring.quotient])
    return colon(base, b**q)


def ideal_module(ring: QuotientRing, generators) -> PresentedModule:
    """An ideal of R as a module: R^s modulo the syzygies of its generators."""
    P = ring.poly
    gens = [(P(g),) for g in generators]
    gens = [v for v in minimal_generators(ring, 1, gens)]
    if not gens:
        return PresentedModule(ring, 0, [])
    syz = syzygies(gens, P, ring.quotient)
    rows = minimal_generators(ring, len(gens), list(syz.generators))
    return PresentedModule(ring, len(gens), rows)


def refl_pair(ring: QuotientRing, a, b, q: int) -> tuple[int, int]:
    """(ell(H^2_m(I^(q))), ell(H^0_m(R / (a^q, b^q)))) for I = (a) : (b).

    q may be any positive integer here; for q a power of p the second entry
    is fhk of R/(a, b).
    """
    I = symbolic_power(ring, a, b, q)
    N = ideal_module(ring, I.gens)
    first = local_cohomology_length(N, 2)
    a, b = ring(a), ring(b)
    second = gamma_m_length(PresentedModule(ring, 1, [(a**q,), (b**q,)]))
    if not (first.finite and second.finite):
        raise AlgebraError("lengths in the reflexive comparison are not finite")
    return first.value, second.value
