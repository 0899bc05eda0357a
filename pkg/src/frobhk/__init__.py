"""Frobenius invariants of modules over F_p[x_1..x_v]/I: generalized
Hilbert-Kunz functions, Tor and local cohomology lengths, theta, and exact
fitting of the sampled sequences."""

__version__ = "0.1.0"

from .algebra import Polynomial, PolynomialRing, frobenius_power, poly_arith
from .groebner import Ideal, Submodule, bracket_power, colon, groebner_basis, krull_dim, normal_form, saturation, syzygies
from .modules import FreeComplex, LengthResult, PresentedModule, QuotientRing, free_resolution, gamma_m_length, homology_length
from .invariants import fhk, frobenius_module, hk_estimate, local_cohomology_length, refl_pair, symbolic_power, theta, tor_frobenius_length

__all__ = [
    "Polynomial",
    "PolynomialRing",
    "frobenius_power",
    "poly_arith",
    "Ideal",
    "Submodule",
    "bracket_power",
    "colon",
    "groebner_basis",
    "krull_dim",
    "normal_form",
    "saturation",
    "syzygies",
    "FreeComplex",
    "LengthResult",
    "PresentedModule",
    "QuotientRing",
    "free_resolution",
    "gamma_m_length",
    "homology_length",
    "fhk",
    "frobenius_module",
    "hk_estimate",
    "local_cohomology_length",
    "refl_pair",
    "symbolic_power",
    "theta",
    "tor_frobenius_length",
]
