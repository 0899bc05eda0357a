"""Finitely presented modules over R = P / I_R and their m-torsion lengths.

A module is stored as M = P^r / K where K is spanned by the presentation rows
together with I_R * e_j.  Lengths are always taken after localizing at the
origin m = (x_1..x_v): for an m-torsion subquotient the global and local
lengths coincide, so we extract Gamma_m(L/K) = (L meet (K : m^inf)) / K and
count lead-term differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .algebra import AlgebraError, Polynomial, PolynomialRing, parse_many
from .groebner import (
    Ideal,
    Submodule,
    Vector,
    current_guards,
    default_order,
    infer_shifts,
    intersect,
    krull_dim,
    lead_difference_count,
    saturate_by_maximal,
    syzygies,
    annihilator_of,
)

FLAG_INFINITE = None


@dataclass(frozen=True)
class QuotientRing:
    """R = P / (quotient), viewed locally at the origin."""

    poly: PolynomialRing
    quotient: tuple[Polynomial, ...] = ()

    @classmethod
    def build(cls, p: int, variables, quotient=(), weights=None, order=None) -> "QuotientRing":
        P = PolynomialRing(p, tuple(variables), weights=weights, order=order)
        return cls(P, tuple(g for g in parse_many(P, quotient) if not g.is_zero()))

    @property
    def p(self) -> int:
        return self.poly.p

    def __call__(self, f) -> Polynomial:
        return self.poly(f)

    def ideal(self) -> Ideal:
        return Ideal(self.poly, self.quotient)

    def dim(self) -> int:
        return krull_dim(self.ideal())

    def is_hypersurface(self) -> bool:
        return len(self.quotient) == 1

    def is_graded(self) -> bool:
        return all(g.is_homogeneous() for g in self.quotient)


@dataclass(frozen=True)
class LengthResult:
    """Length of an m-torsion module, or FLAG_INFINITE.

    ``finite`` is the certificate.  ``nonlocal_support`` records that the
    global object had support away from the origin, which was discarded.
    """

    value: int | None
    finite: bool
    nonlocal_support: bool = False

    def __post_init__(self):
        if (self.value is not None) != self.finite:
            raise ValueError("value must be present exactly when finite")

    def __int__(self):
        if self.value is None:
            raise ValueError("infinite length")
        return self.value


def _zero_row(ring: QuotientRing, r: int) -> Vector:
    return (ring.poly.zero(),) * r


def quotient_block(ring: QuotientRing, rank: int) -> list[Vector]:
    z = ring.poly.zero()
    return [tuple(g if k == j else z for k in range(rank)) for g in ring.quotient for j in range(rank)]


class PresentedModule:
    """coker of the row map R^m -> R^r given by ``rows``."""

    def __init__(self, ring: QuotientRing, rank: int, rows: Iterable = ()):
        self.ring = ring
        self.rank = rank
        P = ring.poly
        out = []
        for v in rows:
            v = tuple(P(c) for c in v)
            if len(v) != rank:
                raise AlgebraError(f"relation of length {len(v)} in rank {rank}")
            out.append(v)
        self.rows: tuple[Vector, ...] = tuple(out)
        self._relations: Submodule | None = None

    @classmethod
    def cyclic(cls, ring: QuotientRing, generators) -> "PresentedModule":
        """R / I for I generated by ``generators``."""
        return cls(ring, 1, [(g,) for g in parse_many(ring.poly, generators)])

    @classmethod
    def free(cls, ring: QuotientRing, rank: int = 1) -> "PresentedModule":
        return cls(ring, rank, [])

    def __repr__(self):
        return f"PresentedModule(rank={self.rank}, rows={len(self.rows)})"

    @property
    def relations(self) -> Submodule:
        if self._relations is None:
            self._relations = Submodule(self.ring.poly, self.rank, self.rows + tuple(quotient_block(self.ring, self.rank)))
        return self._relations

    def is_graded(self) -> bool:
        return self.relations.is_graded()

    def twist(self, q: int) -> "PresentedModule":
        """Entry-wise q-th powers of the rows; the quotient block stays as it is."""
        if q == 1:
            return self
        return PresentedModule(self.ring, self.rank, [tuple(c.scale_exponents(q) for c in v) for v in self.rows])


# -- lengths -------------------------------------------------------------------------


def _colon_not_in_m(S: Submodule, v: Vector) -> bool:
    """True when (S : v) has an element with nonzero constant term."""
    if S.contains(v):
        return True
    if S.is_graded():
        # homogeneous colon ideals sit inside m unless they are the unit ideal
        return False
    ann = annihilator_of(S, v)
    return any(g.constant_term() for g in ann.groebner())


def torsion_part(K: Submodule, L: Submodule | None = None):
    """Return (K : m^inf) meet L and whether L/K is m-torsion globally."""
    S = saturate_by_maximal(K)
    if L is None:
        return S, S.is_whole()
    if S.contains_module(L):
        return L, True
    return intersect(L, S), False


def subquotient_length(K: Submodule, L: Submodule | None = None, check: bool = True) -> LengthResult:
    """Length of L/K assuming it is m-torsion; L None means the free module."""
    order = default_order(K.ring, K.rank)
    if check and L is not None and not L.contains_module(K):
        raise AlgebraError("K is not contained in L")
    limit = current_guards().oracle_cells
    n = lead_difference_count(None if L is None else L.basis(order), K.basis(order), limit)
    if n is None:
        return LengthResult(FLAG_INFINITE, False)
    return LengthResult(n, True)


def gamma_length(K: Submodule, L: Submodule | None = None) -> LengthResult:
    """ell(Gamma_m(L/K)) with a flag for support away from the origin.

    When L/K has finite dimension over k, it is all m-torsion and the count
    is direct; otherwise the saturation (K : m^inf) is formed first.
    """
    direct = subquotient_length(K, L, check=False)
    if direct.finite and _nilpotent_action(K, L, direct.value):
        return direct
    T, whole = torsion_part(K, L)
    n = subquotient_length(K, T, check=False)
    if not n.finite:
        raise AlgebraError("m-torsion part without finite length")
    return LengthResult(n.value, True, nonlocal_support=not whole)


def _nilpotent_action(K: Submodule, L: Submodule | None, dim: int) -> bool:
    """Whether each variable acts nilpotently on a k-finite L/K of dimension dim.

    Graded quotients of finite dimension are automatically m-torsion; other
    inputs may carry points of support away from the origin.
    """
    if dim == 0 or K.is_graded():
        return True
    P = K.ring
    gens = L.generators if L is not None else [
        tuple(P.one() if k == j else P.zero() for k in range(K.rank)) for j in range(K.rank)
    ]
    for x in P.gens():
        xn = x**dim
        if not all(K.contains(tuple(xn * c for c in v)) for v in gens):
            return False
    return True


def locally_finite(K: Submodule, L: Submodule | None = None) -> bool:
    """Whether (L/K) localized at the origin has finite length."""
    rank = K.rank
    S = saturate_by_maximal(K)
    gens = L.generators if L is not None else [
        tuple(K.ring.one() if k == j else K.ring.zero() for k in range(rank)) for j in range(rank)
    ]
    return all(_colon_not_in_m(S, v) for v in gens)


def gamma_m_length(M: PresentedModule) -> LengthResult:
    """ell(H^0_m(M)) for a presented module."""
    return gamma_length(M.relations)


def module_length(M: PresentedModule) -> LengthResult:
    """k-dimension of M when finite, without any saturation."""
    return subquotient_length(M.relations)


def hilbert_function(M: PresentedModule, t: int, shifts: Sequence[int] | None = None) -> int:
    """dim_k M_t for a graded module; basis vectors get degrees ``shifts``."""
    K = M.relations
    if shifts is None:
        shifts = K.shifts()
        if shifts is None:
            raise AlgebraError("module is not graded")
    P = M.ring.poly
    gb = K.basis(default_order(P, M.rank))
    codec = gb.codec
    red = gb.reducer
    count = 0
    for j, s in enumerate(shifts):
        for e in _monomials_of_degree(P.degree_weights, t - s):
            if red.find(codec.pack(e, j)) < 0:
                count += 1
    return count


def _monomials_of_degree(weights: Sequence[int], d: int):
    if d < 0:
        return
    n = len(weights)

    def rec(i, left, acc):
        if i == n - 1:
            if left % weights[i] == 0:
                yield tuple(acc) + (left // weights[i],)
            return
        for a in range(left // weights[i] + 1):
            acc.append(a)
            yield from rec(i + 1, left - a * weights[i], acc)
            acc.pop()

    if n == 0:
        if d == 0:
            yield ()
        return
    yield from rec(0, d, [])


# -- complexes -----------------------------------------------------------------------


@dataclass
class FreeComplex:
    """Free modules F_0 <- F_1 <- F_2 <- ... over R.

    ``maps[i]`` is the matrix of F_{i+1} -> F_i acting on row vectors, so it
    has rank F_{i+1} rows of length rank F_i.
    """

    ring: QuotientRing
    ranks: list[int]
    maps: list[list[Vector]] = field(default_factory=list)

    def matrix(self, i: int) -> list[Vector]:
        """delta_i : F_i -> F_{i-1}; empty for i beyond the computed range."""
        if 1 <= i <= len(self.maps):
            return self.maps[i - 1]
        return []

    def rank(self, i: int) -> int:
        return self.ranks[i] if 0 <= i < len(self.ranks) else 0

    def betti(self) -> list[int]:
        return list(self.ranks)

    def twist(self, q: int) -> "FreeComplex":
        if q == 1:
            return self
        maps = [[tuple(c.scale_exponents(q) for c in v) for v in A] for A in self.maps]
        return FreeComplex(self.ring, list(self.ranks), maps)

    def is_complex(self) -> bool:
        Q = self.ring.ideal()
        for A, B in zip(self.maps, self.maps[1:]):
            for row in _matmul(B, A, self.ring.poly):
                if not all(Q.contains(c) for c in row):
                    return False
        return True

    def has_unit_entries(self) -> bool:
        return any(c.constant_term() for A in self.maps for v in A for c in v)


def _matmul(B: Sequence[Vector], A: Sequence[Vector], P: PolynomialRing) -> list[Vector]:
    if not A:
        return [() for _ in B]
    cols = len(A[0])
    out = []
    for b in B:
        row = []
        for j in range(cols):
            s = P.zero()
            for bi, a in zip(b, A):
                if not bi.is_zero() and not a[j].is_zero():
                    s = s + bi * a[j]
            row.append(s)
        out.append(tuple(row))
    return out


def _vector_degree(v: Vector, shifts: Sequence[int]) -> int:
    for c, s in zip(v, shifts):
        if not c.is_zero():
            return c.degree() + s
    return 0


def _is_homogeneous(v: Vector, shifts: Sequence[int]) -> bool:
    degs = {c.degree() + s for c, s in zip(v, shifts) if not c.is_zero()}
    return len(degs) <= 1 and all(c.is_homogeneous() for c in v)


def minimal_generators(ring: QuotientRing, rank: int, gens: Sequence[Vector], shifts=None) -> list[Vector]:
    """Drop redundant generators of a submodule of P^rank modulo I_R.

    For graded input this is a minimal generating set: generators are taken
    by increasing degree and each degree is cut down by linear algebra on
    normal forms.  Otherwise a generator is dropped when the others span it.
    """
    P = ring.poly
    base = quotient_block(ring, rank)
    gens = [v for v in gens if any(not c.is_zero() for c in v)]
    if shifts is None:
        shifts = infer_shifts(P, list(gens) + base, rank)
    if shifts is not None and all(_is_homogeneous(v, shifts) for v in gens):
        return _graded_minimal(ring, rank, gens, base, shifts)
    kept = list(gens)
    i = len(kept) - 1
    while i >= 0:
        others = kept[:i] + kept[i + 1 :]
        if Submodule(P, rank, others + base).contains(kept[i]):
            kept = others
        i -= 1
    return kept


def _graded_minimal(ring, rank, gens, base, shifts) -> list[Vector]:
    P = ring.poly
    p = P.p
    groups: dict[int, list[Vector]] = {}
    for v in gens:
        groups.setdefault(_vector_degree(v, shifts), []).append(v)
    kept: list[Vector] = []
    for d in sorted(groups):
        span = Submodule(P, rank, kept + base)
        gb = span.basis(default_order(P, rank))
        pivots: dict[int, dict[int, int]] = {}
        for v in groups[d]:
            nf = dict(gb.reduce_packed(_pack(v, gb.codec)))
            # eliminate against earlier independent normal forms of this degree
            while nf:
                lead = max(nf)
                piv = pivots.get(lead)
                if piv is None:
                    break
                c = nf[lead]
                for m, a in piv.items():
                    val = (nf.get(m, 0) - c * a) % p
                    if val:
                        nf[m] = val
                    else:
                        nf.pop(m, None)
            if nf:
                lead = max(nf)
                inv = pow(nf[lead], p - 2, p)
                pivots[lead] = {m: a * inv % p for m, a in nf.items()}
                kept.append(v)
    return kept


def _pack(v: Vector, codec) -> dict[int, int]:
    out = {}
    for j, f in enumerate(v):
        for e, c in f._terms.items():
            out[codec.pack(e, j)] = c
    return out


def free_resolution(M: PresentedModule, length: int, over_poly: bool = False) -> FreeComplex:
    """Free resolution of M up to F_length, pruned of redundant generators.

    With ``over_poly`` the quotient ideal is treated as part of M and the
    resolution is over P itself.
    """
    if length < 1:
        raise AlgebraError("resolution length must be at least 1")
    ring = M.ring
    P = ring.poly
    if over_poly:
        rows = list(M.rows) + quotient_block(ring, M.rank)
        ring = QuotientRing(P, ())
    else:
        rows = list(M.rows)
    graded = M.is_graded() and ring.is_graded()
    shifts = infer_shifts(P, list(rows) + quotient_block(ring, M.rank), M.rank) if graded else None
    rows = minimal_generators(ring, M.rank, rows, shifts)
    cx = FreeComplex(ring, [M.rank, len(rows)], [rows] if rows else [])
    if not rows:
        cx.ranks = [M.rank]
        return cx
    cur_shifts = shifts
    for _ in range(length - 1):
        A = cx.maps[-1]
        syz = syzygies(A, P, ring.quotient)
        if cur_shifts is not None:
            cur_shifts = tuple(_vector_degree(v, cur_shifts) for v in A)
        nxt = minimal_generators(ring, len(A), list(syz.generators), cur_shifts)
        if not nxt:
            break
        cx.maps.append(nxt)
        cx.ranks.append(len(nxt))
    return cx


def homology_submodules(C: FreeComplex, i: int):
    """(K, L) with H_i(C) = L/K inside P^{rank F_i}; K holds the I_R block."""
    ring = C.ring
    P = ring.poly
    r = C.rank(i)
    out_map = C.matrix(i)
    in_map = C.matrix(i + 1)
    block = quotient_block(ring, r)
    K = Submodule(P, r, list(in_map) + block)
    if i == 0 or not out_map:
        L = None
    else:
        L = syzygies(out_map, P, ring.quotient)
    return K, L


def homology_length(C: FreeComplex, i: int, local_check: bool = True) -> LengthResult:
    """ell(Gamma_m(H_i(C))), flagged when the homology has support elsewhere.

    The value is FLAG_INFINITE when H_i is not of finite length at the origin.
    """
    r = C.rank(i)
    if r == 0:
        return LengthResult(0, True)
    K, L = homology_submodules(C, i)
    if L is not None and L.basis().is_zero():
        return LengthResult(0, True)
    res = gamma_length(K, L)
    if res.nonlocal_support and local_check and not locally_finite(K, L):
        return LengthResult(FLAG_INFINITE, False, nonlocal_support=True)
    return res


def _transpose(A: Sequence[Vector], ncols: int) -> list[Vector]:
    return [tuple(A[i][k] for i in range(len(A))) for k in range(ncols)]


def cohomology_submodules(C: FreeComplex, j: int):
    """(K, L) with H^j(Hom(C, P)) = L/K inside P^{rank F_j}.

    Dualizing turns delta_i (rows of F_i) into its transpose, a map from
    F_{i-1}^* to F_i^*.
    """
    P = C.ring.poly
    r = C.rank(j)
    K = Submodule(P, r, _transpose(C.matrix(j), C.rank(j - 1)) + quotient_block(C.ring, r))
    nxt = C.matrix(j + 1)
    L = syzygies(_transpose(nxt, r), P, C.ring.quotient) if nxt else None
    return K, L


def cohomology_length(C: FreeComplex, j: int) -> LengthResult:
    """ell(Gamma_m(H^j(Hom(C, P)))), FLAG_INFINITE if not finite at the origin."""
    if C.rank(j) == 0:
        return LengthResult(0, True)
    K, L = cohomology_submodules(C, j)
    if L is not None and L.basis().is_zero():
        return LengthResult(0, True)
    res = gamma_length(K, L)
    if res.nonlocal_support and not locally_finite(K, L):
        return LengthResult(FLAG_INFINITE, False, nonlocal_support=True)
    return res
