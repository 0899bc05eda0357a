"""Ideals and submodules of free modules over P = F_p[x_1..x_v].

All computations happen over the polynomial ring with global orders.  Working
modulo a quotient ideal I_R is done by the callers, who append I_R * e_j to
every submodule.  Kernels, intersections and colons all use the same device:
tag each generator with an extra block of coordinates, compute a Groebner
basis in a position-over-term order that puts the real coordinates first, and
read off the basis elements whose real part vanished.
"""

from __future__ import annotations

import contextlib
import contextvars
import itertools
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .algebra import AlgebraError, Polynomial, PolynomialRing, prime_power_exponent
from .engine import FIELD_BITS, FMASK, Buchberger, GuardExceeded, Reducer, TermCodec, TermOrder

Vector = tuple  # tuple[Polynomial, ...]


@dataclass(frozen=True)
class Guards:
    pairs: int | None = None
    saturation: int = 64
    oracle_cells: int = 40_000_000


_GUARDS: contextvars.ContextVar[Guards] = contextvars.ContextVar("guards", default=Guards())


def current_guards() -> Guards:
    return _GUARDS.get()


@contextlib.contextmanager
def guarded(**limits):
    token = _GUARDS.set(replace(_GUARDS.get(), **limits))
    try:
        yield
    finally:
        _GUARDS.reset(token)


# -- conversion ----------------------------------------------------------------


def default_order(ring: PolynomialRing, rank: int = 1, shifts=None) -> TermOrder:
    kind = "lex" if ring.order.kind == "lex" else "grevlex"
    return TermOrder(kind=kind, shifts=tuple(shifts) if shifts else None)


def codec_for(ring: PolynomialRing, rank: int, order: TermOrder) -> TermCodec:
    return TermCodec(ring.degree_weights, rank, order)


def pack_vector(vec: Sequence[Polynomial], codec: TermCodec) -> dict[int, int]:
    out = {}
    for j, f in enumerate(vec):
        for e, c in f._terms.items():
            out[codec.pack(e, j)] = c
    return out


def sorted_terms(terms: dict[int, int]) -> list[tuple[int, int]]:
    return sorted(terms.items(), reverse=True)


def unpack_vector(poly, codec: TermCodec, ring: PolynomialRing, rank: int) -> Vector:
    comps: list[dict] = [dict() for _ in range(rank)]
    for m, c in poly:
        e, j = codec.unpack(m)
        comps[j][e] = c
    return tuple(Polynomial._raw(ring, d) for d in comps)


def as_vector(ring: PolynomialRing, v) -> Vector:
    if isinstance(v, (Polynomial, str, int)):
        return (ring(v),)
    return tuple(ring(c) for c in v)


def unit_vector(ring: PolynomialRing, rank: int, j: int) -> Vector:
    return tuple(ring.one() if k == j else ring.zero() for k in range(rank))


# -- gradings --------------------------------------------------------------------


def infer_shifts(ring: PolynomialRing, vectors: Iterable[Vector], rank: int):
    """Basis-vector degrees making every vector homogeneous, or None.

    Each component must be homogeneous and for a vector v with nonzero
    components j, k we need deg(v_j) + s_j == deg(v_k) + s_k.
    """
    parent = list(range(rank))
    offset = [0] * rank  # s_j - s_parent[j]

    def find(j):
        total = 0
        while parent[j] != j:
            total += offset[j]
            j = parent[j]
        return j, total

    for v in vectors:
        anchor = None
        for j, f in enumerate(v):
            if f.is_zero():
                continue
            if not f.is_homogeneous():
                return None
            d = f.degree()
            if anchor is None:
                anchor = (j, d)
                continue
            j0, d0 = anchor
            # s_j - s_j0 = d0 - d
            r0, o0 = find(j0)
            r1, o1 = find(j)
            if r0 == r1:
                if o1 - o0 != d0 - d:
                    return None
            else:
                parent[r1] = r0
                offset[r1] = (d0 - d) + o0 - o1
    shifts = [find(j)[1] for j in range(rank)]
    roots = [find(j)[0] for j in range(rank)]
    low: dict[int, int] = {}
    for r, s in zip(roots, shifts):
        low[r] = min(low.get(r, s), s)
    return tuple(s - low[r] for r, s in zip(roots, shifts))


# -- bases -------------------------------------------------------------------------


class GroebnerBasis:
    """Reduced Groebner basis of a submodule under a fixed term order."""

    def __init__(self, ring: PolynomialRing, rank: int, order: TermOrder, polys):
        self.ring = ring
        self.rank = rank
        self.order = order
        self.codec = codec_for(ring, rank, order)
        self.polys = polys
        self._reducer = None

    @classmethod
    def compute(cls, ring, rank, vectors: Sequence[Vector], order: TermOrder, seed=None):
        codec = codec_for(ring, rank, order)
        bb = Buchberger(codec, ring.p, current_guards().pairs)
        if seed is not None:
            bb.add(seed)
        bb.add([sorted_terms(pack_vector(v, codec)) for v in vectors])
        bb.run()
        return cls(ring, rank, order, bb.reduced_basis())

    @property
    def reducer(self) -> Reducer:
        if self._reducer is None:
            red = Reducer(self.codec, self.ring.p)
            for f in self.polys:
                red.add(f)
            self._reducer = red
        return self._reducer

    def __len__(self):
        return len(self.polys)

    def vectors(self) -> list[Vector]:
        return [unpack_vector(f, self.codec, self.ring, self.rank) for f in self.polys]

    def leads(self) -> list[tuple[tuple[int, ...], int]]:
        return [self.codec.unpack(f[0][0]) for f in self.polys]

    def key(self):
        """Order-independent canonical form, for equality of reduced bases."""
        return frozenset(tuple(f) for f in self.polys)

    def reduce_packed(self, terms: dict[int, int]) -> list[tuple[int, int]]:
        return self.reducer.reduce(dict(terms)) if terms else []

    def normal_form(self, vec) -> Vector:
        vec = as_vector(self.ring, vec) if self.rank == 1 else tuple(vec)
        out = self.reduce_packed(pack_vector(vec, self.codec))
        return unpack_vector(out, self.codec, self.ring, self.rank)

    def contains(self, vec) -> bool:
        vec = as_vector(self.ring, vec) if self.rank == 1 else tuple(vec)
        return not self.reduce_packed(pack_vector(vec, self.codec))

    def is_whole(self) -> bool:
        ones = {j for e, j in self.leads() if not any(e)}
        return len(ones) == self.rank

    def is_zero(self) -> bool:
        return not self.polys


class Submodule:
    """Submodule of P^rank given by generating vectors; Groebner bases are cached."""

    def __init__(self, ring: PolynomialRing, rank: int, generators: Iterable):
        self.ring = ring
        self.rank = rank
        gens = []
        for v in generators:
            v = as_vector(ring, v) if rank == 1 and not isinstance(v, (tuple, list)) else tuple(ring(c) for c in v)
            if len(v) != rank:
                raise AlgebraError(f"vector of length {len(v)} in rank {rank} module")
            if any(not c.is_zero() for c in v):
                gens.append(v)
        self.generators: tuple[Vector, ...] = tuple(gens)
        self._bases: dict[TermOrder, GroebnerBasis] = {}
        self._shifts = False

    def __repr__(self):
        return f"Submodule(rank={self.rank}, gens={len(self.generators)})"

    def shifts(self):
        if self._shifts is False:
            self._shifts = infer_shifts(self.ring, self.generators, self.rank)
        return self._shifts

    def is_graded(self) -> bool:
        return self.shifts() is not None

    def basis(self, order: TermOrder | None = None) -> GroebnerBasis:
        if order is None:
            order = default_order(self.ring, self.rank)
        gb = self._bases.get(order)
        if gb is None:
            gb = GroebnerBasis.compute(self.ring, self.rank, self.generators, order)
            self._bases[order] = gb
        return gb

    def contains(self, vec, order=None) -> bool:
        return self.basis(order).contains(vec)

    def contains_module(self, other: Submodule, order=None) -> bool:
        gb = self.basis(order)
        return all(gb.contains(v) for v in other.generators)

    def equals(self, other: Submodule) -> bool:
        return self.basis().key() == other.basis().key()

    def __add__(self, other: Submodule) -> Submodule:
        _check_same(self, other)
        return Submodule(self.ring, self.rank, self.generators + other.generators)

    def is_whole(self) -> bool:
        return self.basis().is_whole()

    def with_quotient(self, quotient: Sequence[Polynomial]) -> Submodule:
        """Append I_R * e_j for every position j."""
        extra = [
            tuple(g if k == j else self.ring.zero() for k in range(self.rank))
            for g in quotient
            for j in range(self.rank)
        ]
        return Submodule(self.ring, self.rank, self.generators + tuple(extra))


class Ideal(Submodule):
    def __init__(self, ring: PolynomialRing, generators: Iterable):
        super().__init__(ring, 1, [(ring(g),) for g in generators])

    @property
    def gens(self) -> list[Polynomial]:
        return [v[0] for v in self.generators]

    def __repr__(self):
        return f"Ideal({', '.join(str(g) for g in self.gens)})"

    def __add__(self, other) -> Ideal:
        if isinstance(other, Ideal):
            return Ideal(self.ring, self.gens + other.gens)
        return Ideal(self.ring, self.gens + [self.ring(g) for g in other])

    def groebner(self, order=None) -> list[Polynomial]:
        return [v[0] for v in self.basis(order).vectors()]


def _check_same(a: Submodule, b: Submodule):
    if a.ring != b.ring or a.rank != b.rank:
        raise AlgebraError("submodules live in different free modules")


# -- spec-level operations ---------------------------------------------------------


def groebner_basis(I: Submodule, order: TermOrder | None = None):
    """Reduced Groebner basis as polynomials (ideals) or vectors (modules)."""
    gb = I.basis(order)
    vecs = gb.vectors()
    return [v[0] for v in vecs] if isinstance(I, Ideal) else vecs


def normal_form(f, I: Submodule, order: TermOrder | None = None):
    nf = I.basis(order).normal_form(f)
    return nf[0] if isinstance(I, Ideal) else nf


def bracket_power(I: Ideal, q: int) -> Ideal:
    """I^[q]: the ideal generated by q-th powers of the generators."""
    prime_power_exponent(q, I.ring.p)
    return Ideal(I.ring, [g.scale_exponents(q) for g in I.gens])


def _tagged_kernel(ring, real_rank: int, rows, tag_rank: int) -> list[Vector]:
    """Tag parts of basis elements whose real part vanishes.

    ``rows`` are pairs (real_vector, tag_vector); tag_vector may be None
    for rows that only contribute to the real part.  The result generates
    {t : (0, t) in the span of rows}.
    """
    rank = real_rank + tag_rank
    zero = ring.zero()
    full = []
    for real, tag in rows:
        tag = tag if tag is not None else (zero,) * tag_rank
        full.append(tuple(real) + tuple(tag))
    shifts = infer_shifts(ring, full, rank)
    order = TermOrder(
        kind="lex" if ring.order.kind == "lex" else "grevlex",
        shifts=shifts,
        blocks=(1,) * real_rank + (0,) * tag_rank,
    )
    gb = GroebnerBasis.compute(ring, rank, full, order)
    out = []
    for f in gb.polys:
        if gb.codec.position(f[0][0]) >= real_rank:
            out.append(unpack_vector(f, gb.codec, ring, rank)[real_rank:])
    return out


def syzygies(rows: Sequence[Vector], ring: PolynomialRing, quotient: Sequence[Polynomial] = ()) -> Submodule:
    """Kernel of the row map s -> sum s_i * rows[i], computed over P / (quotient).

    Returns a submodule of P^m (m = len(rows)); it contains quotient * P^m,
    i.e. lifts of the syzygies over the quotient ring.
    """
    m = len(rows)
    if m == 0:
        return Submodule(ring, 0, [])
    r = len(rows[0])
    zero = ring.zero()
    tagged = []
    for i, row in enumerate(rows):
        tagged.append((tuple(row), unit_vector(ring, m, i)))
    for g in quotient:
        for j in range(r):
            tagged.append((tuple(g if k == j else zero for k in range(r)), None))
    if r == 0:
        return Submodule(ring, m, [unit_vector(ring, m, i) for i in range(m)])
    kern = _tagged_kernel(ring, r, tagged, m)
    return Submodule(ring, m, kern)


def intersect(a: Submodule, b: Submodule) -> Submodule:
    _check_same(a, b)
    if a.is_whole():
        return b
    if b.is_whole():
        return a
    rows = [(v, v) for v in a.generators] + [(v, None) for v in b.generators]
    return Submodule(a.ring, a.rank, _tagged_kernel(a.ring, a.rank, rows, a.rank))


def intersect_all(mods: Sequence[Submodule]) -> Submodule:
    mods = [m for m in mods if not m.is_whole()] or list(mods[:1])
    out = mods[0]
    for m in mods[1:]:
        out = intersect(out, m)
    return out


def colon_element(K: Submodule, f: Polynomial) -> Submodule:
    """(K : f) = {v : f v in K}."""
    if f.is_zero():
        raise AlgebraError("colon by the zero element")
    ring, r = K.ring, K.rank
    rows = [(tuple(f * c for c in unit_vector(ring, r, j)), unit_vector(ring, r, j)) for j in range(r)]
    rows += [(v, None) for v in K.generators]
    out = Submodule(ring, r, _tagged_kernel(ring, r, rows, r))
    return Ideal(ring, [v[0] for v in out.generators]) if isinstance(K, Ideal) else out


def colon(I: Submodule, J) -> Submodule:
    """(I : f) for a polynomial f, or (I : J) = intersection of (I : g) over generators g of J."""
    if isinstance(J, (Polynomial, str, int)):
        return colon_element(I, I.ring(J))
    gens = J.gens if isinstance(J, Ideal) else [I.ring(g) for g in J]
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        raise AlgebraError("colon by the zero ideal")
    out = intersect_all([colon_element(I, g) for g in gens])
    return Ideal(I.ring, [v[0] for v in out.generators]) if isinstance(I, Ideal) else out


def annihilator_of(S: Submodule, v: Vector) -> Ideal:
    """(S : v) = {f in P : f v in S}, an ideal."""
    ring, r = S.ring, S.rank
    rows = [(tuple(v), (ring.one(),))] + [(w, None) for w in S.generators]
    return Ideal(ring, [t[0] for t in _tagged_kernel(ring, r, rows, 1)])


def _bayer_saturate(K: Submodule, var: int) -> Submodule:
    """(K : x_var^inf) for graded K: grevlex with x_var last, strip x_var powers."""
    ring, r = K.ring, K.rank
    n = ring.nvars
    perm = tuple(i for i in range(n) if i != var) + (var,)
    order = TermOrder(kind="grevlex", perm=perm, shifts=K.shifts())
    gb = K.basis(order)
    W = gb.codec
    unit = W.units[var]
    shift_field = FIELD_BITS * var
    out = []
    for f in gb.polys:
        k = min((m >> shift_field) & FMASK for m, _ in f)
        out.append([(m - k * unit, c) for m, c in f])
    sat = Submodule(ring, r, [unpack_vector(f, W, ring, r) for f in out])
    return sat


def _elim_saturate(K: Submodule, f: Polynomial) -> Submodule:
    """(K : f^inf) via K + (1 - t f) P[t]^r, eliminating t."""
    ring, r = K.ring, K.rank
    big = PolynomialRing(ring.p, ring.variables + ("_t",), ring.degree_weights + (1,))
    n = ring.nvars

    def lift(g: Polynomial) -> Polynomial:
        return Polynomial._raw(big, {e + (0,): c for e, c in g._terms.items()})

    t = big.var(n)
    gens = [tuple(lift(c) for c in v) for v in K.generators]
    one_minus = big.one() - t * lift(f)
    for j in range(r):
        gens.append(tuple(one_minus if k == j else big.zero() for k in range(r)))
    order = TermOrder(kind="grevlex", elim=(n,))
    gb = GroebnerBasis.compute(big, r, gens, order)
    keep = []
    for vec in gb.vectors():
        if all(e[n] == 0 for c in vec for e in c._terms):
            keep.append(tuple(Polynomial._raw(ring, {e[:n]: cc for e, cc in c._terms.items()}) for c in vec))
    return Submodule(ring, r, keep)


def saturate_element(K: Submodule, f: Polynomial) -> Submodule:
    f = K.ring(f)
    if f.is_zero():
        raise AlgebraError("saturation by the zero element")
    if K.is_graded() and len(f) == 1:
        (e,) = f._terms
        # (K : (x^a y^b)^inf) = ((K : x^inf) : y^inf)
        out = K
        for i, a in enumerate(e):
            if a:
                out = _bayer_saturate(out, i)
        return out
    return _elim_saturate(K, f)


def saturate_by_maximal(K: Submodule) -> Submodule:
    """(K : m^inf) with m = (x_1..x_v) as the intersection of the (K : x_i^inf)."""
    ring = K.ring
    cached = getattr(K, "_saturated", None)
    if cached is not None:
        return cached
    if K.is_whole():
        return K
    parts = [saturate_element(K, ring.var(i)) for i in range(ring.nvars)]
    K._saturated = out = intersect_all(parts)
    return out


def saturation(I: Submodule, J) -> Submodule:
    """(I : J^inf), as the intersection of (I : g^inf) over generators g of J.

    When J is the maximal ideal at the origin this stays graded-aware.
    """
    ring = I.ring
    gens = J.gens if isinstance(J, Ideal) else [ring(g) for g in J]
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        raise AlgebraError("saturation by the zero ideal")
    out = intersect_all([saturate_element(I, g) for g in gens])
    return Ideal(ring, [v[0] for v in out.generators]) if isinstance(I, Ideal) else out


def saturation_by_iteration(I: Submodule, J, limit: int | None = None) -> Submodule:
    """(I : J^inf) by repeated colon, stopping when the basis stops changing."""
    limit = current_guards().saturation if limit is None else limit
    cur = I
    for _ in range(limit):
        nxt = colon(cur, J)
        if nxt.basis().key() == cur.basis().key():
            return nxt
        cur = nxt
    raise GuardExceeded(f"saturation did not stabilise within {limit} rounds")


def maximal_ideal(ring: PolynomialRing) -> Ideal:
    return Ideal(ring, ring.gens())


def krull_dim(I: Submodule) -> int:
    """dim P/I from the lead-term ideal: largest set of variables free of leads."""
    gb = I.basis()
    if gb.is_whole():
        raise AlgebraError("the unit ideal has no dimension")
    n = I.ring.nvars
    supports = [frozenset(i for i, a in enumerate(e) if a) for e, _ in gb.leads()]
    for size in range(n, -1, -1):
        for S in itertools.combinations(range(n), size):
            S = set(S)
            if not any(sup <= S for sup in supports):
                return size
    return 0


def standard_monomial_count(K: GroebnerBasis, limit: int | None = None) -> int | None:
    """Number of standard monomials of P^rank / K, or None when infinite."""
    return lead_difference_count(None, K, limit)


def lead_difference_count(L: GroebnerBasis | None, K: GroebnerBasis, limit: int | None = None) -> int | None:
    """|LT(L) minus LT(K)|, the dimension of L/K when K is inside L.

    Both bases must use the same order.  Returns None if the difference is
    infinite.  With L None the whole free module is used.
    """
    codec = K.codec
    n = codec.nvars
    if L is None:
        starts = [codec.pos_units[j] for j in range(K.rank)]
    else:
        if L.order != K.order:
            raise AlgebraError("bases computed in different orders")
        starts = [f[0][0] for f in L.polys]
    kleads: dict[int, list[int]] = {}
    for f in K.polys:
        kleads.setdefault(codec.pos_key(f[0][0]), []).append(f[0][0])
    # finiteness: every generator ray l * x_i^a must enter LT(K)
    for s in starts:
        es = codec.exps(s)
        cands = kleads.get(codec.pos_key(s), [])
        cexps = [codec.exps(k) for k in cands]
        for i in range(n):
            if not any(all(ke[t] <= es[t] for t in range(n) if t != i) for ke in cexps):
                return None
    red = K.reducer
    seen = set()
    frontier = [s for s in starts if red.find(s) < 0]
    seen.update(frontier)
    units = codec.units
    while frontier:
        nxt = []
        for m in frontier:
            for u in units:
                mu = m + u
                if mu not in seen and red.find(mu) < 0:
                    seen.add(mu)
                    nxt.append(mu)
        frontier = nxt
        if limit is not None and len(seen) > limit:
            raise GuardExceeded("standard monomial enumeration too large")
    return len(seen)
