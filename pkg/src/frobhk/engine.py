"""Buchberger kernel on packed terms.

A term ``m * e_j`` is encoded as one Python int.  Every field of the encoding
is a linear function of the exponent vector (plus a per-position constant),
so multiplying by a monomial is integer addition and comparing terms in the
active order is integer comparison.  Layout, least significant first::

    [exp_0] ... [exp_{n-1}] [degree] [position] [order fields ...] [block] [elim]

Exponent fields carry a guard bit, which makes divisibility a single
subtract-and-mask.  Polynomials inside the engine are lists of ``(term, coeff)``
pairs sorted in decreasing order, always monic.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Sequence

FIELD_BITS = 24
FMASK = (1 << FIELD_BITS) - 1
MAX_EXP = (1 << (FIELD_BITS - 1)) - 1


class GuardExceeded(RuntimeError):
    """A configurable work bound was hit (pairs, saturation rounds, memory)."""


@dataclass(frozen=True)
class TermOrder:
    """Module term order description (hashable, used as a cache key).

    kind: ``grevlex`` (weighted by the ring grading) or ``lex``.
    perm: variable ranking, most significant first; the last entry is the
        variable that grevlex treats as smallest.
    shifts: degree of each free-module basis vector.
    blocks: per-position block id; higher blocks dominate all lower ones.
        All-equal blocks give term-over-position, distinct blocks give
        position-over-term.
    elim: variables whose total degree is compared before anything else.
    """

    kind: str = "grevlex"
    perm: tuple[int, ...] | None = None
    shifts: tuple[int, ...] | None = None
    blocks: tuple[int, ...] | None = None
    elim: tuple[int, ...] = ()


class TermCodec:
    def __init__(self, weights: Sequence[int], rank: int, order: TermOrder):
        n = len(weights)
        self.nvars = n
        self.rank = rank
        self.weights = tuple(weights)
        self.order = order
        perm = order.perm if order.perm is not None else tuple(range(n))
        if sorted(perm) != list(range(n)):
            raise ValueError("bad variable permutation")
        shifts = order.shifts or (0,) * rank
        blocks = order.blocks or (0,) * rank
        if len(shifts) != rank or len(blocks) != rank:
            raise ValueError("shifts/blocks must have one entry per position")
        if min(shifts) < 0:
            raise ValueError("shifts must be non-negative")

        W = FIELD_BITS
        self.deg_off = n * W
        self.pos_off = (n + 1) * W
        main_off = (n + 2) * W
        nmain = n
        self.block_off = main_off + nmain * W
        self.elim_off = self.block_off + W
        self.guard = sum(1 << (i * W + W - 1) for i in range(n))
        self.exp_mask = (1 << (n * W)) - 1

        # main fields, listed most significant first
        graded = order.kind == "grevlex"
        fields: list[list[int]] = []
        if graded:
            fields.append(list(self.weights))
            for k in range(1, n):
                coeff = [0] * n
                for t in range(n - k):
                    coeff[perm[t]] = 1
                fields.append(coeff)
        elif order.kind == "lex":
            for k in range(n):
                coeff = [0] * n
                coeff[perm[k]] = 1
                fields.append(coeff)
        else:
            raise ValueError(f"unknown order kind {order.kind!r}")
        offs = [main_off + (nmain - 1 - k) * W for k in range(nmain)]
        self._first_main_off = offs[0]

        units = []
        for i in range(n):
            u = 1 << (i * W)
            u += self.weights[i] << self.deg_off
            for coeff, off in zip(fields, offs):
                if coeff[i]:
                    u += coeff[i] << off
            if i in order.elim:
                u += 1 << self.elim_off
            units.append(u)
        self.units = units
        pos_units = []
        for j in range(rank):
            u = (rank - 1 - j) << self.pos_off
            u += blocks[j] << self.block_off
            u += shifts[j] << self.deg_off
            if graded:
                u += shifts[j] << self._first_main_off
            pos_units.append(u)
        self.pos_units = pos_units

    def pack(self, exps: Sequence[int], pos: int = 0) -> int:
        m = self.pos_units[pos]
        for e, u in zip(exps, self.units):
            if e:
                if e > MAX_EXP:
                    raise OverflowError("exponent too large for packed terms")
                m += e * u
        return m

    def pack_monomial(self, exps: Sequence[int]) -> int:
        m = 0
        for e, u in zip(exps, self.units):
            if e:
                m += e * u
        return m

    def exps(self, m: int) -> tuple[int, ...]:
        W = FIELD_BITS
        return tuple((m >> (i * W)) & FMASK for i in range(self.nvars))

    def position(self, m: int) -> int:
        return self.rank - 1 - ((m >> self.pos_off) & FMASK)

    def pos_key(self, m: int) -> int:
        return (m >> self.pos_off) & FMASK

    def degree(self, m: int) -> int:
        return (m >> self.deg_off) & FMASK

    def unpack(self, m: int) -> tuple[tuple[int, ...], int]:
        return self.exps(m), self.position(m)

    def divides(self, a: int, b: int) -> bool:
        """Exponent-wise divisibility (positions must be compared separately)."""
        G = self.guard
        return ((b | G) - a) & G == G

    def lcm(self, a: int, b: int) -> int:
        ea, eb = self.exps(a), self.exps(b)
        return self.pack(tuple(max(x, y) for x, y in zip(ea, eb)), self.position(a))

    def coprime(self, a: int, b: int) -> bool:
        return all(not (x and y) for x, y in zip(self.exps(a), self.exps(b)))


class Reducer:
    """Set of monic reducers grouped by position, with a divisor cache."""

    def __init__(self, codec: TermCodec, p: int):
        self.codec = codec
        self.p = p
        self.leads: list[int] = []
        self.tails: list[list[tuple[int, int]]] = []
        self.by_pos: dict[int, list[tuple[int, int]]] = {}
        self._cache: dict[int, tuple[int, int]] = {}

    def add(self, poly: list[tuple[int, int]]) -> int:
        idx = len(self.leads)
        lead = poly[0][0]
        self.leads.append(lead)
        self.tails.append(poly[1:])
        self.by_pos.setdefault(self.codec.pos_key(lead), []).append((lead, idx))
        return idx

    def find(self, m: int) -> int:
        lst = self.by_pos.get((m >> self.codec.pos_off) & FMASK)
        if lst is None:
            return -1
        hit = self._cache.get(m)
        start = 0
        if hit is not None:
            if hit[0] >= 0:
                return hit[0]
            start = hit[1]
            if start == len(lst):
                return -1
        G = self.codec.guard
        mg = m | G
        for k in range(start, len(lst)):
            lead, idx = lst[k]
            if (mg - lead) & G == G:
                self._cache[m] = (idx, 0)
                return idx
        self._cache[m] = (-1, len(lst))
        return -1

    def reduce(self, f: dict[int, int]) -> list[tuple[int, int]]:
        """Full normal form of ``f`` (consumed); returns terms in decreasing order."""
        if self.p == 2:
            return self._reduce2(set(f))
        p = self.p
        heap = [-m for m in f]
        heapq.heapify(heap)
        out = []
        find, leads, tails = self.find, self.leads, self.tails
        pop, push = heapq.heappop, heapq.heappush
        while heap:
            m = -pop(heap)
            c = f.pop(m, 0)
            if not c:
                continue
            idx = find(m)
            if idx < 0:
                out.append((m, c))
                continue
            d = m - leads[idx]
            for gm, gc in tails[idx]:
                nm = gm + d
                old = f.get(nm)
                if old is None:
                    f[nm] = (-c * gc) % p
                    push(heap, -nm)
                else:
                    v = (old - c * gc) % p
                    if v:
                        f[nm] = v
                    else:
                        del f[nm]
        return out

    def _reduce2(self, f: set[int]) -> list[tuple[int, int]]:
        heap = [-m for m in f]
        heapq.heapify(heap)
        out = []
        find, leads, tails = self.find, self.leads, self.tails
        pop, push = heapq.heappop, heapq.heappush
        while heap:
            m = -pop(heap)
            if m not in f:
                continue
            f.discard(m)
            idx = find(m)
            if idx < 0:
                out.append((m, 1))
                continue
            d = m - leads[idx]
            for gm, _ in tails[idx]:
                nm = gm + d
                if nm in f:
                    f.discard(nm)
                else:
                    f.add(nm)
                    push(heap, -nm)
        return out


def make_monic(poly: list[tuple[int, int]], p: int) -> list[tuple[int, int]]:
    c = poly[0][1]
    if c == 1:
        return poly
    inv = pow(c, -1, p)
    return [(m, v * inv % p) for m, v in poly]


class Buchberger:
    """Incremental Buchberger with Gebauer-Moeller pair pruning and sugar selection.

    ``add`` may be called repeatedly; after ``run`` the active elements form a
    Groebner basis of everything added so far.
    """

    def __init__(self, codec: TermCodec, p: int, max_pairs: int | None = None):
        self.codec = codec
        self.p = p
        self.max_pairs = max_pairs
        self.red = Reducer(codec, p)
        self.polys: list[list[tuple[int, int]]] = []
        self.sugar: list[int] = []
        self.active: list[bool] = []
        self.pairs: dict[tuple[int, int], int] = {}
        self.queue: list[tuple] = []
        self.pending: list[list[tuple[int, int]]] = []
        self.processed = 0
        self._product = codec.rank == 1

    # -- public
    def add(self, polys: Sequence[list[tuple[int, int]]]):
        for poly in polys:
            if poly:
                k = len(self.pending)
                self.pending.append(poly)
                sug = max(self.codec.degree(m) for m, _ in poly)
                heapq.heappush(self.queue, (sug, poly[0][0], 0, k, -1))

    def run(self):
        _codec, p = self.codec, self.p
        while self.queue:
            sug, lcm, kind, i, j = heapq.heappop(self.queue)
            if kind == 0:
                f = {}
                for m, c in self.pending[i]:
                    f[m] = c
                self.pending[i] = None
            else:
                if self.pairs.pop((i, j), None) is None:
                    continue
                self.processed += 1
                if self.max_pairs is not None and self.processed > self.max_pairs:
                    raise GuardExceeded(f"Buchberger pair guard ({self.max_pairs}) exceeded")
                f = self._spoly(i, j, lcm)
            if not f:
                continue
            h = self.red.reduce(f)
            if h:
                self._insert(make_monic(h, p), sug)
        return self

    def basis_indices(self) -> list[int]:
        return [k for k, a in enumerate(self.active) if a]

    def reduced_basis(self) -> list[list[tuple[int, int]]]:
        """Reduced GB: minimal leads, monic, tails fully reduced; sorted by lead."""
        keep = sorted(self.basis_indices(), key=lambda k: self.polys[k][0][0])
        red = Reducer(self.codec, self.p)
        for k in keep:
            red.add(self.polys[k])
        out = []
        for k in keep:
            poly = self.polys[k]
            f = dict(poly[1:])
            tail = red.reduce(f) if f else []
            out.append([poly[0]] + tail)
        return out

    # -- internals
    def _spoly(self, i: int, j: int, lcm: int):
        p = self.p
        pi, pj = self.polys[i], self.polys[j]
        di = lcm - pi[0][0]
        dj = lcm - pj[0][0]
        if p == 2:
            f = {m + di: 1 for m, _ in pi[1:]}
            for m, _ in pj[1:]:
                nm = m + dj
                if nm in f:
                    del f[nm]
                else:
                    f[nm] = 1
            return f
        f = {m + di: c for m, c in pi[1:]}
        for m, c in pj[1:]:
            nm = m + dj
            v = (f.get(nm, 0) - c) % p
            if v:
                f[nm] = v
            else:
                f.pop(nm, None)
        return f

    def _insert(self, h: list[tuple[int, int]], sug: int):
        codec = self.codec
        divides = codec.divides
        k = len(self.polys)
        lead = h[0][0]
        pos = codec.pos_key(lead)
        self.polys.append(h)
        self.sugar.append(sug)
        self.active.append(True)
        self.red.add(h)
        deg_h = codec.degree(lead)

        lcms: dict[int, int] = {}
        groups: dict[int, list[int]] = {}
        for i in range(k):
            if not self.active[i]:
                continue
            li = self.polys[i][0][0]
            if codec.pos_key(li) != pos:
                continue
            L = codec.lcm(li, lead)
            lcms[i] = L
            groups.setdefault(L, []).append(i)

        # chain criterion on old pairs
        if self.pairs:
            dead = []
            polys = self.polys
            for (i, j), L in self.pairs.items():
                if codec.pos_key(L) == pos and divides(lead, L):
                    li = lcms.get(i)
                    if li is None:
                        li = lcms[i] = codec.lcm(polys[i][0][0], lead)
                    if li == L:
                        continue
                    lj = lcms.get(j)
                    if lj is None:
                        lj = lcms[j] = codec.lcm(polys[j][0][0], lead)
                    if lj != L:
                        dead.append((i, j))
            for key in dead:
                del self.pairs[key]

        # new pairs: criterion M, then F and B
        kept: list[int] = []
        for L in sorted(groups):
            if any(divides(K, L) for K in kept):
                continue
            kept.append(L)
            members = groups[L]
            if self._product and any(
                L == self.polys[i][0][0] + lead - self._pos_unit(i) for i in members
            ):
                continue
            i = members[0]
            d = codec.degree(L)
            s = max(self.sugar[i] + d - codec.degree(self.polys[i][0][0]), sug + d - deg_h)
            self.pairs[(i, k)] = L
            heapq.heappush(self.queue, (s, L, 1, i, k))

        for i in range(k):
            if self.active[i]:
                li = self.polys[i][0][0]
                if codec.pos_key(li) == pos and divides(lead, li):
                    self.active[i] = False

    def _pos_unit(self, i: int) -> int:
        # leads coprime iff lead_i + lead_h - pos_unit == lcm in packed form
        return self.codec.pos_units[self.codec.position(self.polys[i][0][0])]


def groebner(
    polys: Sequence[list[tuple[int, int]]],
    codec: TermCodec,
    p: int,
    max_pairs: int | None = None,
) -> list[list[tuple[int, int]]]:
    bb = Buchberger(codec, p, max_pairs)
    bb.add([make_monic(f, p) for f in polys if f])
    bb.run()
    return bb.reduced_basis()
