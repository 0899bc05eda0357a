"""Brute-force m-torsion lengths by dense linear algebra over F_p.

No Groebner bases are used.  For relations g_1..g_m in P^r and bounds D, s
we form W_t = span{mono * g : deg <= t} inside the truncated free module and
count

    dim {f in P^r_{<=D} : x_i^s f in W_{D+s*w_max} for all i}  -  dim W_D.

For D and s large this is ell(Gamma_m(P^r / K)); the reading is called
stable once it repeats at (D+1, s+1).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import Polynomial
from .engine import GuardExceeded
from .groebner import current_guards


@dataclass(frozen=True)
class OracleReading:
    value: int
    stable: bool
    degree: int
    power: int


def _monomials_upto(weights: Sequence[int], D: int) -> list[tuple[int, ...]]:
    len(weights)
    out = []
    for e in itertools.product(*(range(D // w + 1) for w in weights)):
        if sum(a * w for a, w in zip(e, weights)) <= D:
            out.append(e)
    out.sort(key=lambda e: (sum(a * w for a, w in zip(e, weights)), e))
    return out


def _deg(e, weights) -> int:
    return sum(a * w for a, w in zip(e, weights))


def rank_mod_p(A: np.ndarray, p: int) -> int:
    return len(row_reduce(A, p)[1])


def row_reduce(A: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form mod p; returns (rows, pivot columns)."""
    A = np.array(A, dtype=np.int64) % p
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            A[[r, k]] = A[[k, r]]
        A[r] = A[r] * pow(int(A[r, c]), p - 2, p) % p
        col = A[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            A[hit] = (A[hit] - np.outer(col[hit], A[r])) % p
        pivots.append(c)
        r += 1
    return A[:r], pivots


class _Space:
    """Truncated free module P^r_{<=t} with a column index per (monomial, position)."""

    def __init__(self, weights, rank: int, t: int):
        self.weights = tuple(weights)
        self.rank = rank
        self.t = t
        self.monos = _monomials_upto(self.weights, t)
        self.index = {(e, j): k for k, (e, j) in enumerate((e, j) for j in range(rank) for e in self.monos)}

    def __len__(self):
        return len(self.index)


def _products(rels, weights, space: _Space, p: int, t: int) -> np.ndarray:
    """Rows mono * g for every relation g with total degree <= t."""
    rows = []
    for g in rels:
        terms = [(e, j, c) for j, f in enumerate(g) for e, c in f.terms.items()]
        if not terms:
            continue
        dg = max(_deg(e, weights) for e, _, _ in terms)
        for mono in space.monos:
            if _deg(mono, weights) + dg > t:
                continue
            row = np.zeros(len(space), dtype=np.int64)
            for e, j, c in terms:
                key = (tuple(a + b for a, b in zip(e, mono)), j)
                row[space.index[key]] = (row[space.index[key]] + c) % p
            rows.append(row)
    if not rows:
        return np.zeros((0, len(space)), dtype=np.int64)
    return np.array(rows)


def _check_cells(cells: int):
    cap = current_guards().oracle_cells
    if cells > cap:
        raise GuardExceeded(f"oracle matrix with {cells} cells exceeds the limit {cap}")


def truncated_torsion(rels: Sequence[Sequence[Polynomial]], rank: int, p: int, weights, D: int, s: int) -> int:
    """One reading of the truncated count for bounds (D, s)."""
    weights = tuple(weights)
    top = D + s * max(weights)
    big = _Space(weights, rank, top)
    _check_cells(len(rels) * len(big.monos) * len(big))
    W = _products(rels, weights, big, p, top)
    _check_cells(W.size)
    red, piv = row_reduce(W, p) if W.shape[0] else (W, [])
    piv_set = set(piv)
    free_cols = [c for c in range(len(big)) if c not in piv_set]
    free_pos = {c: k for k, c in enumerate(free_cols)}
    piv_row = {c: i for i, c in enumerate(piv)}
    nfree = len(free_cols)

    def normal_form(col: int) -> np.ndarray:
        out = np.zeros(nfree, dtype=np.int64)
        if col in free_pos:
            out[free_pos[col]] = 1
        else:
            out = (-red[piv_row[col], free_cols]) % p
        return out

    small = _Space(weights, rank, D)
    nvars = len(weights)
    blocks = []
    for (e, j) in ((e, j) for j in range(rank) for e in small.monos):
        parts = []
        for i in range(nvars):
            shifted = tuple(a + (s if k == i else 0) for k, a in enumerate(e))
            parts.append(normal_form(big.index[(shifted, j)]))
        blocks.append(np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64))
    phi = np.array(blocks, dtype=np.int64)  # one row per f-basis element
    _check_cells(phi.size)
    kernel_dim = len(small) - (rank_mod_p(phi, p) if phi.size else 0)
    WD = _products(rels, weights, small, p, D)
    wd = rank_mod_p(WD, p) if WD.shape[0] else 0
    return kernel_dim - wd


def oracle_gamma_m_length(
    rels: Sequence[Sequence[Polynomial]],
    rank: int,
    p: int,
    weights,
    D: int | None = None,
    s: int | None = None,
    max_degree: int = 40,
) -> OracleReading:
    """ell(Gamma_m(P^r / K)) with K spanned by ``rels``.

    With D given a single pair of readings at (D, s) and (D+1, s+1) is made.
    Otherwise D starts at the largest relation degree and grows until two
    consecutive steps agree.
    """
    weights = tuple(weights)
    rels = [tuple(g) for g in rels]
    if D is not None:
        s = D if s is None else s
        a = truncated_torsion(rels, rank, p, weights, D, s)
        b = truncated_torsion(rels, rank, p, weights, D + 1, s + 1)
        return OracleReading(a, a == b, D, s)
    start = max(
        (max(_deg(e, weights) for f in g for e in f.terms) for g in rels if any(f.terms for f in g)),
        default=1,
    )
    prev = None
    streak = 0
    for d in range(max(start, 1), max_degree + 1):
        val = truncated_torsion(rels, rank, p, weights, d, d)
        if val == prev:
            streak += 1
            if streak >= 2:
                return OracleReading(val, True, d - 1, d - 1)
        else:
            streak = 0
        prev = val
    raise GuardExceeded(f"oracle did not stabilise up to degree {max_degree}")


def oracle_for_module(M, D: int | None = None, s: int | None = None, **kw) -> OracleReading:
    """Oracle reading for a PresentedModule (rows plus quotient block)."""
    rels = list(M.relations.generators)
    P = M.ring.poly
    return oracle_gamma_m_length(rels, M.rank, P.p, P.degree_weights, D, s, **kw)
