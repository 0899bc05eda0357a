"""Exact fitting of sampled sequences v(n) against quasi-polynomials in q = p^n.

A model of degree d and period s assigns to each residue class of n mod s a
polynomial sum_j c_j q^j with rational c_j.  Coefficients are solved from the
first d+1 samples of each class; the remaining samples are held out and
checked exactly.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import sympy as sp
from sympy.parsing.sympy_parser import (
    convert_xor,
    implicit_multiplication,
    parse_expr,
    standard_transformations,
)

Q_SYM, N_SYM = sp.symbols("q n")


class FitError(ValueError):
    pass


@dataclass
class SampleSeries:
    samples: list[tuple[int, int, int]]
    dim: int
    p: int
    label: str = ""

    def __post_init__(self):
        seen: dict[int, tuple[int, int]] = {}
        for n, q, v in self.samples:
            if n in seen and seen[n] != (q, v):
                raise FitError(f"inconsistent samples at n={n}")
            if self.p and q != self.p**n:
                raise FitError(f"q={q} is not {self.p}^{n}")
            if v is None or v < 0:
                raise FitError(f"value at n={n} is not a non-negative integer")
            seen[n] = (q, v)
        self.samples = sorted((n, q, v) for n, (q, v) in seen.items())

    def __len__(self):
        return len(self.samples)


@dataclass
class RatioReport:
    ratios: list[Fraction]
    differences: list[Fraction]
    trend: str


def leading_ratio(series: SampleSeries) -> RatioReport:
    """v / q^d per sample, first differences, and a coarse trend label."""
    if not series.samples:
        raise FitError("empty series")
    ratios = [Fraction(v, q**series.dim) for _, q, v in series.samples]
    diffs = [b - a for a, b in zip(ratios, ratios[1:])]
    if all(d == 0 for d in diffs):
        trend = "constant"
    elif all(d >= 0 for d in diffs):
        trend = "increasing"
    elif all(d <= 0 for d in diffs):
        trend = "decreasing"
    else:
        trend = "oscillating"
    return RatioReport(ratios, diffs, trend)


@dataclass
class FitReport:
    kind: str
    degree: int
    period: int
    coefficients: dict[int, list[Fraction]] = field(default_factory=dict)
    fitted: list[tuple[int, int, int]] = field(default_factory=list)
    holdout: list[tuple[int, int, int, Fraction, bool]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.kind != "leading-ratio-only" and bool(self.holdout) and all(h[4] for h in self.holdout)

    def evaluate(self, n: int, q: int) -> Fraction:
        cs = self.coefficients[n % self.period]
        return sum((c * q**j for j, c in enumerate(cs)), Fraction(0))

    def leading_coefficient(self, d: int) -> Fraction | None:
        """Coefficient of q^d, when it is the same in every residue class."""
        vals = {cs[d] if d < len(cs) else Fraction(0) for cs in self.coefficients.values()}
        return vals.pop() if len(vals) == 1 else None

    def expression(self, residue: int = 0) -> sp.Expr:
        cs = self.coefficients[residue]
        return sp.nsimplify(sum(sp.Rational(c.numerator, c.denominator) * Q_SYM**j for j, c in enumerate(cs)))

    def formula(self) -> str:
        """Closed form over a common denominator, e.g. (4*q**2 - 4)/3."""
        if self.kind == "leading-ratio-only":
            return "no fit"
        if self.period == 1:
            return _pretty(self.expression(0))
        parts = [f"n%{self.period}=={r}: {_pretty(self.expression(r))}" for r in sorted(self.coefficients)]
        return "; ".join(parts)


def _pretty(e: sp.Expr) -> str:
    return str(sp.together(sp.expand(e)))


def _solve_class(rows: Sequence[tuple[int, int, int]], degree: int) -> list[Fraction]:
    """Exact Gauss-Jordan on the Vandermonde system sum_j c_j q^j = v."""
    A = [[Fraction(q) ** j for j in range(degree + 1)] + [Fraction(v)] for _, q, v in rows]
    m = degree + 1
    for col in range(m):
        piv = next((r for r in range(col, len(A)) if A[r][col] != 0), None)
        if piv is None:
            raise FitError("singular system: repeated q values")
        A[col], A[piv] = A[piv], A[col]
        inv = 1 / A[col][col]
        A[col] = [x * inv for x in A[col]]
        for r in range(len(A)):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
    return [A[j][m] for j in range(m)]


def _try_model(series: SampleSeries, degree: int, period: int) -> FitReport | None:
    classes: dict[int, list[tuple[int, int, int]]] = {}
    for smp in series.samples:
        classes.setdefault(smp[0] % period, []).append(smp)
    if len(classes) < period or any(len(c) < degree + 1 for c in classes.values()):
        return None
    report = FitReport("polynomial-in-q" if period == 1 else "q-polynomial-plus-periodic", degree, period)
    extra = []
    for r, rows in sorted(classes.items()):
        report.coefficients[r] = _solve_class(rows[: degree + 1], degree)
        report.fitted.extend(rows[: degree + 1])
        extra.extend(rows[degree + 1 :])
    if not extra:
        return None
    for n, q, v in sorted(extra):
        pred = report.evaluate(n, q)
        report.holdout.append((n, q, v, pred, pred == v))
    return report


def fit_quasi_polynomial(
    series: SampleSeries,
    degree: int | None = None,
    period: int | None = None,
    periods: Iterable[int] = (1, 2, 3),
) -> FitReport:
    """Smallest-period exact model that reproduces the holdout samples.

    Degrees ``degree`` and ``degree - 1`` are tried in turn.  Returns a
    report of kind "leading-ratio-only" when nothing fits; raises FitError
    when no candidate has enough samples.
    """
    degree = series.dim if degree is None else degree
    candidates = [period] if period is not None else list(periods)
    degrees = [d for d in (degree, degree - 1) if d >= 0]
    tried = False
    for s in candidates:
        for d in degrees:
            rep = _try_model(series, d, s)
            if rep is None:
                continue
            tried = True
            if rep.ok:
                return rep
    if not tried:
        raise FitError("not enough samples for any candidate model")
    return FitReport("leading-ratio-only", degree, 0)


# -- closed forms ----------------------------------------------------------------------


_TRANSFORMS = standard_transformations + (convert_xor, implicit_multiplication)


def parse_closed_form(text: str):
    """Parse "EXPR" or "even: EXPR; odd: EXPR" or "n%3==1: EXPR; ...".

    Returns a list of (period, residue, sympy expression); period 1 means
    the expression applies to every n.
    """
    cases = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            label, expr = part.split(":", 1)
            label = label.strip().replace(" ", "")
            if label == "even":
                s, r = 2, 0
            elif label == "odd":
                s, r = 2, 1
            elif label.startswith("n%") and "==" in label:
                s, r = (int(t) for t in label[2:].split("=="))
            else:
                raise ValueError(f"unknown case label {label!r}")
        else:
            s, r, expr = 1, 0, part
        try:
            e = parse_expr(expr.strip(), local_dict={"q": Q_SYM, "n": N_SYM}, transformations=_TRANSFORMS)
        except (SyntaxError, TypeError, sp.SympifyError) as exc:
            raise ValueError(f"cannot parse {expr.strip()!r}") from exc
        if e.free_symbols - {Q_SYM, N_SYM}:
            raise ValueError(f"unknown symbols in {expr.strip()!r}")
        cases.append((s, r % s, e))
    if not cases:
        raise ValueError("empty expression")
    return cases


def evaluate_closed_form(cases, n: int, q: int) -> Fraction:
    for s, r, e in cases:
        if n % s == r:
            val = sp.nsimplify(e.subs({Q_SYM: q, N_SYM: n}))
            if not val.is_Rational:
                raise ValueError(f"expression is not rational at n={n}")
            return Fraction(int(val.p), int(val.q))
    raise ValueError(f"no case covers n={n}")


def verify_closed_form(series: SampleSeries, text: str) -> list[tuple[int, int, int, Fraction, bool]]:
    """Exact comparison of each sample with the closed form."""
    cases = parse_closed_form(text)
    out = []
    for n, q, v in series.samples:
        expected = evaluate_closed_form(cases, n, q)
        out.append((n, q, v, expected, expected == v))
    return out


# -- CSV ----------------------------------------------------------------------------------


def read_series_csv(text: str, dim: int, p: int | None = None) -> dict[str, SampleSeries]:
    """Series keyed by label.

    Accepts either plain n,q,value columns or the result table written by
    the runner, in which case rows are grouped by (task, module, kind).
    """
    reader = csv.DictReader(io.StringIO(text))
    fields = reader.fieldnames or []
    if not {"n", "q", "value"} <= set(fields):
        raise FitError("CSV needs columns n, q, value")
    groups: dict[str, list[tuple[int, int, int]]] = {}
    for row in reader:
        if row.get("finite", "true").strip().lower() in ("false", "0", "no"):
            continue
        label = ":".join(row[k] for k in ("task", "module", "kind") if k in row)
        if not row["value"].strip():
            continue
        groups.setdefault(label, []).append((int(row["n"]), int(row["q"]), int(row["value"])))
    out = {}
    for label, rows in groups.items():
        base = p
        if base is None:
            n, q, _ = min(rows)
            base = _root(q, n)
        out[label] = SampleSeries(rows, dim, base, label)
    return out


def _root(q: int, n: int) -> int:
    if n == 0:
        return 0  # unknown; disables the q = p^n check
    r = round(q ** (1.0 / n))
    for c in (r - 1, r, r + 1):
        if c > 1 and c**n == q:
            return c
    raise FitError(f"q={q} is not an n-th power")


def write_series_csv(series: SampleSeries) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "q", "value"])
    for row in series.samples:
        w.writerow(row)
    return buf.getvalue()
