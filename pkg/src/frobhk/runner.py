"""Execute problem documents and render their results."""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from . import __version__
from .algebra import AlgebraError, MonomialOrder, prime_power_exponent
from .engine import GuardExceeded
from .fit import FitError, SampleSeries, fit_quasi_polynomial, leading_ratio, verify_closed_form
from .groebner import Guards, guarded
from .invariants import (
    fhk,
    frobenius_module,
    ideal_module,
    local_cohomology_length,
    refl_pair,
    set_resolution_cache,
    syzygy_module,
    theta,
    tor_frobenius_length,
)
from .modules import PresentedModule, QuotientRing
from .oracle import oracle_for_module
from .problem import ModuleSpec, ProblemDocument, TaskSpec

CSV_HEADER = ("task", "module", "kind", "n", "q", "value", "finite")


@dataclass
class ResultRow:
    task: str
    module: str
    kind: str
    n: int | None
    q: int
    value: int | None
    finite: bool
    error: str | None = None
    seconds: float = 0.0


@dataclass
class FitSummary:
    task: str
    module: str
    kind: str
    model: str
    degree: int | None = None
    period: int | None = None
    formula: str = ""
    holdout_ok: bool | None = None
    limit: Fraction | None = None
    ratios: list[Fraction] = field(default_factory=list)
    trend: str = ""
    expect: str | None = None
    expect_ok: list[bool] | None = None


@dataclass
class OracleCheck:
    task: str
    module: str
    n: int | None
    q: int
    groebner: int
    oracle: int
    stable: bool

    @property
    def agree(self) -> bool:
        return self.stable and self.groebner == self.oracle


@dataclass
class ResultTable:
    meta: dict
    rows: list[ResultRow] = field(default_factory=list)
    fits: list[FitSummary] = field(default_factory=list)
    checks: list[OracleCheck] = field(default_factory=list)

    @property
    def guard_tripped(self) -> bool:
        return any(r.error and r.error.startswith("guard") for r in self.rows)

    @property
    def input_error(self) -> bool:
        return any(r.error and r.error.startswith("error") for r in self.rows)

    @property
    def oracle_mismatch(self) -> bool:
        return any(not c.agree for c in self.checks)

    def exit_code(self) -> int:
        if self.input_error:
            return 1
        if self.guard_tripped or self.oracle_mismatch:
            return 2
        return 0


# -- building objects --------------------------------------------------------------------


def build_ring(doc: ProblemDocument) -> QuotientRing:
    spec = doc.ring
    weights = tuple(spec.weights) if spec.weights else None
    order = MonomialOrder(spec.order, weights) if spec.order != "grevlex" or weights else None
    return QuotientRing.build(spec.p, spec.vars, spec.quotient, weights=weights, order=order)


class Workspace:
    """Ring and modules of a document, each built once."""

    def __init__(self, doc: ProblemDocument):
        self.doc = doc
        self.ring = build_ring(doc)
        self._modules: dict[str, PresentedModule] = {}

    def module(self, name: str) -> PresentedModule:
        if name not in self._modules:
            self._modules[name] = self._build(self.doc.modules[name])
        return self._modules[name]

    def _build(self, spec: ModuleSpec) -> PresentedModule:
        R = self.ring
        if spec.kind == "ideal":
            return PresentedModule.cyclic(R, spec.data)
        if spec.kind == "matrix":
            rank = len(spec.data[0]) if spec.data else 1
            return PresentedModule(R, rank, spec.data)
        if spec.kind == "ideal_module":
            return ideal_module(R, spec.data)
        if spec.kind == "free":
            return PresentedModule.free(R, spec.data)
        return syzygy_module(self.module(spec.data), spec.depth)


def _exponent(q: int, p: int) -> int | None:
    try:
        return prime_power_exponent(q, p)
    except AlgebraError:
        return None


# -- tasks ----------------------------------------------------------------------------------


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def _series_rows(task: TaskSpec, ws: Workspace):
    """Yield rows for one task; exceptions are turned into error rows by the caller."""
    R = ws.ring
    p = R.p
    if task.kind == "refl_pair":
        label = f"({task.a}):({task.b})"
        for q in task.q:
            (h2, h0), dt = _timed(lambda: refl_pair(R, task.a, task.b, q))
            n = _exponent(q, p)
            yield ResultRow(task.id, label, "refl_h2", n, q, h2, True, seconds=dt)
            yield ResultRow(task.id, label, "refl_h0", n, q, h0, True, seconds=dt)
        return
    M = ws.module(task.module)
    for n in task.n:
        q = p**n
        if task.kind in ("fhk", "hk"):
            val, dt = _timed(lambda: fhk(M, n))
            yield ResultRow(task.id, task.module, "fhk", n, q, val, True, seconds=dt)
        elif task.kind == "tor":
            res, dt = _timed(lambda: tor_frobenius_length(M, task.i, n))
            yield ResultRow(task.id, task.module, f"tor_{task.i}", n, q, res.value, res.finite, seconds=dt)
        elif task.kind == "lc":
            res, dt = _timed(lambda: local_cohomology_length(M, task.k, n))
            yield ResultRow(task.id, task.module, f"lc_{task.k}", n, q, res.value, res.finite, seconds=dt)
        elif task.kind == "theta":
            th, dt = _timed(lambda: theta(M, n))
            yield ResultRow(task.id, task.module, "theta", n, q, th.theta, True, seconds=dt)


def _fit_summary(task: TaskSpec, rows: list[ResultRow], ws: Workspace) -> list[FitSummary]:
    want_fit = task.fit or task.kind == "hk"
    if not (want_fit or task.expect):
        return []
    out = []
    kinds = sorted({r.kind for r in rows}, key=[r.kind for r in rows].index)
    d = ws.ring.dim()
    for kind in kinds:
        good = [r for r in rows if r.kind == kind and r.finite and r.error is None and r.n is not None]
        if not good:
            continue
        series = SampleSeries([(r.n, r.q, r.value) for r in good], d, ws.ring.p)
        summ = FitSummary(task.id, good[0].module, kind, "none")
        ratios = leading_ratio(series)
        summ.ratios, summ.trend = ratios.ratios, ratios.trend
        summ.limit = ratios.ratios[-1]
        if want_fit:
            degree = task.fit_degree if task.fit_degree is not None else d
            try:
                rep = fit_quasi_polynomial(series, degree, task.fit_period)
                summ.model, summ.degree, summ.period = rep.kind, rep.degree, rep.period
                summ.formula, summ.holdout_ok = rep.formula(), rep.ok
                if rep.ok:
                    lead = rep.leading_coefficient(d)
                    if lead is not None:
                        summ.limit = lead
            except FitError as exc:
                summ.model, summ.formula = "none", str(exc)
        if task.expect:
            summ.expect = task.expect
            summ.expect_ok = [ok for *_, ok in verify_closed_form(series, task.expect)]
        out.append(summ)
    return out


def _oracle_checks(task: TaskSpec, rows: list[ResultRow], ws: Workspace) -> list[OracleCheck]:
    """Brute-force cross-check of the smallest sample of fhk-type tasks."""
    R = ws.ring
    if task.kind in ("fhk", "hk"):
        cand = [r for r in rows if r.kind == "fhk" and r.error is None]
        if not cand:
            return []
        r = min(cand, key=lambda r: r.q)
        N = frobenius_module(ws.module(task.module), r.n)
    elif task.kind == "refl_pair":
        cand = [r for r in rows if r.kind == "refl_h0" and r.error is None]
        if not cand:
            return []
        r = min(cand, key=lambda r: r.q)
        a, b = R(task.a), R(task.b)
        N = PresentedModule(R, 1, [(a**r.q,), (b**r.q,)])
    else:
        return []
    reading = oracle_for_module(N)
    return [OracleCheck(task.id, r.module, r.n, r.q, r.value, reading.value, reading.stable)]


def run_task(doc: ProblemDocument, index: int, guards: Guards, cache: bool = True, verify: bool = False):
    """Rows, fit summaries and oracle checks for task ``index``."""
    set_resolution_cache(cache)
    task = doc.tasks[index]
    rows: list[ResultRow] = []
    fits: list[FitSummary] = []
    checks: list[OracleCheck] = []
    with guarded(**asdict(guards)):
        try:
            ws = Workspace(doc)
            for row in _series_rows(task, ws):
                rows.append(row)
        except GuardExceeded as exc:
            rows.append(_error_row(task, f"guard: {exc}"))
            return rows, fits, checks
        except (AlgebraError, ValueError) as exc:
            rows.append(_error_row(task, f"error: {exc}"))
            return rows, fits, checks
        fits = _fit_summary(task, rows, ws)
        if verify:
            try:
                checks = _oracle_checks(task, rows, ws)
            except GuardExceeded as exc:
                rows.append(_error_row(task, f"guard: oracle {exc}"))
    return rows, fits, checks


def _error_row(task: TaskSpec, msg: str) -> ResultRow:
    label = task.module if task.module is not None else f"({task.a}):({task.b})"
    return ResultRow(task.id, label, task.kind, None, 0, None, False, error=msg)


def _run_one(args):
    return run_task(*args)


def run(doc: ProblemDocument, jobs: int = 1, guards: Guards | None = None, cache: bool = True, verify: bool = False) -> ResultTable:
    """Run every task; row order follows the document regardless of ``jobs``."""
    guards = guards or Guards()
    table = ResultTable(meta=_meta(doc))
    work = [(doc, i, guards, cache, verify) for i in range(len(doc.tasks))]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, work))
    else:
        results = [_run_one(w) for w in work]
    for rows, fits, checks in results:
        table.rows.extend(rows)
        table.fits.extend(fits)
        table.checks.extend(checks)
    return table


def _meta(doc: ProblemDocument) -> dict:
    r = doc.ring
    meta = {
        "tool": "frobhk",
        "version": __version__,
        "p": str(r.p),
        "vars": list(r.vars),
        "quotient": list(r.quotient),
        "tasks": str(len(doc.tasks)),
    }
    if r.weights:
        meta["weights"] = [str(w) for w in r.weights]
    return meta


# -- rendering ------------------------------------------------------------------------------


def _s(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def _finite_cell(row: ResultRow) -> str:
    return "error" if row.error else _s(row.finite)


def render_csv(table: ResultTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in table.rows:
        w.writerow([r.task, r.module, r.kind, _s(r.n), _s(r.q), _s(r.value), _finite_cell(r)])
    return buf.getvalue()


def render_json(table: ResultTable) -> str:
    rows = []
    for r in table.rows:
        item = {k: _s(getattr(r, k)) for k in CSV_HEADER if k != "finite"}
        item["finite"] = _finite_cell(r)
        if r.error:
            item["error"] = r.error
        rows.append(item)
    fits = []
    for f in table.fits:
        item = {
            "task": f.task,
            "module": f.module,
            "kind": f.kind,
            "model": f.model,
            "degree": _s(f.degree),
            "period": _s(f.period),
            "formula": f.formula,
            "holdout_ok": _s(f.holdout_ok),
            "limit": _s(f.limit),
            "ratios": [_s(x) for x in f.ratios],
            "trend": f.trend,
        }
        if f.expect is not None:
            item["expect"] = f.expect
            item["expect_ok"] = [_s(x) for x in f.expect_ok]
        fits.append(item)
    out = {"meta": table.meta, "rows": rows, "fits": fits}
    if table.checks:
        out["oracle"] = [
            {
                "task": c.task,
                "module": c.module,
                "n": _s(c.n),
                "q": _s(c.q),
                "groebner": _s(c.groebner),
                "oracle": _s(c.oracle),
                "stable": _s(c.stable),
                "agree": _s(c.agree),
            }
            for c in table.checks
        ]
    return json.dumps(out, indent=2, sort_keys=False) + "\n"


def render_table(table: ResultTable) -> str:
    head = list(CSV_HEADER) + ["seconds"]
    body = []
    for r in table.rows:
        cells = [r.task, r.module, r.kind, _s(r.n), _s(r.q), _s(r.value), _finite_cell(r), f"{r.seconds:.3f}"]
        body.append(cells)
    widths = [max(len(h), *(len(c[i]) for c in body)) if body else len(h) for i, h in enumerate(head)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(head, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for cells in body:
        lines.append("  ".join(c.ljust(w) for c, w in zip(cells, widths)))
    for r in table.rows:
        if r.error:
            lines.append(f"{r.task}: {r.error}")
    for f in table.fits:
        ratios = ", ".join(_s(x) for x in f.ratios)
        if f.model == "none" and not f.formula:
            lines.append(f"ratios {f.task} {f.kind}: [{ratios}] ({f.trend})")
        else:
            lines.append(
                f"fit {f.task} {f.kind}: {f.formula or f.model}  holdout={_s(f.holdout_ok)}  "
                f"ratios=[{ratios}] ({f.trend})  limit~{_s(f.limit)}"
            )
        if f.expect is not None:
            verdict = "pass" if all(f.expect_ok) else "FAIL " + _s(f.expect_ok)
            lines.append(f"expect {f.task} {f.kind}: {f.expect} -> {verdict}")
    lines.extend(oracle_lines(table))
    return "\n".join(lines) + "\n"


def oracle_lines(table: ResultTable) -> list[str]:
    lines = []
    for c in table.checks:
        lines.append(
            f"oracle {c.task} {c.module} q={c.q}: groebner={c.groebner} oracle={c.oracle} "
            f"stable={_s(c.stable)} -> {'agree' if c.agree else 'MISMATCH'}"
        )
    return lines


RENDERERS = {"csv": render_csv, "json": render_json, "table": render_table}
