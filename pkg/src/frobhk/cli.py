"""Command line entry point: run, verify and fit.

Exit codes: 0 success, 1 input error, 2 guard trip or oracle mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys

from .fit import FitError, fit_quasi_polynomial, leading_ratio, read_series_csv, verify_closed_form
from .groebner import Guards
from .problem import FORMATS, ProblemError, load_problem
from .runner import RENDERERS, oracle_lines, run

EXIT_OK, EXIT_INPUT, EXIT_GUARD = 0, 1, 2


def _add_run_args(sp: argparse.ArgumentParser):
    sp.add_argument("file", help="problem document (TOML)")
    sp.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    sp.add_argument("--format", choices=FORMATS, default=None, help="override the document's output format")
    sp.add_argument("--output", "-o", default=None, help="write results here instead of stdout")
    sp.add_argument("--guard-pairs", type=int, default=None, help="abort a Groebner basis after N pairs")
    sp.add_argument("--guard-sat", type=int, default=64, help="round limit for iterated saturation")
    sp.add_argument("--guard-cells", type=int, default=None, help="cell limit for oracle matrices")
    sp.add_argument("--no-cache", action="store_true", help="recompute resolutions for every q")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="frobhk", description="Frobenius invariants of modules over F_p[x]/I")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="execute a problem document")
    _add_run_args(r)
    r.add_argument("--verify-oracle", action="store_true", help="cross-check with the brute-force oracle")
    v = sub.add_parser("verify", help="run with the brute-force oracle cross-check")
    _add_run_args(v)
    f = sub.add_parser("fit", help="fit closed forms to a CSV series")
    f.add_argument("csv", help="CSV with n,q,value columns (or a result table)")
    f.add_argument("--dim", type=int, required=True, help="leading degree d")
    f.add_argument("--period", type=int, default=None, help="fix the period instead of searching 1, 2, 3")
    f.add_argument("--p", type=int, default=None, help="characteristic, inferred from q when omitted")
    f.add_argument("--expect", default=None, help='closed form to check, e.g. "3*q^2-3" or "even: ...; odd: ..."')
    f.add_argument("--format", choices=("table", "json"), default="table")
    return ap


def _write(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_run(args, verify: bool) -> int:
    try:
        doc = load_problem(args.file)
    except ProblemError as exc:
        print(f"{args.file}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.jobs < 1:
        print("--jobs must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    limits = {"pairs": args.guard_pairs, "saturation": args.guard_sat}
    if args.guard_cells is not None:
        limits["oracle_cells"] = args.guard_cells
    table = run(doc, jobs=args.jobs, guards=Guards(**limits), cache=not args.no_cache, verify=verify)
    fmt = args.format or doc.output_format
    _write(RENDERERS[fmt](table), args.output or doc.output_path)
    code = table.exit_code()
    for row in table.rows:
        if row.error:
            print(f"task {row.task}: {row.error}", file=sys.stderr)
    if fmt == "csv":
        for line in oracle_lines(table):
            print(line, file=sys.stderr)
    if table.oracle_mismatch:
        print("oracle disagrees with the Groebner path", file=sys.stderr)
    return code


def cmd_fit(args) -> int:
    try:
        with open(args.csv, encoding="utf-8") as fh:
            text = fh.read()
        groups = read_series_csv(text, args.dim, args.p)
    except (OSError, FitError, ValueError) as exc:
        print(f"{args.csv}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out = []
    for label, series in groups.items():
        item = {"series": label or "series", "samples": str(len(series))}
        ratios = leading_ratio(series)
        item["ratios"] = [str(x) for x in ratios.ratios]
        item["trend"] = ratios.trend
        try:
            rep = fit_quasi_polynomial(series, args.dim, args.period)
            item.update(model=rep.kind, formula=rep.formula(), period=str(rep.period), holdout_ok=str(rep.ok).lower())
        except FitError as exc:
            item.update(model="none", formula=str(exc))
        if args.expect:
            try:
                checks = verify_closed_form(series, args.expect)
            except (ValueError, SyntaxError, TypeError) as exc:
                print(f"bad expression: {exc}", file=sys.stderr)
                return EXIT_INPUT
            item["expect"] = [f"n={n} q={q} value={v} expected={e} {'pass' if ok else 'FAIL'}" for n, q, v, e, ok in checks]
        out.append(item)
    if args.format == "json":
        sys.stdout.write(json.dumps({"fits": out}, indent=2) + "\n")
    else:
        for item in out:
            print(f"{item['series']}: {item['formula']}  [{item['model']}]  ratios={', '.join(item['ratios'])} ({item['trend']})")
            for line in item.get("expect", []):
                print("  " + line)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "fit":
        return cmd_fit(args)
    return cmd_run(args, verify=args.command == "verify" or getattr(args, "verify_oracle", False))


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
