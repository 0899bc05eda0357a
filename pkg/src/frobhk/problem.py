"""Problem documents: a TOML file naming a ring, modules and tasks.

    [ring]
    p = 2
    vars = ["x", "y", "z"]
    quotient = ["x^3 + y^3 + z^3"]

    [module.M]
    ideal = ["x", "y + z"]

    [[task]]
    kind = "fhk"
    module = "M"
    n = [1, 2, 3]

Validation errors carry the line and column of the offending key when it
can be located in the source text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any

try:  # Python 3.11+
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib
import tomli_w

from .algebra import is_prime

TASK_KINDS = ("fhk", "hk", "tor", "lc", "theta", "refl_pair")
MODULE_KINDS = ("ideal", "matrix", "ideal_module", "syzygy_of", "free")
FORMATS = ("table", "csv", "json")

_RING_KEYS = {"p", "vars", "weights", "quotient", "order"}
_MODULE_KEYS = {"ideal", "matrix", "ideal_module", "syzygy_of", "free", "depth"}
_TASK_KEYS = {"id", "kind", "module", "n", "i", "k", "a", "b", "q", "fit", "fit_degree", "fit_period", "expect"}
_OUTPUT_KEYS = {"format", "path"}
_TOP_KEYS = {"ring", "module", "task", "output"}


class ProblemError(ValueError):
    def __init__(self, msg: str, line: int | None = None, col: int | None = None):
        where = f"line {line}, column {col}: " if line is not None else ""
        super().__init__(where + msg)
        self.line = line
        self.col = col


@dataclass
class RingSpec:
    p: int
    vars: list[str]
    quotient: list[str] = field(default_factory=list)
    weights: list[int] | None = None
    order: str = "grevlex"


@dataclass
class ModuleSpec:
    name: str
    kind: str
    data: Any
    depth: int = 1


@dataclass
class TaskSpec:
    id: str
    kind: str
    module: str | None = None
    n: list[int] = field(default_factory=list)
    i: int | None = None
    k: int | None = None
    a: str | None = None
    b: str | None = None
    q: list[int] = field(default_factory=list)
    fit: bool = False
    fit_degree: int | None = None
    fit_period: int | None = None
    expect: str | None = None


@dataclass
class ProblemDocument:
    ring: RingSpec
    modules: dict[str, ModuleSpec] = field(default_factory=dict)
    tasks: list[TaskSpec] = field(default_factory=list)
    output_format: str = "table"
    output_path: str | None = None


# -- locating keys in the source ------------------------------------------------------

_HEADER = re.compile(r"^\s*(\[\[?)\s*([^\]]+?)\s*\]\]?\s*(#.*)?$")
_KEYLINE = re.compile(r"^(\s*)([A-Za-z0-9_\-\"']+)\s*=")


class _Locator:
    """Maps (section, key) to (line, column) by a line scan of the text."""

    def __init__(self, text: str):
        self.where: dict[tuple[str, str], tuple[int, int]] = {}
        self.sections: dict[str, tuple[int, int]] = {}
        section = ""
        task_count = 0
        for lineno, line in enumerate(text.splitlines(), start=1):
            m = _HEADER.match(line)
            if m:
                name = m.group(2).strip()
                if m.group(1) == "[[":
                    name = f"{name}[{task_count}]"
                    task_count += 1
                section = name
                self.sections.setdefault(section, (lineno, line.index("[") + 1))
                continue
            m = _KEYLINE.match(line)
            if m:
                key = m.group(2).strip("\"'")
                self.where.setdefault((section, key), (lineno, len(m.group(1)) + 1))

    def key(self, section: str, key: str) -> tuple[int | None, int | None]:
        if (section, key) in self.where:
            return self.where[(section, key)]
        return self.sections.get(section, (None, None))

    def error(self, section: str, key: str, msg: str) -> ProblemError:
        line, col = self.key(section, key)
        return ProblemError(msg, line, col)


# -- parsing --------------------------------------------------------------------------


def _expect_type(loc, section, key, value, types, what):
    if isinstance(value, bool) or not isinstance(value, types):
        raise loc.error(section, key, f"'{key}' must be {what}")


def _int_list(loc, section, key, value) -> list[int]:
    if isinstance(value, int) and not isinstance(value, bool):
        return [value]
    if isinstance(value, str):
        m = re.fullmatch(r"\s*(\d+)\s*\.\.\s*(\d+)\s*", value)
        if m:
            lo, hi = int(m.group(1)), int(m.group(2))
            if lo <= hi:
                return list(range(lo, hi + 1))
    if isinstance(value, list) and value and all(isinstance(v, int) and not isinstance(v, bool) for v in value):
        return list(value)
    raise loc.error(section, key, f"'{key}' must be a non-empty integer list or a range like \"1..3\"")


def _str_list(loc, section, key, value) -> list[str]:
    if isinstance(value, list) and all(isinstance(v, (str, int)) and not isinstance(v, bool) for v in value):
        return [str(v) for v in value]
    raise loc.error(section, key, f"'{key}' must be a list of polynomials")


def _unknown(loc, section, table: dict, allowed: set):
    for key in table:
        if key not in allowed:
            raise loc.error(section, key, f"unknown key '{key}' in [{section.split('[')[0]}]")


def parse_problem(text: str) -> ProblemDocument:
    """Parse and validate a problem document."""
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+), column (\d+)", str(exc))
        line, col = (int(m.group(1)), int(m.group(2))) if m else (None, None)
        raise ProblemError(f"syntax error: {exc}", line, col) from None
    loc = _Locator(text)
    _unknown(loc, "", raw, _TOP_KEYS)

    if "ring" not in raw:
        raise ProblemError("missing [ring] section")
    r = raw["ring"]
    _unknown(loc, "ring", r, _RING_KEYS)
    for key in ("p", "vars"):
        if key not in r:
            raise loc.error("ring", key, f"[ring] needs '{key}'")
    _expect_type(loc, "ring", "p", r["p"], int, "an integer")
    if not is_prime(r["p"]):
        raise loc.error("ring", "p", f"p = {r['p']} is not prime")
    variables = _str_list(loc, "ring", "vars", r["vars"])
    if not variables or len(set(variables)) != len(variables):
        raise loc.error("ring", "vars", "'vars' must list distinct variable names")
    for v in variables:
        if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", v):
            raise loc.error("ring", "vars", f"bad variable name {v!r}")
    weights = None
    if "weights" in r:
        weights = _int_list(loc, "ring", "weights", r["weights"])
        if len(weights) != len(variables) or any(w <= 0 for w in weights):
            raise loc.error("ring", "weights", "'weights' needs one positive integer per variable")
    order = r.get("order", "grevlex")
    if order not in ("grevlex", "lex", "wgrevlex"):
        raise loc.error("ring", "order", f"unknown order {order!r}")
    ring = RingSpec(r["p"], variables, _str_list(loc, "ring", "quotient", r.get("quotient", [])), weights, order)
    doc = ProblemDocument(ring)

    mods = raw.get("module", {})
    if not isinstance(mods, dict):
        raise loc.error("", "module", "'module' must be a table of named modules")
    for name, body in mods.items():
        section = f"module.{name}"
        if not isinstance(body, dict):
            raise loc.error(section, name, f"module '{name}' must be a table")
        _unknown(loc, section, body, _MODULE_KEYS)
        kinds = [k for k in MODULE_KINDS if k in body]
        if len(kinds) != 1:
            raise loc.error(section, name, f"module '{name}' needs exactly one of {', '.join(MODULE_KINDS)}")
        kind = kinds[0]
        data = body[kind]
        if kind in ("ideal", "ideal_module"):
            data = _str_list(loc, section, kind, data)
        elif kind == "matrix":
            if not isinstance(data, list) or not all(isinstance(row, list) for row in data):
                raise loc.error(section, kind, "'matrix' must be a list of rows")
            data = [_str_list(loc, section, kind, row) for row in data]
            if data and len({len(row) for row in data}) != 1:
                raise loc.error(section, kind, "matrix rows have different lengths")
        elif kind == "syzygy_of":
            _expect_type(loc, section, kind, data, str, "a module name")
        elif kind == "free":
            _expect_type(loc, section, kind, data, int, "a rank")
        depth = body.get("depth", 1)
        _expect_type(loc, section, "depth", depth, int, "an integer")
        doc.modules[name] = ModuleSpec(name, kind, data, depth)
    for name, spec in doc.modules.items():
        if spec.kind == "syzygy_of":
            seen = {name}
            cur = spec
            while cur.kind == "syzygy_of":
                if cur.data not in doc.modules:
                    raise loc.error(f"module.{cur.name}", "syzygy_of", f"undefined module '{cur.data}'")
                if cur.data in seen:
                    raise loc.error(f"module.{cur.name}", "syzygy_of", f"cyclic reference through '{cur.data}'")
                seen.add(cur.data)
                cur = doc.modules[cur.data]

    tasks = raw.get("task", [])
    if not isinstance(tasks, list):
        raise loc.error("", "task", "tasks must be given as [[task]] tables")
    for idx, t in enumerate(tasks):
        section = f"task[{idx}]"
        _unknown(loc, section, t, _TASK_KEYS)
        kind = t.get("kind")
        if kind not in TASK_KINDS:
            raise loc.error(section, "kind", f"task kind must be one of {', '.join(TASK_KINDS)}")
        spec = TaskSpec(id=str(t.get("id", f"t{idx + 1}")), kind=kind)
        if kind == "refl_pair":
            for key in ("a", "b", "q"):
                if key not in t:
                    raise loc.error(section, key, f"refl_pair task needs '{key}'")
            spec.a, spec.b = str(t["a"]), str(t["b"])
            spec.q = _int_list(loc, section, "q", t["q"])
            if any(q < 1 for q in spec.q):
                raise loc.error(section, "q", "exponents must be positive")
        else:
            if "module" not in t:
                raise loc.error(section, "module", f"{kind} task needs 'module'")
            if t["module"] not in doc.modules:
                raise loc.error(section, "module", f"undefined module '{t['module']}'")
            spec.module = t["module"]
            if "n" not in t:
                raise loc.error(section, "n", f"{kind} task needs 'n'")
            spec.n = _int_list(loc, section, "n", t["n"])
            if any(n < 0 for n in spec.n):
                raise loc.error(section, "n", "n must be non-negative")
        if kind == "tor":
            _expect_type(loc, section, "i", t.get("i"), int, "an integer >= 1")
            spec.i = t["i"]
            if spec.i < 1:
                raise loc.error(section, "i", "'i' must be at least 1")
        if kind == "lc":
            _expect_type(loc, section, "k", t.get("k"), int, "an integer >= 0")
            spec.k = t["k"]
            if spec.k < 0:
                raise loc.error(section, "k", "'k' must be non-negative")
        if "fit" in t:
            if not isinstance(t["fit"], bool):
                raise loc.error(section, "fit", "'fit' must be true or false")
            spec.fit = t["fit"]
        for key in ("fit_degree", "fit_period"):
            if key in t:
                _expect_type(loc, section, key, t[key], int, "an integer")
                setattr(spec, key, t[key])
        if "expect" in t:
            _expect_type(loc, section, "expect", t["expect"], str, "a closed-form expression")
            spec.expect = t["expect"]
        doc.tasks.append(spec)
    ids = [t.id for t in doc.tasks]
    for idx, tid in enumerate(ids):
        if tid in ids[:idx]:
            raise loc.error(f"task[{idx}]", "id", f"duplicate task id '{tid}'")

    out = raw.get("output", {})
    _unknown(loc, "output", out, _OUTPUT_KEYS)
    fmt = out.get("format", "table")
    if fmt not in FORMATS:
        raise loc.error("output", "format", f"format must be one of {', '.join(FORMATS)}")
    doc.output_format = fmt
    if "path" in out:
        _expect_type(loc, "output", "path", out["path"], str, "a string")
        doc.output_path = out["path"]
    return doc


# -- emitting -----------------------------------------------------------------------------


def dump_problem(doc: ProblemDocument) -> str:
    """Canonical TOML text; parse_problem(dump_problem(d)) reproduces d."""
    ring: dict[str, Any] = {"p": doc.ring.p, "vars": list(doc.ring.vars)}
    if doc.ring.weights is not None:
        ring["weights"] = list(doc.ring.weights)
    ring["quotient"] = list(doc.ring.quotient)
    if doc.ring.order != "grevlex":
        ring["order"] = doc.ring.order
    parts = ["[ring]\n" + tomli_w.dumps(ring)]
    for name, m in doc.modules.items():
        body: dict[str, Any] = {m.kind: m.data}
        if m.depth != 1:
            body["depth"] = m.depth
        parts.append(f"[module.{_key(name)}]\n" + tomli_w.dumps(body))
    for t in doc.tasks:
        body = {"id": t.id, "kind": t.kind}
        if t.kind == "refl_pair":
            body.update(a=t.a, b=t.b, q=list(t.q))
        else:
            body.update(module=t.module, n=list(t.n))
        for key in ("i", "k", "fit_degree", "fit_period", "expect"):
            val = getattr(t, key)
            if val is not None:
                body[key] = val
        if t.fit:
            body["fit"] = True
        parts.append("[[task]]\n" + tomli_w.dumps(body))
    out: dict[str, Any] = {"format": doc.output_format}
    if doc.output_path is not None:
        out["path"] = doc.output_path
    parts.append("[output]\n" + tomli_w.dumps(out))
    return "\n".join(parts)


def _key(name: str) -> str:
    return name if re.fullmatch(r"[A-Za-z0-9_\-]+", name) else '"' + name.replace('"', '\\"') + '"'


def load_problem(path: str) -> ProblemDocument:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ProblemError(f"cannot read {path}: {exc.strerror}") from None
    return parse_problem(text)
