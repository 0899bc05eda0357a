"""Prime fields, monomial orders and sparse multivariate polynomials over F_p.

Polynomials are immutable maps from exponent tuples to residues in [0, p).
The Frobenius power f -> f^q (q a power of p) is exponent scaling, since
c^q = c for every c in F_p and (a + b)^q = a^q + b^q.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import total_ordering
from typing import Iterable, Mapping, Sequence


class AlgebraError(ValueError):
    pass


class RingMismatch(AlgebraError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


def prime_power_exponent(q: int, p: int) -> int:
    """Return n with q == p**n, raising AlgebraError otherwise."""
    if q < 1:
        raise AlgebraError(f"{q} is not a power of {p}")
    n = 0
    while q % p == 0:
        q //= p
        n += 1
    if q != 1:
        raise AlgebraError(f"not a power of {p}")
    return n


@total_ordering
@dataclass(frozen=True)
class FieldElement:
    """Residue class modulo a prime."""

    value: int
    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise AlgebraError(f"modulus {self.p} is not prime")
        object.__setattr__(self, "value", self.value % self.p)

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.p != self.p:
                raise RingMismatch(f"F_{self.p} vs F_{other.p}")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FieldElement(self.value + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FieldElement(self.value - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FieldElement(o - self.value, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FieldElement(self.value * o, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value, self.p)

    def inverse(self) -> FieldElement:
        if self.value == 0:
            raise ZeroDivisionError("zero has no inverse")
        return FieldElement(pow(self.value, -1, self.p), self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * FieldElement(o, self.p).inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return FieldElement(pow(self.value, e, self.p), self.p)

    def __lt__(self, other):
        return self.value < self._coerce(other)

    def __int__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.value} (mod {self.p})"


ORDER_KINDS = ("grevlex", "lex", "wgrevlex")


@dataclass(frozen=True)
class MonomialOrder:
    """A global monomial order: grevlex (default), lex, or weighted grevlex.

    Variables are ranked in declaration order, so x > y > z for ``(x, y, z)``.
    """

    kind: str = "grevlex"
    weights: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kind not in ORDER_KINDS:
            raise AlgebraError(f"unknown monomial order {self.kind!r}")
        if self.weights is not None:
            object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
            if any(w <= 0 for w in self.weights):
                raise AlgebraError("order weights must be positive")
        elif self.kind == "wgrevlex":
            raise AlgebraError("weighted grevlex needs weights")

    def key(self, exps: Sequence[int]) -> tuple:
        """Sort key; larger key means larger monomial."""
        if self.kind == "lex":
            return tuple(exps)
        w = self.weights or (1,) * len(exps)
        deg = sum(a * b for a, b in zip(w, exps))
        return (deg,) + tuple(-e for e in reversed(exps))

    def compare(self, a: Sequence[int], b: Sequence[int]) -> int:
        """Return -1, 0 or 1 as a <, =, > b."""
        if len(a) != len(b):
            raise AlgebraError("monomials of different length")
        ka, kb = self.key(a), self.key(b)
        return (ka > kb) - (ka < kb)


def compare(order: MonomialOrder, a: Sequence[int], b: Sequence[int]) -> str:
    return {-1: "LT", 0: "EQ", 1: "GT"}[order.compare(a, b)]


@dataclass(frozen=True)
class PolynomialRing:
    """F_p[x_1, ..., x_v] with optional positive grading weights."""

    p: int
    variables: tuple[str, ...]
    weights: tuple[int, ...] | None = None
    order: MonomialOrder = field(default=None, compare=False)

    def __post_init__(self):
        if not is_prime(self.p):
            raise AlgebraError(f"{self.p} is not prime")
        object.__setattr__(self, "variables", tuple(self.variables))
        if len(set(self.variables)) != len(self.variables):
            raise AlgebraError("duplicate variable names")
        for v in self.variables:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", v):
                raise AlgebraError(f"bad variable name {v!r}")
        if self.weights is not None:
            w = tuple(int(x) for x in self.weights)
            if len(w) != len(self.variables) or any(x <= 0 for x in w):
                raise AlgebraError("weights must be positive, one per variable")
            object.__setattr__(self, "weights", w)
        if self.order is None:
            kind = "grevlex" if self.weights is None else "wgrevlex"
            object.__setattr__(self, "order", MonomialOrder(kind, self.weights))

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def degree_weights(self) -> tuple[int, ...]:
        return self.weights or (1,) * self.nvars

    def degree(self, exps: Sequence[int]) -> int:
        return sum(a * b for a, b in zip(self.degree_weights, exps))

    def zero(self) -> Polynomial:
        return Polynomial(self, {})

    def one(self) -> Polynomial:
        return self.constant(1)

    def constant(self, c: int) -> Polynomial:
        return Polynomial(self, {(0,) * self.nvars: c})

    def var(self, name_or_index) -> Polynomial:
        i = self.variables.index(name_or_index) if isinstance(name_or_index, str) else name_or_index
        e = [0] * self.nvars
        e[i] = 1
        return Polynomial(self, {tuple(e): 1})

    def gens(self) -> list[Polynomial]:
        return [self.var(i) for i in range(self.nvars)]

    def monomial(self, exps: Sequence[int], c: int = 1) -> Polynomial:
        return Polynomial(self, {tuple(exps): c})

    def parse(self, text: str) -> Polynomial:
        return parse_polynomial(self, text)

    def __call__(self, text) -> Polynomial:
        if isinstance(text, Polynomial):
            if text.ring != self:
                raise RingMismatch("polynomial from another ring")
            return text
        if isinstance(text, int):
            return self.constant(text)
        return parse_polynomial(self, text)

    def __repr__(self):
        w = "" if self.weights is None else f", weights={list(self.weights)}"
        return f"F_{self.p}[{','.join(self.variables)}{w}]"


class Polynomial:
    """Immutable sparse polynomial; coefficients are residues in [0, p)."""

    __slots__ = ("ring", "_terms", "_hash")

    def __init__(self, ring: PolynomialRing, terms: Mapping[tuple, int]):
        p = ring.p
        n = ring.nvars
        clean = {}
        for e, c in terms.items():
            c %= p
            if c:
                if len(e) != n:
                    raise AlgebraError("exponent vector of wrong length")
                clean[tuple(e)] = c
        self.ring = ring
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, ring, terms: dict) -> Polynomial:
        # terms already reduced, nonzero and well-formed
        obj = cls.__new__(cls)
        obj.ring = ring
        obj._terms = terms
        obj._hash = None
        return obj

    # -- inspection
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        """Terms in decreasing order under the ring's monomial order."""
        key = self.ring.order.key
        return sorted(self._terms.items(), key=lambda t: key(t[0]), reverse=True)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def coefficient(self, exps: Sequence[int]) -> int:
        return self._terms.get(tuple(exps), 0)

    def constant_term(self) -> int:
        return self._terms.get((0,) * self.ring.nvars, 0)

    def leading_term(self) -> tuple[tuple, int]:
        if not self._terms:
            raise AlgebraError("zero polynomial has no leading term")
        key = self.ring.order.key
        e = max(self._terms, key=key)
        return e, self._terms[e]

    def degree(self) -> int:
        """Weighted total degree; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        return max(self.ring.degree(e) for e in self._terms)

    def is_homogeneous(self) -> bool:
        degs = {self.ring.degree(e) for e in self._terms}
        return len(degs) <= 1

    def monic(self) -> Polynomial:
        _, c = self.leading_term()
        return self.scale(pow(c, -1, self.ring.p))

    # -- arithmetic
    def _check(self, other) -> Polynomial:
        if isinstance(other, int):
            return self.ring.constant(other)
        if isinstance(other, FieldElement):
            if other.p != self.ring.p:
                raise RingMismatch("field characteristic mismatch")
            return self.ring.constant(other.value)
        if not isinstance(other, Polynomial):
            return NotImplemented
        if other.ring != self.ring:
            raise RingMismatch(f"{self.ring} vs {other.ring}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        p = self.ring.p
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = (out.get(e, 0) + c) % p
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Polynomial._raw(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.p
        return Polynomial._raw(self.ring, {e: p - c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return other - self

    def scale(self, c: int) -> Polynomial:
        p = self.ring.p
        c %= p
        if not c:
            return self.ring.zero()
        return Polynomial._raw(self.ring, {e: v * c % p for e, v in self._terms.items()})

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        p = self.ring.p
        out: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = (out.get(e, 0) + c1 * c2) % p
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return Polynomial._raw(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise AlgebraError("negative power")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def mul_monomial(self, exps: Sequence[int], c: int = 1) -> Polynomial:
        p = self.ring.p
        return Polynomial(
            self.ring,
            {tuple(a + b for a, b in zip(e, exps)): v * c % p for e, v in self._terms.items()},
        )

    def frobenius_power(self, q: int) -> Polynomial:
        """f^q for q a power of the characteristic, by exponent scaling."""
        prime_power_exponent(q, self.ring.p)
        return self.scale_exponents(q)

    def scale_exponents(self, q: int) -> Polynomial:
        return Polynomial._raw(
            self.ring, {tuple(q * a for a in e): c for e, c in self._terms.items()}
        )

    # -- comparison / hashing
    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self._terms.items())))
        return self._hash

    # -- text
    def __str__(self):
        if not self._terms:
            return "0"
        names = self.ring.variables
        parts = []
        for e, c in self.items():
            mono = "*".join(
                names[i] if a == 1 else f"{names[i]}^{a}" for i, a in enumerate(e) if a
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts)

    def __repr__(self):
        return f"Polynomial({str(self)!r})"


def poly_arith(f: Polynomial, g: Polynomial, op: str) -> Polynomial:
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    raise AlgebraError(f"unknown operation {op!r}")


def frobenius_power(f: Polynomial, q: int) -> Polynomial:
    return f.frobenius_power(q)


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*^()]))")


class ParseError(AlgebraError):
    def __init__(self, msg: str, pos: int | None = None):
        super().__init__(msg if pos is None else f"{msg} at column {pos + 1}")
        self.pos = pos


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    i = 0
    text = text.rstrip()
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m or m.end() == i:
            raise ParseError(f"unexpected character {text[i:].lstrip()[:1]!r}", i)
        start = m.start(m.lastindex)
        if m.group(1):
            out.append(("num", m.group(1), start))
        elif m.group(2):
            out.append(("name", m.group(2), start))
        else:
            tok = "^" if m.group(3) == "**" else m.group(3)
            out.append(("op", tok, start))
        i = m.end()
    return out


class _Parser:
    def __init__(self, ring: PolynomialRing, text: str):
        self.ring = ring
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, len(self.toks))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expr(self) -> Polynomial:
        kind, val, _ = self.peek()
        sign = 1
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        acc = self.term().scale(sign)
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                t = self.term()
                acc = acc + t if val == "+" else acc - t
            else:
                return acc

    def term(self) -> Polynomial:
        acc = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.take()
                acc = acc * self.factor()
            elif kind in ("num", "name") or (kind == "op" and val == "("):
                acc = acc * self.factor()
            else:
                return acc

    def factor(self) -> Polynomial:
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, val, pos = self.take()
            if kind != "num":
                raise ParseError("exponent must be a non-negative integer", pos)
            base = base ** int(val)
        return base

    def atom(self) -> Polynomial:
        kind, val, pos = self.take()
        if kind == "num":
            return self.ring.constant(int(val))
        if kind == "name":
            if val not in self.ring.variables:
                raise ParseError(f"unknown variable {val!r}", pos)
            return self.ring.var(val)
        if kind == "op" and val == "(":
            inner = self.expr()
            kind, val, pos = self.take()
            if val != ")":
                raise ParseError("expected ')'", pos)
            return inner
        raise ParseError("unexpected end of input" if kind is None else f"unexpected {val!r}", pos)


def parse_polynomial(ring: PolynomialRing, text: str) -> Polynomial:
    """Parse ``2*x^3*y - z + 1`` style text; juxtaposition and parentheses are allowed."""
    parser = _Parser(ring, text)
    if not parser.toks:
        raise ParseError("empty polynomial")
    result = parser.expr()
    if parser.i != len(parser.toks):
        _, val, pos = parser.peek()
        raise ParseError(f"unexpected {val!r}", pos)
    return result


def parse_many(ring: PolynomialRing, items: Iterable) -> list[Polynomial]:
    return [ring(x) for x in items]
