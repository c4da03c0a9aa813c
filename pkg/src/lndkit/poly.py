"""Exact multivariate polynomials over the rationals.

Monomials are dense exponent tuples, coefficients are ``gmpy2.mpq``.  A
:class:`PolyRing` fixes the variable names (and optional grading weights,
which are reporting metadata only); every :class:`Polynomial` carries its ring
and arithmetic between different rings raises :class:`AmbientMismatchError`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from gmpy2 import mpq

Rational = mpq
Monomial = tuple


class AmbientMismatchError(ValueError):
    pass


class PolynomialParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}")
        self.line = line
        self.column = col
        self.pos = pos


def as_rational(value) -> mpq:
    if isinstance(value, str):
        return mpq(Fraction(value.strip()))
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    return mpq(value)


# ---------------------------------------------------------------- orders


@dataclass(frozen=True)
class MonomialOrder:
    """A monomial order, evaluated through a flat integer sort key.

    ``key(m1) < key(m2)`` iff ``m1 < m2``.  Keys are flat tuples of ints so
    that negating them componentwise reverses the order (the Groebner engine
    relies on this for its heaps).
    """

    kind: str = "grevlex"
    weights: tuple = ()
    split: int = 0
    inner: tuple = ()

    def __post_init__(self):
        if self.kind not in ("lex", "grlex", "grevlex", "weighted", "block"):
            raise ValueError(f"unknown monomial order {self.kind!r}")
        if self.kind == "block" and len(self.inner) != 2:
            raise ValueError("block order needs two inner orders")

    def key(self, m: Sequence[int]) -> tuple:
        kind = self.kind
        if kind == "grevlex":
            return (sum(m),) + tuple(-e for e in reversed(m))
        if kind == "lex":
            return tuple(m)
        if kind == "grlex":
            return (sum(m),) + tuple(m)
        if kind == "weighted":
            return (sum(w * e for w, e in zip(self.weights, m)),) + tuple(-e for e in reversed(m))
        first, second = self.inner
        return first.key(m[: self.split]) + second.key(m[self.split:])

    def compare(self, m1: Sequence[int], m2: Sequence[int]) -> int:
        k1, k2 = self.key(m1), self.key(m2)
        return (k1 > k2) - (k1 < k2)

    def __str__(self):
        if self.kind == "weighted":
            return f"weighted{self.weights}"
        if self.kind == "block":
            return f"block({self.split}; {self.inner[0]}, {self.inner[1]})"
        return self.kind


LEX = MonomialOrder("lex")
GRLEX = MonomialOrder("grlex")
GREVLEX = MonomialOrder("grevlex")


def weighted(weights: Sequence[int]) -> MonomialOrder:
    return MonomialOrder("weighted", weights=tuple(weights))


def block(split: int, first: MonomialOrder = GREVLEX, second: MonomialOrder = GREVLEX) -> MonomialOrder:
    """Block order: the first ``split`` variables dominate the rest."""
    return MonomialOrder("block", split=split, inner=(first, second))


@dataclass(frozen=True)
class ModuleOrder:
    """Order on module monomials ``m * e_pos``.

    ``top`` compares the monomial first (term over position), ``pot`` the
    position first.  Lower positions rank higher in both.
    """

    kind: str = "top"
    base: MonomialOrder = GREVLEX

    def key(self, pos: int, m: Sequence[int]) -> tuple:
        if self.kind == "top":
            return self.base.key(m) + (-pos,)
        if self.kind == "pot":
            return (-pos,) + self.base.key(m)
        raise ValueError(f"unknown module order {self.kind!r}")

    def compare(self, a: tuple, b: tuple) -> int:
        ka, kb = self.key(*a), self.key(*b)
        return (ka > kb) - (ka < kb)


# ---------------------------------------------------------------- rings


class PolyRing:
    """Polynomial ring Q[names].  ``weights`` only feed homogeneity reports."""

    __slots__ = ("names", "weights", "_index", "_hash")

    def __init__(self, names: Iterable[str], weights: Sequence[int] | None = None):
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate variable names in {self.names}")
        for name in self.names:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name):
                raise ValueError(f"invalid variable name {name!r}")
        self.weights = tuple(weights) if weights is not None else (1,) * len(self.names)
        if len(self.weights) != len(self.names):
            raise ValueError("one weight per variable required")
        self._index = {n: i for i, n in enumerate(self.names)}
        self._hash = hash(self.names)

    @property
    def nvars(self) -> int:
        return len(self.names)

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self.names == other.names

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"PolyRing({', '.join(self.names)})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"no variable {name!r} in {self!r}") from None

    def zero(self) -> Polynomial:
        return Polynomial(self, {})

    def one(self) -> Polynomial:
        return self.constant(1)

    def constant(self, c) -> Polynomial:
        c = as_rational(c)
        return Polynomial(self, {(0,) * self.nvars: c} if c else {})

    def gen(self, name: str | int) -> Polynomial:
        i = name if isinstance(name, int) else self.index(name)
        m = [0] * self.nvars
        m[i] = 1
        return Polynomial(self, {tuple(m): mpq(1)})

    def gens(self) -> tuple:
        return tuple(self.gen(i) for i in range(self.nvars))

    def monomial(self, exps: Sequence[int], coeff=1) -> Polynomial:
        c = as_rational(coeff)
        return Polynomial(self, {tuple(exps): c} if c else {})

    def __call__(self, value) -> Polynomial:
        if isinstance(value, Polynomial):
            if value.ring != self:
                raise AmbientMismatchError(f"{value.ring!r} is not {self!r}")
            return value
        if isinstance(value, str):
            return parse(value, self)
        return self.constant(value)

    def extend(self, names: Iterable[str], weights: Sequence[int] | None = None) -> PolyRing:
        names = tuple(names)
        w = tuple(weights) if weights is not None else (1,) * len(names)
        return PolyRing(self.names + names, self.weights + w)

    def embed(self, p: Polynomial, offset: int = 0) -> Polynomial:
        """Map ``p`` into this ring, placing its variables at ``offset``."""
        n = p.ring.nvars
        pad_l = (0,) * offset
        pad_r = (0,) * (self.nvars - offset - n)
        if offset + n > self.nvars:
            raise AmbientMismatchError("embedding does not fit")
        return Polynomial(self, {pad_l + m + pad_r: c for m, c in p.terms.items()})


# ---------------------------------------------------------------- polynomials


def _add_into(acc: dict, terms: Mapping, scale=None):
    for m, c in terms.items():
        if scale is not None:
            c = c * scale
        v = acc.get(m)
        if v is None:
            acc[m] = c
        else:
            v = v + c
            if v:
                acc[m] = v
            else:
                del acc[m]


class Polynomial:
    """Immutable polynomial; ``terms`` maps exponent tuples to nonzero mpq."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: PolyRing, terms: Mapping):
        self.ring = ring
        self.terms = terms
        self._hash = None

    @classmethod
    def from_terms(cls, ring: PolyRing, terms: Mapping) -> Polynomial:
        clean = {}
        for m, c in terms.items():
            m = tuple(m)
            if len(m) != ring.nvars:
                raise ValueError(f"monomial {m} has wrong length for {ring!r}")
            if any(e < 0 for e in m):
                raise ValueError(f"negative exponent in {m}")
            c = as_rational(c)
            if c:
                clean[m] = clean.get(m, mpq(0)) + c
        return cls(ring, {m: c for m, c in clean.items() if c})

    # -- coercion
    def _coerce(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise AmbientMismatchError(f"{other.ring!r} is not {self.ring!r}")
            return other
        if isinstance(other, (int, Fraction)) or type(other) is type(mpq(0)):
            return self.ring.constant(other)
        return NotImplemented

    # -- arithmetic
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc = dict(self.terms)
        _add_into(acc, other.terms)
        return Polynomial(self.ring, acc)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.ring, {m: -c for m, c in self.terms.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc = dict(self.terms)
        _add_into(acc, other.terms, mpq(-1))
        return Polynomial(self.ring, acc)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        acc: dict = {}
        for mb, cb in b.items():
            for ma, ca in a.items():
                m = tuple(x + y for x, y in zip(ma, mb))
                v = acc.get(m)
                acc[m] = ca * cb if v is None else v + ca * cb
        return Polynomial(self.ring, {m: c for m, c in acc.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, Polynomial):
            if other.is_constant() and not other.is_zero():
                other = other.constant_coeff()
            else:
                q = divide_exact(self, other)
                if q is None:
                    raise ValueError("polynomial division is not exact")
                return q
        c = as_rational(other)
        if not c:
            raise ZeroDivisionError("division by zero")
        return Polynomial(self.ring, {m: v / c for m, v in self.terms.items()})

    def scale(self, c) -> Polynomial:
        c = as_rational(c)
        if not c:
            return self.ring.zero()
        return Polynomial(self.ring, {m: v * c for m, v in self.terms.items()})

    # -- comparison
    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self.terms == other.terms
        try:
            other = self._coerce(other)
        except AmbientMismatchError:
            return False
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self) -> Iterator:
        return iter(self.sorted_terms())

    # -- inspection
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_coeff(self) -> mpq:
        return self.terms.get((0,) * self.ring.nvars, mpq(0))

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self.terms), default=-1)

    def weighted_degree(self, weights: Sequence[int] | None = None) -> int:
        w = self.ring.weights if weights is None else weights
        return max((sum(a * b for a, b in zip(w, m)) for m in self.terms), default=-1)

    def is_homogeneous(self, weights: Sequence[int] | None = None) -> bool:
        w = self.ring.weights if weights is None else weights
        return len({sum(a * b for a, b in zip(w, m)) for m in self.terms}) <= 1

    def variables(self) -> tuple:
        used = set()
        for m in self.terms:
            used.update(i for i, e in enumerate(m) if e)
        return tuple(self.ring.names[i] for i in sorted(used))

    def sorted_terms(self, order: MonomialOrder = GREVLEX) -> list:
        return sorted(self.terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    def leading_monomial(self, order: MonomialOrder = GREVLEX) -> tuple:
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self.terms, key=order.key)

    def leading_coefficient(self, order: MonomialOrder = GREVLEX) -> mpq:
        return self.terms[self.leading_monomial(order)]

    def monic(self, order: MonomialOrder = GREVLEX) -> Polynomial:
        if not self.terms:
            return self
        return self.scale(mpq(1) / self.leading_coefficient(order))

    # -- calculus and substitution
    def diff(self, var: str | int) -> Polynomial:
        i = var if isinstance(var, int) else self.ring.index(var)
        out = {}
        for m, c in self.terms.items():
            e = m[i]
            if e:
                mm = m[:i] + (e - 1,) + m[i + 1:]
                out[mm] = c * e
        return Polynomial(self.ring, out)

    def compose(self, images: Sequence[Polynomial], target: PolyRing | None = None) -> Polynomial:
        """Substitute ``images[i]`` for the i-th variable."""
        if len(images) != self.ring.nvars:
            raise ValueError("one image per variable required")
        target = target or (images[0].ring if images else self.ring)
        powers: list[dict] = [{0: target.one()} for _ in images]

        def power(i, e):
            cache = powers[i]
            if e not in cache:
                k = max(k for k in cache if k <= e)
                p = cache[k]
                for j in range(k + 1, e + 1):
                    p = p * images[i]
                    cache[j] = p
            return cache[e]

        acc: dict = {}
        for m, c in self.terms.items():
            t = target.constant(c)
            for i, e in enumerate(m):
                if e:
                    t = t * power(i, e)
            _add_into(acc, t.terms)
        return Polynomial(target, acc)

    def evaluate(self, point: Mapping[str, object]) -> mpq:
        vals = [as_rational(point[n]) for n in self.ring.names]
        total = mpq(0)
        for m, c in self.terms.items():
            t = c
            for v, e in zip(vals, m):
                if e:
                    t *= v ** e
            total += t
        return total

    # -- printing
    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial('{format_polynomial(self)}')"


# ---------------------------------------------------------------- division


def divide_exact(p: Polynomial, f: Polynomial) -> Polynomial | None:
    """Return ``q`` with ``p == f*q`` or ``None`` when ``f`` does not divide ``p``."""
    if p.ring != f.ring:
        raise AmbientMismatchError(f"{p.ring!r} is not {f.ring!r}")
    if f.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    key = GREVLEX.key
    lm_f = max(f.terms, key=key)
    lc_f = f.terms[lm_f]
    tail = [(m, c) for m, c in f.terms.items() if m != lm_f]
    rem = dict(p.terms)
    quot: dict = {}
    while rem:
        m = max(rem, key=key)
        if any(a < b for a, b in zip(m, lm_f)):
            return None
        c = rem.pop(m) / lc_f
        q = tuple(a - b for a, b in zip(m, lm_f))
        quot[q] = c
        for mt, ct in tail:
            mm = tuple(a + b for a, b in zip(mt, q))
            v = rem.get(mm)
            if v is None:
                rem[mm] = -c * ct
            else:
                v = v - c * ct
                if v:
                    rem[mm] = v
                else:
                    del rem[mm]
    return Polynomial(p.ring, quot)


# ---------------------------------------------------------------- syntax


def _format_coeff(c: mpq) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def format_polynomial(p: Polynomial, order: MonomialOrder = GREVLEX) -> str:
    """Canonical text: terms in descending graded-reverse-lex order."""
    if not p.terms:
        return "0"
    names = p.ring.names
    out = []
    for k, (m, c) in enumerate(p.sorted_terms(order)):
        factors = []
        for name, e in zip(names, m):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        neg = c < 0
        a = -c if neg else c
        if not factors:
            body = _format_coeff(a)
        elif a == 1:
            body = "*".join(factors)
        else:
            body = _format_coeff(a) + "*" + "*".join(factors)
        if k == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


class _Parser:
    def __init__(self, text: str, ring: PolyRing, symbols: Mapping[str, Polynomial] | None):
        self.text = text
        self.ring = ring
        self.symbols = symbols or {}
        self.tokens = []
        pos = 0
        text_len = len(text.rstrip())
        while pos < text_len:
            mt = _TOKEN.match(text, pos)
            if not mt or mt.end() == pos:
                raise PolynomialParseError(f"unexpected character {text[pos:pos + 1]!r}", text, pos)
            start = mt.start(mt.lastindex)
            self.tokens.append((mt.lastindex, mt.group(mt.lastindex), start))
            pos = mt.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, value):
        kind, tok, pos = self.take()
        if tok != value:
            raise PolynomialParseError(f"expected {value!r}", self.text, pos)

    def parse(self) -> Polynomial:
        if not self.tokens:
            raise PolynomialParseError("empty expression", self.text, 0)
        p = self.expr()
        kind, tok, pos = self.peek()
        if kind is not None:
            raise PolynomialParseError(f"unexpected token {tok!r}", self.text, pos)
        return p

    def expr(self):
        kind, tok, pos = self.peek()
        sign = 1
        if tok in ("+", "-"):
            self.take()
            sign = -1 if tok == "-" else 1
        p = self.term()
        if sign < 0:
            p = -p
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.factor()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            pos = self.peek()[2]
            q = self.factor()
            if op == "*":
                p = p * q
            else:
                if not q.is_constant() or q.is_zero():
                    raise PolynomialParseError("division only by nonzero constants", self.text, pos)
                p = p / q.constant_coeff()
        return p

    def factor(self):
        base = self.atom()
        if self.peek()[1] in ("^", "**"):
            self.take()
            kind, tok, pos = self.take()
            if tok == "(":
                kind, tok, pos = self.take()
                self.expect(")")
            if kind != 1:
                raise PolynomialParseError("exponent must be a non-negative integer", self.text, pos)
            base = base ** int(tok)
        return base

    def atom(self):
        kind, tok, pos = self.take()
        if kind == 1:
            return self.ring.constant(int(tok))
        if kind == 2:
            if tok in self.symbols:
                return self.symbols[tok]
            if tok in self.ring._index:
                return self.ring.gen(tok)
            raise PolynomialParseError(f"unknown variable {tok!r}", self.text, pos)
        if tok == "(":
            p = self.expr()
            self.expect(")")
            return p
        if tok == "-":
            return -self.factor()
        raise PolynomialParseError(f"unexpected token {tok!r}" if tok else "unexpected end of input", self.text, pos)


def parse(text: str, ring: PolyRing, symbols: Mapping[str, Polynomial] | None = None) -> Polynomial:
    """Parse ``2*x^2*y - 3/4*z + 1``; ``symbols`` may name extra polynomials."""
    return _Parser(text, ring, symbols).parse()
