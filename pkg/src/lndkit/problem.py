"""Problem files: a derivation, its ring, optional relations and kernel.

Format (UTF-8, ``#`` starts a comment)::

    [ring]
    variables = x, y, z
    [symbols]            # named polynomials, usable further down
    F = x*z - y^2
    [relations]          # one polynomial per line, each meaning "= 0"
    [derivation]
    y = x                # images of variables (missing ones are 0)
    jacobian = F, G      # or: D(h) = det of the Jacobian of (F, G, h)
    [kernel]
    F = F                # name = generator of ker D (optional section)
    [options]
    max = 12
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .groebner import QuotientContext
from .lnd import Derivation
from .poly import Polynomial, PolynomialParseError, PolyRing, parse
from .subalg import SubalgebraPresentation

SECTIONS = ("ring", "symbols", "relations", "derivation", "kernel", "options")


class ProblemError(ValueError):
    """Input error with a source location."""

    def __init__(self, message: str, line: int = 0, column: int = 0, source: str = "<input>"):
        self.line, self.column, self.source = line, column, source
        where = f"{source}:{line}:{column}: " if line else f"{source}: "
        super().__init__(where + message)


@dataclass
class Problem:
    name: str
    ring: PolyRing
    quotient: QuotientContext
    derivation: Derivation
    symbols: dict = field(default_factory=dict)
    kernel: SubalgebraPresentation | None = None
    options: dict = field(default_factory=dict)

    def option(self, key: str, default=None):
        return self.options.get(key, default)


_HEADER = re.compile(r"\[\s*([A-Za-z_]+)\s*\]\s*$")
_ASSIGN = re.compile(r"([A-Za-z_][A-Za-z_0-9]*)\s*=(.*)$")


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if line.strip():
            indent = len(line) - len(line.lstrip())
            yield no, indent + 1, line.strip()


def _poly(text: str, ring: PolyRing, symbols: dict, no: int, col: int, source: str) -> Polynomial:
    try:
        return parse(text, ring, symbols)
    except PolynomialParseError as exc:
        raise ProblemError(str(exc), no, col + exc.pos, source) from None


def _option_value(v: str):
    v = v.strip()
    if re.fullmatch(r"-?\d+", v):
        return int(v)
    if v.lower() in ("true", "false"):
        return v.lower() == "true"
    return v


def parse_problem(text: str, source: str = "<input>", name: str | None = None) -> Problem:
    sections: dict = {s: [] for s in SECTIONS}
    current = None
    for no, col, line in _lines(text):
        m = _HEADER.match(line)
        if m:
            current = m.group(1).lower()
            if current not in sections:
                raise ProblemError(f"unknown section [{current}]", no, col, source)
            continue
        if current is None:
            raise ProblemError("content before the first section", no, col, source)
        sections[current].append((no, col, line))
    ring_entries = dict()
    for no, col, line in sections["ring"]:
        m = _ASSIGN.match(line)
        if not m:
            raise ProblemError("expected 'key = value'", no, col, source)
        ring_entries[m.group(1)] = (no, col, m.group(2).strip())
    if "variables" not in ring_entries:
        raise ProblemError("[ring] needs 'variables = ...'", 0, 0, source)
    no, col, val = ring_entries["variables"]
    names = [v.strip() for v in val.split(",") if v.strip()]
    weights = None
    if "weights" in ring_entries:
        wno, wcol, wval = ring_entries["weights"]
        try:
            weights = [int(w) for w in wval.split(",")]
        except ValueError:
            raise ProblemError("weights must be integers", wno, wcol, source) from None
    try:
        ring = PolyRing(names, weights)
    except ValueError as exc:
        raise ProblemError(str(exc), no, col, source) from None

    symbols: dict = {}
    for no, col, line in sections["symbols"]:
        m = _ASSIGN.match(line)
        if not m:
            raise ProblemError("expected 'name = polynomial'", no, col, source)
        key = m.group(1)
        if key in ring.names:
            raise ProblemError(f"symbol {key} shadows a variable", no, col, source)
        symbols[key] = _poly(m.group(2), ring, symbols, no, col + m.start(2), source)

    rels = [_poly(line, ring, symbols, no, col, source) for no, col, line in sections["relations"]]
    quotient = QuotientContext(ring, rels)

    images: dict = {}
    jacobian = None
    for no, col, line in sections["derivation"]:
        m = _ASSIGN.match(line)
        if not m:
            raise ProblemError("expected 'variable = image'", no, col, source)
        key = m.group(1)
        if key == "jacobian":
            parts = [p.strip() for p in m.group(2).split(",")]
            if len(parts) != ring.nvars - 1:
                raise ProblemError(f"jacobian needs {ring.nvars - 1} polynomials", no, col, source)
            jacobian = [_poly(p, ring, symbols, no, col, source) for p in parts]
            continue
        if key not in ring.names:
            raise ProblemError(f"{key} is not a ring variable", no, col, source)
        images[key] = _poly(m.group(2), ring, symbols, no, col + m.start(2), source)
    if jacobian is not None:
        if images:
            raise ProblemError("give either images or a jacobian, not both", 0, 0, source)
        images = jacobian_images(ring, jacobian)
    try:
        D = Derivation(ring, images, quotient)
    except ValueError as exc:
        raise ProblemError(str(exc), 0, 0, source) from None

    kernel = None
    if sections["kernel"]:
        gens, labels = [], []
        for no, col, line in sections["kernel"]:
            m = _ASSIGN.match(line)
            if m:
                labels.append(m.group(1))
                gens.append(_poly(m.group(2), ring, symbols, no, col + m.start(2), source))
            else:
                labels.append(f"a{len(gens) + 1}")
                gens.append(_poly(line, ring, symbols, no, col, source))
        for g, (no, col, _) in zip(gens, sections["kernel"]):
            if not D.apply(g).is_zero():
                raise ProblemError(f"kernel generator {g} is not annihilated by D", no, col, source)
        kernel = SubalgebraPresentation(gens, quotient, labels, ring)

    options = {}
    for no, col, line in sections["options"]:
        m = _ASSIGN.match(line)
        if not m:
            raise ProblemError("expected 'key = value'", no, col, source)
        options[m.group(1)] = _option_value(m.group(2))
    return Problem(name or Path(source).stem, ring, quotient, D, symbols, kernel, options)


def jacobian_images(ring: PolyRing, polys) -> dict:
    """Images of D(h) = det(d(p_1, ..., p_{n-1}, h)/d(x)) on the variables."""
    n = ring.nvars
    rows = [[p.diff(i) for i in range(n)] for p in polys]
    images = {}
    for k, name in enumerate(ring.names):
        # expand along the last row, which is the unit vector e_k
        minor = [[row[j] for j in range(n) if j != k] for row in rows]
        images[name] = (-1) ** (n - 1 + k) * _det(minor, ring)
    return images


def _det(mat, ring: PolyRing) -> Polynomial:
    if not mat:
        return ring.one()
    if len(mat) == 1:
        return mat[0][0]
    total = ring.zero()
    for j in range(len(mat)):
        sub = [row[:j] + row[j + 1:] for row in mat[1:]]
        term = mat[0][j] * _det(sub, ring)
        total = total + term if j % 2 == 0 else total - term
    return total


def load_problem(path) -> Problem:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ProblemError(f"cannot read file: {exc.strerror}", 0, 0, str(p)) from None
    return parse_problem(text, str(p), p.stem)


FIXTURES = ("xdy", "ydy", "one_two", "two_five", "dim3", "dim4", "russell", "winkelmann", "triangular", "triangular_t")


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("lndkit") / "fixtures" / f"{name}.lnd"))


def fixture(name: str) -> Problem:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}")
    return load_problem(fixture_path(name))
