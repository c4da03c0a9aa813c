"""Degree-truncated linear algebra over Q, independent of the Groebner code.

Used only to cross-check kernels, degree modules and memberships on small
truncations.  Quotient rings are supported when the relation ideal is
principal: a single polynomial is its own Groebner basis, so plain division
by it gives canonical representatives without calling the engine.
"""
from __future__ import annotations

from itertools import combinations_with_replacement
from typing import Sequence

from gmpy2 import mpq

from .poly import GREVLEX, Polynomial, PolyRing


class Reducer:
    """Canonical representatives modulo at most one relation (grevlex)."""

    def __init__(self, ring: PolyRing, relations: Sequence[Polynomial] = ()):
        rels = [r for r in relations if not r.is_zero()]
        if len(rels) > 1:
            raise NotImplementedError("the oracle handles at most one relation")
        self.ring = ring
        self.rel = rels[0].monic() if rels else None
        if self.rel is not None:
            self.lm = self.rel.leading_monomial(GREVLEX)
            self.tail = {m: c for m, c in self.rel.terms.items() if m != self.lm}

    def reduce(self, p: Polynomial) -> Polynomial:
        if self.rel is None:
            return p
        terms = dict(p.terms)
        key = GREVLEX.key
        lm = self.lm
        out = {}
        while terms:
            m = max(terms, key=key)
            c = terms.pop(m)
            if all(a >= b for a, b in zip(m, lm)):
                q = tuple(a - b for a, b in zip(m, lm))
                for t, ct in self.tail.items():
                    tt = tuple(a + b for a, b in zip(t, q))
                    v = terms.get(tt, 0) - c * ct
                    if v:
                        terms[tt] = v
                    else:
                        terms.pop(tt, None)
            else:
                out[m] = c
        return Polynomial(self.ring, out)

    def is_standard(self, m: tuple) -> bool:
        return self.rel is None or not all(a >= b for a, b in zip(m, self.lm))


def _derive(images: Sequence[Polynomial], p: Polynomial) -> Polynomial:
    out = p.ring.zero()
    for i, im in enumerate(images):
        if not im.is_zero():
            out = out + im * p.diff(i)
    return out


def apply_power(images: Sequence[Polynomial], red: Reducer, p: Polynomial, n: int) -> Polynomial:
    for _ in range(n):
        if p.is_zero():
            break
        p = red.reduce(_derive(images, p))
    return p


def monomials_upto(nvars: int, d: int) -> list:
    out = []
    for deg in range(d + 1):
        for combo in combinations_with_replacement(range(nvars), deg):
            e = [0] * nvars
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return out


class Echelon:
    """Incrementally maintained row-echelon basis of vectors (dict index -> mpq)."""

    def __init__(self):
        self.rows: dict = {}  # pivot -> row (pivot coefficient 1)

    def reduce(self, vec: dict) -> dict:
        vec = dict(vec)
        for piv in sorted(self.rows):
            c = vec.get(piv)
            if c:
                for k, v in self.rows[piv].items():
                    nv = vec.get(k, 0) - c * v
                    if nv:
                        vec[k] = nv
                    else:
                        vec.pop(k, None)
        return vec

    def add(self, vec: dict) -> bool:
        vec = self.reduce(vec)
        if not vec:
            return False
        piv = min(vec)
        inv = mpq(1) / vec[piv]
        row = {k: v * inv for k, v in vec.items()}
        for p, r in self.rows.items():
            c = r.get(piv)
            if c:
                for k, v in row.items():
                    nv = r.get(k, 0) - c * v
                    if nv:
                        r[k] = nv
                    else:
                        r.pop(k, None)
        self.rows[piv] = row
        return True

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)

    def __len__(self):
        return len(self.rows)


def nullspace(columns: Sequence[dict]) -> list:
    """Basis of {c : sum c_j columns[j] = 0}, each as a dict j -> mpq."""
    pivots: dict = {}  # row key -> (column vector reduced, combination)
    basis = []
    for j, col in enumerate(columns):
        vec = dict(col)
        comb = {j: mpq(1)}
        while vec:
            key = min(vec)
            hit = pivots.get(key)
            if hit is None:
                break
            pv, pc = hit
            c = vec[key] / pv[key]
            for k, v in pv.items():
                nv = vec.get(k, 0) - c * v
                if nv:
                    vec[k] = nv
                else:
                    vec.pop(k, None)
            for k, v in pc.items():
                nv = comb.get(k, 0) - c * v
                if nv:
                    comb[k] = nv
                else:
                    comb.pop(k, None)
        if vec:
            pivots[min(vec)] = (vec, comb)
        else:
            basis.append(comb)
    return basis


def truncated_kernel_power(D, n: int, d: int) -> list:
    """Basis of {p : deg p <= d, D^(n+1) p = 0} as polynomials."""
    ring = D.ring
    red = Reducer(ring, D.quotient.relations)
    images = [red.reduce(im) for im in D.images]
    monos = [m for m in monomials_upto(ring.nvars, d) if red.is_standard(m)]
    cols = []
    for m in monos:
        img = apply_power(images, red, ring.monomial(m), n + 1)
        cols.append(dict(img.terms))
    out = []
    for comb in nullspace(cols):
        out.append(Polynomial(ring, {monos[j]: c for j, c in comb.items()}))
    return out


def _products(coeff_gens: Sequence[Polynomial], red: Reducer, d: int) -> list:
    """All monomials in the coefficient generators of degree <= d (by total degree)."""
    out = [coeff_gens[0].ring.one()] if coeff_gens else []
    frontier = list(out)
    seen = set()
    while frontier:
        nxt = []
        for p in frontier:
            for g in coeff_gens:
                q = red.reduce(p * g)
                if q.is_zero() or q.degree() > d:
                    continue
                key = tuple(sorted(q.terms.items()))
                if key in seen:
                    continue
                seen.add(key)
                nxt.append(q)
        out.extend(nxt)
        frontier = nxt
    return out


class TruncatedSpan:
    """sum k[coeff]_{<=d} * generators, cut at total degree d, as a vector space."""

    def __init__(self, generators: Sequence[Polynomial], coeff_generators: Sequence[Polynomial], d: int, relations: Sequence[Polynomial] = ()):
        self.d = d
        self.echelon = Echelon()
        gens = list(generators)
        if not gens:
            self.red = None
            return
        self.red = red = Reducer(gens[0].ring, relations)
        coeffs = _products(list(coeff_generators), red, d) if coeff_generators else [gens[0].ring.one()]
        for g in gens:
            g = red.reduce(g)
            for a in coeffs:
                p = red.reduce(a * g)
                if p.is_zero() or p.degree() > d:
                    continue
                self.echelon.add(dict(p.terms))

    def contains(self, h: Polynomial) -> bool:
        if self.red is not None:
            h = self.red.reduce(h)
        return h.is_zero() or self.echelon.contains(dict(h.terms))


def truncated_membership(h: Polynomial, generators: Sequence[Polynomial], coeff_generators: Sequence[Polynomial], d: int, relations: Sequence[Polynomial] = ()) -> bool:
    """h in sum k[coeff]_{<=d} * generators, truncated at total degree d.

    A True answer always has a certificate; False can be wrong when the true
    coefficients need degrees beyond d.
    """
    if h.is_zero():
        return True
    return TruncatedSpan(generators, coeff_generators, d, relations).contains(h)


def span_contains(basis: Sequence[Polynomial], h: Polynomial) -> bool:
    ech = Echelon()
    for p in basis:
        ech.add(dict(p.terms))
    return ech.contains(dict(h.terms))


def _graded_vec(p: Polynomial) -> dict:
    # keyed so that a row's pivot is one of its top-degree monomials
    return {(-sum(m), m): c for m, c in p.terms.items()}


def graded_residual(basis: Sequence[Polynomial], multipliers: Sequence[Polynomial], d: int, products: Sequence[Polynomial] = ()) -> list:
    """Rows of span(basis) not reached from `products` and lower rows.

    Rows of a degree-graded echelon form are scanned by degree; a row is kept
    unless it lies in the span of `products` and of g * r, for g in
    `multipliers` and earlier rows r (cut at degree d). If M is a module over
    a ring holding the multipliers, contains `products` and every kept row,
    then M contains span(basis).
    """
    if not basis:
        return []
    ring = basis[0].ring
    ech = Echelon()
    for p in basis:
        ech.add(_graded_vec(p))
    rows = [Polynomial(ring, {m: c for (_, m), c in r.items()}) for r in ech.rows.values()]
    rows.sort(key=lambda p: p.degree())
    span = Echelon()
    for p in products:
        span.add(_graded_vec(p))
    out = []
    for p in rows:
        if span.add(_graded_vec(p)):
            out.append(p)
        for g in multipliers:
            q = g * p
            if q.degree() <= d:
                span.add(_graded_vec(q))
    return out
