"""Finitely generated subalgebras A = k[g_1..g_m] of B = k[x]/J and A-submodules of B.

Everything goes through tag variables: in k[x, Y] we take
T = J + (Y_j - g_j) under a block order with x above Y.  An element h of B
lies in A iff its normal form mod T only involves Y.  Modules M = sum A m_j
are handled in the free module k[x, Y]^(1+m) spanned by the vectors
m_j e_0 + e_j together with T e_0; the order puts position 0 on top, then
coefficient positions (x-part first), then an optional cofactor slot used to
compute {s in B : f s in M}.
"""
from __future__ import annotations

import logging
from typing import Iterable, Sequence

from gmpy2 import mpq

from . import groebner
from .groebner import (
    Ideal,
    QuotientContext,
    TermOrder,
    buchberger,
    elems_of,
    reduce_vector,
)
from .poly import AmbientMismatchError, Polynomial, PolyRing

log = logging.getLogger(__name__)


class NotInSubalgebraError(ValueError):
    pass


class CapExceededError(RuntimeError):
    """An iteration hit its cap before certifying its answer."""


def _grevlex_part(e: Sequence[int]) -> tuple:
    return (sum(e),) + tuple(-v for v in reversed(e))


def _weighted_part(e: Sequence[int], w: Sequence[int]) -> tuple:
    return (sum(a * b for a, b in zip(w, e)),) + tuple(-v for v in reversed(e))


def _fresh_names(base: Sequence[str], taken: Iterable[str]) -> list[str]:
    taken = set(taken)
    out = []
    for name in base:
        while name in taken:
            name = name + "_"
        taken.add(name)
        out.append(name)
    return out


class SubalgebraPresentation:
    """A = k[g_1..g_m] inside B = ring/J, with its tag Groebner basis.

    ``names`` label the tags (the variables of the relation ring); they are
    made distinct from the ambient variable names when needed.
    """

    def __init__(self, generators: Iterable[Polynomial], quotient: QuotientContext | None = None, names: Sequence[str] | None = None, ring: PolyRing | None = None):
        gens = list(generators)
        if ring is None:
            if not gens:
                raise ValueError("ring required for the ground field")
            ring = gens[0].ring
        if quotient is None:
            quotient = QuotientContext(ring)
        if quotient.ring != ring:
            raise AmbientMismatchError("quotient relations live in another ring")
        for g in gens:
            if g.ring != ring:
                raise AmbientMismatchError(f"generator {g} is not in {ring!r}")
        if names is None:
            names = [f"a{j + 1}" for j in range(len(gens))]
        if len(names) != len(gens):
            raise ValueError("one name per generator")
        keep = []
        keep_names = []
        for g, nm in zip(gens, names):
            g = quotient.normal_form(g)
            if g.is_constant():
                continue
            keep.append(g)
            keep_names.append(nm)
        self.ring = ring
        self.quotient = quotient
        self.generators = tuple(keep)
        self.n = ring.nvars
        self.m = len(keep)
        # labels name the tags in the relation ring; the joint ring needs
        # names distinct from the ambient variables
        self.labels = tuple(_fresh_names(keep_names, ()))
        self.tag_names = tuple(_fresh_names(self.labels, ring.names))
        self.tag_weights = tuple(max(1, g.weighted_degree()) for g in keep)
        self.tag_ring = PolyRing(self.labels, self.tag_weights)
        self.big = PolyRing(tuple(ring.names) + self.tag_names, tuple(ring.weights) + self.tag_weights)
        n = self.n
        tw = self.tag_weights

        def key(t):
            return (2,) + _grevlex_part(t[:n]) + _weighted_part(t[n:-1], tw)

        self.order = TermOrder(key, self.big.weights)
        work = [self.lift(rel) for rel in quotient.relations]
        for j, g in enumerate(keep):
            vec = self.lift(g)
            vec = {t: -c for t, c in vec.items()}
            vec[self._tag_term(j)] = vec.get(self._tag_term(j), 0) + mpq(1)
            work.append(vec)
        self._work = work
        self._basis = None
        self._elems_cache = None
        self.certified = True
        self._relations = None

    @property
    def tag_basis(self) -> list:
        if self._basis is None:
            self._basis = buchberger(self._work, self.order)
        return self._basis

    @property
    def _elems(self):
        if self._elems_cache is None:
            self._elems_cache = elems_of(self.tag_basis, self.order)
        return self._elems_cache

    def __repr__(self):
        return f"SubalgebraPresentation({', '.join(map(str, self.generators))})"

    # ---- conversions
    def _tag_term(self, j: int, pos: int = 0) -> tuple:
        e = [0] * (self.n + self.m)
        e[self.n + j] = 1
        return tuple(e) + (pos,)

    def lift(self, p: Polynomial, pos: int = 0) -> dict:
        """Ambient polynomial as an engine vector at ``pos``."""
        if p.ring != self.ring:
            raise AmbientMismatchError(f"{p.ring!r} is not {self.ring!r}")
        pad = (0,) * self.m + (pos,)
        return {mono + pad: c for mono, c in p.terms.items()}

    def lift_tag(self, p: Polynomial, pos: int = 0) -> dict:
        if p.ring != self.tag_ring:
            raise AmbientMismatchError(f"{p.ring!r} is not the tag ring")
        pad = (0,) * self.n
        return {pad + mono + (pos,): c for mono, c in p.terms.items()}

    def is_tag_only(self, t: tuple) -> bool:
        return not any(t[: self.n])

    def _tag_poly(self, terms: Iterable) -> Polynomial:
        n = self.n
        return Polynomial(self.tag_ring, {t[n:-1]: c for t, c in terms})

    def big_to_ambient(self, terms: Iterable) -> Polynomial:
        """Substitute Y_j -> g_j in a k[x, Y] polynomial (given as terms) and reduce mod J."""
        images = list(self.ring.gens()) + list(self.generators)
        p = Polynomial(self.big, {t[:-1]: c for t, c in terms})
        return self.quotient.normal_form(p.compose(images, self.ring))

    # ---- membership
    def normal_form_vector(self, h: Polynomial) -> dict:
        return reduce_vector(self.lift(h), self._elems, self.order)

    def rewrite(self, h: Polynomial) -> Polynomial | None:
        """Polynomial in the tags equal to h in B, or None if h is not in A."""
        nf = self.normal_form_vector(h)
        if not all(self.is_tag_only(t) for t in nf):
            return None
        out = self._tag_poly(nf.items())
        if groebner.POSTHOC_CHECK and self.evaluate(out) != self.quotient.normal_form(h):
            raise groebner.GroebnerError(f"rewriting of {h} does not expand back")
        return out

    def contains(self, h: Polynomial) -> bool:
        return self.rewrite(h) is not None

    __contains__ = contains

    def evaluate(self, p: Polynomial) -> Polynomial:
        """Image in B of a polynomial in the tags."""
        if p.ring != self.tag_ring:
            raise AmbientMismatchError("expected a polynomial in the tag ring")
        return self.quotient.normal_form(p.compose(list(self.generators), self.ring))

    def relation_ideal(self) -> Ideal:
        """Kernel of k[Y] -> A."""
        if self._relations is None:
            rels = [self._tag_poly(v.items()) for v in self.tag_basis if all(self.is_tag_only(t) for t in v)]
            self._relations = Ideal(rels, self.tag_ring)
        return self._relations

    def is_polynomial_ring(self) -> bool:
        return self.relation_ideal().is_zero()

    def equals(self, other: SubalgebraPresentation) -> bool:
        return algebra_equal(self, other)

    def adjoin(self, extra: Iterable[Polynomial], names: Sequence[str] | None = None) -> SubalgebraPresentation:
        extra = list(extra)
        if names is None:
            names = [f"a{self.m + j + 1}" for j in range(len(extra))]
        return SubalgebraPresentation(list(self.generators) + extra, self.quotient, list(self.labels) + list(names), self.ring)

    # ---- ideals of A
    def ideal(self, generators: Iterable[Polynomial]) -> AIdeal:
        return AIdeal(self, generators)


def prune_generators(alg: SubalgebraPresentation, key=None) -> SubalgebraPresentation:
    """Drop generators lying in the subalgebra of the others (largest first)."""
    gens = list(alg.generators)
    labels = list(alg.labels)
    if key is None:
        key = lambda p: (p.degree(), len(p), str(p))
    keep = [True] * len(gens)
    for i in sorted(range(len(gens)), key=lambda i: key(gens[i]), reverse=True):
        rest = [g for j, g in enumerate(gens) if keep[j] and j != i]
        if rest and SubalgebraPresentation(rest, alg.quotient, ring=alg.ring).contains(gens[i]):
            keep[i] = False
    if all(keep):
        return alg
    out = SubalgebraPresentation(
        [g for g, k in zip(gens, keep) if k], alg.quotient, [l for l, k in zip(labels, keep) if k], alg.ring
    )
    out.certified = alg.certified
    return out


def algebra_equal(A1: SubalgebraPresentation, A2: SubalgebraPresentation) -> bool:
    if A1.ring != A2.ring:
        raise AmbientMismatchError("subalgebras of different rings")
    return all(A2.contains(g) for g in A1.generators) and all(A1.contains(g) for g in A2.generators)


class AIdeal:
    """Ideal of A generated by elements of A, presented inside k[Y]/relations."""

    def __init__(self, algebra: SubalgebraPresentation, generators: Iterable[Polynomial]):
        self.algebra = algebra
        gens = []
        tags = []
        for g in generators:
            g = algebra.quotient.normal_form(g)
            if g.is_zero():
                continue
            t = algebra.rewrite(g)
            if t is None:
                raise NotInSubalgebraError(f"{g} is not in the subalgebra")
            gens.append(g)
            tags.append(t)
        self.generators = tuple(gens)
        self.tag_generators = tuple(tags)
        self.tag_ideal = Ideal(list(tags) + list(algebra.relation_ideal().generators), algebra.tag_ring)

    def __repr__(self):
        return f"AIdeal({', '.join(map(str, self.generators))})"

    def contains(self, h: Polynomial) -> bool:
        t = self.algebra.rewrite(h)
        if t is None:
            raise NotInSubalgebraError(f"{h} is not in the subalgebra")
        return self.tag_ideal.contains(t)

    __contains__ = contains

    def equals(self, other: AIdeal) -> bool:
        return all(other.contains(g) for g in self.generators) and all(self.contains(g) for g in other.generators)

    def is_unit(self) -> bool:
        return self.tag_ideal.is_unit()

    def radical_contains(self, h: Polynomial) -> bool:
        from .groebner import radical_contains

        t = self.algebra.rewrite(h)
        if t is None:
            raise NotInSubalgebraError(f"{h} is not in the subalgebra")
        return radical_contains(self.tag_ideal, t)


class SubmoduleOverA:
    """M = A m_1 + ... + A m_k inside B."""

    def __init__(self, algebra: SubalgebraPresentation, generators: Iterable[Polynomial]):
        self.algebra = algebra
        gens = []
        for g in generators:
            if g.ring != algebra.ring:
                raise AmbientMismatchError(f"{g} is not in {algebra.ring!r}")
            g = algebra.quotient.normal_form(g)
            if not g.is_zero():
                gens.append(g)
        self.generators = tuple(gens)
        self.k = len(gens)
        self._order = None
        self._basis = None
        self._elems = None
        self.certified = False

    def __repr__(self):
        return f"SubmoduleOverA({', '.join(map(str, self.generators))})"

    def __len__(self):
        return self.k

    @property
    def cofactor_pos(self) -> int:
        return self.k + 1

    def order(self) -> TermOrder:
        if self._order is None:
            A = self.algebra
            n, tw, c = A.n, A.tag_weights, self.cofactor_pos

            def key(t):
                pos = t[-1]
                xk = _grevlex_part(t[:n])
                yk = _weighted_part(t[n:-1], tw)
                if pos == 0:
                    return (2,) + xk + yk
                if pos < c:
                    return (1,) + xk + yk + (-pos,)
                return (0,) + xk + yk

            shifts = [0] + [g.weighted_degree() for g in self.generators]
            self._order = TermOrder(key, A.big.weights, shifts, rank_one=False)
        return self._order

    def basis(self) -> list[dict]:
        """Reduced Groebner basis of the presentation module (positions 0..k)."""
        if self._basis is None:
            A = self.algebra
            work = []
            for j, g in enumerate(self.generators):
                vec = A.lift(g)
                vec[(0,) * (A.n + A.m) + (j + 1,)] = mpq(1)
                work.append(vec)
            self._basis = buchberger(work, self.order(), prefix=A.tag_basis)
            self._elems = elems_of(self._basis, self.order())
        return self._basis

    def _in_s(self, vec: dict) -> bool:
        A = self.algebra
        return all(t[-1] != 0 and A.is_tag_only(t) for t in vec)

    def coefficients(self, h: Polynomial) -> list[Polynomial] | None:
        """Tag polynomials a_j with h = sum a_j(g) m_j, or None if h is not in M."""
        A = self.algebra
        self.basis()
        nf = reduce_vector(A.lift(A.quotient.normal_form(h)), self._elems, self.order())
        if not self._in_s(nf):
            return None
        parts: list[dict] = [{} for _ in range(self.k)]
        n = A.n
        for t, c in nf.items():
            parts[t[-1] - 1][t[n:-1]] = -c
        out = [Polynomial(A.tag_ring, d) for d in parts]
        if groebner.POSTHOC_CHECK:
            total = sum((A.evaluate(a) * m for a, m in zip(out, self.generators)), A.ring.zero())
            if A.quotient.normal_form(total - h) != 0:
                raise groebner.GroebnerError(f"coefficients of {h} do not expand back")
        return out

    def contains(self, h: Polynomial) -> bool:
        if self.k == 0:
            return self.algebra.quotient.normal_form(h).is_zero()
        return self.coefficients(h) is not None

    __contains__ = contains

    def contains_module(self, other: SubmoduleOverA) -> bool:
        return all(self.contains(g) for g in other.generators)

    def equals(self, other: SubmoduleOverA) -> bool:
        return self.contains_module(other) and other.contains_module(self)

    def syzygies(self) -> list[list[Polynomial]]:
        """Generators of {a in A^k : sum a_j m_j = 0}, as tag polynomials."""
        A = self.algebra
        out = []
        n = A.n
        for vec in self.basis():
            if self._in_s(vec):
                parts: list[dict] = [{} for _ in range(self.k)]
                for t, c in vec.items():
                    parts[t[-1] - 1][t[n:-1]] = c
                out.append([Polynomial(A.tag_ring, d) for d in parts])
        return out

    def colon_candidates(self, f: Polynomial) -> list[Polynomial]:
        """Generators of {s in B : f s in M} as an A-module."""
        A = self.algebra
        f = A.quotient.normal_form(f)
        if f.is_constant() and not f.is_zero():
            return list(self.generators)
        ftag = A.rewrite(f)
        if ftag is None:
            raise NotInSubalgebraError(f"{f} is not in the subalgebra")
        if ftag.is_zero():
            raise ZeroDivisionError("colon by zero")
        if ftag.is_constant():
            return list(self.generators)
        if self.k == 0:
            return []
        c = self.cofactor_pos
        order = self.order()
        gen = A.lift_tag(ftag, 0)
        gen[(0,) * (A.n + A.m) + (c,)] = mpq(1)
        basis = buchberger([gen], order, prefix=self.basis())
        out = []
        for vec in basis:
            lt = order.lead(vec)
            if 0 < lt[-1] < c and A.is_tag_only(lt):
                cof = [(t, -coef) for t, coef in vec.items() if t[-1] == c]
                s = A.big_to_ambient(cof)
                if not s.is_zero():
                    out.append(s)
        return out

    def saturation_step(self, f: Polynomial) -> tuple[SubmoduleOverA, bool]:
        """Adjoin the elements s with f s in M; returns (new module, changed)."""
        f = self.algebra.quotient.normal_form(f)
        if f.is_constant() and not f.is_zero():
            self.certified = True
            return self, False
        cands = self.colon_candidates(f)
        new = []
        for s in sorted(cands, key=lambda p: (p.weighted_degree(), len(p))):
            probe = SubmoduleOverA(self.algebra, list(self.generators) + new) if new else self
            if not probe.contains(s):
                new.append(_normalize(s))
        if not new:
            self.certified = True
            return self, False
        return SubmoduleOverA(self.algebra, list(self.generators) + new), True

    def saturate(self, f: Polynomial, cap: int = 64) -> SubmoduleOverA:
        """Iterate the saturation step until stable; raises CapExceededError at ``cap``."""
        M = self
        for i in range(cap):
            M, changed = M.saturation_step(f)
            log.debug("saturation step %d: %d generators", i, M.k)
            if not changed:
                return M
        raise CapExceededError(f"module not stable after {cap} saturation steps")

    def minimize(self, priority=None) -> SubmoduleOverA:
        """Drop redundant generators greedily (largest ``priority`` first)."""
        gens = list(self.generators)
        if priority is None:
            priority = lambda p: (p.weighted_degree(), len(p))
        for g in sorted(gens, key=priority, reverse=True):
            rest = [h for h in gens if h is not g]
            if SubmoduleOverA(self.algebra, rest).contains(g):
                gens = rest
        out = SubmoduleOverA(self.algebra, gens)
        out.certified = self.certified
        return out


def _normalize(p: Polynomial) -> Polynomial:
    """Scale so the leading coefficient is +-1 when that keeps integers tidy."""
    lc = p.leading_coefficient()
    if lc < 0:
        p = -p
    return p
