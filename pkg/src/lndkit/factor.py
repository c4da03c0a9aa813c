"""Affine modifications and the canonical factorization of the quotient map."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

from .degmod import DegreeResolution, Filtration, degree_resolution
from .groebner import QuotientContext
from .lnd import Derivation, minimize_ideal_generators
from .poly import Polynomial, divide_exact
from .subalg import (
    AIdeal,
    NotInSubalgebraError,
    SubalgebraPresentation,
    algebra_equal,
)

log = logging.getLogger(__name__)

EXPONENT_CAP = 16


class InvalidTripleError(ValueError):
    pass


class ModificationNotFoundError(RuntimeError):
    pass


@dataclass
class AffineTriple:
    """(B'', I, f): base algebra, center ideal generators in B'', divisor f in I."""

    base: SubalgebraPresentation
    center: tuple
    f: Polynomial

    def __post_init__(self):
        self.center = tuple(self.center)
        if self.f.is_zero():
            raise InvalidTripleError("the divisor must be nonzero")
        if not self.center:
            raise InvalidTripleError("the center ideal must be nonzero")

    def center_ideal(self) -> AIdeal:
        return AIdeal(self.base, self.center)

    def validate(self) -> None:
        try:
            ok = self.center_ideal().contains(self.f)
        except NotInSubalgebraError as exc:
            raise InvalidTripleError(str(exc)) from None
        if not ok:
            raise InvalidTripleError(f"{self.f} is not in the center ideal")


# ---------------------------------------------------------------- localization


class Localization:
    """B_h = ring[w]/(J, h*w - 1) with the ambient ring embedded."""

    def __init__(self, quotient: QuotientContext, h: Polynomial):
        ring = quotient.ring
        name = "w"
        while name in ring.names:
            name = name + "_"
        self.base_ring = ring
        self.ring = ring.extend([name])
        self.w = self.ring.gen(name)
        self.h = h
        rels = [self.embed(r) for r in quotient.relations] + [self.embed(h) * self.w - 1]
        self.quotient = QuotientContext(self.ring, rels)

    def embed(self, p: Polynomial) -> Polynomial:
        return self.ring.embed(p)

    def fraction(self, num: Polynomial, den_power: int = 1) -> Polynomial:
        """num / h^den_power."""
        return self.quotient.normal_form(self.embed(num) * self.w ** den_power)

    def algebra(self, gens: Iterable[Polynomial], names: Sequence[str] | None = None) -> SubalgebraPresentation:
        return SubalgebraPresentation(list(gens), self.quotient, names, self.ring)

    def embed_algebra(self, alg: SubalgebraPresentation) -> SubalgebraPresentation:
        return self.algebra([self.embed(g) for g in alg.generators], alg.labels)


@dataclass
class ModifiedRing:
    """Presentation of B''[f^-1 I], inside B when the quotients are exact, else inside B_f."""

    presentation: SubalgebraPresentation
    quotients: tuple
    localization: Localization | None = None

    def same_as(self, target: SubalgebraPresentation) -> bool:
        if self.localization is None:
            return algebra_equal(self.presentation, target)
        return algebra_equal(self.presentation, self.localization.embed_algebra(target))


def _exact_quotient(b: Polynomial, f: Polynomial, quotient: QuotientContext) -> Polynomial | None:
    q = divide_exact(b, f)
    if q is None:
        return None
    return quotient.normal_form(q)


def modification_ring(triple: AffineTriple, quotients: Sequence[Polynomial] | None = None) -> ModifiedRing:
    """B''[b_1/f, ..., b_s/f] for the center generators b_j.

    ``quotients`` may supply known elements q_j of B with f q_j = b_j.
    """
    triple.validate()
    B = triple.base
    ctx = B.quotient
    f = triple.f
    qs = []
    exact = True
    for j, b in enumerate(triple.center):
        q = None
        if quotients is not None:
            q = ctx.normal_form(quotients[j])
            if not ctx.is_zero(f * q - b):
                raise InvalidTripleError(f"{q} is not {b}/{f}")
        else:
            q = _exact_quotient(b, f, ctx)
        if q is None:
            exact = False
            break
        qs.append(q)
    if exact:
        pres = SubalgebraPresentation(list(B.generators) + qs, ctx, None, B.ring)
        return ModifiedRing(pres, tuple(qs))
    loc = Localization(ctx, f)
    fr = [loc.fraction(b) for b in triple.center]
    pres = loc.algebra([loc.embed(g) for g in B.generators] + fr)
    return ModifiedRing(pres, tuple(fr), loc)


def exceptional_ideal(triple: AffineTriple) -> list:
    """Generators of I*B'; in B'' [I/f] this ideal equals f*B'."""
    return [triple.f]


def equivariance_check(D: Derivation, triple: AffineTriple) -> bool:
    """True iff f is invariant and D(I) lies in I (as an ideal of the base)."""
    if not D.apply(triple.f).is_zero():
        raise InvalidTripleError(f"D({triple.f}) != 0")
    ideal = triple.center_ideal()
    for b in triple.center:
        db = D.apply(b)
        if not triple.base.contains(db):
            return False
        if not ideal.contains(db):
            return False
    return True


@dataclass
class ModificationStep:
    triple: AffineTriple
    new_generators: tuple  # elements w_j of B' with f*w_j in I
    exponent: int
    pool_element: Polynomial
    equivariant: bool | None = None
    principal: bool = False
    verified: bool = False

    @property
    def exceptional(self) -> list:
        return exceptional_ideal(self.triple)


def f_pool(A: SubalgebraPresentation, ideals: Iterable[Iterable[Polynomial]]) -> list:
    """Kernel-generator divisors of ideal generators, plus leftover cofactors, by degree."""
    pool: list = []

    def add(p):
        p = p.monic()
        if not p.is_constant() and p not in pool:
            pool.append(p)

    for gens in ideals:
        for a in gens:
            rest = a
            for g in A.generators:
                if g.is_constant():
                    continue
                while True:
                    q = divide_exact(rest, g)
                    if q is None:
                        break
                    add(g)
                    rest = q
            add(rest)
    pool.sort(key=lambda p: (p.degree(), len(p), str(p)))
    return pool


def find_modification(base: SubalgebraPresentation, target: SubalgebraPresentation, pool: Sequence[Polynomial], new: Sequence[Polynomial] | None = None, cap: int = EXPONENT_CAP) -> ModificationStep:
    """Express target = base[f^-1 I] for the first workable f in ``pool``."""
    if new is None:
        new = [g for g in target.generators if not base.contains(g)]
    new = list(new)
    if not new:
        f = pool[0] if pool else base.ring.one()
        t = AffineTriple(base, (f,), f)
        return ModificationStep(t, (), 0, f, principal=True, verified=True)
    for h in pool:
        ms = []
        for w in new:
            hm = h
            found = None
            for m in range(1, cap + 1):
                if base.contains(base.quotient.normal_form(hm * w)):
                    found = m
                    break
                hm = hm * h
            if found is None:
                break
            ms.append(found)
        if len(ms) != len(new):
            continue
        m = max(ms)
        f = h ** m
        center = [f] + [base.quotient.normal_form(f * w) for w in new]
        triple = AffineTriple(base, tuple(center), f)
        quotients = [base.ring.one()] + list(new)
        mod = modification_ring(triple, quotients)
        verified = mod.same_as(target)
        return ModificationStep(triple, tuple(new), m, h, principal=len(new) == 1, verified=verified)
    raise ModificationNotFoundError(
        f"no pool element among {[str(p) for p in pool]} clears the denominators of "
        f"{[str(w) for w in new]} with exponent <= {cap}"
    )


# ---------------------------------------------------------------- composition


def compose_modifications(t1: AffineTriple, t2: AffineTriple) -> AffineTriple:
    """Single triple over t1's base equal to doing t1 and then t2.

    Same base: the result is (B, I*J, f*g), after checking that both
    iterated paths and the direct one agree in B_fg.  If t2 is based on the
    ring produced by t1 (exact quotients only), the result is (B, K, h) with
    h = f^(e+1) g and K = (h, f^e g b, f^(e+1) c), where f^e clears every c in J.
    """
    B = t1.base
    f, g = t1.f, t2.f
    ctx = B.quotient
    if algebra_equal(t2.base, B):
        I, J = t1.center, t2.center
        prod = [ctx.normal_form(a * b) for a in I for b in J]
        fg = ctx.normal_form(f * g)
        composite = AffineTriple(B, tuple(prod), fg)
        loc = Localization(ctx, fg)
        over = [loc.embed(x) for x in B.generators]
        frac_i = [loc.fraction(ctx.normal_form(a * g)) for a in I]
        frac_j = [loc.fraction(ctx.normal_form(b * f)) for b in J]
        path1 = loc.algebra(over + frac_i + frac_j)
        path2 = loc.algebra(over + frac_j + frac_i)
        direct = loc.algebra(over + [loc.fraction(p) for p in prod])
        if not (algebra_equal(path1, path2) and algebra_equal(path1, direct)):
            raise AssertionError("modification square does not commute")
        return composite
    first = modification_ring(t1)
    if first.localization is not None:
        raise InvalidTripleError("sequential composition needs exact quotients in the first step")
    if not first.same_as(t2.base):
        raise InvalidTripleError("second triple is based neither on the first base nor on its modification")
    numerators = list(t2.center) + [g]
    e = 0
    for c in numerators:
        k = 0
        while not B.contains(ctx.normal_form(f ** k * c)):
            k += 1
            if k > EXPONENT_CAP:
                raise InvalidTripleError(f"cannot clear {c} by powers of {f}")
        e = max(e, k)
    fe = f ** e
    h = ctx.normal_form(fe * f * g)
    center = [h] + [ctx.normal_form(fe * g * b) for b in t1.center] + [ctx.normal_form(fe * f * c) for c in t2.center]
    composite = AffineTriple(B, tuple(center), h)
    iterated = modification_ring(t2)
    quotients = [B.ring.one()] + list(first.quotients) + list(iterated.quotients)
    direct = modification_ring(composite, quotients)
    if iterated.localization is None and not algebra_equal(direct.presentation, iterated.presentation):
        raise AssertionError("composite modification does not match the iterated one")
    return composite


# ---------------------------------------------------------------- factorization


@dataclass
class Level:
    n: int
    algebra: SubalgebraPresentation
    adjoined: tuple
    fixed_point_ideal: tuple  # generators of (D B_n) inside B_n


@dataclass
class CanonicalFactorization:
    resolution: DegreeResolution
    levels: list
    steps: list  # ModificationStep for each birational step
    pool: list
    slice_split: bool  # F_1 = A + A r with a single slice generator

    @property
    def index(self) -> int:
        return self.resolution.index


def level_fixed_ideal(D: Derivation, alg: SubalgebraPresentation) -> list:
    """Generators of the ideal of B_n generated by D(B_n)."""
    gens = [D.apply(g) for g in alg.generators]
    return minimize_ideal_generators(alg, [g for g in gens if not g.is_zero()])


def canonical_factorization(D: Derivation, A: SubalgebraPresentation, max_n: int = 32, resolution: DegreeResolution | None = None, names=None, policy: str = "auto") -> CanonicalFactorization:
    res = resolution or degree_resolution(D, A, max_n, policy, names=names)
    filt: Filtration = res.filtration
    levels = []
    for n, alg, added in res.chain:
        fixed = level_fixed_ideal(D, alg) if not D.is_zero() else []
        levels.append(Level(n, alg, tuple(added), tuple(fixed)))
    steps = []
    pool: list = []
    if len(res.chain) > 2:
        ideals = [filt.image_ideal(n) for n in res.jumps[1:]]
        pool = f_pool(A, ideals)
        for (n0, b0, _), (n1, b1, added) in zip(res.chain[1:], res.chain[2:]):
            step = find_modification(b0, b1, pool, added)
            step.equivariant = equivariance_check(D, step.triple)
            steps.append(step)
            log.info("step B_%d -> B_%d: f = %s, I = %s", n0, n1, step.triple.f, [str(c) for c in step.triple.center])
    split = False
    if not D.is_zero():
        F1 = filt.module(1)
        split = len(F1.generators) == 2
    return CanonicalFactorization(res, levels, steps, pool, split)
