"""Derivations: application, nilpotency, deg_D, local slices, kernels, ideals in A."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from .groebner import Ideal, QuotientContext, polynomial_gcd
from .poly import AmbientMismatchError, Polynomial, PolyRing, divide_exact, parse
from .subalg import (
    AIdeal,
    NotInSubalgebraError,
    SubalgebraPresentation,
    SubmoduleOverA,
    prune_generators,
)

log = logging.getLogger(__name__)

NEG_INF = -math.inf


class IllDefinedDerivationError(ValueError):
    pass


class NotVerifiedError(RuntimeError):
    """Local nilpotency could not be confirmed within the cap."""


class NoSliceError(ValueError):
    pass


class NotASliceError(ValueError):
    pass


class Derivation:
    """k-derivation of ring/J given by the images of the variables."""

    def __init__(self, ring: PolyRing, images, quotient: QuotientContext | None = None):
        if quotient is None:
            quotient = QuotientContext(ring)
        if isinstance(images, Mapping):
            imgs = [images.get(name, 0) for name in ring.names]
        else:
            imgs = list(images)
        if len(imgs) != ring.nvars:
            raise ValueError(f"expected {ring.nvars} images, got {len(imgs)}")
        conv = []
        for im in imgs:
            if isinstance(im, str):
                im = parse(im, ring)
            elif not isinstance(im, Polynomial):
                im = ring.constant(im)
            if im.ring != ring:
                raise AmbientMismatchError("image lives in another ring")
            conv.append(quotient.normal_form(im))
        self.ring = ring
        self.quotient = quotient
        self.images = tuple(conv)
        self.witnesses: dict | None = None
        for rel in quotient.relations:
            if not self.apply(rel).is_zero():
                raise IllDefinedDerivationError(f"D does not preserve the relation {rel} = 0")

    def __repr__(self):
        parts = [f"{n}->{im}" for n, im in zip(self.ring.names, self.images) if not im.is_zero()]
        return "Derivation(" + ", ".join(parts) + ")"

    def is_zero(self) -> bool:
        return all(im.is_zero() for im in self.images)

    def apply(self, p: Polynomial) -> Polynomial:
        if p.ring != self.ring:
            raise AmbientMismatchError(f"{p.ring!r} is not {self.ring!r}")
        out = self.ring.zero()
        for i, im in enumerate(self.images):
            if not im.is_zero():
                d = p.diff(i)
                if not d.is_zero():
                    out = out + im * d
        return self.quotient.normal_form(out)

    __call__ = apply

    def apply_power(self, p: Polynomial, n: int) -> Polynomial:
        for _ in range(n):
            if p.is_zero():
                break
            p = self.apply(p)
        return p

    def verify_locally_nilpotent(self, cap: int = 512) -> dict:
        """Minimal e with D^e(x_i) = 0 for each variable."""
        if self.witnesses is not None:
            return dict(self.witnesses)
        out = {}
        for i, name in enumerate(self.ring.names):
            p = self.quotient.normal_form(self.ring.gen(i))
            e = 0
            while not p.is_zero():
                if e >= cap:
                    raise NotVerifiedError(f"not verified within cap {cap}: D^{cap}({name}) != 0")
                p = self.apply(p)
                e += 1
            out[name] = e
        self.witnesses = out
        return dict(out)

    def is_verified(self) -> bool:
        return self.witnesses is not None

    def degree_bound(self, p: Polynomial) -> int:
        w = self.verify_locally_nilpotent()
        degs = [w[n] - 1 for n in self.ring.names]
        return max((sum(e * max(d, 0) for e, d in zip(m, degs)) for m in p.terms), default=0)

    def deg(self, p: Polynomial):
        """deg_D(p): least n with D^(n+1) p = 0; -inf for p = 0."""
        p = self.quotient.normal_form(p)
        if p.is_zero():
            return NEG_INF
        bound = self.degree_bound(p)
        n = 0
        while True:
            q = self.apply(p)
            if q.is_zero():
                return n
            n += 1
            if n > bound:
                raise NotVerifiedError(f"deg_D exceeded its bound {bound}")
            p = q

    def extend(self, ring: PolyRing, extra_images: Sequence, quotient: QuotientContext | None = None) -> Derivation:
        """Derivation of a ring with appended variables; old images are embedded."""
        old = [ring.embed(im) for im in self.images]
        new = []
        for im in extra_images:
            new.append(parse(im, ring) if isinstance(im, str) else im)
        if quotient is None:
            quotient = QuotientContext(ring, [ring.embed(r) for r in self.quotient.relations])
        return Derivation(ring, old + new, quotient)


def apply(D: Derivation, p: Polynomial) -> Polynomial:
    return D.apply(p)


def apply_power(D: Derivation, p: Polynomial, n: int) -> Polynomial:
    return D.apply_power(p, n)


def verify_locally_nilpotent(D: Derivation, cap: int = 512) -> dict:
    return D.verify_locally_nilpotent(cap)


def deg_D(D: Derivation, p: Polynomial):
    return D.deg(p)


@dataclass(frozen=True)
class LocalSlice:
    r: Polynomial
    f: Polynomial
    factors: tuple = ()  # kernel elements split off while stripping r

    def __str__(self):
        return f"r = {self.r}, Dr = {self.f}"


def _is_local_slice(D: Derivation, c: Polynomial) -> bool:
    dc = D.apply(c)
    return not dc.is_zero() and D.apply(dc).is_zero()


def _strip(D: Derivation, c: Polynomial, kernel: Sequence[Polynomial]) -> Polynomial:
    """Divide out kernel generators (exact division keeps D^2 c = 0), then scale monic."""
    changed = True
    while changed:
        changed = False
        for g in kernel:
            if g.is_constant():
                continue
            q = divide_exact(c, g)
            if q is not None and not q.is_constant():
                c = q
                changed = True
    return c.monic()


def find_local_slice(D: Derivation, kernel: Sequence[Polynomial] = (), extra: Sequence[Polynomial] = ()) -> LocalSlice:
    """First local slice among variables, then iterated images, then ``extra``.

    Kernel generators are divided out of the chosen candidate when exact.
    """
    if D.is_zero():
        raise NoSliceError("the zero derivation has no local slice")
    wit = D.verify_locally_nilpotent()
    ring = D.ring
    for i in range(ring.nvars):
        x = D.quotient.normal_form(ring.gen(i))
        if _is_local_slice(D, x):
            return LocalSlice(x, D.apply(x))
    chosen = None
    for i, name in enumerate(ring.names):
        e = wit[name]
        if e < 3:
            continue
        powers = [D.quotient.normal_form(ring.gen(i))]
        for _ in range(e - 1):
            powers.append(D.apply(powers[-1]))
        for j in range(e - 1, 0, -1):
            if _is_local_slice(D, powers[j]):
                chosen = powers[j]
                break
        if chosen is not None:
            break
    if chosen is None:
        for c in extra:
            if _is_local_slice(D, c):
                chosen = c
                break
    if chosen is None:
        raise NoSliceError("no local slice found by the search policy")
    r = _strip(D, chosen, kernel)
    r, factors = _gcd_strip(D, r)
    return LocalSlice(r, D.apply(r), factors)


def _gcd_strip(D: Derivation, r: Polynomial):
    """Remove g = gcd(r, Dr) from r while it is nonconstant.

    g divides Dr, which lies in the factorially closed kernel, so g does too.
    Only done over a polynomial ring, where gcds exist.
    """
    if not D.quotient.is_trivial():
        return r, ()
    f0 = D.apply(r)
    found = []
    while True:
        g = polynomial_gcd(r, D.apply(r))
        if g.is_constant():
            break
        r = divide_exact(r, g)
        if g not in found:
            found.append(g)
    if not found:
        return r, ()
    rest = f0
    for g in found:
        rest = _divide_out(rest, g)
    if not rest.is_constant() and rest.monic() not in found:
        found.append(rest.monic())
    return r.monic(), tuple(found)


def dixmier_map(D: Derivation, s: Polynomial, b: Polynomial) -> Polynomial:
    """pi_s(b) = sum (-1)^i / i! D^i(b) s^i, for a slice s (Ds = 1)."""
    if D.apply(s) != 1:
        raise NotASliceError(f"D({s}) is not 1")
    out = D.ring.zero()
    term = D.quotient.normal_form(b)
    i = 0
    spow = D.ring.one()
    fact = 1
    while not term.is_zero():
        out = out + term * spow * mpq((-1) ** i, fact)
        i += 1
        fact *= i
        spow = spow * s
        term = D.apply(term)
    return D.quotient.normal_form(out)


def slice_coordinates(D: Derivation, s: Polynomial, b: Polynomial) -> list:
    """Coefficients c_i in ker D with b = sum c_i s^i, where Ds = 1.

    Solved top down from D^k b = sum_{j>=k} c_j j!/(j-k)! s^(j-k);
    the list has deg_D(b) + 1 entries.
    """
    if D.apply(s) != 1:
        raise NotASliceError(f"D({s}) is not 1")
    nf = D.quotient.normal_form
    powers = []
    term = nf(b)
    while not term.is_zero():
        powers.append(term)
        term = D.apply(term)
    m = len(powers) - 1
    spow = [D.ring.one()]
    for _ in range(m):
        spow.append(nf(spow[-1] * s))
    coords = [None] * (m + 1)
    for k in range(m, -1, -1):
        rest = powers[k]
        for j in range(k + 1, m + 1):
            rest = rest - coords[j] * spow[j - k] * mpq(_falling(j, k))
        coords[k] = nf(rest * mpq(1, _falling(k, k)))
    return coords


def _falling(j: int, r: int) -> int:
    out = 1
    for i in range(j - r + 1, j + 1):
        out *= i
    return out


def cleared_dixmier(D: Derivation, sl: LocalSlice, b: Polynomial) -> Polynomial:
    """f^d * pi_r(b) with d = deg_D b: an element of A without denominators."""
    d = D.deg(b)
    if d == NEG_INF:
        return D.ring.zero()
    out = D.ring.zero()
    term = D.quotient.normal_form(b)
    fact = 1
    for i in range(d + 1):
        if i:
            fact *= i
        out = out + term * sl.r ** i * sl.f ** (d - i) * mpq((-1) ** i, fact)
        term = D.apply(term)
    return D.quotient.normal_form(out)


def _divide_out(p: Polynomial, f: Polynomial) -> Polynomial:
    if f.is_constant() or p.is_zero():
        return p
    while True:
        q = divide_exact(p, f)
        if q is None:
            return p
        p = q


@dataclass
class KernelResult:
    algebra: SubalgebraPresentation
    certified: bool
    rounds: int
    slice: LocalSlice | None


def kernel_generators(D: Derivation, cap: int = 16, names: Sequence[str] | None = None) -> KernelResult:
    """Generators of ker D, grown until f B ∩ A_i = f A_i (f = Dr).

    Raises nothing on cap: the result is flagged non-certified instead.
    """
    ring = D.ring
    D.verify_locally_nilpotent()
    if D.is_zero():
        alg = SubalgebraPresentation(list(ring.gens()), D.quotient, ring=ring)
        return KernelResult(alg, True, 0, None)
    sl = find_local_slice(D)
    f = sl.f
    seeds = [f, *sl.factors]
    for i in range(ring.nvars):
        g = cleared_dixmier(D, sl, ring.gen(i))
        for h in (f, *sl.factors):
            g = _divide_out(g, h)
        if not g.is_constant():
            seeds.append(g.monic())
    for fac in _visible_factors(f):
        seeds.append(fac)
    alg = SubalgebraPresentation(_dedupe(seeds), D.quotient, ring=ring)
    alg = _prune(alg)
    for rnd in range(1, cap + 1):
        M = SubmoduleOverA(alg, [ring.one()])
        cands = M.colon_candidates(f)
        new = []
        for s in sorted(cands, key=lambda p: (p.degree(), len(p))):
            s = D.quotient.normal_form(s)
            if s.is_constant():
                continue
            probe = alg.adjoin(new) if new else alg
            if not probe.contains(s):
                new.append(s.monic())
        if not new:
            alg.certified = True
            return KernelResult(_rename(_prune(alg), names), True, rnd, sl)
        log.debug("kernel round %d adjoins %s", rnd, new)
        alg = _prune(alg.adjoin(new))
    alg.certified = False
    return KernelResult(_rename(alg, names), False, cap, sl)


def _visible_factors(f: Polynomial) -> list:
    """Variables dividing f (cheap factors worth seeding)."""
    out = []
    for i in range(f.ring.nvars):
        x = f.ring.gen(i)
        if divide_exact(f, x) is not None and not (f - x * (f.leading_coefficient())).is_zero():
            out.append(x)
    return out


def _dedupe(ps: Iterable[Polynomial]) -> list:
    seen = []
    for p in ps:
        p = p.monic()
        if not p.is_constant() and p not in seen:
            seen.append(p)
    return seen


def _prune(alg: SubalgebraPresentation) -> SubalgebraPresentation:
    out = prune_generators(alg)
    gens = sorted(out.generators, key=lambda p: (p.degree(), str(p)))
    if list(gens) == list(out.generators):
        return out
    res = SubalgebraPresentation(gens, alg.quotient, ring=alg.ring)
    res.certified = alg.certified
    return res


def _rename(alg: SubalgebraPresentation, names: Sequence[str] | None) -> SubalgebraPresentation:
    if names is None or len(names) != alg.m:
        return alg
    out = SubalgebraPresentation(alg.generators, alg.quotient, list(names), alg.ring)
    out.certified = alg.certified
    return out


# ---------------------------------------------------------------- ideals of A


def ideal_membership_in_A(h: Polynomial, generators: Iterable[Polynomial], A: SubalgebraPresentation) -> bool:
    if not A.contains(h):
        raise NotInSubalgebraError(f"{h} is not in A")
    return AIdeal(A, generators).contains(h)


def minimize_ideal_generators(A: SubalgebraPresentation, gens: Iterable[Polynomial]) -> list:
    """Greedy removal of generators lying in the ideal of the rest (largest first)."""
    uniq = []
    for g in gens:
        if g.is_zero():
            continue
        g = g.monic()
        if g not in uniq:
            uniq.append(g)
    gens = sorted(uniq, key=lambda p: (p.degree(), str(p)))
    for g in sorted(gens, key=lambda p: (p.degree(), str(p)), reverse=True):
        rest = [h for h in gens if h != g]
        if rest and AIdeal(A, rest).contains(g):
            gens = rest
    return gens


def image_ideal(D: Derivation, A: SubalgebraPresentation, n: int, module=None, **kw) -> list:
    """Generators of I_n = D^n F_n, as elements of A."""
    if module is None:
        from .degmod import degree_module

        module = degree_module(D, A, n, **kw)
    gens = getattr(module, "generators", module)
    return minimize_ideal_generators(A, [D.apply_power(g, n) for g in gens])


def plinth_ideal(D: Derivation, A: SubalgebraPresentation, module=None, **kw) -> list:
    return image_ideal(D, A, 1, module, **kw)


def fixed_point_ideal(D: Derivation) -> Ideal:
    """(DB): generated by the images of the variables (plus the ring relations)."""
    gens = [im for im in D.images if not im.is_zero()] + list(D.quotient.relations)
    return Ideal(gens, D.ring)


def principal_generator(A: SubalgebraPresentation, gens: Sequence[Polynomial]):
    """(True, g) if the ideal of A is principal, (False, None) if not,
    (None, None) when undecided (A not a polynomial ring in its tags)."""
    if not A.is_polynomial_ring():
        return None, None
    tags = []
    for g in gens:
        t = A.rewrite(g)
        if t is None:
            raise NotInSubalgebraError(f"{g} is not in A")
        if not t.is_zero():
            tags.append(t)
    if not tags:
        return True, A.ring.zero()
    g = tags[0]
    for t in tags[1:]:
        g = polynomial_gcd(g, t)
    ideal = Ideal(tags, A.tag_ring)
    if ideal.contains(g):
        return True, A.evaluate(g)
    return False, None
