"""Degree modules F_n = ker D^(n+1), degree resolutions, Gr_D truncations."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping

from gmpy2 import mpq

from . import groebner
from .lnd import (
    Derivation,
    LocalSlice,
    find_local_slice,
    slice_coordinates,
    minimize_ideal_generators,
    principal_generator,
)
from .poly import Polynomial, divide_exact
from .subalg import AIdeal, CapExceededError, SubalgebraPresentation, SubmoduleOverA, prune_generators

log = logging.getLogger(__name__)

POLICIES = ("auto", "products", "slice-powers")


@dataclass
class DegreeModule:
    """F_n as an A-module: generators with their deg_D values."""

    n: int
    module: SubmoduleOverA
    degrees: tuple
    certified: bool
    steps: int = 0
    policy: str = "slice-powers"
    slice: Polynomial | None = None  # set when D s = 1; then F_n = sum A s^i
    derivation: Derivation | None = None

    @property
    def generators(self) -> tuple:
        return self.module.generators

    def contains(self, h: Polynomial) -> bool:
        if self.slice is not None:
            # B = A[s], so membership is read off the s-expansion
            coords = slice_coordinates(self.derivation, self.slice, h)
            if groebner.POSTHOC_CHECK:
                total = h.ring.zero()
                for c in reversed(coords):
                    if not self.derivation.apply(c).is_zero():
                        raise groebner.GroebnerError("slice coefficient outside the kernel")
                    total = total * self.slice + c
                if self.derivation.quotient.normal_form(total - h) != 0:
                    raise groebner.GroebnerError(f"slice expansion of {h} does not add up")
            return len(coords) <= self.n + 1
        return self.module.contains(h)

    __contains__ = contains

    def is_d_basis(self) -> bool:
        return d_basis_check(self)

    def __len__(self):
        return len(self.module)


def d_basis_check(M: DegreeModule) -> bool:
    """Generator degrees pairwise distinct (hence A-independent)."""
    return len(set(M.degrees)) == len(M.degrees)


def _sort_key(D: Derivation):
    return lambda p: (D.deg(p), p.degree(), len(p), str(p))


class Filtration:
    """Lazily computed degree modules of D over a certified kernel A."""

    def __init__(self, D: Derivation, A: SubalgebraPresentation, policy: str = "auto", slice: LocalSlice | None = None, cap: int = 64, interleave: bool = False, minimize: bool = True):
        if policy not in POLICIES:
            raise ValueError(f"unknown policy {policy!r}; expected one of {POLICIES}")
        D.verify_locally_nilpotent()
        self.D = D
        self.A = A
        self.policy = policy
        self.cap = cap
        self.interleave = interleave
        self.minimize = minimize
        self.modules: dict[int, DegreeModule] = {}
        if slice is None and not D.is_zero():
            slice = find_local_slice(D, kernel=A.generators)
        self.slice = slice
        self._factors = None

    def factors(self) -> list:
        """Saturating elements: f itself, or its visible kernel-generator factors."""
        if self._factors is None:
            f = self.slice.f
            if not self.interleave:
                self._factors = [f]
            else:
                facs = []
                rest = f
                for g in self.A.generators:
                    while True:
                        q = divide_exact(rest, g)
                        if q is None:
                            break
                        if g not in facs:
                            facs.append(g)
                        rest = q
                if not rest.is_constant():
                    facs.append(rest)
                self._factors = facs or [f]
        return self._factors

    def initial_module(self, n: int, policy: str | None = None) -> SubmoduleOverA:
        policy = policy or self.policy
        ring = self.D.ring
        if n == 0 or self.D.is_zero():
            return SubmoduleOverA(self.A, [ring.one()])
        r = self.slice.r
        if policy == "auto" or n < 2:
            # products of lower levels need F_1 to exist first
            policy = "products" if n >= 2 else "slice-powers"
        if policy == "slice-powers":
            return SubmoduleOverA(self.A, [r ** i for i in range(n + 1)])
        gens = list(self.module(n - 1).generators)
        deg = self.D.deg
        for i in range(1, n // 2 + 1):
            for g in self.module(i).generators:
                for h in self.module(n - i).generators:
                    if deg(g) + deg(h) == n:
                        gens.append(g * h)
        return SubmoduleOverA(self.A, gens)

    def module(self, n: int) -> DegreeModule:
        if n < 0:
            raise ValueError("n must be non-negative")
        hit = self.modules.get(n)
        if hit is not None:
            return hit
        if n == 0 or self.D.is_zero():
            M = SubmoduleOverA(self.A, [self.D.ring.one()])
            M.certified = True
            out = DegreeModule(n, M, (0,), True, 0, "kernel")
            self._attach_slice(out)
            self.modules[n] = out
            return out
        pol = self.policy if self.policy != "auto" and n >= 2 else ("products" if n >= 2 else "slice-powers")
        if self.slice.f.is_constant():
            # B = A[r]: the powers of r are already a D-basis
            pol = "slice-powers"
        M = self.initial_module(n, pol)
        steps = 0
        facs = self.factors()
        while True:
            changed_any = False
            for f in facs:
                steps += 1
                if steps > self.cap:
                    raise CapExceededError(f"F_{n} chain not stable after {self.cap} steps")
                M, changed = M.saturation_step(f)
                changed_any = changed_any or changed
            if not changed_any:
                break
        certified = True
        deg = self.D.deg
        degs = [deg(g) for g in M.generators]
        if self.minimize and len(set(degs)) != len(degs):
            M = M.minimize(priority=_sort_key(self.D))
        gens = sorted(M.generators, key=_sort_key(self.D))
        M2 = SubmoduleOverA(self.A, gens)
        M2.certified = certified
        out = DegreeModule(n, M2, tuple(deg(g) for g in gens), certified, steps, pol)
        if self.slice.f.is_constant():
            self._attach_slice(out)
        log.info("F_%d: %d generators, degrees %s, %d steps", n, len(gens), out.degrees, steps)
        self.modules[n] = out
        return out

    def _attach_slice(self, M: DegreeModule) -> None:
        sl = self.slice
        if sl is not None and sl.f.is_constant():
            M.slice = sl.r * (mpq(1) / sl.f.leading_coefficient())
            M.derivation = self.D

    def image_ideal(self, n: int) -> list:
        gens = self.module(n).generators
        return minimize_ideal_generators(self.A, [self.D.apply_power(g, n) for g in gens])


def initial_module(D: Derivation, A: SubalgebraPresentation, n: int, policy: str = "auto", filtration: Filtration | None = None) -> SubmoduleOverA:
    filt = filtration or Filtration(D, A, policy)
    return filt.initial_module(n, policy)


def degree_module(D: Derivation, A: SubalgebraPresentation, n: int, policy: str = "auto", filtration: Filtration | None = None, **kw) -> DegreeModule:
    filt = filtration or Filtration(D, A, policy, **kw)
    return filt.module(n)


# ---------------------------------------------------------------- resolution


@dataclass
class DegreeResolution:
    jumps: list  # N_B(A)
    chain: list  # (n, SubalgebraPresentation, adjoined generators)
    complete: bool
    filtration: Filtration
    max_n: int

    @property
    def index(self) -> int:
        return len(self.jumps) - 1

    def algebra(self, n: int) -> SubalgebraPresentation:
        """B_n = k[F_n]."""
        best = self.chain[0][1]
        for m, alg, _ in self.chain:
            if m <= n:
                best = alg
        return best


def _labeler(names: Mapping | None, D: Derivation):
    table = {}
    if names:
        for nm, p in names.items():
            table[p] = nm
            table[-p] = nm
    ring = D.ring
    for i, nm in enumerate(ring.names):
        x = ring.gen(i)
        table.setdefault(x, nm)

    def label(p: Polynomial, n: int, k: int) -> str:
        got = table.get(p)
        if got is None:
            got = table.get(p.monic())
        return got if got is not None else f"w{n}_{k}"

    return label


def degree_resolution(D: Derivation, A: SubalgebraPresentation, max_n: int = 32, policy: str = "auto", filtration: Filtration | None = None, names: Mapping | None = None) -> DegreeResolution:
    """Chain A = B_0 ⊂ B_1 ⊂ ... until every variable lies in B_n."""
    filt = filtration or Filtration(D, A, policy)
    ring = D.ring
    label = _labeler(names, D)
    cur = A
    chain = [(0, A, [])]
    jumps = [0]

    def done(alg):
        return all(alg.contains(x) for x in ring.gens())

    if done(cur):
        return DegreeResolution(jumps, chain, True, filt, max_n)
    used = set(cur.labels)
    for n in range(1, max_n + 1):
        Fn = filt.module(n)
        added = []
        for g in Fn.generators:
            if g.is_constant() or cur.contains(g):
                continue
            nm = label(g, n, len(added) + 1)
            while nm in used:
                nm = nm + "'"
            used.add(nm)
            cur = cur.adjoin([g], [nm])
            added.append(g)
        if added:
            cur = prune_generators(cur)
            jumps.append(n)
            chain.append((n, cur, added))
            log.info("B_%d adjoins %s", n, [str(g) for g in added])
        if done(cur):
            return DegreeResolution(jumps, chain, True, filt, max_n)
    return DegreeResolution(jumps, chain, False, filt, max_n)


# ---------------------------------------------------------------- Gr_D


@dataclass
class GradedRingTruncation:
    N: int
    ideals: dict  # n -> generators of I_n
    generators: list  # (element of A, weight)


def graded_ring_truncation(D: Derivation, A: SubalgebraPresentation, N: int, filtration: Filtration | None = None) -> GradedRingTruncation:
    """Minimal weighted generators of the sum of I_n t^n for n <= N."""
    filt = filtration or Filtration(D, A)
    ideals = {n: filt.image_ideal(n) for n in range(N + 1)}
    kept: list = []
    span = {0: [D.ring.one()]}
    for n in range(1, N + 1):
        prods = []
        for a, w in kept:
            for c in span.get(n - w, []):
                prods.append(a * c)
        prods = minimize_ideal_generators(A, prods) if prods else []
        for a in ideals[n]:
            if prods and AIdeal(A, prods).contains(a):
                continue
            kept.append((a, n))
            prods.append(a)
        span[n] = prods
    return GradedRingTruncation(N, ideals, kept)


# ---------------------------------------------------------------- diagnostics


@dataclass
class FreenessReport:
    rows: list = field(default_factory=list)  # dicts per n

    def all_free(self) -> bool:
        return all(r["d_basis"] and r["degrees_full"] for r in self.rows)


def freeness_diagnostics(D: Derivation, A: SubalgebraPresentation, N: int, filtration: Filtration | None = None) -> FreenessReport:
    filt = filtration or Filtration(D, A)
    rep = FreenessReport()
    for n in range(N + 1):
        M = filt.module(n)
        principal, gen = principal_generator(A, filt.image_ideal(n))
        rep.rows.append({
            "n": n,
            "degrees": list(M.degrees),
            "degrees_full": sorted(M.degrees) == list(range(n + 1)),
            "d_basis": d_basis_check(M),
            "image_principal": principal,
            "image_generator": gen,
        })
    return rep
