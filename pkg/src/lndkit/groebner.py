"""Buchberger engine for ideals of Q[x] and submodules of free modules.

The engine works on *vectors*: dicts mapping a term to an ``mpq``
coefficient, where a term is the exponent tuple followed by the module
position (always 0 for ideals).  Multiplying a term by a monomial is then
plain componentwise addition with a zero-padded exponent tuple.  Orders are
supplied as functions from terms to flat integer tuples, so negated keys can
drive the heaps used during reduction.
"""
from __future__ import annotations

import heapq
import logging
import operator
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from gmpy2 import mpq

from .poly import (
    GREVLEX,
    AmbientMismatchError,
    ModuleOrder,
    MonomialOrder,
    Polynomial,
    PolyRing,
)

log = logging.getLogger(__name__)

# When true every basis returned by :func:`buchberger` is re-checked with the
# S-polynomial criterion before it is handed out.
POSTHOC_CHECK = False
STATS = {"bases": 0, "checked": 0, "pairs": 0, "zero_reductions": 0}

_ge = operator.ge
_add = operator.add
_sub = operator.sub


class GroebnerError(RuntimeError):
    pass


class RankMismatchError(ValueError):
    pass


class TermOrder:
    """Memoized sort keys and sugar degrees for engine terms."""

    __slots__ = ("_keyfunc", "_keys", "_neg", "weights", "shifts", "rank_one")

    def __init__(self, keyfunc: Callable[[tuple], tuple], weights: Sequence[int], shifts: Sequence[int] = (0,), rank_one: bool = True):
        self._keyfunc = keyfunc
        self._keys: dict = {}
        self._neg: dict = {}
        self.weights = tuple(weights)
        self.shifts = tuple(shifts)
        self.rank_one = rank_one

    def key(self, t: tuple) -> tuple:
        k = self._keys.get(t)
        if k is None:
            k = self._keys[t] = self._keyfunc(t)
        return k

    def negkey(self, t: tuple) -> tuple:
        k = self._neg.get(t)
        if k is None:
            k = self._neg[t] = tuple(-v for v in self.key(t))
        return k

    def degree(self, t: tuple) -> int:
        pos = t[-1]
        shift = self.shifts[pos] if pos < len(self.shifts) else 0
        return sum(map(operator.mul, self.weights, t)) + shift

    def lead(self, vec: dict) -> tuple:
        return max(vec, key=self.key)

    def sugar(self, vec: dict) -> int:
        return max(self.degree(t) for t in vec)


def ideal_term_order(order: MonomialOrder, weights: Sequence[int]) -> TermOrder:
    okey = order.key
    return TermOrder(lambda t: okey(t[:-1]), weights)


def module_term_order(order: ModuleOrder, weights: Sequence[int], shifts: Sequence[int] = ()) -> TermOrder:
    okey = order.key
    return TermOrder(lambda t: okey(t[-1], t[:-1]), weights, shifts, rank_one=False)


# ---------------------------------------------------------------- engine


class _Elem:
    __slots__ = ("vec", "lt", "pos", "tail", "sugar")

    def __init__(self, vec: dict, order: TermOrder, sugar: int | None = None):
        lt = order.lead(vec)
        lc = vec[lt]
        if lc != 1:
            inv = mpq(1) / lc
            vec = {t: c * inv for t, c in vec.items()}
        self.vec = vec
        self.lt = lt
        self.pos = lt[-1]
        self.tail = [(t, c) for t, c in vec.items() if t != lt]
        self.sugar = order.sugar(vec) if sugar is None else sugar


def _divides(a: tuple, b: tuple) -> bool:
    """Term ``a`` divides term ``b`` (same position)."""
    return a[-1] == b[-1] and all(map(_ge, b, a))


def _lcm(a: tuple, b: tuple) -> tuple:
    return tuple(map(max, a[:-1], b[:-1])) + (a[-1],)


def _find_reducer(t: tuple, basis: Sequence[_Elem]):
    pos = t[-1]
    for g in basis:
        if g.pos == pos and all(map(_ge, t, g.lt)):
            return g
    return None


def reduce_vector(vec: dict, basis: Sequence[_Elem], order: TermOrder, full: bool = True) -> dict:
    """Normal form of ``vec`` modulo ``basis`` (full reduction by default)."""
    if not vec:
        return {}
    rem = dict(vec)
    negkey = order.negkey
    heap = [(negkey(t), t) for t in rem]
    heapq.heapify(heap)
    out: dict = {}
    while heap:
        _, t = heapq.heappop(heap)
        c = rem.pop(t, None)
        if c is None:
            continue
        g = _find_reducer(t, basis)
        if g is None:
            out[t] = c
            if not full:
                out.update(rem)
                return out
            continue
        q = tuple(map(_sub, t, g.lt))
        for tg, cg in g.tail:
            tt = tuple(map(_add, tg, q))
            old = rem.get(tt)
            if old is None:
                rem[tt] = -c * cg
                heapq.heappush(heap, (negkey(tt), tt))
            else:
                nv = old - c * cg
                if nv:
                    rem[tt] = nv
                else:
                    del rem[tt]
    return out


def _spoly(f: _Elem, g: _Elem, lcm: tuple) -> dict:
    qf = tuple(map(_sub, lcm, f.lt))
    qg = tuple(map(_sub, lcm, g.lt))
    acc: dict = {}
    for t, c in f.tail:
        acc[tuple(map(_add, t, qf))] = c
    for t, c in g.tail:
        tt = tuple(map(_add, t, qg))
        v = acc.get(tt)
        if v is None:
            acc[tt] = -c
        else:
            v = v - c
            if v:
                acc[tt] = v
            else:
                del acc[tt]
    return acc


@dataclass
class _State:
    elems: list = field(default_factory=list)
    active: list = field(default_factory=list)  # indices of non-redundant elements
    pairs: dict = field(default_factory=dict)  # (i, j) -> (sugar, key, lcm)


def _coprime(a: tuple, b: tuple) -> bool:
    return not any(x and y for x, y in zip(a[:-1], b[:-1]))


def _update(state: _State, ih: int, order: TermOrder) -> None:
    f = state.elems
    h = f[ih]
    mh = h.lt
    rank_one = order.rank_one
    C = [ig for ig in state.active if f[ig].pos == h.pos]
    D: list = []
    while C:
        ig = C.pop()
        mg = f[ig].lt
        lcm_hg = _lcm(mh, mg)
        coprime = rank_one and _coprime(mh, mg)
        if coprime or not (
            any(all(map(_ge, lcm_hg, _lcm(mh, f[ip].lt))) for ip in C)
            or any(all(map(_ge, lcm_hg, _lcm(mh, f[ip].lt))) for _, ip in D)
        ):
            D.append((ih, ig))
    E = []
    for _, ig in D:
        mg = f[ig].lt
        if not (rank_one and _coprime(mh, mg)):
            E.append((ig, ih))
    pairs = state.pairs
    for pr in list(pairs):
        ig1, ig2 = pr
        lcm12 = pairs[pr][2]
        if (
            _divides(mh, lcm12)
            and _lcm(f[ig1].lt, mh) != lcm12
            and _lcm(f[ig2].lt, mh) != lcm12
        ):
            del pairs[pr]
    for ig, _ in E:
        g = f[ig]
        lcm = _lcm(g.lt, mh)
        dl = order.degree(lcm)
        sugar = max(g.sugar + dl - order.degree(g.lt), h.sugar + dl - order.degree(mh))
        pairs[(ig, ih)] = (sugar, order.key(lcm), lcm)
    state.active = [ig for ig in state.active if not _divides(mh, f[ig].lt)]
    state.active.append(ih)


def buchberger(gens: Iterable[dict], order: TermOrder, prefix: Sequence[dict] = ()) -> list[dict]:
    """Reduced Groebner basis of the span of ``prefix`` and ``gens``.

    ``prefix`` must already be a reduced Groebner basis; pairs inside it are
    not recomputed.  Output vectors are monic and sorted by leading term.
    """
    state = _State()
    for vec in prefix:
        if vec:
            e = _Elem(dict(vec), order)
            state.elems.append(e)
            state.active.append(len(state.elems) - 1)
    todo = [dict(v) for v in gens if v]
    todo.sort(key=lambda v: (order.sugar(v), order.key(order.lead(v))))
    for vec in todo:
        sugar = order.sugar(vec)
        r = reduce_vector(vec, [state.elems[i] for i in state.active], order)
        if r:
            state.elems.append(_Elem(r, order, max(sugar, order.sugar(r))))
            _update(state, len(state.elems) - 1, order)
    pairs = state.pairs
    while pairs:
        pr = min(pairs, key=lambda p: pairs[p][:2])
        sugar, _, lcm = pairs.pop(pr)
        STATS["pairs"] += 1
        i, j = pr
        s = _spoly(state.elems[i], state.elems[j], lcm)
        r = reduce_vector(s, [state.elems[k] for k in state.active], order)
        if not r:
            STATS["zero_reductions"] += 1
            continue
        state.elems.append(_Elem(r, order, sugar))
        _update(state, len(state.elems) - 1, order)
    basis = [state.elems[i] for i in state.active]
    basis.sort(key=lambda e: order.key(e.lt))
    reduced = []
    for k, e in enumerate(basis):
        others = basis[:k] + basis[k + 1:]
        tail = reduce_vector(dict(e.tail), others, order)
        vec = dict(tail)
        vec[e.lt] = mpq(1)
        reduced.append(vec)
    STATS["bases"] += 1
    if POSTHOC_CHECK and not is_groebner(reduced, order):
        raise GroebnerError("post-hoc Buchberger criterion failed")
    return reduced


def is_groebner(basis: Sequence[dict], order: TermOrder) -> bool:
    """Buchberger criterion: every S-vector of same-position pairs reduces to 0."""
    elems = [_Elem(dict(v), order) for v in basis if v]
    STATS["checked"] += 1
    for a in range(len(elems)):
        for b in range(a + 1, len(elems)):
            f, g = elems[a], elems[b]
            if f.pos != g.pos:
                continue
            if order.rank_one and _coprime(f.lt, g.lt):
                continue
            s = _spoly(f, g, _lcm(f.lt, g.lt))
            if reduce_vector(s, elems, order):
                return False
    return True


def elems_of(basis: Sequence[dict], order: TermOrder) -> list[_Elem]:
    return [_Elem(dict(v), order) for v in basis]


# ---------------------------------------------------------------- ideals


def poly_to_vec(p: Polynomial, pos: int = 0) -> dict:
    return {m + (pos,): c for m, c in p.terms.items()}


def vec_to_poly(vec: dict, ring: PolyRing) -> Polynomial:
    return Polynomial(ring, {t[:-1]: c for t, c in vec.items()})


class Ideal:
    """Ideal of a polynomial ring given by generators; bases cached per order."""

    def __init__(self, generators: Iterable[Polynomial], ring: PolyRing | None = None):
        gens = list(generators)
        if ring is None:
            if not gens:
                raise ValueError("ring required for an ideal without generators")
            ring = gens[0].ring
        for g in gens:
            if g.ring != ring:
                raise AmbientMismatchError(f"{g.ring!r} is not {ring!r}")
        self.ring = ring
        self.generators = tuple(g for g in gens if not g.is_zero())
        self._cache: dict = {}

    def __repr__(self):
        return f"Ideal({', '.join(map(str, self.generators))})"

    def _engine(self, order: MonomialOrder):
        hit = self._cache.get(order)
        if hit is None:
            torder = ideal_term_order(order, self.ring.weights)
            basis = buchberger([poly_to_vec(g) for g in self.generators], torder)
            hit = self._cache[order] = (torder, basis, elems_of(basis, torder))
        return hit

    def groebner_basis(self, order: MonomialOrder = GREVLEX) -> list[Polynomial]:
        _, basis, _ = self._engine(order)
        return [vec_to_poly(v, self.ring) for v in basis]

    def normal_form(self, p: Polynomial, order: MonomialOrder = GREVLEX) -> Polynomial:
        if p.ring != self.ring:
            raise AmbientMismatchError(f"{p.ring!r} is not {self.ring!r}")
        torder, _, elems = self._engine(order)
        return vec_to_poly(reduce_vector(poly_to_vec(p), elems, torder), self.ring)

    def contains(self, p: Polynomial) -> bool:
        return self.normal_form(p).is_zero()

    __contains__ = contains

    def contains_ideal(self, other: Ideal) -> bool:
        return all(self.contains(g) for g in other.generators)

    def equals(self, other: Ideal) -> bool:
        return self.contains_ideal(other) and other.contains_ideal(self)

    def is_unit(self) -> bool:
        return self.contains(self.ring.one())

    def is_zero(self) -> bool:
        return not self.generators

    def __add__(self, other: Ideal) -> Ideal:
        return Ideal(self.generators + other.generators, self.ring)

    def __mul__(self, other: Ideal) -> Ideal:
        return Ideal([a * b for a in self.generators for b in other.generators], self.ring)


def groebner_basis(I: Ideal, order: MonomialOrder = GREVLEX) -> list[Polynomial]:
    return I.groebner_basis(order)


def normal_form(p: Polynomial, I: Ideal, order: MonomialOrder = GREVLEX) -> Polynomial:
    return I.normal_form(p, order)


def _split_key(first: Sequence[int], second: Sequence[int]) -> Callable[[tuple], tuple]:
    """Block key: grevlex on variables ``first`` dominating grevlex on ``second``."""
    first, second = tuple(first), tuple(second)

    def key(t):
        a = [t[i] for i in first]
        b = [t[i] for i in second]
        return (sum(a),) + tuple(-e for e in reversed(a)) + (sum(b),) + tuple(-e for e in reversed(b))

    return key


def eliminate(I: Ideal, keep: Iterable[str]) -> Ideal:
    """``I`` intersected with the subring generated by the ``keep`` variables."""
    ring = I.ring
    keep_idx = sorted(ring.index(n) for n in keep)
    elim_idx = [i for i in range(ring.nvars) if i not in keep_idx]
    torder = TermOrder(_split_key(elim_idx, keep_idx), ring.weights)
    basis = buchberger([poly_to_vec(g) for g in I.generators], torder)
    out = []
    for vec in basis:
        if all(not any(t[i] for i in elim_idx) for t in vec):
            out.append(vec_to_poly(vec, ring))
    return Ideal(out, ring)


def _with_extra_var(I: Ideal, name: str = "_w"):
    ring = I.ring
    while name in ring.names:
        name = name + "_"
    big = ring.extend([name])
    return big, [big.embed(g) for g in I.generators], big.gen(name)


def _restrict(I: Ideal, ring: PolyRing) -> Ideal:
    n = ring.nvars
    return Ideal([Polynomial(ring, {m[:n]: c for m, c in g.terms.items()}) for g in I.generators], ring)


def ideal_intersect(I: Ideal, J: Ideal) -> Ideal:
    if I.ring != J.ring:
        raise AmbientMismatchError("ideals live in different rings")
    big, gi, t = _with_extra_var(I, "_t")
    gj = [big.embed(g) for g in J.generators]
    joint = Ideal([t * g for g in gi] + [(1 - t) * g for g in gj], big)
    return _restrict(eliminate(joint, I.ring.names), I.ring)


def ideal_colon(I: Ideal, f: Polynomial) -> Ideal:
    """(I : f) = {b : f*b in I}."""
    if f.is_zero():
        raise ZeroDivisionError("colon by the zero polynomial")
    meet = ideal_intersect(I, Ideal([f]))
    quotients = []
    for g in meet.generators:
        q = g / f
        quotients.append(q)
    return Ideal(quotients, I.ring)


def saturate(I: Ideal, f: Polynomial) -> Ideal:
    """(I : f^oo) via the Rabinowitsch variable."""
    if f.is_zero():
        raise ZeroDivisionError("saturation by the zero polynomial")
    big, gi, w = _with_extra_var(I)
    joint = Ideal(gi + [1 - w * big.embed(f)], big)
    return _restrict(eliminate(joint, I.ring.names), I.ring)


def radical_contains(I: Ideal, h: Polynomial) -> bool:
    big, gi, w = _with_extra_var(I)
    return Ideal(gi + [1 - w * big.embed(h)], big).is_unit()


def polynomial_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic gcd in Q[x] via the principal ideal (a) ∩ (b)."""
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    lcm = ideal_intersect(Ideal([a]), Ideal([b])).groebner_basis()
    if len(lcm) != 1:
        raise GroebnerError("intersection of principal ideals is not principal")
    return (a * b / lcm[0]).monic()


# ---------------------------------------------------------------- quotients


class QuotientContext:
    """Normal forms in Q[x]/J for a fixed relation ideal J (grevlex)."""

    def __init__(self, ring: PolyRing, relations: Iterable[Polynomial] = ()):
        self.ring = ring
        self.ideal = Ideal(list(relations), ring)

    @property
    def relations(self) -> tuple:
        return self.ideal.generators

    def is_trivial(self) -> bool:
        return self.ideal.is_zero()

    def normal_form(self, p: Polynomial) -> Polynomial:
        if self.ideal.is_zero():
            if p.ring != self.ring:
                raise AmbientMismatchError(f"{p.ring!r} is not {self.ring!r}")
            return p
        return self.ideal.normal_form(p)

    def is_zero(self, p: Polynomial) -> bool:
        return self.normal_form(p).is_zero()

    def basis(self) -> list[Polynomial]:
        return self.ideal.groebner_basis()

    def __repr__(self):
        return f"QuotientContext({self.ring!r}, {list(map(str, self.relations))})"


def quotient_normal_form(p: Polynomial, ctx: QuotientContext) -> Polynomial:
    return ctx.normal_form(p)


# ---------------------------------------------------------------- modules


class FreeModuleElement(tuple):
    """Vector of polynomials of a fixed length."""

    def __new__(cls, components: Iterable[Polynomial]):
        comps = tuple(components)
        if not comps:
            raise ValueError("free module elements need at least one component")
        ring = comps[0].ring
        for c in comps:
            if c.ring != ring:
                raise AmbientMismatchError("components from different rings")
        return super().__new__(cls, comps)

    @property
    def ring(self) -> PolyRing:
        return self[0].ring

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self)

    def __add__(self, other):
        return FreeModuleElement(a + b for a, b in zip(self, other))

    def __sub__(self, other):
        return FreeModuleElement(a - b for a, b in zip(self, other))

    def scale(self, p: Polynomial):
        return FreeModuleElement(p * c for c in self)

    def __str__(self):
        return "(" + ", ".join(map(str, self)) + ")"


def element_to_vec(v: Sequence[Polynomial], offset: int = 0) -> dict:
    out = {}
    for i, comp in enumerate(v):
        out.update(poly_to_vec(comp, offset + i))
    return out


def vec_to_element(vec: dict, ring: PolyRing, rank: int, offset: int = 0) -> FreeModuleElement:
    comps: list[dict] = [{} for _ in range(rank)]
    for t, c in vec.items():
        comps[t[-1] - offset][t[:-1]] = c
    return FreeModuleElement(Polynomial(ring, d) for d in comps)


class Submodule:
    """Submodule of R^rank (R = Q[x] / optional relations) given by generators."""

    def __init__(self, generators: Iterable[Sequence[Polynomial]], ring: PolyRing, rank: int, quotient: QuotientContext | None = None):
        gens = [FreeModuleElement(g) for g in generators]
        for g in gens:
            if len(g) != rank:
                raise RankMismatchError(f"generator of length {len(g)} in rank {rank}")
            if g.ring != ring:
                raise AmbientMismatchError("generator from a different ring")
        self.ring = ring
        self.rank = rank
        self.generators = tuple(gens)
        self.quotient = quotient
        self._cache: dict = {}

    def _all_vectors(self) -> list[dict]:
        vecs = [element_to_vec(g) for g in self.generators if not g.is_zero()]
        if self.quotient is not None and not self.quotient.is_trivial():
            for rel in self.quotient.basis():
                for i in range(self.rank):
                    vecs.append(poly_to_vec(rel, i))
        return vecs

    def _engine(self, order: ModuleOrder):
        hit = self._cache.get(order)
        if hit is None:
            torder = module_term_order(order, self.ring.weights)
            basis = buchberger(self._all_vectors(), torder)
            hit = self._cache[order] = (torder, basis, elems_of(basis, torder))
        return hit

    def groebner_basis(self, order: ModuleOrder = ModuleOrder("top")) -> list[FreeModuleElement]:
        _, basis, _ = self._engine(order)
        return [vec_to_element(v, self.ring, self.rank) for v in basis]

    def normal_form(self, v: Sequence[Polynomial], order: ModuleOrder = ModuleOrder("top")) -> FreeModuleElement:
        if len(v) != self.rank:
            raise RankMismatchError(f"vector of length {len(v)} in rank {self.rank}")
        torder, _, elems = self._engine(order)
        return vec_to_element(reduce_vector(element_to_vec(v), elems, torder), self.ring, self.rank)

    def contains(self, v: Sequence[Polynomial]) -> bool:
        return self.normal_form(v).is_zero()

    __contains__ = contains

    def equals(self, other: Submodule) -> bool:
        return all(other.contains(g) for g in self.generators) and all(self.contains(g) for g in other.generators)


def module_groebner_basis(S: Submodule, order: ModuleOrder = ModuleOrder("top")) -> list[FreeModuleElement]:
    return S.groebner_basis(order)


def module_normal_form(v: Sequence[Polynomial], S: Submodule, order: ModuleOrder = ModuleOrder("top")) -> FreeModuleElement:
    return S.normal_form(v, order)


def syzygies(gens: Sequence[Polynomial | Sequence[Polynomial]], quotient: QuotientContext | None = None) -> Submodule:
    """All coefficient vectors (c_j) with sum c_j*g_j = 0 (modulo ``quotient``).

    Generators may be polynomials (rank 1) or free module elements.
    """
    if not gens:
        raise ValueError("no generators")
    vecs = [FreeModuleElement([g]) if isinstance(g, Polynomial) else FreeModuleElement(g) for g in gens]
    rank = len(vecs[0])
    ring = vecs[0].ring
    for v in vecs:
        if len(v) != rank:
            raise RankMismatchError("generators of different lengths")
    m = len(vecs)
    base = GREVLEX.key

    def key(t):
        pos = t[-1]
        return (1 if pos < rank else 0,) + base(t[:-1]) + (-pos,)

    torder = TermOrder(key, ring.weights, rank_one=False)
    work = []
    for j, v in enumerate(vecs):
        vec = element_to_vec(v)
        vec[(0,) * ring.nvars + (rank + j,)] = mpq(1)
        work.append(vec)
    if quotient is not None and not quotient.is_trivial():
        for rel in quotient.basis():
            for i in range(rank):
                work.append(poly_to_vec(rel, i))
    basis = buchberger(work, torder)
    out = []
    for vec in basis:
        if all(t[-1] >= rank for t in vec):
            out.append(vec_to_element(vec, ring, m, offset=rank))
    return Submodule(out, ring, m, quotient)
