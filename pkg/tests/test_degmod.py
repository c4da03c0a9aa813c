import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lndkit.degmod import (
    Filtration,
    d_basis_check,
    degree_module,
    degree_resolution,
    freeness_diagnostics,
    graded_ring_truncation,
)
from lndkit.lnd import Derivation, LocalSlice, image_ideal, kernel_generators
from lndkit.poly import PolyRing
from lndkit.oracle import TruncatedSpan, graded_residual, truncated_kernel_power
from lndkit.subalg import AIdeal, SubmoduleOverA

_filtrations = {}


def filt(problem, name, **kw):
    key = (name, tuple(sorted(kw.items())))
    if key not in _filtrations:
        P = problem(name)
        _filtrations[key] = Filtration(P.derivation, P.kernel, **kw)
    return _filtrations[key]


def as_module(P, gens):
    return SubmoduleOverA(P.kernel, gens)


def test_two_five_f1(problem):
    P = problem("two_five")
    F1 = filt(problem, "two_five").module(1)
    assert F1.module.equals(as_module(P, [P.ring.one(), P.symbols["R"]]))
    assert F1.degrees == (0, 1) and F1.certified


def test_two_five_f10(problem):
    P = problem("two_five")
    x, y, z = P.ring.gens()
    R, S = P.symbols["R"], P.symbols["S"]
    one = P.ring.one()
    listed = [one, R, x, x * R, x**2, S, y, x * S, x * y, x**2 * S, z]
    F10 = filt(problem, "two_five").module(10)
    assert F10.module.equals(as_module(P, listed))
    assert sorted(F10.degrees) == list(range(11))
    assert d_basis_check(F10) and len(F10) == 11


def test_f0_is_kernel(problem):
    P = problem("two_five")
    M = degree_module(P.derivation, P.kernel, 0)
    assert M.generators == (problem("two_five").ring.one(),)
    assert d_basis_check(M)


def test_dim4_f1(problem):
    P = problem("dim4")
    x1, x2, y1, y2 = P.ring.gens()
    F1 = filt(problem, "dim4").module(1)
    assert F1.module.equals(as_module(P, [P.ring.one(), y1, y2]))
    assert sorted(F1.degrees) == [0, 1, 1]
    assert not d_basis_check(F1)
    pl = image_ideal(P.derivation, P.kernel, 1, F1)
    assert AIdeal(P.kernel, pl).equals(AIdeal(P.kernel, [x1, x2]))


@pytest.mark.parametrize("n", range(0, 11))
def test_dim3_closed_form(problem, n):
    P = problem("dim3")
    z = P.ring.gen("z")
    Q = P.symbols["Q"]
    basis = [Q**i * z**j for i in range(4) for j in range(n // 4 + 1) if i + 4 * j <= n]
    Fn = filt(problem, "dim3").module(n)
    assert Fn.module.equals(as_module(P, basis))
    assert sorted(Fn.degrees) == list(range(n + 1))


def test_initial_modules(problem):
    P = problem("xdy")
    y = P.ring.gen("y")
    fl = Filtration(P.derivation, P.kernel, policy="slice-powers")
    assert fl.initial_module(2).generators == (P.ring.one(), y, y**2)
    P = problem("two_five")
    fl = filt(problem, "two_five")
    M0 = fl.initial_module(2, "products")
    R = P.symbols["R"]
    x = P.ring.gen("x")
    assert M0.contains(R**2)
    assert M0.saturation_step(P.derivation(R))[0].contains(x)


def test_policies_agree(problem):
    P = problem("two_five")
    a = Filtration(P.derivation, P.kernel, policy="products")
    b = Filtration(P.derivation, P.kernel, policy="slice-powers")
    c = Filtration(P.derivation, P.kernel, interleave=True)
    for n in (2, 5):
        assert a.module(n).module.equals(b.module(n).module)
        assert a.module(n).module.equals(c.module(n).module)


@pytest.mark.parametrize(
    "name,jumps",
    [
        ("two_five", [0, 1, 2, 5, 6, 10]),
        ("dim3", [0, 1, 4]),
        ("xdy", [0, 1]),
        ("dim4", [0, 1]),
        ("one_two", [0, 1, 2]),
        ("russell", [0, 1, 2]),
        ("winkelmann", [0, 1, 2]),
        ("triangular", [0, 1, 2]),
    ],
)
def test_resolution_jumps(problem, name, jumps):
    P = problem(name)
    res = degree_resolution(P.derivation, P.kernel, P.option("max", 12), filtration=filt(problem, name))
    assert res.complete
    assert res.jumps == jumps
    assert res.index == len(jumps) - 1
    algs = [alg for _, alg, _ in res.chain]
    for small, big in zip(algs, algs[1:]):
        assert all(big.contains(g) for g in small.generators)
        assert not all(small.contains(g) for g in big.generators)
    for v in P.ring.gens():
        assert algs[-1].contains(v)


def test_slice_gives_index_one():
    ring = PolyRing(["x", "y", "z"])
    D = Derivation(ring, {"y": ring.gen("x"), "z": 1})
    assert D(ring.gen("z")) == 1
    A = kernel_generators(D).algebra
    assert degree_resolution(D, A, 4).index == 1
    gr = graded_ring_truncation(D, A, 4)
    assert [w for _, w in gr.generators] == [1]
    assert all(AIdeal(A, gr.ideals[n]).is_unit() for n in range(5))


def test_two_five_graded_ring(problem):
    P = problem("two_five")
    F, G = P.symbols["F"], P.symbols["G"]
    A = P.kernel
    gr = graded_ring_truncation(P.derivation, A, 10, filt(problem, "two_five"))
    assert [w for _, w in gr.generators] == [1, 2, 5, 6, 10]
    parts = [F * G, F**2 * G, F**4 * G**3, F**5 * G**3, F**8 * G**5]
    for (a, w), want in zip(gr.generators, parts):
        assert AIdeal(A, [a]).equals(AIdeal(A, [want]))
    assert AIdeal(A, gr.ideals[2]).equals(AIdeal(A, [F**2 * G]))


def test_freeness_diagnostics(problem):
    P = problem("two_five")
    rep = freeness_diagnostics(P.derivation, P.kernel, 10, filt(problem, "two_five"))
    assert rep.all_free()
    assert all(r["image_principal"] for r in rep.rows)
    P = problem("dim4")
    rep = freeness_diagnostics(P.derivation, P.kernel, 1, filt(problem, "dim4"))
    assert not rep.all_free()
    assert rep.rows[1]["image_principal"] is False


@pytest.mark.parametrize("name", ["two_five", "dim3", "winkelmann", "triangular"])
def test_exact_sequence(problem, name):
    # D maps F_{n+1} into F_n, and F_n sits inside F_{n+1}
    P = problem(name)
    fl = filt(problem, name)
    for n in range(0, 4):
        lo, hi = fl.module(n), fl.module(n + 1)
        for g in hi.generators:
            assert lo.contains(P.derivation(g))
        for g in lo.generators:
            assert hi.contains(g)


def test_resaturation_is_stable(problem):
    fl = filt(problem, "two_five")
    M = fl.module(6).module
    again, changed = M.saturation_step(fl.slice.f)
    assert not changed


@settings(max_examples=20)
@given(st.data())
def test_factorial_closure_of_fn(problem, data):
    P = problem("two_five")
    fl = filt(problem, "two_five")
    F3 = fl.module(3)
    x, y, z = P.ring.gens()
    a = data.draw(st.sampled_from([x, P.symbols["R"], x * P.symbols["R"]]))
    b = data.draw(st.sampled_from([x, P.symbols["R"], y, z, P.ring.one() + x]))
    ab = a * b
    if F3.contains(ab):
        assert F3.contains(a) and F3.contains(b)


ORACLE_CASES = [
    ("xdy", 4, 10),
    ("one_two", 4, 10),
    ("two_five", 4, 10),
    ("dim3", 4, 10),
    ("dim4", 4, 10),
    ("russell", 4, 10),
    ("winkelmann", 4, 10),
    ("triangular", 4, 10),
]


@pytest.mark.parametrize("name,nmax,d", ORACLE_CASES)
def test_oracle_agreement(problem, name, nmax, d):
    P = problem(name)
    D = P.derivation
    fl = filt(problem, name)
    graded = all(g.is_homogeneous() for g in P.kernel.generators) and P.quotient.is_trivial()
    for n in range(nmax + 1):
        Fn = fl.module(n)
        for g in Fn.generators:
            assert D.apply_power(g, n + 1).is_zero()
        span = None
        if graded and all(g.is_homogeneous() for g in Fn.generators):
            span = TruncatedSpan(Fn.generators, P.kernel.generators, d)
        for h in truncated_kernel_power(D, n, d):
            assert Fn.contains(h), (n, str(h))
            if span is not None:
                assert span.contains(h)


def test_oracle_agreement_triangular_t(problem):
    # unit slice: F_n = sum A s^i, membership read off the s-expansion;
    # F_1 F_{n-1} lies in F_n, so only the graded residual is expanded
    P = problem("triangular_t")
    D = P.derivation
    s = P.symbols["s"]
    x, y = P.ring.gen("x"), P.ring.gen("y")
    fl = Filtration(D, P.kernel, slice=LocalSlice(s, D(s)))
    first, prev = [], []
    for n in range(5):
        Fn = fl.module(n)
        assert Fn.generators == tuple(s**i for i in range(n + 1))
        assert Fn.degrees == tuple(range(n + 1))
        for g in Fn.generators:
            assert D.apply_power(g, n + 1).is_zero()
        basis = truncated_kernel_power(D, n, 10)
        products = [g * p for g in first for p in prev if g.degree() + p.degree() <= 10]
        rest = graded_residual(basis, [x, y], 10, products)
        for h in rest:
            assert Fn.contains(h), (n, str(h))
        if n == 1:
            first = rest
        prev = basis
    assert not fl.module(1).contains(s**2)
