from hypothesis import given, settings
from hypothesis import strategies as st

from rigidcalc.dualizing import finite_flat_dual
from rigidcalc.fpmodules import FPModule, ModuleMap, RingMap, find_isomorphism
from rigidcalc.polycore import Mat
from rigidcalc.smooth_etale import kahler, structure_map
from rigidcalc.squaring import (is_rigid_isomorphism, rigid_isomorphism, rigidifier_coinduced,
                                rigidifier_esm, section_rigid, solve_rigid_unit, square,
                                square_backward, square_forward, standard_forward, tautological,
                                unit_module)
from conftest import ring

K = ring([])
A = ring(["x"])
nonzero = st.integers(-5, 5).filter(bool)


def test_tautological_over_field():
    T = tautological(K)
    assert T.d == 0 and T.H.ngens == 1
    assert find_isomorphism(T.square.module, FPModule.free(K, 1))[0] == "iso"
    assert T.rho.is_identity() or T.is_iso()


def test_square_of_etale_algebra_is_itself():
    B = ring(["x"], ["x^2 - x"])
    sq = square(B, unit_module(B), 0)
    assert find_isomorphism(sq.module, FPModule.free(B, 1))[0] == "iso"
    assert sq.is_concentrated()


def test_square_of_differentials_on_the_line():
    omega = kahler(structure_map(A), 1)
    sq = square(A, omega, -1)
    assert find_isomorphism(sq.module, omega)[0] == "iso"


def _trace_setup():
    C = ring(["x"], ["x^2"])
    theta = finite_flat_dual(structure_map(C), ["1", "x"]).trace
    return C, theta, square(C, theta.source, 0), square(K, unit_module(K), 0)


@settings(max_examples=8)
@given(nonzero)
def test_backward_square_is_quadratic(c):
    C, theta, sqN, sqM = _trace_setup()
    base = square_backward(theta, sqN, sqM).matrix
    scaled = square_backward(theta.scale(K(c)), sqN, sqM).matrix
    assert scaled.map(K.nf) == base.map(lambda f: K.nf(f * (c * c)))


@settings(max_examples=8)
@given(nonzero)
def test_forward_square_is_quadratic(c):
    C = ring(["x"], ["x^2"])
    Cp = ring(["x", "y"], ["x^2", "y^2 - y"])
    v = RingMap(C, Cp, ["x"])
    q = standard_forward(v, unit_module(C))
    sqM, sqN = square(C, unit_module(C), 0), square(Cp, q.target, 0)
    base = square_forward(q, sqM, sqN)
    scaled = square_forward(q.scale(Cp(c)), sqM, sqN)
    for a, b in zip(scaled, base):
        assert sqN.module.equal(a, [Cp.nf(x * (c * c)) for x in b])


def test_coinduced_trace_is_rigid_with_unit_one():
    B = ring(["x"], ["x^2"])
    u = RingMap(A, B, ["x"])
    M = rigidifier_esm(A)
    N, tr = rigidifier_coinduced(u, M)
    sol = solve_rigid_unit(tr, M, N)
    assert B.equal(sol.c, B.one())


def test_unit_absorbs_a_rescaled_trace():
    B = ring(["x"], ["x^2"])
    u = RingMap(A, B, ["x"])
    M = rigidifier_esm(A)
    N, tr = rigidifier_coinduced(u, M)
    sol = solve_rigid_unit(tr.precompose_mult(B("3")), M, N)
    assert B.equal(sol.c, B("3"))
    assert sol.morphism.chain.equals(tr.chain)


def test_rigid_identity_is_unique():
    M = rigidifier_esm(A)
    ident = M.H.identity()
    assert is_rigid_isomorphism(ident, M, M)
    assert not is_rigid_isomorphism(M.H.scalar(A("2")), M, M)
    phi = rigid_isomorphism(M, M, candidate=M.H.scalar(A("2")))
    assert phi.is_identity()


@settings(max_examples=6)
@given(nonzero)
def test_esm_rigidifier_is_coordinate_free(a):
    E = rigidifier_esm(A, [A("x")])
    Ea = rigidifier_esm(A, [A(f"{a}*x + 1")])
    ident = ModuleMap(E.H, Ea.H, Mat.identity(A.poly_ring, E.H.ngens))
    assert is_rigid_isomorphism(ident, E, Ea)


def test_section_rigidifier_is_iso():
    B = ring(["x"], ["x^2 - x"])
    S = section_rigid(B)
    assert S.is_iso() and S.d == 0
