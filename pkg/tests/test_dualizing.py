import pytest

from rigidcalc.complexes import chain_homotopic
from rigidcalc.dualizing import (derived_morita_check, finite_etale_rank_law, finite_flat_dual,
                                 fifl_section_identity, relative_rigid_dualizing,
                                 rigid_dualizing_complex, rigid_etale_localization, rigid_trace,
                                 smooth_base_change, trace_tower, twisted_induction)
from rigidcalc.errors import UnsupportedBase, WindowTooSmall
from rigidcalc.fpmodules import FPModule, RingMap, find_isomorphism
from rigidcalc.smooth_etale import kahler, structure_map
from rigidcalc.squaring import rigid_isomorphism, solve_rigid_unit
from conftest import ring

K = ring([])
A = ring(["x"])


def test_morita_examples():
    assert derived_morita_check(FPModule.free(K, 1)).holds
    assert not derived_morita_check(FPModule.free(K, 2)).holds
    D = ring(["x"], ["x^2"])
    assert derived_morita_check(FPModule.free(D, 1)).holds
    assert not derived_morita_check(FPModule.cyclic(D, [D("x")])).holds
    H = ring(["x", "y"], ["x*y"])
    assert derived_morita_check(FPModule.free(H, 1), window=4).holds


def test_morita_window_floor():
    with pytest.raises(WindowTooSmall):
        derived_morita_check(FPModule.free(K, 1), window=1)


def test_rdc_of_field_is_tautological():
    R = rigid_dualizing_complex(K)
    assert R.d == 0 and R.H.ngens == 1 and R.is_iso()


@pytest.mark.parametrize("names,rels,degree", [
    (["x"], [], -1),
    (["x"], ["x^2"], 0),
    (["x", "y"], ["x*y"], -1),
    (["x", "y"], [], -2),
])
def test_rdc_degrees_and_freeness(names, rels, degree):
    B = ring(names, rels)
    R = rigid_dualizing_complex(B)
    assert R.d == degree
    assert R.morita.holds
    assert R.rho.is_iso()
    if not rels:
        assert find_isomorphism(R.H, kahler(structure_map(B), len(names)))[0] == "iso"
    else:
        assert find_isomorphism(R.H, FPModule.free(B, 1))[0] == "iso"


def test_rigid_trace_of_identity_is_one():
    tr = rigid_trace(RingMap.identity(A))
    assert A.equal(tr.unit, A.one()) or A.is_unit(tr.unit)
    assert tr.morphism.c == 0


def test_trace_tower_and_a_scaled_counterexample():
    B = ring(["x"], ["x^4"])
    C = ring(["x"], ["x^2"])
    tw = trace_tower(RingMap(A, B, ["x"]), RingMap(B, C, ["x"]))
    assert tw.holds
    scaled = tw.composite.chain.scale(A("2"))
    assert not chain_homotopic(scaled, tw.direct.morphism.chain).status


def test_rescaled_trace_is_not_rigid():
    C = ring(["x"], ["x^2"])
    tr = rigid_trace(RingMap(A, C, ["x"]))
    sol = solve_rigid_unit(tr.morphism.precompose_mult(C("5")), tr.target, tr.source)
    assert C.equal(sol.c, C("5"))


def test_etale_localization_sends_dx_to_dx():
    Bp = ring(["x", "z"], ["z*x - 1"])
    loc = rigid_etale_localization(RingMap(A, Bp, ["x"]))
    assert Bp.is_unit(loc.unit)
    assert loc.morphism.is_nondegenerate()


def test_twisted_induction_identity_and_finite():
    M = FPModule.free(A, 1)
    ident = twisted_induction(RingMap.identity(A), M)
    assert ident.kind == "identity" and ident.witness.is_identity()
    fin = twisted_induction(RingMap(A, ring(["x"], ["x^2"]), ["x"]), M)
    assert fin.kind == "finite" and fin.witness is not None and fin.degree == 1


def test_twisted_induction_smooth():
    M = FPModule.free(K, 1)
    sm = twisted_induction(structure_map(A), M)
    assert sm.kind == "smooth" and sm.witness is not None and sm.degree == -1


def test_rank_law_for_split_algebra():
    r = finite_etale_rank_law(structure_map(ring(["x"], ["x^2 - x"])))
    assert r.holds and r.matrix.rows[0][0] == r.matrix.ring.const(2)


def test_finite_flat_dual_identity():
    for rel in ("x^2 + 1", "x^2 - x"):
        u = structure_map(ring(["x"], [rel]))
        assert fifl_section_identity(u, ["1", "x"])
        assert finite_flat_dual(u, ["1", "x"]).rigid.is_iso()


def test_relative_dualizing_two_routes_agree():
    S = ring(["s"])
    B = ring(["s", "x"], ["x^2 - s"])
    u = RingMap(S, B, ["s"])
    by_factor = relative_rigid_dualizing(u, route="factor")
    by_dual = relative_rigid_dualizing(u, route="fifl", basis=["1", "x"])
    phi = rigid_isomorphism(by_factor, by_dual)
    assert phi.is_iso()


def test_relative_identity_is_tautological():
    assert relative_rigid_dualizing(RingMap.identity(A)).tag == "tau"


def test_relative_localization_unsupported():
    L = ring(["x"], [], ["x"])
    with pytest.raises(UnsupportedBase):
        relative_rigid_dualizing(RingMap(L, ring(["x", "y"], [], ["x"]), ["x"]))


def test_relative_nonflat_unsupported():
    with pytest.raises(UnsupportedBase):
        relative_rigid_dualizing(RingMap(A, ring(["x"], ["x^2"]), ["x"]))


def test_smooth_base_change_iso():
    phi = smooth_base_change(RingMap(K, A, []))
    assert phi.is_iso()
