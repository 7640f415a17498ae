import pytest
from hypothesis import given
from hypothesis import strategies as st

from rigidcalc.complexes import (FreeComplex, chain_homotopic, cone, ext_tor, free_resolution,
                                 tensor_complex)
from rigidcalc.errors import WindowTooSmall
from rigidcalc.fpmodules import FPModule, find_isomorphism
from rigidcalc.koszul import koszul_complex
from conftest import ring

A = ring(["x"])
R2 = ring(["x", "y"])


def test_residue_field_resolution_terminates():
    res = free_resolution(FPModule.cyclic(R2, [R2("x"), R2("y")]), 4)
    assert res.terminated
    assert [res.complex.rank(-i) for i in range(3)] == [1, 2, 1]
    assert res.complex.is_complex()


def test_residue_field_of_dual_numbers_is_periodic():
    B = ring(["x"], ["x^2"])
    res = free_resolution(FPModule.cyclic(B, [B("x")]), 5)
    assert not res.terminated
    for i in range(1, 6):
        assert res.complex.rank(-i) == 1
        d = res.complex.d(-i)
        assert B.equal(d.rows[0][0], B("x")) or B.equal(d.rows[0][0], B("-x"))


def test_ext_of_torsion_cyclic():
    E1 = ext_tor("ext", FPModule.cyclic(A, [A("x^2")]), FPModule.free(A, 1), 1)
    assert find_isomorphism(E1, FPModule.cyclic(A, [A("x^2")]))[0] == "iso"
    E0 = ext_tor("ext", FPModule.cyclic(A, [A("x^2")]), FPModule.free(A, 1), 0)
    assert E0.is_zero()


def test_tor_one():
    k = FPModule.cyclic(A, [A("x")])
    T1 = ext_tor("tor", k, k, 1)
    assert find_isomorphism(T1, k)[0] == "iso"


def test_window_too_small():
    with pytest.raises(WindowTooSmall):
        ext_tor("ext", FPModule.free(A, 1), FPModule.free(A, 1), 3, window=2)


def test_cone_of_identity_is_contractible():
    X = FreeComplex.concentrated(A, 1)
    C = cone(X.identity())
    assert C.is_acyclic()
    ident = C.identity()
    h = chain_homotopic(ident, ident.scale(A("0")))
    assert h.status and h.witness


def test_identity_on_nonzero_complex_is_not_null_homotopic():
    X = FreeComplex.concentrated(A, 1)
    assert not chain_homotopic(X.identity(), X.identity().scale(A("0"))).status


def test_tensor_of_koszul_complexes():
    K = tensor_complex(koszul_complex(R2, [R2("x")]), koszul_complex(R2, [R2("y")]))
    Kxy = koszul_complex(R2, [R2("x"), R2("y")])
    X = K.complex if hasattr(K, "complex") else K
    assert [X.rank(-i) for i in range(3)] == [Kxy.rank(-i) for i in range(3)]
    assert X.is_complex()
    for i in (1, 2):
        assert X.cohomology(-i).module.is_zero()
    assert find_isomorphism(X.cohomology(0).module, Kxy.cohomology(0).module)[0] == "iso"


@given(st.integers(1, 3), st.integers(-2, 2))
def test_shift_moves_ranks(rank, n):
    X = FreeComplex.concentrated(A, rank, 0)
    assert X.shift(n).rank(-n) == rank
