import sympy as sp
from hypothesis import given
from hypothesis import strategies as st
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from rigidcalc.errors import DegreeBoundExceeded
from rigidcalc.fpmodules import RingMap
from rigidcalc.groebner import buchberger, degree_bound, ringmap_kernel, syzygy_basis
from rigidcalc.polycore import LEX, Mat, PolyRing, QQ
from conftest import ring
from strategies import P2_LEX, P3, nonzero_polys

import oracle_values as O

SX, SY, SZ = sp.symbols("x y z")
T = standard_transformations + (convert_xor,)


def to_sympy(f):
    return parse_expr(str(f) or "0", transformations=T, local_dict={"x": SX, "y": SY, "z": SZ})


def test_lex_regression():
    G = buchberger([P2_LEX(g) for g in O.LEX_GB["generators"]], ring=P2_LEX)
    assert sorted(map(str, G.basis)) == sorted(str(P2_LEX(b)) for b in O.LEX_GB["basis"])
    assert G.normal_form(P2_LEX("x^2")) == P2_LEX(O.NF_X2)
    assert G.verify()


@given(st.lists(nonzero_polys(P2_LEX, max_terms=3, max_exp=2), min_size=1, max_size=3))
def test_reduced_basis_matches_sympy(gens):
    G = buchberger(gens, ring=P2_LEX)
    ref = sp.groebner([to_sympy(g) for g in gens], SX, SY, order="lex")
    mine = sorted(sp.srepr(sp.expand(to_sympy(g))) for g in G.basis)
    theirs = sorted(sp.srepr(sp.expand(sp.Poly(e, SX, SY).monic().as_expr())) for e in ref.exprs)
    assert mine == theirs


@given(st.lists(nonzero_polys(P3, max_terms=3, max_exp=2), min_size=1, max_size=3))
def test_generators_reduce_to_zero(gens):
    G = buchberger(gens)
    assert G.verify()
    assert all(G.contains(g) for g in gens)


def test_syzygy_of_regular_pair():
    R = ring(["x", "y"])
    P = R.poly_ring
    m = Mat(P, [[P("x"), P("y")]])
    S = syzygy_basis(m)
    assert S.ncols == 1
    assert (m * S).is_zero()
    col = S.col(0)
    assert col in ([P("y"), P("-x")], [P("-y"), P("x")])


def test_syzygy_modulo_relations():
    R = ring(["x"], ["x^2"])
    P = R.poly_ring
    S = syzygy_basis(Mat(P, [[P("x")]]), R)
    assert [R.nf(f) for f in S.col(0)] in ([P("x")], [P("-x")])


def test_elimination_oracle():
    src = ring(["u", "v"])
    tgt = ring(["t"])
    K = ringmap_kernel(RingMap(src, tgt, ["t^2", "t^3"]))
    want = src(O.TWISTED_CUBIC_KERNEL)
    assert K.same_ideal(src.ideal_of([want]))


def test_degree_bound_is_enforced():
    P = PolyRing(QQ, ["x", "y", "z"], LEX)
    gens = [P("x^5 - y*z^3"), P("y^5 - x^2*z"), P("z^5 - x*y^2")]
    with degree_bound(3):
        try:
            buchberger(gens, ring=P)
        except DegreeBoundExceeded:
            return
    raise AssertionError("degree bound was not enforced")
