import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from rigidcalc.errors import NotEtale
from rigidcalc.fpmodules import FPModule, RingMap, find_isomorphism
from rigidcalc.smooth_etale import (check_etale_coords, etale_section, kahler, operator_trace,
                                    structure_map)
from conftest import ring

import oracle_values as O


def test_kahler_of_dual_numbers():
    B = ring(["x"], ["x^2"])
    omega = kahler(structure_map(B), 1)
    assert find_isomorphism(omega, FPModule.cyclic(B, [B("2*x")]))[0] == "iso"


def test_kahler_of_localization():
    B = ring(["x", "z"], ["z*x - 1"])
    u = structure_map(B)
    assert find_isomorphism(kahler(u, 1), FPModule.free(B, 1))[0] == "iso"
    assert check_etale_coords(u, [B("x")])
    assert check_etale_coords(u, [B("x^2")])
    assert not check_etale_coords(u, [])


def test_section_oracle():
    B = ring(["x"], ["x^2 - x"])
    s = etale_section(structure_map(B))
    assert all(s.checks().values())
    assert s.env.ring.equal(s.e, s.env.ring(O.SECTION_IDEMPOTENT))


def test_section_requires_etale():
    with pytest.raises(NotEtale):
        etale_section(structure_map(ring(["x"], ["x^2"])))


def test_trace_form_oracle():
    for rel, gram, det in O.TRACE_FORMS:
        B = ring(["x"], [rel])
        rep = operator_trace(structure_map(B), [B.one(), B("x")])
        k = rep.gram.ring
        assert [list(r) for r in rep.gram.rows] == [[k.const(a) for a in row] for row in gram]
        assert rep.det == k.const(det)
        assert rep.nondegenerate == (det != 0)


@given(st.integers(-3, 3), st.integers(-3, 3))
def test_split_quadratic_section(a, b):
    assume(a != b)
    B = ring(["x"], [f"(x - ({a}))*(x - ({b}))"])
    s = etale_section(structure_map(B))
    assert all(s.checks().values())
    det = operator_trace(structure_map(B), ["1", "x"]).det
    assert det == det.ring.const((a - b) ** 2)


def test_relative_section():
    B = ring(["s", "x"], ["x^2 - s"], ["s"])
    u = RingMap(ring(["s"], [], ["s"]), B, ["s"])
    s = etale_section(u)
    assert all(s.checks().values())
