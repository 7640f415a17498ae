from fractions import Fraction

from hypothesis import strategies as st

from rigidcalc.polycore import LEX, PolyRing, QQ

P2 = PolyRing(QQ, ["x", "y"])
P2_LEX = PolyRing(QQ, ["x", "y"], LEX)
P3 = PolyRing(QQ, ["x", "y", "z"])

coeffs = st.integers(-4, 4).map(Fraction)


def polys(ring, max_terms=4, max_exp=3):
    n = len(ring.names)
    term = st.tuples(st.tuples(*[st.integers(0, max_exp)] * n), coeffs)
    return st.lists(term, max_size=max_terms).map(
        lambda ts: sum((ring.monomial(e, c) for e, c in ts), ring.zero()))


def nonzero_polys(ring, **kw):
    return polys(ring, **kw).filter(lambda f: not f.is_zero())
