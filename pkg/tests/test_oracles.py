"""Recompute the frozen oracle values with sympy, independently of rigidcalc."""
import itertools

import sympy as sp
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

import oracle_values as O

T = standard_transformations + (convert_xor,)
x, y, t, u, v = sp.symbols("x y t u v")


def P(s):
    return parse_expr(s, transformations=T, local_dict={"x": x, "y": y, "t": t, "u": u, "v": v})


def test_division_step():
    q, r = sp.reduced(P(O.DIVISION["f"]), [P(O.DIVISION["divisor"])], x, y, order="lex")
    assert sp.expand(q[0] - P(O.DIVISION["quotient"])) == 0
    assert sp.expand(r - P(O.DIVISION["remainder"])) == 0


def test_lex_basis():
    G = sp.groebner([P(g) for g in O.LEX_GB["generators"]], x, y, order="lex")
    assert sorted(map(str, G.exprs)) == sorted(str(P(b)) for b in O.LEX_GB["basis"])


def test_normal_form():
    G = sp.groebner([P(g) for g in O.LEX_GB["generators"]], x, y, order="lex")
    assert G.reduce(x**2)[1] == P(O.NF_X2)


def test_elimination_kernel():
    G = sp.groebner([u - t**2, v - t**3], t, u, v, order="lex")
    elim = [g for g in G.exprs if t not in g.free_symbols]
    assert len(elim) == 1
    assert sp.expand(elim[0] - P(O.TWISTED_CUBIC_KERNEL)) == 0 or \
        sp.expand(elim[0] + P(O.TWISTED_CUBIC_KERNEL)) == 0


def test_trace_forms():
    for rel, gram, det in O.TRACE_FORMS:
        basis = [sp.Integer(1), x]
        f = P(rel)

        def coords(g):
            r = sp.Poly(sp.rem(sp.expand(g), f, x), x)
            return [r.coeff_monomial(1), r.coeff_monomial(x)]

        def trace(b):
            m = sp.Matrix([coords(b * e) for e in basis]).T
            return m.trace()

        G = sp.Matrix(2, 2, lambda i, j: trace(basis[i] * basis[j]))
        assert G == sp.Matrix(gram)
        assert G.det() == det


def test_section_idempotent():
    x1, x2 = sp.symbols("x1 x2")
    rels = [x1**2 - x1, x2**2 - x2]
    e = parse_expr(O.SECTION_IDEMPOTENT, transformations=T, local_dict={"x1": x1, "x2": x2})
    G = sp.groebner(rels, x1, x2, order="lex")
    assert G.reduce(sp.expand(e * e - e))[1] == 0
    assert G.reduce(sp.expand(e * (x1 - x2)))[1] == 0
    assert sp.expand(e.subs(x2, x1)).subs(x1**2, x1) == 1 or \
        sp.groebner([x1**2 - x1], x1).reduce(sp.expand(e.subs(x2, x1)))[1] == 1


def test_koszul_ranks():
    for n, ranks in O.KOSZUL_RANKS.items():
        assert ranks == [len(list(itertools.combinations(range(n), p))) for p in range(n + 1)]
