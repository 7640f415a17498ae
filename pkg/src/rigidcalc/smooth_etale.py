"""Diagonal ideals, Kaehler differentials, etale sections and operator traces."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .errors import LiftError, NoCoordinates, NotEtale
from .fpmodules import (FPModule, ModuleMap, Restriction, RingMap, RingPresentation,
                        Subquotient)
from .koszul import unit_in_colon
from .polycore import Mat, Poly, PolyRing, determinant, evaluate


def partial(f: Poly, i: int) -> Poly:
    d = {}
    for e, c in f.terms_dict.items():
        if e[i]:
            ne = list(e)
            ne[i] -= 1
            d[tuple(ne)] = c * e[i]
    return Poly(f.ring, {e: c for e, c in d.items() if c})


class EnvelopingData:
    """``B (x)_A B`` for ``u : A -> B``, with multiplication and ``delta``.

    Variables of the two copies are suffixed ``1`` and ``2``.  When ``A`` has
    variables, the relations ``u(a) (x) 1 - 1 (x) u(a)`` are added.
    """

    def __init__(self, u: RingMap):
        B = u.target
        self.u = u
        self.base = B
        P = B.poly_ring
        n = P.nvars
        names1 = [f"{x}1" for x in P.names]
        names2 = [f"{x}2" for x in P.names]
        full = PolyRing(B.field, names1 + names2, P.order)
        self.inc1_images = [full.var(i) for i in range(n)]
        self.inc2_images = [full.var(n + i) for i in range(n)]
        rels = []
        for g in B.ideal.basis:
            rels.append(evaluate(g, self.inc1_images, full))
            rels.append(evaluate(g, self.inc2_images, full))
        for img in u.images:
            rels.append(evaluate(img, self.inc1_images, full) - evaluate(img, self.inc2_images, full))
        self.ring = RingPresentation(B.field, names1 + names2, rels, order=P.order)
        self.mult_images = [P.var(i) for i in range(n)] * 2
        self.delta_gens = [self.delta(P.var(i)) for i in range(n)]
        self.diagonal = self.ring.ideal_of(self.delta_gens)

    def left(self, b: Poly) -> Poly:
        return self.ring.nf(evaluate(b, self.inc1_images, self.ring.poly_ring))

    def right(self, b: Poly) -> Poly:
        return self.ring.nf(evaluate(b, self.inc2_images, self.ring.poly_ring))

    def tensor(self, a: Poly, b: Poly) -> Poly:
        return self.ring.nf(self.left(a) * self.right(b))

    def delta(self, b: Poly) -> Poly:
        """``b (x) 1 - 1 (x) b``."""
        return self.ring.nf(self.left(b) - self.right(b))

    def mult(self, f: Poly) -> Poly:
        return self.base.nf(evaluate(f, self.mult_images, self.base.poly_ring))

    def swap(self, f: Poly) -> Poly:
        return self.ring.nf(evaluate(f, self.inc2_images + self.inc1_images,
                                     self.ring.poly_ring))

    def left_map(self) -> RingMap:
        return RingMap(self.base, self.ring, self.inc1_images, check=False)

    def right_map(self) -> RingMap:
        return RingMap(self.base, self.ring, self.inc2_images, check=False)

    def mult_map(self) -> RingMap:
        return RingMap(self.ring, self.base, self.mult_images, check=False)

    def diagonal_module(self) -> FPModule:
        """``B`` as a module over the enveloping ring: the quotient by ``I``."""
        return FPModule.cyclic(self.ring, self.delta_gens)

    def check(self) -> bool:
        return all(self.base.is_zero(self.mult(g)) for g in self.delta_gens)


def diagonal_ideal(u: RingMap) -> EnvelopingData:
    return EnvelopingData(u)


def structure_map(B: RingPresentation) -> RingMap:
    """``k -> B``."""
    k = RingPresentation(B.field, [])
    return RingMap(k, B, [], check=False, finite=None)


# --- differentials -------------------------------------------------------------------


def jacobian_rows(u: RingMap) -> list:
    """Relation vectors ``dg`` of the Jacobian presentation of ``Omega^1_{B/A}``."""
    B = u.target
    P = B.poly_ring
    n = P.nvars
    rows = []
    for g in list(B.ideal.basis) + list(u.images):
        v = [B.nf(partial(g, j)) for j in range(n)]
        if any(v):
            rows.append(v)
    return rows


def d_vector(u: RingMap, f: Poly) -> list:
    """``df`` on the generators ``dx_j``."""
    B = u.target
    return [B.nf(partial(f, j)) for j in range(B.nvars)]


def kahler(u: RingMap, n: int = 1) -> FPModule:
    """``Omega^n_{B/A}``; generators ``dx_S`` for ``n``-subsets ``S`` of variables."""
    B = u.target
    m = B.nvars
    rows = jacobian_rows(u)
    if n == 0:
        return FPModule.free(B, 1)
    if n == 1:
        return FPModule(B, m, rows)
    subsets = list(itertools.combinations(range(m), n))
    index = {S: i for i, S in enumerate(subsets)}
    P = B.poly_ring
    rels = []
    for r in rows:
        for S in itertools.combinations(range(m), n - 1):
            v = [P.zero()] * len(subsets)
            for j in range(m):
                if j in S or not r[j]:
                    continue
                sign = -1 if sum(1 for s in S if s < j) % 2 else 1
                T = tuple(sorted(S + (j,)))
                v[index[T]] = v[index[T]] + r[j] * sign
            rels.append(v)
    return FPModule(B, len(subsets), rels)


def kahler_subsets(u: RingMap, n: int) -> list:
    return list(itertools.combinations(range(u.target.nvars), n))


def wedge_of_differentials(u: RingMap, fs: Sequence[Poly]) -> list:
    """``df_1 ^ ... ^ df_n`` in the generators of ``Omega^n``."""
    B = u.target
    n = len(fs)
    subsets = kahler_subsets(u, n)
    if n == 0:
        return [B.one()]
    dv = [d_vector(u, f) for f in fs]
    out = []
    for S in subsets:
        out.append(B.nf(determinant(Mat(B.poly_ring, [[dv[i][j] for j in S] for i in range(n)]))))
    return out


def conormal_diagonal(u: RingMap) -> FPModule:
    """``I / I^2`` as a module over ``B``, on the generators ``delta(x_j)``."""
    env = EnvelopingData(u)
    R = env.ring
    P = R.poly_ring
    prods = [[R.nf(a * b)] for a, b in itertools.combinations_with_replacement(env.delta_gens, 2)]
    sub = Subquotient(R, 1, [[g] for g in env.delta_gens], prods)
    rels = [[env.mult(x) for x in r] for r in sub.module.relations]
    return FPModule(u.target, len(env.delta_gens), rels)


def check_etale_coords(u: RingMap, seq: Sequence[Poly]) -> bool:
    """Whether ``d(seq)`` is a basis of ``Omega^1_{B/A}``."""
    B = u.target
    omega = kahler(u, 1)
    if not seq:
        return omega.is_zero()
    P = B.poly_ring
    cols = [d_vector(u, B(f)) for f in seq]
    phi = ModuleMap(FPModule.free(B, len(seq)), omega,
                    Mat.from_columns(P, cols, omega.ngens), check=False)
    return phi.is_iso()


# --- etale section -------------------------------------------------------------------


@dataclass
class Section:
    env: EnvelopingData
    e: Poly

    @property
    def off_diagonal(self) -> Poly:
        return self.env.ring.nf(self.env.ring.one() - self.e)

    def sec(self, b: Poly) -> Poly:
        """``sec(b) = e * (b (x) 1)``."""
        return self.env.ring.nf(self.e * self.env.left(b))

    def checks(self) -> dict:
        R = self.env.ring
        e = self.e
        return {
            "idempotent": R.equal(e * e, e),
            "orthogonal": R.is_zero(e * (R.one() - e)),
            "mult_one": self.env.base.equal(self.env.mult(e), self.env.base.one()),
            "kills_diagonal": all(R.is_zero(e * g) for g in self.env.delta_gens),
        }


def etale_section(u: RingMap, check_etale: bool = True) -> Section:
    """The idempotent ``e = sec(1)`` cutting out the diagonal of ``B (x)_A B``."""
    if check_etale and not kahler(u, 1).is_zero():
        raise NotEtale(f"Omega^1 of {u.target} over {u.source} is nonzero")
    env = EnvelopingData(u)
    e = unit_in_colon(env.ring, [], env.delta_gens)
    if e is None:
        raise LiftError("no section: the diagonal is not a ring factor")
    return Section(env, e)


# --- finite free algebras and the operator trace ----------------------------------------


class FreeAlgebraBasis:
    """A basis of ``B`` as a free ``A``-module, with coordinates and traces."""

    def __init__(self, u: RingMap, basis: Sequence):
        self.u = u
        A, B = u.source, u.target
        self.basis = [B(b) for b in basis]
        self._res = Restriction(FPModule.free(B, 1), u)
        M = self._res.module
        cols = [self._res.coords([b]) for b in self.basis]
        self._phi = ModuleMap(FPModule.free(A, len(self.basis)), M,
                              Mat.from_columns(A.poly_ring, cols, M.ngens), check=False)
        if not self._phi.is_iso():
            raise NoCoordinates("the given elements are not a basis over the source")
        self._inv = self._phi.inverse()

    def coords(self, b: Poly) -> list:
        c = self._inv.apply(self._res.coords([self.u.target(b)]))
        return [self.u.source.nf(x) for x in c]

    def element(self, coords: Sequence[Poly]) -> Poly:
        B = self.u.target
        return B.nf(sum((self.u(c) * b for c, b in zip(coords, self.basis)), B.zero()))

    def mult_matrix(self, b: Poly) -> Mat:
        B = self.u.target
        cols = [self.coords(B.nf(b * bj)) for bj in self.basis]
        return Mat.from_columns(self.u.source.poly_ring, cols, len(self.basis))

    def trace(self, b: Poly) -> Poly:
        m = self.mult_matrix(b)
        A = self.u.source
        return A.nf(sum((m.rows[i][i] for i in range(m.nrows)), A.zero()))

    def gram(self) -> Mat:
        B = self.u.target
        rows = [[self.trace(B.nf(a * b)) for b in self.basis] for a in self.basis]
        return Mat(self.u.source.poly_ring, rows, len(self.basis))

    def trace_functional(self) -> list:
        """Values of the trace on the basis."""
        return [self.trace(b) for b in self.basis]


@dataclass
class TraceReport:
    traces: list
    gram: Mat
    det: Poly
    nondegenerate: bool


def operator_trace(u: RingMap, basis: Sequence) -> TraceReport:
    fb = FreeAlgebraBasis(u, basis)
    G = fb.gram()
    A = u.source
    det = A.nf(determinant(G))
    return TraceReport(fb.trace_functional(), G, det, (not A.is_zero(det)) and A.is_unit(det))
