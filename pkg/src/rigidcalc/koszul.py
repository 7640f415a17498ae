"""Koszul complexes, Koszul regularity, generalized fractions and comparisons.

The Koszul complex of ``a = (a_1..a_n)`` has basis ``t_S`` of ``K^{-p}`` for
``p``-subsets ``S`` (sorted tuples), product ``t_S t_T = sign * t_{S u T}``
and differential ``d(t_i) = a_i`` extended by the graded Leibniz rule.

A generalized fraction ``<mu/a>`` is the degree ``n`` cochain sending
``t_1...t_n`` to ``mu``.  Comparisons with other resolutions of ``R/(a)``
are chain maps lifted degree by degree.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .complexes import ExtGroup, FreeComplex, Resolution, free_resolution, lift_map
from .errors import CodimMismatch, LiftError, NotKoszulRegular
from .fpmodules import FPModule, ModuleMap, RingMap, RingPresentation
from .groebner import LinearSystem
from .polycore import Mat, Poly


def _perm_sign(seq: Sequence[int]) -> int:
    inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return -1 if inv % 2 else 1


class KoszulDG:
    """``K(R; a)`` as a strongly commutative DG algebra."""

    def __init__(self, ring: RingPresentation, seq: Sequence):
        self.ring = ring
        self.seq = [ring(a) for a in seq]
        self.n = len(self.seq)
        self._subsets = {p: list(itertools.combinations(range(self.n), p))
                         for p in range(self.n + 1)}
        self._index = {S: i for p in self._subsets for i, S in enumerate(self._subsets[p])}
        P = ring.poly_ring
        ranks = {-p: len(self._subsets[p]) for p in range(self.n + 1)}
        diffs = {}
        for p in range(1, self.n + 1):
            rows = [[P.zero()] * len(self._subsets[p]) for _ in self._subsets[p - 1]]
            for j, S in enumerate(self._subsets[p]):
                for T, c in self.d_basis(S).items():
                    rows[self._index[T]][j] = c
            diffs[-p] = Mat(P, rows, len(self._subsets[p]))
        self.complex = FreeComplex(ring, ranks, diffs, check=False)

    def subsets(self, p: int) -> list:
        return self._subsets[p]

    def index(self, S: tuple) -> int:
        return self._index[S]

    def d_basis(self, S: tuple) -> dict:
        """``d(t_S) = sum_k (-1)^k a_{S[k]} t_{S minus S[k]}``."""
        out = {}
        for k, i in enumerate(S):
            T = S[:k] + S[k + 1:]
            c = self.seq[i] if k % 2 == 0 else -self.seq[i]
            if c:
                out[T] = c
        return out

    def mul_basis(self, S: tuple, T: tuple):
        """``t_S * t_T`` as ``(sign, U)`` or ``None`` when it vanishes."""
        if set(S) & set(T):
            return None
        seq = list(S) + list(T)
        return _perm_sign(seq), tuple(sorted(seq))

    def mul(self, x: dict, y: dict) -> dict:
        """Product of elements given as ``{subset: coefficient}``."""
        out: dict = {}
        for S, a in x.items():
            for T, b in y.items():
                r = self.mul_basis(S, T)
                if r is None:
                    continue
                s, U = r
                out[U] = out.get(U, self.ring.zero()) + a * b * s
        return {U: self.ring.nf(c) for U, c in out.items() if not self.ring.is_zero(c)}

    def d(self, x: dict) -> dict:
        out: dict = {}
        for S, a in x.items():
            for T, c in self.d_basis(S).items():
                out[T] = out.get(T, self.ring.zero()) + a * c
        return {U: self.ring.nf(c) for U, c in out.items() if not self.ring.is_zero(c)}

    def wdg(self, elements: Sequence[Sequence[Poly]]) -> dict:
        """Product of degree ``-1`` elements given as coefficient vectors on ``t_i``."""
        acc = {(): self.ring.one()}
        for v in elements:
            acc = self.mul(acc, {(i,): self.ring(c) for i, c in enumerate(v) if c})
        return acc

    def t(self, i: int) -> dict:
        return {(i,): self.ring.one()}

    def check_leibniz(self) -> bool:
        """Graded Leibniz rule and strong commutativity on all basis pairs."""
        R = self.ring
        basis = [S for p in self._subsets for S in self._subsets[p]]
        for S in basis:
            for T in basis:
                x, y = {S: R.one()}, {T: R.one()}
                lhs = self.d(self.mul(x, y))
                rhs = _add(R, self.mul(self.d(x), y),
                           _scale(R, self.mul(x, self.d(y)), -1 if len(S) % 2 else 1))
                if _add(R, lhs, _scale(R, rhs, -1)):
                    return False
                sign = -1 if (len(S) * len(T)) % 2 else 1
                if _add(R, self.mul(x, y), _scale(R, self.mul(y, x), -sign)):
                    return False
        for i in range(self.n):
            if self.mul(self.t(i), self.t(i)):
                return False
        return True


def _add(R, x: dict, y: dict) -> dict:
    out = dict(x)
    for k, v in y.items():
        out[k] = out.get(k, R.zero()) + v
    return {k: R.nf(v) for k, v in out.items() if not R.is_zero(v)}


def _scale(R, x: dict, c) -> dict:
    return {k: R.nf(v * c) for k, v in x.items() if not R.is_zero(v * c)}


def koszul_dg(ring: RingPresentation, seq: Sequence) -> KoszulDG:
    return KoszulDG(ring, seq)


def koszul_complex(ring: RingPresentation, seq: Sequence) -> FreeComplex:
    return KoszulDG(ring, seq).complex


def koszul_cohomology(ring: RingPresentation, seq: Sequence, p: int):
    """``H^{-p}(K(R; a))`` as a subquotient."""
    return KoszulDG(ring, seq).complex.cohomology(-p)


def is_koszul_regular(ring: RingPresentation, seq: Sequence) -> bool:
    """``H^{-p}(K) = 0`` for ``p > 0`` and ``H^0 = R/(a) != 0``."""
    K = KoszulDG(ring, seq)
    if K.complex.cohomology(0).module.is_zero():
        return False
    return all(K.complex.cohomology(-p).module.is_zero() for p in range(1, K.n + 1))


def is_regular_sequence(ring: RingPresentation, seq: Sequence) -> bool:
    """Classical check: each ``a_i`` is a nonzerodivisor mod the previous ones."""
    seq = [ring(a) for a in seq]
    for i, a in enumerate(seq):
        M = FPModule.cyclic(ring, seq[:i])
        if M.is_zero():
            return False
        if not M.scalar(a).is_injective():
            return False
    return not FPModule.cyclic(ring, seq).is_zero()


# --- generalized fractions ------------------------------------------------------


def fraction_cochain(M: FPModule, mu: Sequence[Poly], n: int) -> list:
    """The top-degree cochain ``t_1...t_n -> mu`` on a Koszul complex."""
    return [[M.ring(x) for x in mu]]


@dataclass
class GeneralizedFraction:
    mu: list
    seq: list
    koszul: KoszulDG
    module: FPModule

    @property
    def cochain(self) -> list:
        return fraction_cochain(self.module, self.mu, self.koszul.n)

    def ext_group(self) -> ExtGroup:
        return ExtGroup(self.koszul.complex, self.module, self.koszul.n)


def generalized_fraction(M: FPModule, mu: Sequence[Poly], seq: Sequence) -> GeneralizedFraction:
    K = KoszulDG(M.ring, seq)
    return GeneralizedFraction([M.ring(x) for x in mu], K.seq, K, M)


class KoszulPresentation:
    """Comparison between ``K(R; a)`` and the syzygy resolution of ``R/(a)``.

    ``to_koszul`` is a chain map ``P -> K`` over the identity of ``R/(a)``;
    :meth:`kpres` pulls Koszul cochains back to ``P``.
    """

    def __init__(self, ring: RingPresentation, seq: Sequence, check: bool = True,
                 resolution: Resolution = None):
        self.koszul = KoszulDG(ring, seq)
        if check and not is_koszul_regular(ring, self.koszul.seq):
            raise NotKoszulRegular(f"{[str(a) for a in self.koszul.seq]} is not Koszul-regular")
        n = self.koszul.n
        self.ring = ring
        self.quotient = FPModule.cyclic(ring, self.koszul.seq)
        self.resolution = resolution or free_resolution(self.quotient, n + 1)
        P = self.resolution.complex
        K = self.koszul.complex
        Pr = ring.poly_ring
        self.to_koszul = lift_map(P, K, 0, Mat.identity(Pr, 1))
        self.from_koszul = lift_map(K, P, 0, Mat.identity(Pr, 1))

    def kpres(self, cochain: Sequence[Sequence[Poly]], p: int) -> list:
        """Pull a degree ``p`` cochain on ``K`` back to ``P``."""
        psi = self.to_koszul.mat(-p)
        P = self.resolution.complex
        R = self.ring
        if not cochain:
            return []
        g = len(cochain[0])
        out = []
        for j in range(P.rank(-p)):
            v = [R.zero()] * g
            for s in range(psi.nrows):
                c = psi.rows[s][j]
                if c:
                    v = [a + c * b for a, b in zip(v, cochain[s])]
            out.append([R.nf(x) for x in v])
        return out

    def ext_group(self, M: FPModule, p: int) -> ExtGroup:
        return ExtGroup(self.resolution.complex, M, p, self.resolution)

    def fraction_class(self, M: FPModule, mu: Sequence[Poly]) -> list:
        """Coordinates of ``kpres(<mu/a>)`` in ``Ext^n(R/(a), M)`` on ``P``."""
        n = self.koszul.n
        co = self.kpres(fraction_cochain(M, mu, n), n)
        c = self.ext_group(M, n).class_of(co)
        if c is None:
            raise LiftError("pulled-back fraction is not a cocycle")
        return c


def kpres(ring: RingPresentation, seq: Sequence) -> KoszulPresentation:
    return KoszulPresentation(ring, seq)


def fraction_class(M: FPModule, mu: Sequence[Poly], seq: Sequence,
                   presentation: KoszulPresentation = None) -> list:
    kp = presentation or KoszulPresentation(M.ring, seq)
    return kp.fraction_class(M, mu)


# --- fundamental local isomorphism ---------------------------------------------------


def conormal_module(u: RingMap, seq: Sequence[Poly]) -> FPModule:
    """``a/a^2`` over the target, on the generators ``seq``."""
    A, B = u.source, u.target
    P = A.poly_ring
    ls = LinearSystem(P, 1, [[A(a)] for a in seq], (), A.ideal)
    rels = [[u(c) for c in syz] for syz in ls.syzygies()]
    return FPModule(B, len(seq), rels)


def top_exterior_power(N: FPModule) -> FPModule:
    """``Lambda^g N`` for ``g`` the generator count, on the single generator ``wdg``."""
    g = N.ngens
    R = N.ring
    rels = []
    for r in N.relations:
        for k in range(g):
            # r wedge (e_0 ... omit k ... e_{g-1}) = (-1)^k r_k wdg
            c = r[k] if k % 2 == 0 else -r[k]
            if not R.is_zero(c):
                rels.append([c])
    return FPModule(R, 1, rels)


@dataclass
class FLIResult:
    sequence: list
    delta_rs: FPModule
    ext: dict
    fund: ModuleMap
    fund_is_iso: bool
    vanishing: dict
    koszul: KoszulDG
    notes: list = field(default_factory=list)

    def fraction(self, mu: Sequence[Poly]) -> list:
        """Class of ``<mu/a>`` in the Koszul-computed ``Ext^n``."""
        n = self.koszul.n
        return self.ext[n].class_of(fraction_cochain(self.fund.source, mu, n))


def fundamental_local_iso(u: RingMap, M: FPModule, sequence: Sequence = None) -> FLIResult:
    """``Delta^rs (x) M = M/aM  ->  Ext^n_A(B, M)``, ``1/wdg(a) (x) mu -> <mu/a>``.

    ``u : A -> B`` must be surjective with kernel generated by a
    Koszul-regular sequence (``sequence``, or the reduced Groebner basis of
    the kernel).
    """
    A, B = u.source, u.target
    if M.ring != A:
        raise ValueError("module must live over the source ring")
    if sequence is None:
        seq = [A.nf(g) for g in u.kernel().basis]
        seq = [g for g in seq if g]
    else:
        seq = [A(a) for a in sequence]
    ker = u.kernel()
    if not A.ideal_of(seq).same_ideal(ker):
        raise NotKoszulRegular("sequence does not generate the kernel")
    if not is_koszul_regular(A, seq):
        raise NotKoszulRegular(f"{[str(a) for a in seq]} is not Koszul-regular")
    n = len(seq)
    conormal = conormal_module(u, seq)
    top = top_exterior_power(conormal)
    if not all(B.is_zero(r[0]) for r in top.relations):
        raise CodimMismatch("top exterior power of the conormal module is not free")
    delta_rs = FPModule.free(B, 1)
    K = KoszulDG(A, seq)
    ext = {p: ExtGroup(K.complex, M, p) for p in range(n + 1)}
    # Delta^rs (x)_A M = M / aM as an A-module
    Pr = A.poly_ring
    g = M.ngens
    rels = list(M.relations)
    for a in seq:
        for i in range(g):
            v = [Pr.zero()] * g
            v[i] = a
            rels.append(v)
    source = FPModule(A, g, rels)
    E = ext[n]
    images = []
    for i in range(g):
        c = E.class_of(fraction_cochain(M, M.gen(i), n))
        images.append(c)
    fund = ModuleMap.from_images(source, E.module, images, check=True)
    vanishing = {p: ext[p].module.is_zero() for p in range(n)}
    result = FLIResult(seq, delta_rs, ext, fund, fund.is_iso(), vanishing, K)
    return result


def localize_ring(A: RingPresentation, s: Poly) -> tuple:
    """``A_s`` and the localization map ``A -> A_s``."""
    names = list(A.user_names)
    As = RingPresentation(A.field, names + list(A.aux_names),
                          [r for r in A.ideal.basis], [A(s)], order=A.poly_ring.order)
    u = RingMap(A, As, [As.var(n) for n in A.names], localization=True)
    return As, u


def fraction_localization_square(A: RingPresentation, seq: Sequence, M: FPModule,
                                 mu: Sequence[Poly], s: Poly) -> dict:
    """Compare ``loc(kpres<mu/a>)`` with ``kpres_s(<mu/a>)`` over ``A_s``.

    The left route localizes the class computed on the syzygy resolution of
    ``A/(a)``; the right route recomputes the comparison over ``A_s``.
    """
    from .complexes import ExtGroup as _Ext
    kp = KoszulPresentation(A, seq)
    n = kp.koszul.n
    co = kp.kpres(fraction_cochain(M, mu, n), n)
    As, loc = localize_ring(A, s)
    from .fpmodules import base_change
    Ms = base_change(M, loc)
    Ps = kp.resolution.complex.base_change(loc)
    left = [[loc(x) for x in v] for v in co]
    Ks = KoszulDG(As, [loc(a) for a in kp.koszul.seq])
    to_k = lift_map(Ps, Ks.complex, 0, Mat.identity(As.poly_ring, 1))
    psi = to_k.mat(-n)
    mus = [loc(x) for x in mu]
    right = []
    for j in range(Ps.rank(-n)):
        right.append([As.nf(psi.rows[0][j] * x) for x in mus])
    E = _Ext(Ps, Ms, n)
    cl, cr = E.class_of(left), E.class_of(right)
    equal = cl is not None and cr is not None and E.module.equal(cl, cr)
    return {"localized_ring": As, "left": cl, "right": cr, "equal": equal,
            "ext_nonzero": not E.module.is_zero()}


# --- Koszul approximation ------------------------------------------------------------


def unit_in_colon(R: RingPresentation, seq: Sequence[Poly], ideal: Sequence[Poly]) -> Optional[Poly]:
    """``s`` with ``s * ideal in (seq)`` and ``s = 1`` modulo ``ideal``."""
    cands = R.colon(list(seq), list(ideal))
    cands = [R.nf(c) for c in cands if not R.is_zero(c)]
    if not cands:
        return None
    P = R.poly_ring
    ls = LinearSystem(P, 1, [[c] for c in cands], [[g] for g in ideal], R.ideal)
    sol = ls.solve([P.one()])
    if sol is None:
        return None
    return R.nf(sum((b * c for b, c in zip(sol, cands)), P.zero()))


class KoszulApproximation:
    """``kprox``: Koszul cochains of ``seq`` pulled back to a resolution of ``R/I``.

    ``seq`` lies in ``I``.  An element ``s`` of ``((seq) : I)`` congruent to
    one modulo ``I`` gives ``R/I -> R/(seq)``, ``1 -> s``; its lift
    ``psi : P -> K(R; seq)`` defines ``kprox(phi) = phi o psi``.  When ``seq``
    generates ``I`` one may take ``s = 1``.
    """

    def __init__(self, ring: RingPresentation, seq: Sequence[Poly], ideal: Sequence[Poly],
                 resolution: Resolution = None):
        self.ring = ring
        self.koszul = KoszulDG(ring, seq)
        self.ideal = [ring(g) for g in ideal]
        self.warnings = []
        if ring.ideal_of(self.koszul.seq).same_ideal(ring.ideal_of(self.ideal)):
            s = ring.one()
        else:
            s = unit_in_colon(ring, self.koszul.seq, self.ideal)
            if s is None:
                raise LiftError("no element of the colon ideal is a unit modulo the ideal")
        self.s = s
        if not is_koszul_regular(ring, self.koszul.seq):
            self.warnings.append("sequence is not Koszul-regular; kprox need not be an isomorphism")
        quotient = FPModule.cyclic(ring, self.ideal)
        self.resolution = resolution or free_resolution(quotient, self.koszul.n + 1)
        P = self.resolution.complex
        if P.rank(0) != 1:
            raise ValueError("resolution must start with a rank one free module")
        self.psi = lift_map(P, self.koszul.complex, 0, Mat(ring.poly_ring, [[s]]))

    def pull(self, cochain: Sequence[Sequence[Poly]], p: int) -> list:
        psi = self.psi.mat(-p)
        P = self.resolution.complex
        R = self.ring
        g = len(cochain[0]) if cochain else 0
        out = []
        for j in range(P.rank(-p)):
            v = [R.zero()] * g
            for s_ in range(psi.nrows):
                c = psi.rows[s_][j]
                if c:
                    v = [a + c * b for a, b in zip(v, cochain[s_])]
            out.append([R.nf(x) for x in v])
        return out

    def fraction(self, M: FPModule, mu: Sequence[Poly]) -> list:
        """``kprox(<mu/seq>)`` as a cochain on the resolution."""
        n = self.koszul.n
        return self.pull(fraction_cochain(M, mu, n), n)


def kprox(ring: RingPresentation, seq: Sequence[Poly], ideal: Sequence[Poly],
          resolution: Resolution = None) -> KoszulApproximation:
    return KoszulApproximation(ring, seq, ideal, resolution)
