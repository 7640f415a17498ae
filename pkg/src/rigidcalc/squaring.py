"""Squares of complexes and morphisms over a field, with their rigidifiers.

A complex here is a single module ``H`` placed in degree ``d`` (so the
complex is ``H[-d]``).  Its square over ``B/k`` is

    Sq(H[-d]) = RHom_{B^en}(B, H (x)_k H)[-2d],

concentrated in degree ``d`` with cohomology ``SqH = Ext^{-d}_{B^en}(B, H (x) H)``.
A rigidifier is a ``B``-linear isomorphism ``rho : H -> SqH``.

Backward morphisms between complexes of different degrees are classes in
``Ext^c_B(H_N, H_M)``, stored as chain maps between free resolutions.  Their
rigidity is tested through the adjoint form: a map ``N -> Sq(M)`` over ``B``
is the same as a class in ``Ext^{d_N - 2 d_M}_{B^en}(H_N, H_M (x) H_M)``,
which is where both sides of the rigidity square are compared.
"""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .complexes import (ChainMap, ExtGroup, HomComplex, Resolution, TensorComplex,
                        free_resolution, lift_map)
from .errors import (LiftError, NoCoordinates, NotConcentrated, NotUnit, RigidCalcError,
                     RingMismatch, WindowTooSmall)
from .fpmodules import (FPModule, ModuleMap, Restriction, RingMap, RingPresentation,
                        base_change, tensor_modules, trim_presentation)
from .groebner import LinearSystem
from .koszul import KoszulApproximation
from .polycore import Mat, Poly
from .smooth_etale import (EnvelopingData, check_etale_coords, etale_section, kahler,
                           structure_map, wedge_of_differentials)

DEFAULT_WINDOW = 6


# --- caches ------------------------------------------------------------------------


class _Cache:
    """Identity-keyed memo table; holds references so ids stay valid."""

    def __init__(self):
        self._table = {}
        self._lock = threading.RLock()

    def get(self, objs: tuple, extra, make):
        key = tuple(id(o) for o in objs) + (extra,)
        with self._lock:
            hit = self._table.get(key)
            if hit is None:
                hit = (objs, make())
                self._table[key] = hit
            return hit[1]

    def clear(self):
        with self._lock:
            self._table.clear()


_ENV = _Cache()
_RES = _Cache()
_RESTR = _Cache()
_MULT = _Cache()
_SQ = _Cache()
_SHARP = _Cache()
_UNIT = _Cache()
_TENSOR = _Cache()


def clear_caches():
    for c in (_ENV, _RES, _RESTR, _MULT, _SQ, _SHARP, _UNIT, _TENSOR):
        c.clear()


def enveloping(B: RingPresentation, base: RingMap = None) -> EnvelopingData:
    """``B (x)_A B`` for ``base : A -> B``, or ``B (x)_k B`` when ``base`` is omitted."""
    if base is None:
        return _ENV.get((B,), None, lambda: EnvelopingData(structure_map(B)))
    key = ("rel", id(base.source), tuple(str(f) for f in base.images))
    return _ENV.get((B,), key, lambda: EnvelopingData(base))


def mult_map_of(env: EnvelopingData) -> RingMap:
    return _MULT.get((env,), None, env.mult_map)


def module_resolution(M: FPModule, window: int) -> Resolution:
    return _RES.get((M,), window, lambda: free_resolution(M, window))


def restriction_of(M: FPModule, v: RingMap) -> Restriction:
    return _RESTR.get((M, v), None, lambda: Restriction(M, v))


def unit_module(R: RingPresentation) -> FPModule:
    return _UNIT.get((R,), None, lambda: FPModule.free(R, 1))


def diagonal_resolution(env: EnvelopingData, window: int) -> Resolution:
    """Free resolution of ``B`` over ``B^en``."""
    return _RES.get((env,), ("diag", window),
                    lambda: free_resolution(env.diagonal_module(), window))


def enveloping_map(v: RingMap, envB: EnvelopingData, envC: EnvelopingData) -> RingMap:
    """``v (x) v : B^en -> C^en``."""
    def make():
        imgs = [envC.left(f) for f in v.images] + [envC.right(f) for f in v.images]
        return RingMap(envB.ring, envC.ring, imgs, check=False)
    return _MULT.get((v, envB, envC), "en", make)


# --- small linear algebra helpers ----------------------------------------------------


def _pull(mat: Mat, cochain: Sequence, R: RingPresentation, width: int) -> list:
    """The cochain ``phi o f``: column ``j`` of ``f`` combines the values of ``phi``."""
    out = []
    for j in range(mat.ncols):
        v = [R.zero()] * width
        for s in range(mat.nrows):
            c = mat.rows[s][j]
            if c:
                v = [a + c * b for a, b in zip(v, cochain[s])]
        out.append([R.nf(x) for x in v])
    return out


def _scale_cochain(cochain: Sequence, c: Poly, R: RingPresentation) -> list:
    return [[R.nf(c * x) for x in v] for v in cochain]


def _add_cochains(a: Sequence, b: Sequence, R: RingPresentation) -> list:
    return [[R.nf(x + y) for x, y in zip(u, w)] for u, w in zip(a, b)]


def _solve_scalar(R: RingPresentation, module: FPModule, given: Sequence, wanted: Sequence):
    """``c`` in ``R`` with ``c * given = wanted`` in a direct sum of copies of ``module``."""
    P = R.poly_ring
    g = module.ngens
    n = g * len(given)
    col = [x for v in given for x in v]
    rhs = [x for v in wanted for x in v]
    rels = []
    for j in range(len(given)):
        for r in module.relations:
            w = [P.zero()] * n
            w[j * g:(j + 1) * g] = r
            rels.append(w)
    if n == 0:
        return R.one()
    sol = LinearSystem(P, n, [col], rels, R.ideal).solve(rhs)
    return None if sol is None else R.nf(sol[0])


def tensor_square(H: FPModule, env: EnvelopingData) -> FPModule:
    """``H (x) H`` over the enveloping ring, generator ``(a, b)`` at ``a*g + b``."""
    g = H.ngens
    R = env.ring
    z = R.zero()
    rels = []
    for r in H.relations:
        lr = [env.left(x) for x in r]
        rr = [env.right(x) for x in r]
        for b in range(g):
            v = [z] * (g * g)
            for a in range(g):
                v[a * g + b] = lr[a]
            rels.append(v)
        for a in range(g):
            v = [z] * (g * g)
            for b in range(g):
                v[a * g + b] = rr[b]
            rels.append(v)
    return FPModule(R, g * g, rels)


def tensor_vector(env: EnvelopingData, v: Sequence[Poly], w: Sequence[Poly]) -> list:
    """``v (x) w`` in ``H (x) H`` for vectors ``v, w`` of ``H``."""
    R = env.ring
    gw = len(w)
    out = [R.zero()] * (len(v) * gw)
    rw = [env.right(y) if y else None for y in w]
    for a, x in enumerate(v):
        if not x:
            continue
        lx = env.left(x)
        for b, y in enumerate(rw):
            if y is not None:
                out[a * gw + b] = out[a * gw + b] + lx * y
    return [R.nf(x) for x in out]


def _restrict_tensor_vector(val: Sequence[Poly], envC: EnvelopingData, envB: EnvelopingData,
                            res: Restriction) -> list:
    """Rewrite an element of ``H_N (x)_k H_N`` (over ``C^en``) on pairs of restricted labels."""
    C = envC.base
    PC = C.poly_ring
    nC = PC.nvars
    g = res.N.ngens
    L = len(res.labels)
    RB = envB.ring
    out = [RB.zero()] * (L * L)
    coords = {}

    def coord(mono, p):
        key = (mono, p)
        if key not in coords:
            vec = [PC.zero()] * g
            vec[p] = C.nf(PC.monomial(mono))
            coords[key] = res.coords(vec)
        return coords[key]

    for idx, f in enumerate(val):
        if not f:
            continue
        p, q = divmod(idx, g)
        for e, c in f.terms_dict.items():
            r1 = coord(tuple(e[:nC]), p)
            r2 = coord(tuple(e[nC:]), q)
            for a, x in enumerate(r1):
                if not x:
                    continue
                lx = envB.left(x) * c
                for b, y in enumerate(r2):
                    if y:
                        out[a * L + b] = out[a * L + b] + lx * envB.right(y)
    return [RB.nf(x) for x in out]


# --- squares -------------------------------------------------------------------------


class SquarePresentation:
    """``SqH = Ext^{-d}_{B^en}(B, H (x) H)`` presented as a ``B``-module."""

    def __init__(self, B: RingPresentation, H: FPModule, d: int,
                 window: int = DEFAULT_WINDOW, base: RingMap = None):
        B.require_nonzero()
        if H.ring != B:
            raise RingMismatch("module does not live over the given ring")
        p = -d
        if p >= 0 and window < p + 1:
            raise WindowTooSmall(f"window {window} cannot compute Ext^{p}")
        self.ring, self.H, self.d, self.window, self.base = B, H, d, window, base
        self.p = p
        self.env = enveloping(B, base)
        self.resolution = diagonal_resolution(self.env, window)
        self.P = self.resolution.complex
        self.HH = tensor_square(H, self.env)
        self.ext = ExtGroup(self.P, self.HH, p, self.resolution)
        env = self.env
        rels = [[env.mult(x) for x in r] for r in self.ext.module.relations]
        self.module = FPModule(B, self.ext.module.ngens, rels)
        self._concentration = None

    def class_of(self, cochain: Sequence) -> list:
        c = self.ext.class_of(cochain)
        if c is None:
            raise LiftError("cochain is not a cocycle")
        return self.module.nf([self.env.mult(x) for x in c])

    def representative(self, coords: Sequence[Poly]) -> list:
        return self.ext.representative([self.env.left(x) for x in coords])

    def value_at_one(self, coords: Sequence[Poly]) -> list:
        """``phi(1_B)`` in ``H (x) H`` for a class of degree zero."""
        if self.p != 0:
            raise ValueError("evaluation at 1 needs a degree zero square")
        return self.representative(coords)[0]

    def concentration(self) -> dict:
        """Whether ``Ext^{p-1}`` and ``Ext^{p+1}`` vanish (``None``: outside the window)."""
        if self._concentration is None:
            out = {}
            for q in (self.p - 1, self.p + 1):
                if q < 0:
                    out[q] = True
                elif not self.resolution.exact_through(q):
                    out[q] = None
                else:
                    out[q] = ExtGroup(self.P, self.HH, q).module.is_zero()
            self._concentration = out
        return self._concentration

    def is_concentrated(self) -> bool:
        return all(v is not False for v in self.concentration().values())

    def to_json(self) -> dict:
        return {"kind": "square", "degree": self.d, "ring": str(self.ring),
                "generators": self.module.ngens,
                "relations": [[str(x) for x in r] for r in self.module.relations],
                "concentrated": self.is_concentrated()}

    def __repr__(self):
        return f"SquarePresentation(d={self.d}, gens={self.module.ngens})"


def square(B: RingPresentation, H: FPModule, d: int, window: int = DEFAULT_WINDOW,
           base: RingMap = None) -> SquarePresentation:
    return _SQ.get((B, H, base), (d, window), lambda: SquarePresentation(B, H, d, window, base))


class SharpPresentation:
    """``Ext^{-d}_{B^en}(H, H (x) H)`` and its identification with ``Hom_B(H, SqH)``.

    ``H`` is viewed over ``B^en`` through multiplication.  The class of a
    cocycle ``f`` corresponds to the map ``h_j -> f o iota_j`` where
    ``iota_j`` lifts ``1 -> h_j`` from the resolution of ``B`` to that of ``H``.
    """

    def __init__(self, sq: SquarePresentation):
        self.sq = sq
        env = sq.env
        self.res = restriction_of(sq.H, mult_map_of(env))
        self.Q = module_resolution(self.res.module, sq.window)
        self.ext = ExtGroup(self.Q.complex, sq.HH, sq.p, self.Q)
        R = env.ring
        g = sq.H.ngens
        self._iota = []
        for j in range(g):
            e = [sq.ring.zero()] * g
            e[j] = sq.ring.one()
            top = Mat.from_columns(R.poly_ring, [self.res.coords(e)], self.Q.complex.rank(0))
            f = lift_map(sq.P, self.Q.complex, 0, top)
            self._iota.append(f.mat(-sq.p))
        self._gens = None

    def to_module(self, cochain: Sequence) -> list:
        """Images in ``SqH`` of the generators of ``H``."""
        sq = self.sq
        w = sq.HH.ngens
        return [sq.class_of(_pull(m, cochain, sq.env.ring, w)) for m in self._iota]

    def generators(self) -> list:
        if self._gens is None:
            self._gens = self.ext.generator_cocycles()
        return self._gens

    def from_module(self, images: Sequence[Sequence[Poly]]) -> list:
        """The cocycle corresponding to ``h_j -> images[j]``."""
        sq = self.sq
        B = sq.ring
        gens = self.generators()
        cols = []
        for gc in gens:
            cols.append([x for v in self.to_module(gc) for x in v])
        rhs = [x for v in images for x in v]
        g = sq.module.ngens
        n = len(rhs)
        rels = []
        for j in range(len(images)):
            for r in sq.module.relations:
                w = [B.zero()] * n
                w[j * g:(j + 1) * g] = r
                rels.append(w)
        if not gens:
            if any(rhs):
                raise LiftError("no cocycles to represent a nonzero map")
            return []
        sol = LinearSystem(B.poly_ring, n, cols, rels, B.ideal).solve(rhs)
        if sol is None:
            raise LiftError("map is not in the image of the adjunction")
        R = sq.env.ring
        out = None
        for a, gc in zip(sol, gens):
            term = _scale_cochain(gc, sq.env.left(B.nf(a)), R)
            out = term if out is None else _add_cochains(out, term, R)
        return out

    def class_of(self, cochain: Sequence) -> list:
        c = self.ext.class_of(cochain)
        if c is None:
            raise LiftError("cochain is not a cocycle")
        return c


def sharp_of(sq: SquarePresentation) -> SharpPresentation:
    return _SHARP.get((sq,), None, lambda: SharpPresentation(sq))


# --- rigid complexes -------------------------------------------------------------------


@dataclass(eq=False)
class KoszulExpansion:
    """``rho(h_j) = kprox(<values[j] / seq>)`` over an enveloping ring."""

    env: EnvelopingData
    seq: list
    values: list

    def classes(self, sq: SquarePresentation) -> list:
        kp = KoszulApproximation(sq.env.ring, self.seq, sq.env.delta_gens,
                                 resolution=sq.resolution)
        return [sq.class_of(kp.fraction(sq.HH, v)) for v in self.values]


@dataclass(eq=False)
class RigidComplex:
    """``H[-d]`` with a rigidifier ``rho : H -> SqH``."""

    square: SquarePresentation
    rho: ModuleMap
    tag: str
    expansion: Optional[KoszulExpansion] = None
    notes: list = field(default_factory=list)
    morita: Optional[object] = None

    @property
    def ring(self) -> RingPresentation:
        return self.square.ring

    @property
    def H(self) -> FPModule:
        return self.square.H

    @property
    def d(self) -> int:
        return self.square.d

    @property
    def window(self) -> int:
        return self.square.window

    @property
    def base(self) -> Optional[RingMap]:
        return self.square.base

    def is_iso(self) -> bool:
        return self.rho.is_iso()

    def sharp(self) -> list:
        if not hasattr(self, "_sharp"):
            self._sharp = sharp_of(self.square).from_module(
                [self.rho.image_of_gen(j) for j in range(self.H.ngens)])
        return self._sharp

    def with_rho(self, rho: ModuleMap, tag: str = None) -> "RigidComplex":
        return RigidComplex(self.square, rho, tag or self.tag)

    def to_json(self) -> dict:
        return {"kind": "rigid", "tag": self.tag, "degree": self.d,
                "ring": str(self.ring), "generators": self.H.ngens,
                "relations": [[str(x) for x in r] for r in self.H.relations],
                "rho": [[str(x) for x in self.rho.image_of_gen(j)] for j in range(self.H.ngens)]}

    def __repr__(self):
        return f"RigidComplex({self.tag}, d={self.d}, gens={self.H.ngens})"


def make_rigid(sq: SquarePresentation, images: Sequence, tag: str,
               expansion: KoszulExpansion = None, check: bool = True) -> RigidComplex:
    rho = ModuleMap.from_images(sq.H, sq.module, list(images), check=False)
    R = RigidComplex(sq, rho, tag, expansion)
    if check and not rho.is_iso():
        raise LiftError(f"{tag} rigidifier is not an isomorphism")
    return R


def tautological(B: RingPresentation, window: int = DEFAULT_WINDOW,
                 base: RingMap = None) -> RigidComplex:
    """``(B, id)`` over ``B/B`` (for ``B = k`` pass no base)."""
    H = unit_module(B)
    sq = square(B, H, 0, window, base)
    one = sq.env.ring.one()
    return make_rigid(sq, [sq.class_of([[one]])], "tau", KoszulExpansion(sq.env, [], [[one]]))


# --- morphisms -----------------------------------------------------------------------


@dataclass(eq=False)
class BackwardMor:
    """``theta : N -> M`` over ``v : B -> C`` (``N`` over ``C``, ``M`` over ``B``).

    ``chain`` goes from a resolution of the restriction of ``H_N`` to one of
    ``H_M``; its degree is ``c = d_N - d_M``.
    """

    v: RingMap
    source: FPModule
    target: FPModule
    chain: ChainMap
    window: int = DEFAULT_WINDOW

    @property
    def c(self) -> int:
        return self.chain.degree

    @property
    def restriction(self) -> Restriction:
        return restriction_of(self.source, self.v)

    def cocycle(self) -> list:
        """Values in ``H_M`` on the generators of ``P_N^{-c}``."""
        m = self.chain.mat(-self.c)
        return [list(col) for col in m.columns()]

    def scale(self, c: Poly) -> "BackwardMor":
        return BackwardMor(self.v, self.source, self.target, self.chain.scale(c), self.window)

    def precompose_mult(self, c: Poly) -> "BackwardMor":
        """``theta o (c * -)`` for ``c`` in ``C``."""
        mu = mult_lift(self.source, self.v, c, self.window)
        return BackwardMor(self.v, self.source, self.target, self.chain.compose(mu), self.window)

    def module_map(self) -> ModuleMap:
        """Degree zero component ``Res H_N -> H_M``."""
        if self.c != 0:
            raise ValueError("only degree zero morphisms are module maps")
        return ModuleMap(self.restriction.module, self.target, self.chain.mat(0), check=False)


def backward_from_module_map(v: RingMap, N: FPModule, M: FPModule, matrix: Mat,
                             window: int = DEFAULT_WINDOW) -> BackwardMor:
    """Lift a ``B``-linear ``Res_v H_N -> H_M`` to a degree zero backward morphism."""
    res = restriction_of(N, v)
    PN = module_resolution(res.module, window).complex
    PM = module_resolution(M, window).complex
    chain = lift_map(PN, PM, 0, matrix)
    return BackwardMor(v, N, M, chain, window)


def mult_lift(N: FPModule, v: RingMap, c: Poly, window: int = DEFAULT_WINDOW) -> ChainMap:
    """Multiplication by ``c`` in ``C`` on ``Res_v N``, lifted to its resolution."""
    res = restriction_of(N, v)
    PN = module_resolution(res.module, window).complex
    C = v.target
    cols = []
    for (k, p) in res.labels:
        vec = [C.zero()] * N.ngens
        vec[p] = C.nf(C(c) * res.basis[k])
        cols.append(res.coords(vec))
    top = Mat.from_columns(v.source.poly_ring, cols, len(res.labels))
    return lift_map(PN, PN, 0, top)


@dataclass(eq=False)
class ForwardMor:
    """``lam : M -> N`` over ``v : B -> C``, ``B``-linear, given on generators of ``H_M``."""

    v: RingMap
    source: FPModule
    target: FPModule
    images: list

    def scale(self, c: Poly) -> "ForwardMor":
        C = self.v.target
        return ForwardMor(self.v, self.source, self.target,
                          [self.target.nf([C.nf(C(c) * x) for x in im]) for im in self.images])

    def compose(self, inner: "ForwardMor") -> "ForwardMor":
        """``self o inner`` over the composite ring map."""
        imgs = []
        for im in inner.images:
            out = [self.v.target.zero()] * self.target.ngens
            for j, x in enumerate(im):
                if x:
                    fx = self.v(x)
                    out = [a + fx * b for a, b in zip(out, self.images[j])]
            imgs.append(self.target.nf(out))
        return ForwardMor(self.v.compose(inner.v), inner.source, self.target, imgs)

    def adjoint(self) -> ModuleMap:
        """``C (x)_B H_M -> H_N``."""
        src = base_change(self.source, self.v)
        return ModuleMap.from_images(src, self.target, self.images, check=False)

    def is_nondegenerate(self) -> bool:
        return self.adjoint().is_iso()


def standard_forward(v: RingMap, M: FPModule) -> ForwardMor:
    """``q : M -> C (x)_B M``, ``m -> 1 (x) m``."""
    N = base_change(M, v)
    C = v.target
    imgs = [[C.one() if i == j else C.zero() for i in range(M.ngens)] for j in range(M.ngens)]
    return ForwardMor(v, M, N, imgs)


# --- squares of morphisms -----------------------------------------------------------------


def _values_along(v_en: RingMap, HH_src_g: int, val: Sequence[Poly], images: Sequence,
                  envC: EnvelopingData) -> list:
    """Apply ``lam (x) lam`` to a value in ``H_M (x) H_M`` (entries over ``B^en``)."""
    g = HH_src_g
    gN = len(images[0]) if images else 0
    out = [envC.ring.zero()] * (gN * gN)
    for idx, f in enumerate(val):
        if not f:
            continue
        a, b = divmod(idx, g)
        t = tensor_vector(envC, images[a], images[b])
        vf = v_en(f)
        out = [x + vf * y for x, y in zip(out, t)]
    return [envC.ring.nf(x) for x in out]


class DiagonalReduction:
    """``Sq_{B/k}(N) -> Sq_{C/k}(N)`` for essentially etale ``v : B -> C``.

    A cocycle on the resolution of ``B`` over ``B^en`` with values in
    ``N (x) N`` extends to ``C^en (x)_{B^en} P_B`` (a resolution of
    ``C (x)_B C``) and is pulled back along a lift of ``sec : C -> C (x)_B C``.
    """

    def __init__(self, v: RingMap, sqN: SquarePresentation, check_etale: bool = True):
        B, C = v.source, v.target
        if sqN.ring != C:
            raise RingMismatch("square must live over the target of the map")
        self.v, self.sqN = v, sqN
        self.envB = enveloping(B)
        self.envC = sqN.env
        self.v_en = enveloping_map(v, self.envB, self.envC)
        sec = etale_section(v, check_etale=check_etale)
        R = self.envC.ring
        self.e = R.nf(sec.e.change_ring(R.poly_ring))
        self.PB = diagonal_resolution(self.envB, sqN.window).complex
        self.PBC = self.PB.base_change(self.v_en)
        top = Mat(R.poly_ring, [[self.e]])
        self.lift = lift_map(sqN.P, self.PBC, 0, top)

    def pull(self, cochain: Sequence) -> list:
        """Cochain on ``P_B^{-p}`` with ``C^en`` values, pulled back to ``P_C``."""
        m = self.lift.mat(-self.sqN.p)
        return _pull(m, cochain, self.envC.ring, self.sqN.HH.ngens)

    def apply(self, cochain: Sequence) -> list:
        return self.sqN.class_of(self.pull(cochain))


def reduction_to_diagonal(v: RingMap, N: FPModule, d: int, window: int = DEFAULT_WINDOW,
                          check_etale: bool = True) -> DiagonalReduction:
    return DiagonalReduction(v, square(v.target, N, d, window), check_etale)


def square_forward(lam: ForwardMor, sqM: SquarePresentation, sqN: SquarePresentation,
                   reduction: DiagonalReduction = None) -> list:
    """``Sq_v(lam) : SqH_M -> SqH_N`` on the generators of ``SqH_M``."""
    red = reduction or DiagonalReduction(lam.v, sqN)
    out = []
    gM = lam.source.ngens
    for i in range(sqM.module.ngens):
        rep = sqM.representative(sqM.module.gen(i))
        vals = [_values_along(red.v_en, gM, val, lam.images, red.envC) for val in rep]
        out.append(red.apply(vals))
    return out


def forward_is_rigid(lam: ForwardMor, M: RigidComplex, N: RigidComplex,
                     reduction: DiagonalReduction = None) -> bool:
    """``sigma o lam = Sq_v(lam) o rho`` on generators of ``H_M``."""
    lhs, rhs = _forward_sides(lam, M, N, reduction)
    return all(N.square.module.equal(a, b) for a, b in zip(lhs, rhs))


def _forward_sides(lam, M, N, reduction=None):
    red = reduction or DiagonalReduction(lam.v, N.square)
    sqM = M.square
    gM = lam.source.ngens
    lhs, rhs = [], []
    for j in range(gM):
        lhs.append(N.rho.apply(lam.images[j]))
        rep = sqM.representative(M.rho.image_of_gen(j))
        vals = [_values_along(red.v_en, gM, val, lam.images, red.envC) for val in rep]
        rhs.append(red.apply(vals))
    return lhs, rhs


def square_backward(theta: BackwardMor, sqN: SquarePresentation,
                    sqM: SquarePresentation) -> ModuleMap:
    """``Sq(theta) : Res SqH_N -> SqH_M`` for a degree zero backward morphism."""
    if theta.c != 0:
        raise ValueError("module-level squares need a degree zero morphism")
    v = theta.v
    envB, envC = sqM.env, sqN.env
    v_en = enveloping_map(v, envB, envC)
    lift = lift_map(sqM.P, sqN.P, 0, Mat(envC.ring.poly_ring, [[envC.ring.one()]]), along=v_en)
    res = theta.restriction
    theta0 = theta.chain.mat(0)
    gM = sqM.H.ngens
    sres = restriction_of(sqN.module, v)
    cols = []
    m = lift.mat(-sqM.p)
    for (k, i) in sres.labels:
        coords = [v.target.zero()] * sqN.module.ngens
        coords[i] = sres.basis[k]
        rep = sqN.representative(sqN.module.nf(coords))
        pulled = _pull(m, rep, envC.ring, sqN.HH.ngens)
        vals = []
        for val in pulled:
            rv = _restrict_tensor_vector(val, envC, envB, res)
            vals.append(_apply_tensor_matrix(rv, theta0, envB, len(res.labels), gM))
        cols.append(sqM.class_of(vals))
    return ModuleMap.from_images(sres.module, sqM.module, cols, check=False)


def _apply_tensor_matrix(val: Sequence[Poly], m: Mat, env: EnvelopingData, gs: int,
                         gt: int) -> list:
    """``(m (x) m)`` applied to an element of ``X (x) X`` with ``m : X -> Y``."""
    R = env.ring
    out = [R.zero()] * (gt * gt)
    lm = [[env.left(x) for x in row] for row in m.rows]
    rm = [[env.right(x) for x in row] for row in m.rows]
    for idx, f in enumerate(val):
        if not f:
            continue
        a, b = divmod(idx, gs)
        for a2 in range(gt):
            x = lm[a2][a]
            if not x:
                continue
            for b2 in range(gt):
                y = rm[b2][b]
                if y:
                    out[a2 * gt + b2] = out[a2 * gt + b2] + f * x * y
    return [R.nf(x) for x in out]


# --- backward rigidity in adjoint form ---------------------------------------------------------


def _tensor_complex(P, env: EnvelopingData) -> TensorComplex:
    return _TENSOR.get((P, env), None,
                       lambda: TensorComplex(P, P, env.ring, env.left, env.right))


def restrict_chain(f: ChainMap, w: RingMap, XN: FPModule, XM: FPModule, window: int) -> ChainMap:
    """Restrict a chain map between resolutions of ``XN`` and ``XM`` along ``w``."""
    S = w.target
    resN = restriction_of(XN, w)
    resM = restriction_of(XM, w)
    QN = module_resolution(resN.module, window).complex
    QM = module_resolution(resM.module, window).complex
    PN = f.source
    cols = []
    for (k, p) in resN.labels:
        col = [S.zero()] * PN.rank(0)
        col[p] = resN.basis[k]
        cols.append(col)
    alpha = lift_map(QN, PN, 0, Mat.from_columns(S.poly_ring, cols, PN.rank(0)), along=w)
    comp = f.compose(alpha)
    c = f.degree
    vals = comp.mat(-c).columns()
    top = Mat.from_columns(w.source.poly_ring, [resM.coords(v) for v in vals], QM.rank(0))
    return lift_map(QN, QM, -c, top, degree=c)


class BackwardRigidity:
    """Both sides of the rigidity square of ``theta : N -> M`` as ``B^en``-classes.

    ``lhs(theta) = rho_M o theta`` and ``rhs(sigma) = Sq(theta) o sigma`` live in
    ``Ext^{d_N - 2 d_M}_{B^en}(H_N, H_M (x) H_M)``.
    """

    def __init__(self, theta: BackwardMor, sqN: SquarePresentation, M: RigidComplex):
        self.theta, self.sqN, self.M = theta, sqN, M
        window = M.window
        self.window = window
        v = theta.v
        envB, envC = M.square.env, sqN.env
        self.envB, self.envC = envB, envC
        multB = mult_map_of(envB)
        self.resN = theta.restriction
        XN = self.resN.module
        self.rres = restriction_of(XN, multB)
        self.Q = module_resolution(self.rres.module, window)
        self.q = sqN.d - 2 * M.d
        if self.q < 0:
            raise RigidCalcError("negative adjoint degree")
        self.ext = ExtGroup(self.Q.complex, M.square.HH, self.q, self.Q)
        self.shN = sharp_of(sqN)
        self.shM = sharp_of(M.square)
        v_en = enveloping_map(v, envB, envC)
        cols = []
        for (_, l) in self.rres.labels:
            k, p = self.resN.labels[l]
            col = [v.target.zero()] * sqN.H.ngens
            col[p] = self.resN.basis[k]
            cols.append(self.shN.res.coords(col))
        top = Mat.from_columns(envC.ring.poly_ring, cols, self.shN.Q.complex.rank(0))
        self.gamma = lift_map(self.Q.complex, self.shN.Q.complex, 0, top, along=v_en)
        PN = theta.chain.source
        PM = theta.chain.target
        self.TN = _tensor_complex(PN, envB)
        self.TM = _tensor_complex(PM, envB)
        self._tensor = {}

    def _theta_tensor(self, theta: BackwardMor) -> ChainMap:
        key = id(theta)
        if key not in self._tensor:
            c = theta.c
            sign = -1 if (c * (c - 1) // 2) % 2 else 1
            self._tensor[key] = (theta, self.TN.tensor_maps(theta.chain, theta.chain, self.TM)
                                 .scale(sign))
        return self._tensor[key][1]

    def lhs(self, theta: BackwardMor = None) -> list:
        theta = theta or self.theta
        M = self.M
        t = restrict_chain(theta.chain, mult_map_of(self.envB), self.resN.module, M.H, self.window)
        co = _pull(t.mat(-self.q), M.sharp(), self.envB.ring, M.square.HH.ngens)
        return self._class(co)

    def rhs(self, sigma_sharp: Sequence, theta: BackwardMor = None) -> list:
        theta = theta or self.theta
        pN = self.sqN.p
        comp = _pull(self.gamma.mat(-pN), sigma_sharp, self.envC.ring, self.sqN.HH.ngens)
        vals = [_restrict_tensor_vector(v, self.envC, self.envB, self.resN) for v in comp]
        R = self.envB.ring
        T = self.TN.complex
        top = Mat.from_columns(R.poly_ring, vals, T.rank(0))
        lifted = lift_map(self.Q.complex, T, -pN, top, degree=pN)
        total = self._theta_tensor(theta).compose(lifted)
        co = [list(c) for c in total.mat(-self.q).columns()]
        return self._class(co)

    def _class(self, cochain) -> list:
        c = self.ext.class_of(cochain)
        if c is None:
            raise LiftError("adjoint cochain is not a cocycle")
        return c

    def equal(self, a: Sequence, b: Sequence) -> bool:
        return self.ext.module.equal(a, b)

    def solve(self, columns: Sequence, target: Sequence) -> Optional[list]:
        """Coefficients in ``B`` with ``sum a_i columns[i] = target``."""
        R = self.envB.ring
        mod = self.ext.module
        if mod.ngens == 0:
            return [self.M.ring.zero()] * len(columns)
        sol = LinearSystem(R.poly_ring, mod.ngens, [list(c) for c in columns],
                           mod.relations, R.ideal).solve(list(target))
        if sol is None:
            return None
        return [self.envB.mult(x) for x in sol]


def backward_is_rigid(theta: BackwardMor, N: RigidComplex, M: RigidComplex) -> bool:
    br = BackwardRigidity(theta, N.square, M)
    return br.equal(br.lhs(), br.rhs(N.sharp()))


def rigidifier_coinduced_sigma(theta: BackwardMor, sqN: SquarePresentation,
                               M: RigidComplex) -> RigidComplex:
    """The unique rigidifier on ``N`` making the nondegenerate ``theta`` rigid."""
    br = BackwardRigidity(theta, sqN, M)
    shN = br.shN
    gens = shN.generators()
    basis = br.resN.basis
    cols = []
    for g in gens:
        for b in basis:
            cols.append(br.rhs(_scale_cochain(g, br.envC.left(b), br.envC.ring)))
    target = br.lhs()
    sol = br.solve(cols, target)
    if sol is None:
        raise LiftError("no rigidifier makes the trace rigid")
    v = theta.v
    C = v.target
    RC = br.envC.ring
    sigma = None
    i = 0
    for g in gens:
        a = C.zero()
        for b in basis:
            a = a + v(sol[i]) * b
            i += 1
        term = _scale_cochain(g, br.envC.left(C.nf(a)), RC)
        sigma = term if sigma is None else _add_cochains(sigma, term, RC)
    if sigma is None:
        raise LiftError("the square of the coinduced module vanishes")
    images = shN.to_module(sigma)
    R = make_rigid(sqN, images, "coinduced")
    R._sharp = sigma
    if not br.equal(br.rhs(sigma), target):
        raise LiftError("solved rigidifier does not close the square")
    return R


# --- units -----------------------------------------------------------------------------


@dataclass
class UnitSolution:
    c: Poly
    morphism: object


def solve_rigid_unit(theta, M: RigidComplex, N: RigidComplex,
                     check_morita: bool = False) -> UnitSolution:
    """The unit ``c`` with ``c * (rho o theta') = Sq(theta') o sigma`` and the rigid morphism.

    Backward ``theta' : N -> M`` (``N`` over ``C``): the rigid morphism is
    ``theta' o c^{-1}``.  Forward ``lam' : M -> N``: ``c^{-1} lam'``.
    """
    if check_morita:
        from .dualizing import derived_morita_check
        target = M if isinstance(theta, BackwardMor) else N
        from .errors import NotMorita
        if not derived_morita_check(target.H, max(2, target.window - 2)).holds:
            raise NotMorita("target complex lacks the derived Morita property")
    if isinstance(theta, BackwardMor):
        return _solve_backward_unit(theta, M, N)
    if isinstance(theta, ForwardMor):
        return _solve_forward_unit(theta, M, N)
    raise TypeError("expected a backward or forward morphism")


def _solve_backward_unit(theta: BackwardMor, M: RigidComplex, N: RigidComplex) -> UnitSolution:
    br = BackwardRigidity(theta, N.square, M)
    basis = br.resN.basis
    cols = [br.lhs(theta.precompose_mult(b)) for b in basis]
    target = br.rhs(N.sharp())
    sol = br.solve(cols, target)
    if sol is None:
        raise NotUnit("no scalar relates the two sides of the rigidity square")
    C = theta.v.target
    c = C.nf(sum((theta.v(a) * b for a, b in zip(sol, basis)), C.zero()))
    inv = C.inverse(c)
    if inv is None:
        raise NotUnit(f"{c} is not a unit")
    return UnitSolution(c, theta.precompose_mult(inv))


def _solve_forward_unit(lam: ForwardMor, M: RigidComplex, N: RigidComplex) -> UnitSolution:
    lhs, rhs = _forward_sides(lam, M, N)
    C = lam.v.target
    c = _solve_scalar(C, N.square.module, lhs, rhs)
    if c is None:
        raise NotUnit("no scalar relates the two sides of the rigidity square")
    inv = C.inverse(c)
    if inv is None:
        raise NotUnit(f"{c} is not a unit")
    return UnitSolution(c, lam.scale(inv))


def rigid_isomorphism(R1: RigidComplex, R2: RigidComplex, candidate: ModuleMap = None) -> ModuleMap:
    """The unique rigid isomorphism ``R1 -> R2`` of rigid complexes over one ring."""
    from .fpmodules import find_isomorphism
    if R1.ring != R2.ring or R1.d != R2.d:
        raise RingMismatch("rigid complexes over different rings or degrees")
    if candidate is None:
        status, candidate, _ = find_isomorphism(R1.H, R2.H)
        if status != "iso":
            raise LiftError("no isomorphism of the underlying modules was found")
    B = R1.ring
    if R1.square.P is not R2.square.P:
        raise RingMismatch("rigid complexes over different bases or windows")
    lhs, rhs = _identity_sides(candidate, R1, R2)
    c = _solve_scalar(B, R2.square.module, lhs, rhs)
    inv = None if c is None else B.inverse(c)
    if inv is None:
        raise NotUnit("the candidate isomorphism cannot be rescaled to a rigid one")
    return candidate.scale(inv).reduced()


def _identity_sides(phi: ModuleMap, R1: RigidComplex, R2: RigidComplex) -> tuple:
    """``rho_2 o phi`` and ``Sq(phi) o rho_1`` on the generators of ``H_1``."""
    sq1, sq2 = R1.square, R2.square
    g1, g2 = R1.H.ngens, R2.H.ngens
    lhs, rhs = [], []
    for j in range(g1):
        lhs.append(R2.rho.apply(phi.image_of_gen(j)))
        rep = sq1.representative(R1.rho.image_of_gen(j))
        vals = [_apply_tensor_matrix(val, phi.matrix, sq1.env, g1, g2) for val in rep]
        rhs.append(sq2.class_of(vals))
    return lhs, rhs


def is_rigid_isomorphism(phi: ModuleMap, R1: RigidComplex, R2: RigidComplex) -> bool:
    lhs, rhs = _identity_sides(phi, R1, R2)
    return phi.is_iso() and all(R2.square.module.equal(a, b) for a, b in zip(lhs, rhs))


# --- rigidifiers ------------------------------------------------------------------------


def find_etale_coordinates(u: RingMap) -> list:
    """Variables whose differentials form a basis of ``Omega^1``."""
    B = u.target
    names = list(B.user_names)
    for n in range(len(names) + 1):
        for S in itertools.combinations(names, n):
            seq = [B.var(x) for x in S]
            if check_etale_coords(u, seq):
                return seq
    raise NoCoordinates(f"no etale coordinate system among the variables of {B}")


def _as_structure(u) -> tuple:
    if isinstance(u, RingPresentation):
        return structure_map(u), None
    if not u.source.poly_ring.names:
        return u, None  # over the ground field: absolute
    return u, u


def rigidifier_esm(u, coords: Sequence = None, window: int = DEFAULT_WINDOW) -> RigidComplex:
    """``(Omega^n[n], rho^esm)`` with ``rho(beta) = kprox(<beta (x) beta / delta(b)>)``."""
    u, base = _as_structure(u)
    B = u.target
    if coords is None:
        coords = find_etale_coordinates(u)
    else:
        coords = [B(b) for b in coords]
        if not check_etale_coords(u, coords):
            raise NoCoordinates("the given elements are not etale coordinates")
    n = len(coords)
    H = kahler(u, n)
    beta = wedge_of_differentials(u, coords)
    env = enveloping(B, base)
    seq = [env.delta(b) for b in coords]
    P = B.poly_ring
    ls = LinearSystem(P, H.ngens, [beta], H.relations, B.ideal)
    bb = tensor_vector(env, beta, beta)
    values = []
    for j in range(H.ngens):
        sol = ls.solve(H.gen(j))
        if sol is None:
            raise NoCoordinates("the wedge of the coordinates does not generate Omega^n")
        a = env.left(B.nf(sol[0]))
        values.append([env.ring.nf(a * x) for x in bb])
    expansion = KoszulExpansion(env, seq, values)
    sq = square(B, H, -n, window, base)
    R = make_rigid(sq, expansion.classes(sq), "esm", expansion)
    R.notes.append(f"coordinates {[str(b) for b in coords]}")
    return R


def section_rigid(v, window: int = DEFAULT_WINDOW) -> RigidComplex:
    """``(C, sec)`` for essentially etale ``v`` (a field base when ``v`` is a ring)."""
    u, base = _as_structure(v)
    C = u.target
    sec = etale_section(u)
    env = enveloping(C, base)
    e = env.ring.nf(sec.e.change_ring(env.ring.poly_ring))
    H = unit_module(C)
    sq = square(C, H, 0, window, base)
    R = make_rigid(sq, [sq.class_of([[e]])], "sec", KoszulExpansion(env, [], [[env.ring.one()]]))
    return R


def rigidifier_induced(v: RingMap, M: RigidComplex, check_etale: bool = True) -> tuple:
    """``C (x)_B M`` with the induced rigidifier; returns ``(rigid, q)``."""
    if v.source != M.ring:
        raise RingMismatch("map does not start at the ring of the rigid complex")
    q = standard_forward(v, M.H)
    sqN = square(v.target, q.target, M.d, M.window)
    red = DiagonalReduction(v, sqN, check_etale)
    images = [red.apply([_values_along(red.v_en, M.H.ngens, val, q.images, red.envC)
                         for val in M.square.representative(M.rho.image_of_gen(j))])
              for j in range(M.H.ngens)]
    N = make_rigid(sqN, images, "induced")
    return N, q


def cup_product(M: RigidComplex, N: RigidComplex, window: int = None,
                v: RingMap = None) -> RigidComplex:
    """``rho cup sigma`` on ``M (x)_B N`` over ``C/k`` from Koszul expansions.

    ``M`` lives over ``B/k`` and ``N`` over ``C/B``; the value on
    ``m (x) l`` is ``sum (m'_i (x) l'_j) (x) (m''_i (x) l''_j)`` over the
    concatenated sequence.
    """
    if M.expansion is None or N.expansion is None:
        raise RigidCalcError("cup product needs Koszul expansions of both rigidifiers")
    v = v or N.base
    if v is None and not M.ring.poly_ring.names:
        v = structure_map(N.ring)
    if v is None or v.source != M.ring:
        raise RingMismatch("second factor must be relative to the ring of the first")
    C = v.target
    window = window or M.window
    envB = M.square.env
    envC = enveloping(C)
    v_en = enveloping_map(v, envB, envC)
    R = envC.ring
    L = tensor_modules(base_change(M.H, v), N.H)
    gM, gN = M.H.ngens, N.H.ngens
    gL = gM * gN
    seq = [v_en(s) for s in M.expansion.seq]
    seq += [R.nf(s.change_ring(R.poly_ring)) for s in N.expansion.seq]
    values = []
    for a in range(gM):
        mv = M.expansion.values[a]
        for p in range(gN):
            nv = [R.nf(x.change_ring(R.poly_ring)) for x in N.expansion.values[p]]
            out = [R.zero()] * (gL * gL)
            for i, f in enumerate(mv):
                if not f:
                    continue
                a1, a2 = divmod(i, gM)
                vf = v_en(f)
                for j, h in enumerate(nv):
                    if h:
                        p1, p2 = divmod(j, gN)
                        idx = (a1 * gN + p1) * gL + (a2 * gN + p2)
                        out[idx] = out[idx] + vf * h
            values.append([R.nf(x) for x in out])
    expansion = KoszulExpansion(envC, seq, values)
    sq = square(C, L, M.d + N.d, window)
    return make_rigid(sq, expansion.classes(sq), "cup", expansion)


def twisted_induced(v: RingMap, M: RigidComplex, coords: Sequence = None) -> RigidComplex:
    """``M (x)_B Omega^n_{C/B}[n]`` with ``rho cup rho^esm_{C/B}``."""
    N = rigidifier_esm(v, coords, M.window)
    R = cup_product(M, N, M.window, v)
    R.tag = "twisted"
    return R


# --- coinduction ----------------------------------------------------------------------------


@dataclass(eq=False)
class Coinduction:
    """``RHom_B(C, M)`` for finite ``u : B -> C`` with its trace ``tr : N -> M``."""

    u: RingMap
    H: FPModule
    degree: int
    trace: BackwardMor
    concentration: dict
    truncated: bool


def coinduce(u: RingMap, M_H: FPModule, M_d: int, window: int = DEFAULT_WINDOW) -> Coinduction:
    """Cohomology of ``Hom_B(F, P_M)`` with ``F`` resolving ``C`` over ``B``.

    The ``C``-action comes from lifting multiplication by each variable of
    ``C`` to ``F``; the trace is evaluation at ``1``.
    """
    B, C = u.source, u.target
    if M_H.ring != B:
        raise RingMismatch("module must live over the source ring")
    resC = restriction_of(unit_module(C), u)
    Fres = module_resolution(resC.module, window)
    F = Fres.complex
    PMres = module_resolution(M_H, window)
    PM = PMres.complex
    X = HomComplex(F, PM)
    L = -PM.lo
    hi = window - L - 1 if not Fres.terminated else X.complex.hi
    truncated = not Fres.terminated
    conc = {}
    nonzero = []
    for i in range(X.complex.lo, hi + 1):
        z = X.complex.cohomology(i).module.is_zero()
        conc[i] = z
        if not z:
            nonzero.append(i)
    if len(nonzero) != 1:
        raise NotConcentrated(f"RHom is nonzero in degrees {nonzero} (window {window})")
    c = nonzero[0]
    coh = X.complex.cohomology(c)
    nb = len(resC.basis)

    def mult_chain(y):
        cols = [resC.coords([C.nf(C(y) * b)]) for b in resC.basis]
        return lift_map(F, F, 0, Mat.from_columns(B.poly_ring, cols, nb))

    def precompose(vec, mu):
        comps = X.unflatten(c, vec)
        out = {}
        for j, m in comps.items():
            out[j] = m * mu.mat(j)
        return X.flatten(c, out)

    cycles = coh.gens
    g0 = len(cycles)
    rels = [[u(x) for x in r] for r in coh.module.relations]
    for y in C.poly_ring.gens():
        mu = mult_chain(C.nf(y))
        for j in range(g0):
            a = coh.class_of(precompose(cycles[j], mu))
            if a is None:
                raise LiftError("multiplication does not preserve cocycles")
            r = [u(-x) for x in a]
            r[j] = r[j] + C.nf(y)
            rels.append(r)
    raw = FPModule(C, g0, rels)
    H, keep, _ = trim_presentation(raw)
    res = restriction_of(H, u)
    PN = module_resolution(res.module, window).complex
    mus = {}
    cols = []
    for (k, i) in res.labels:
        if k not in mus:
            mus[k] = mult_chain(resC.basis[k])
        cols.append(precompose(cycles[keep[i]], mus[k]))
    top = Mat.from_columns(B.poly_ring, cols, X.complex.rank(c))
    g = lift_map(PN, X.complex, 0, top, degree=c)
    eta = resC.coords([C.one()])
    tr_mats = {}
    for i in X.complex.degrees():
        r_ = PM.rank(i)
        n_ = X.complex.rank(i)
        if not (r_ and n_):
            continue
        rows = [[B.zero()] * n_ for _ in range(r_)]
        for (jF, rows_, cols_, off) in X.layout(i):
            if jF != 0:
                continue
            for col in range(cols_):
                if eta[col]:
                    for row in range(rows_):
                        rows[row][off + col * rows_ + row] = eta[col]
        tr_mats[i] = Mat(B.poly_ring, rows, n_)
    tr = ChainMap(X.complex, PM, tr_mats, 0, check=False)
    theta = BackwardMor(u, H, M_H, tr.compose(g), window)
    return Coinduction(u, H, M_d + c, theta, conc, truncated)


def rigidifier_coinduced(u: RingMap, M: RigidComplex, window: int = None) -> tuple:
    """``(N, tr)`` with ``N = RHom_B(C, M)`` carrying the coinduced rigidifier."""
    window = window or M.window
    co = coinduce(u, M.H, M.d, window)
    base = None if M.base is None else u.compose(M.base)
    sqN = square(u.target, co.H, co.degree, window, base)
    N = rigidifier_coinduced_sigma(co.trace, sqN, M)
    if co.truncated:
        N.notes.append("resolution of the finite algebra was truncated")
    return N, co.trace
