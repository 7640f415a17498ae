"""Rigid dualizing complexes over a field and the morphisms between them.

``R_B`` is built along a presentation ``k -> k[t] -> A_2 -> B``: the
essentially smooth rigidifier on the polynomial ring, coinduced along the
surjection onto ``A_2 = k[t]/I`` and induced along the localization
``A_2 -> B``.  Traces and localization maps are the standard ones composed with
the unique rigid isomorphisms and normalized by the unit solver.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .complexes import ExtGroup, chain_homotopic, free_resolution, lift_map
from .errors import (LiftError, NoCoordinates, NotConcentrated, NotFinite, RigidCalcError,
                     RingMismatch, UnsupportedBase, WindowTooSmall)
from .fpmodules import (FPModule, ModuleMap, RingMap, RingPresentation, base_change,
                        find_isomorphism, tensor_modules)
from .polycore import Mat, Poly, PolyRing, evaluate
from .smooth_etale import FreeAlgebraBasis, etale_section, kahler, structure_map
from .squaring import (DEFAULT_WINDOW, BackwardMor, ForwardMor, RigidComplex, _Cache,
                       backward_from_module_map, coinduce, enveloping, find_etale_coordinates,
                       make_rigid, module_resolution, restrict_chain, restriction_of,
                       rigid_isomorphism, rigidifier_coinduced, rigidifier_coinduced_sigma,
                       rigidifier_esm, rigidifier_induced, solve_rigid_unit, square,
                       tautological, tensor_vector, twisted_induced, unit_module)

MORITA_WINDOW = 4

_RDC = _Cache()


def clear_dualizing_cache():
    _RDC.clear()


# --- derived Morita property ------------------------------------------------------------


@dataclass
class MoritaReport:
    holds: bool
    hom_free: bool
    vanishing: dict
    truncated: bool
    window: int

    def __bool__(self):
        return self.holds

    def to_json(self) -> dict:
        return {"kind": "morita", "holds": self.holds, "hom_free": self.hom_free,
                "vanishing": {str(p): z for p, z in self.vanishing.items()},
                "truncated": self.truncated, "window": self.window}


def derived_morita_check(M: FPModule, window: int = MORITA_WINDOW) -> MoritaReport:
    """Whether ``B -> Ext^0(M, M)`` is bijective and ``Ext^p(M, M) = 0`` for ``0 < p <= window``.

    Negative self-Exts of a module vanish, so only ``p > 0`` is computed.
    """
    if window < 2:
        raise WindowTooSmall("the Morita check needs a window of at least 2")
    B = M.ring
    res = free_resolution(M, window + 1)
    ext0 = ExtGroup(res.complex, M, 0, res)
    ident = ext0.class_of([M.gen(j) for j in range(M.ngens)])
    homothety = ModuleMap.from_images(FPModule.free(B, 1), ext0.module, [ident], check=False)
    hom_free = homothety.is_iso()
    vanishing = {}
    for p in range(1, window + 1):
        if res.complex.rank(-p) == 0:
            vanishing[p] = True
            continue
        vanishing[p] = ExtGroup(res.complex, M, p, res).module.is_zero()
    holds = hom_free and all(vanishing.values())
    return MoritaReport(holds, hom_free, vanishing, not res.terminated, window)


# --- rigid dualizing complexes ----------------------------------------------------------


def _polynomial_cover(B: RingPresentation) -> RingPresentation:
    return RingPresentation(B.field, list(B.user_names))


def _strip_localization(B: RingPresentation) -> RingPresentation:
    """``k[t]/I`` with the relations of ``B`` but no inverted elements."""
    return RingPresentation(B.field, list(B.user_names), [str(r) for r in B.relations])


def _user_vars(src: RingPresentation, tgt: RingPresentation) -> list:
    return [tgt.var(x) for x in src.user_names]


def rigid_dualizing_complex(B: RingPresentation, window: int = DEFAULT_WINDOW,
                            morita_window: int = MORITA_WINDOW) -> RigidComplex:
    """``(R_B, rho_B)`` following the presentation of ``B``."""
    return _RDC.get((B,), (window, morita_window),
                    lambda: _build_rdc(B, window, morita_window))


def _build_rdc(B: RingPresentation, window: int, morita_window: int) -> RigidComplex:
    B.require_nonzero()
    if not B.user_names:
        R = tautological(B, window)
    else:
        P = B if not (B.relations or B.inverted) else _polynomial_cover(B)
        R = rigidifier_esm(P, P.gens(), window)
        A2 = B
        if B.inverted:
            A2 = _strip_localization(B)
        if B.relations:
            u2 = RingMap(P, A2, _user_vars(P, A2), check=False, finite=True)
            R, _ = rigidifier_coinduced(u2, R, window)
        if B.inverted:
            u3 = RingMap(A2, B, _user_vars(A2, B), check=False, localization=True)
            R, _ = rigidifier_induced(u3, R)
    R.tag = "rdc"
    R.morita = derived_morita_check(R.H, morita_window)
    R.notes.append(f"derived Morita within window {morita_window}: {R.morita.holds}")
    return R


# --- rigid trace ----------------------------------------------------------------------------


@dataclass
class RigidTrace:
    morphism: BackwardMor
    unit: Poly
    source: RigidComplex
    target: RigidComplex
    morita: MoritaReport

    def to_json(self) -> dict:
        m = self.morphism
        return {"kind": "rigid_trace", "degree": m.c, "unit": str(self.unit),
                "cocycle": [[str(x) for x in col] for col in m.cocycle()],
                "morita": self.morita.holds}


def _restricted_module_map(phi: ModuleMap, u: RingMap) -> Mat:
    """The matrix of ``Res_u(phi)`` on the restriction generators."""
    rs = restriction_of(phi.source, u)
    rt = restriction_of(phi.target, u)
    C = u.target
    cols = []
    for (k, p) in rs.labels:
        vec = [C.zero()] * phi.source.ngens
        vec[p] = rs.basis[k]
        cols.append(rt.coords(phi.apply(vec)))
    return Mat.from_columns(u.source.poly_ring, cols, len(rt.labels))


def rigid_trace(u: RingMap, window: int = DEFAULT_WINDOW) -> RigidTrace:
    """``tr^rig : R_C -> R_B`` for a finite ``u : B -> C``."""
    RB = rigid_dualizing_complex(u.source, window)
    RC = rigid_dualizing_complex(u.target, window)
    N, tr = rigidifier_coinduced(u, RB, window)
    phi = rigid_isomorphism(RC, N)
    top = _restricted_module_map(phi, u)
    src = module_resolution(restriction_of(RC.H, u).module, window).complex
    tgt = tr.chain.source
    lift = lift_map(src, tgt, 0, top)
    theta = BackwardMor(u, RC.H, RB.H, tr.chain.compose(lift), window)
    sol = solve_rigid_unit(theta, RB, RC)
    return RigidTrace(sol.morphism, sol.c, RC, RB, RC.morita)


def compose_traces(outer: RigidTrace, inner: RigidTrace) -> BackwardMor:
    """``outer o inner`` for traces along ``A -> B`` (outer) and ``B -> C`` (inner)."""
    uAB, uBC = outer.morphism.v, inner.morphism.v
    window = outer.morphism.window
    uAC = uBC.compose(uAB)
    HC = inner.morphism.source
    resBC = restriction_of(HC, uBC)
    restricted = restrict_chain(inner.morphism.chain, uAB, resBC.module,
                                inner.morphism.target, window)
    middle = restriction_of(resBC.module, uAB)
    resAC = restriction_of(HC, uAC)
    C = uAC.target
    cols = []
    for (k, p) in resAC.labels:
        vec = [C.zero()] * HC.ngens
        vec[p] = resAC.basis[k]
        cols.append(middle.coords(resBC.coords(vec)))
    src = module_resolution(resAC.module, window).complex
    comparison = lift_map(src, restricted.source, 0,
                          Mat.from_columns(uAB.source.poly_ring, cols, len(middle.labels)))
    chain = outer.morphism.chain.compose(restricted).compose(comparison)
    return BackwardMor(uAC, HC, outer.morphism.target, chain, window)


@dataclass
class TowerCheck:
    holds: bool
    witness: Optional[dict]
    composite: BackwardMor
    direct: RigidTrace


def trace_tower(uAB: RingMap, uBC: RingMap, window: int = DEFAULT_WINDOW) -> TowerCheck:
    """``tr_{B/A} o tr_{C/B}`` against ``tr_{C/A}``, with a homotopy witness."""
    outer = rigid_trace(uAB, window)
    inner = rigid_trace(uBC, window)
    comp = compose_traces(outer, inner)
    direct = rigid_trace(comp.v, window)
    if direct.morphism.chain.source is not comp.chain.source:
        raise RigidCalcError("composite and direct traces start at different resolutions")
    h = chain_homotopic(comp.chain, direct.morphism.chain)
    return TowerCheck(bool(h), h.witness, comp, direct)


# --- rigid etale localization -----------------------------------------------------------------


@dataclass
class RigidLocalization:
    morphism: ForwardMor
    unit: Poly
    source: RigidComplex
    target: RigidComplex

    def to_json(self) -> dict:
        return {"kind": "rigid_localization", "unit": str(self.unit),
                "images": [[str(x) for x in im] for im in self.morphism.images]}


def rigid_etale_localization(w: RingMap, window: int = DEFAULT_WINDOW) -> RigidLocalization:
    """``q^rig : R_B -> R_{B'}`` for essentially etale ``w : B -> B'``."""
    RB = rigid_dualizing_complex(w.source, window)
    RBp = rigid_dualizing_complex(w.target, window)
    N, q = rigidifier_induced(w, RB)
    psi = rigid_isomorphism(N, RBp)
    lam = ForwardMor(w, RB.H, RBp.H, [psi.apply(im) for im in q.images])
    sol = solve_rigid_unit(lam, RB, RBp)
    return RigidLocalization(sol.morphism, sol.c, RB, RBp)


@dataclass
class SquareCheck:
    holds: bool
    lhs: list
    rhs: list


def trace_localization_square(u: RingMap, w: RingMap, up: RingMap, wc: RingMap,
                              window: int = DEFAULT_WINDOW) -> SquareCheck:
    """``q_B o tr_{C/B}`` against ``tr_{C'/B'} o q_C`` as morphisms ``R_C -> R_{B'}``.

    ``u : B -> C``, ``w : B -> B'``, ``up : B' -> C'`` and ``wc : C -> C'``.
    Both sides are compared as classes over ``B'`` on the base change of the
    resolution of ``Res_u R_C``.
    """
    tr = rigid_trace(u, window)
    trp = rigid_trace(up, window)
    qB = rigid_etale_localization(w, window)
    qC = rigid_etale_localization(wc, window)
    if tr.morphism.c != trp.morphism.c:
        raise RigidCalcError("the two traces have different degrees")
    c = tr.morphism.c
    Bp = w.target
    HBp = qB.target.H
    P = tr.morphism.chain.source
    Pw = P.base_change(w)
    lhs = []
    for col in tr.morphism.cocycle():
        out = [Bp.zero()] * HBp.ngens
        for j, x in enumerate(col):
            if x:
                wx = w(x)
                out = [a + wx * b for a, b in zip(out, qB.morphism.images[j])]
        lhs.append(HBp.nf(out))
    resC = restriction_of(tr.source.H, u)
    resCp = restriction_of(trp.source.H, up)
    Cp = up.target
    cols = []
    for (k, p) in resC.labels:
        img = qC.morphism.images[p]
        b = wc(resC.basis[k])
        cols.append(resCp.coords([Cp.nf(b * x) for x in img]))
    kappa = lift_map(Pw, trp.morphism.chain.source, 0,
                     Mat.from_columns(Bp.poly_ring, cols, len(resCp.labels)))
    comp = trp.morphism.chain.compose(kappa)
    rhs = [list(col) for col in comp.mat(-c).columns()]
    ext = ExtGroup(Pw, HBp, c)
    a, b = ext.class_of(lhs), ext.class_of(rhs)
    if a is None or b is None:
        raise LiftError("a side of the localization square is not a cocycle")
    return SquareCheck(ext.module.equal(a, b), a, b)


# --- twisted induction ---------------------------------------------------------------------


def _single_ext(M: FPModule, N: FPModule, window: int) -> tuple:
    res = free_resolution(M, window)
    found = []
    top = window - 1 if not res.terminated else -res.complex.lo
    for e in range(0, top + 1):
        mod = ExtGroup(res.complex, N, e, res).module
        if not mod.is_zero():
            found.append((e, mod))
    if len(found) != 1:
        raise NotConcentrated(f"Ext is nonzero in degrees {[e for e, _ in found]}")
    return found[0]


def _single_tor(u: RingMap, X: FPModule, window: int) -> tuple:
    res = free_resolution(X, window)
    Q = res.complex.base_change(u)
    found = []
    top = window - 1 if not res.terminated else -res.complex.lo
    for t in range(0, top + 1):
        mod = Q.cohomology(-t).module
        if not mod.is_zero():
            found.append((t, mod))
    if len(found) != 1:
        raise NotConcentrated(f"Tor is nonzero in degrees {[t for t, _ in found]}")
    return found[0]


@dataclass
class TwistedInduction:
    """``TwInd_u(M)`` as a module in one degree, with its concretization."""

    kind: str
    H: FPModule
    degree: int
    concrete: Optional[FPModule] = None
    concrete_degree: Optional[int] = None
    witness: Optional[ModuleMap] = None
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"kind": "twisted_induction", "route": self.kind, "degree": self.degree,
                "generators": self.H.ngens,
                "relations": [[str(x) for x in r] for r in self.H.relations],
                "witness": self.witness is not None}


def _duality(M: FPModule, m: int, R: RigidComplex, window: int) -> tuple:
    """``RHom(M[-m], R)``, which must be concentrated."""
    e, mod = _single_ext(M, R.H, window)
    return mod, e + R.d - m


def twisted_induction(u: RingMap, M: FPModule, degree: int = 0,
                      window: int = DEFAULT_WINDOW) -> TwistedInduction:
    """``D_B(B (x)^L D_A(M[-degree]))`` with a witness to the finite or smooth concretization."""
    A, B = u.source, u.target
    if M.ring != A:
        raise RingMismatch("module must live over the source ring")
    if window < 2:
        raise WindowTooSmall("twisted induction needs a window of at least 2")
    if [str(f) for f in u.images] == [str(x) for x in A.gens()] and A == B:
        return TwistedInduction("identity", M, degree, M, degree,
                                ModuleMap(M, M, Mat.identity(A.poly_ring, M.ngens), check=False))
    RA = rigid_dualizing_complex(A, window)
    RB = rigid_dualizing_complex(B, window)
    X, x = _duality(M, degree, RA, window)
    t, Y = _single_tor(u, X, window)
    y = x - t
    Z, z = _duality(Y, y, RB, window)
    out = TwistedInduction("composite", Z, z)
    finite = _is_finite(u)
    if finite:
        co = coinduce(u, M, degree, window)
        out.kind, out.concrete, out.concrete_degree = "finite", co.H, co.degree
    else:
        try:
            coords = find_etale_coordinates(u)
        except NoCoordinates:
            out.notes.append("neither finite nor essentially smooth: no concretization")
            return out
        n = len(coords)
        conc = tensor_modules(base_change(M, u), kahler(u, n))
        out.kind, out.concrete, out.concrete_degree = "smooth", conc, degree - n
    if out.concrete_degree == z:
        status, phi, _ = find_isomorphism(Z, out.concrete)
        if status == "iso":
            out.witness = phi
    if out.witness is None:
        out.notes.append("no isomorphism witness found")
    return out


def _is_finite(u: RingMap) -> bool:
    try:
        return u.is_finite()
    except (NotFinite, RigidCalcError):
        return False


@dataclass
class RankLaw:
    matrix: Mat
    rank: Poly
    holds: bool


def finite_etale_rank_law(u: RingMap, window: int = DEFAULT_WINDOW) -> RankLaw:
    """``tr^twind o q^twind`` on ``R_A`` for finite etale ``u : A -> B``.

    ``q`` lands in the induced complex, the rigid isomorphism carries it to
    the coinduced one, and the trace returns to ``R_A``.
    """
    A, B = u.source, u.target
    etale_section(u)
    RA = rigid_dualizing_complex(A, window)
    I, q = rigidifier_induced(u, RA)
    N, tr = rigidifier_coinduced(u, RA, window)
    psi = rigid_isomorphism(I, N)
    if tr.c != 0:
        raise RigidCalcError("a finite etale trace must have degree zero")
    trm = tr.module_map()
    res = restriction_of(N.H, u)
    cols = [trm.apply(res.coords(psi.apply(im))) for im in q.images]
    m = Mat.from_columns(A.poly_ring, cols, RA.H.ngens)
    basis = restriction_of(unit_module(B), u).basis
    r = FreeAlgebraBasis(u, basis).trace(B.one())
    target = RA.H.scalar(r)
    holds = all(RA.H.equal(m.col(j), target.image_of_gen(j)) for j in range(RA.H.ngens))
    return RankLaw(m, r, holds)


# --- finite flat and relative dualizing complexes ------------------------------------------


@dataclass
class FiniteFlatDual:
    """``Hom_A(B, A)`` on the dual basis, with its trace and rigidifier."""

    u: RingMap
    basis: FreeAlgebraBasis
    rigid: RigidComplex
    trace: BackwardMor
    operator_trace: list

    def operator_trace_vector(self) -> list:
        """The operator trace ``sum tr(b_i) e_i^*`` as an element of ``Hom_A(B, A)``."""
        return [self.u(x) for x in self.operator_trace]


def dual_module(u: RingMap, fb: FreeAlgebraBasis) -> FPModule:
    """``Hom_A(B, A)`` as a ``B``-module: ``x e_i^* = sum_j M_x[i][j] e_j^*``."""
    B = u.target
    n = len(fb.basis)
    rels = []
    for x in B.gens():
        m = fb.mult_matrix(x)
        for i in range(n):
            r = [u(-m.rows[i][j]) for j in range(n)]
            r[i] = B.nf(r[i] + x)
            rels.append(r)
    return FPModule(B, n, rels)


def finite_flat_dual(u: RingMap, basis: Sequence = None,
                     window: int = DEFAULT_WINDOW) -> FiniteFlatDual:
    """``(Delta^fifl, rho^fifl)`` relative to ``A`` for ``u`` finite flat with a basis."""
    A, B = u.source, u.target
    if basis is None:
        basis = restriction_of(unit_module(B), u).basis
    fb = FreeAlgebraBasis(u, basis)
    D = dual_module(u, fb)
    res = restriction_of(D, u)
    n = len(fb.basis)
    row = []
    for (k, i) in res.labels:
        row.append(fb.coords(res.basis[k])[i])
    tr = backward_from_module_map(u, D, unit_module(A), Mat(A.poly_ring, [row], len(row)),
                                  window)
    tau = tautological(A, window, RingMap.identity(A))
    sq = square(B, D, 0, window, u)
    R = rigidifier_coinduced_sigma(tr, sq, tau)
    R.tag = "fifl"
    return FiniteFlatDual(u, fb, R, tr, fb.trace_functional())


def fifl_section_identity(u: RingMap, basis: Sequence = None,
                          window: int = DEFAULT_WINDOW) -> bool:
    """For finite etale ``u``: ``rho^fifl(tr)(1) = sec(1) * (tr (x) tr)``."""
    F = finite_flat_dual(u, basis, window)
    R = F.rigid
    sq = R.square
    t = F.operator_trace_vector()
    val = sq.value_at_one(R.rho.apply(t))
    env = sq.env
    e = env.ring.nf(etale_section(u).e.change_ring(env.ring.poly_ring))
    tt = tensor_vector(env, t, t)
    want = [env.ring.nf(e * x) for x in tt]
    return sq.HH.equal(val, want)


def _extra_names(u: RingMap) -> Optional[list]:
    """Variables of ``B`` beyond those of ``A`` when ``u`` maps variables to variables."""
    A, B = u.source, u.target
    names = list(A.user_names)
    for x, img in zip(names, u.images):
        if str(img) != x:
            return None
    if not set(names) <= set(B.user_names):
        return None
    return [x for x in B.user_names if x not in names]


def _tor_independent(A: RingPresentation, At: RingPresentation, B: RingPresentation,
                     window: int) -> bool:
    """Whether ``Tor_i^A(B, B) = 0`` for ``0 < i < window``.

    ``B = At / I`` with ``At`` polynomial over ``A``; a free resolution ``F`` of
    ``B`` over ``At`` is ``A``-flat, so ``Tor^A(B, B)`` is the homology of
    ``F`` tensored up to ``At (x)_A B``.
    """
    names = list(At.user_names)
    left = [f"{x}1" for x in names]
    right = [f"{x}2" for x in names]
    P = PolyRing(B.field, left + right)
    rels = [str(evaluate(r, P.gens()[len(names):], P)) for r in B.relations]
    rels += [f"{x}1 - {x}2" for x in A.user_names]
    E = RingPresentation(B.field, left + right, rels)
    I = [At(str(r)) for r in B.relations]
    F = free_resolution(FPModule.cyclic(At, I), window).complex
    FE = F.base_change(RingMap(At, E, left, check=False))
    return all(FE.cohomology(-i).module.is_zero() for i in range(1, window))


def relative_rigid_dualizing(u: RingMap, window: int = DEFAULT_WINDOW,
                             route: str = "auto", basis: Sequence = None) -> RigidComplex:
    """``R_{B/A}`` with its rigidifier relative to ``A``.

    ``route`` is ``"factor"`` (smooth cover then coinduction), ``"fifl"``
    (finite flat dual, needs a basis) or ``"auto"``.
    """
    A, B = u.source, u.target
    if A == B and all(str(f) == str(x) for f, x in zip(u.images, A.gens())):
        return tautological(A, window, u)
    if route == "fifl":
        return finite_flat_dual(u, basis, window).rigid
    extra = _extra_names(u)
    if extra is None:
        raise UnsupportedBase("the map must send each variable of the base to the variable "
                              "of the same name")
    if B.inverted and len(B.inverted) != len(A.inverted):
        raise UnsupportedBase("relative localizations are not supported; invert in the base")
    if A.inverted:
        raise UnsupportedBase("relative complexes need a base without inverted elements")
    At = RingPresentation(A.field, list(B.user_names), [str(r) for r in A.relations])
    v = RingMap(A, At, _user_vars(A, At), check=False)
    if not extra:
        R = tautological(At, window, v)
    else:
        R = rigidifier_esm(v, [At.var(x) for x in extra], window)
    if B != At:
        if not _tor_independent(A, At, B, window):
            raise UnsupportedBase("B is not flat over A (Tor_i^A(B, B) is nonzero): the square "
                                  "would need a derived enveloping algebra")
        w = RingMap(At, B, _user_vars(At, B), check=False, finite=True)
        R, _ = rigidifier_coinduced(w, R, window)
    R.tag = "rdc-rel"
    R.morita = derived_morita_check(R.H, MORITA_WINDOW)
    return R


def smooth_base_change(v: RingMap, window: int = DEFAULT_WINDOW) -> ModuleMap:
    """The rigid isomorphism ``R_B (x) Omega^n[n] -> R_{B'}`` for essentially smooth ``v``."""
    RB = rigid_dualizing_complex(v.source, window)
    T = twisted_induced(v, RB)
    return rigid_isomorphism(T, rigid_dualizing_complex(v.target, window))
