"""Finitely presented rings, ring maps and modules.

A :class:`RingPresentation` is ``k[x_1..x_n, z_1..z_m] / J`` where each
auxiliary ``z_i`` inverts a chosen element ``s_i`` through ``z_i*s_i - 1``.
Ring elements are polynomials of the free ring kept in normal form modulo
the reduced Groebner basis of ``J``.

An :class:`FPModule` is the cokernel of a relation matrix; its elements are
coordinate vectors on the generators.  Normal forms modulo the relations give
exact equality tests, and every construction (kernels, Hom, Ext later on)
reduces to :class:`~rigidcalc.groebner.LinearSystem` solves.
"""
from __future__ import annotations

import itertools
from typing import Optional, Sequence, Union

from .errors import InconsistentRing, LiftError, NotFinite, RingMismatch
from .groebner import (LinearSystem, ReducedGB, buchberger, module_groebner,
                       module_key, ringmap_kernel, vector_to_dict, dict_to_vector)
from .polycore import (GREVLEX, Field, Mat, MonomialOrder, Poly, PolyRing,
                       determinant, evaluate)


def _aux_names(taken: Sequence[str], count: int) -> list:
    pool = ["z", "w"] + [f"z{i}" for i in range(1, 100)]
    out = []
    for name in pool:
        if len(out) == count:
            break
        if name not in taken:
            out.append(name)
    return out


class RingPresentation:
    """A finitely presented algebra over a field, with principal localizations."""

    def __init__(self, field: Field, names: Sequence[str], relations: Sequence = (),
                 inverted: Sequence = (), order: MonomialOrder = GREVLEX,
                 aux_names: Sequence[str] = None, degree_bound: int = None):
        names = list(names)
        user = PolyRing(field, names, order)
        inverted = [user(s) for s in inverted]
        for s in inverted:
            if s.is_zero():
                raise ValueError("cannot invert 0")
        aux = list(aux_names) if aux_names is not None else _aux_names(names, len(inverted))
        self.field = field
        self.user_names = tuple(names)
        self.aux_names = tuple(aux)
        self.poly_ring = PolyRing(field, names + aux, order)
        P = self.poly_ring
        self.relations = [user(r).change_ring(P) for r in relations]
        self.inverted = [s.change_ring(P) for s in inverted]
        gens = list(self.relations)
        for z, s in zip(aux, self.inverted):
            gens.append(P.var(z) * s - 1)
        self.ideal = buchberger(gens, ring=P, degree_bound=degree_bound)
        self.is_zero_ring = self.ideal.is_unit()
        self.flags = ["zero ring"] if self.is_zero_ring else []

    # --- identity -------------------------------------------------------
    def _ident(self):
        return (self.poly_ring, tuple(self.ideal.basis))

    def __eq__(self, other):
        return isinstance(other, RingPresentation) and (
            other is self or other._ident() == self._ident())

    def __hash__(self):
        return hash(self._ident())

    def __repr__(self):
        s = f"{self.field}[{', '.join(self.poly_ring.names)}]"
        if self.ideal.basis:
            s += "/(" + ", ".join(str(g) for g in self.ideal.basis) + ")"
        return s

    @property
    def names(self):
        return self.poly_ring.names

    @property
    def nvars(self) -> int:
        return self.poly_ring.nvars

    def require_nonzero(self):
        if self.is_zero_ring:
            raise InconsistentRing(f"{self} is the zero ring")

    # --- elements -------------------------------------------------------
    def __call__(self, x) -> Poly:
        if isinstance(x, Poly) and x.ring != self.poly_ring:
            x = x.change_ring(self.poly_ring)
        return self.ideal.normal_form(self.poly_ring(x))

    def nf(self, f: Poly) -> Poly:
        return self.ideal.normal_form(f)

    def zero(self) -> Poly:
        return self.poly_ring.zero()

    def one(self) -> Poly:
        return self.nf(self.poly_ring.one())

    def var(self, name) -> Poly:
        return self.nf(self.poly_ring.var(name))

    def gens(self) -> list:
        return [self.var(i) for i in range(self.nvars)]

    def mul(self, a: Poly, b: Poly) -> Poly:
        return self.nf(a * b)

    def is_zero(self, f: Poly) -> bool:
        return self.ideal.contains(f)

    def equal(self, f: Poly, g: Poly) -> bool:
        return self.ideal.contains(f - g)

    def inverse(self, f: Poly) -> Optional[Poly]:
        """``g`` with ``f*g = 1`` in the ring, or ``None`` for a non-unit."""
        ls = LinearSystem(self.poly_ring, 1, [[f]], (), self.ideal)
        sol = ls.solve([self.poly_ring.one()])
        return None if sol is None else self.nf(sol[0])

    def is_unit(self, f: Poly) -> bool:
        return self.inverse(f) is not None

    def ideal_of(self, gens: Sequence[Poly]) -> ReducedGB:
        """Groebner basis of the preimage in the free ring of ``(gens)``."""
        return buchberger(list(gens) + list(self.ideal.basis), ring=self.poly_ring)

    def colon(self, numerator: Sequence[Poly], denominator: Sequence[Poly]) -> list:
        """Generators of ``(numerator : denominator) = {b : b*denominator in numerator}``."""
        P = self.poly_ring
        n = len(denominator)
        if n == 0:
            return [self.one()]
        rels = []
        for i in range(n):
            for a in numerator:
                v = [P.zero()] * n
                v[i] = a
                rels.append(v)
        ls = LinearSystem(P, n, [list(denominator)], rels, self.ideal)
        return [v[0] for v in ls.syzygies()]

    def annihilator(self, gens: Sequence[Poly]) -> list:
        return self.colon([], gens)

    def monomial_basis(self, limit: int = 10000) -> Optional[list]:
        """Standard monomials as a k-basis, or ``None`` if infinite."""
        leads = [g.lm() for g in self.ideal.basis]
        n = self.nvars
        for i in range(n):
            if not any(le[i] > 0 and sum(le) == le[i] for le in leads):
                return None
        out = []
        frontier = [(0,) * n]
        seen = set(frontier)
        while frontier:
            m = frontier.pop()
            if any(all(a <= b for a, b in zip(le, m)) for le in leads):
                continue
            out.append(m)
            if len(out) > limit:
                raise ValueError("monomial basis larger than limit")
            for i in range(n):
                e = list(m)
                e[i] += 1
                e = tuple(e)
                if e not in seen:
                    seen.add(e)
                    frontier.append(e)
        key = self.poly_ring.order.key
        out.sort(key=key)
        return [self.poly_ring.monomial(m) for m in out]

    def coordinates(self, f: Poly, basis: Sequence[Poly]) -> list:
        """Coefficients of ``f`` on a standard-monomial basis."""
        f = self.nf(f)
        index = {b.lm(): i for i, b in enumerate(basis)}
        out = [self.field.zero] * len(basis)
        for e, c in f.terms_dict.items():
            out[index[e]] = c
        return out

    def enveloping(self) -> "Enveloping":
        env = self.__dict__.get("_env")
        if env is None:
            env = self._env = Enveloping(self)
        return env


def present_ring(field: Field, names: Sequence[str], relations: Sequence = (),
                 inverted: Sequence = (), order: MonomialOrder = GREVLEX) -> RingPresentation:
    return RingPresentation(field, names, relations, inverted, order)


def polynomial_ring(field: Field, names: Sequence[str]) -> RingPresentation:
    return RingPresentation(field, names)


class Enveloping:
    """``B (x)_k B`` with variables ``x1, x2`` copies of each variable ``x``."""

    def __init__(self, B: RingPresentation):
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
        self.ring = RingPresentation(B.field, names1 + names2, rels, order=P.order)
        self.mult_images = [P.var(i) for i in range(n)] * 2

    def left(self, b: Poly) -> Poly:
        return self.ring.nf(evaluate(b, self.inc1_images, self.ring.poly_ring))

    def right(self, b: Poly) -> Poly:
        return self.ring.nf(evaluate(b, self.inc2_images, self.ring.poly_ring))

    def delta(self, b: Poly) -> Poly:
        """``b (x) 1 - 1 (x) b``."""
        return self.ring.nf(self.left(b) - self.right(b))

    def mult(self, f: Poly) -> Poly:
        return self.base.nf(evaluate(f, self.mult_images, self.base.poly_ring))

    def tensor(self, a: Poly, b: Poly) -> Poly:
        return self.ring.nf(self.left(a) * self.right(b))

    def swap(self, f: Poly) -> Poly:
        return self.ring.nf(evaluate(f, self.inc2_images + self.inc1_images, self.ring.poly_ring))

    def diagonal_generators(self) -> list:
        return [self.delta(self.base.poly_ring.var(i)) for i in range(self.base.nvars)]

    def mult_map(self) -> "RingMap":
        return RingMap(self.ring, self.base, self.mult_images)

    def left_map(self) -> "RingMap":
        return RingMap(self.base, self.ring, self.inc1_images)

    def right_map(self) -> "RingMap":
        return RingMap(self.base, self.ring, self.inc2_images)


class RingMap:
    """A k-algebra map given by images of the source variables.

    ``images`` may list only the source's user variables; images of the
    auxiliary inverse variables are then solved for in the target.
    """

    def __init__(self, source: RingPresentation, target: RingPresentation,
                 images: Sequence, check: bool = True, finite: bool = None,
                 localization: bool = False, smooth_dim: int = None):
        self.source = source
        self.target = target
        imgs = [target(x) for x in images]
        ns = source.nvars
        nu = len(source.user_names)
        if len(imgs) == nu and nu < ns:
            user_only = imgs
            for s in source.inverted:
                su = evaluate(s, user_only + [target.zero()] * (ns - nu), target.poly_ring)
                inv = target.inverse(target.nf(su))
                if inv is None:
                    raise LiftError(f"image of {s} is not a unit in {target}")
                imgs.append(inv)
        if len(imgs) != ns:
            raise ValueError(f"{len(imgs)} images for {ns} source variables")
        self.images = imgs
        self._finite = finite
        self.is_localization = localization
        self.smooth_dim = smooth_dim
        if check and not self.is_well_defined():
            raise ValueError("source relations do not map to zero")

    def __call__(self, f: Poly) -> Poly:
        if isinstance(f, str):
            f = self.source(f)
        return self.target.nf(evaluate(f, self.images, self.target.poly_ring))

    def is_well_defined(self) -> bool:
        return all(self.target.is_zero(evaluate(g, self.images, self.target.poly_ring))
                   for g in self.source.ideal.basis)

    def compose(self, inner: "RingMap") -> "RingMap":
        """``self o inner``."""
        return RingMap(inner.source, self.target, [self(f) for f in inner.images], check=False)

    @staticmethod
    def identity(R: RingPresentation) -> "RingMap":
        return RingMap(R, R, R.gens(), check=False, finite=True)

    def kernel(self) -> ReducedGB:
        return ringmap_kernel(self)

    def joint(self) -> "_JointRing":
        if not hasattr(self, "_joint"):
            self._joint = _JointRing(self)
        return self._joint

    def is_finite(self) -> bool:
        if self._finite is None:
            self._finite = self.joint().module_generators() is not None
        return self._finite

    def __repr__(self):
        return f"RingMap({self.source} -> {self.target}: {[str(f) for f in self.images]})"


class _JointRing:
    """``k[t, s] / (J_target(t), s - u(t), J_source(s))`` with t eliminated first."""

    def __init__(self, u: RingMap):
        tgt, src = u.target.poly_ring, u.source.poly_ring
        self.nt = tgt.nvars
        self.ns = src.nvars
        names = [f"_t{i}" for i in range(self.nt)] + [f"_s{i}" for i in range(self.ns)]
        self.ring = PolyRing(tgt.field, names, MonomialOrder("block", self.nt))
        self.u = u
        gens = [self.from_target(g) for g in u.target.ideal.basis]
        gens += [self.from_source(g) for g in u.source.ideal.basis]
        for i, img in enumerate(u.images):
            gens.append(self.ring.var(self.nt + i) - self.from_target(img))
        self.ideal = buchberger(gens, ring=self.ring, verify=False)

    def from_target(self, f: Poly) -> Poly:
        pad = (0,) * self.ns
        return Poly(self.ring, {e + pad: c for e, c in f.terms_dict.items()})

    def from_source(self, f: Poly) -> Poly:
        pad = (0,) * self.nt
        return Poly(self.ring, {pad + e: c for e, c in f.terms_dict.items()})

    def to_source(self, f: Poly) -> Poly:
        if any(any(e[:self.nt]) for e in f.terms_dict):
            raise ValueError("element involves target variables")
        P = self.u.source.poly_ring
        return Poly(P, {e[self.nt:]: c for e, c in f.terms_dict.items()})

    def module_generators(self) -> Optional[list]:
        """Monomials in the target variables generating it over the source."""
        nt = self.nt
        leads = [g.lm() for g in self.ideal.basis if not any(g.lm()[nt:])]
        for i in range(nt):
            if not any(le[i] > 0 and sum(le[:nt]) == le[i] for le in leads):
                return None
        out = []
        frontier = [(0,) * nt]
        seen = set(frontier)
        while frontier:
            m = frontier.pop()
            if any(all(a <= b for a, b in zip(le[:nt], m)) for le in leads):
                continue
            out.append(m)
            for i in range(nt):
                e = list(m)
                e[i] += 1
                e = tuple(e)
                if e not in seen:
                    seen.add(e)
                    frontier.append(e)
        key = self.ring.order.key
        out.sort(key=lambda m: key(m + (0,) * self.ns))
        tgt = self.u.target
        return [tgt.nf(tgt.poly_ring.monomial(m)) for m in out]


# --------------------------------------------------------------------------
# Modules


Vector = list


class FPModule:
    """Cokernel of ``R^r -> R^g`` given by relation vectors of length ``g``."""

    def __init__(self, ring: RingPresentation, ngens: int, relations: Sequence = ()):
        self.ring = ring
        self.ngens = ngens
        rels = []
        for r in relations:
            if len(r) != ngens:
                raise ValueError(f"relation of length {len(r)} for {ngens} generators")
            v = [ring.nf(ring.poly_ring(x) if not isinstance(x, Poly) else x) for x in r]
            if any(v):
                rels.append(v)
        self.relations = rels
        self._gb = None

    @staticmethod
    def free(ring: RingPresentation, n: int) -> "FPModule":
        return FPModule(ring, n, [])

    @staticmethod
    def coker(ring: RingPresentation, m: Mat) -> "FPModule":
        return FPModule(ring, m.nrows, m.columns())

    @staticmethod
    def cyclic(ring: RingPresentation, ideal_gens: Sequence[Poly]) -> "FPModule":
        """``R / (ideal_gens)``."""
        return FPModule(ring, 1, [[ring(g)] for g in ideal_gens])

    def relation_matrix(self) -> Mat:
        P = self.ring.poly_ring
        if not self.relations:
            return Mat(P, [[] for _ in range(self.ngens)], 0)
        return Mat.from_columns(P, self.relations, self.ngens)

    def __repr__(self):
        return f"FPModule({self.ring}, gens={self.ngens}, rels={len(self.relations)})"

    # --- element arithmetic ---------------------------------------------
    def _module_gb(self):
        if self._gb is None:
            key = module_key(self.ring.poly_ring.order.key)
            known = []
            if self.ring.ideal.basis:
                known = [[{(p, e): c for e, c in g.terms_dict.items()} for g in self.ring.ideal.basis]
                         for p in range(self.ngens)]
            self._gb = module_groebner([vector_to_dict(r) for r in self.relations], key,
                                       known=known)
        return self._gb

    def nf(self, vec: Sequence[Poly]) -> Vector:
        if len(vec) != self.ngens:
            raise ValueError("vector length does not match generator count")
        P = self.ring.poly_ring
        vec = [P(x) if not isinstance(x, Poly) else x for x in vec]
        if not self.relations:
            return [self.ring.nf(x) for x in vec]
        r = self._module_gb().reduce(vector_to_dict(vec))
        return dict_to_vector(r, P, self.ngens)

    def is_zero_vector(self, vec: Sequence[Poly]) -> bool:
        return not any(self.nf(vec))

    def equal(self, v: Sequence[Poly], w: Sequence[Poly]) -> bool:
        return self.is_zero_vector([a - b for a, b in zip(v, w)])

    def gen(self, i: int) -> Vector:
        P = self.ring.poly_ring
        return [P.one() if j == i else P.zero() for j in range(self.ngens)]

    def zero_vector(self) -> Vector:
        return [self.ring.poly_ring.zero()] * self.ngens

    def is_zero(self) -> bool:
        return all(self.is_zero_vector(self.gen(i)) for i in range(self.ngens))

    def identity(self) -> "ModuleMap":
        return ModuleMap(self, self, Mat.identity(self.ring.poly_ring, self.ngens), check=False)

    def scalar(self, c) -> "ModuleMap":
        """Multiplication by a ring element."""
        c = self.ring(c) if not isinstance(c, Poly) else c
        return ModuleMap(self, self, Mat.identity(self.ring.poly_ring, self.ngens) * c, check=False)

    def annihilator(self) -> list:
        """Generators of ``Ann(M)``."""
        P = self.ring.poly_ring
        result = self.ring.ideal_of([P.one()])
        for i in range(self.ngens):
            ls = LinearSystem(P, self.ngens, [self.gen(i)], self.relations, self.ring.ideal)
            result = _intersect(self.ring, result,
                                self.ring.ideal_of([v[0] for v in ls.syzygies()]))
        return [g for g in (self.ring.nf(f) for f in result.basis) if g]

    def direct_sum(self, other: "FPModule") -> "FPModule":
        return direct_sum([self, other])


def _intersect(ring: RingPresentation, I: ReducedGB, K: ReducedGB) -> ReducedGB:
    P = ring.poly_ring
    one = P.one()
    rels = [[g, P.zero()] for g in I.basis] + [[P.zero(), g] for g in K.basis]
    ls = LinearSystem(P, 2, [[one, one]], rels, None)
    return ring.ideal_of([v[0] for v in ls.syzygies()])


def direct_sum(mods: Sequence[FPModule]) -> FPModule:
    ring = mods[0].ring
    n = sum(M.ngens for M in mods)
    P = ring.poly_ring
    rels = []
    off = 0
    for M in mods:
        for r in M.relations:
            v = [P.zero()] * n
            v[off:off + M.ngens] = r
            rels.append(v)
        off += M.ngens
    return FPModule(ring, n, rels)


class ModuleMap:
    """Module homomorphism given by the images of the source generators."""

    def __init__(self, source: FPModule, target: FPModule, matrix: Mat, check: bool = True):
        if matrix.shape != (target.ngens, source.ngens):
            raise ValueError(f"matrix shape {matrix.shape} does not fit "
                             f"{target.ngens}x{source.ngens}")
        if source.ring != target.ring:
            raise RingMismatch("module map between modules over different rings")
        self.source = source
        self.target = target
        self.matrix = matrix
        if check and not self.is_well_defined():
            raise ValueError("matrix does not respect the source relations")

    @staticmethod
    def from_images(source: FPModule, target: FPModule, images: Sequence[Sequence[Poly]],
                    check: bool = True) -> "ModuleMap":
        P = source.ring.poly_ring
        if not images:
            return ModuleMap(source, target, Mat(P, [[] for _ in range(target.ngens)], 0), check)
        return ModuleMap(source, target, Mat.from_columns(P, images, target.ngens), check)

    def is_well_defined(self) -> bool:
        return all(self.target.is_zero_vector(self.matrix.apply(r))
                   for r in self.source.relations)

    def apply(self, vec: Sequence[Poly]) -> Vector:
        return self.target.nf(self.matrix.apply(vec))

    def image_of_gen(self, i: int) -> Vector:
        return self.target.nf(self.matrix.col(i))

    def __call__(self, vec):
        return self.apply(vec)

    def compose(self, inner: "ModuleMap") -> "ModuleMap":
        """``self o inner``."""
        return ModuleMap(inner.source, self.target, self.matrix * inner.matrix, check=False)

    def __matmul__(self, inner: "ModuleMap") -> "ModuleMap":
        return self.compose(inner)

    def __add__(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(self.source, self.target, self.matrix + other.matrix, check=False)

    def __neg__(self):
        return ModuleMap(self.source, self.target, -self.matrix, check=False)

    def __sub__(self, other: "ModuleMap") -> "ModuleMap":
        return self + (-other)

    def scale(self, c: Poly) -> "ModuleMap":
        return ModuleMap(self.source, self.target, self.matrix * c, check=False)

    def is_zero(self) -> bool:
        return all(self.target.is_zero_vector(self.matrix.col(j))
                   for j in range(self.source.ngens))

    def equals(self, other: "ModuleMap") -> bool:
        return (self - other).is_zero()

    def reduced(self) -> "ModuleMap":
        cols = [self.image_of_gen(j) for j in range(self.source.ngens)]
        return ModuleMap.from_images(self.source, self.target, cols, check=False)

    def preimage(self, vec: Sequence[Poly]) -> Optional[Vector]:
        """Some source vector mapping to ``vec``, or ``None``."""
        ls = LinearSystem(self.source.ring.poly_ring, self.target.ngens,
                          self.matrix.columns(), self.target.relations,
                          self.source.ring.ideal)
        return ls.solve(list(vec))

    def kernel(self) -> "Subquotient":
        P = self.source.ring.poly_ring
        ls = LinearSystem(P, self.target.ngens, self.matrix.columns(),
                          self.target.relations, self.source.ring.ideal)
        gens = ls.syzygies()
        return Subquotient(self.source.ring, self.source.ngens, gens, self.source.relations)

    def cokernel(self) -> tuple:
        C = FPModule(self.target.ring, self.target.ngens,
                     self.target.relations + self.matrix.columns())
        proj = ModuleMap(self.target, C, Mat.identity(self.target.ring.poly_ring,
                                                      self.target.ngens), check=False)
        return C, proj

    def image(self) -> "Subquotient":
        return Subquotient(self.target.ring, self.target.ngens, self.matrix.columns(),
                           self.target.relations)

    def is_injective(self) -> bool:
        return self.kernel().module.is_zero()

    def is_surjective(self) -> bool:
        return self.cokernel()[0].is_zero()

    def is_iso(self) -> bool:
        return self.is_surjective() and self.is_injective()

    def is_identity(self) -> bool:
        """Same generators on both sides and every generator fixed."""
        M = self.source
        return (M.ngens == self.target.ngens and
                all(self.target.equal(self.image_of_gen(i), M.gen(i)) for i in range(M.ngens)))

    def inverse(self) -> "ModuleMap":
        if not self.is_iso():
            raise LiftError("map is not an isomorphism")
        ls = LinearSystem(self.source.ring.poly_ring, self.target.ngens,
                          self.matrix.columns(), self.target.relations,
                          self.source.ring.ideal)
        cols = []
        for i in range(self.target.ngens):
            c = ls.solve(self.target.gen(i))
            cols.append(self.source.nf(c))
        return ModuleMap.from_images(self.target, self.source, cols, check=False)

    def __repr__(self):
        return f"ModuleMap({self.matrix})"


class Subquotient:
    """The submodule of ``R^n / rels`` generated by ``gens``, presented.

    ``module`` has one generator per entry of ``gens``; ``inclusion`` maps it
    into the ambient module; :meth:`class_of` expresses an ambient vector in
    the generators.
    """

    def __init__(self, ring: RingPresentation, n: int, gens: Sequence[Sequence[Poly]],
                 rels: Sequence[Sequence[Poly]]):
        self.ring = ring
        self.n = n
        P = ring.poly_ring
        self.gens = [list(g) for g in gens]
        self.ambient = FPModule(ring, n, rels)
        self._ls = LinearSystem(P, n, self.gens, self.ambient.relations, ring.ideal)
        self.module = FPModule(ring, len(self.gens), self._ls.syzygies())
        if self.gens:
            mat = Mat.from_columns(P, self.gens, n)
        else:
            mat = Mat(P, [[] for _ in range(n)], 0)
        self.inclusion = ModuleMap(self.module, self.ambient, mat, check=False)

    def class_of(self, vec: Sequence[Poly]) -> Optional[Vector]:
        """Coordinates on ``gens`` of an ambient vector, or ``None``."""
        sol = self._ls.solve(list(vec))
        return None if sol is None else self.module.nf(sol)

    def contains(self, vec: Sequence[Poly]) -> bool:
        return self._ls.solve(list(vec)) is not None

    def represent(self, coords: Sequence[Poly]) -> Vector:
        return self.ambient.nf(self.inclusion.matrix.apply(coords))


def kernel_cokernel(phi: ModuleMap):
    k = phi.kernel()
    c, proj = phi.cokernel()
    return (k.module, k.inclusion), (c, proj)


# --- Hom and tensor ---------------------------------------------------------


class HomModule:
    """``Hom_R(M, N)`` presented as a subquotient of ``N^{g_M}``."""

    def __init__(self, M: FPModule, N: FPModule):
        if M.ring != N.ring:
            raise RingMismatch("Hom between modules over different rings")
        self.M, self.N = M, N
        R = M.ring
        P = R.poly_ring
        gM, gN = M.ngens, N.ngens
        n = gM * gN
        block_rels = []
        for j in range(gM):
            for r in N.relations:
                v = [P.zero()] * n
                v[j * gN:(j + 1) * gN] = r
                block_rels.append(v)
        # phi in N^{gM} is allowed iff sum_j r_j phi_j = 0 in N for each relation r of M
        rM = len(M.relations)
        cols = []
        for j in range(gM):
            for i in range(gN):
                col = [P.zero()] * (gN * rM)
                for k, r in enumerate(M.relations):
                    col[k * gN + i] = r[j]
                cols.append(col)
        target_rels = []
        for k in range(rM):
            for r in N.relations:
                v = [P.zero()] * (gN * rM)
                v[k * gN:(k + 1) * gN] = r
                target_rels.append(v)
        if rM:
            ls = LinearSystem(P, gN * rM, cols, target_rels, R.ideal)
            gens = ls.syzygies()
        else:
            gens = [[P.one() if t == s else P.zero() for t in range(n)] for s in range(n)]
        self.sub = Subquotient(R, n, gens, block_rels)
        self.module = self.sub.module

    def to_map(self, coords: Sequence[Poly]) -> ModuleMap:
        flat = self.sub.represent(coords)
        gN = self.N.ngens
        images = [flat[j * gN:(j + 1) * gN] for j in range(self.M.ngens)]
        return ModuleMap.from_images(self.M, self.N, images, check=False)

    def from_map(self, phi: ModuleMap) -> Vector:
        flat = []
        for j in range(self.M.ngens):
            flat.extend(phi.matrix.col(j))
        c = self.sub.class_of(flat)
        if c is None:
            raise LiftError("map is not a homomorphism of the presented modules")
        return c

    def generators(self) -> list:
        return [self.to_map(self.module.gen(i)) for i in range(self.module.ngens)]


def hom_modules(M: FPModule, N: FPModule) -> HomModule:
    return HomModule(M, N)


def tensor_modules(M: FPModule, N: FPModule) -> FPModule:
    """``M (x)_R N`` on generators ``m_i (x) n_j`` at index ``i*g_N + j``."""
    if M.ring != N.ring:
        raise RingMismatch("tensor of modules over different rings")
    P = M.ring.poly_ring
    gM, gN = M.ngens, N.ngens
    rels = []
    for r in M.relations:
        for j in range(gN):
            v = [P.zero()] * (gM * gN)
            for i in range(gM):
                v[i * gN + j] = r[i]
            rels.append(v)
    for r in N.relations:
        for i in range(gM):
            v = [P.zero()] * (gM * gN)
            v[i * gN:(i + 1) * gN] = r
            rels.append(v)
    return FPModule(M.ring, gM * gN, rels)


def find_isomorphism(M: FPModule, N: FPModule, tries: int = 64):
    """Search for an isomorphism ``M -> N``.

    Returns ``(status, phi, psi)`` with ``status`` one of ``"iso"`` (and
    mutually inverse maps), ``"non_iso"`` (the Fitting ideals differ, a
    certificate) or ``"undecided"``.
    """
    if M.ring != N.ring:
        raise RingMismatch("modules over different rings")
    mz, nz = M.is_zero(), N.is_zero()
    P = M.ring.poly_ring
    if mz and nz:
        zero = ModuleMap(M, N, Mat.zeros(P, N.ngens, M.ngens), check=False)
        back = ModuleMap(N, M, Mat.zeros(P, M.ngens, N.ngens), check=False)
        return "iso", zero, back
    if mz != nz or fitting_obstruction(M, N) is not None:
        return "non_iso", None, None
    H = HomModule(M, N)
    gens = H.generators()
    candidates = list(gens)
    for a, b in itertools.combinations(range(len(gens)), 2):
        candidates.append(gens[a] + gens[b])
        candidates.append(gens[a] - gens[b])
    for phi in candidates[:tries]:
        if phi.is_iso():
            return "iso", phi, phi.inverse()
    return "undecided", None, None


# --- Fitting ideals ---------------------------------------------------------


def fitting_ideal(M: FPModule, i: int) -> ReducedGB:
    """``Fitt_i(M)``: ideal of ``(g-i)``-minors of the relation matrix."""
    R = M.ring
    g = M.ngens
    size = g - i
    if size <= 0:
        return R.ideal_of([R.poly_ring.one()])
    rels = M.relations
    if len(rels) < size:
        return R.ideal_of([])
    A = M.relation_matrix()
    minors = []
    for rows in itertools.combinations(range(g), size):
        for cols in itertools.combinations(range(len(rels)), size):
            d = R.nf(determinant(A.submatrix(rows, cols)))
            if d:
                minors.append(d)
    return R.ideal_of(minors)


def fitting_obstruction(M: FPModule, N: FPModule, limit: int = 6):
    """First ``i`` with ``Fitt_i(M) != Fitt_i(N)``, or ``None``.

    Only indices below ``limit`` generators are compared since minors grow fast.
    """
    top = max(M.ngens, N.ngens)
    if top > limit:
        return None
    for i in range(top + 1):
        if not fitting_ideal(M, i).same_ideal(fitting_ideal(N, i)):
            return i
    return None


def fitting_rank(M: FPModule) -> dict:
    """Projectivity and constant rank from Fitting ideals.

    ``M`` is projective of constant rank ``r`` iff ``Fitt_{r-1} = 0`` and
    ``Fitt_r = (1)``.
    """
    R = M.ring
    ideals = [fitting_ideal(M, i) for i in range(M.ngens + 1)]
    rank = None
    for r, I in enumerate(ideals):
        if I.is_unit():
            below_zero = r == 0 or ideals[r - 1].same_ideal(R.ideal)
            if below_zero:
                rank = r
            break
    return {"is_projective": rank is not None, "constant_rank": rank,
            "fitting_ideals": [[str(R.nf(f)) for f in I.basis if R.nf(f)] or ["0"]
                               if not I.is_unit() else ["1"] for I in ideals]}


# --- change of rings --------------------------------------------------------


def base_change(M: FPModule, u: RingMap) -> FPModule:
    if u.source != M.ring:
        raise RingMismatch("base change along a map from a different ring")
    return FPModule(u.target, M.ngens, [[u(x) for x in r] for r in M.relations])


def base_change_map(phi: ModuleMap, u: RingMap, source: FPModule = None,
                    target: FPModule = None) -> ModuleMap:
    source = source or base_change(phi.source, u)
    target = target or base_change(phi.target, u)
    m = Mat(u.target.poly_ring, [[u(x) for x in r] for r in phi.matrix.rows],
            phi.matrix.ncols)
    return ModuleMap(source, target, m, check=False)


class Restriction:
    """A module over the target of a finite map, viewed over the source.

    Generators are ``b_k * e_p`` with ``b_k`` target monomials generating the
    target ring over the source; :meth:`coords` rewrites target vectors.
    """

    def __init__(self, N: FPModule, u: RingMap):
        if N.ring != u.target:
            raise RingMismatch("restriction of a module over a different ring")
        jr = u.joint()
        basis = jr.module_generators()
        if basis is None:
            raise NotFinite(f"{u.source} -> {u.target} is not module-finite")
        self.u, self.N, self.basis = u, N, basis
        J = jr.ring
        g = N.ngens
        cols = []
        self.labels = []
        for p in range(g):
            for k, b in enumerate(basis):
                v = [J.zero()] * g
                v[p] = jr.from_target(b)
                cols.append(v)
                self.labels.append((k, p))
        rels = [[jr.from_target(x) for x in r] for r in N.relations]
        self._ls = LinearSystem(J, g, cols, rels, jr.ideal)
        A = u.source
        arels = []
        for syz in self._ls.syzygies_raw():
            if all(not any(any(e[:jr.nt]) for e in f.terms_dict) for f in syz):
                v = [A.nf(jr.to_source(f)) for f in syz]
                if any(v):
                    arels.append(v)
        self.module = FPModule(A, len(cols), arels)
        self._jr = jr

    def coords(self, vec: Sequence[Poly]) -> Vector:
        jr = self._jr
        sol = self._ls.solve([jr.from_target(x) for x in vec])
        if sol is None:
            raise LiftError("vector not in the span of the restricted generators")
        return self.module.nf([self.u.source.nf(jr.to_source(f)) for f in sol])

    def to_target(self, coords: Sequence[Poly]) -> Vector:
        g = self.N.ngens
        out = [self.u.target.zero()] * g
        for c, (k, p) in zip(coords, self.labels):
            out[p] = out[p] + self.u(c) * self.basis[k]
        return self.N.nf(out)


def restrict(N: FPModule, u: RingMap) -> Restriction:
    return Restriction(N, u)


def trim_presentation(M: FPModule) -> tuple:
    """Drop generators killed off by relations with a unit scalar entry.

    Returns ``(M', keep, express)``: ``keep[i]`` is the old index of the new
    generator ``i`` and ``express[j]`` writes old generator ``j`` in ``M'``.
    """
    R = M.ring
    P = R.poly_ring
    g = M.ngens
    rels = [list(r) for r in M.relations]
    alive = list(range(g))
    # subst[j] : old generator j as a combination of old generators
    subst = {}
    changed = True
    while changed:
        changed = False
        for r in rels:
            piv = next((i for i in alive if r[i] and r[i].is_constant()), None)
            if piv is None:
                continue
            c = r[piv].constant_coeff()
            expr = [P.zero() if i == piv else R.nf(-r[i] * (P.field.one / c)) for i in range(g)]
            subst[piv] = expr
            new_rels = []
            for s in rels:
                if s is r:
                    continue
                if s[piv]:
                    f = s[piv]
                    s = [R.nf(a + f * b) for a, b in zip(s, expr)]
                    s[piv] = P.zero()
                if any(s):
                    new_rels.append(s)
            rels = new_rels
            for j in list(subst):
                e = subst[j]
                if e[piv]:
                    f = e[piv]
                    e = [R.nf(a + f * b) for a, b in zip(e, expr)]
                    e[piv] = P.zero()
                    subst[j] = e
            alive.remove(piv)
            changed = True
            break
    index = {old: i for i, old in enumerate(alive)}
    new = FPModule(R, len(alive), [[r[i] for i in alive] for r in rels])
    express = []
    for j in range(g):
        v = [P.zero()] * len(alive)
        if j in index:
            v[index[j]] = P.one()
        else:
            for i, c in enumerate(subst[j]):
                if c:
                    v[index[i]] = v[index[i]] + c
        express.append(new.nf(v))
    return new, alive, express
