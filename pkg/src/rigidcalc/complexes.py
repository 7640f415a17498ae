"""Bounded complexes of finite free modules, chain maps, Hom/tensor, Ext and Tor.

Degrees are cohomological.  ``d(i)`` is the matrix of ``X^i -> X^{i+1}`` acting
on column vectors.  A map of degree ``n`` sends ``X^i`` to ``Y^{i+n}``; it is a
cocycle of the Hom complex when ``d_Y f = (-1)^n f d_X``.  Shifts follow
``X[n]^i = X^{n+i}`` with differential ``(-1)^n d_X``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional, Sequence

from .errors import LiftError, RingMismatch, WindowTooSmall
from .fpmodules import (FPModule, ModuleMap, RingMap, RingPresentation, Subquotient)
from .groebner import LinearSystem
from .polycore import Mat, Poly


def _zero_mat(R: RingPresentation, r: int, c: int) -> Mat:
    P = R.poly_ring
    if r == 0:
        return Mat(P, [], c)
    return Mat.zeros(P, r, c)


def _nf_mat(R: RingPresentation, m: Mat) -> Mat:
    return Mat(R.poly_ring, [[R.nf(x) for x in row] for row in m.rows], m.ncols)


def _mat_is_zero(R: RingPresentation, m: Mat) -> bool:
    return all(R.is_zero(x) for row in m.rows for x in row)


def _sign(n: int) -> int:
    return -1 if n % 2 else 1


class FreeComplex:
    """A bounded complex of finite free modules over a ring presentation."""

    def __init__(self, ring: RingPresentation, ranks: Dict[int, int],
                 diffs: Dict[int, Mat] = None, check: bool = True):
        self.ring = ring
        self.ranks = {i: r for i, r in ranks.items() if r}
        diffs = diffs or {}
        self.diffs = {}
        for i, m in diffs.items():
            if m.shape != (self.rank(i + 1), self.rank(i)):
                raise ValueError(f"differential {i} has shape {m.shape}, expected "
                                 f"{(self.rank(i + 1), self.rank(i))}")
            if self.rank(i) and self.rank(i + 1):
                self.diffs[i] = _nf_mat(ring, m)
        if check and not self.is_complex():
            raise ValueError("d o d is not zero")

    @staticmethod
    def concentrated(ring: RingPresentation, rank: int, degree: int = 0) -> "FreeComplex":
        return FreeComplex(ring, {degree: rank}, {})

    @property
    def lo(self) -> int:
        return min(self.ranks, default=0)

    @property
    def hi(self) -> int:
        return max(self.ranks, default=0)

    def degrees(self) -> list:
        return list(range(self.lo, self.hi + 1)) if self.ranks else []

    def rank(self, i: int) -> int:
        return self.ranks.get(i, 0)

    def d(self, i: int) -> Mat:
        m = self.diffs.get(i)
        if m is None:
            return _zero_mat(self.ring, self.rank(i + 1), self.rank(i))
        return m

    def is_complex(self) -> bool:
        for i in self.degrees():
            if self.rank(i) and self.rank(i + 2) and i in self.diffs and i + 1 in self.diffs:
                if not _mat_is_zero(self.ring, self.d(i + 1) * self.d(i)):
                    return False
        return True

    def shift(self, n: int) -> "FreeComplex":
        s = _sign(n)
        return FreeComplex(self.ring, {i - n: r for i, r in self.ranks.items()},
                           {i - n: m * s for i, m in self.diffs.items()}, check=False)

    def base_change(self, u: RingMap) -> "FreeComplex":
        if u.source != self.ring:
            raise RingMismatch("base change along a map from another ring")
        return FreeComplex(u.target, dict(self.ranks),
                           {i: m.map(u) for i, m in self.diffs.items()}, check=False)

    def direct_sum(self, other: "FreeComplex") -> "FreeComplex":
        from .polycore import block_diag
        P = self.ring.poly_ring
        degs = set(self.ranks) | set(other.ranks)
        ranks = {i: self.rank(i) + other.rank(i) for i in degs}
        diffs = {}
        for i in degs:
            if ranks.get(i) and ranks.get(i + 1):
                diffs[i] = block_diag(P, [self.d(i), other.d(i)])
        return FreeComplex(self.ring, ranks, diffs, check=False)

    def identity(self) -> "ChainMap":
        P = self.ring.poly_ring
        return ChainMap(self, self, {i: Mat.identity(P, r) for i, r in self.ranks.items()},
                        check=False)

    def cohomology(self, i: int) -> Subquotient:
        """``ker d^i / im d^{i-1}`` as a subquotient of ``R^{rank i}``."""
        return module_homology(self.ring, self.rank(i), [], self.d(i).columns(), [],
                               self.d(i - 1).columns())

    def is_acyclic(self) -> bool:
        return all(self.cohomology(i).module.is_zero() for i in self.degrees())

    def to_json(self) -> dict:
        degs = self.degrees()
        return {"degrees": degs, "ranks": [self.rank(i) for i in degs],
                "differentials": [[[str(x) for x in row] for row in self.d(i).rows]
                                  for i in degs[:-1]]}

    def __repr__(self):
        body = ", ".join(f"{i}:{r}" for i, r in sorted(self.ranks.items()))
        return f"FreeComplex({body})"


def module_homology(R: RingPresentation, n: int, rels: Sequence, out_images: Sequence,
                    out_rels: Sequence, boundaries: Sequence) -> Subquotient:
    """Homology ``{v : D v in span(out_rels)} / (boundaries + rels)``.

    ``out_images`` are the images of the unit vectors of ``R^n`` under ``D``.
    """
    P = R.poly_ring
    out_images = list(out_images)
    if n == 0:
        return Subquotient(R, 0, [], [])
    if out_images and len(out_images[0]) > 0:
        m = len(out_images[0])
        cols = [list(c) for c in out_images]
        ls = LinearSystem(P, m, cols, list(out_rels), R.ideal)
        cycles = ls.syzygies()
    else:
        cycles = [[P.one() if j == i else P.zero() for j in range(n)] for i in range(n)]
    return Subquotient(R, n, cycles, list(boundaries) + list(rels))


class ChainMap:
    """Maps ``X^i -> Y^{i+degree}``, possibly along a ring map ``X.ring -> Y.ring``."""

    def __init__(self, source: FreeComplex, target: FreeComplex, mats: Dict[int, Mat],
                 degree: int = 0, along: RingMap = None, check: bool = True):
        self.source = source
        self.target = target
        self.degree = degree
        self.along = along
        if along is None and source.ring != target.ring:
            raise RingMismatch("chain map between complexes over different rings")
        R = target.ring
        self.mats = {}
        for i, m in mats.items():
            shape = (target.rank(i + degree), source.rank(i))
            if m.shape != shape:
                raise ValueError(f"component {i} has shape {m.shape}, expected {shape}")
            if shape[0] and shape[1]:
                self.mats[i] = _nf_mat(R, m)
        if check and not self.is_cocycle():
            raise ValueError("not a chain map")

    @property
    def ring(self) -> RingPresentation:
        return self.target.ring

    def effective_source(self) -> FreeComplex:
        if self.along is None:
            return self.source
        if not hasattr(self, "_eff"):
            self._eff = self.source.base_change(self.along)
        return self._eff

    def mat(self, i: int) -> Mat:
        m = self.mats.get(i)
        if m is None:
            return _zero_mat(self.ring, self.target.rank(i + self.degree), self.source.rank(i))
        return m

    def is_cocycle(self) -> bool:
        X, Y, n = self.effective_source(), self.target, self.degree
        s = _sign(n)
        for i in range(X.lo - 1, X.hi + 1):
            lhs = Y.d(i + n) * self.mat(i)
            rhs = self.mat(i + 1) * X.d(i)
            if lhs.shape[0] and lhs.shape[1] and not _mat_is_zero(self.ring, lhs - rhs * s):
                return False
        return True

    def compose(self, inner: "ChainMap") -> "ChainMap":
        """``self o inner`` with degrees adding."""
        along = inner.along
        if self.along is not None:
            along = self.along if along is None else self.along.compose(along)
        mats = {}
        for i in inner.source.degrees():
            a = inner.mat(i)
            if self.along is not None:
                a = a.map(self.along)
            mats[i] = self.mat(i + inner.degree) * a
        return ChainMap(inner.source, self.target, mats, self.degree + inner.degree,
                        along, check=False)

    def __matmul__(self, inner):
        return self.compose(inner)

    def _combine(self, other: "ChainMap", s: int) -> "ChainMap":
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        degs = set(self.mats) | set(other.mats)
        return ChainMap(self.source, self.target,
                        {i: self.mat(i) + other.mat(i) * s for i in degs},
                        self.degree, self.along, check=False)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def scale(self, c) -> "ChainMap":
        return ChainMap(self.source, self.target, {i: m * c for i, m in self.mats.items()},
                        self.degree, self.along, check=False)

    def equals(self, other: "ChainMap") -> bool:
        d = self - other
        return all(_mat_is_zero(self.ring, m) for m in d.mats.values())

    def is_zero(self) -> bool:
        return all(_mat_is_zero(self.ring, m) for m in self.mats.values())

    def __repr__(self):
        return f"ChainMap(degree={self.degree}, {sorted(self.mats)})"


def cone(f: ChainMap) -> FreeComplex:
    """``cone(f)^i = X^{i+1} + Y^i`` with ``d = [[-d_X, 0], [f, d_Y]]``."""
    if f.degree != 0:
        raise ValueError("cone of a map of nonzero degree")
    X, Y = f.effective_source(), f.target
    R = Y.ring
    P = R.poly_ring
    degs = set(i - 1 for i in X.ranks) | set(Y.ranks)
    ranks = {i: X.rank(i + 1) + Y.rank(i) for i in degs}
    diffs = {}
    for i in degs:
        if not (ranks.get(i) and ranks.get(i + 1)):
            continue
        top = (-X.d(i + 1)).hstack(_zero_mat(R, X.rank(i + 2), Y.rank(i))) \
            if X.rank(i + 2) else None
        bottom = f.mat(i + 1).hstack(Y.d(i)) if Y.rank(i + 1) else None
        if top is not None and bottom is not None:
            diffs[i] = top.vstack(bottom)
        elif top is not None:
            diffs[i] = top
        elif bottom is not None:
            diffs[i] = bottom
    return FreeComplex(R, ranks, diffs)


# --- Hom complex --------------------------------------------------------------


class HomComplex:
    """``Hom(X, Y)`` with ``Hom^n = prod_i Hom(X^i, Y^{i+n})``.

    An element of degree ``n`` is a dict ``{i: matrix}``; :meth:`flatten`
    turns it into a coordinate vector (blocks by ascending ``i``, each block
    column-major).
    """

    def __init__(self, X: FreeComplex, Y: FreeComplex):
        if X.ring != Y.ring:
            raise RingMismatch("Hom complex of complexes over different rings")
        self.X, self.Y = X, Y
        self.ring = X.ring
        lo = Y.lo - X.hi
        hi = Y.hi - X.lo
        ranks = {}
        for n in range(lo, hi + 1):
            ranks[n] = sum(Y.rank(i + n) * X.rank(i) for i in X.degrees())
        self._layout_cache: dict = {}
        diffs = {}
        for n in range(lo, hi):
            if ranks.get(n) and ranks.get(n + 1):
                diffs[n] = self._differential(n, ranks[n + 1])
        self.complex = FreeComplex(self.ring, ranks, diffs, check=False)

    def layout(self, n: int) -> list:
        """``[(i, rows, cols, offset)]`` for degree ``n``."""
        lay = self._layout_cache.get(n)
        if lay is None:
            lay, off = [], 0
            for i in self.X.degrees():
                r, c = self.Y.rank(i + n), self.X.rank(i)
                if r and c:
                    lay.append((i, r, c, off))
                    off += r * c
            self._layout_cache[n] = lay
        return lay

    def flatten(self, n: int, comps: Dict[int, Mat]) -> list:
        P = self.ring.poly_ring
        out = []
        for i, r, c, _ in self.layout(n):
            m = comps.get(i)
            for j in range(c):
                for k in range(r):
                    out.append(m.rows[k][j] if m is not None else P.zero())
        return out

    def unflatten(self, n: int, vec: Sequence[Poly]) -> Dict[int, Mat]:
        P = self.ring.poly_ring
        out = {}
        for i, r, c, off in self.layout(n):
            cols = [vec[off + j * r: off + (j + 1) * r] for j in range(c)]
            out[i] = Mat.from_columns(P, cols, r)
        return out

    def to_chain_map(self, n: int, vec: Sequence[Poly], check: bool = False) -> ChainMap:
        return ChainMap(self.X, self.Y, self.unflatten(n, vec), n, check=check)

    def from_chain_map(self, f: ChainMap) -> list:
        return self.flatten(f.degree, f.mats)

    def _differential(self, n: int, nrows: int) -> Mat:
        """Matrix of ``phi -> d_Y phi - (-1)^n phi d_X`` from degree n to n+1."""
        P = self.ring.poly_ring
        X, Y = self.X, self.Y
        s = _sign(n)
        target_off = {i: off for i, r, c, off in self.layout(n + 1)}
        cols = []
        for i, r, c, _ in self.layout(n):
            dY = Y.d(i + n)
            dXm = X.d(i - 1)
            for cc in range(c):
                for rr in range(r):
                    col = [P.zero()] * nrows
                    # d_Y E_{rr,cc}: block i of degree n+1, column cc = d_Y[:, rr]
                    if i in target_off and dY.nrows:
                        r2 = Y.rank(i + n + 1)
                        base = target_off[i] + cc * r2
                        for k in range(r2):
                            col[base + k] = col[base + k] + dY.rows[k][rr]
                    # -(-1)^n E_{rr,cc} d_X^{i-1}: block i-1, row rr
                    if (i - 1) in target_off and dXm.nrows:
                        r2 = Y.rank(i - 1 + n + 1)
                        for c2 in range(X.rank(i - 1)):
                            v = dXm.rows[cc][c2]
                            if v:
                                idx = target_off[i - 1] + c2 * r2 + rr
                                col[idx] = col[idx] - v * s
                    cols.append(col)
        return Mat.from_columns(P, cols, nrows)


def hom_complex(X: FreeComplex, Y: FreeComplex) -> HomComplex:
    return HomComplex(X, Y)


# --- tensor complex ------------------------------------------------------------


class TensorComplex:
    """``X (x) Y`` with ``d(x (x) y) = dx (x) y + (-1)^i x (x) dy``.

    ``left``/``right`` move entries of ``X``/``Y`` into the ring of the result
    (used for external products over the base field).  Basis of degree ``n``:
    ``(i, a, b)`` for ``a`` in ``X^i``, ``b`` in ``Y^{n-i}``, ordered by
    ascending ``i``, then ``a``, then ``b``.
    """

    def __init__(self, X: FreeComplex, Y: FreeComplex, ring: RingPresentation = None,
                 left=None, right=None):
        if ring is None:
            if X.ring != Y.ring:
                raise RingMismatch("internal tensor of complexes over different rings")
            ring = X.ring
        self.X, self.Y, self.ring = X, Y, ring
        self.left = left or (lambda f: f)
        self.right = right or (lambda f: f)
        P = ring.poly_ring
        lo, hi = X.lo + Y.lo, X.hi + Y.hi
        self._index: dict = {}
        ranks = {}
        for n in range(lo, hi + 1):
            k = 0
            for i in X.degrees():
                for a in range(X.rank(i)):
                    for b in range(Y.rank(n - i)):
                        self._index[(n, i, a, b)] = k
                        k += 1
            ranks[n] = k
        diffs = {}
        lx = {i: X.d(i).map(self.left) for i in X.degrees()}
        ry = {j: Y.d(j).map(self.right) for j in Y.degrees()}
        for n in range(lo, hi):
            if not (ranks[n] and ranks.get(n + 1)):
                continue
            rows = [[P.zero()] * ranks[n] for _ in range(ranks[n + 1])]
            for (m, i, a, b), col in self._index.items():
                if m != n:
                    continue
                j = n - i
                dx = lx[i]
                if X.rank(i + 1):
                    for a2 in range(X.rank(i + 1)):
                        v = dx.rows[a2][a]
                        if v:
                            row = self._index[(n + 1, i + 1, a2, b)]
                            rows[row][col] = rows[row][col] + v
                if Y.rank(j + 1):
                    dy = ry[j]
                    s = _sign(i)
                    for b2 in range(Y.rank(j + 1)):
                        v = dy.rows[b2][b]
                        if v:
                            row = self._index[(n + 1, i, a, b2)]
                            rows[row][col] = rows[row][col] + v * s
            diffs[n] = Mat(P, rows, ranks[n])
        self.complex = FreeComplex(ring, ranks, diffs, check=False)

    def index(self, n: int, i: int, a: int, b: int) -> int:
        return self._index[(n, i, a, b)]

    def basis(self, n: int) -> list:
        return sorted(((i, a, b) for (m, i, a, b) in self._index if m == n),
                      key=lambda t: self._index[(n,) + t])

    def tensor_maps(self, f: ChainMap, g: ChainMap, other: "TensorComplex",
                    left=None, right=None) -> ChainMap:
        """``f (x) g : self -> other`` with ``(f(x)g)(x(x)y) = (-1)^{|g||x|} f x (x) g y``."""
        left = left or other.left
        right = right or other.right
        P = other.ring.poly_ring
        nf, ng = f.degree, g.degree
        deg = nf + ng
        mats = {}
        for n in self.complex.degrees():
            r = other.complex.rank(n + deg)
            c = self.complex.rank(n)
            if not (r and c):
                continue
            rows = [[P.zero()] * c for _ in range(r)]
            for (i, a, b) in self.basis(n):
                col = self._index[(n, i, a, b)]
                s = _sign(ng * i)
                fm = f.mat(i)
                gm = g.mat(n - i)
                for a2 in range(fm.nrows):
                    va = fm.rows[a2][a]
                    if not va:
                        continue
                    va = left(va)
                    for b2 in range(gm.nrows):
                        vb = gm.rows[b2][b]
                        if vb:
                            row = other._index[(n + deg, i + nf, a2, b2)]
                            rows[row][col] = rows[row][col] + va * right(vb) * s
            mats[n] = Mat(P, rows, c)
        return ChainMap(self.complex, other.complex, mats, deg, check=False)


def tensor_complex(X: FreeComplex, Y: FreeComplex, ring: RingPresentation = None,
                   left=None, right=None) -> TensorComplex:
    return TensorComplex(X, Y, ring, left, right)


# --- resolutions ------------------------------------------------------------------


def prune_columns(R: RingPresentation, n: int, cols: Sequence[Sequence[Poly]],
                  relations: Sequence = ()) -> list:
    """Drop zero, repeated and redundant columns without changing their span."""
    out = []
    seen = set()
    for c in cols:
        c = [R.nf(x) for x in c]
        key = tuple(c)
        if not any(c) or key in seen:
            continue
        seen.add(key)
        out.append(c)
    if len(out) > 40:
        return out
    i = len(out) - 1
    while i >= 0 and len(out) > 1:
        others = out[:i] + out[i + 1:]
        ls = LinearSystem(R.poly_ring, n, others, list(relations), R.ideal)
        if ls.solve(out[i]) is not None:
            out = others
        i -= 1
    return out


@dataclass
class Resolution:
    """A truncated free resolution ``P -> M`` in degrees ``[-length, 0]``."""

    complex: FreeComplex
    module: FPModule
    length: int
    terminated: bool

    def exact_through(self, p: int) -> bool:
        """Whether ``P^{-p-1}`` is the true next term (for Ext^p)."""
        return self.terminated or p + 1 <= self.length


def free_resolution(M: FPModule, length: int, prune: bool = True) -> Resolution:
    if length < 1:
        raise ValueError("window length must be at least 1")
    R = M.ring
    P = R.poly_ring
    g = M.ngens
    cols = prune_columns(R, g, M.relations) if prune else [list(r) for r in M.relations]
    ranks = {0: g}
    diffs = {}
    prev_rank = g
    terminated = False
    for k in range(1, length + 1):
        if not cols:
            terminated = True
            break
        ranks[-k] = len(cols)
        diffs[-k] = Mat.from_columns(P, cols, prev_rank)
        ls = LinearSystem(P, prev_rank, cols, (), R.ideal)
        prev_rank = len(cols)
        syz = ls.syzygies()
        cols = prune_columns(R, prev_rank, syz) if prune else syz
    else:
        terminated = not cols
    return Resolution(FreeComplex(R, ranks, diffs, check=False), M, length, terminated)


class ExtGroup:
    """``H^p(Hom_R(P, N))`` for a complex ``P`` of free modules and a module ``N``.

    A cochain is a list of ``rank P^{-p}`` vectors in ``N`` (images of basis
    vectors).  ``module`` presents the cohomology; :meth:`class_of` maps a
    cocycle to coordinates and :meth:`representative` goes back.
    """

    def __init__(self, P: FreeComplex, N: FPModule, p: int, resolution: Resolution = None):
        if resolution is not None and not resolution.exact_through(p):
            raise WindowTooSmall(f"resolution of length {resolution.length} cannot see Ext^{p}")
        R = N.ring
        Pr = R.poly_ring
        self.P, self.N, self.p = P, N, p
        gN = N.ngens
        r = P.rank(-p)
        self.r = r
        n = gN * r
        self.n = n
        block_rels = []
        for j in range(r):
            for rel in N.relations:
                v = [Pr.zero()] * n
                v[j * gN:(j + 1) * gN] = rel
                block_rels.append(v)
        rnext = P.rank(-p - 1)
        d_out = P.d(-p - 1)  # r x rnext
        out_images = []
        out_rels = []
        if rnext and n:
            for j in range(r):
                for i in range(gN):
                    col = [Pr.zero()] * (gN * rnext)
                    for k in range(rnext):
                        col[k * gN + i] = d_out.rows[j][k]
                    out_images.append(col)
            for k in range(rnext):
                for rel in N.relations:
                    v = [Pr.zero()] * (gN * rnext)
                    v[k * gN:(k + 1) * gN] = rel
                    out_rels.append(v)
        rprev = P.rank(-p + 1)
        d_in = P.d(-p)  # rprev x r
        boundaries = []
        for l in range(rprev):
            for i in range(gN):
                v = [Pr.zero()] * n
                for j in range(r):
                    v[j * gN + i] = d_in.rows[l][j]
                if any(v):
                    boundaries.append(v)
        self.sub = module_homology(R, n, block_rels, out_images, out_rels, boundaries)
        self.module = self.sub.module

    def flatten(self, cochain: Sequence[Sequence[Poly]]) -> list:
        out = []
        for v in cochain:
            out.extend(v)
        return out

    def class_of(self, cochain: Sequence[Sequence[Poly]]) -> Optional[list]:
        """Coordinates of the class of a cocycle (``None`` if not a cocycle)."""
        if self.n == 0:
            return []
        return self.sub.class_of(self.flatten(cochain))

    def representative(self, coords: Sequence[Poly]) -> list:
        flat = self.sub.represent(coords)
        g = self.N.ngens
        return [flat[j * g:(j + 1) * g] for j in range(self.r)]

    def generator_cocycles(self) -> list:
        return [self.representative(self.module.gen(i)) for i in range(self.module.ngens)]

    def is_zero_class(self, cochain) -> bool:
        c = self.class_of(cochain)
        if c is None:
            raise ValueError("not a cocycle")
        return self.module.is_zero_vector(c) if c else True


def ext_tor(kind: str, M: FPModule, N: FPModule, i: int, window: int = 6):
    """``Ext^i_R(M, N)`` or ``Tor_i^R(M, N)`` as a presented module."""
    if window < i + 1:
        raise WindowTooSmall(f"window {window} too small for degree {i}")
    res = free_resolution(M, max(window, i + 1))
    if kind == "ext":
        return ExtGroup(res.complex, N, i, res).module
    if kind == "tor":
        return tor_group(res, N, i).module
    raise ValueError(f"unknown kind {kind!r}")


def tor_group(res: Resolution, N: FPModule, i: int) -> Subquotient:
    """``H^{-i}(P (x) N)`` for a free resolution ``P``."""
    if not res.exact_through(i):
        raise WindowTooSmall(f"resolution too short for Tor_{i}")
    P = res.complex
    R = N.ring
    Pr = R.poly_ring
    gN = N.ngens

    def blocks(rank):
        rels = []
        for j in range(rank):
            for rel in N.relations:
                v = [Pr.zero()] * (gN * rank)
                v[j * gN:(j + 1) * gN] = rel
                rels.append(v)
        return rels

    r = P.rank(-i)
    rout = P.rank(-i + 1)
    rin = P.rank(-i - 1)
    d_out = P.d(-i)
    d_in = P.d(-i - 1)
    out_images = []
    if rout:
        for j in range(r):
            for a in range(gN):
                col = [Pr.zero()] * (gN * rout)
                for k in range(rout):
                    col[k * gN + a] = d_out.rows[k][j]
                out_images.append(col)
    bnds = []
    for j in range(rin):
        for a in range(gN):
            v = [Pr.zero()] * (gN * r)
            for k in range(r):
                v[k * gN + a] = d_in.rows[k][j]
            bnds.append(v)
    return module_homology(R, gN * r, blocks(r), out_images, blocks(rout), bnds)


# --- lifting and homotopy ----------------------------------------------------------


def lift_map(P: FreeComplex, Q: FreeComplex, top: int, top_matrix: Mat, degree: int = 0,
             along: RingMap = None, low: int = None) -> ChainMap:
    """Extend ``f^top : P^top -> Q^{top+degree}`` downward to a cocycle.

    Solves ``d_Q f^{i} = (-1)^degree f^{i+1} d_P^{i}`` for ``i < top``; this
    works when ``Q`` is exact where needed (comparison theorem).  Components
    above ``top`` are zero.
    """
    R = Q.ring
    Pr = R.poly_ring
    Pe = P.base_change(along) if along is not None else P
    s = _sign(degree)
    mats = {top: top_matrix}
    low = P.lo if low is None else low
    i = top - 1
    while i >= low:
        rc = P.rank(i)
        if not rc:
            i -= 1
            continue
        tgt = i + degree
        rhs = mats.get(i + 1)
        rhs = (rhs * Pe.d(i)) * s if rhs is not None else None
        if Q.rank(tgt) == 0:
            if rhs is not None and not _mat_is_zero(R, rhs):
                raise LiftError(f"cannot lift in degree {i}: target is zero")
            i -= 1
            continue
        if rhs is None or _mat_is_zero(R, rhs):
            mats[i] = _zero_mat(R, Q.rank(tgt), rc)
            i -= 1
            continue
        dq = Q.d(tgt)
        ls = LinearSystem(Pr, Q.rank(tgt + 1), dq.columns(), (), R.ideal)
        cols = []
        for j in range(rc):
            sol = ls.solve(rhs.col(j))
            if sol is None:
                raise LiftError(f"cannot lift in degree {i}")
            cols.append([R.nf(x) for x in sol])
        mats[i] = Mat.from_columns(Pr, cols, Q.rank(tgt))
        i -= 1
    return ChainMap(P, Q, mats, degree, along, check=False)


@dataclass
class HomotopyResult:
    status: Optional[bool]
    witness: Optional[Dict[int, Mat]] = None

    def __bool__(self):
        return bool(self.status)


def chain_homotopic(f: ChainMap, g: ChainMap) -> HomotopyResult:
    """Search ``h`` of degree ``n-1`` with ``f - g = d h - (-1)^{n-1} h d``."""
    if f.degree != g.degree:
        raise ValueError("degree mismatch")
    X = f.effective_source()
    H = HomComplex(X, f.target)
    n = f.degree
    diff = f - g
    if diff.is_zero():
        return HomotopyResult(True, {})
    rhs = H.flatten(n, diff.mats)
    if H.complex.rank(n - 1) == 0:
        return HomotopyResult(False, None)
    D = H.complex.d(n - 1)
    R = X.ring
    ls = LinearSystem(R.poly_ring, D.nrows, D.columns(), (), R.ideal)
    sol = ls.solve(rhs)
    if sol is None:
        return HomotopyResult(False, None)
    return HomotopyResult(True, H.unflatten(n - 1, [R.nf(x) for x in sol]))
