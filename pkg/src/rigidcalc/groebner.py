"""Buchberger's algorithm for ideals and submodules of free modules.

The engine works on sparse vectors ``{(position, exponents): coefficient}``
over a free polynomial ring.  Ideals are the rank one case.  Quotient rings
are handled by the callers, which append the ideal's generators times every
unit vector (see :class:`LinearSystem`).
"""
from __future__ import annotations

import heapq
from contextlib import contextmanager
from typing import Callable, Optional, Sequence

from .errors import DegreeBoundExceeded, RingMismatch
from .polycore import Mat, MonomialOrder, Poly, PolyRing

DEFAULT_DEGREE_BOUND = 40
_settings = {"degree_bound": DEFAULT_DEGREE_BOUND}


def current_degree_bound() -> int:
    return _settings["degree_bound"]


@contextmanager
def degree_bound(n: int):
    """Temporarily change the default degree bound."""
    old = _settings["degree_bound"]
    _settings["degree_bound"] = n
    try:
        yield
    finally:
        _settings["degree_bound"] = old


def module_key(mono_key: Callable, split: Optional[int] = None) -> Callable:
    """Term-over-position key; with ``split``, positions below it dominate."""
    if split is None:
        def key(t):
            return mono_key(t[1]) + (-t[0],)
    else:
        def key(t):
            return (1 if t[0] < split else 0,) + mono_key(t[1]) + (-t[0],)
    return key


def vector_to_dict(vec: Sequence[Poly], offset: int = 0) -> dict:
    out = {}
    for i, f in enumerate(vec):
        for e, c in f.terms_dict.items():
            out[(i + offset, e)] = c
    return out


def dict_to_vector(d: dict, ring: PolyRing, n: int, offset: int = 0) -> list:
    parts: list = [dict() for _ in range(n)]
    for (p, e), c in d.items():
        parts[p - offset][e] = c
    return [Poly(ring, t) for t in parts]


class _Engine:
    """Basis under construction plus the reduction routine."""

    def __init__(self, key: Callable):
        self.key = key
        self._nk: dict = {}
        self.elems: list = []      # (dict, leading term)
        self.sugar: list = []
        self.by_pos: dict = {}

    def negkey(self, t):
        v = self._nk.get(t)
        if v is None:
            v = tuple(-x for x in self.key(t))
            self._nk[t] = v
        return v

    def leading(self, d: dict):
        return max(d, key=self.key)

    def add(self, d: dict, sugar: int) -> int:
        lt = self.leading(d)
        c = d[lt]
        if c != 1:
            inv = 1 / c
            d = {t: v * inv for t, v in d.items()}
        idx = len(self.elems)
        self.elems.append((d, lt))
        self.sugar.append(sugar)
        self.by_pos.setdefault(lt[0], []).append((lt[1], idx))
        return idx

    def find_divisor(self, t, skip: int = -1):
        e = t[1]
        for le, idx in self.by_pos.get(t[0], ()):
            if idx != skip and all(a <= b for a, b in zip(le, e)):
                return idx
        return None

    def reduce(self, f: dict, full: bool = True, skip: int = -1) -> dict:
        f = dict(f)
        nk = self.negkey
        heap = [(nk(t), t) for t in f]
        heapq.heapify(heap)
        rem = {}
        elems = self.elems
        while heap:
            _, t = heapq.heappop(heap)
            c = f.get(t)
            if c is None:
                continue
            g = self.find_divisor(t, skip)
            if g is None:
                rem[t] = c
                del f[t]
                if not full:
                    rem.update(f)
                    return rem
                continue
            gd, glt = elems[g]
            m = tuple(b - a for a, b in zip(glt[1], t[1]))
            for (p2, e2), v in gd.items():
                nt = (p2, tuple(x + y for x, y in zip(e2, m)))
                w = f.get(nt)
                if w is None:
                    f[nt] = -c * v
                    heapq.heappush(heap, (nk(nt), nt))
                else:
                    w = w - c * v
                    if w:
                        f[nt] = w
                    else:
                        del f[nt]
        return rem

    def spoly(self, i: int, j: int) -> dict:
        di, lti = self.elems[i]
        dj, ltj = self.elems[j]
        lcm = tuple(max(a, b) for a, b in zip(lti[1], ltj[1]))
        mi = tuple(a - b for a, b in zip(lcm, lti[1]))
        mj = tuple(a - b for a, b in zip(lcm, ltj[1]))
        out: dict = {}
        for (p, e), v in di.items():
            out[(p, tuple(x + y for x, y in zip(e, mi)))] = v
        for (p, e), v in dj.items():
            t = (p, tuple(x + y for x, y in zip(e, mj)))
            w = out.get(t, 0) - v
            if w:
                out[t] = w
            else:
                out.pop(t, None)
        return out


def _deg(d: dict) -> int:
    return max((sum(e) for _, e in d), default=0)


def _run_buchberger(vectors: Sequence[dict], key: Callable, bound: int,
                    known: Sequence[Sequence[dict]] = (), rank1: bool = False) -> _Engine:
    eng = _Engine(key)
    pending: set = set()
    queue: list = []
    treated_group: dict = {}

    def pair_sugar(i, j):
        lti, ltj = eng.elems[i][1], eng.elems[j][1]
        lcm = tuple(max(a, b) for a, b in zip(lti[1], ltj[1]))
        dl = sum(lcm)
        return max(eng.sugar[i] + dl - sum(lti[1]), eng.sugar[j] + dl - sum(ltj[1]))

    def register(idx, group=None):
        lt = eng.elems[idx][1]
        if group is not None:
            treated_group[idx] = group
        for le, i in eng.by_pos.get(lt[0], ()):
            if i == idx:
                continue
            if group is not None and treated_group.get(i) == group:
                continue
            if rank1 and all(a == 0 or b == 0 for a, b in zip(le, lt[1])):
                continue
            pending.add((i, idx))
            heapq.heappush(queue, (pair_sugar(i, idx), 1, idx, i))

    for g, group in enumerate(known):
        for d in group:
            if d:
                register(eng.add(dict(d), _deg(d)), group=g)
    for k, v in enumerate(vectors):
        if v:
            heapq.heappush(queue, (_deg(v), 0, k, 0))

    while queue:
        sugar, kind, a, b = heapq.heappop(queue)
        if kind == 0:
            v = vectors[a]
            if _deg(v) > bound:
                raise DegreeBoundExceeded(f"input of degree {_deg(v)} exceeds bound {bound}")
            h = eng.reduce(v)
        else:
            i, j = b, a
            pending.discard((i, j))
            if _chain_skip(eng, i, j, pending):
                continue
            lti, ltj = eng.elems[i][1], eng.elems[j][1]
            if sum(max(x, y) for x, y in zip(lti[1], ltj[1])) > bound:
                raise DegreeBoundExceeded(
                    f"S-polynomial degree exceeds bound {bound}; raise --degree-bound")
            h = eng.reduce(eng.spoly(i, j))
        if h:
            register(eng.add(h, max(sugar, _deg(h))))
    return eng


def _chain_skip(eng: _Engine, i: int, j: int, pending: set) -> bool:
    lti, ltj = eng.elems[i][1], eng.elems[j][1]
    lcm = tuple(max(a, b) for a, b in zip(lti[1], ltj[1]))
    for le, k in eng.by_pos.get(lti[0], ()):
        if k in (i, j):
            continue
        if all(a <= b for a, b in zip(le, lcm)):
            pik = (min(i, k), max(i, k))
            pjk = (min(j, k), max(j, k))
            if pik not in pending and pjk not in pending:
                return True
    return False


def _interreduce(eng: _Engine) -> list:
    """Reduced basis (monic, minimal, tails reduced) as a list of dicts."""
    n = len(eng.elems)
    keep = []
    for i in range(n):
        lti = eng.elems[i][1]
        redundant = False
        for le, j in eng.by_pos.get(lti[0], ()):
            if j != i and all(a <= b for a, b in zip(le, lti[1])):
                if le != lti[1] or j < i:
                    redundant = True
                    break
        if not redundant:
            keep.append(i)
    red = _Engine(eng.key)
    red._nk = eng._nk
    for i in keep:
        d, _ = eng.elems[i]
        red.add(d, eng.sugar[i])
    out = []
    for idx in range(len(red.elems)):
        d, lt = red.elems[idx]
        tail = dict(d)
        del tail[lt]
        r = red.reduce(tail, skip=idx)
        r[lt] = d[lt]
        out.append(r)
    return out


class ModuleGB:
    """A reduced Groebner basis of a submodule of a free module."""

    def __init__(self, key: Callable, basis: Sequence[dict], bound: int):
        self.key = key
        self.degree_bound = bound
        self._eng = _Engine(key)
        for d in basis:
            self._eng.add(d, _deg(d))
        self.basis = [d for d, _ in self._eng.elems]

    def leading_terms(self) -> list:
        return [lt for _, lt in self._eng.elems]

    def reduce(self, vec: dict) -> dict:
        return self._eng.reduce(vec)

    def contains(self, vec: dict) -> bool:
        return not self._eng.reduce(vec)

    def verify(self) -> bool:
        """Every S-polynomial of the basis reduces to zero."""
        eng = self._eng
        n = len(eng.elems)
        for j in range(n):
            for i in range(j):
                if eng.elems[i][1][0] != eng.elems[j][1][0]:
                    continue
                if eng.reduce(eng.spoly(i, j)):
                    return False
        return True


def module_groebner(vectors: Sequence[dict], key: Callable, degree_bound: int = None,
                    known: Sequence[Sequence[dict]] = (), rank1: bool = False,
                    verify: bool = False) -> ModuleGB:
    """Reduced Groebner basis of the submodule spanned by ``vectors``.

    ``known`` lists groups of vectors that are already Groebner bases of
    their own span; S-pairs inside a group are skipped.
    """
    bound = current_degree_bound() if degree_bound is None else degree_bound
    eng = _run_buchberger([dict(v) for v in vectors], key, bound, known, rank1)
    gb = ModuleGB(key, _interreduce(eng), bound)
    if verify and not gb.verify():
        raise AssertionError("Groebner basis failed the S-polynomial check")
    return gb


# --------------------------------------------------------------------------
# Ideals


class ReducedGB:
    """Reduced Groebner basis of an ideal in a free polynomial ring."""

    def __init__(self, ring: PolyRing, mgb: ModuleGB):
        self.ring = ring
        self.order = ring.order
        self.degree_bound = mgb.degree_bound
        self._mgb = mgb
        polys = [Poly(ring, {e: c for (_, e), c in d.items()}) for d in mgb.basis]
        key = ring.order.key
        self.basis = sorted(polys, key=lambda f: key(f.lm()), reverse=True)

    def __len__(self):
        return len(self.basis)

    def __iter__(self):
        return iter(self.basis)

    def __repr__(self):
        return "ReducedGB([" + ", ".join(str(f) for f in self.basis) + "])"

    def is_unit(self) -> bool:
        return len(self.basis) == 1 and self.basis[0].is_constant()

    def is_zero(self) -> bool:
        return not self.basis

    def _coerce(self, f: Poly) -> Poly:
        if f.ring == self.ring:
            return f
        if f.ring.names != self.ring.names or f.ring.field != self.ring.field:
            raise RingMismatch(f"{f.ring} vs {self.ring}")
        return Poly(self.ring, f.terms_dict)

    def reduce_terms(self, terms: dict) -> dict:
        """Normal form of a raw term dict ``{exponents: coeff}``."""
        if not self.basis:
            return {e: c for e, c in terms.items() if c}
        r = self._mgb.reduce({(0, e): c for e, c in terms.items() if c})
        return {e: c for (_, e), c in r.items()}

    def normal_form(self, f: Poly) -> Poly:
        f = self._coerce(f)
        if not self.basis or f.is_zero():
            return f
        r = self._mgb.reduce({(0, e): c for e, c in f.terms_dict.items()})
        return Poly(self.ring, {e: c for (_, e), c in r.items()})

    def contains(self, f: Poly) -> bool:
        return self.normal_form(f).is_zero()

    def contains_ideal(self, other: "ReducedGB") -> bool:
        return all(self.contains(g) for g in other.basis)

    def same_ideal(self, other: "ReducedGB") -> bool:
        return self.contains_ideal(other) and other.contains_ideal(self)

    def verify(self) -> bool:
        return self._mgb.verify()


def buchberger(generators: Sequence[Poly], order: MonomialOrder = None,
               degree_bound: int = None, ring: PolyRing = None,
               verify: bool = True) -> ReducedGB:
    """Reduced Groebner basis of the ideal generated by ``generators``."""
    if ring is None:
        if not generators:
            raise ValueError("ring required for an empty generator list")
        ring = generators[0].ring
    for g in generators:
        if g.ring.names != ring.names or g.ring.field != ring.field:
            raise RingMismatch(f"{g.ring} vs {ring}")
    if order is not None and order != ring.order:
        ring = ring.with_order(order)
    mk = ring.order.key
    key = lambda t: mk(t[1])  # noqa: E731
    vecs = [{(0, e): c for e, c in g.terms_dict.items()} for g in generators]
    mgb = module_groebner(vecs, key, degree_bound, rank1=True, verify=verify)
    return ReducedGB(ring, mgb)


def normal_form(f: Poly, gb: ReducedGB) -> Poly:
    return gb.normal_form(f)


def zero_ideal(ring: PolyRing) -> ReducedGB:
    return buchberger([], ring=ring)


# --------------------------------------------------------------------------
# Linear systems over quotient rings


def _ideal_groups(ideal: Optional[ReducedGB], positions: Sequence[int]) -> list:
    if ideal is None or not ideal.basis:
        return []
    return [[{(p, e): c for e, c in g.terms_dict.items()} for g in ideal.basis]
            for p in positions]


class LinearSystem:
    """Solve ``sum_j c_j A_j = v`` in ``(P/J)^n / span(relations)``.

    ``P`` is the free polynomial ring ``ring`` and ``J`` the ideal ``ideal``.
    One Groebner basis of the augmented vectors ``(A_j, e_j)``, ``(R_k, 0)``
    under an order that eliminates the first block gives both particular
    solutions and the module of syzygies of the columns.
    """

    def __init__(self, ring: PolyRing, n: int, columns: Sequence[Sequence[Poly]],
                 relations: Sequence[Sequence[Poly]] = (), ideal: ReducedGB = None,
                 degree_bound: int = None):
        self.ring = ring
        self.ideal = ideal if ideal is not None and ideal.basis else None
        self.n = n
        self.m = len(columns)
        for c in list(columns) + list(relations):
            if len(c) != n:
                raise ValueError(f"vector of length {len(c)} in a rank {n} system")
        key = module_key(ring.order.key, split=n)
        vecs = []
        for j, col in enumerate(columns):
            d = vector_to_dict(col)
            d[(n + j, ring.zero_mono)] = ring.field.one
            vecs.append(d)
        for rel in relations:
            d = vector_to_dict(rel)
            if d:
                vecs.append(d)
        known = _ideal_groups(self.ideal, range(n + self.m))
        self._gb = module_groebner(vecs, key, degree_bound, known=known)

    def solve(self, v: Sequence[Poly]) -> Optional[list]:
        """Coefficients ``c`` with ``sum c_j A_j = v``, or ``None``."""
        if len(v) != self.n:
            raise ValueError("right-hand side has the wrong length")
        r = self._gb.reduce(vector_to_dict(v))
        if any(p < self.n for p, _ in r):
            return None
        c = dict_to_vector(r, self.ring, self.m, offset=self.n)
        return [-x for x in c]

    def syzygies_raw(self) -> list:
        """Groebner basis of the syzygy module in the free ring, unreduced."""
        out = []
        for d, lt in zip(self._gb.basis, self._gb.leading_terms()):
            if lt[0] >= self.n:
                out.append(dict_to_vector(d, self.ring, self.m, offset=self.n))
        return out

    def syzygies(self) -> list:
        """Generators of ``{c : sum c_j A_j = 0}`` modulo ``J``."""
        out = []
        for vec in self.syzygies_raw():
            if self.ideal is not None:
                vec = [self.ideal.normal_form(f) for f in vec]
            if any(vec):
                out.append(vec)
        return out


def syzygy_basis(m: Mat, ideal=None, degree_bound: int = None) -> Mat:
    """Columns generating the kernel of ``m`` acting on free modules.

    ``ideal`` is a :class:`ReducedGB` of ring relations (or any object with
    an ``ideal`` attribute, such as a ring presentation).
    """
    if ideal is not None and not isinstance(ideal, ReducedGB):
        ideal = ideal.ideal
    ls = LinearSystem(m.ring, m.nrows, m.columns(), (), ideal, degree_bound)
    syz = ls.syzygies()
    if not syz:
        return Mat(m.ring, [[] for _ in range(m.ncols)], 0)
    return Mat.from_columns(m.ring, syz, m.ncols)


def ringmap_kernel(u, degree_bound: int = None) -> ReducedGB:
    """Kernel of a ring map, as an ideal of the source's free polynomial ring.

    ``u`` needs ``source`` and ``target`` (objects with ``poly_ring`` and
    ``ideal``) and ``images`` (one polynomial in the target's free ring per
    source variable).  The result contains the source relations.
    """
    src, tgt = u.source.poly_ring, u.target.poly_ring
    return elimination_kernel(src, tgt, u.images,
                              getattr(u.target, "ideal", None), degree_bound)


def elimination_kernel(src: PolyRing, tgt: PolyRing, images: Sequence[Poly],
                       target_ideal: ReducedGB = None, degree_bound: int = None) -> ReducedGB:
    tnames = [f"_t{i}" for i in range(tgt.nvars)]
    snames = [f"_s{i}" for i in range(src.nvars)]
    joint = PolyRing(src.field, tnames + snames, MonomialOrder("block", tgt.nvars))
    nt = tgt.nvars

    def lift_target(f: Poly) -> Poly:
        return Poly(joint, {e + (0,) * src.nvars: c for e, c in f.terms_dict.items()})

    gens = []
    if target_ideal is not None:
        gens.extend(lift_target(g) for g in target_ideal.basis)
    for i, img in enumerate(images):
        if img.ring.names != tgt.names:
            raise RingMismatch(f"image {img} not in {tgt}")
        gens.append(joint.var(nt + i) - lift_target(img))
    gb = buchberger(gens, ring=joint, degree_bound=degree_bound, verify=False)
    kept = []
    for g in gb.basis:
        if all(not any(e[:nt]) for e in g.terms_dict):
            kept.append(Poly(src, {e[nt:]: c for e, c in g.terms_dict.items()}))
    return buchberger(kept, ring=src, degree_bound=degree_bound)
