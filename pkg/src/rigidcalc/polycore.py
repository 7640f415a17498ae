"""Exact scalars, monomial orders and sparse multivariate polynomials.

Polynomials are immutable.  A polynomial lives in a :class:`PolyRing`, which
fixes the base field, the variable names and the monomial order.  Terms are
kept in a dict ``{exponent tuple: coefficient}`` with no zero coefficients;
the order-sorted term list is computed on demand and cached.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .errors import ParseError, RingMismatch


class GF:
    """Residue of an integer modulo a prime ``p``, stored in ``[0, p)``."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, GF):
            return other.v
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else GF(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else GF(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else GF(o - self.v, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else GF(self.v * o, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return GF(self.v * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return GF(o * pow(self.v, -1, self.p), self.p)

    def __neg__(self):
        return GF(-self.v, self.p)

    def __pow__(self, n: int):
        return GF(pow(self.v, n, self.p), self.p)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return (self.v - o) % self.p == 0

    def __hash__(self):
        return hash((self.v, self.p))

    def __bool__(self):
        return self.v != 0

    def __repr__(self):
        return str(self.v)


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


class Field:
    """The base field: ``Field()`` is QQ, ``Field(p)`` is GF(p)."""

    def __init__(self, p: int = 0):
        if p and not _is_prime(p):
            raise ValueError(f"GF({p}): modulus is not prime")
        self.p = p
        self.zero = self(0)
        self.one = self(1)

    @property
    def characteristic(self) -> int:
        return self.p

    def __call__(self, x) -> Union[Fraction, GF]:
        if self.p:
            if isinstance(x, GF):
                return x
            if isinstance(x, str):
                x = Fraction(x)
            if isinstance(x, Fraction):
                if x.denominator % self.p == 0:
                    raise ZeroDivisionError(f"{x} has no image in GF({self.p})")
                return GF(x.numerator * pow(x.denominator, -1, self.p), self.p)
            return GF(int(x), self.p)
        if isinstance(x, GF):
            raise TypeError("cannot move a GF(p) residue to QQ")
        return Fraction(x)

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return f"GF({self.p})" if self.p else "QQ"


QQ = Field()

Monomial = tuple


class MonomialOrder:
    """A monomial order given by a sort key on exponent tuples.

    Keys are flat tuples of integers, larger key meaning larger monomial.

    ``kind`` is ``"lex"``, ``"grevlex"`` or ``"block"``; a block order
    compares the first ``split`` variables by grevlex and breaks ties with
    grevlex on the remaining ones, so it eliminates the first block.
    """

    def __init__(self, kind: str = "grevlex", split: int = 0):
        if kind not in ("lex", "grevlex", "block"):
            raise ValueError(f"unknown monomial order {kind!r}")
        self.kind = kind
        self.split = split
        if kind == "lex":
            self.key = _lex_key
        elif kind == "grevlex":
            self.key = _grevlex_key
        else:
            s = split

            def key(e, s=s):
                return _grevlex_key(e[:s]) + _grevlex_key(e[s:])

            self.key = key

    def __eq__(self, other):
        return (isinstance(other, MonomialOrder) and self.kind == other.kind
                and self.split == other.split)

    def __hash__(self):
        return hash((self.kind, self.split))

    def __repr__(self):
        if self.kind == "block":
            return f"MonomialOrder('block', {self.split})"
        return f"MonomialOrder({self.kind!r})"

    def less(self, a: Monomial, b: Monomial) -> bool:
        return self.key(a) < self.key(b)


def _lex_key(e):
    return e


def _grevlex_key(e):
    return (sum(e),) + tuple(-x for x in reversed(e))


LEX = MonomialOrder("lex")
GREVLEX = MonomialOrder("grevlex")


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mono_divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def mono_div(b: Monomial, a: Monomial) -> Monomial:
    return tuple(y - x for x, y in zip(a, b))


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


class PolyRing:
    """A free polynomial ring ``k[x_1, ..., x_n]`` with a monomial order."""

    def __init__(self, field: Field, names: Sequence[str],
                 order: MonomialOrder = GREVLEX):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"repeated variable names in {names}")
        for n in names:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", n):
                raise ValueError(f"bad variable name {n!r}")
        self.field = field
        self.names = names
        self.nvars = len(names)
        self.order = order
        self.zero_mono = (0,) * self.nvars
        self._index = {n: i for i, n in enumerate(names)}

    def __eq__(self, other):
        return (isinstance(other, PolyRing) and self.field == other.field
                and self.names == other.names and self.order == other.order)

    def __hash__(self):
        return hash((self.field, self.names, self.order))

    def __repr__(self):
        return f"{self.field}[{', '.join(self.names)}]"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"no variable {name!r} in {self}") from None

    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return self.const(1)

    def const(self, c) -> "Poly":
        c = self.field(c)
        return Poly(self, {self.zero_mono: c} if c else {})

    def var(self, name: Union[str, int]) -> "Poly":
        i = self.index(name) if isinstance(name, str) else name
        e = [0] * self.nvars
        e[i] = 1
        return Poly(self, {tuple(e): self.field.one})

    def gens(self) -> list:
        return [self.var(i) for i in range(self.nvars)]

    def monomial(self, exps: Monomial, c=1) -> "Poly":
        c = self.field(c)
        return Poly(self, {tuple(exps): c} if c else {})

    def __call__(self, x) -> "Poly":
        if isinstance(x, Poly):
            if x.ring == self:
                return x
            return x.change_ring(self)
        if isinstance(x, str):
            return parse_poly(x, self)
        return self.const(x)

    def with_order(self, order: MonomialOrder) -> "PolyRing":
        return PolyRing(self.field, self.names, order)


class Poly:
    """Immutable sparse polynomial in a :class:`PolyRing`."""

    __slots__ = ("ring", "_t", "_sorted", "_hash")

    def __init__(self, ring: PolyRing, terms: Mapping[Monomial, object]):
        self.ring = ring
        self._t = terms
        self._sorted = None
        self._hash = None

    @staticmethod
    def from_terms(ring: PolyRing, terms: Iterable) -> "Poly":
        d: dict = {}
        for e, c in terms:
            e = tuple(e)
            v = d.get(e, 0) + c
            if v:
                d[e] = v
            else:
                d.pop(e, None)
        return Poly(ring, {e: ring.field(c) for e, c in d.items()})

    # --- inspection -------------------------------------------------------
    @property
    def terms_dict(self) -> Mapping[Monomial, object]:
        return self._t

    def terms(self) -> list:
        """Terms ``(monomial, coefficient)`` in strictly descending order."""
        if self._sorted is None:
            key = self.ring.order.key
            self._sorted = sorted(self._t.items(), key=lambda t: key(t[0]),
                                  reverse=True)
        return self._sorted

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self):
        return bool(self._t)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._t)

    def constant_coeff(self):
        return self._t.get(self.ring.zero_mono, self.ring.field.zero)

    def lm(self) -> Monomial:
        return self.terms()[0][0]

    def lc(self):
        return self.terms()[0][1]

    def total_degree(self) -> int:
        return max((sum(e) for e in self._t), default=-1)

    def degree(self, var: Union[str, int]) -> int:
        i = self.ring.index(var) if isinstance(var, str) else var
        return max((e[i] for e in self._t), default=-1)

    def variables_used(self) -> set:
        return {i for e in self._t for i, x in enumerate(e) if x}

    # --- arithmetic -------------------------------------------------------
    def _check(self, other: "Poly"):
        if other.ring != self.ring:
            raise RingMismatch(f"{self.ring} vs {other.ring}")

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction, GF)):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        d = dict(self._t)
        for e, c in other._t.items():
            v = d.get(e)
            if v is None:
                d[e] = c
            else:
                v = v + c
                if v:
                    d[e] = v
                else:
                    del d[e]
        return Poly(self.ring, d)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, {e: -c for e, c in self._t.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GF)):
            return self.scale(other)
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        d: dict = {}
        for e1, c1 in self._t.items():
            for e2, c2 in other._t.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                v = d.get(e)
                d[e] = c1 * c2 if v is None else v + c1 * c2
        return Poly(self.ring, {e: c for e, c in d.items() if c})

    __rmul__ = __mul__

    def scale(self, c) -> "Poly":
        c = self.ring.field(c)
        if not c:
            return self.ring.zero()
        return Poly(self.ring, {e: v * c for e, v in self._t.items()})

    def mul_term(self, mono: Monomial, c) -> "Poly":
        return Poly(self.ring, {tuple(x + y for x, y in zip(e, mono)): v * c
                                for e, v in self._t.items()})

    def __truediv__(self, other):
        if isinstance(other, Poly):
            if not other.is_constant() or other.is_zero():
                raise ZeroDivisionError("division by a non-constant polynomial")
            other = other.constant_coeff()
        return self.scale(self.ring.field.one / self.ring.field(other))

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self.scale(self.ring.field.one / self.lc())

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring == other.ring and self._t == other._t
        if isinstance(other, (int, Fraction, GF)):
            return self._t == self.ring.const(other)._t
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._t.items()))
        return self._hash

    # --- substitution ------------------------------------------------------
    def substitute(self, assignment: Mapping, target: PolyRing = None) -> "Poly":
        """Replace variables by polynomials.

        ``assignment`` maps variable names (or indices) to polynomials in
        ``target`` (default: this ring).  Unassigned variables must exist in
        ``target`` under the same name.
        """
        target = target or self.ring
        images = []
        for i, name in enumerate(self.ring.names):
            img = assignment.get(name, assignment.get(i))
            if img is None:
                img = target.var(name)
            elif not isinstance(img, Poly):
                img = target(img)
            elif img.ring != target:
                raise RingMismatch(f"image of {name} not in {target}")
            images.append(img)
        return evaluate(self, images, target)

    def change_ring(self, target: PolyRing) -> "Poly":
        """Move to a ring whose variable names include ours."""
        idx = [target.index(n) for n in self.ring.names]
        d = {}
        for e, c in self._t.items():
            ne = [0] * target.nvars
            for i, x in zip(idx, e):
                ne[i] = x
            d[tuple(ne)] = target.field(c)
        return Poly(target, d)

    # --- printing -------------------------------------------------------
    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({format_poly(self)!r})"


def evaluate(f: Poly, images: Sequence[Poly], target: PolyRing) -> Poly:
    """Evaluate ``f`` at ``x_i = images[i]``, a ring homomorphism image."""
    cache: dict = {}

    def power(i, k):
        key = (i, k)
        if key not in cache:
            cache[key] = images[i] ** k
        return cache[key]

    acc: dict = {}
    for e, c in f.terms_dict.items():
        term = target.const(c)
        for i, k in enumerate(e):
            if k:
                term = term * power(i, k)
        for m, v in term.terms_dict.items():
            w = acc.get(m)
            acc[m] = v if w is None else w + v
    return Poly(target, {m: v for m, v in acc.items() if v})


def _format_coeff(c) -> str:
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return str(c)


def format_poly(f: Poly) -> str:
    if f.is_zero():
        return "0"
    names = f.ring.names
    parts = []
    for e, c in f.terms():
        mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
        neg = isinstance(c, Fraction) and c < 0
        a = -c if neg else c
        if mono:
            s = mono if a == 1 else f"{_format_coeff(a)}*{mono}"
        else:
            s = _format_coeff(a)
        parts.append(("-" if neg else "+", s))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, s in parts[1:]:
        out += f" {sign} {s}"
    return out


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    toks = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", column=pos + 1)
        num, ident, op = m.groups()
        col = m.start() + len(m.group(0)) - len(m.group(0).lstrip()) + 1
        if num is not None:
            toks.append(("num", int(num), col))
        elif ident is not None:
            toks.append(("id", ident, col))
        else:
            toks.append(("op", "^" if op == "**" else op, col))
        pos = m.end()
    toks.append(("end", None, len(text) + 1))
    return toks


class _PolyParser:
    def __init__(self, text: str, ring: PolyRing):
        self.toks = _tokenize(text)
        self.i = 0
        self.ring = ring

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, op):
        t = self.take()
        if t[0] != "op" or t[1] != op:
            raise ParseError(f"expected {op!r}", column=t[2])

    def parse(self) -> Poly:
        f = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ParseError(f"unexpected token {t[1]!r}", column=t[2])
        return f

    def expr(self) -> Poly:
        t = self.peek()
        neg = False
        if t[0] == "op" and t[1] in "+-":
            self.take()
            neg = t[1] == "-"
        f = self.term()
        if neg:
            f = -f
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "+-":
                self.take()
                g = self.term()
                f = f + g if t[1] == "+" else f - g
            else:
                return f

    def term(self) -> Poly:
        f = self.factor()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "*/":
                self.take()
                g = self.factor()
                if t[1] == "*":
                    f = f * g
                else:
                    if g.is_zero() or not g.is_constant():
                        raise ParseError("division only by nonzero constants", column=t[2])
                    f = f / g
            elif t[0] in ("id", "num") or (t[0] == "op" and t[1] == "("):
                f = f * self.factor()
            else:
                return f

    def factor(self) -> Poly:
        base = self.atom()
        t = self.peek()
        if t[0] == "op" and t[1] == "^":
            self.take()
            e = self.take()
            if e[0] != "num":
                raise ParseError("exponent must be a nonnegative integer", column=e[2])
            base = base ** e[1]
        return base

    def atom(self) -> Poly:
        t = self.take()
        if t[0] == "num":
            return self.ring.const(t[1])
        if t[0] == "id":
            if t[1] not in self.ring.names:
                raise ParseError(f"unknown variable {t[1]!r}", column=t[2])
            return self.ring.var(t[1])
        if t[0] == "op" and t[1] == "(":
            f = self.expr()
            self.expect(")")
            return f
        if t[0] == "op" and t[1] == "-":
            return -self.factor()
        raise ParseError("unexpected end of input" if t[0] == "end"
                         else f"unexpected token {t[1]!r}", column=t[2])


def parse_poly(text: str, ring: PolyRing) -> Poly:
    """Parse ``3/2*x^2*y - z + 1`` style text into a polynomial."""
    return _PolyParser(text, ring).parse()


def poly_divmod(f: Poly, divisors: Sequence[Poly], order: MonomialOrder = None):
    """Multivariate division with remainder.

    Returns ``(quotients, remainder)`` with ``f = sum(q_i d_i) + r`` and no
    term of ``r`` divisible by any leading monomial of a nonzero divisor.
    """
    ring = f.ring
    if order is not None and order != ring.order:
        ring = ring.with_order(order)
        f = Poly(ring, f.terms_dict)
        divisors = [Poly(ring, d.terms_dict) for d in divisors]
    for d in divisors:
        f._check(d)
    key = ring.order.key
    lead = [(d.lm(), d.lc()) if d else None for d in divisors]
    quots: list = [dict() for _ in divisors]
    rem: dict = {}
    p = dict(f.terms_dict)
    while p:
        m = max(p, key=key)
        c = p[m]
        for i, ld in enumerate(lead):
            if ld is not None and mono_divides(ld[0], m):
                q = mono_div(m, ld[0])
                qc = c / ld[1]
                quots[i][q] = quots[i].get(q, 0) + qc
                for e, v in divisors[i].terms_dict.items():
                    ee = mono_mul(e, q)
                    w = p.get(ee, 0) - qc * v
                    if w:
                        p[ee] = w
                    else:
                        p.pop(ee, None)
                break
        else:
            rem[m] = c
            del p[m]
    qs = [Poly(ring, {e: c for e, c in q.items() if c}) for q in quots]
    return qs, Poly(ring, rem)


class Mat:
    """Immutable matrix of polynomials over one :class:`PolyRing`.

    Entries are stored row-major.  Products and sums are taken in the free
    polynomial ring; reduction modulo ring relations is the caller's job.
    """

    __slots__ = ("ring", "rows", "nrows", "ncols")

    def __init__(self, ring: PolyRing, rows, ncols: int = None):
        rows = tuple(tuple(ring(x) if not isinstance(x, Poly) else x for x in r)
                     for r in rows)
        self.ring = ring
        self.rows = rows
        self.nrows = len(rows)
        if ncols is None:
            if not rows:
                raise ValueError("ncols required for a matrix with no rows")
            ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged matrix")
        self.ncols = ncols

    @staticmethod
    def zeros(ring: PolyRing, nrows: int, ncols: int) -> "Mat":
        z = ring.zero()
        return Mat(ring, [[z] * ncols for _ in range(nrows)], ncols)

    @staticmethod
    def identity(ring: PolyRing, n: int) -> "Mat":
        z, o = ring.zero(), ring.one()
        return Mat(ring, [[o if i == j else z for j in range(n)] for i in range(n)], n)

    @staticmethod
    def from_columns(ring: PolyRing, cols, nrows: int) -> "Mat":
        cols = [list(c) for c in cols]
        return Mat(ring, [[c[i] for c in cols] for i in range(nrows)], len(cols))

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def col(self, j: int) -> list:
        return [r[j] for r in self.rows]

    def columns(self) -> list:
        return [self.col(j) for j in range(self.ncols)]

    def transpose(self) -> "Mat":
        return Mat.from_columns(self.ring, self.rows, self.ncols)

    def __add__(self, other: "Mat") -> "Mat":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return Mat(self.ring, [[a + b for a, b in zip(r, s)]
                               for r, s in zip(self.rows, other.rows)], self.ncols)

    def __neg__(self) -> "Mat":
        return self.map(lambda f: -f)

    def __sub__(self, other: "Mat") -> "Mat":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Mat):
            if self.ncols != other.nrows:
                raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
            z = self.ring.zero()
            cols = other.columns()
            out = []
            for r in self.rows:
                row = []
                for c in cols:
                    acc = z
                    for a, b in zip(r, c):
                        if a and b:
                            acc = acc + a * b
                    row.append(acc)
                out.append(row)
            return Mat(self.ring, out, other.ncols)
        return self.map(lambda f: f * other)

    def __rmul__(self, other):
        return self.map(lambda f: other * f)

    def apply(self, vec: Sequence[Poly]) -> list:
        z = self.ring.zero()
        out = []
        for r in self.rows:
            acc = z
            for a, b in zip(r, vec):
                if a and b:
                    acc = acc + a * b
            out.append(acc)
        return out

    def map(self, fn) -> "Mat":
        return Mat(self.ring, [[fn(x) for x in r] for r in self.rows], self.ncols)

    def is_zero(self) -> bool:
        return all(not x for r in self.rows for x in r)

    def hstack(self, other: "Mat") -> "Mat":
        if self.nrows != other.nrows:
            raise ValueError("row count mismatch")
        return Mat(self.ring, [a + b for a, b in zip(self.rows, other.rows)],
                   self.ncols + other.ncols)

    def vstack(self, other: "Mat") -> "Mat":
        if self.ncols != other.ncols:
            raise ValueError("column count mismatch")
        return Mat(self.ring, self.rows + other.rows, self.ncols)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Mat":
        return Mat(self.ring, [[self.rows[i][j] for j in cols] for i in rows], len(cols))

    def __eq__(self, other):
        return (isinstance(other, Mat) and self.shape == other.shape
                and self.rows == other.rows)

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        body = "; ".join(", ".join(str(x) for x in r) for r in self.rows)
        return f"Mat[{self.nrows}x{self.ncols}]({body})"


def block_diag(ring: PolyRing, blocks: Sequence[Mat]) -> Mat:
    nr = sum(b.nrows for b in blocks)
    nc = sum(b.ncols for b in blocks)
    z = ring.zero()
    rows = [[z] * nc for _ in range(nr)]
    r0 = c0 = 0
    for b in blocks:
        for i in range(b.nrows):
            for j in range(b.ncols):
                rows[r0 + i][c0 + j] = b.rows[i][j]
        r0 += b.nrows
        c0 += b.ncols
    return Mat(ring, rows, nc)


def determinant(m: Mat) -> Poly:
    """Determinant by cofactor expansion along the first row (small sizes)."""
    if m.nrows != m.ncols:
        raise ValueError("determinant of a non-square matrix")
    n = m.nrows
    if n == 0:
        return m.ring.one()
    if n == 1:
        return m.rows[0][0]
    acc = m.ring.zero()
    for j in range(n):
        a = m.rows[0][j]
        if a:
            minor = m.submatrix(range(1, n), [c for c in range(n) if c != j])
            term = a * determinant(minor)
            acc = acc + term if j % 2 == 0 else acc - term
    return acc
