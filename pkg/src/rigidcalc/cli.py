"""Script language, interpreter and command line front-end.

A script is a sequence of ``;``-terminated statements::

    field QQ;
    ring B = poly[x]/(x^2-x);
    map i : K -> B ();
    let e = section(B);
    check rdc(B) == B;
    emit e;

Polynomials inside declarations are kept as raw text and parsed against the
relevant ring at execution time.  Inside expressions, polynomials are quoted
strings.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import CheckFailed, ParseError, RigidCalcError
from .polycore import Field, Mat, Poly

# --- tokens ----------------------------------------------------------------------------

PUNCT2 = ("==", "->")
PUNCT1 = set(";=[](),:/^*+-{}")


@dataclass(frozen=True)
class Token:
    kind: str  # "id", "int", "str", "op", "eof"
    text: str
    line: int
    col: int


def tokenize(text: str) -> list:
    out = []
    i, line, col = 0, 1, 1
    n = len(text)

    def advance(k):
        nonlocal i, line, col
        for _ in range(k):
            if text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            advance(1)
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                advance(1)
            continue
        start_line, start_col = line, col
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            out.append(Token("id", text[i:j], start_line, start_col))
            advance(j - i)
        elif ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            out.append(Token("int", text[i:j], start_line, start_col))
            advance(j - i)
        elif ch == '"':
            j = i + 1
            while j < n and text[j] not in '"\n':
                j += 1
            if j >= n or text[j] != '"':
                raise ParseError("unterminated string", start_line, start_col)
            out.append(Token("str", text[i + 1:j], start_line, start_col))
            advance(j + 1 - i)
        elif text[i:i + 2] in PUNCT2:
            out.append(Token("op", text[i:i + 2], start_line, start_col))
            advance(2)
        elif ch in PUNCT1:
            out.append(Token("op", ch, start_line, start_col))
            advance(1)
        else:
            raise ParseError(f"unexpected character {ch!r}", start_line, start_col)
    out.append(Token("eof", "", line, col))
    return out


# --- AST ---------------------------------------------------------------------------------


@dataclass(frozen=True)
class Name:
    ident: str


@dataclass(frozen=True)
class Int:
    value: int


@dataclass(frozen=True)
class Str:
    value: str


@dataclass(frozen=True)
class ListExpr:
    items: tuple


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


@dataclass(frozen=True)
class FieldDecl:
    p: int
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class RingDecl:
    name: str
    variables: tuple
    relations: tuple = ()
    inverted: tuple = ()
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class MapDecl:
    name: str
    source: str
    target: str
    images: tuple
    attrs: tuple = ()
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ModuleDecl:
    name: str
    matrix: tuple
    ring: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Let:
    name: str
    expr: object
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Check:
    left: object
    right: object = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Emit:
    expr: object
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ScriptAST:
    statements: tuple


# --- parser ---------------------------------------------------------------------------------


class Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Token = None):
        tok = tok or self.tok
        shown = tok.text or "end of input"
        raise ParseError(f"{msg} (found {shown!r})", tok.line, tok.col)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "id") and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        t = self.tok
        self.pos += 1
        return t

    def ident(self) -> str:
        if self.tok.kind != "id":
            self.error("expected an identifier")
        t = self.tok
        self.pos += 1
        return t.text

    def integer(self) -> int:
        sign = 1
        if self.at("-"):
            self.pos += 1
            sign = -1
        if self.tok.kind != "int":
            self.error("expected an integer")
        t = self.tok
        self.pos += 1
        return sign * int(t.text)

    # statements
    def script(self) -> ScriptAST:
        stmts = []
        while self.tok.kind != "eof":
            stmts.append(self.statement())
        for i, s in enumerate(stmts):
            if isinstance(s, FieldDecl) and i != 0:
                raise ParseError("the field declaration must be the first statement", s.line)
        return ScriptAST(tuple(stmts))

    def statement(self):
        t = self.tok
        if t.kind != "id":
            self.error("expected a statement")
        kw = t.text
        handler = {"field": self.field_decl, "ring": self.ring_decl, "map": self.map_decl,
                   "module": self.module_decl, "let": self.let_stmt, "check": self.check_stmt,
                   "emit": self.emit_stmt}.get(kw)
        if handler is None:
            self.error("unknown statement keyword")
        self.pos += 1
        node = handler(t.line)
        self.expect(";")
        return node

    def field_decl(self, line):
        if self.at("QQ"):
            self.pos += 1
            return FieldDecl(0, line)
        if self.at("GF"):
            self.pos += 1
            return FieldDecl(self.integer(), line)
        self.error("expected QQ or GF p")

    def poly_text(self, stops: str) -> str:
        """Raw polynomial text up to a top-level stop token."""
        parts = []
        depth = 0
        while True:
            t = self.tok
            if t.kind == "eof" or (t.kind == "op" and t.text == ";"):
                self.error("unterminated polynomial")
            if depth == 0 and t.kind == "op" and t.text in stops:
                break
            if t.kind == "op" and t.text == "(":
                depth += 1
            elif t.kind == "op" and t.text == ")":
                depth -= 1
            if t.kind == "str" or (t.kind == "op" and t.text not in "()^*+-/"):
                self.error("unexpected token in polynomial")
            parts.append(t.text)
            self.pos += 1
        if not parts:
            self.error("expected a polynomial")
        return "".join(parts)

    def poly_list(self, close: str) -> tuple:
        items = []
        if self.at(close):
            return ()
        while True:
            items.append(self.poly_text("," + close))
            if self.at(","):
                self.pos += 1
                continue
            return tuple(items)

    def ring_decl(self, line):
        name = self.ident()
        self.expect("=")
        self.expect("poly")
        self.expect("[")
        names = []
        if not self.at("]"):
            names.append(self.ident())
            while self.at(","):
                self.pos += 1
                names.append(self.ident())
        self.expect("]")
        rels, inv = (), ()
        if self.at("/"):
            self.pos += 1
            self.expect("(")
            rels = self.poly_list(")")
            self.expect(")")
        if self.at("inv"):
            self.pos += 1
            self.expect("(")
            inv = self.poly_list(")")
            self.expect(")")
        return RingDecl(name, tuple(names), rels, inv, line)

    def map_decl(self, line):
        name = self.ident()
        self.expect(":")
        src = self.ident()
        self.expect("->")
        tgt = self.ident()
        self.expect("(")
        imgs = self.poly_list(")")
        self.expect(")")
        attrs = []
        if self.at("["):
            self.pos += 1
            attrs.append(self.ident())
            while self.at(","):
                self.pos += 1
                attrs.append(self.ident())
            self.expect("]")
        return MapDecl(name, src, tgt, imgs, tuple(attrs), line)

    def module_decl(self, line):
        name = self.ident()
        self.expect("=")
        self.expect("coker")
        self.expect("[")
        rows = []
        if not self.at("]"):
            while True:
                self.expect("[")
                rows.append(self.poly_list("]"))
                self.expect("]")
                if self.at(","):
                    self.pos += 1
                    continue
                break
        self.expect("]")
        self.expect("over")
        ring = self.ident()
        widths = {len(r) for r in rows}
        if len(widths) > 1:
            raise ParseError("matrix rows have different lengths", line)
        return ModuleDecl(name, tuple(rows), ring, line)

    def let_stmt(self, line):
        name = self.ident()
        self.expect("=")
        return Let(name, self.expr(), line)

    def check_stmt(self, line):
        left = self.expr()
        right = None
        if self.at("=="):
            self.pos += 1
            right = self.expr()
        return Check(left, right, line)

    def emit_stmt(self, line):
        return Emit(self.expr(), line)

    # expressions
    def expr(self):
        t = self.tok
        if t.kind == "int" or (self.at("-") and self.peek().kind == "int"):
            return Int(self.integer())
        if t.kind == "str":
            self.pos += 1
            return Str(t.text)
        if self.at("["):
            self.pos += 1
            items = []
            if not self.at("]"):
                items.append(self.expr())
                while self.at(","):
                    self.pos += 1
                    items.append(self.expr())
            self.expect("]")
            return ListExpr(tuple(items))
        if t.kind == "id":
            name = self.ident()
            while self.at("-") and self.peek().kind == "id":
                self.pos += 1
                name += "-" + self.ident()
            if self.at("("):
                self.pos += 1
                args = []
                if not self.at(")"):
                    args.append(self.expr())
                    while self.at(","):
                        self.pos += 1
                        args.append(self.expr())
                self.expect(")")
                return Call(name, tuple(args))
            if "-" in name:
                self.error("expected '(' after a command name")
            return Name(name)
        self.error("expected an expression")


def parse_script(text: str) -> ScriptAST:
    return Parser(text).script()


# --- printer ----------------------------------------------------------------------------------


def format_expr(e) -> str:
    if isinstance(e, Name):
        return e.ident
    if isinstance(e, Int):
        return str(e.value)
    if isinstance(e, Str):
        return '"' + e.value + '"'
    if isinstance(e, ListExpr):
        return "[" + ", ".join(format_expr(x) for x in e.items) + "]"
    if isinstance(e, Call):
        return e.func + "(" + ", ".join(format_expr(x) for x in e.args) + ")"
    raise TypeError(f"not an expression: {e!r}")


def format_statement(s) -> str:
    if isinstance(s, FieldDecl):
        return "field QQ;" if s.p == 0 else f"field GF {s.p};"
    if isinstance(s, RingDecl):
        out = f"ring {s.name} = poly[{', '.join(s.variables)}]"
        if s.relations:
            out += "/(" + ", ".join(s.relations) + ")"
        if s.inverted:
            out += " inv(" + ", ".join(s.inverted) + ")"
        return out + ";"
    if isinstance(s, MapDecl):
        out = f"map {s.name} : {s.source} -> {s.target} (" + ", ".join(s.images) + ")"
        if s.attrs:
            out += " [" + ", ".join(s.attrs) + "]"
        return out + ";"
    if isinstance(s, ModuleDecl):
        rows = ", ".join("[" + ", ".join(r) + "]" for r in s.matrix)
        return f"module {s.name} = coker [{rows}] over {s.ring};"
    if isinstance(s, Let):
        return f"let {s.name} = {format_expr(s.expr)};"
    if isinstance(s, Check):
        out = "check " + format_expr(s.left)
        if s.right is not None:
            out += " == " + format_expr(s.right)
        return out + ";"
    if isinstance(s, Emit):
        return f"emit {format_expr(s.expr)};"
    raise TypeError(f"not a statement: {s!r}")


def format_script(ast: ScriptAST) -> str:
    return "\n".join(format_statement(s) for s in ast.statements) + "\n"


# --- values and JSON --------------------------------------------------------------------------


@dataclass
class Element:
    ring: object
    value: Poly

    def to_json(self) -> dict:
        return {"kind": "element", "value": str(self.value), "ring": str(self.ring)}


def to_json(v):
    from .fpmodules import FPModule, ModuleMap, RingMap, RingPresentation
    from .groebner import ReducedGB
    if hasattr(v, "to_json"):
        return v.to_json()
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, int):
        return v
    if isinstance(v, str):
        return v
    if isinstance(v, Poly):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [to_json(x) for x in v]
    if isinstance(v, dict):
        return {str(k): to_json(x) for k, x in v.items()}
    if isinstance(v, RingPresentation):
        return {"kind": "ring", "field": str(v.field), "variables": list(v.user_names),
                "relations": [str(r) for r in v.relations],
                "inverted": [str(s) for s in v.inverted], "ideal": [str(g) for g in v.ideal]}
    if isinstance(v, RingMap):
        return {"kind": "map", "source": str(v.source), "target": str(v.target),
                "images": [str(f) for f in v.images]}
    if isinstance(v, FPModule):
        return {"kind": "module", "ring": str(v.ring), "generators": v.ngens,
                "relations": [[str(x) for x in r] for r in v.relations]}
    if isinstance(v, ModuleMap):
        return {"kind": "module_map", "matrix": [[str(x) for x in row] for row in v.matrix.rows]}
    if isinstance(v, Mat):
        return {"kind": "matrix", "rows": [[str(x) for x in row] for row in v.rows]}
    if isinstance(v, ReducedGB):
        return {"kind": "groebner", "basis": [str(g) for g in v.basis]}
    return {"kind": type(v).__name__, "repr": repr(v)}


# --- interpreter ---------------------------------------------------------------------------------


@dataclass
class Flags:
    window: int = 6
    degree_bound: int = 40
    field: str = "QQ"


def parse_field(text: str) -> Field:
    t = text.replace(" ", "").upper()
    if t == "QQ":
        return Field()
    if t.startswith("GF"):
        return Field(int(t[2:].strip("()")))
    raise ValueError(f"unknown field {text!r}")


class Interpreter:
    def __init__(self, flags: Flags = None):
        self.flags = flags or Flags()
        self.field = parse_field(self.flags.field)
        self.env = {}
        self.results = []
        self.failed = False

    # coercions
    def ring(self, v):
        from .fpmodules import FPModule, RingMap, RingPresentation
        if isinstance(v, RingPresentation):
            return v
        if isinstance(v, FPModule):
            return v.ring
        if isinstance(v, RingMap):
            return v.target
        raise RigidCalcError(f"expected a ring, got {type(v).__name__}")

    def map(self, v):
        from .fpmodules import RingMap, RingPresentation
        from .smooth_etale import structure_map
        if isinstance(v, RingMap):
            return v
        if isinstance(v, RingPresentation):
            return structure_map(v)
        raise RigidCalcError(f"expected a ring map, got {type(v).__name__}")

    def module(self, v):
        from .fpmodules import FPModule, RingPresentation
        from .squaring import RigidComplex, SquarePresentation
        if isinstance(v, FPModule):
            return v
        if isinstance(v, RingPresentation):
            from .squaring import unit_module
            return unit_module(v)
        if isinstance(v, RigidComplex):
            return v.H
        if isinstance(v, SquarePresentation):
            return v.module
        if hasattr(v, "H"):
            return v.H
        raise RigidCalcError(f"expected a module, got {type(v).__name__}")

    def rigid(self, v):
        from .squaring import RigidComplex
        from .fpmodules import RingPresentation
        if isinstance(v, RigidComplex):
            return v
        if isinstance(v, RingPresentation):
            from .dualizing import rigid_dualizing_complex
            return rigid_dualizing_complex(v, self.flags.window)
        raise RigidCalcError(f"expected a rigid complex, got {type(v).__name__}")

    def poly(self, v, R) -> Poly:
        if isinstance(v, Element):
            return R(v.value)
        if isinstance(v, Str):
            v = v.value
        if isinstance(v, (str, int)):
            return R(v)
        if isinstance(v, Poly):
            return R(v)
        raise RigidCalcError(f"expected a polynomial, got {type(v).__name__}")

    def polys(self, v, R) -> list:
        if not isinstance(v, list):
            raise RigidCalcError("expected a list of polynomials")
        return [self.poly(x, R) for x in v]

    # evaluation
    def eval(self, e):
        if isinstance(e, Name):
            if e.ident not in self.env:
                raise RigidCalcError(f"undefined name {e.ident!r}")
            return self.env[e.ident]
        if isinstance(e, Int):
            return e.value
        if isinstance(e, Str):
            return e.value
        if isinstance(e, ListExpr):
            return [self.eval(x) for x in e.items]
        if isinstance(e, Call):
            fn = COMMANDS.get(e.func)
            if fn is None:
                raise RigidCalcError(f"unknown command {e.func!r}")
            return fn(self, *[self.eval(a) for a in e.args])
        raise TypeError(f"cannot evaluate {e!r}")

    def declare(self, name: str, value, line: int):
        if name in self.env:
            raise RigidCalcError(f"line {line}: {name!r} is already declared")
        self.env[name] = value

    def run_statement(self, s):
        from .fpmodules import FPModule, RingMap, RingPresentation
        if isinstance(s, FieldDecl):
            self.field = Field(s.p)
        elif isinstance(s, RingDecl):
            R = RingPresentation(self.field, list(s.variables), list(s.relations),
                                 list(s.inverted))
            self.declare(s.name, R, s.line)
        elif isinstance(s, MapDecl):
            src, tgt = self.ring(self.eval(Name(s.source))), self.ring(self.eval(Name(s.target)))
            m = RingMap(src, tgt, list(s.images), finite=True if "finite" in s.attrs else None,
                        localization="localization" in s.attrs)
            self.declare(s.name, m, s.line)
        elif isinstance(s, ModuleDecl):
            R = self.ring(self.eval(Name(s.ring)))
            P = R.poly_ring
            g = len(s.matrix)
            ncols = len(s.matrix[0]) if s.matrix else 0
            rels = [[R(s.matrix[i][j]) for i in range(g)] for j in range(ncols)]
            self.declare(s.name, FPModule(R, g, rels), s.line)
        elif isinstance(s, Let):
            self.declare(s.name, self.eval(s.expr), s.line)
        elif isinstance(s, Check):
            left = self.eval(s.left)
            if s.right is None:
                ok, detail = truthy(left), None
            else:
                right = self.eval(s.right)
                ok, detail = self.equal(left, right)
            rec = {"kind": "check", "line": s.line, "statement": format_statement(s),
                   "passed": bool(ok)}
            if not ok:
                self.failed = True
                rec["counterexample"] = detail if detail is not None else {
                    "value": to_json(left)}
            self.results.append(rec)
        elif isinstance(s, Emit):
            v = self.eval(s.expr)
            self.results.append({"kind": "emit", "line": s.line,
                                 "expr": format_expr(s.expr), "value": to_json(v)})

    def equal(self, a, b) -> tuple:
        from .fpmodules import FPModule, RingPresentation, find_isomorphism
        from .squaring import RigidComplex, SquarePresentation, rigid_isomorphism
        if isinstance(a, list) and isinstance(b, list):
            if len(a) != len(b):
                return False, {"reason": "length", "left": len(a), "right": len(b)}
            for i, (x, y) in enumerate(zip(a, b)):
                ok, d = self.equal(x, y)
                if not ok:
                    return False, {"index": i, "detail": d}
            return True, None
        if isinstance(a, RigidComplex) and isinstance(b, RigidComplex):
            try:
                phi = rigid_isomorphism(a, b)
            except RigidCalcError as exc:
                return False, {"reason": str(exc)}
            return True, {"iso": to_json(phi)}
        modlike = (FPModule, SquarePresentation, RigidComplex)
        if isinstance(a, modlike) or isinstance(b, modlike):
            ma, mb = self.module(a), self.module(b)
            if ma.ring != mb.ring:
                return False, {"reason": "different rings"}
            status, _, _ = find_isomorphism(ma, mb)
            return status == "iso", {"left": to_json(ma), "right": to_json(mb),
                                     "search": status}
        if isinstance(a, Element) or isinstance(b, Element):
            R = a.ring if isinstance(a, Element) else b.ring
            x, y = self.poly(a, R), self.poly(b, R)
            return R.equal(x, y), {"left": str(x), "right": str(y)}
        if isinstance(a, RingPresentation) and isinstance(b, RingPresentation):
            return a.ideal.same_ideal(b.ideal) and a.names == b.names, None
        ok = to_json(a) == to_json(b)
        return ok, None if ok else {"left": to_json(a), "right": to_json(b)}

    def run(self, ast: ScriptAST) -> int:
        from .groebner import degree_bound
        with degree_bound(self.flags.degree_bound):
            for s in ast.statements:
                try:
                    self.run_statement(s)
                except RigidCalcError as exc:
                    self.results.append({"kind": "error", "line": s.line,
                                         "type": type(exc).__name__, "message": str(exc)})
                    return 2
        return 1 if self.failed else 0


def truthy(v) -> bool:
    if isinstance(v, bool):
        return v
    if hasattr(v, "holds"):
        return bool(v.holds)
    return bool(v)


def execute(ast: ScriptAST, flags: Flags = None) -> tuple:
    """Run a parsed script; returns ``(results, exit_status)``."""
    it = Interpreter(flags)
    status = it.run(ast)
    return it.results, status


# --- commands --------------------------------------------------------------------------------

COMMANDS: dict = {}


def command(name: str) -> Callable:
    def deco(fn):
        COMMANDS[name] = fn
        return fn
    return deco


@command("gb")
def _gb(it, R, gens=None, order=None):
    """Reduced basis of ``gens`` plus the relations of ``R``, in the ambient polynomial ring."""
    from .groebner import buchberger
    from .polycore import MonomialOrder
    R = it.ring(R)
    P = R.poly_ring
    if order is not None:
        P = P.with_order(MonomialOrder(order))
    extra = []
    for g in gens or []:
        text = g.value if isinstance(g, Element) else g
        extra.append(P(str(text)))
    return buchberger([P(str(g)) for g in R.ideal.basis] + extra, ring=P)


@command("nf")
def _nf(it, R, f):
    R = it.ring(R)
    return Element(R, it.poly(f, R))


@command("syz")
def _syz(it, R, rows):
    from .groebner import syzygy_basis
    R = it.ring(R)
    m = Mat(R.poly_ring, [[it.poly(x, R) for x in row] for row in rows],
            len(rows[0]) if rows else 0)
    return syzygy_basis(m, R)


@command("kernel")
def _kernel(it, u):
    return it.map(u).kernel()


@command("free")
def _free(it, R, n=1):
    from .fpmodules import FPModule
    return FPModule.free(it.ring(R), n)


@command("ext")
def _ext(it, M, N, i):
    from .complexes import ext_tor
    return ext_tor("ext", it.module(M), it.module(N), i, max(it.flags.window, i + 2))


@command("tor")
def _tor(it, M, N, i):
    from .complexes import ext_tor
    return ext_tor("tor", it.module(M), it.module(N), i, max(it.flags.window, i + 2))


@command("koszul")
def _koszul(it, R, seq):
    from .koszul import is_koszul_regular, koszul_complex
    R = it.ring(R)
    seq = it.polys(seq, R)
    return {"kind": "koszul", "regular": is_koszul_regular(R, seq),
            "complex": koszul_complex(R, seq).to_json()}


@command("fli")
def _fli(it, u, M=None, seq=None):
    from .koszul import fundamental_local_iso
    u = it.map(u)
    M = it.module(M) if M is not None else it.module(u.source)
    res = fundamental_local_iso(u, M, it.polys(seq, u.source) if seq is not None else None)
    return {"kind": "fli", "sequence": [str(a) for a in res.sequence],
            "is_iso": res.fund_is_iso, "vanishing": to_json(res.vanishing),
            "delta_rs": to_json(res.delta_rs)}


@command("fraction")
def _fraction(it, M, mu, seq):
    from .koszul import fraction_class
    M = it.module(M)
    R = M.ring
    return [str(x) for x in fraction_class(M, it.polys(mu, R), it.polys(seq, R))]


@command("diag")
def _diag(it, u):
    from .smooth_etale import diagonal_ideal
    env = diagonal_ideal(it.map(u))
    return {"kind": "enveloping", "ring": to_json(env.ring),
            "delta": [str(g) for g in env.delta_gens]}


@command("omega")
def _omega(it, u, n=1):
    from .smooth_etale import kahler
    return kahler(it.map(u), n)


@command("etale-check")
def _etale_check(it, u, coords=None):
    from .smooth_etale import check_etale_coords, kahler
    u = it.map(u)
    if coords is None:
        return kahler(u, 1).is_zero()
    return check_etale_coords(u, it.polys(coords, u.target))


@command("section")
def _section(it, u):
    from .smooth_etale import etale_section
    s = etale_section(it.map(u))
    return Element(s.env.ring, s.e)


@command("trace")
def _trace(it, u, basis=None):
    from .smooth_etale import operator_trace
    from .squaring import restriction_of, unit_module
    u = it.map(u)
    if basis is None:
        basis = restriction_of(unit_module(u.target), u).basis
    else:
        basis = it.polys(basis, u.target)
    rep = operator_trace(u, basis)
    return {"kind": "trace", "traces": [str(t) for t in rep.traces], "gram": to_json(rep.gram),
            "det": str(rep.det), "nondegenerate": rep.nondegenerate}


@command("sq")
def _sq(it, R, M, d=0):
    from .squaring import square
    M = it.module(M)
    return square(it.ring(R), M, d, it.flags.window)


@command("tau")
def _tau(it, R):
    from .squaring import tautological
    return tautological(it.ring(R), it.flags.window)


@command("cup")
def _cup(it, M, N):
    from .squaring import cup_product
    return cup_product(it.rigid(M), it.rigid(N), it.flags.window)


@command("rigid-esm")
def _rigid_esm(it, u, coords=None):
    from .squaring import rigidifier_esm
    u = it.map(u)
    c = it.polys(coords, u.target) if coords is not None else None
    return rigidifier_esm(u, c, it.flags.window)


@command("rigid-coind")
def _rigid_coind(it, u, M):
    from .squaring import rigidifier_coinduced
    N, _ = rigidifier_coinduced(it.map(u), it.rigid(M), it.flags.window)
    return N


@command("rigid-ind")
def _rigid_ind(it, v, M):
    from .squaring import rigidifier_induced
    N, _ = rigidifier_induced(it.map(v), it.rigid(M))
    return N


@command("rigid-twind")
def _rigid_twind(it, v, M):
    from .squaring import twisted_induced
    return twisted_induced(it.map(v), it.rigid(M))


@command("section-rigid")
def _section_rigid(it, v):
    from .squaring import section_rigid
    return section_rigid(it.map(v), it.flags.window)


@command("solve-unit")
def _solve_unit(it, u, M, c="1"):
    """Unit that rigidifies ``c`` times the coinduced trace along ``u``."""
    from .squaring import rigidifier_coinduced, solve_rigid_unit
    u = it.map(u)
    M = it.rigid(M)
    N, tr = rigidifier_coinduced(u, M, it.flags.window)
    sol = solve_rigid_unit(tr.scale(it.poly(c, u.source)), M, N)
    return Element(u.target, sol.c)


@command("rdc")
def _rdc(it, R):
    from .dualizing import rigid_dualizing_complex
    return rigid_dualizing_complex(it.ring(R), it.flags.window)


@command("rigid-trace")
def _rigid_trace(it, u):
    from .dualizing import rigid_trace
    return rigid_trace(it.map(u), it.flags.window)


@command("rigid-qloc")
def _rigid_qloc(it, w):
    from .dualizing import rigid_etale_localization
    return rigid_etale_localization(it.map(w), it.flags.window)


@command("twind")
def _twind(it, u, M=None, d=0):
    from .dualizing import twisted_induction
    u = it.map(u)
    M = it.module(M) if M is not None else it.module(u.source)
    return twisted_induction(u, M, d, it.flags.window)


@command("rdc-rel")
def _rdc_rel(it, u, route="auto", basis=None):
    from .dualizing import relative_rigid_dualizing
    u = it.map(u)
    b = it.polys(basis, u.target) if basis is not None else None
    return relative_rigid_dualizing(u, it.flags.window, route, b)


@command("morita")
def _morita(it, M, window=4):
    from .dualizing import derived_morita_check
    return derived_morita_check(it.module(M), window)


@command("rank-law")
def _rank_law(it, u):
    from .dualizing import finite_etale_rank_law
    r = finite_etale_rank_law(it.map(u), it.flags.window)
    return {"kind": "rank_law", "holds": r.holds, "rank": str(r.rank),
            "matrix": to_json(r.matrix)}


@command("tower")
def _tower(it, u1, u2):
    from .dualizing import trace_tower
    t = trace_tower(it.map(u1), it.map(u2), it.flags.window)
    return {"kind": "tower", "holds": t.holds}


@command("is-iso")
def _is_iso(it, M):
    from .squaring import RigidComplex
    if isinstance(M, RigidComplex):
        return M.is_iso()
    raise RigidCalcError("is-iso expects a rigid complex")


# --- entry point -----------------------------------------------------------------------------


def run_file(path: str, flags: Flags, json_out: Optional[str] = None) -> int:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        _write([{"kind": "error", "type": "IOError", "message": str(exc)}], json_out)
        return 2
    try:
        ast = parse_script(text)
    except ParseError as exc:
        report = {"kind": "error", "type": "ParseError", "message": str(exc),
                  "line": exc.line, "column": exc.column}
        _write([report], json_out)
        return 2
    results, status = execute(ast, flags)
    _write(results, json_out)
    return status


def _write(results, json_out):
    text = json.dumps(results, indent=2)
    if json_out:
        with open(json_out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        checks = [r for r in results if r["kind"] == "check"]
        errors = [r for r in results if r["kind"] == "error"]
        passed = sum(r["passed"] for r in checks)
        print(f"{passed}/{len(checks)} checks passed, {len(errors)} errors; wrote {json_out}")
    else:
        print(text)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="rigidcalc")
    sub = ap.add_subparsers(dest="cmd", required=True)
    run = sub.add_parser("run", help="execute a script")
    run.add_argument("file")
    run.add_argument("--json", dest="json_out")
    run.add_argument("--degree-bound", type=int, default=40)
    run.add_argument("--window", type=int, default=6)
    run.add_argument("--field", default="QQ", help="QQ or GFp, used when the script has no field line")
    sub.add_parser("test", help="run the acceptance suite")
    args = ap.parse_args(argv)
    if args.cmd == "run":
        flags = Flags(args.window, args.degree_bound, args.field)
        try:
            parse_field(flags.field)
        except ValueError as exc:
            _write([{"kind": "error", "type": "UsageError", "message": str(exc)}], args.json_out)
            return 2
        return run_file(args.file, flags, args.json_out)
    from .acceptance import run_all
    ok = True
    for r in run_all():
        print(r.line())
        ok = ok and r.passed
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
