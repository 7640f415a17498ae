import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rigidcalc.cli import (COMMANDS, Call, Check, Emit, FieldDecl, Flags, Int, Let, ListExpr,
                           MapDecl, ModuleDecl, Name, RingDecl, ScriptAST, Str, execute,
                           format_script, main, parse_script)
from rigidcalc.errors import ParseError
from rigidcalc.fpmodules import RingPresentation
from rigidcalc.polycore import Field

import oracle_values as O

KEYWORDS = {"field", "ring", "map", "module", "let", "check", "emit", "poly", "inv", "over",
            "coker", "QQ", "GF"}
SECTION_SCRIPT = """
field QQ;
ring K = poly[];
ring B = poly[x]/(x^2-x);
map i : K -> B ();
let e = section(i);
emit e;
check sq(B, B, 0) == B;
"""


def run(text, **flags):
    return execute(parse_script(text), Flags(**flags))


def test_two_statements():
    ast = parse_script("field QQ; ring B = poly[x]/(x^2-x);")
    assert ast.statements == (FieldDecl(0), RingDecl("B", ("x",), ("x^2-x",)))


def test_missing_semicolon_is_located():
    with pytest.raises(ParseError) as err:
        parse_script("field QQ;\nring B = poly[x]\nemit B;\n")
    assert (err.value.line, err.value.column) == (3, 1)


def test_call_node():
    ast = parse_script("ring K = poly[]; ring B = poly[x]; map i : K -> B (); let e = section(i);")
    assert ast.statements[-1] == Let("e", Call("section", (Name("i"),)))


def test_field_must_come_first():
    with pytest.raises(ParseError):
        parse_script("ring B = poly[x]; field QQ;")


def test_section_script():
    results, status = run(SECTION_SCRIPT)
    assert status == 0
    emitted = results[0]["value"]
    assert emitted["kind"] == "element"
    R = RingPresentation(Field(), ["x1", "x2"], ["x1^2 - x1", "x2^2 - x2"])
    assert R.equal(R(emitted["value"]), R(O.SECTION_IDEMPOTENT))
    assert results[1]["passed"]


def test_false_check_reports_counterexample():
    results, status = run("ring B = poly[x]/(x^2);\nlet a = nf(B, \"x^3 + x\");\n"
                          "check a == \"x + 1\";\n")
    assert status == 1
    assert results[-1]["passed"] is False
    assert results[-1]["counterexample"] == {"left": "x", "right": "x + 1"}


def test_module_check_uses_isomorphism():
    text = ("ring B = poly[x]/(x^2);\nmodule M = coker [[x]] over B;\n"
            "module N = coker [[x^2]] over B;\ncheck M == N;\ncheck ext(M, M, 1) == M;\n")
    results, status = run(text)
    assert status == 1
    assert [r["passed"] for r in results] == [False, True]
    assert results[0]["counterexample"]["search"] == "non_iso"


def test_errors_are_structured():
    results, status = run("ring B = poly[x];\nemit nope(B);\n")
    assert status == 2
    assert results[-1]["kind"] == "error" and results[-1]["line"] == 2


def test_field_flag_applies_without_field_line():
    results, _ = run('ring B = poly[x];\nemit nf(B, "6*x");\n', field="GF5")
    assert results[0]["value"]["value"] == "x"


def test_execution_is_deterministic():
    assert run(SECTION_SCRIPT) == run(SECTION_SCRIPT)


def test_rigid_commands():
    text = """
ring A = poly[x];
ring C = poly[x]/(x^2);
map u : A -> C (x) [finite];
let R = rdc(C);
let t = rigid-trace(u);
check morita(R);
emit t;
"""
    results, status = run(text)
    assert status == 0, results
    assert results[-1]["value"]["kind"] == "rigid_trace"


def test_main_run_and_json(tmp_path, capsys):
    src = tmp_path / "s.rc"
    src.write_text(SECTION_SCRIPT)
    out = tmp_path / "o.json"
    assert main(["run", str(src), "--json", str(out), "--window", "4"]) == 0
    data = json.loads(out.read_text())
    assert data[1]["passed"]
    assert "1/1 checks passed" in capsys.readouterr().out


def test_main_parse_error_exit(tmp_path, capsys):
    src = tmp_path / "bad.rc"
    src.write_text("ring B = poly[x]\n")
    assert main(["run", str(src)]) == 2
    assert json.loads(capsys.readouterr().out)[0]["type"] == "ParseError"


# --- round trip ---------------------------------------------------------------------------

idents = st.from_regex(r"[a-z][a-z0-9]{0,3}", fullmatch=True).filter(lambda s: s not in KEYWORDS)
var_names = st.sampled_from(["x", "y", "z", "t"])
atoms = st.one_of(var_names, st.integers(1, 9).map(str))
monomial = st.lists(st.one_of(atoms, st.tuples(var_names, st.integers(2, 4)).map(
    lambda p: f"{p[0]}^{p[1]}")), min_size=1, max_size=3).map("*".join)
poly_text = st.tuples(st.booleans(), st.lists(st.tuples(st.sampled_from("+-"), monomial),
                                              max_size=2), monomial).map(
    lambda t: ("-" if t[0] else "") + t[2] + "".join(s + m for s, m in t[1]))
polys = st.lists(poly_text, max_size=3).map(tuple)

exprs = st.recursive(
    st.one_of(idents.map(Name), st.integers(-50, 50).map(Int),
              st.from_regex(r"[a-z0-9 ^*+-]{0,8}", fullmatch=True).map(Str)),
    lambda inner: st.one_of(
        st.lists(inner, max_size=3).map(lambda xs: ListExpr(tuple(xs))),
        st.tuples(st.sampled_from(sorted(COMMANDS)), st.lists(inner, max_size=3)).map(
            lambda t: Call(t[0], tuple(t[1])))),
    max_leaves=6)

statements = st.one_of(
    st.tuples(idents, st.lists(var_names, max_size=3, unique=True), polys, polys).map(
        lambda t: RingDecl(t[0], tuple(t[1]), t[2], t[3])),
    st.tuples(idents, idents, idents, polys, st.lists(st.sampled_from(["finite", "localization"]),
                                                      max_size=2, unique=True)).map(
        lambda t: MapDecl(t[0], t[1], t[2], t[3], tuple(t[4]))),
    st.tuples(idents, st.integers(1, 2), st.integers(1, 2), idents).flatmap(
        lambda t: st.lists(st.lists(poly_text, min_size=t[2], max_size=t[2]).map(tuple),
                           min_size=t[1], max_size=t[1]).map(
            lambda rows: ModuleDecl(t[0], tuple(rows), t[3]))),
    st.tuples(idents, exprs).map(lambda t: Let(*t)),
    st.tuples(exprs, st.one_of(st.none(), exprs)).map(lambda t: Check(*t)),
    exprs.map(Emit),
)


@given(st.one_of(st.none(), st.sampled_from([0, 2, 7])), st.lists(statements, max_size=5))
def test_parse_print_round_trip(p, body):
    stmts = ([FieldDecl(p)] if p is not None else []) + body
    ast = ScriptAST(tuple(stmts))
    assert parse_script(format_script(ast)) == ast
