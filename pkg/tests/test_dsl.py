from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from msx.cli.dsl import (
    BinOp,
    Binding,
    Call,
    ChartDecl,
    Emit,
    FieldLit,
    MatLit,
    Name,
    Num,
    Scope,
    Unary,
    Verify,
    parse,
    render,
    render_expr,
)
from msx.errors import ScriptSyntaxError, UnboundName
from msx.spaces import SpaceKind

SCRIPTS = sorted((Path(__file__).resolve().parent.parent / "scripts").glob("*.msx"))


def test_four_statement_script():
    s = parse("chart Z(n=2,k=1)\nlet v = vf{x1:1}\nobs f = momentum(v)\nham X = solve(f)")
    assert len(s) == 4
    assert s.statements[0] == ChartDecl("Z", 2, 1)
    assert s.statements[1] == Binding("let", "v", FieldLit((("x1", Num(1)),)))
    assert s.statements[3] == Binding("ham", "X", Call("solve", (Name("f"),)))


def test_empty_script():
    assert len(parse("")) == 0
    assert len(parse("\n# only a comment\n;\n")) == 0


def test_unbound_name():
    with pytest.raises(UnboundName) as info:
        parse("ham X = solve(g)")
    assert info.value.name == "g"
    assert (info.value.line, info.value.column) == (1, 15)


def test_unknown_function_is_unbound():
    with pytest.raises(UnboundName):
        parse("chart Z(n=1,k=1)\nlet a = frobnicate(x1)")


def test_syntax_error_positions():
    with pytest.raises(ScriptSyntaxError) as info:
        parse("chart Z(n=1,k=1)\nlet a = (x1 + ")
    assert info.value.line == 2
    with pytest.raises(ScriptSyntaxError) as info:
        parse("chart Z(n=1,k=1)\nlet a = x1 $ 2")
    assert (info.value.line, info.value.column) == (2, 12)


@pytest.mark.parametrize("source", [
    "let a = 1",  # no chart
    "chart Q(n=1,k=1)",
    "chart Z(n=0,k=1)",
    "chart Z(k=1)",
    "chart Z(n=1,k=1)\nlet x1 = 2",
    "chart Z(n=1,k=1)\nlet solve = 2",
    "chart Z(n=1,k=1)\nlet v = vf{x2: 1}",
    "chart Z(n=1,k=1)\nlet v = vf{x1: 1, x1: 2}",
    "chart Z(n=1,k=1)\nlet m = mat[[1, 2], [3]]",
    "chart Z(n=1,k=1)\nlet a = wedge(x1)",
    "verify pbexact(n=2, n=2)",
    "verify pbexact(size=2)",
    "chart Z(n=1,k=1) let a = 1",
])
def test_rejected_sources(source):
    with pytest.raises((ScriptSyntaxError, UnboundName)):
        parse(source)


def test_precedence_and_associativity():
    [stmt] = parse("chart Z(n=1,k=1)\nlet a = -x1^2^3 - 2*p/3 - 1").statements[1:]
    x = Name("x1")
    power = BinOp("^", x, BinOp("^", Num(2), Num(3)))
    left = BinOp("-", Unary("-", power), BinOp("/", BinOp("*", Num(2), Name("p")), Num(3)))
    assert stmt.expr == BinOp("-", left, Num(1))


def test_statement_forms():
    s = parse("chart Jstar.kt(n=2, k=1); let g = mat[[x1, 0]]\nverify rhoZ-welldef(trials=3)\n"
              "verify euler\nemit g")
    assert s.statements[0].kind == SpaceKind("JstarKT", 2, 1)
    assert s.statements[1].expr == MatLit(((Name("x1"), Num(0)),))
    assert s.statements[2] == Verify("rhoZ-welldef", (("trials", 3),))
    assert s.statements[3] == Verify("euler", ())
    assert s.statements[4] == Emit(("g",))


def test_lm_chart_has_no_fiber():
    s = parse("chart LM(n=2)\nlet v = vf{x1: x2}")
    assert render(s) == "chart LM(n=2)\nlet v = vf{x1: x2}\n"


def test_scope_persists_between_calls():
    scope = Scope()
    parse("chart Z(n=1,k=1)\nlet v = vf{y1: 1}", scope)
    s = parse("obs f = momentum(v)", scope)
    assert s.statements[0].expr == Call("momentum", (Name("v"),))


def test_positions_do_not_affect_equality():
    a = parse("chart Z(n=1,k=1)\nlet a = x1+1")
    b = parse("\n\nchart Z( n = 1 , k = 1 )\n\n  let a=x1 + 1")
    assert a == b
    assert a.statements[1].line == 2 and b.statements[1].line == 5


@pytest.mark.parametrize("path", SCRIPTS, ids=lambda p: p.name)
def test_golden_scripts_round_trip(path):
    script = parse(path.read_text())
    assert parse(render(script)) == script
    assert render(parse(render(script))) == render(script)


# -- generated expressions ---------------------------------------------------------

atoms = st.one_of(
    st.integers(min_value=0, max_value=20).map(Num),
    st.sampled_from(["x1", "x2", "y1", "p", "p1_1"]).map(Name),
)


def _extend(children):
    return st.one_of(
        st.builds(BinOp, st.sampled_from(["+", "-", "*", "/", "^"]), children, children),
        st.builds(Unary, st.just("-"), children),
        st.builds(lambda a, b: Call("wedge", (a, b)), children, children),
        st.builds(lambda cs: FieldLit(tuple(zip(["x1", "y1"], cs))), st.lists(children, min_size=1, max_size=2)),
        st.builds(lambda r: MatLit((tuple(r),)), st.lists(children, min_size=1, max_size=3)),
    )


exprs = st.recursive(atoms, _extend, max_leaves=12)


@given(exprs)
def test_render_parse_round_trip(e):
    source = f"chart Z(n=2, k=1)\nlet a = {render_expr(e)}\n"
    script = parse(source)
    assert script.statements[1].expr == e
    assert render(script) == source
