"""Lexer, parser, AST and canonical renderer for ``.msx`` scripts.

A script is a sequence of statements separated by newlines or ``;``::

    chart Z(n=2, k=1)
    let v = vf{x1: 1, y1: x2^2}
    obs f = momentum(v)
    ham X = solve(f)
    verify pbexact(n=2, k=1, trials=10, seed=1)
    emit f, X

Names are resolved while parsing: every name in an expression must be a
binding made earlier in the script or a coordinate of the current chart.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator

from ..errors import BadDimensions, ScriptSyntaxError, UnboundName
from ..spaces import DSL_NAMES, SpaceKind, make_chart

__all__ = [
    "KEYWORDS",
    "FUNCTIONS",
    "Token",
    "tokenize",
    "Num",
    "Name",
    "Unary",
    "BinOp",
    "Call",
    "FieldLit",
    "MatLit",
    "ChartDecl",
    "Binding",
    "Verify",
    "Emit",
    "Script",
    "Scope",
    "parse",
    "render",
    "render_expr",
]

KEYWORDS = ("chart", "let", "obs", "ham", "bracket", "map", "verify", "emit")

# name -> (min args, max args)
FUNCTIONS = {
    "momentum": (1, 1),
    "tensorial": (1, 1),
    "solve": (1, 1),
    "closed": (1, 1),
    "euler": (0, 0),
    "Theta": (0, 1),
    "theta": (0, 0),
    "d": (1, 1),
    "wedge": (2, 2),
    "hook": (2, 2),
    "lie": (2, 2),
    "power": (2, 2),
    "bracket": (2, 3),
    "commutator": (2, 2),
    "phi": (2, 2),
    "pullback": (2, 2),
    "V": (2, 2),
    "pair": (2, 2),
    "classify": (1, 1),
    "symbreak": (1, 1),
    "split": (1, 1),
}

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<newline>\n)
  | (?P<number>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()\[\]{},:=;.])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(source: str) -> list:
    tokens = []
    line, start = 1, 0
    pos = 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None:
            raise ScriptSyntaxError(f"unexpected character {source[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "newline":
            tokens.append(Token("newline", "\n", line, pos - start + 1))
            line, start = line + 1, m.end()
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, pos - start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - start + 1))
    return tokens


# -- AST ----------------------------------------------------------------------------
# Positions are carried for error reporting but ignored by equality.


def _pos():
    return field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class Num:
    value: int
    line: int = _pos()
    column: int = _pos()


@dataclass(frozen=True)
class Name:
    id: str
    line: int = _pos()
    column: int = _pos()


@dataclass(frozen=True)
class Unary:
    op: str
    operand: object
    line: int = _pos()
    column: int = _pos()


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    line: int = _pos()
    column: int = _pos()


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple
    line: int = _pos()
    column: int = _pos()


@dataclass(frozen=True)
class FieldLit:
    components: tuple  # ((coordinate, expr), ...)
    line: int = _pos()
    column: int = _pos()


@dataclass(frozen=True)
class MatLit:
    rows: tuple
    line: int = _pos()
    column: int = _pos()


@dataclass(frozen=True)
class ChartDecl:
    space: str  # script spelling, e.g. "Jstar.kt"
    n: int
    k: int
    line: int = _pos()
    column: int = _pos()

    @property
    def kind(self) -> SpaceKind:
        return SpaceKind(DSL_NAMES[self.space], self.n, self.k)


@dataclass(frozen=True)
class Binding:
    keyword: str
    name: str
    expr: object
    line: int = _pos()
    column: int = _pos()


@dataclass(frozen=True)
class Verify:
    suite: str
    params: tuple  # ((key, int), ...)
    line: int = _pos()
    column: int = _pos()


@dataclass(frozen=True)
class Emit:
    names: tuple
    line: int = _pos()
    column: int = _pos()


@dataclass(frozen=True)
class Script:
    statements: tuple = ()

    def __iter__(self) -> Iterator:
        return iter(self.statements)

    def __len__(self) -> int:
        return len(self.statements)


@dataclass
class Scope:
    """Names visible to the parser; kept between calls by the repl."""

    chart: SpaceKind | None = None
    bound: set = field(default_factory=set)

    def coordinates(self) -> tuple:
        return make_chart(self.chart).names if self.chart is not None else ()

    def knows(self, name: str) -> bool:
        return name in self.bound or name in self.coordinates()


# -- parser -------------------------------------------------------------------------

_VERIFY_KEYS = ("n", "k", "m", "trials", "seed")


class _Parser:
    def __init__(self, source: str, scope: Scope):
        self.tokens = tokenize(source)
        self.i = 0
        self.scope = scope

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        return ScriptSyntaxError(message, tok.line, tok.column)

    def advance(self) -> Token:
        tok = self.tok
        self.i += 1
        return tok

    def at(self, text: str) -> bool:
        return self.tok.kind == "op" and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            shown = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {shown!r}")
        return self.advance()

    def expect_name(self) -> Token:
        if self.tok.kind != "name":
            raise self.error(f"expected a name, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def expect_int(self) -> int:
        if self.tok.kind != "number":
            raise self.error(f"expected an integer, found {self.tok.text or 'end of input'!r}")
        return int(self.advance().text)

    def at_end_of_statement(self) -> bool:
        return self.tok.kind in ("newline", "eof") or self.at(";")

    # statements

    def script(self) -> Script:
        out = []
        while self.tok.kind != "eof":
            if self.tok.kind == "newline" or self.at(";"):
                self.advance()
                continue
            out.append(self.statement())
            if not self.at_end_of_statement():
                raise self.error(f"unexpected {self.tok.text!r} after statement")
        return Script(tuple(out))

    def statement(self):
        tok = self.tok
        if tok.kind != "name" or tok.text not in KEYWORDS:
            raise self.error(f"expected a statement keyword, found {tok.text!r}")
        self.advance()
        if tok.text == "chart":
            return self.chart(tok)
        if tok.text == "verify":
            return self.verify(tok)
        if tok.text == "emit":
            return self.emit(tok)
        return self.binding(tok)

    def keyword_args(self, allowed) -> list:
        out = []
        self.expect("(")
        while not self.at(")"):
            key = self.expect_name()
            if key.text not in allowed:
                raise self.error(f"unknown parameter {key.text!r}", key)
            if any(k == key.text for k, _ in out):
                raise self.error(f"parameter {key.text!r} given twice", key)
            self.expect("=")
            out.append((key.text, self.expect_int()))
            if not self.at(")"):
                self.expect(",")
        self.expect(")")
        return out

    def chart(self, tok: Token) -> ChartDecl:
        head = self.expect_name()
        space = head.text
        if self.at("."):
            self.advance()
            space += "." + self.expect_name().text
        if space not in DSL_NAMES:
            raise self.error(f"unknown space {space!r}", head)
        args = dict(self.keyword_args(("n", "k")))
        if "n" not in args:
            raise self.error("chart needs n", head)
        decl = ChartDecl(space, args["n"], args.get("k", 0), tok.line, tok.column)
        try:
            self.scope.chart = decl.kind
        except BadDimensions as exc:
            raise ScriptSyntaxError(str(exc), tok.line, tok.column) from None
        return decl

    def verify(self, tok: Token) -> Verify:
        first = self.expect_name()
        suite = first.text
        # suite ids may contain hyphens, e.g. rhoZ-welldef
        while self.at("-") and self.tokens[self.i + 1].kind == "name":
            self.advance()
            suite += "-" + self.advance().text
        params = self.keyword_args(_VERIFY_KEYS) if self.at("(") else []
        return Verify(suite, tuple(params), tok.line, tok.column)

    def emit(self, tok: Token) -> Emit:
        names = []
        while True:
            name = self.expect_name()
            if name.text not in self.scope.bound:
                raise UnboundName(name.text, name.line, name.column)
            names.append(name.text)
            if not self.at(","):
                break
            self.advance()
        return Emit(tuple(names), tok.line, tok.column)

    def binding(self, tok: Token) -> Binding:
        name = self.expect_name()
        if name.text in KEYWORDS or name.text in FUNCTIONS:
            raise self.error(f"{name.text!r} is reserved", name)
        if name.text in self.scope.coordinates():
            raise self.error(f"{name.text!r} is a coordinate", name)
        self.expect("=")
        expr = self.expr()
        if self.scope.chart is None:
            raise self.error("no chart declared", tok)
        self.scope.bound.add(name.text)
        return Binding(tok.text, name.text, expr, tok.line, tok.column)

    # expressions: sum > product > unary > power > atom

    def expr(self):
        left = self.product()
        while self.at("+") or self.at("-"):
            op = self.advance()
            left = BinOp(op.text, left, self.product(), op.line, op.column)
        return left

    def product(self):
        left = self.unary()
        while self.at("*") or self.at("/"):
            op = self.advance()
            left = BinOp(op.text, left, self.unary(), op.line, op.column)
        return left

    def unary(self):
        if self.at("-"):
            op = self.advance()
            return Unary("-", self.unary(), op.line, op.column)
        return self.power()

    def power(self):
        base = self.atom()
        if self.at("^"):
            op = self.advance()
            return BinOp("^", base, self.unary(), op.line, op.column)
        return base

    def atom(self):
        tok = self.tok
        if tok.kind == "number":
            self.advance()
            return Num(int(tok.text), tok.line, tok.column)
        if self.at("("):
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        if tok.kind != "name":
            raise self.error(f"unexpected {tok.text or 'end of input'!r}")
        self.advance()
        if tok.text == "vf" and self.at("{"):
            return self.field_literal(tok)
        if tok.text == "mat" and self.at("["):
            return self.matrix_literal(tok)
        if self.at("("):
            return self.call(tok)
        if not self.scope.knows(tok.text):
            raise UnboundName(tok.text, tok.line, tok.column)
        return Name(tok.text, tok.line, tok.column)

    def call(self, tok: Token) -> Call:
        if tok.text not in FUNCTIONS:
            raise UnboundName(tok.text, tok.line, tok.column)
        self.expect("(")
        args = []
        while not self.at(")"):
            args.append(self.expr())
            if not self.at(")"):
                self.expect(",")
        self.expect(")")
        lo, hi = FUNCTIONS[tok.text]
        if not lo <= len(args) <= hi:
            want = str(lo) if lo == hi else f"{lo} to {hi}"
            raise self.error(f"{tok.text} takes {want} arguments, got {len(args)}", tok)
        return Call(tok.text, tuple(args), tok.line, tok.column)

    def field_literal(self, tok: Token) -> FieldLit:
        self.expect("{")
        comps = []
        coords = self.scope.coordinates()
        while not self.at("}"):
            key = self.expect_name()
            if key.text not in coords:
                raise self.error(f"{key.text!r} is not a coordinate of the current chart", key)
            if any(c == key.text for c, _ in comps):
                raise self.error(f"component {key.text!r} given twice", key)
            self.expect(":")
            comps.append((key.text, self.expr()))
            if not self.at("}"):
                self.expect(",")
        self.expect("}")
        return FieldLit(tuple(comps), tok.line, tok.column)

    def matrix_literal(self, tok: Token) -> MatLit:
        self.expect("[")
        rows = []
        while not self.at("]"):
            self.expect("[")
            row = [self.expr()]
            while self.at(","):
                self.advance()
                row.append(self.expr())
            self.expect("]")
            rows.append(tuple(row))
            if not self.at("]"):
                self.expect(",")
        self.expect("]")
        if rows and len({len(r) for r in rows}) != 1:
            raise self.error("matrix rows differ in length", tok)
        return MatLit(tuple(rows), tok.line, tok.column)


def parse(source: str, scope: Scope | None = None) -> Script:
    """Parse ``source``; ``scope`` is updated in place when given."""
    return _Parser(source, scope if scope is not None else Scope()).script()


# -- canonical rendering ------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_UNARY = 3
_ATOM = 5


def _prec(e) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Unary):
        return _UNARY
    return _ATOM


def _wrap(e, needed: int) -> str:
    text = render_expr(e)
    return f"({text})" if _prec(e) < needed else text


def render_expr(e) -> str:
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Name):
        return e.id
    if isinstance(e, Unary):
        return "-" + _wrap(e.operand, _UNARY)
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        if e.op == "^":
            return f"{_wrap(e.left, _ATOM)}^{_wrap(e.right, _UNARY)}"
        return f"{_wrap(e.left, p)} {e.op} {_wrap(e.right, p + 1)}"
    if isinstance(e, Call):
        return f"{e.func}({', '.join(render_expr(a) for a in e.args)})"
    if isinstance(e, FieldLit):
        return "vf{" + ", ".join(f"{c}: {render_expr(v)}" for c, v in e.components) + "}"
    if isinstance(e, MatLit):
        rows = ("[" + ", ".join(render_expr(v) for v in row) + "]" for row in e.rows)
        return "mat[" + ", ".join(rows) + "]"
    raise TypeError(f"not an expression node: {e!r}")


def _render_statement(s) -> str:
    if isinstance(s, ChartDecl):
        args = f"n={s.n}" if s.space == "LM" else f"n={s.n}, k={s.k}"
        return f"chart {s.space}({args})"
    if isinstance(s, Binding):
        return f"{s.keyword} {s.name} = {render_expr(s.expr)}"
    if isinstance(s, Verify):
        if not s.params:
            return f"verify {s.suite}"
        return f"verify {s.suite}(" + ", ".join(f"{k}={v}" for k, v in s.params) + ")"
    if isinstance(s, Emit):
        return "emit " + ", ".join(s.names)
    raise TypeError(f"not a statement: {s!r}")


def render(script: Script) -> str:
    return "".join(_render_statement(s) + "\n" for s in script)
