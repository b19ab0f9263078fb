"""Execution of parsed ``.msx`` scripts and their JSON encoding."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..bundlemaps import (
    MomentumLabel,
    SymmetryBreaker,
    V_components,
    connection_to_lambda,
    phi_B_lambda,
    splitting_map,
)
from ..errors import MsxError, ScriptTypeError
from ..exterior import (
    ChartMap,
    VField,
    VForm,
    as_scalar,
    ext_d,
    lie_derivative,
    pair_value,
    pullback,
    wedge,
    wedge_power,
)
from ..hamilton import (
    HF1Classification,
    Observable,
    ProjectableField,
    StructureSolver,
    classify_HF1_LVY,
    hamiltonian_vf_LVY,
    hamiltonian_vf_Z,
    momentum_observable_Z,
    natural_lift_LM,
    tensorial_function,
    tensorial_LM,
)
from ..poisson import (
    BracketResult,
    bracket_degree_m,
    bracket_LM,
    bracket_T1V,
    bracket_Z,
    hook_or_zero,
)
from ..scalar import Scalar, var
from ..spaces import (
    ConnectionCoefficients,
    SpaceKind,
    Theta_gamma,
    Theta_Z,
    euler_field,
    make_chart,
    theta_LM,
    theta_LVY,
    x,
    y,
)
from .dsl import BinOp, Binding, Call, ChartDecl, Emit, FieldLit, MatLit, Name, Num, Script, Unary, Verify
from .suites import ThetaFactory, run_suite

__all__ = ["Matrix", "Covector", "Interpreter", "RunResult", "run", "to_json", "render_value", "dumps", "EXIT_OK", "EXIT_FAILED",
           "EXIT_ERROR"]

EXIT_OK, EXIT_FAILED, EXIT_ERROR = 0, 1, 2


@dataclass(frozen=True)
class Matrix:
    rows: tuple

    @property
    def shape(self) -> tuple:
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)


@dataclass(frozen=True)
class Covector:
    """Components of V(B, lambda), keyed by sorted index tuples."""

    components: dict


# -- JSON encoding ------------------------------------------------------------------


def _coeff(c, order=()) -> dict:
    c = as_scalar(c)
    return {"num": c.num.render(order), "den": c.den.render(order)}


def _form_terms(a: VForm) -> list:
    names = a.chart.names
    return [{"form": [names[i] for i in f], "value": list(v), "coeff": _coeff(c, names)}
            for (f, v), c in a.sorted_terms()]


def to_json(value) -> dict:
    if isinstance(value, Scalar) or isinstance(value, int):
        return {"kind": "scalar", "coeff": _coeff(value)}
    if isinstance(value, VForm):
        return {"kind": "form", "chart": value.chart.name, "degree": value.p,
                "value_degree": value.r, "terms": _form_terms(value)}
    if isinstance(value, Observable):
        return {"kind": "observable", "space": value.space.label, "degree": value.body.p,
                "value_degree": value.body.r, "terms": _form_terms(value.body)}
    if isinstance(value, VField):
        names = value.chart.names
        comps = [{"coord": s, "coeff": _coeff(value.component(s), names)}
                 for s in names if value.component(s) != 0]
        return {"kind": "field", "chart": value.chart.name, "components": comps}
    if isinstance(value, BracketResult):
        out = {"kind": "bracket", "value": to_json(value.value), "holds": value.holds}
        if value.decomposition is not None:
            out["tensorial"] = to_json(value.decomposition[0])
            out["exact"] = to_json(value.decomposition[1])
        return out
    if isinstance(value, ChartMap):
        names = value.target.names
        return {"kind": "map", "source": value.source.name, "target": value.target.name,
                "assignment": [{"coord": s, "coeff": _coeff(value.assignment[s], value.source.names)}
                               for s in names]}
    if isinstance(value, Matrix):
        return {"kind": "matrix", "rows": [[_coeff(c) for c in row] for row in value.rows]}
    if isinstance(value, SymmetryBreaker):
        order = make_chart(SpaceKind("LVY", value.n, value.k)).names
        return {"kind": "symmetry-breaker", "rows": [[_coeff(c, order) for c in row] for row in value.lam]}
    if isinstance(value, HF1Classification):
        out = {"kind": "classification", "allowable": value.allowable}
        if value.allowable:
            for part in ("g_base", "g_fiber", "xi", "zeta"):
                out[part] = [_coeff(c) for c in getattr(value, part)]
        else:
            out["reason"] = value.reason
        return out
    if isinstance(value, Covector):
        return {"kind": "covector", "components": [
            {"index": list(key), "coeff": _coeff(c)} for key, c in sorted(value.components.items())]}
    raise ScriptTypeError(f"cannot encode a {type(value).__name__}")


def render_value(value) -> str:
    """One-line text form used by ``--text`` and the repl."""
    if isinstance(value, (Scalar, VForm, VField)):
        return value.render()
    if isinstance(value, Observable):
        return value.body.render()
    return json.dumps(to_json(value), sort_keys=True)


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


# -- interpreter --------------------------------------------------------------------


def _kind_name(value) -> str:
    return type(value).__name__


_EXPECTED = {
    "obs": (Observable, VForm),
    "ham": (VField,),
    "bracket": (BracketResult, Observable),
    "map": (ChartMap,),
}


@dataclass
class RunResult:
    doc: dict
    exit_code: int
    text: list = field(default_factory=list)  # "name = value" lines for emitted bindings

    def json(self) -> str:
        return dumps(self.doc)


@dataclass
class Interpreter:
    """Statement-by-statement executor; the repl keeps one alive."""

    seed: int = 0
    theta: ThetaFactory | None = None
    chart: SpaceKind | None = None
    values: dict = field(default_factory=dict)
    emitted: list = field(default_factory=list)
    text: list = field(default_factory=list)
    reports: list = field(default_factory=list)

    # statements

    def execute(self, stmt):
        if isinstance(stmt, ChartDecl):
            self.chart = stmt.kind
            return self.chart
        if isinstance(stmt, Binding):
            value = self.eval(stmt.expr)
            want = _EXPECTED.get(stmt.keyword)
            if want and not isinstance(value, want):
                raise ScriptTypeError(f"{stmt.keyword} {stmt.name} bound to a {_kind_name(value)}")
            self.values[stmt.name] = value
            return value
        if isinstance(stmt, Verify):
            params = dict(stmt.params)
            params.setdefault("seed", self.seed)
            report = run_suite(stmt.suite, theta=self.theta, **params)
            self.reports.append(report.to_json())
            return report
        if isinstance(stmt, Emit):
            for name in stmt.names:
                value = self.values[name]
                self.emitted.append({"name": name, "line": stmt.line, "value": to_json(value)})
                self.text.append(f"{name} = {render_value(value)}")
            return [self.values[name] for name in stmt.names]
        raise ScriptTypeError(f"unknown statement {stmt!r}")

    # expressions

    def eval(self, e):
        if isinstance(e, Num):
            return as_scalar(e.value)
        if isinstance(e, Name):
            return self.values[e.id] if e.id in self.values else var(e.id)
        if isinstance(e, Unary):
            return self._neg(self.eval(e.operand))
        if isinstance(e, BinOp):
            return self._binop(e.op, self.eval(e.left), self.eval(e.right))
        if isinstance(e, FieldLit):
            chart = make_chart(self.chart)
            return VField(chart, {c: self._scalar(self.eval(v)) for c, v in e.components})
        if isinstance(e, MatLit):
            return Matrix(tuple(tuple(self._scalar(self.eval(v)) for v in row) for row in e.rows))
        if isinstance(e, Call):
            args = [self.eval(a) for a in e.args]
            return getattr(self, "_fn_" + e.func)(*args)
        raise ScriptTypeError(f"unknown expression {e!r}")

    @staticmethod
    def _scalar(v) -> Scalar:
        if not isinstance(v, Scalar):
            raise ScriptTypeError(f"expected a scalar, got a {_kind_name(v)}")
        return v

    def _neg(self, v):
        if isinstance(v, (Scalar, VForm, VField)):
            return -v
        if isinstance(v, Observable):
            return Observable(v.space, -v.body)
        raise ScriptTypeError(f"cannot negate a {_kind_name(v)}")

    def _binop(self, op, a, b):
        if op == "^":
            b = self._scalar(b)
            if not b.is_constant() or b.constant_value() != int(b.constant_value()):
                raise ScriptTypeError("exponents must be integers")
            return self._scalar(a) ** int(b.constant_value())
        if isinstance(a, Observable) and isinstance(b, Observable) and op in "+-":
            if a.space != b.space:
                raise ScriptTypeError("observables on different spaces")
            return Observable(a.space, a.body + b.body if op == "+" else a.body - b.body)
        if isinstance(a, Scalar) and isinstance(b, Scalar):
            if op == "+":
                return a + b
            if op == "-":
                return a - b
            return a * b if op == "*" else a / b
        same = (VForm, VField)
        if op in "+-" and isinstance(a, same) and type(a) is type(b):
            return a + b if op == "+" else a - b
        if op == "*":
            if isinstance(a, Scalar) and isinstance(b, same + (Observable,)):
                a, b = b, a
            if isinstance(a, same) and isinstance(b, Scalar):
                return a * b
            if isinstance(a, Observable) and isinstance(b, Scalar):
                return Observable(a.space, a.body * b)
        if op == "/" and isinstance(a, same) and isinstance(b, Scalar):
            return a * (as_scalar(1) / b)
        raise ScriptTypeError(f"cannot apply {op!r} to a {_kind_name(a)} and a {_kind_name(b)}")

    # helpers for the built-in functions

    @property
    def dims(self) -> tuple:
        return self.chart.n, self.chart.k

    def _require(self, fn: str, *tags):
        if self.chart.tag not in tags:
            raise ScriptTypeError(f"{fn} is not available on {self.chart.label}")

    def _y_components(self, v) -> dict:
        n, k = self.dims
        if not isinstance(v, VField):
            raise ScriptTypeError(f"expected a vector field, got a {_kind_name(v)}")
        allowed = {x(i) for i in range(1, n + 1)} | {y(a) for a in range(1, k + 1)}
        comps = {s: c for s, c in v.components.items() if c != 0}
        if set(comps) - allowed:
            raise ScriptTypeError("expected a field on Y: only x and y components are allowed")
        return comps

    def _projectable(self, v) -> ProjectableField:
        n, k = self.dims
        return ProjectableField.from_mapping(n, k, self._y_components(v))

    def _base_field(self, v) -> list:
        n = self.chart.n
        comps = self._y_components(v)
        return [comps.get(x(i), 0) for i in range(1, n + 1)]

    def _connection(self, m) -> ConnectionCoefficients:
        if not isinstance(m, Matrix):
            raise ScriptTypeError("expected a k x n matrix of connection coefficients")
        n, k = self.dims
        return ConnectionCoefficients(n, k, m.rows)

    def _label(self, B, lam) -> MomentumLabel:
        if not isinstance(B, Matrix):
            raise ScriptTypeError("expected an n x k matrix")
        lam = self._scalar(lam)
        if not lam.is_constant() or any(not c.is_constant() for row in B.rows for c in row):
            raise ScriptTypeError("momentum labels must be constant")
        rows = [[c.constant_value() for c in row] for row in B.rows]
        return MomentumLabel(rows, lam.constant_value())

    def _potential(self) -> VForm:
        n, k = self.dims
        tag = self.chart.tag
        if tag == "Z":
            return Theta_Z(n, k) if self.theta is None else self.theta(n, k)
        if tag == "LVY":
            return theta_LVY(n, k)
        if tag == "LM":
            return theta_LM(n)
        raise ScriptTypeError(f"no canonical potential on {self.chart.label}")

    def _form(self, a) -> VForm:
        if isinstance(a, Observable):
            return a.body
        if isinstance(a, Scalar):
            return VForm.function(make_chart(self.chart), a)
        if isinstance(a, VForm):
            return a
        raise ScriptTypeError(f"expected a form, got a {_kind_name(a)}")

    # built-in functions, one method per script name

    def _fn_momentum(self, v):
        self._require("momentum", "Z")
        return momentum_observable_Z(self._projectable(v), *self.dims)

    def _fn_tensorial(self, v):
        self._require("tensorial", "LVY", "LM")
        if self.chart.tag == "LM":
            return tensorial_LM(self._base_field(v), self.chart.n)
        return tensorial_function(*self.dims, self._y_components(v))

    def _fn_closed(self, v):
        self._require("closed", "Z", "LVY", "LM")
        if self.chart.tag == "LM":
            return natural_lift_LM(self._base_field(v), self.chart.n)
        if self.chart.tag == "Z":
            return hamiltonian_vf_Z(self._projectable(v), *self.dims)
        return hamiltonian_vf_LVY(self._projectable(v), *self.dims)

    def _fn_solve(self, f):
        return StructureSolver(ext_d(self._potential())).solve(self._form(f))

    def _fn_euler(self):
        self._require("euler", "Z")
        return euler_field(*self.dims)

    def _fn_Theta(self, gamma=None):
        if gamma is None:
            self._require("Theta", "Z")
            return self._potential()
        self._require("Theta", "JstarGunther", "JstarKT")
        return Theta_gamma(self.chart.tag, self._connection(gamma))

    def _fn_theta(self):
        self._require("theta", "LVY", "LM")
        return self._potential()

    def _fn_d(self, a):
        a = self._form(a)
        out = ext_d(a)
        return out if out.terms else VForm.zero(a.chart, a.p + 1, a.r)

    def _fn_wedge(self, a, b):
        return wedge(self._form(a), self._form(b))

    def _fn_hook(self, X, a):
        if not isinstance(X, VField):
            raise ScriptTypeError("hook takes a vector field first")
        return hook_or_zero(X, self._form(a))

    def _fn_lie(self, X, a):
        if not isinstance(X, VField):
            raise ScriptTypeError("lie takes a vector field first")
        return lie_derivative(X, self._form(a))

    def _fn_power(self, a, m):
        m = self._scalar(m)
        if not m.is_constant():
            raise ScriptTypeError("power takes a constant exponent")
        return wedge_power(self._form(a), int(m.constant_value()))

    def _fn_bracket(self, v, w, m=None):
        self._require("bracket", "Z", "LVY", "LM")
        tag = self.chart.tag
        if tag == "LM":
            return bracket_LM(self._base_field(v), self._base_field(w), self.chart.n)
        pv, pw = self._projectable(v), self._projectable(w)
        if tag == "Z":
            return bracket_Z(pv, pw, *self.dims, theta=self._potential())
        if m is None:
            return bracket_T1V(pv, pw, *self.dims)
        m = self._scalar(m)
        if not m.is_constant():
            raise ScriptTypeError("bracket degree must be a constant")
        return bracket_degree_m(pv, pw, int(m.constant_value()), *self.dims)

    def _fn_commutator(self, X, Y):
        if not isinstance(X, VField) or not isinstance(Y, VField):
            raise ScriptTypeError("commutator takes two vector fields")
        return X.bracket(Y)

    def _fn_phi(self, B, lam):
        self._require("phi", "LVY")
        return phi_B_lambda(self._label(B, lam), *self.dims)

    def _fn_pullback(self, m, a):
        if not isinstance(m, ChartMap):
            raise ScriptTypeError("pullback takes a map first")
        return pullback(m, self._form(a))

    def _fn_V(self, B, lam):
        return Covector(V_components(self._label(B, lam)))

    def _fn_pair(self, a, V):
        if not isinstance(V, Covector):
            raise ScriptTypeError("pair takes a covector second")
        return pair_value(self._form(a), V.components)

    def _fn_classify(self, f):
        self._require("classify", "LVY")
        return classify_HF1_LVY(self._form(f), *self.dims)

    def _fn_symbreak(self, gamma):
        return connection_to_lambda(self._connection(gamma))

    def _fn_split(self, gamma):
        return splitting_map(self._connection(gamma))


def _statement_name(stmt) -> str:
    if isinstance(stmt, Binding):
        return f"{stmt.keyword} {stmt.name}"
    return type(stmt).__name__.lower()


def run(script: Script, seed: int = 0, theta: ThetaFactory | None = None) -> RunResult:
    """Execute every statement; stop at the first error."""
    interp = Interpreter(seed=seed, theta=theta)
    error = None
    for stmt in script:
        try:
            interp.execute(stmt)
        except MsxError as exc:
            error = {"type": type(exc).__name__, "message": str(exc),
                     "line": stmt.line, "statement": _statement_name(stmt)}
            break
    failed = any(not r["pass"] for r in interp.reports)
    if error is not None:
        status, code = "error", EXIT_ERROR
    elif failed:
        status, code = "verification-failed", EXIT_FAILED
    else:
        status, code = "ok", EXIT_OK
    doc = {"status": status, "seed": seed, "emitted": interp.emitted, "verify": interp.reports}
    if error is not None:
        doc["error"] = error
    return RunResult(doc, code, interp.text)
