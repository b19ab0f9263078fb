"""Observables, structure-equation solving and Hamiltonian vector fields.

The structure equation ``X hook dP = -df`` is linear in the components of X.
:class:`StructureSolver` matches coefficients against the (form index, value
index) basis and eliminates with the Bareiss scheme, so inconsistency of the
system is exactly non-allowability of ``f``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import (
    BadDegree,
    BadDimensions,
    ChartMismatch,
    NotAllowable,
    NotProjectable,
    OutOfCharacterizedRegime,
    SingularStructure,
)
from .exterior import (
    Chart,
    VField,
    VForm,
    as_scalar,
    ext_d,
    interior,
    wedge,
    wedge_power,
)
from .linsolve import BareissEliminator
from .scalar import ZERO, Scalar, var
from .spaces import (
    SpaceKind,
    coordinate_field,
    frame,
    make_chart,
    mom,
    theta_LVY,
    volume_forms,
    x,
    y,
)

__all__ = [
    "ProjectableField",
    "Observable",
    "StructureSolver",
    "solve_structure",
    "momentum_observable_Z",
    "hamiltonian_vf_Z",
    "tensorial_function",
    "tensorial_from_vf_LVY",
    "hamiltonian_vf_LVY",
    "HF1Classification",
    "classify_HF1_LVY",
    "tensorial_LM",
    "natural_lift_LM",
    "StructureReport",
    "solve_structure_m",
    "euler_projection",
]


@dataclass(frozen=True)
class ProjectableField:
    """A vector field ``v^i(x) d/dx^i + v^A(x, y) d/dy^A`` on Y."""

    n: int
    k: int
    vi: tuple
    vA: tuple

    def __post_init__(self):
        vi = tuple(as_scalar(c) for c in self.vi)
        vA = tuple(as_scalar(c) for c in self.vA)
        if len(vi) != self.n or len(vA) != self.k:
            raise BadDimensions("projectable field has the wrong number of components")
        allowed = {x(i) for i in range(1, self.n + 1)} | {y(a) for a in range(1, self.k + 1)}
        for c in vi + vA:
            stray = set(c.variables) - allowed
            if stray:
                raise BadDimensions(f"component depends on non-Y variables {sorted(stray)}")
        for c in vi:
            if any(c.partial(y(a)) != 0 for a in range(1, self.k + 1)):
                raise NotProjectable("a base component depends on the fiber coordinates")
        object.__setattr__(self, "vi", vi)
        object.__setattr__(self, "vA", vA)

    @classmethod
    def from_mapping(cls, n: int, k: int, comps: Mapping[str, object]) -> "ProjectableField":
        names = {x(i) for i in range(1, n + 1)} | {y(a) for a in range(1, k + 1)}
        unknown = set(comps) - names
        if unknown:
            raise BadDimensions(f"not coordinates of Y: {sorted(unknown)}")
        return cls(
            n,
            k,
            tuple(comps.get(x(i), 0) for i in range(1, n + 1)),
            tuple(comps.get(y(a), 0) for a in range(1, k + 1)),
        )

    @classmethod
    def zero(cls, n: int, k: int) -> "ProjectableField":
        return cls(n, k, (0,) * n, (0,) * k)

    def components(self) -> dict:
        out = {x(i): c for i, c in enumerate(self.vi, start=1)}
        out.update({y(a): c for a, c in enumerate(self.vA, start=1)})
        return out

    def on(self, chart: Chart) -> VField:
        """The same components viewed as a field on a chart containing x and y."""
        return VField(chart, self.components())

    def bracket(self, other: "ProjectableField") -> "ProjectableField":
        if (self.n, self.k) != (other.n, other.k):
            raise BadDimensions("fields live over different Y")
        chart = make_chart(SpaceKind("Y", self.n, self.k))
        br = self.on(chart).bracket(other.on(chart))
        return ProjectableField.from_mapping(self.n, self.k, br.components)

    def __add__(self, other: "ProjectableField") -> "ProjectableField":
        return ProjectableField(self.n, self.k,
                                tuple(a + b for a, b in zip(self.vi, other.vi)),
                                tuple(a + b for a, b in zip(self.vA, other.vA)))

    def __neg__(self) -> "ProjectableField":
        return ProjectableField(self.n, self.k, tuple(-a for a in self.vi),
                                tuple(-a for a in self.vA))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProjectableField):
            return NotImplemented
        return ((self.n, self.k) == (other.n, other.k)
                and all(a == b for a, b in zip(self.vi + self.vA, other.vi + other.vA)))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Observable:
    space: SpaceKind
    body: VForm

    def __eq__(self, other) -> bool:
        if not isinstance(other, Observable):
            return NotImplemented
        return self.space == other.space and self.body == other.body

    __hash__ = None


def _body(f) -> VForm:
    return f.body if isinstance(f, Observable) else f


class StructureSolver:
    """Solve ``X hook dP = rhs`` for a fixed form ``dP``.

    The contraction matrix is eliminated once; every call to :meth:`solve`
    replays the recorded row operations on a new right-hand side.
    """

    def __init__(self, d_potential: VForm):
        if d_potential.p == 0:
            raise BadDegree("the structure form must have positive degree")
        self.form = d_potential
        chart = d_potential.chart
        self.chart = chart
        cols = [interior(coordinate_field(chart, s), d_potential) for s in chart.names]
        keys = sorted({key for col in cols for key in col.terms})
        self._keys = keys
        self._key_set = set(keys)
        index = {key: i for i, key in enumerate(keys)}
        rows = [dict() for _ in keys]
        for s, col in enumerate(cols):
            for key, c in col.terms.items():
                rows[index[key]][s] = c.constant_value() if c.is_constant() else c
        self._elim = BareissEliminator(rows, chart.dim)

    @property
    def kernel_dimension(self) -> int:
        return self._elim.kernel_dimension

    def is_nondegenerate(self) -> bool:
        return self.kernel_dimension == 0

    def solve_contraction(self, rhs: VForm) -> VField:
        if rhs.chart != self.chart:
            raise ChartMismatch(f"{rhs.chart.name} vs {self.chart.name}")
        if rhs.terms and (rhs.p, rhs.r) != (self.form.p - 1, self.form.r):
            raise BadDegree("right-hand side has the wrong degrees")
        if self.kernel_dimension:
            raise SingularStructure(
                f"contraction map has a kernel of dimension {self.kernel_dimension}"
            )
        if any(key not in self._key_set for key in rhs.terms):
            raise NotAllowable("the observable's differential has terms no contraction produces")
        b = [rhs.terms.get(key, ZERO) for key in self._keys]
        sol, ok = self._elim.solve(b, zero=ZERO)
        if not ok:
            raise NotAllowable("the structure equation is inconsistent")
        names = self.chart.names
        return VField(self.chart, {names[s]: as_scalar(c) for s, c in enumerate(sol)})

    def solve(self, f) -> VField:
        """Hamiltonian vector field of ``f``: the X with ``X hook dP = -df``."""
        return self.solve_contraction(-ext_d(_body(f)))

    def is_allowable(self, f) -> bool:
        try:
            self.solve(f)
        except NotAllowable:
            return False
        return True


def solve_structure(d_potential: VForm, f) -> VField:
    return StructureSolver(d_potential).solve(f)


def _check_dims(v: ProjectableField, n: int, k: int) -> None:
    if not isinstance(v, ProjectableField):
        raise NotProjectable("expected a projectable field")
    if (v.n, v.k) != (n, k):
        raise BadDimensions(f"field over Y({v.n},{v.k}) used with n={n}, k={k}")


# -- affine multiphase space -------------------------------------------------


def momentum_observable_Z(v: ProjectableField, n: int, k: int) -> Observable:
    _check_dims(v, n, k)
    kind = SpaceKind("Z", n, k)
    chart = make_chart(kind)
    faces = volume_forms(chart, 1)
    ridges = volume_forms(chart, 2)
    p = var("p")
    body = VForm.zero(chart, n - 1, 0)
    for i in range(1, n + 1):
        coeff = p * v.vi[i - 1]
        for a in range(1, k + 1):
            coeff = coeff + var(mom(i, a)) * v.vA[a - 1]
        if not coeff.is_zero():
            body = body + faces[(i,)] * coeff
    for (i, j), ridge in ridges.items():
        vj = v.vi[j - 1]
        if vj.is_zero():
            continue
        for a in range(1, k + 1):
            dy = VForm.differential(chart, y(a))
            body = body - wedge(dy, ridge) * (var(mom(i, a)) * vj)
    return Observable(kind, body)


def hamiltonian_vf_Z(v: ProjectableField, n: int, k: int) -> VField:
    _check_dims(v, n, k)
    chart = make_chart(SpaceKind("Z", n, k))
    comps: dict = {}
    for i in range(1, n + 1):
        comps[x(i)] = v.vi[i - 1]
    for a in range(1, k + 1):
        comps[y(a)] = v.vA[a - 1]
    div = ZERO
    for j in range(1, n + 1):
        div = div + v.vi[j - 1].partial(x(j))
    for i in range(1, n + 1):
        for a in range(1, k + 1):
            c = -var(mom(i, a)) * div
            for j in range(1, n + 1):
                c = c + var(mom(j, a)) * v.vi[i - 1].partial(x(j))
            for b in range(1, k + 1):
                c = c - var(mom(i, b)) * v.vA[b - 1].partial(y(a))
            comps[mom(i, a)] = c
    cp = var("p") * div
    for i in range(1, n + 1):
        for a in range(1, k + 1):
            cp = cp + var(mom(i, a)) * v.vA[a - 1].partial(x(i))
    comps["p"] = -cp
    return VField(chart, comps)


def euler_projection(f) -> VForm:
    """E hook df on Z, which fixes every momentum observable."""
    from .spaces import euler_field

    body = _body(f)
    chart = body.chart
    return interior(euler_field(chart.n, chart.k), ext_d(body))


# -- adapted frame bundle ----------------------------------------------------


def tensorial_function(n: int, k: int, comps: Mapping[str, object]) -> Observable:
    """Equivariant function of an arbitrary (not necessarily projectable) field on Y.

    Its components are the coframe applied to the field.
    """
    kind = SpaceKind("LVY", n, k)
    chart = make_chart(kind)
    fi = [as_scalar(comps.get(x(i), 0)) for i in range(1, n + 1)]
    fA = [as_scalar(comps.get(y(a), 0)) for a in range(1, k + 1)]
    items = []
    for j in range(1, n + 1):
        for i in range(1, n + 1):
            items.append(((), (j,), fi[i - 1] * var(frame(j, i))))
    for b in range(1, k + 1):
        for a in range(1, k + 1):
            items.append(((), (n + b,), fA[a - 1] * var(frame(n + b, n + a))))
        for i in range(1, n + 1):
            items.append(((), (n + b,), fi[i - 1] * var(frame(n + b, i))))
    return Observable(kind, VForm.from_terms(chart, 0, 1, items))


def tensorial_from_vf_LVY(v: ProjectableField, n: int, k: int) -> Observable:
    _check_dims(v, n, k)
    return tensorial_function(n, k, v.components())


def hamiltonian_vf_LVY(v: ProjectableField, n: int, k: int) -> VField:
    _check_dims(v, n, k)
    chart = make_chart(SpaceKind("LVY", n, k))
    comps: dict = {}
    for i in range(1, n + 1):
        comps[x(i)] = v.vi[i - 1]
    for a in range(1, k + 1):
        comps[y(a)] = v.vA[a - 1]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            c = ZERO
            for kk in range(1, n + 1):
                c = c - v.vi[kk - 1].partial(x(j)) * var(frame(i, kk))
            comps[frame(i, j)] = c
    for a in range(1, k + 1):
        for b in range(1, k + 1):
            c = ZERO
            for cc in range(1, k + 1):
                c = c - v.vA[cc - 1].partial(y(b)) * var(frame(n + a, n + cc))
            comps[frame(n + a, n + b)] = c
        for i in range(1, n + 1):
            c = ZERO
            for j in range(1, n + 1):
                c = c - v.vi[j - 1].partial(x(i)) * var(frame(n + a, j))
            for b in range(1, k + 1):
                c = c - v.vA[b - 1].partial(x(i)) * var(frame(n + a, n + b))
            comps[frame(n + a, i)] = c
    return VField(chart, comps)


@dataclass(frozen=True, eq=False)
class HF1Classification:
    """Outcome of matching an observable against the allowable template.

    For allowable inputs ``g_base``, ``g_fiber``, ``xi`` and ``zeta`` hold the
    parts ``g^j(x)``, ``g^A(x, y)``, ``xi^i(x)`` and ``zeta^B(x, y)``.
    """

    allowable: bool
    g_base: tuple = ()
    g_fiber: tuple = ()
    xi: tuple = ()
    zeta: tuple = ()
    reason: str = ""


def _affine_split(s: Scalar, frame_vars: set):
    """Write s = c + sum_v a_v v over frame variables v, or return None."""
    if set(s.den.variables) & frame_vars:
        return None
    const_terms: dict = {}
    linear: dict = {}
    for mono, c in s.num.terms.items():
        hits = [(v, e) for v, e in mono if v in frame_vars]
        if not hits:
            const_terms[mono] = c
        elif len(hits) == 1 and hits[0][1] == 1:
            rest = tuple(ve for ve in mono if ve[0] != hits[0][0])
            linear.setdefault(hits[0][0], {})[rest] = c
        else:
            return None
    from .scalar import Polynomial

    den = s.den
    constant = Scalar(Polynomial(const_terms), den)
    coeffs = {v: Scalar(Polynomial(t), den) for v, t in linear.items()}
    return constant, coeffs


def classify_HF1_LVY(f, n: int, k: int) -> HF1Classification:
    if n < 2 or k < 2:
        raise OutOfCharacterizedRegime("the template is only established for n >= 2 and k >= 2")
    body = _body(f)
    chart = make_chart(SpaceKind("LVY", n, k))
    if body.chart != chart:
        raise ChartMismatch(f"{body.chart.name} vs {chart.name}")
    if body.terms and (body.p, body.r) != (0, 1):
        raise BadDegree("expected a vector-valued function")
    frame_vars = set(chart.with_role("frame"))
    base_vars = {x(i) for i in range(1, n + 1)}
    y_vars = base_vars | {y(a) for a in range(1, k + 1)}

    def reject(why):
        return HF1Classification(False, reason=why)

    def only(s: Scalar, allowed: set) -> bool:
        return set(s.variables) <= allowed

    comps = {mu: body.terms.get(((), (mu,)), ZERO) for mu in range(1, n + k + 1)}
    g_base = [None] * n
    xi = []
    for i in range(1, n + 1):
        split = _affine_split(comps[i], frame_vars)
        if split is None:
            return reject(f"component {i} is not affine in the frame coordinates")
        c, lin = split
        allowed = {frame(i, j) for j in range(1, n + 1)}
        if set(lin) - allowed:
            return reject(f"component {i} involves frame coordinates outside its row")
        if not only(c, base_vars):
            return reject(f"inhomogeneous part of component {i} depends on more than x")
        xi.append(c)
        for j in range(1, n + 1):
            g = lin.get(frame(i, j), ZERO)
            if not only(g, base_vars):
                return reject("horizontal coefficients depend on more than x")
            if g_base[j - 1] is None:
                g_base[j - 1] = g
            elif g_base[j - 1] != g:
                return reject("horizontal coefficients differ between components")
    g_fiber = [None] * k
    zeta = []
    for b in range(1, k + 1):
        split = _affine_split(comps[n + b], frame_vars)
        if split is None:
            return reject(f"component {n + b} is not affine in the frame coordinates")
        c, lin = split
        allowed = {frame(n + b, i) for i in range(1, n + 1)}
        allowed |= {frame(n + b, n + a) for a in range(1, k + 1)}
        if set(lin) - allowed:
            return reject(f"component {n + b} involves frame coordinates outside its row")
        if not only(c, y_vars):
            return reject(f"inhomogeneous part of component {n + b} depends on frame data")
        zeta.append(c)
        for i in range(1, n + 1):
            if lin.get(frame(n + b, i), ZERO) != g_base[i - 1]:
                return reject("mixed-block coefficients do not match the horizontal ones")
        for a in range(1, k + 1):
            g = lin.get(frame(n + b, n + a), ZERO)
            if not only(g, y_vars):
                return reject("vertical coefficients depend on frame data")
            if g_fiber[a - 1] is None:
                g_fiber[a - 1] = g
            elif g_fiber[a - 1] != g:
                return reject("vertical coefficients differ between components")
    return HF1Classification(True, tuple(g_base), tuple(g_fiber), tuple(xi), tuple(zeta))


# -- linear frame bundle (degree one) -----------------------------------------


def tensorial_LM(f: Sequence, n: int) -> Observable:
    kind = SpaceKind("LM", n)
    chart = make_chart(kind)
    f = [as_scalar(c) for c in f]
    items = [((), (i,), f[j - 1] * var(frame(i, j)))
             for i in range(1, n + 1) for j in range(1, n + 1)]
    return Observable(kind, VForm.from_terms(chart, 0, 1, items))


def natural_lift_LM(f: Sequence, n: int) -> VField:
    f = [as_scalar(c) for c in f]
    if len(f) != n:
        raise BadDimensions("expected n components")
    base = {x(i) for i in range(1, n + 1)}
    for c in f:
        if not set(c.variables) <= base:
            raise BadDimensions("components of a base field depend on x only")
    chart = make_chart(SpaceKind("LM", n))
    comps = {x(i): f[i - 1] for i in range(1, n + 1)}
    for kk in range(1, n + 1):
        for j in range(1, n + 1):
            c = ZERO
            for i in range(1, n + 1):
                c = c - f[i - 1].partial(x(j)) * var(frame(kk, i))
            comps[frame(kk, j)] = c
    return VField(chart, comps)


# -- degree-m structure equation ----------------------------------------------


@dataclass(frozen=True, eq=False)
class StructureReport:
    consistent: bool
    m: int
    lhs: VForm
    rhs: VForm


def solve_structure_m(v: ProjectableField, m: int, n: int, k: int) -> StructureReport:
    """Check ``d(f ^ theta^m) = -X_f hook (dtheta ^ theta^m)`` for the lift of v."""
    if not 0 <= m <= n + k:
        raise BadDegree(f"m must lie in 0..{n + k}")
    theta = theta_LVY(n, k)
    power = wedge_power(theta, m)
    f = tensorial_from_vf_LVY(v, n, k).body
    X = hamiltonian_vf_LVY(v, n, k)
    lhs = ext_d(wedge(f, power))
    rhs = -interior(X, wedge(ext_d(theta), power))
    return StructureReport(lhs == rhs, m, lhs, rhs)
