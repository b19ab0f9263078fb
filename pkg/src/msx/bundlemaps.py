"""The adapted group, frames at points, associated-bundle maps and connections.

Matrices are row-major lists of exact rationals.  A frame point stores the
frame matrix ``E`` whose column ``mu`` holds the chart components of frame
vector ``mu``; the coframe is ``E^-1`` and its entries are the adapted frame
chart coordinates ``pi{a}_{b}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from math import factorial
from typing import Mapping, Sequence

from .errors import BadDimensions, PoleAtPoint, ShapeMismatch, SingularFrame
from .exterior import ChartMap, VField, VForm, as_scalar, interior, pair_value, pullback, pushforward, wedge, wedge_power
from .hamilton import ProjectableField, hamiltonian_vf_LVY, hamiltonian_vf_Z, _check_dims
from .linsolve import adjugate, det, det_leibniz, identity, inverse, matmul, permutation_sign
from .scalar import ONE, ZERO, as_rational, var
from .spaces import (
    ConnectionCoefficients,
    SpaceKind,
    Theta_Z,
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
    "ACTION_VARIANTS",
    "RIGHT_ACTIONS",
    "GroupElement",
    "FramePoint",
    "MomentumLabel",
    "SymmetryBreaker",
    "group_action",
    "omega",
    "omega_j",
    "rho_Z",
    "z_coordinates",
    "representative_map",
    "jet_difference",
    "z_difference",
    "phi_B_lambda",
    "V_components",
    "pairing_identity",
    "hamvecphibl",
    "jacobian_components",
    "Theorem72Report",
    "pushforward_theorem72",
    "connection_to_lambda",
    "lambda_closed_form",
    "lambda_to_connection",
    "splitting_map",
    "splitting_at",
    "fundamental_field",
    "FlatConnectionReport",
    "fundamental_vertical_check",
    "vel",
    "jet",
]

ACTION_VARIANTS = ("frame", "coframe", "kn_affine", "kn_linear", "nk_linear", "nk_normalized", "nk_r")
RIGHT_ACTIONS = frozenset({"frame", "coframe"})


def vel(a: int, j: int) -> str:
    """Linear multivelocity coordinate: component of dx^j tensor d/dy^A."""
    return f"v{a}_{j}"


def jet(a: int, j: int) -> str:
    """Jet coordinate: the d/dy^A component of the lift of d/dx^j."""
    return f"g{a}_{j}"


def _matrix(rows, nrows: int, ncols: int, what: str) -> tuple:
    try:
        out = tuple(tuple(as_rational(v) for v in row) for row in rows)
    except TypeError:
        raise ShapeMismatch(f"{what} is not a matrix") from None
    if len(out) != nrows or any(len(r) != ncols for r in out):
        raise ShapeMismatch(f"{what} must be {nrows}x{ncols}")
    return out


def _shape(m) -> tuple:
    return (len(m), len(m[0]) if m else 0)


def _add(a, b):
    return [[u + v for u, v in zip(ra, rb)] for ra, rb in zip(a, b)]


def _scale(a, s):
    return [[as_rational(Fraction(v) * s) for v in row] for row in a]


def _trace(a):
    return sum(a[i][i] for i in range(len(a)))


def _tuple(m):
    return tuple(tuple(as_rational(Fraction(v)) for v in row) for row in m)


@dataclass(frozen=True)
class GroupElement:
    """``(N, K, A)``, standing for the block matrix ``[[N, 0], [A, K]]``."""

    N: tuple
    K: tuple
    A: tuple

    def __post_init__(self):
        n = len(self.N)
        k = len(self.K)
        object.__setattr__(self, "N", _matrix(self.N, n, n, "N"))
        object.__setattr__(self, "K", _matrix(self.K, k, k, "K"))
        object.__setattr__(self, "A", _matrix(self.A, k, n, "A"))
        if det(self.N) == 0:
            raise SingularFrame("N is singular")
        if det(self.K) == 0:
            raise SingularFrame("K is singular")

    @property
    def n(self) -> int:
        return len(self.N)

    @property
    def k(self) -> int:
        return len(self.K)

    @classmethod
    def identity(cls, n: int, k: int) -> "GroupElement":
        return cls(identity(n), identity(k), [[0] * n for _ in range(k)])

    @classmethod
    def from_matrix(cls, m: Sequence[Sequence], n: int) -> "GroupElement":
        size = len(m)
        if any(m[i][j] != 0 for i in range(n) for j in range(n, size)):
            raise ShapeMismatch("matrix is not block lower triangular")
        return cls([row[:n] for row in m[:n]], [row[n:] for row in m[n:]],
                   [row[:n] for row in m[n:]])

    def matrix(self) -> list:
        top = [list(row) + [0] * self.k for row in self.N]
        bottom = [list(a) + list(kk) for a, kk in zip(self.A, self.K)]
        return top + bottom

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        if (self.n, self.k) != (other.n, other.k):
            raise ShapeMismatch("group elements of different sizes")
        return GroupElement.from_matrix(matmul(self.matrix(), other.matrix()), self.n)

    def inverse(self) -> "GroupElement":
        Ni = inverse(self.N)
        Ki = inverse(self.K)
        A = [[-v for v in row] for row in matmul(matmul(Ki, self.A), Ni)]
        return GroupElement(Ni, Ki, A)


@dataclass(frozen=True)
class FramePoint:
    """A vertically adapted frame at a point of Y."""

    n: int
    k: int
    base: Mapping
    E: tuple
    _coframe: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n, k = self.n, self.k
        names = [x(i) for i in range(1, n + 1)] + [y(a) for a in range(1, k + 1)]
        if set(self.base) != set(names):
            raise ShapeMismatch(f"base point needs exactly {names}")
        object.__setattr__(self, "base", {c: as_rational(self.base[c]) for c in names})
        E = _matrix(self.E, n + k, n + k, "frame matrix")
        if any(E[i][j] != 0 for i in range(n) for j in range(n, n + k)):
            raise ShapeMismatch("the last k frame vectors must be vertical")
        if det(E) == 0:
            raise SingularFrame("frame vectors are linearly dependent")
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "_coframe", _tuple(inverse(E)))

    @classmethod
    def coordinate(cls, n: int, k: int, base: Mapping) -> "FramePoint":
        return cls(n, k, base, identity(n + k))

    @classmethod
    def from_chart_point(cls, n: int, k: int, point: Mapping) -> "FramePoint":
        size = n + k
        C = [[0] * size for _ in range(size)]
        for a in range(1, size + 1):
            for b in range(1, size + 1):
                if a <= n < b:
                    continue
                C[a - 1][b - 1] = as_rational(point[frame(a, b)])
        if det(C) == 0:
            raise SingularFrame("coframe matrix is singular")
        base = {c: point[c] for c in [x(i) for i in range(1, n + 1)] + [y(a) for a in range(1, k + 1)]}
        return cls(n, k, base, inverse(C))

    @property
    def coframe(self) -> tuple:
        return self._coframe

    def chart_point(self) -> dict:
        out = dict(self.base)
        C = self._coframe
        for name in make_chart(SpaceKind("LVY", self.n, self.k)).with_role("frame"):
            a, b = (int(s) for s in name[2:].split("_"))
            out[name] = C[a - 1][b - 1]
        return out

    def horizontal_block(self) -> list:
        """Base components of the first n frame vectors."""
        return [list(row[: self.n]) for row in self.E[: self.n]]

    def vertical_block(self) -> list:
        n = self.n
        return [list(row[n:]) for row in self.E[n:]]

    def mixed_block(self) -> list:
        n = self.n
        return [list(row[:n]) for row in self.E[n:]]


@dataclass(frozen=True)
class MomentumLabel:
    B: tuple
    lam: object

    def __post_init__(self):
        rows = len(self.B)
        cols = len(self.B[0]) if rows else 0
        object.__setattr__(self, "B", _matrix(self.B, rows, cols, "B"))
        object.__setattr__(self, "lam", as_rational(self.lam))

    @property
    def n(self) -> int:
        return len(self.B)

    @property
    def k(self) -> int:
        return len(self.B[0])


@dataclass(frozen=True, eq=False)
class SymmetryBreaker:
    """``lam[B-1][i-1]``: Scalars over the adapted frame chart."""

    n: int
    k: int
    lam: tuple

    def __post_init__(self):
        rows = tuple(tuple(as_scalar(c) for c in row) for row in self.lam)
        if len(rows) != self.k or any(len(r) != self.n for r in rows):
            raise BadDimensions("symmetry-breaking map must be k x n")
        object.__setattr__(self, "lam", rows)

    def at(self, w: FramePoint) -> list:
        point = w.chart_point()
        return [[c.evaluate(point) for c in row] for row in self.lam]

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymmetryBreaker):
            return NotImplemented
        return (self.n, self.k) == (other.n, other.k) and all(
            a == b for ra, rb in zip(self.lam, other.lam) for a, b in zip(ra, rb))

    __hash__ = None


# -- group actions -------------------------------------------------------------


def _need(operand, rows: int, cols: int, what: str):
    if not isinstance(operand, (list, tuple)) or _shape(operand) != (rows, cols):
        raise ShapeMismatch(f"{what} operand must be {rows}x{cols}")
    return [[as_rational(v) for v in row] for row in operand]


def group_action(variant: str, g: GroupElement, operand):
    """Apply ``g`` to ``operand``; ``frame`` and ``coframe`` are right actions, the rest left."""
    n, k = g.n, g.k
    if variant == "frame":
        if not isinstance(operand, FramePoint) or (operand.n, operand.k) != (n, k):
            raise ShapeMismatch("frame action needs a matching FramePoint")
        return FramePoint(n, k, operand.base, matmul(operand.E, g.matrix()))
    if variant == "coframe":
        C = _need(operand, n + k, n + k, "coframe")
        return _tuple(matmul(g.inverse().matrix(), C))
    Ni = inverse(g.N)
    Ki = inverse(g.K)
    if variant in ("kn_affine", "kn_linear"):
        W = _need(operand, k, n, variant)
        out = matmul(matmul(g.K, W), Ni)
        if variant == "kn_affine":
            out = _add(out, _scale(matmul(g.A, Ni), -1))
        return _tuple(out)
    if variant in ("nk_linear", "nk_normalized"):
        B = _need(operand, n, k, variant)
        out = matmul(matmul(g.N, B), Ki)
        if variant == "nk_normalized":
            out = _scale(out, Fraction(1) / det(g.N))
        return _tuple(out)
    if variant == "nk_r":
        if not isinstance(operand, MomentumLabel) or (operand.n, operand.k) != (n, k):
            raise ShapeMismatch("nk_r action needs a matching MomentumLabel")
        s = Fraction(1) / det(g.N)
        B = matmul(matmul(g.N, operand.B), Ki)
        shift = _trace(matmul(matmul(operand.B, Ki), g.A))
        return MomentumLabel(_scale(B, s), (operand.lam - shift) * s)
    raise ValueError(f"unknown action variant {variant!r}")


# -- forms built from a frame ------------------------------------------------


def _y_chart(n: int, k: int):
    return make_chart(SpaceKind("Y", n, k))


def _coframe_forms(w: FramePoint) -> list:
    chart = _y_chart(w.n, w.k)
    names = chart.names
    return [
        VForm.from_terms(chart, 1, 0, [([names[b]], (), c) for b, c in enumerate(row) if c != 0])
        for row in w.coframe
    ]


def _unit(chart) -> VForm:
    return VForm.function(chart, ONE)


def omega(w: FramePoint) -> VForm:
    """``(1/n!) eps_{i1..in} e^{i1} ^ ... ^ e^{in}``."""
    forms = _coframe_forms(w)
    chart = _y_chart(w.n, w.k)
    total = VForm.zero(chart, w.n, 0)
    for perm in permutations(range(w.n)):
        term = _unit(chart)
        for i in perm:
            term = wedge(term, forms[i])
        total = total + term * permutation_sign(perm)
    return total * Fraction(1, factorial(w.n))


def omega_j(w: FramePoint, j: int) -> VForm:
    """``(1/(n-1)!) eps_{j i1..i(n-1)} e^{i1} ^ ... ^ e^{i(n-1)}``."""
    forms = _coframe_forms(w)
    chart = _y_chart(w.n, w.k)
    rest = [i for i in range(w.n) if i != j - 1]
    total = VForm.zero(chart, w.n - 1, 0)
    for perm in permutations(rest):
        term = _unit(chart)
        for i in perm:
            term = wedge(term, forms[i])
        total = total + term * permutation_sign((j - 1,) + perm)
    return total * Fraction(1, factorial(w.n - 1))


def rho_Z(w: FramePoint, label: MomentumLabel) -> VForm:
    """``B^j_B eps^B ^ omega(e)_j + lambda omega(e)`` as a constant n-form on the Y chart."""
    n, k = w.n, w.k
    if (label.n, label.k) != (n, k):
        raise ShapeMismatch("label does not match the frame")
    forms = _coframe_forms(w)
    total = omega(w) * label.lam
    for j in range(1, n + 1):
        oj = omega_j(w, j)
        for b in range(1, k + 1):
            c = label.B[j - 1][b - 1]
            if c:
                total = total + wedge(forms[n + b - 1], oj) * c
    return total


def _contract_all(z: VForm, names: Sequence[str]) -> Fraction:
    chart = z.chart
    out = z
    for name in names:
        out = interior(coordinate_field(chart, name), out)
    return out.coefficient(()).constant_value()


def z_coordinates(z: VForm) -> tuple:
    """``(p^j_B, p)`` of a constant n-form on the Y chart, by repeated contraction."""
    n, k = z.chart.n, z.chart.k
    p = _contract_all(z, [x(i) for i in range(1, n + 1)])
    B = []
    for j in range(1, n + 1):
        order = [y(1)] + [x(i) for i in range(1, n + 1) if i != j]
        row = []
        for b in range(1, k + 1):
            order[0] = y(b)
            row.append(_contract_all(z, order) * (-1) ** (j - 1))
        B.append(tuple(row))
    return tuple(B), p


def representative_map(kind: str, w: FramePoint, M) -> dict:
    """Coordinates of the image of ``[w, M]`` under one of the associated-bundle maps.

    ``psi`` and ``psi_hat`` take ``W`` (k x n) and return multivelocity
    ``v{A}_{j}`` or jet ``g{A}_{j}`` coordinates; ``rho_Gu`` and ``rho_KT``
    take ``B`` (n x k) and return ``p{j}_{B}``.
    """
    n, k = w.n, w.k
    F = w.horizontal_block()
    Fi = inverse(F)
    V = w.vertical_block()
    out = dict(w.base)
    if kind in ("psi", "psi_hat"):
        W = _need(M, k, n, kind)
        coeff = _scale(matmul(matmul(V, W), Fi), -1)
        if kind == "psi_hat":
            coeff = _add(coeff, matmul(w.mixed_block(), Fi))
        name = vel if kind == "psi" else jet
        for a in range(1, k + 1):
            for j in range(1, n + 1):
                out[name(a, j)] = as_rational(Fraction(coeff[a - 1][j - 1]))
        return out
    if kind in ("rho_Gu", "rho_KT"):
        B = _need(M, n, k, kind)
        coeff = matmul(matmul(F, B), inverse(V))
        if kind == "rho_KT":
            coeff = _scale(coeff, Fraction(1) / det(F))
        for j in range(1, n + 1):
            for b in range(1, k + 1):
                out[mom(j, b)] = as_rational(Fraction(coeff[j - 1][b - 1]))
        return out
    raise ValueError(f"unknown representative map {kind!r}")


def jet_difference(j1: Mapping, j2: Mapping, n: int, k: int) -> dict:
    """Difference of two jets over the same point, as multivelocity coordinates."""
    out = {c: j1[c] for c in [x(i) for i in range(1, n + 1)] + [y(a) for a in range(1, k + 1)]}
    for c in out:
        if j1[c] != j2[c]:
            raise ShapeMismatch("jets lie over different points")
    for a in range(1, k + 1):
        for j in range(1, n + 1):
            out[vel(a, j)] = as_rational(Fraction(j1[jet(a, j)] - j2[jet(a, j)]))
    return out


def z_difference(w: FramePoint, first: MomentumLabel, second: MomentumLabel) -> tuple:
    """Difference of two points of Z over the same KT point: ``([w, B], (l1 - l2) omega)``."""
    if first.B != second.B:
        raise ShapeMismatch("points lie over different KT points")
    kt = representative_map("rho_KT", w, first.B)
    return kt, omega(w) * (first.lam - second.lam)


# -- the chart map from frames to the affine multiphase space ----------------------


def _frame_blocks(n: int, k: int):
    P = [[var(frame(i, j)) for j in range(1, n + 1)] for i in range(1, n + 1)]
    R = [[var(frame(n + a, n + b)) for b in range(1, k + 1)] for a in range(1, k + 1)]
    Q = [[var(frame(n + a, i)) for i in range(1, n + 1)] for a in range(1, k + 1)]
    return P, R, Q


def phi_B_lambda(label: MomentumLabel, n: int, k: int) -> ChartMap:
    """``w -> rho_Z[w, (B, lambda)]`` in adapted coordinates, built from the adjugate."""
    if (label.n, label.k) != (n, k):
        raise ShapeMismatch("label does not match (n, k)")
    source = make_chart(SpaceKind("LVY", n, k))
    target = make_chart(SpaceKind("Z", n, k))
    P, R, Q = _frame_blocks(n, k)
    adj = adjugate(P)
    detP = det_leibniz(P)
    B = label.B
    assign = {c: var(c) for c in source.names if c[0] in "xy"}
    for j in range(1, n + 1):
        for b in range(1, k + 1):
            total = ZERO
            for i in range(1, n + 1):
                for a in range(1, k + 1):
                    if B[i - 1][a - 1]:
                        total = total + R[a - 1][b - 1] * adj[j - 1][i - 1] * B[i - 1][a - 1]
            assign[mom(j, b)] = total
    total = detP * label.lam
    for i in range(1, n + 1):
        for a in range(1, k + 1):
            if B[i - 1][a - 1]:
                for kk in range(1, n + 1):
                    total = total + Q[a - 1][kk - 1] * adj[kk - 1][i - 1] * B[i - 1][a - 1]
    assign["p"] = total
    return ChartMap(source, target, assign)


def V_components(label: MomentumLabel) -> dict:
    """Sorted-index components of the covector paired against ``wedge^n theta``."""
    n, k = label.n, label.k
    out = {tuple(range(1, n + 1)): Fraction(label.lam, factorial(n))}
    for a in range(1, k + 1):
        for j in range(1, n + 1):
            rest = tuple(i for i in range(1, n + 1) if i != j)
            # eps_{j rest} is (-1)^(j-1); moving the fiber index past n-1 slots adds (-1)^(n-1)
            sign = (-1) ** (j - 1) * (-1) ** (n - 1)
            c = Fraction(label.B[j - 1][a - 1] * sign, factorial(n))
            key = rest + (n + a,)
            out[key] = out.get(key, 0) + c
    return {key: as_rational(c) for key, c in out.items() if c}


def pairing_identity(label: MomentumLabel, n: int, k: int) -> tuple:
    """Both sides of the pairing identity: ``(<wedge^n theta, V>, phi^* Theta)``."""
    lhs = pair_value(wedge_power(theta_LVY(n, k), n), V_components(label))
    rhs = pullback(phi_B_lambda(label, n, k), Theta_Z(n, k))
    return lhs, rhs


def hamvecphibl(X: VField, label: MomentumLabel) -> dict:
    """Closed-form pushforward of a field on the adapted frame chart.

    Returns Z-coordinate components as Scalars over the frame chart.  The
    first term of the ``p`` component carries a minus sign, which is what
    differentiating the coordinate conversion gives.  Every inverse entry is
    written as ``adj / det`` and the determinants are cleared, so each
    component is one polynomial numerator over ``det``.
    """
    n, k = X.chart.n, X.chart.k
    P, R, Q = _frame_blocks(n, k)
    detP = det_leibniz(P)
    adj = adjugate(P)
    B = label.B
    Xh = [[X.component(frame(i, j)) for j in range(1, n + 1)] for i in range(1, n + 1)]
    Xv = [[X.component(frame(n + a, n + b)) for b in range(1, k + 1)] for a in range(1, k + 1)]
    Xm = [[X.component(frame(n + a, i)) for i in range(1, n + 1)] for a in range(1, k + 1)]
    # det * Tr(P^-1 dP)
    trace = ZERO
    for kk in range(n):
        for l in range(n):
            trace = trace + adj[l][kk] * Xh[kk][l]
    out = {c: X.component(c) for c in [x(i) for i in range(1, n + 1)] + [y(a) for a in range(1, k + 1)]}
    for i in range(n):
        for a in range(k):
            total = ZERO
            for j in range(n):
                for b in range(k):
                    bj = B[j][b]
                    if not bj:
                        continue
                    t = adj[i][j] * Xv[b][a] * detP + R[b][a] * adj[i][j] * trace
                    for kk in range(n):
                        for l in range(n):
                            t = t - R[b][a] * adj[i][kk] * adj[l][j] * Xh[kk][l]
                    total = total + t * bj
            out[mom(i + 1, a + 1)] = total / detP
    total = trace * detP * label.lam
    for i in range(n):
        for a in range(k):
            bi = B[i][a]
            if not bi:
                continue
            t = ZERO
            for kk in range(n):
                t = t + adj[kk][i] * Xm[a][kk] * detP + adj[kk][i] * Q[a][kk] * trace
                for j in range(n):
                    for l in range(n):
                        t = t - Q[a][kk] * adj[kk][j] * adj[l][i] * Xh[j][l]
            total = total + t * bi
    out["p"] = total / detP
    return out


def jacobian_components(m: ChartMap, X: VField) -> dict:
    """Symbolic Jacobian route: each target coordinate differentiated along X."""
    return {t: X.apply(s) for t, s in m.assignment.items()}


@dataclass(frozen=True, eq=False)
class Theorem72Report:
    points: int
    pushforward_matches: bool
    formula_matches: bool
    failures: tuple = ()

    @property
    def holds(self) -> bool:
        return self.pushforward_matches and self.formula_matches


def pushforward_theorem72(v: ProjectableField, label: MomentumLabel, points: Sequence[Mapping]) -> Theorem72Report:
    """Compare the Jacobian pushforward of ``X_fhat`` with ``X_f`` at each image point,
    and the closed-form pushforward with the Jacobian one."""
    n, k = v.n, v.k
    _check_dims(v, n, k)
    m = phi_B_lambda(label, n, k)
    Xhat = hamiltonian_vf_LVY(v, n, k)
    Xz = hamiltonian_vf_Z(v, n, k)
    closed = hamvecphibl(Xhat, label)
    push_ok = True
    formula_ok = True
    failures = []
    for idx, point in enumerate(points):
        try:
            tv = pushforward(m, Xhat, point)
            target = Xz.evaluate(tv.base)
            formula = {c: s.evaluate(point) for c, s in closed.items()}
        except PoleAtPoint as exc:
            raise PoleAtPoint(f"sample {idx}: {exc}") from None
        comps = {c: tv.components.get(c, 0) for c in m.target.names}
        if any(comps[c] != target.get(c, 0) for c in comps):
            push_ok = False
            failures.append((idx, "pushforward"))
        if any(comps[c] != formula.get(c, 0) for c in comps):
            formula_ok = False
            failures.append((idx, "formula"))
    return Theorem72Report(len(points), push_ok, formula_ok, tuple(failures))


# -- connections, symmetry breaking and splittings ------------------------------


def connection_to_lambda(gamma: ConnectionCoefficients) -> SymmetryBreaker:
    """``lambda^B_i = pi^B_A (e^j_i gamma^A_j + e^A_i)`` with the frame read off the coframe.

    The frame blocks are ``e^j_i = adj(P)^j_i / det P`` and
    ``e^A_i = -(R^-1 Q P^-1)^A_i``; both determinants are cleared before the
    single final division.
    """
    n, k = gamma.n, gamma.k
    P, R, Q = _frame_blocks(n, k)
    detP = det_leibniz(P)
    detR = det_leibniz(R)
    adjP = adjugate(P)
    adjR = adjugate(R)
    # det P * e^j_i and det P * det R * e^A_i
    e_h = [[adjP[j][i] for i in range(n)] for j in range(n)]
    e_v = []
    for a in range(k):
        row = []
        for i in range(n):
            t = ZERO
            for c in range(k):
                for m in range(n):
                    t = t - adjR[a][c] * Q[c][m] * e_h[m][i]
            row.append(t)
        e_v.append(row)
    scale = detP * detR
    lam = []
    for b in range(k):
        row = []
        for i in range(n):
            t = ZERO
            for a in range(k):
                inner = e_v[a][i]
                for j in range(n):
                    g = gamma.entry(a + 1, j + 1)
                    if not g.is_zero():
                        inner = inner + e_h[j][i] * detR * g
                t = t + R[b][a] * inner
            row.append(t / scale)
        lam.append(row)
    return SymmetryBreaker(n, k, lam)


def lambda_closed_form(gamma: ConnectionCoefficients) -> SymmetryBreaker:
    """``(R gamma - Q) P^-1`` in terms of the coframe blocks."""
    n, k = gamma.n, gamma.k
    P, R, Q = _frame_blocks(n, k)
    detP = det_leibniz(P)
    adjP = adjugate(P)
    lam = []
    for b in range(k):
        row = []
        for i in range(n):
            t = ZERO
            for j in range(n):
                s = -Q[b][j]
                for a in range(k):
                    s = s + R[b][a] * gamma.entry(a + 1, j + 1)
                t = t + s * adjP[j][i]
            row.append(t / detP)
        lam.append(row)
    return SymmetryBreaker(n, k, lam)


def lambda_to_connection(lam: SymmetryBreaker, w: FramePoint) -> ConnectionCoefficients:
    """The projection onto vertical vectors along ``span{e_j - lambda^B_j eps_B}``, in coordinates."""
    n, k = w.n, w.k
    if (lam.n, lam.k) != (n, k):
        raise ShapeMismatch("symmetry-breaking map does not match the frame")
    L = lam.at(w)
    E = w.E
    size = n + k
    M = [[0] * size for _ in range(size)]
    for j in range(n):
        for r in range(size):
            M[r][j] = sum(L[b][j] * E[r][n + b] for b in range(k))
    for a in range(k):
        for r in range(size):
            M[r][n + a] = E[r][n + a]
    G = matmul(M, w.coframe)
    if any(G[i][c] != 0 for i in range(n) for c in range(size)):
        raise SingularFrame("recovered map is not vertical-valued")
    return ConnectionCoefficients(n, k, tuple(tuple(G[n + a][j] for j in range(n)) for a in range(k)))


def splitting_map(gamma: ConnectionCoefficients) -> VForm:
    """``(p + p^i_A gamma^A_i) d^n x`` on the affine multiphase chart."""
    n, k = gamma.n, gamma.k
    chart = make_chart(SpaceKind("Z", n, k))
    coeff = var("p")
    for i in range(1, n + 1):
        for a in range(1, k + 1):
            g = gamma.entry(a, i)
            if not g.is_zero():
                coeff = coeff + var(mom(i, a)) * g
    return volume_forms(chart, 0)[()] * coeff


def splitting_at(gamma: ConnectionCoefficients, z_point: Mapping, w: FramePoint | None = None) -> Fraction:
    """Coefficient of ``d^n x`` in the split of a point of Z, via the symmetry-breaking map.

    The point is relabelled against the frame ``w`` (the coordinate frame when
    omitted), split as ``[w, (0, lambda - Tr(B lambda_gamma(w)))]`` and mapped
    back to an n-form.
    """
    n, k = gamma.n, gamma.k
    base = {c: z_point[c] for c in [x(i) for i in range(1, n + 1)] + [y(a) for a in range(1, k + 1)]}
    if w is None:
        w = FramePoint.coordinate(n, k, base)
    elif w.base != {c: as_rational(v) for c, v in base.items()}:
        raise ShapeMismatch("frame lies over a different point")
    label0 = MomentumLabel([[z_point[mom(j, b)] for b in range(1, k + 1)] for j in range(1, n + 1)],
                           z_point["p"])
    g = GroupElement.from_matrix(w.E, n)
    label = group_action("nk_r", g.inverse(), label0)
    L = connection_to_lambda(_at_point(gamma, base)).at(w)
    shift = _trace(matmul(label.B, L))
    split = rho_Z(w, MomentumLabel([[0] * k for _ in range(n)], label.lam - shift))
    return z_coordinates(split)[1]


def _at_point(gamma: ConnectionCoefficients, base: Mapping) -> ConnectionCoefficients:
    return ConnectionCoefficients(gamma.n, gamma.k, tuple(tuple(row) for row in gamma.at(base)))


def fundamental_field(A: Sequence[Sequence], n: int, k: int) -> VField:
    """Generator of the right action of ``(I, I, tA)`` on the adapted frame chart."""
    A = _matrix(A, k, n, "A")
    chart = make_chart(SpaceKind("LVY", n, k))
    comps = {}
    for b in range(1, k + 1):
        for i in range(1, n + 1):
            c = ZERO
            for j in range(1, n + 1):
                if A[b - 1][j - 1]:
                    c = c - var(frame(j, i)) * A[b - 1][j - 1]
            comps[frame(n + b, i)] = c
    return VField(chart, comps)


@dataclass(frozen=True, eq=False)
class FlatConnectionReport:
    derivative: tuple
    expected: tuple

    @property
    def holds(self) -> bool:
        return all(d == e for rd, re in zip(self.derivative, self.expected) for d, e in zip(rd, re))


def fundamental_vertical_check(gamma: ConnectionCoefficients, A: Sequence[Sequence]) -> FlatConnectionReport:
    """``d lambda_gamma (A*)`` computed symbolically, to be compared with ``A``."""
    n, k = gamma.n, gamma.k
    lam = connection_to_lambda(gamma)
    Astar = fundamental_field(A, n, k)
    deriv = tuple(tuple(Astar.apply(c) for c in row) for row in lam.lam)
    expected = tuple(tuple(as_scalar(v) for v in row) for row in _matrix(A, k, n, "A"))
    return FlatConnectionReport(deriv, expected)
