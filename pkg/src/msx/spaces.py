"""Canonical charts and canonical forms of the spaces in play.

Coordinate names (``n`` base and ``k`` fiber dimensions):

* base ``x1..xn`` and fiber ``y1..yk`` on every space except LM (base only);
* multimomenta ``p{j}_{B}`` (upper base index ``j``, lower fiber index ``B``)
  and the affine coordinate ``p`` on Z, and ``p{j}_{B}`` on both linear
  multiphase charts;
* frame coordinates ``pi{a}_{b}`` on LVY and LM, the entry in row ``a`` and
  column ``b`` of the coframe matrix, with model indices ``a`` and chart
  indices ``b`` both running over ``1..n+k`` (horizontal first).  The adapted
  shape means ``pi{i}_{n+B}`` never occurs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

from .errors import BadDimensions
from .exterior import Chart, VForm, VField, as_scalar, ext_d, interior, wedge
from .scalar import ONE, Scalar, var

__all__ = [
    "SPACE_TAGS",
    "SpaceKind",
    "ConnectionCoefficients",
    "x",
    "y",
    "mom",
    "frame",
    "make_chart",
    "volume_forms",
    "theta_LVY",
    "theta_LM",
    "Theta_Z",
    "Theta_gamma",
    "euler_field",
    "coordinate_field",
    "structure_rank_at",
]

SPACE_TAGS = ("Y", "Z", "JstarGunther", "JstarKT", "LVY", "LM")

# names accepted by the script language
DSL_NAMES = {
    "Y": "Y",
    "Z": "Z",
    "Jstar.gunther": "JstarGunther",
    "Jstar.kt": "JstarKT",
    "LVY": "LVY",
    "LM": "LM",
}


def x(i: int) -> str:
    return f"x{i}"


def y(a: int) -> str:
    return f"y{a}"


def mom(j: int, b: int) -> str:
    return f"p{j}_{b}"


def frame(a: int, b: int) -> str:
    return f"pi{a}_{b}"


@dataclass(frozen=True)
class SpaceKind:
    tag: str
    n: int
    k: int = 0

    def __post_init__(self):
        if self.tag not in SPACE_TAGS:
            raise BadDimensions(f"unknown space {self.tag!r}")
        if self.n < 1:
            raise BadDimensions("n must be at least 1")
        if self.tag == "LM":
            if self.k != 0:
                raise BadDimensions("LM takes no fiber dimension")
        elif self.k < 1:
            raise BadDimensions("k must be at least 1")

    @property
    def label(self) -> str:
        if self.tag == "LM":
            return f"LM(n={self.n})"
        return f"{self.tag}(n={self.n},k={self.k})"


@lru_cache(maxsize=None)
def make_chart(kind: SpaceKind) -> Chart:
    n, k = kind.n, kind.k
    coords = [(x(i), "base") for i in range(1, n + 1)]
    if kind.tag != "LM":
        coords += [(y(a), "fiber") for a in range(1, k + 1)]
    if kind.tag in ("Z", "JstarGunther", "JstarKT"):
        coords += [(mom(j, b), "momentum") for j in range(1, n + 1) for b in range(1, k + 1)]
        if kind.tag == "Z":
            coords.append(("p", "momentum"))
    elif kind.tag == "LVY":
        coords += [(frame(i, j), "frame") for i in range(1, n + 1) for j in range(1, n + 1)]
        coords += [(frame(n + a, n + b), "frame")
                   for a in range(1, k + 1) for b in range(1, k + 1)]
        coords += [(frame(n + a, i), "frame") for a in range(1, k + 1) for i in range(1, n + 1)]
    elif kind.tag == "LM":
        coords += [(frame(i, j), "frame") for i in range(1, n + 1) for j in range(1, n + 1)]
    return Chart(kind.label, tuple(coords), n, k)


def coordinate_field(chart: Chart, name: str) -> VField:
    return VField(chart, {name: ONE})


def volume_forms(chart: Chart, depth: int) -> dict:
    """The coordinate volume form and its one- and two-fold contractions.

    ``depth`` 0 gives ``{(): d^n x}``, depth 1 gives ``{(i,): d^{n-1}x_i}``
    and depth 2 gives ``{(i, j): d^{n-2}x_ij}`` for ``i != j``, where the
    contraction with the i-th base field happens first.
    """
    n = chart.n
    top = VForm.from_terms(chart, n, 0, [([x(i) for i in range(1, n + 1)], (), 1)])
    if depth == 0:
        return {(): top}
    faces = {(i,): interior(coordinate_field(chart, x(i)), top) for i in range(1, n + 1)}
    if depth == 1:
        return faces
    if depth != 2:
        raise ValueError("depth must be 0, 1 or 2")
    if n == 1:
        return {}
    return {
        (i, j): interior(coordinate_field(chart, x(j)), faces[(i,)])
        for i in range(1, n + 1)
        for j in range(1, n + 1)
        if i != j
    }


@lru_cache(maxsize=None)
def theta_LVY(n: int, k: int) -> VForm:
    """Pullback of the soldering form to the adapted frame chart."""
    chart = make_chart(SpaceKind("LVY", n, k))
    items = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            items.append(([x(j)], (i,), var(frame(i, j))))
    for a in range(1, k + 1):
        for j in range(1, n + 1):
            items.append(([x(j)], (n + a,), var(frame(n + a, j))))
        for b in range(1, k + 1):
            items.append(([y(b)], (n + a,), var(frame(n + a, n + b))))
    return VForm.from_terms(chart, 1, 1, items)


@lru_cache(maxsize=None)
def theta_LM(n: int) -> VForm:
    chart = make_chart(SpaceKind("LM", n))
    items = [([x(j)], (i,), var(frame(i, j))) for i in range(1, n + 1) for j in range(1, n + 1)]
    return VForm.from_terms(chart, 1, 1, items)


@lru_cache(maxsize=None)
def Theta_Z(n: int, k: int) -> VForm:
    """Canonical n-form on the affine multiphase chart."""
    chart = make_chart(SpaceKind("Z", n, k))
    faces = volume_forms(chart, 1)
    total = volume_forms(chart, 0)[()] * var("p")
    for i in range(1, n + 1):
        for a in range(1, k + 1):
            dy = VForm.differential(chart, y(a))
            total = total + wedge(dy, faces[(i,)]) * var(mom(i, a))
    return total


@dataclass(frozen=True)
class ConnectionCoefficients:
    """Coefficients ``gamma[A-1][j-1]`` of an Ehresmann connection.

    The connection sends ``d/dx^j`` to ``gamma^A_j d/dy^A`` and fixes vertical
    vectors, so its horizontal space is spanned by ``d/dx^j - gamma^A_j d/dy^A``.
    """

    n: int
    k: int
    gamma: tuple

    def __post_init__(self):
        rows = tuple(tuple(as_scalar(c) for c in row) for row in self.gamma)
        if len(rows) != self.k or any(len(r) != self.n for r in rows):
            raise BadDimensions("connection coefficients must be k x n")
        allowed = {x(i) for i in range(1, self.n + 1)} | {y(a) for a in range(1, self.k + 1)}
        for row in rows:
            for c in row:
                stray = set(c.variables) - allowed
                if stray:
                    raise BadDimensions(f"connection depends on {sorted(stray)}")
        object.__setattr__(self, "gamma", rows)

    @classmethod
    def zero(cls, n: int, k: int) -> "ConnectionCoefficients":
        return cls(n, k, tuple((0,) * n for _ in range(k)))

    def entry(self, a: int, j: int) -> Scalar:
        """gamma^A_j with 1-based indices."""
        return self.gamma[a - 1][j - 1]

    def at(self, point: Mapping[str, object]) -> list:
        return [[c.evaluate(point) for c in row] for row in self.gamma]


def Theta_gamma(tag: str, gamma: ConnectionCoefficients) -> VForm:
    """Potential on the linear multiphase chart induced by a connection.

    ``JstarGunther`` gives a value-degree-1 one-form with horizontal value
    indices; ``JstarKT`` gives the real n-form obtained by wedging with
    ``d^{n-1}x_i``.
    """
    if tag not in ("JstarGunther", "JstarKT"):
        raise BadDimensions(f"{tag} carries no connection-induced potential")
    n, k = gamma.n, gamma.k
    chart = make_chart(SpaceKind(tag, n, k))
    rows = []
    for i in range(1, n + 1):
        one_form = VForm.zero(chart, 1, 0)
        for a in range(1, k + 1):
            pia = var(mom(i, a))
            one_form = one_form + VForm.differential(chart, y(a)) * pia
            for j in range(1, n + 1):
                g = gamma.entry(a, j)
                if not g.is_zero():
                    one_form = one_form + VForm.differential(chart, x(j)) * (pia * g)
        rows.append(one_form)
    if tag == "JstarGunther":
        total = VForm.zero(chart, 1, 1)
        for i, one_form in enumerate(rows, start=1):
            total = total + VForm(chart, 1, 1, {(f, (i,)): c for (f, _), c in one_form.terms.items()})
        return total
    faces = volume_forms(chart, 1)
    total = VForm.zero(chart, n, 0)
    for i, one_form in enumerate(rows, start=1):
        total = total + wedge(one_form, faces[(i,)])
    return total


@lru_cache(maxsize=None)
def euler_field(n: int, k: int) -> VField:
    """The field E on Z with E hook dTheta = Theta, found by the structure solver."""
    from .hamilton import StructureSolver

    theta = Theta_Z(n, k)
    return StructureSolver(ext_d(theta)).solve_contraction(theta)


def structure_rank_at(n: int, k: int, m: int, point: Mapping[str, object]) -> int:
    """Rank of ``X -> X hook d(wedge^m theta)`` on the adapted frame chart at a point.

    The form is nondegenerate there exactly when the rank equals the chart
    dimension.
    """
    from .linsolve import column_rank
    from .exterior import wedge_power

    if not 1 <= m <= n + k:
        raise BadDimensions(f"m must lie in 1..{n + k}")
    theta = theta_LVY(n, k)
    chart = theta.chart
    d_power = ext_d(wedge_power(theta, m))
    cols = [interior(coordinate_field(chart, c), d_power).evaluate(point) for c in chart.names]
    keys = sorted({key for col in cols for key in col.terms})
    rows = [[col.terms[key].constant_value() if key in col.terms else 0 for key in keys]
            for col in cols]
    return column_rank(rows, len(keys))
