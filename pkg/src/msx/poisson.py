"""Poisson brackets of momentum and tensorial observables.

Every bracket is computed from its defining double contraction and, where a
closed decomposition exists, that decomposition is computed separately and
compared exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BadDegree, RouteDisagreement
from .exterior import VField, VForm, ext_d, interior, wedge, wedge_power
from .hamilton import (
    Observable,
    ProjectableField,
    hamiltonian_vf_LVY,
    hamiltonian_vf_Z,
    momentum_observable_Z,
    natural_lift_LM,
    tensorial_LM,
    tensorial_from_vf_LVY,
    _check_dims,
)
from .spaces import SpaceKind, Theta_Z, theta_LVY

__all__ = [
    "BracketResult",
    "bracket_Z",
    "bracket_T1V",
    "bracket_T1V_routes",
    "bracket_degree_m",
    "bracket_LM",
    "hook_or_zero",
]


@dataclass(frozen=True, eq=False)
class BracketResult:
    """A bracket value and, optionally, its (tensorial, exact) decomposition."""

    value: VForm
    decomposition: tuple | None = None

    @property
    def holds(self) -> bool:
        if self.decomposition is None:
            return True
        tensorial, exact = self.decomposition
        return self.value == tensorial + exact


def hook_or_zero(X: VField, a: VForm) -> VForm:
    """X hook a, with the convention that contracting into a function gives 0."""
    if a.p == 0:
        return VForm.zero(a.chart, 0, a.r)
    return interior(X, a)


def _d_of_degree(a: VForm, p: int, r: int) -> VForm:
    out = ext_d(a)
    return out if out.terms else VForm.zero(a.chart, p, r)


def bracket_Z(v: ProjectableField, w: ProjectableField, n: int, k: int,
              theta: VForm | None = None) -> BracketResult:
    """``{f_v, f_w} = -X_v hook (X_w hook dTheta)`` with its obstruction split.

    ``theta`` replaces the canonical form; it exists so the verification
    suites can be run against a deliberately corrupted potential.
    """
    _check_dims(v, n, k)
    _check_dims(w, n, k)
    theta = Theta_Z(n, k) if theta is None else theta
    Xv = hamiltonian_vf_Z(v, n, k)
    Xw = hamiltonian_vf_Z(w, n, k)
    value = -interior(Xv, interior(Xw, ext_d(theta)))
    tensorial = momentum_observable_Z(v.bracket(w), n, k).body
    inner = hook_or_zero(Xv, hook_or_zero(Xw, theta)) if n > 1 else None
    if inner is None:
        exact = VForm.zero(theta.chart, n - 1, 0)
    else:
        exact = -_d_of_degree(inner, n - 1, 0)
    return BracketResult(value, (tensorial, exact))


def bracket_T1V_routes(v: ProjectableField, w: ProjectableField, n: int, k: int):
    """Both routes of the degree-one bracket: ``X_f(g)`` and the double contraction."""
    _check_dims(v, n, k)
    _check_dims(w, n, k)
    Xv = hamiltonian_vf_LVY(v, n, k)
    Xw = hamiltonian_vf_LVY(w, n, k)
    g = tensorial_from_vf_LVY(w, n, k).body
    derivative = interior(Xv, ext_d(g)) if g.terms else VForm.zero(g.chart, 0, 1)
    contraction = -interior(Xv, interior(Xw, ext_d(theta_LVY(n, k))))
    return derivative, contraction


def bracket_T1V(v: ProjectableField, w: ProjectableField, n: int, k: int) -> Observable:
    derivative, contraction = bracket_T1V_routes(v, w, n, k)
    if derivative != contraction:
        raise RouteDisagreement("directional derivative and double contraction differ")
    return Observable(SpaceKind("LVY", n, k), derivative)


def bracket_degree_m(v: ProjectableField, w: ProjectableField, m: int,
                     n: int, k: int) -> BracketResult:
    if not 0 <= m <= n + k:
        raise BadDegree(f"m must lie in 0..{n + k}")
    _check_dims(v, n, k)
    _check_dims(w, n, k)
    theta = theta_LVY(n, k)
    chart = theta.chart
    power = wedge_power(theta, m)
    Xv = hamiltonian_vf_LVY(v, n, k)
    Xw = hamiltonian_vf_LVY(w, n, k)
    value = -interior(Xv, interior(Xw, wedge(ext_d(theta), power)))
    tensorial = wedge(bracket_T1V(v, w, n, k).body, power)
    if m == 0:
        exact = VForm.zero(chart, 0, 1)
    else:
        f = tensorial_from_vf_LVY(v, n, k).body
        g = tensorial_from_vf_LVY(w, n, k).body
        exact = _d_of_degree(wedge(wedge(f, g), wedge_power(theta, m - 1)), m, m + 1) * m
    return BracketResult(value, (tensorial, exact))


def bracket_LM(f, g, n: int) -> Observable:
    """Degree-one bracket ``X_f(g)`` of tensorial functions on LM."""
    Xf = natural_lift_LM(f, n)
    gh = tensorial_LM(g, n).body
    derivative = interior(Xf, ext_d(gh)) if gh.terms else VForm.zero(gh.chart, 0, 1)
    return Observable(SpaceKind("LM", n), derivative)
