"""Verification suites: each id checks one property of one module.

Every suite takes ``n, k, m, trials, seed`` and an optional ``theta``
factory that replaces the canonical n-form on Z.  The factory exists for the
mutation check: a corrupted potential must make the suites that depend on it
fail.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Callable

from ..bundlemaps import (
    connection_to_lambda,
    fundamental_vertical_check,
    group_action,
    lambda_closed_form,
    lambda_to_connection,
    pairing_identity,
    phi_B_lambda,
    pushforward_theorem72,
    rho_Z,
    z_coordinates,
)
from ..errors import BadDimensions, MsxError, NotAllowable
from ..exterior import VForm, ext_d, interior, lie_derivative, pullback, wedge, wedge_power
from ..hamilton import (
    StructureSolver,
    classify_HF1_LVY,
    hamiltonian_vf_LVY,
    hamiltonian_vf_Z,
    momentum_observable_Z,
    solve_structure_m,
    tensorial_from_vf_LVY,
    tensorial_function,
)
from ..poisson import bracket_Z, bracket_degree_m
from ..rng import SplitMix64
from ..sampling import (
    random_connection,
    random_frame_point,
    random_group_element,
    random_label,
    random_matrix,
    random_nonprojectable,
    random_polynomial,
    random_projectable,
)
from ..scalar import var
from ..spaces import Theta_Z, frame, make_chart, SpaceKind, structure_rank_at, theta_LVY, x, y

ThetaFactory = Callable[[int, int], VForm]


@dataclass
class SuiteReport:
    suite: str
    passed: bool
    params: dict
    trials: int
    failures: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "pass": self.passed,
            "params": dict(self.params),
            "trials": self.trials,
            "failures": list(self.failures),
        }


@dataclass(frozen=True)
class Suite:
    id: str
    module: str
    prop: str
    defaults: dict
    sizes: tuple
    runner: Callable
    uses_theta: bool = False


class _Collector:
    def __init__(self, limit: int = 5):
        self.failures: list = []
        self.count = 0
        self.limit = limit

    def check(self, ok: bool, what: str) -> None:
        if not ok:
            self.count += 1
            if len(self.failures) < self.limit:
                self.failures.append(what)


def _theta(factory: ThetaFactory | None, n: int, k: int) -> VForm:
    return Theta_Z(n, k) if factory is None else factory(n, k)


def _trial_rngs(seed: int, trials: int):
    root = SplitMix64(seed)
    return [root.fork(t) for t in range(trials)]


# -- affine multiphase space -------------------------------------------------------


def _multistruc(p, out, theta):
    n, k = p["n"], p["k"]
    solver = StructureSolver(ext_d(_theta(theta, n, k)))
    for t, rng in enumerate(_trial_rngs(p["seed"], p["trials"])):
        v = random_projectable(rng, n, k)
        try:
            X = solver.solve(momentum_observable_Z(v, n, k))
        except MsxError as exc:
            out.check(False, f"trial {t}: {type(exc).__name__}")
            continue
        out.check(X == hamiltonian_vf_Z(v, n, k), f"trial {t}: solver differs from closed form")


def _xhooktheta(p, out, theta):
    n, k = p["n"], p["k"]
    Th = _theta(theta, n, k)
    for t, rng in enumerate(_trial_rngs(p["seed"], p["trials"])):
        v = random_projectable(rng, n, k)
        out.check(interior(hamiltonian_vf_Z(v, n, k), Th) == momentum_observable_Z(v, n, k).body,
                  f"trial {t}: X hook Theta differs from f_v")


def _lieconstant(p, out, theta):
    n, k = p["n"], p["k"]
    Th = _theta(theta, n, k)
    for t, rng in enumerate(_trial_rngs(p["seed"], p["trials"])):
        v = random_projectable(rng, n, k)
        out.check(lie_derivative(hamiltonian_vf_Z(v, n, k), Th).is_zero(),
                  f"trial {t}: Lie derivative of Theta is nonzero")


def _pbexact(p, out, theta):
    n, k = p["n"], p["k"]
    Th = _theta(theta, n, k)
    for t, rng in enumerate(_trial_rngs(p["seed"], p["trials"])):
        v = random_projectable(rng, n, k)
        w = random_projectable(rng, n, k)
        res = bracket_Z(v, w, n, k, theta=Th)
        out.check(res.holds, f"trial {t}: bracket differs from f_[v,w] plus exact term")
        back = bracket_Z(w, v, n, k, theta=Th)
        out.check(res.value == -back.value, f"trial {t}: bracket is not antisymmetric")


def _euler(p, out, theta):
    n, k = p["n"], p["k"]
    Th = _theta(theta, n, k)
    dTh = ext_d(Th)
    try:
        E = StructureSolver(dTh).solve_contraction(Th)
    except MsxError as exc:
        out.check(False, f"Euler field: {type(exc).__name__}")
        return
    out.check(interior(E, dTh) == Th, "E hook dTheta differs from Theta")
    for t, rng in enumerate(_trial_rngs(p["seed"], p["trials"])):
        f = momentum_observable_Z(random_projectable(rng, n, k), n, k).body
        df = ext_d(f)
        got = interior(E, df) if df.terms else VForm.zero(f.chart, f.p, 0)
        out.check(got == f, f"trial {t}: E hook df differs from f")


# -- adapted frame bundle --------------------------------------------------------


def _nkstruc(p, out, theta):
    n, k, m = p["n"], p["k"], p["m"]
    solver = StructureSolver(ext_d(theta_LVY(n, k)))
    for t, rng in enumerate(_trial_rngs(p["seed"], p["trials"])):
        v = random_projectable(rng, n, k)
        try:
            X = solver.solve(tensorial_from_vf_LVY(v, n, k))
        except MsxError as exc:
            out.check(False, f"trial {t}: {type(exc).__name__}")
            continue
        out.check(X == hamiltonian_vf_LVY(v, n, k), f"trial {t}: solver differs from closed form")
        if m <= n + k - 2:
            out.check(solve_structure_m(v, m, n, k).consistent, f"trial {t}: degree-{m} equation fails")


def _constraint(p, out, theta):
    n, k = p["n"], p["k"]
    solver = StructureSolver(ext_d(theta_LVY(n, k)))
    for t, rng in enumerate(_trial_rngs(p["seed"], p["trials"])):
        comps = random_nonprojectable(rng, n, k)
        f = tensorial_function(n, k, comps)
        try:
            solver.solve(f)
        except NotAllowable:
            continue
        out.check(False, f"trial {t}: non-projectable lift was accepted")


def _template(rng, n, k):
    base = [x(i) for i in range(1, n + 1)]
    total = base + [y(a) for a in range(1, k + 1)]
    g_base = [random_polynomial(rng, base) for _ in range(n)]
    g_fiber = [random_polynomial(rng, total) for _ in range(k)]
    xi = [random_polynomial(rng, base) for _ in range(n)]
    zeta = [random_polynomial(rng, total) for _ in range(k)]
    chart = make_chart(SpaceKind("LVY", n, k))
    items = []
    for i in range(1, n + 1):
        items.append(((), (i,), xi[i - 1]))
        for j in range(1, n + 1):
            items.append(((), (i,), g_base[j - 1] * var(frame(i, j))))
    for b in range(1, k + 1):
        items.append(((), (n + b,), zeta[b - 1]))
        for i in range(1, n + 1):
            items.append(((), (n + b,), g_base[i - 1] * var(frame(n + b, i))))
        for a in range(1, k + 1):
            items.append(((), (n + b,), g_fiber[a - 1] * var(frame(n + b, n + a))))
    return VForm.from_terms(chart, 0, 1, items), (g_base, g_fiber, xi, zeta)


def _same(got, want) -> bool:
    return len(got) == len(want) and all(a == b for a, b in zip(got, want))


def _hflvy(p, out, theta):
    n, k = p["n"], p["k"]
    solver = StructureSolver(ext_d(theta_LVY(n, k)))
    for t, rng in enumerate(_trial_rngs(p["seed"], p["trials"])):
        f, (g_base, g_fiber, xi, zeta) = _template(rng, n, k)
        res = classify_HF1_LVY(f, n, k)
        ok = (res.allowable and _same(res.g_base, g_base) and _same(res.g_fiber, g_fiber)
              and _same(res.xi, xi) and _same(res.zeta, zeta))
        out.check(ok, f"trial {t}: template element misclassified ({res.reason})")
        out.check(solver.is_allowable(f), f"trial {t}: solver rejects a template element")


# -- wedge powers and the higher structures ------------------------------------------


def _binomial(p, out, theta):
    n, k = p["n"], p["k"]
    th = theta_LVY(n, k)
    horiz = VForm(th.chart, 1, 1, {key: c for key, c in th.terms.items() if key[1][0] <= n})
    vert = VForm(th.chart, 1, 1, {key: c for key, c in th.terms.items() if key[1][0] > n})
    dth = ext_d(th)
    for m in range(0, min(3, n + k) + 1):
        expansion = VForm.zero(th.chart, m, m)
        for l in range(m + 1):
            expansion = expansion + wedge(wedge_power(vert, l), wedge_power(horiz, m - l)) * comb(m, l)
        power = wedge_power(th, m)
        out.check(power == expansion, f"m={m}: wedge power differs from the binomial sum")
        if m >= 1:
            out.check(ext_d(power) == wedge(dth, wedge_power(th, m - 1)) * m,
                      f"m={m}: d of the wedge power differs from m dtheta ^ theta^(m-1)")


def _frame_sample(rng, n, k):
    return random_frame_point(rng, n, k).chart_point()


def _nondegen(p, out, theta):
    n, k = p["n"], p["k"]
    dim = make_chart(SpaceKind("LVY", n, k)).dim
    for t, rng in enumerate(_trial_rngs(p["seed"], p["trials"])):
        point = _frame_sample(rng, n, k)
        for m in range(1, n + k):
            rank = structure_rank_at(n, k, m, point)
            out.check(rank == dim, f"trial {t}, m={m}: rank {rank} < {dim}")


def _thm71(p, out, theta):
    n, k = p["n"], p["k"]
    Th = _theta(theta, n, k)
    for t, rng in enumerate(_trial_rngs(p["seed"], p["trials"])):
        label = random_label(rng, n, k)
        lhs, _ = pairing_identity(label, n, k)
        rhs = pullback(phi_B_lambda(label, n, k), Th)
        out.check(lhs == rhs, f"trial {t}: pairing differs from the pulled-back potential")


def _thm72(p, out, theta):
    n, k = p["n"], p["k"]
    for t, rng in enumerate(_trial_rngs(p["seed"], p["trials"])):
        v = random_projectable(rng, n, k)
        label = random_label(rng, n, k)
        points = [_frame_sample(rng, n, k) for _ in range(20)]
        rep = pushforward_theorem72(v, label, points)
        out.check(rep.pushforward_matches, f"trial {t}: pushforward differs from X_f")
        out.check(rep.formula_matches, f"trial {t}: closed-form pushforward differs from the Jacobian")


def _thm73(p, out, theta):
    n, k = p["n"], p["k"]
    ms = sorted({0, 1, n - 1}) if p["m"] is None else [p["m"]]
    for t, rng in enumerate(_trial_rngs(p["seed"], p["trials"])):
        v = random_projectable(rng, n, k, degree=1)
        w = random_projectable(rng, n, k, degree=1)
        for m in ms:
            out.check(bracket_degree_m(v, w, m, n, k).holds, f"trial {t}, m={m}: decomposition fails")


# -- bundle maps ------------------------------------------------------------------


def _rhoz(p, out, theta):
    n, k = p["n"], p["k"]
    for t, rng in enumerate(_trial_rngs(p["seed"], p["trials"])):
        w = random_frame_point(rng, n, k)
        g = random_group_element(rng, n, k)
        label = random_label(rng, n, k)
        z = rho_Z(w, label)
        moved = rho_Z(group_action("frame", g, w), group_action("nk_r", g.inverse(), label))
        out.check(z == moved, f"trial {t}: representative depends on the orbit point")
        B, pz = z_coordinates(z)
        image = phi_B_lambda(label, n, k).image(w.chart_point())
        ok = pz == image["p"] and all(
            B[j - 1][b - 1] == image[f"p{j}_{b}"] for j in range(1, n + 1) for b in range(1, k + 1))
        out.check(ok, f"trial {t}: contraction coordinates differ from the conversion formula")


def _roundtrip(p, out, theta):
    n, k = p["n"], p["k"]
    root = SplitMix64(p["seed"])
    gamma = random_connection(root, n, k)
    lam = connection_to_lambda(gamma)
    out.check(lam == lambda_closed_form(gamma), "display form differs from (R gamma - Q) P^-1")
    for t, rng in enumerate(_trial_rngs(p["seed"], p["trials"])):
        w = random_frame_point(rng, n, k)
        back = lambda_to_connection(lam, w)
        want = tuple(tuple(row) for row in gamma.at(w.base))
        out.check(back.gamma == want, f"trial {t}: round trip does not return gamma")
        other = random_frame_point(rng, n, k, base=w.base)
        out.check(lambda_to_connection(lam, other).gamma == want, f"trial {t}: depends on the frame")
        g = random_group_element(rng, n, k)
        lhs = lam.at(group_action("frame", g, w))
        rhs = group_action("kn_affine", g.inverse(), lam.at(w))
        out.check(tuple(tuple(r) for r in lhs) == rhs, f"trial {t}: lambda is not equivariant")


def _flat(p, out, theta):
    n, k = p["n"], p["k"]
    for t, rng in enumerate(_trial_rngs(p["seed"], p["trials"])):
        gamma = random_connection(rng, n, k)
        A = random_matrix(rng, k, n)
        out.check(fundamental_vertical_check(gamma, A).holds, f"trial {t}: d lambda(A*) differs from A")


SUITES = {
    s.id: s
    for s in [
        Suite("multistruc", "hamilton", "solver on Z equals the closed-form Hamiltonian field",
              {"n": 2, "k": 1, "trials": 10}, ((1, 1), (2, 1), (2, 2), (3, 2)), _multistruc, True),
        Suite("xhooktheta", "hamilton", "X_f hook Theta equals f_v",
              {"n": 2, "k": 1, "trials": 10}, ((1, 1), (2, 1), (2, 2), (3, 2)), _xhooktheta, True),
        Suite("lieconstant", "exterior", "Lie derivative of Theta along X_f vanishes",
              {"n": 2, "k": 1, "trials": 10}, ((1, 1), (2, 1), (2, 2), (3, 2)), _lieconstant, True),
        Suite("pbexact", "poisson", "bracket equals f_[v,w] minus d(X_v hook X_w hook Theta)",
              {"n": 2, "k": 1, "trials": 10}, ((1, 1), (2, 1), (2, 2), (3, 2)), _pbexact, True),
        Suite("euler", "spaces", "E hook dTheta equals Theta and E hook df_v equals f_v",
              {"n": 2, "k": 1, "trials": 10}, ((1, 1), (2, 1), (2, 2), (3, 2)), _euler, True),
        Suite("nkstruc", "hamilton", "solver on the adapted frame chart equals the closed form",
              {"n": 2, "k": 1, "m": 0, "trials": 10}, ((1, 1), (2, 1), (2, 2), (3, 2)), _nkstruc),
        Suite("constraint", "hamilton", "lifts of non-projectable fields are not allowable",
              {"n": 2, "k": 2, "trials": 10}, ((1, 1), (2, 1), (2, 2)), _constraint),
        Suite("hflvy", "hamilton", "template elements are classified with their parts",
              {"n": 2, "k": 2, "trials": 10}, ((2, 2), (3, 2)), _hflvy),
        Suite("binomial", "exterior", "wedge powers match the binomial sum and d of powers",
              {"n": 2, "k": 1, "trials": 1}, ((1, 1), (2, 1), (2, 2), (1, 3), (3, 1)), _binomial),
        Suite("nondegen", "spaces", "d of every intermediate wedge power is nondegenerate at points",
              {"n": 2, "k": 1, "trials": 5}, ((1, 1), (2, 1), (1, 2), (2, 2), (1, 3), (3, 1)), _nondegen),
        Suite("thm71", "bundlemaps", "pairing with V(B, lambda) equals the pulled-back potential",
              {"n": 2, "k": 1, "trials": 5}, ((1, 1), (2, 1), (2, 2)), _thm71, True),
        Suite("thm72", "bundlemaps", "phi pushes X_fhat forward to X_f, closed form agrees",
              {"n": 2, "k": 1, "trials": 2}, ((1, 1), (2, 1), (2, 2), (3, 1)), _thm72),
        Suite("thm73", "poisson", "degree-m bracket equals tensorial plus exact part",
              {"n": 2, "k": 1, "m": None, "trials": 5}, ((1, 1), (2, 1), (2, 2), (3, 1)), _thm73),
        Suite("rhoZ-welldef", "bundlemaps", "rho_Z is constant on orbits and matches the conversion",
              {"n": 2, "k": 1, "trials": 20}, ((1, 1), (2, 1), (2, 2), (3, 1)), _rhoz),
        Suite("connection-roundtrip", "bundlemaps", "gamma to lambda and back, frame independence, equivariance",
              {"n": 2, "k": 1, "trials": 10}, ((1, 1), (2, 1), (2, 2), (1, 2)), _roundtrip),
        Suite("flat-connection", "bundlemaps", "d lambda_gamma on fundamental fields returns A",
              {"n": 1, "k": 2, "trials": 5}, ((1, 1), (1, 2), (2, 1)), _flat),
    ]
}


def resolve_params(suite: Suite, **given) -> dict:
    params = {"n": None, "k": None, "m": None, "trials": None, "seed": 0}
    params.update({key: val for key, val in suite.defaults.items()})
    for key, val in given.items():
        if key not in params:
            raise BadDimensions(f"suite {suite.id} takes no parameter {key!r}")
        if val is not None:
            params[key] = val
    if (params["n"], params["k"]) not in suite.sizes:
        sizes = ", ".join(f"({a},{b})" for a, b in suite.sizes)
        raise BadDimensions(f"suite {suite.id} supports (n,k) in {sizes}")
    if params["trials"] < 1:
        raise BadDimensions("trials must be positive")
    m = params["m"]
    if m is not None and not 0 <= m <= params["n"] + params["k"]:
        raise BadDimensions(f"m must lie in 0..{params['n'] + params['k']}")
    return params


def run_suite(suite_id: str, theta: ThetaFactory | None = None, **given) -> SuiteReport:
    suite = SUITES.get(suite_id)
    if suite is None:
        raise BadDimensions(f"unknown suite {suite_id!r}")
    params = resolve_params(suite, **given)
    out = _Collector()
    suite.runner(params, out, theta)
    return SuiteReport(suite_id, out.count == 0, params, params["trials"], out.failures)


def scaled_theta(factor) -> ThetaFactory:
    """Theta with its ``p d^n x`` coefficient multiplied by ``factor``."""

    def make(n: int, k: int) -> VForm:
        th = Theta_Z(n, k)
        top = tuple(range(n))
        terms = dict(th.terms)
        terms[(top, ())] = terms[(top, ())] * factor
        return VForm(th.chart, n, 0, terms)

    return make


def traceability_markdown() -> str:
    lines = [
        "# Verification suite traceability",
        "",
        "Generated by `msx traceability`; do not edit by hand.",
        "",
        "| suite | module | property | depends on Theta |",
        "|---|---|---|---|",
    ]
    for s in SUITES.values():
        lines.append(f"| {s.id} | {s.module} | {s.prop} | {'yes' if s.uses_theta else 'no'} |")
    return "\n".join(lines) + "\n"
