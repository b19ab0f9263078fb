import pytest
from hypothesis import given
from hypothesis import strategies as st

from msx.errors import BadDegree, BadDimensions, NotAllowable, NotProjectable, OutOfCharacterizedRegime
from msx.exterior import VField, VForm, ext_d, interior, lie_derivative
from msx.hamilton import (
    ProjectableField,
    StructureSolver,
    classify_HF1_LVY,
    euler_projection,
    hamiltonian_vf_LVY,
    hamiltonian_vf_Z,
    momentum_observable_Z,
    natural_lift_LM,
    solve_structure,
    solve_structure_m,
    tensorial_from_vf_LVY,
    tensorial_function,
    tensorial_LM,
)
from msx.rng import SplitMix64
from msx.sampling import random_nonprojectable, random_projectable
from msx.scalar import var
from msx.spaces import SpaceKind, Theta_Z, make_chart, theta_LM, theta_LVY, volume_forms

SIZES = [(1, 1), (2, 1), (2, 2), (3, 1)]
seeds = st.integers(min_value=0, max_value=2 ** 63)
sizes = st.sampled_from(SIZES)


def pf(n, k, **comps):
    return ProjectableField.from_mapping(n, k, comps)


def z_chart(n, k):
    return make_chart(SpaceKind("Z", n, k))


def lvy_chart(n, k):
    return make_chart(SpaceKind("LVY", n, k))


# -- affine multiphase space --------------------------------------------------------


@pytest.mark.parametrize("n,k", SIZES)
def test_momentum_of_vertical_unit_field(n, k):
    chart = z_chart(n, k)
    faces = volume_forms(chart, 1)
    expected = VForm.zero(chart, n - 1, 0)
    for i in range(1, n + 1):
        expected = expected + faces[(i,)] * var(f"p{i}_1")
    assert momentum_observable_Z(pf(n, k, y1=1), n, k).body == expected


def test_momentum_examples():
    assert momentum_observable_Z(ProjectableField.zero(2, 1), 2, 1).body.is_zero()
    assert momentum_observable_Z(pf(1, 1, x1=1), 1, 1).body == VForm.function(z_chart(1, 1), var("p"))


@pytest.mark.parametrize("n,k", SIZES)
def test_closed_form_constant_fields(n, k):
    chart = z_chart(n, k)
    assert hamiltonian_vf_Z(pf(n, k, y1=1), n, k) == VField(chart, {"y1": 1})
    assert hamiltonian_vf_Z(pf(n, k, x1=1), n, k) == VField(chart, {"x1": 1})


def test_closed_form_scaling_field_by_hand():
    X = hamiltonian_vf_Z(pf(1, 1, y1=var("y1")), 1, 1)
    assert X == VField(z_chart(1, 1), {"y1": var("y1"), "p1_1": -var("p1_1")})


@pytest.mark.parametrize("n,k", SIZES)
def test_solver_recovers_vertical_unit_field(n, k):
    f = momentum_observable_Z(pf(n, k, y1=1), n, k)
    X = solve_structure(ext_d(Theta_Z(n, k)), f)
    assert X == VField(z_chart(n, k), {"y1": 1})
    assert X == hamiltonian_vf_Z(pf(n, k, y1=1), n, k)


def test_projectability_is_enforced():
    with pytest.raises(NotProjectable):
        pf(2, 1, x1=var("y1"))
    with pytest.raises(BadDimensions):
        pf(1, 1, x1=var("p"))
    with pytest.raises(BadDimensions):
        momentum_observable_Z(pf(1, 1, y1=1), 2, 1)


@given(seeds, sizes)
def test_solver_matches_closed_form_on_z(seed, size):
    n, k = size
    v = random_projectable(SplitMix64(seed), n, k)
    f = momentum_observable_Z(v, n, k)
    assert solve_structure(ext_d(Theta_Z(n, k)), f) == hamiltonian_vf_Z(v, n, k)


@given(seeds, sizes)
def test_canonical_identities_on_z(seed, size):
    n, k = size
    v = random_projectable(SplitMix64(seed), n, k)
    f = momentum_observable_Z(v, n, k).body
    X = hamiltonian_vf_Z(v, n, k)
    th = Theta_Z(n, k)
    assert interior(X, th) == f
    assert lie_derivative(X, th).is_zero()
    assert euler_projection(f) == f


@given(seeds, seeds, sizes)
def test_momentum_map_is_linear(s1, s2, size):
    n, k = size
    v = random_projectable(SplitMix64(s1), n, k)
    w = random_projectable(SplitMix64(s2), n, k)
    assert momentum_observable_Z(v + w, n, k).body == (
        momentum_observable_Z(v, n, k).body + momentum_observable_Z(w, n, k).body)


# -- adapted frame bundle -----------------------------------------------------------


def test_tensorial_examples():
    n, k = 2, 1
    chart = lvy_chart(n, k)
    fx = tensorial_from_vf_LVY(pf(n, k, x1=1), n, k).body
    expected = VForm.from_terms(chart, 0, 1, [((), (mu,), var(f"pi{mu}_1")) for mu in range(1, n + k + 1)])
    assert fx == expected
    fy = tensorial_from_vf_LVY(pf(n, k, y1=1), n, k).body
    assert fy == VForm.from_terms(chart, 0, 1, [((), (3,), var("pi3_3"))])
    assert tensorial_from_vf_LVY(ProjectableField.zero(n, k), n, k).body.is_zero()


def test_tensorial_function_accepts_nonprojectable_fields():
    f = tensorial_function(1, 1, {"x1": var("y1")}).body
    assert f.coefficient([], (1,)) == var("y1") * var("pi1_1")


def test_lvy_closed_form_examples():
    assert hamiltonian_vf_LVY(pf(2, 1, x1=1), 2, 1) == VField(lvy_chart(2, 1), {"x1": 1})
    X = hamiltonian_vf_LVY(pf(1, 1, x1=var("x1")), 1, 1)
    assert X == VField(lvy_chart(1, 1), {"x1": var("x1"), "pi1_1": -var("pi1_1"), "pi2_1": -var("pi2_1")})
    Y = hamiltonian_vf_LVY(pf(2, 2, y1=var("y1")), 2, 2)
    frame_parts = {s for s in Y.components if s.startswith("pi")}
    assert frame_parts == {"pi3_3", "pi4_3"}


def test_lvy_solver_examples():
    n, k = 2, 2
    solver = StructureSolver(ext_d(theta_LVY(n, k)))
    const = VForm.function(lvy_chart(n, k), 3, (1,))
    assert solver.solve(const).is_zero()
    bad = VForm.function(lvy_chart(n, k), var("y1") * var("pi1_1"), (1,))
    with pytest.raises(NotAllowable):
        solver.solve(bad)


@given(seeds, sizes)
def test_solver_matches_closed_form_on_lvy(seed, size):
    n, k = size
    v = random_projectable(SplitMix64(seed), n, k)
    f = tensorial_from_vf_LVY(v, n, k)
    assert solve_structure(ext_d(theta_LVY(n, k)), f) == hamiltonian_vf_LVY(v, n, k)


@given(seeds, st.sampled_from([(1, 1), (2, 1), (2, 2)]))
def test_nonprojectable_lifts_are_not_allowable(seed, size):
    n, k = size
    f = tensorial_function(n, k, random_nonprojectable(SplitMix64(seed), n, k))
    assert not StructureSolver(ext_d(theta_LVY(n, k))).is_allowable(f)


def test_classification_examples():
    n, k = 2, 2
    chart = lvy_chart(n, k)
    lift = classify_HF1_LVY(tensorial_from_vf_LVY(pf(n, k, x1=var("x2"), y2=var("y1")), n, k), n, k)
    assert lift.allowable
    assert all(c == 0 for c in lift.xi + lift.zeta)
    assert lift.g_base[0] == var("x2") and lift.g_fiber[1] == var("y1")
    const = classify_HF1_LVY(VForm.function(chart, 4, (1,)), n, k)
    assert const.allowable
    assert const.xi[0] == 4 and all(c == 0 for c in const.g_base + const.g_fiber + const.zeta)
    square = classify_HF1_LVY(VForm.function(chart, var("pi1_1") ** 2, (1,)), n, k)
    assert not square.allowable


def test_classification_refuses_small_sizes():
    with pytest.raises(OutOfCharacterizedRegime):
        classify_HF1_LVY(VForm.function(lvy_chart(1, 1), 1, (1,)), 1, 1)


@given(seeds)
def test_classification_agrees_with_solver(seed):
    n, k = 2, 2
    v = random_projectable(SplitMix64(seed), n, k, degree=1)
    f = tensorial_from_vf_LVY(v, n, k)
    assert classify_HF1_LVY(f, n, k).allowable
    assert StructureSolver(ext_d(theta_LVY(n, k))).is_allowable(f)


# -- linear frame bundle and higher degrees -------------------------------------------


def test_natural_lift_examples():
    chart1 = make_chart(SpaceKind("LM", 1))
    assert natural_lift_LM([var("x1")], 1) == VField(chart1, {"x1": var("x1"), "pi1_1": -var("pi1_1")})
    assert natural_lift_LM([1, 0], 2) == VField(make_chart(SpaceKind("LM", 2)), {"x1": 1})
    assert natural_lift_LM([0, 0], 2).is_zero()


@given(seeds, st.sampled_from([1, 2, 3]))
def test_natural_lift_solves_lm_structure(seed, n):
    from msx.sampling import random_polynomial

    rng = SplitMix64(seed)
    f = [random_polynomial(rng, [f"x{i}" for i in range(1, n + 1)]) for _ in range(n)]
    solver = StructureSolver(ext_d(theta_LM(n)))
    assert solver.solve(tensorial_LM(f, n)) == natural_lift_LM(f, n)


def test_structure_m_examples():
    assert solve_structure_m(pf(2, 1, y1=var("x1")), 0, 2, 1).consistent
    assert solve_structure_m(pf(1, 1, x1=1), 1, 1, 1).consistent
    assert solve_structure_m(pf(2, 1, y1=var("y1")), 1, 2, 1).consistent
    with pytest.raises(BadDegree):
        solve_structure_m(pf(1, 1, x1=1), 3, 1, 1)


@given(seeds, st.sampled_from([(1, 1), (2, 1)]), st.integers(min_value=0, max_value=3))
def test_structure_m_random(seed, size, m):
    n, k = size
    if m > n + k:
        return
    v = random_projectable(SplitMix64(seed), n, k, degree=1)
    assert solve_structure_m(v, m, n, k).consistent
