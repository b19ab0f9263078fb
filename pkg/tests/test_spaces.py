import pytest

from msx.errors import BadDimensions
from msx.exterior import VField, VForm, ext_d, interior, wedge
from msx.hamilton import ProjectableField, StructureSolver, momentum_observable_Z
from msx.rng import SplitMix64
from msx.sampling import random_frame_point
from msx.scalar import var
from msx.spaces import (
    ConnectionCoefficients,
    SpaceKind,
    Theta_gamma,
    Theta_Z,
    coordinate_field,
    euler_field,
    make_chart,
    structure_rank_at,
    theta_LM,
    theta_LVY,
    volume_forms,
)

SIZES = [(1, 1), (2, 1), (2, 2), (3, 1)]


def test_chart_coordinates():
    assert make_chart(SpaceKind("Z", 1, 1)).names == ("x1", "y1", "p1_1", "p")
    assert make_chart(SpaceKind("LVY", 2, 1)).dim == 10
    assert make_chart(SpaceKind("LM", 2)).dim == 6
    assert make_chart(SpaceKind("Y", 3, 2)).names == ("x1", "x2", "x3", "y1", "y2")
    assert make_chart(SpaceKind("JstarKT", 2, 1)).dim == 5


@pytest.mark.parametrize("args", [("Q", 1, 1), ("Z", 0, 1), ("Z", 1, 0), ("LM", 2, 1)])
def test_bad_space_kinds(args):
    with pytest.raises(BadDimensions):
        SpaceKind(*args)


def test_volume_forms_n2():
    chart = make_chart(SpaceKind("Z", 2, 1))
    faces = volume_forms(chart, 1)
    assert faces[(1,)] == VForm.differential(chart, "x2")
    assert faces[(2,)] == -VForm.differential(chart, "x1")
    ridges = volume_forms(chart, 2)
    assert ridges[(1, 2)] == VForm.function(chart, 1)
    assert ridges[(2, 1)] == VForm.function(chart, -1)


@pytest.mark.parametrize("n,k", SIZES)
def test_theta_lvy_horizontal_block_has_no_mixed_terms(n, k):
    dth = ext_d(theta_LVY(n, k))
    chart = dth.chart
    fiber = {chart.index(f"y{a}") for a in range(1, k + 1)}
    base = {chart.index(f"x{i}") for i in range(1, n + 1)}
    for (f, v), _ in dth.terms.items():
        if v[0] <= n:
            assert not (set(f) & fiber and set(f) & base)


@pytest.mark.parametrize("n,k", SIZES)
def test_theta_lvy_kills_frame_directions(n, k):
    th = theta_LVY(n, k)
    for name in th.chart.with_role("frame"):
        assert interior(coordinate_field(th.chart, name), th).is_zero()


def test_theta_lm_shape():
    th = theta_LM(2)
    assert (th.p, th.r) == (1, 1)
    assert th.coefficient(["x2"], (1,)) == var("pi1_2")


@pytest.mark.parametrize("n,k", SIZES)
def test_theta_z_degrees_closed_and_nondegenerate(n, k):
    th = Theta_Z(n, k)
    assert (th.p, th.r) == (n, 0)
    assert ext_d(ext_d(th)).is_zero()
    assert StructureSolver(ext_d(th)).is_nondegenerate()


def test_theta_z_n1_by_hand():
    chart = make_chart(SpaceKind("Z", 1, 1))
    expected = (VForm.differential(chart, "x1") * var("p")
                + VForm.differential(chart, "y1") * var("p1_1"))
    assert Theta_Z(1, 1) == expected


def test_theta_gamma_gunther():
    chart = make_chart(SpaceKind("JstarGunther", 1, 1))
    zero = Theta_gamma("JstarGunther", ConnectionCoefficients.zero(1, 1))
    assert zero == VForm.from_terms(chart, 1, 1, [(["y1"], (1,), var("p1_1"))])
    c = Theta_gamma("JstarGunther", ConnectionCoefficients(1, 1, ((5,),)))
    assert c - zero == VForm.from_terms(chart, 1, 1, [(["x1"], (1,), 5 * var("p1_1"))])


def test_theta_gamma_kt_n2():
    chart = make_chart(SpaceKind("JstarKT", 2, 1))
    dx1, dx2, dy1 = (VForm.differential(chart, s) for s in ("x1", "x2", "y1"))
    expected = wedge(dy1, dx2) * var("p1_1") - wedge(dy1, dx1) * var("p2_1")
    assert Theta_gamma("JstarKT", ConnectionCoefficients.zero(2, 1)) == expected


def test_theta_gamma_rejects_other_spaces():
    with pytest.raises(BadDimensions):
        Theta_gamma("Z", ConnectionCoefficients.zero(1, 1))


@pytest.mark.parametrize("n,k", SIZES)
def test_euler_field(n, k):
    E = euler_field(n, k)
    chart = E.chart
    assert all(name not in E.components for name in chart.with_role("base") + chart.with_role("fiber"))
    assert E == VField(chart, {name: var(name) for name in chart.with_role("momentum")})
    assert interior(E, ext_d(Theta_Z(n, k))) == Theta_Z(n, k)
    f = momentum_observable_Z(ProjectableField.from_mapping(n, k, {"y1": 1}), n, k).body
    assert interior(E, ext_d(f)) == f


def test_connection_validation():
    with pytest.raises(BadDimensions):
        ConnectionCoefficients(1, 1, ((var("p"),),))
    with pytest.raises(BadDimensions):
        ConnectionCoefficients(2, 1, ((1,),))


@pytest.mark.parametrize("n,k", [(1, 1), (2, 1), (1, 2), (2, 2), (1, 3), (3, 1)])
def test_structure_rank_full_at_nonsingular_points(n, k):
    rng = SplitMix64(11)
    dim = make_chart(SpaceKind("LVY", n, k)).dim
    for _ in range(3):
        point = random_frame_point(rng, n, k).chart_point()
        for m in range(1, n + k):
            assert structure_rank_at(n, k, m, point) == dim


def test_structure_rank_bad_m():
    with pytest.raises(BadDimensions):
        structure_rank_at(1, 1, 0, {})
