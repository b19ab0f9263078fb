from hypothesis import given
from hypothesis import strategies as st

from msx.linsolve import (
    BareissEliminator,
    adjugate,
    column_rank,
    det,
    det_leibniz,
    identity,
    inverse,
    matmul,
    permutation_sign,
    transpose,
)
from msx.scalar import var

from strategies import small_fraction


def square(size):
    return st.lists(st.lists(small_fraction, min_size=size, max_size=size), min_size=size, max_size=size)


@given(st.integers(min_value=1, max_value=4).flatmap(square))
def test_det_routes_agree(a):
    assert det(a) == det_leibniz(a)


@given(st.integers(min_value=1, max_value=4).flatmap(square))
def test_inverse_and_adjugate(a):
    d = det(a)
    n = len(a)
    adj = adjugate(a)
    prod = matmul(a, adj)
    assert prod == [[d if i == j else 0 for j in range(n)] for i in range(n)]
    if d != 0:
        assert matmul(a, inverse(a)) == identity(n)


@given(st.integers(min_value=1, max_value=4).flatmap(square))
def test_det_of_transpose(a):
    assert det(transpose(a)) == det(a)


def test_permutation_sign():
    assert permutation_sign([0, 1, 2]) == 1
    assert permutation_sign([1, 0, 2]) == -1
    assert permutation_sign([2, 0, 1]) == 1


def test_symbolic_determinant():
    a, b, c, d = (var(s) for s in "abcd")
    assert det_leibniz([[a, b], [c, d]]) == a * d - b * c


def test_rank():
    assert column_rank([[1, 2], [2, 4]], 2) == 1
    assert column_rank([[1, 0], [0, 1]], 2) == 2


@given(st.integers(min_value=1, max_value=4).flatmap(square), st.data())
def test_eliminator_solves_consistent_systems(a, data):
    n = len(a)
    xs = data.draw(st.lists(small_fraction, min_size=n, max_size=n))
    rhs = [sum(row[j] * xs[j] for j in range(n)) for row in a]
    elim = BareissEliminator([{j: v for j, v in enumerate(row)} for row in a], n)
    sol, ok = elim.solve(rhs)
    assert ok
    assert [sum(row[j] * sol[j] for j in range(n)) for row in a] == rhs
    if det(a) != 0:
        assert sol == xs
        assert elim.kernel_dimension == 0


def test_eliminator_reports_inconsistency():
    elim = BareissEliminator([{0: 1, 1: 1}, {0: 2, 1: 2}], 2)
    _, ok = elim.solve([1, 3])
    assert not ok
    assert elim.kernel_dimension == 1


def test_symbolic_solve():
    t = var("t")
    elim = BareissEliminator([{0: t, 1: 1}, {1: t}], 2)
    sol, ok = elim.solve([t + 1, t])
    assert ok and sol[0] == 1 and sol[1] == 1
