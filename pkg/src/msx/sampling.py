"""Random exact inputs for the verification suites, all drawn from :class:`SplitMix64`."""

from __future__ import annotations

from itertools import combinations_with_replacement
from typing import Sequence

from .bundlemaps import FramePoint, GroupElement, MomentumLabel
from .hamilton import ProjectableField
from .linsolve import det
from .rng import SplitMix64
from .scalar import ONE, ZERO, Scalar, var
from .spaces import ConnectionCoefficients, x, y

__all__ = [
    "random_polynomial",
    "random_projectable",
    "random_nonprojectable",
    "random_matrix",
    "random_invertible",
    "random_group_element",
    "random_base_point",
    "random_frame_point",
    "random_label",
    "random_connection",
]


def random_polynomial(rng: SplitMix64, names: Sequence[str], degree: int = 2,
                      density: int = 3) -> Scalar:
    """Sum of about ``density`` monomials of total degree at most ``degree``."""
    monomials = [()]
    for d in range(1, degree + 1):
        monomials += list(combinations_with_replacement(names, d))
    total = ZERO
    for _ in range(density):
        mono = rng.choice(monomials)
        term = ONE * rng.rational(nonzero=True)
        for name in mono:
            term = term * var(name)
        total = total + term
    return total


def _base(n: int) -> list:
    return [x(i) for i in range(1, n + 1)]


def _fiber(k: int) -> list:
    return [y(a) for a in range(1, k + 1)]


def random_projectable(rng: SplitMix64, n: int, k: int, degree: int = 2) -> ProjectableField:
    vi = [random_polynomial(rng, _base(n), degree) for _ in range(n)]
    vA = [random_polynomial(rng, _base(n) + _fiber(k), degree) for _ in range(k)]
    return ProjectableField(n, k, tuple(vi), tuple(vA))


def random_nonprojectable(rng: SplitMix64, n: int, k: int, degree: int = 2) -> dict:
    """Components of a field on Y whose first base component depends on a fiber coordinate."""
    names = _base(n) + _fiber(k)
    comps = {c: random_polynomial(rng, names, degree) for c in names}
    comps[x(1)] = comps[x(1)] + var(rng.choice(_fiber(k))) * rng.rational(nonzero=True)
    return comps


def random_matrix(rng: SplitMix64, rows: int, cols: int) -> list:
    return [[rng.rational() for _ in range(cols)] for _ in range(rows)]


def random_invertible(rng: SplitMix64, size: int) -> list:
    while True:
        m = random_matrix(rng, size, size)
        if det(m) != 0:
            return m


def random_group_element(rng: SplitMix64, n: int, k: int) -> GroupElement:
    return GroupElement(random_invertible(rng, n), random_invertible(rng, k), random_matrix(rng, k, n))


def random_base_point(rng: SplitMix64, n: int, k: int) -> dict:
    return {c: rng.rational() for c in _base(n) + _fiber(k)}


def random_frame_point(rng: SplitMix64, n: int, k: int, base: dict | None = None) -> FramePoint:
    base = random_base_point(rng, n, k) if base is None else base
    N = random_invertible(rng, n)
    K = random_invertible(rng, k)
    A = random_matrix(rng, k, n)
    E = [list(row) + [0] * k for row in N] + [list(a) + list(b) for a, b in zip(A, K)]
    return FramePoint(n, k, base, E)


def random_label(rng: SplitMix64, n: int, k: int) -> MomentumLabel:
    return MomentumLabel(random_matrix(rng, n, k), rng.rational())


def random_connection(rng: SplitMix64, n: int, k: int, degree: int = 1) -> ConnectionCoefficients:
    names = _base(n) + _fiber(k)
    return ConnectionCoefficients(
        n, k, tuple(tuple(random_polynomial(rng, names, degree) for _ in range(n)) for _ in range(k)))
