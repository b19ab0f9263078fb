"""Exact linear algebra: Bareiss elimination plus small dense-matrix helpers.

Entries may be ints, Fractions or :class:`~msx.scalar.Scalar` values; the
routines only use ``+ - * /`` and a zero test.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from typing import Sequence

from .errors import BadDimensions, SingularFrame

__all__ = [
    "BareissEliminator",
    "column_rank",
    "det",
    "inverse",
    "matmul",
    "identity",
    "transpose",
    "det_leibniz",
    "adjugate",
    "permutation_sign",
]


def _div(a, b):
    if isinstance(a, int) and isinstance(b, int):
        return _norm(Fraction(a, b))
    return a / b


def _is_zero(x) -> bool:
    z = getattr(x, "is_zero", None)
    return z() if z is not None else x == 0


class BareissEliminator:
    """Fraction-free forward elimination of a fixed sparse matrix.

    ``rows`` are mappings ``column -> entry``.  The row operations are
    recorded so that :meth:`solve` can replay them on any right-hand side,
    which lets one factorization serve many observables.
    """

    def __init__(self, rows: Sequence[dict], ncols: int):
        self.ncols = ncols
        self.nrows = len(rows)
        work = [dict((c, v) for c, v in r.items() if not _is_zero(v)) for r in rows]
        # rows with no coefficients only constrain the right-hand side
        self._live = [i for i, r in enumerate(work) if r]
        self._dead = [i for i, r in enumerate(work) if not r]
        mat = [work[i] for i in self._live]
        ops = []
        prev = 1
        r = 0
        pivots = []
        m = len(mat)
        for c in range(ncols):
            sel = next((i for i in range(r, m) if c in mat[i]), None)
            if sel is None:
                continue
            if sel != r:
                mat[sel], mat[r] = mat[r], mat[sel]
            p = mat[r][c]
            prow = mat[r]
            touched = []
            for i in range(r + 1, m):
                row = mat[i]
                a = row.pop(c, None)
                if a is None:
                    if p != prev:
                        mat[i] = {j: _div(v * p, prev) for j, v in row.items()}
                    continue
                new = {}
                for j in set(row) | set(prow):
                    if j == c:
                        continue
                    v = row.get(j)
                    w = prow.get(j)
                    if v is None:
                        val = -(a * w)
                    elif w is None:
                        val = p * v
                    else:
                        val = p * v - a * w
                    if prev != 1:
                        val = _div(val, prev)
                    if not _is_zero(val):
                        new[j] = val
                touched.append((i, a))
                mat[i] = new
            ops.append((sel, r, p, prev, tuple(touched)))
            pivots.append(c)
            prev = p
            r += 1
        self.rank = r
        self._rows = mat
        self._ops = ops
        self.pivots = tuple(pivots)

    @property
    def kernel_dimension(self) -> int:
        return self.ncols - self.rank

    def solve(self, rhs: Sequence, zero=0):
        """Return ``(solution, consistent)``; free columns are set to ``zero``."""
        b_all = list(rhs)
        for i in self._dead:
            if not _is_zero(b_all[i]):
                return None, False
        b = [b_all[i] for i in self._live]
        m = len(b)
        for sel, r, p, prev, touched in self._ops:
            if sel != r:
                b[sel], b[r] = b[r], b[sel]
            hit = dict(touched)
            br = b[r]
            for i in range(r + 1, m):
                a = hit.get(i)
                bi = b[i]
                if a is None:
                    if p != prev and not _is_zero(bi):
                        b[i] = _div(bi * p, prev)
                    continue
                if _is_zero(br):
                    val = bi * p
                elif _is_zero(bi):
                    val = -(br * a)
                else:
                    val = bi * p - br * a
                b[i] = _div(val, prev) if prev != 1 else val
        for i in range(self.rank, m):
            if not _is_zero(b[i]):
                return None, False
        x = [zero] * self.ncols
        for t in range(self.rank - 1, -1, -1):
            c = self.pivots[t]
            row = self._rows[t]
            acc = b[t]
            for j, v in row.items():
                if j != c and not _is_zero(x[j]):
                    acc = acc - v * x[j]
            x[c] = _div(acc, row[c])
        return x, True


def column_rank(rows: Sequence[Sequence], ncols: int) -> int:
    """Rank of a dense rational matrix, stopping as soon as it is full."""
    basis: dict[int, list] = {}
    for raw in rows:
        row = [Fraction(v) for v in raw]
        for c in sorted(basis):
            if row[c]:
                f = row[c]
                brow = basis[c]
                row = [x - f * y for x, y in zip(row, brow)]
        lead = next((c for c in range(ncols) if row[c]), None)
        if lead is None:
            continue
        inv = 1 / row[lead]
        row = [x * inv for x in row]
        for c, brow in basis.items():
            if brow[lead]:
                f = brow[lead]
                basis[c] = [x - f * y for x, y in zip(brow, row)]
        basis[lead] = row
        if len(basis) == ncols:
            break
    return len(basis)


def identity(n: int) -> list[list]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def transpose(a: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*a)] if a else []


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    if a and b and len(a[0]) != len(b):
        raise BadDimensions("matrix shapes do not compose")
    bt = transpose(b)
    if not bt:
        return [[] for _ in a]
    out = []
    for row in a:
        out.append([_norm(sum((x * y for x, y in zip(row, col)), 0)) for col in bt])
    return out


def _norm(c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def det(a: Sequence[Sequence]):
    """Determinant of a square rational matrix by Bareiss elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(r) for r in a]
    sign = 1
    prev = 1
    for c in range(n - 1):
        if m[c][c] == 0:
            swap = next((i for i in range(c + 1, n) if m[i][c] != 0), None)
            if swap is None:
                return 0
            m[c], m[swap] = m[swap], m[c]
            sign = -sign
        p = m[c][c]
        for i in range(c + 1, n):
            for j in range(c + 1, n):
                m[i][j] = Fraction(p * m[i][j] - m[i][c] * m[c][j]) / prev
            m[i][c] = 0
        prev = p
    return _norm(sign * Fraction(m[n - 1][n - 1]))


def inverse(a: Sequence[Sequence]) -> list[list]:
    """Inverse of a square rational matrix by Gauss-Jordan elimination."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(a)]
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            raise SingularFrame("matrix is singular")
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for i in range(n):
            if i != c and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return [[_norm(x) for x in row[n:]] for row in m]


def permutation_sign(seq: Sequence[int]) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def det_leibniz(a: Sequence[Sequence]):
    """Determinant by the permutation expansion; works over any commutative ring."""
    n = len(a)
    total = 0
    for perm in permutations(range(n)):
        term = permutation_sign(perm)
        for i, j in enumerate(perm):
            term = a[i][j] * term
        total = total + term
    return total


def adjugate(a: Sequence[Sequence]) -> list[list]:
    """Classical adjoint, so that ``a @ adjugate(a) = det(a) I``."""
    n = len(a)
    if n == 1:
        return [[a[0][0] * 0 + 1]]
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[a[r][c] for c in range(n) if c != i] for r in range(n) if r != j]
            cof = det_leibniz(minor)
            out[i][j] = cof if (i + j) % 2 == 0 else -cof
    return out
