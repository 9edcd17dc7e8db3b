"""Exact integer and rational linear algebra.

Everything here works on plain Python ``int`` (arbitrary precision) and
``fractions.Fraction``; no floating point is used anywhere.  Vectors are
tuples of ints, matrices are lists of row lists.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, prod
from typing import Optional, Sequence

from .errors import LatticeError

__all__ = [
    "primitive",
    "det_exact",
    "rank",
    "SnfResult",
    "smith_normal_form",
    "saturation_basis",
    "is_saturated",
    "complement_basis",
    "project_coordinates",
    "solve_rational",
    "matmul",
    "identity",
    "transpose",
]


def identity(n: int) -> list:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(M):
    return [list(col) for col in zip(*M)]


def matmul(A, B):
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def _as_matrix(M) -> list:
    return [[int(x) for x in row] for row in M]


def primitive(v: Sequence[int]) -> tuple:
    """Divide ``v`` by the gcd of its entries, keeping its direction."""
    g = 0
    for x in v:
        g = gcd(g, int(x))
    if g == 0:
        raise LatticeError("the zero vector has no primitive form")
    return tuple(int(x) // g for x in v)


def det_exact(M) -> int:
    """Determinant by fraction-free (Bareiss) elimination."""
    A = _as_matrix(M)
    n = len(A)
    if any(len(row) != n for row in A):
        raise LatticeError("determinant of a non-square matrix")
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def _row_echelon_rank(rows) -> int:
    A = [[Fraction(x) for x in row] for row in rows]
    if not A:
        return 0
    m, n = len(A), len(A[0])
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        for i in range(r + 1, m):
            if A[i][c]:
                f = A[i][c] / A[r][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        r += 1
        if r == m:
            break
    return r


def rank(M) -> int:
    return _row_echelon_rank(_as_matrix(M))


@dataclass(frozen=True)
class SnfResult:
    """``U @ A @ V == D`` with ``U``, ``V`` unimodular and ``D`` diagonal.

    ``invariant_factors`` has length ``min(rows, cols)`` and satisfies
    ``d_1 | d_2 | ...`` (zeros last).
    """

    invariant_factors: tuple
    U: tuple
    V: tuple
    D: tuple

    @property
    def rank(self) -> int:
        return sum(1 for d in self.invariant_factors if d)

    @property
    def torsion(self) -> tuple:
        return tuple(d for d in self.invariant_factors if d > 1)


def _ext_gcd(a: int, b: int):
    """``(g, x, y)`` with ``a x + b y == g >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def smith_normal_form(M) -> SnfResult:
    A = _as_matrix(M)
    m = len(A)
    n = len(A[0]) if m else 0
    U, V = identity(m), identity(n)

    def row_combine(i, j, a, b, c, d):
        # rows (i, j) <- (a*Ri + b*Rj, c*Ri + d*Rj), ad - bc = +-1
        for X in (A, U):
            ri, rj = X[i], X[j]
            X[i] = [a * x + b * y for x, y in zip(ri, rj)]
            X[j] = [c * x + d * y for x, y in zip(ri, rj)]

    def col_combine(i, j, a, b, c, d):
        for X in (A, V):
            for row in X:
                x, y = row[i], row[j]
                row[i], row[j] = a * x + b * y, c * x + d * y

    for t in range(min(m, n)):
        # choose the smallest nonzero pivot in the trailing block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        if i != t:
            A[t], A[i] = A[i], A[t]
            U[t], U[i] = U[i], U[t]
        if j != t:
            for X in (A, V):
                for row in X:
                    row[t], row[j] = row[j], row[t]
        while True:
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    a, b = A[t][t], A[i][t]
                    if b % a == 0:
                        row_combine(t, i, 1, 0, -(b // a), 1)
                    else:
                        g, x, y = _ext_gcd(a, b)
                        row_combine(t, i, x, y, -b // g, a // g)
                    done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    a, b = A[t][t], A[t][j]
                    if b % a == 0:
                        col_combine(t, j, 1, 0, -(b // a), 1)
                    else:
                        g, x, y = _ext_gcd(a, b)
                        col_combine(t, j, x, y, -b // g, a // g)
                    done = False
            if not done:
                continue
            # enforce divisibility of the remaining block by the pivot
            p = A[t][t]
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if A[i][j] % p), None)
            if bad is None:
                break
            i, _ = bad
            row_combine(t, i, 1, 1, 0, 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
    factors = tuple(A[i][i] for i in range(min(m, n)))
    return SnfResult(factors, tuple(map(tuple, U)), tuple(map(tuple, V)), tuple(map(tuple, A)))


def _inverse_unimodular(M) -> list:
    """Exact inverse of a square integer matrix with determinant +-1."""
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(M)]
    for c in range(n):
        piv = next((i for i in range(c, n) if A[i][c] != 0), None)
        if piv is None:
            raise LatticeError("matrix is singular")
        A[c], A[piv] = A[piv], A[c]
        pv = A[c][c]
        A[c] = [x / pv for x in A[c]]
        for i in range(n):
            if i != c and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    out = []
    for row in A:
        vals = row[n:]
        if any(x.denominator != 1 for x in vals):
            raise LatticeError("matrix is not unimodular")
        out.append([int(x) for x in vals])
    return out


def is_saturated(vs) -> bool:
    """True iff the rows generate a saturated sublattice."""
    vs = _as_matrix(vs)
    if not vs:
        return True
    snf = smith_normal_form(vs)
    return all(d == 1 for d in snf.invariant_factors)


def saturation_basis(vs) -> list:
    """Basis of ``span_R(vs) & Z^n`` for linearly independent rows ``vs``.

    Returns the input unchanged when it already generates a saturated
    lattice; otherwise the first ``k`` rows of ``V^-1`` from the Smith form.
    """
    vs = [tuple(int(x) for x in v) for v in vs]
    if not vs:
        return []
    k = len(vs)
    snf = smith_normal_form(vs)
    if snf.rank < k:
        raise LatticeError("saturation of linearly dependent vectors")
    if all(d == 1 for d in snf.invariant_factors):
        return vs
    Vinv = _inverse_unimodular([list(r) for r in snf.V])
    return [tuple(row) for row in Vinv[:k]]


def complement_basis(sat, explicit=None, n: Optional[int] = None) -> list:
    """Vectors completing the saturated basis ``sat`` to a basis of ``Z^n``.

    With ``explicit`` the supplied complement is only checked (the stacked
    matrix must have determinant +-1).
    """
    sat = [tuple(int(x) for x in v) for v in sat]
    if n is None:
        if sat:
            n = len(sat[0])
        elif explicit:
            n = len(explicit[0])
        else:
            raise LatticeError("ambient rank unknown for empty basis")
    if sat and not is_saturated(sat):
        raise LatticeError("basis does not span a saturated sublattice")
    if sat and rank(sat) < len(sat):
        raise LatticeError("saturated basis is linearly dependent")
    if explicit is not None:
        comp = [tuple(int(x) for x in v) for v in explicit]
        if len(sat) + len(comp) != n or abs(det_exact(sat + comp)) != 1:
            raise LatticeError("supplied complement is not unimodular with the basis")
        return comp
    if not sat:
        return [tuple(r) for r in identity(n)]
    snf = smith_normal_form(sat)
    Vinv = _inverse_unimodular([list(r) for r in snf.V])
    return [tuple(row) for row in Vinv[len(sat):]]


def project_coordinates(v, sat, comp) -> tuple:
    """Coordinates of ``v`` along ``comp`` in the basis ``sat + comp``.

    This is the image of ``v`` in ``Z^n / span(sat)`` written in the
    basis induced by ``comp``.
    """
    basis = [list(b) for b in sat] + [list(c) for c in comp]
    n = len(basis)
    if n == 0 or any(len(b) != n for b in basis):
        raise LatticeError("sat + comp is not a square basis")
    if abs(det_exact(basis)) != 1:
        raise LatticeError("sat + comp is not a Z-basis")
    # v = x @ basis  =>  x = v @ basis^-1
    inv = _inverse_unimodular(basis)
    x = [sum(int(v[i]) * inv[i][j] for i in range(n)) for j in range(n)]
    return tuple(x[len(sat):])


def solve_rational(columns, b) -> Optional[tuple]:
    """Unique ``c`` with ``sum c_i columns[i] == b``, or None if b is outside the span."""
    cols = [[Fraction(int(x)) for x in c] for c in columns]
    if not cols:
        return () if all(x == 0 for x in b) else None
    n = len(cols[0])
    k = len(cols)
    if rank(columns) < k:
        raise LatticeError("columns are linearly dependent")
    A = [[cols[j][i] for j in range(k)] + [Fraction(int(b[i]))] for i in range(n)]
    r = 0
    pivots = []
    for c in range(k):
        piv = next(i for i in range(r, n) if A[i][c] != 0)
        A[r], A[piv] = A[piv], A[r]
        pv = A[r][c]
        A[r] = [x / pv for x in A[r]]
        for i in range(n):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(r)
        r += 1
    if any(A[i][k] != 0 for i in range(r, n)):
        return None
    return tuple(A[i][k] for i in pivots)


def group_order(factors) -> int:
    """Order of ``Z^d / <rows>`` from its invariant factors (0 if infinite)."""
    return 0 if any(d == 0 for d in factors) else prod(factors)
