"""Small dense linear algebra over exact (or tolerance-float) scalars.

Matrices are lists of row lists.  Every routine only uses ``+ - * /``,
``bool`` (nonzero test) and ``==`` on entries, so it runs unchanged on
:class:`~mfrf.exactnum.ExactScalar` and :class:`~mfrf.exactnum.FloatScalar`.

Row operations produced by elimination are reported as plain tuples
``("F", i, j)``, ``("S", k, lam)`` and ``("L", i, lam, j)`` meaning swap rows,
scale row k by lam, and add lam times row i to row j.  They are listed in the
order they were applied.
"""

from __future__ import annotations

import math
from typing import Sequence

from mfrf.exactnum import (
    ONE,
    ZERO,
    ExactScalar,
    FloatScalar,
    common_order,
    exact_sqrt,
    recognize_in_field,
    totient,
)

Matrix = list


class SingularMatrix(ArithmeticError):
    pass


class IrrationalSpectrum(ArithmeticError):
    """Eigenvalues are not representable in the working field."""


def zeros(rows: int, cols: int) -> Matrix:
    return [[ZERO] * cols for _ in range(rows)]


def identity(d: int) -> Matrix:
    return [[ONE if i == j else ZERO for j in range(d)] for i in range(d)]


def copy(m: Matrix) -> Matrix:
    return [list(r) for r in m]


def transpose(m: Matrix) -> Matrix:
    return [list(col) for col in zip(*m)] if m else []


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    out = []
    for row in a:
        out_row = []
        for col in bt:
            acc = ZERO
            for x, y in zip(row, col):
                if x and y:
                    acc = acc + x * y
            out_row.append(acc)
        out.append(out_row)
    return out


def matvec(a: Matrix, v: Sequence) -> list:
    out = []
    for row in a:
        acc = ZERO
        for x, y in zip(row, v):
            if x and y:
                acc = acc + x * y
        out.append(acc)
    return out


def equal(a: Matrix, b: Matrix) -> bool:
    return len(a) == len(b) and all(
        len(r) == len(s) and all(x == y for x, y in zip(r, s)) for r, s in zip(a, b)
    )


def is_identity(m: Matrix) -> bool:
    return equal(m, identity(len(m)))


def apply_row_op(m: Matrix, op: tuple) -> None:
    """Apply one row operation in place."""
    kind = op[0]
    if kind == "F":
        _, i, j = op
        m[i], m[j] = m[j], m[i]
    elif kind == "S":
        _, k, lam = op
        m[k] = [x * lam if x else x for x in m[k]]
    elif kind == "L":
        _, i, lam, j = op
        src = m[i]
        m[j] = [y + lam * x if x else y for x, y in zip(src, m[j])]
    else:
        raise ValueError(f"unknown row op {op!r}")


def rref(m: Matrix) -> tuple[Matrix, list[tuple], list[tuple[int, int]]]:
    """Reduced row echelon form with the row operations that produce it.

    Pivot search scans columns left to right and takes the first nonzero row
    at or below the current pivot row.  Returns ``(R, ops, pivots)`` with
    pivots as ``(row, col)`` pairs.
    """
    r = copy(m)
    ops: list[tuple] = []
    pivots: list[tuple[int, int]] = []
    rows = len(r)
    cols = len(r[0]) if rows else 0
    prow = 0
    for c in range(cols):
        if prow == rows:
            break
        src = next((i for i in range(prow, rows) if r[i][c]), None)
        if src is None:
            continue
        if src != prow:
            op = ("F", prow, src)
            apply_row_op(r, op)
            ops.append(op)
        piv = r[prow][c]
        if not piv == ONE:
            op = ("S", prow, ONE / piv if isinstance(piv, ExactScalar) else piv.inverse())
            apply_row_op(r, op)
            ops.append(op)
        for i in range(rows):
            if i != prow and r[i][c]:
                op = ("L", prow, -r[i][c], i)
                apply_row_op(r, op)
                ops.append(op)
                if not isinstance(r[i][c], ExactScalar):
                    r[i][c] = ZERO  # float residue
        pivots.append((prow, c))
        prow += 1
    if r and not isinstance(r[0][0], ExactScalar):
        r = [[x if x else ZERO for x in row] for row in r]
    return r, ops, pivots


def rank(m: Matrix) -> int:
    if not m or not m[0]:
        return 0
    return len(rref(m)[2])


def inverse(m: Matrix) -> Matrix:
    d = len(m)
    aug = [list(row) + [ONE if i == j else ZERO for j in range(d)] for i, row in enumerate(m)]
    r, _, pivots = rref(aug)
    if len(pivots) < d or pivots[d - 1][1] >= d:
        raise SingularMatrix("matrix is singular")
    return [row[d:] for row in r]


def det(m: Matrix):
    r = copy(m)
    d = len(r)
    acc = ONE
    for c in range(d):
        src = next((i for i in range(c, d) if r[i][c]), None)
        if src is None:
            return ZERO
        if src != c:
            r[c], r[src] = r[src], r[c]
            acc = -acc
        piv = r[c][c]
        acc = acc * piv
        inv = ONE / piv if isinstance(piv, ExactScalar) else piv.inverse()
        for i in range(c + 1, d):
            if r[i][c]:
                f = r[i][c] * inv
                r[i] = [y - f * x for x, y in zip(r[c], r[i])]
    return acc


def nullspace(m: Matrix) -> list[list]:
    """Basis of {v : m v = 0}."""
    if not m:
        return []
    cols = len(m[0])
    r, _, pivots = rref(m)
    pivot_cols = {c for _, c in pivots}
    basis = []
    for free in range(cols):
        if free in pivot_cols:
            continue
        v = [ZERO] * cols
        v[free] = ONE
        for row, c in pivots:
            v[c] = -r[row][free]
        basis.append(v)
    return basis


def solve_least(a: Matrix, b: Sequence):
    """A solution x of a x = b when the system is consistent, else None."""
    cols = len(a[0]) if a else 0
    aug = [list(row) + [bi] for row, bi in zip(a, b)]
    r, _, pivots = rref(aug)
    if any(c == cols for _, c in pivots):
        return None
    x = [ZERO] * cols
    for row, c in pivots:
        x[c] = r[row][cols]
    return x


# ---------------------------------------------------------------------------
# spectra


def charpoly(m: Matrix) -> list:
    """Coefficients of det(x I - m), lowest degree first (Faddeev-LeVerrier)."""
    d = len(m)
    coeffs = [ZERO] * (d + 1)
    coeffs[d] = ONE
    mk = zeros(d, d)
    for k in range(1, d + 1):
        # M_k = m (M_{k-1} + c_{d-k+1} I)
        prev = [row[:] for row in mk]
        for i in range(d):
            prev[i][i] = prev[i][i] + coeffs[d - k + 1]
        mk = matmul(m, prev)
        tr = ZERO
        for i in range(d):
            tr = tr + mk[i][i]
        coeffs[d - k] = -tr / ExactScalar.rational(k)
    return coeffs


def poly_eval(coeffs: Sequence, x):
    acc = ZERO
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def poly_deflate(coeffs: Sequence, root) -> list:
    """Divide by (x - root), discarding the remainder."""
    n = len(coeffs) - 1
    out = [ZERO] * n
    acc = ZERO
    for k in range(n, 0, -1):
        acc = acc * root + coeffs[k]
        out[k - 1] = acc
    return out


def _numeric_roots(coeffs: Sequence) -> list[complex]:
    import numpy as np

    c = [x.approx() for x in reversed(coeffs)]
    while c and abs(c[0]) == 0:
        c.pop(0)
    if len(c) <= 1:
        return []
    return [complex(z) for z in np.roots(c)]


def field_roots(coeffs: Sequence) -> list:
    """All roots (with multiplicity) of a polynomial, if they lie in the working field.

    The field is Q(zeta_n) with n the lcm of the coefficient orders.  Raises
    IrrationalSpectrum when some root cannot be placed exactly.
    """
    coeffs = list(coeffs)
    if any(isinstance(c, FloatScalar) for c in coeffs):
        return [FloatScalar(z, _tol(coeffs)) for z in _numeric_roots(coeffs)]
    n = common_order(coeffs)
    roots = []
    while len(coeffs) > 1:
        if len(coeffs) == 2:
            roots.append(-coeffs[0] / coeffs[1])
            break
        if len(coeffs) == 3:
            a, b, c = coeffs[2], coeffs[1], coeffs[0]
            s = exact_sqrt(b * b - ExactScalar.rational(4) * a * c)
            if s is None:
                raise IrrationalSpectrum("discriminant has no square root in the field")
            two_a = ExactScalar.rational(2) * a
            roots.extend([(-b + s) / two_a, (-b - s) / two_a])
            break
        found = _one_root(coeffs, n)
        if found is None:
            raise IrrationalSpectrum("characteristic polynomial does not split")
        roots.append(found)
        coeffs = poly_deflate(coeffs, found)
    return roots


def _tol(coeffs) -> float:
    return next((c.tol for c in coeffs if isinstance(c, FloatScalar)), 1e-10)


def _one_root(coeffs: list, n: int):
    numeric = _numeric_roots(coeffs)
    if not numeric:
        return None
    if n == 1 or totient(n) <= 2:
        for z in numeric:
            for cand in recognize_in_field(z, n if n > 1 else 1):
                if not poly_eval(coeffs, cand):
                    return cand
        if n == 1:
            return None
    ks = [k for k in range(1, n) if math.gcd(k, n) == 1]
    conj_roots = [_numeric_roots([c.galois(k) for c in coeffs]) for k in ks]
    budget = 1
    for rs in conj_roots[1:]:
        budget *= len(rs)
    if budget > 20000:
        return None
    from itertools import product

    for z in numeric:
        for choice in product(*conj_roots[1:]):
            cands = recognize_in_field(z, n, conjugates=[z, *choice])
            for cand in cands:
                if not poly_eval(coeffs, cand):
                    return cand
    return None


def diagonalize(m: Matrix) -> tuple[Matrix, Matrix]:
    """Return (s, diag) with s m s^-1 = diag, or raise.

    Raises IrrationalSpectrum if eigenvalues leave the field and ValueError if
    m is not diagonalizable.
    """
    d = len(m)
    eig = field_roots(charpoly(m))
    distinct: list = []
    for e in eig:
        if not any(e == x for x in distinct):
            distinct.append(e)
    vectors = []
    values = []
    for lam in distinct:
        shifted = [[m[i][j] - (lam if i == j else ZERO) for j in range(d)] for i in range(d)]
        for v in nullspace(shifted):
            vectors.append(v)
            values.append(lam)
    if len(vectors) < d:
        raise ValueError("matrix is not diagonalizable")
    p = transpose(vectors)  # columns are eigenvectors: m p = p diag
    s = inverse(p)
    diag = [[values[i] if i == j else ZERO for j in range(d)] for i in range(d)]
    return s, diag


def jordan_2x2(block: Matrix) -> tuple[Matrix, Matrix]:
    """Similarity s and Jordan form j of a 2x2 matrix, with s block s^-1 = j."""
    (a, b), (c, d) = block
    if not b and not c:
        return identity(2), copy(block)
    if not c:
        l1, l2 = a, d
    else:
        l1, l2 = field_roots(charpoly(block))
    if not l1 == l2:
        # eigenvectors v_i of block; s = [v1 v2]^-1
        vecs = []
        for lam in (l1, l2):
            shifted = [[a - lam, b], [c, d - lam]]
            vecs.append(nullspace(shifted)[0])
        p = transpose(vecs)
        s = inverse(p)
        return s, [[l1, ZERO], [ZERO, l2]]
    lam = l1
    n = [[a - lam, b], [c, d - lam]]
    if not any(x for row in n for x in row):
        return identity(2), copy(block)
    # chain: pick w with n w != 0, v = n w; p = [v w] gives p^-1 block p = [[lam,1],[0,lam]]
    w = [ONE, ZERO] if (n[0][0] or n[1][0]) else [ZERO, ONE]
    v = matvec(n, w)
    p = [[v[0], w[0]], [v[1], w[1]]]
    s = inverse(p)
    return s, [[lam, ONE], [ZERO, lam]]


def approx_matrix(m: Matrix) -> list[list[complex]]:
    return [[x.approx() for x in row] for row in m]
