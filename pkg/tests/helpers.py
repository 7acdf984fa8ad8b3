"""Shared generators and independent oracles for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

import sympy

from mfrf.elo import AddMul, Scale, SitedOp, Swap, apply_sequence
from mfrf.exactnum import ExactScalar, as_exact, root_of_unity
from mfrf.state import MultiState


def small_rational(rng: random.Random, lo: int = 1, hi: int = 9) -> ExactScalar:
    num = rng.randint(lo, hi) * rng.choice((1, -1))
    return as_exact(Fraction(num, rng.randint(1, 5)))


def random_op(rng: random.Random, dims, *, gaussian: bool = False) -> SitedOp:
    site = rng.randint(1, len(dims))
    d = dims[site - 1]
    lam = small_rational(rng)
    if gaussian and rng.random() < 0.3:
        lam = lam * root_of_unity(4, 1) + small_rational(rng)
    kind = rng.randrange(3)
    if kind == 0:
        i, j = rng.sample(range(d), 2)
        return SitedOp(site, Swap(i, j))
    if kind == 1:
        return SitedOp(site, Scale(rng.randrange(d), lam))
    i, j = rng.sample(range(d), 2)
    return SitedOp(site, AddMul(i, lam, j))


def random_sequence(rng: random.Random, dims, length: int, **kw) -> list[SitedOp]:
    return [random_op(rng, dims, **kw) for _ in range(length)]


def scramble(state: MultiState, rng: random.Random, length: int = 15, **kw):
    seq = random_sequence(rng, state.dims, rng.randint(1, length), **kw)
    return apply_sequence(state, seq), seq


def random_state(rng: random.Random, dims, density: float = 0.7) -> MultiState:
    coeffs = [small_rational(rng, 0, 4) if rng.random() < density else as_exact(0) for _ in range(_size(dims))]
    if not any(coeffs):
        coeffs[rng.randrange(len(coeffs))] = as_exact(1)
    return MultiState(dims, coeffs)


def _size(dims) -> int:
    out = 1
    for d in dims:
        out *= d
    return out


def random_matrix(rng: random.Random, rows: int, cols: int, lo: int = -4, hi: int = 4):
    return [[as_exact(Fraction(rng.randint(lo, hi), rng.randint(1, 3))) for _ in range(cols)] for _ in range(rows)]


def random_invertible(rng: random.Random, d: int):
    while True:
        m = random_matrix(rng, d, d)
        if sympy_rank(m) == d:
            return m


def to_sympy(m) -> sympy.Matrix:
    def conv(x):
        if x.is_rational():
            q = x.as_rational()
            return sympy.Rational(int(q.numerator), int(q.denominator))
        z = sympy.exp(2 * sympy.pi * sympy.I / x.order)
        return sum(sympy.Rational(int(c.numerator), int(c.denominator)) * z**j for j, c in enumerate(x.coeffs))

    return sympy.Matrix([[conv(x) for x in row] for row in m])


def sympy_rank(m) -> int:
    return to_sympy(m).rank(simplify=True)


def sympy_rref(m):
    """Textbook RREF from an independent implementation."""
    r, pivots = to_sympy(m).rref()
    return r, pivots


def matrix_eq_sympy(m, s: sympy.Matrix) -> bool:
    return (to_sympy(m) - s).applyfunc(sympy.nsimplify).is_zero_matrix


def dense_matmul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    out = [[as_exact(0)] * m for _ in range(n)]
    for i in range(n):
        for j in range(m):
            acc = as_exact(0)
            for t in range(k):
                acc = acc + a[i][t] * b[t][j]
            out[i][j] = acc
    return out


def brute_unfold(state: MultiState, site: int):
    """Unfolding built by enumerating multi-indices, independent of the stride code."""
    from itertools import product

    k = site - 1
    rest = [range(d) for j, d in enumerate(state.dims) if j != k]
    rows = []
    for lv in range(state.dims[k]):
        row = []
        for r in product(*rest):
            idx = list(r[:k]) + [lv] + list(r[k:])
            row.append(state.coeffs[sum(i * s for i, s in zip(idx, _strides(state.dims)))])
        rows.append(row)
    return rows


def _strides(dims):
    out = []
    acc = 1
    for d in reversed(dims):
        out.append(acc)
        acc *= d
    return list(reversed(out))


def parse_product(text: str) -> list[SitedOp]:
    """Read operator-product notation like ``L3(1,1,0) L4(0,-1,1)`` into application order."""
    import re

    ops = []
    for kind, site, args in re.findall(r"([FSL])_?(\d+)\(([^)]*)\)", text.replace("−", "-")):
        parts = [p.strip() for p in args.split(",")]
        site = int(site)
        if kind == "F":
            ops.append(SitedOp(site, Swap(int(parts[0]), int(parts[1]))))
        elif kind == "S":
            ops.append(SitedOp(site, Scale(int(parts[0]), as_exact(parts[1]))))
        else:
            ops.append(SitedOp(site, AddMul(int(parts[0]), as_exact(parts[1]), int(parts[2]))))
    return list(reversed(ops))
