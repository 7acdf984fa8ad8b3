import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_matrix, sympy_rank, sympy_rref, to_sympy
from mfrf import linalg
from mfrf.exactnum import as_exact, root_of_unity

q = as_exact


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 6), st.integers(0, 10**6))
def test_rref_matches_sympy(rows, cols, seed):
    m = random_matrix(random.Random(seed), rows, cols, -2, 2)
    r, ops, pivots = linalg.rref(m)
    ref, ref_pivots = sympy_rref(m)
    assert to_sympy(r) == ref
    assert [c for _, c in pivots] == list(ref_pivots)
    # ops replay onto m
    work = linalg.copy(m)
    for op in ops:
        linalg.apply_row_op(work, op)
    assert work == r


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 10**6))
def test_inverse_and_det(d, seed):
    m = random_matrix(random.Random(seed), d, d)
    if sympy_rank(m) < d:
        assert not linalg.det(m)
        with pytest.raises(linalg.SingularMatrix):
            linalg.inverse(m)
        return
    inv = linalg.inverse(m)
    assert linalg.is_identity(linalg.matmul(m, inv))
    assert to_sympy([[linalg.det(m)]])[0] == to_sympy(m).det()


def test_nullspace():
    m = [[q(1), q(2), q(3)], [q(2), q(4), q(6)]]
    ns = linalg.nullspace(m)
    assert len(ns) == 2
    for v in ns:
        assert all(not x for x in linalg.matvec(m, v))


def test_charpoly_and_roots():
    sx = [[q(0), q(1)], [q(1), q(0)]]
    roots = linalg.field_roots(linalg.charpoly(sx))
    assert sorted(r.as_rational() for r in roots) == [-1, 1]
    rot = [[q(0), q(-1)], [q(1), q(0)]]
    i = root_of_unity(4, 1)
    roots = linalg.field_roots(linalg.charpoly(rot))
    assert any(r == i for r in roots) and any(r == -i for r in roots)


def test_irrational_spectrum():
    m = [[q(0), q(1), q(0)], [q(0), q(0), q(1)], [q(2), q(0), q(0)]]  # x^3 = 2
    with pytest.raises(linalg.IrrationalSpectrum):
        linalg.diagonalize(m)


def test_diagonalize_3x3():
    m = [[q(2), q(1), q(0)], [q(0), q(3), q(1)], [q(0), q(0), q(5)]]
    s, dmat = linalg.diagonalize(m)
    assert linalg.matmul(linalg.matmul(s, m), linalg.inverse(s)) == dmat
    with pytest.raises(ValueError):
        linalg.diagonalize([[q(1), q(1)], [q(0), q(1)]])
