from fractions import Fraction

import numpy as np
from hypothesis import given
import hypothesis.strategies as st

from cylred import linalg as la
from cylred.scalars import Scalar

from strategies import scalars, vectors

int_rows = st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3), min_size=1, max_size=4)


@given(st.lists(vectors(4), min_size=1, max_size=5))
def test_nullspace_is_annihilated(rows):
    for z in la.nullspace(rows, 4):
        assert la.is_zero_vec(la.matvec(rows, z))
    assert la.rank(rows) + len(la.nullspace(rows, 4)) == 4


@given(st.lists(vectors(3), min_size=3, max_size=3), vectors(3))
def test_solve_round_trip(m, x):
    b = la.matvec(m, x)
    y = la.solve(m, b, 3)
    assert y is not None and la.matvec(m, y) == b


@given(st.lists(vectors(3), min_size=3, max_size=3))
def test_determinant_matches_float(m):
    assert abs(float(la.determinant(m)) - np.linalg.det(la.to_float(m))) <= 1e-8 * (1 + abs(np.linalg.det(la.to_float(m))))


@given(int_rows)
def test_hnf_is_canonical(rows):
    H = la.hnf(rows)
    # the same lattice from a unimodular change of generators
    shuffled = [list(r) for r in reversed(rows)] + [[a + b for a, b in zip(rows[0], rows[-1])]]
    assert la.hnf(shuffled) == H
    for i, r in enumerate(H):
        p = next(j for j, x in enumerate(r) if x)
        assert r[p] > 0
        for above in H[:i]:
            assert 0 <= above[p] < r[p]


@given(int_rows)
def test_hnf_transform_is_unimodular(rows):
    H, U, k = la.hnf_with_transform(rows)
    A = np.array(rows, dtype=object)
    UA = np.array(U, dtype=object).dot(A)
    assert [list(r) for r in UA[:k]] == H
    assert all(not any(r) for r in UA[k:])
    assert abs(round(np.linalg.det(np.array(U, dtype=float)))) == 1


def test_integer_kernel_saturated():
    rows = [[Fraction(2), Fraction(4), Fraction(-6)]]
    K = la.integer_kernel(rows, 3)
    assert len(K) == 2
    for z in K:
        assert 2 * z[0] + 4 * z[1] - 6 * z[2] == 0
    # (-2, 1, 0) and (3, 0, 1) must both be integer combinations
    assert la.hnf(K + [[-2, 1, 0], [3, 0, 1]]) == la.hnf(K)


def test_orthogonal_complement_and_projection():
    r2 = Scalar(0, 1, 2)
    V = [[Scalar(1), r2, Scalar(0)]]
    C = la.orthogonal_complement(V, 3)
    assert len(C) == 2
    assert all(la.dot(c, V[0]).is_zero() for c in C)
    x = [Scalar(3), Scalar(1), Scalar(2)]
    assert la.in_span(C, la.project_off(V, x))
