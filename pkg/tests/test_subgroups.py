import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from cylred.scalars import Scalar, sqrt_of
from cylred.subgroups import (ClosedSubgroup, Cylinder, GeneratedSubgroup, NotClosedError, closed_sum, closure,
                              discreteness_test, intersect_closed, parse_generator_line, preimage, rationalize,
                              subgroup_index)

from strategies import small_int_scalars

R2 = sqrt_of(2)


def v(*xs):
    return [Scalar.coerce(x) for x in xs]


def gen(*vecs):
    return GeneratedSubgroup(len(vecs[0]), tuple(tuple(x) for x in vecs))


def test_kronecker_line_is_dense():
    H = closure(gen(v(1), v(R2)))
    assert H.dim_V == 1 and H.rank_Lambda == 0


def test_rational_generators_stay_discrete():
    G = gen(v(1, 0), v(Scalar(1) / 2, 0), v(0, 3))
    assert discreteness_test(G)
    H = closure(G)
    assert H.dim_V == 0 and H.rank_Lambda == 2
    assert H.contains(v(Scalar(1) / 2, 0))


def test_t4_closure_exact():
    G = gen(v(0, 0, 1, R2), v(-1, 0, 0, 0), v(-R2, 0, 0, 0))
    H = closure(G)
    assert H == ClosedSubgroup.make(4, [v(1, 0, 0, 0)], [v(0, 0, 1, R2)])
    assert Cylinder(H).free_rank == 2 and Cylinder(H).torus_rank == 1


def test_plane_with_three_generators():
    # Z^2 + Z(sqrt2, sqrt2): the line x = y becomes dense
    H = closure(gen(v(1, 0), v(0, 1), v(R2, R2)))
    assert H.dim_V == 1
    assert H.contains(v(R2 / 3, R2 / 3))
    assert not H.contains(v(Scalar(1) / 2, 0))


gen_lists = st.lists(st.lists(small_int_scalars(), min_size=2, max_size=2), min_size=1, max_size=4)


@given(gen_lists)
def test_closure_contains_generators_and_is_idempotent(gens):
    G = gen(*gens)
    H = closure(G)
    assert all(H.contains(g) for g in gens)
    assert closure(H.generating_set()) == H


@given(gen_lists, gen_lists)
def test_closure_monotone(a, b):
    Ha = closure(gen(*a))
    Hab = closure(gen(*(a + b)))
    assert Hab.contains_subgroup(Ha)


@given(gen_lists)
def test_discrete_iff_no_subspace(gens):
    G = gen(*gens)
    assert discreteness_test(G) == (closure(G).dim_V == 0)


def test_make_rejects_dense_lattice():
    with pytest.raises(NotClosedError):
        ClosedSubgroup.make(1, [], [v(1), v(R2)])


def test_intersection_and_preimage():
    A = ClosedSubgroup.make(2, [v(1, 0)], [v(0, 1)])          # R x Z
    B = ClosedSubgroup.make(2, [v(0, 1)], [v(1, 0)])          # Z x R
    assert intersect_closed(A, B) == ClosedSubgroup.make(2, [], [v(1, 0), v(0, 1)], d=0)
    # u -> 2u maps into Z exactly on (1/2) Z
    P = preimage([[Scalar(2)]], ClosedSubgroup.make(1, [], [v(1)]))
    assert P == ClosedSubgroup.make(1, [], [v(Scalar(1) / 2)])


def test_subgroup_index():
    P = ClosedSubgroup.make(2, [], [v(1, 0), v(0, 1)])
    Q = ClosedSubgroup.make(2, [], [v(2, 0), v(0, 3)])
    assert subgroup_index(P, Q) == 6
    assert subgroup_index(ClosedSubgroup.make(2, [v(1, 0)], [v(0, 1)]), Q) is None


def test_closed_sum():
    H = ClosedSubgroup.make(2, [], [v(1, 0), v(0, 1)])
    S = closed_sum(H, [v(1, R2)])
    assert S.dim_V == 2


def test_distance_and_cylinder_projection():
    H = ClosedSubgroup.make(4, [v(1, 0, 0, 0)], [v(0, 0, 1, R2)])
    C = Cylinder(H)
    lam = np.array([0.0, 0.0, 1.0, np.sqrt(2)])
    mu = np.array([0.3, -1.2, 0.7, 0.1])
    assert C.distance(C.project(mu), C.project(mu + 3 * lam + 5.5 * np.eye(4)[0])) < 1e-12
    assert C.distance(C.project(mu), C.project(mu + 0.01 * np.eye(4)[1])) > 1e-3
    d_in, d_half = H.distance(np.array([3 * lam + [7, 0, 0, 0], 2.5 * lam]))
    assert d_in < 1e-12
    assert d_half == pytest.approx(0.5 * np.linalg.norm(lam))


@pytest.mark.parametrize("x,expected", [(np.sqrt(2) * 3 - 1.5, Scalar(-1.5, 3, 2)), (0.25, Scalar(0.25, 0, 2))])
def test_rationalize(x, expected):
    assert rationalize(x, 2) == expected


def test_parse_generator_line_forms():
    assert parse_generator_line("(1, 0 + 1*sqrt(2))") == v(1, R2)
    assert parse_generator_line("1 ; -1/2") == v(1, Scalar(-1) / 2)
