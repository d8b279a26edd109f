from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from cylred.lie import LieAlgebra, TwoCocycle
from cylred.momentum import PreconditionError
from cylred.poisson import (BRACKET_SIGN, CylObservable, CylTerm, PolyObservable, affine_lp_bracket,
                            bracket_poly, characteristic_distribution, characteristic_rank_bruteforce,
                            check_invariant, chu_assembled, chu_map, leaf_form_nondegenerate, projected_bracket,
                            projected_bracket_via_affine, symplectic_leaf, verify_poisson_map_K)
from cylred.scalars import Scalar, sqrt_of

from strategies import vectors

R2 = sqrt_of(2)
coeff = st.fractions(-5, 5, max_denominator=4)


@st.composite
def polys(draw, n=4, max_terms=3):
    terms = {}
    for _ in range(draw(st.integers(1, max_terms))):
        e = tuple(draw(st.lists(st.integers(0, 2), min_size=n, max_size=n)))
        if sum(e) <= 2:
            terms[e] = Scalar(draw(coeff), draw(coeff), 2)
    return PolyObservable(n, terms)


def algebras():
    t4 = TwoCocycle([[0, 0, -1, -R2], [0, 0, 0, 0], [1, 0, 0, 0], [R2, 0, 0, 0]])
    h3 = LieAlgebra.from_brackets(4, {(0, 1): [0, 0, 1, 0]})
    S = [[0] * 4 for _ in range(4)]
    S[0][3], S[3][0] = 1, -1
    return [(t4.algebra, t4), (h3, TwoCocycle(S, h3))]


@pytest.mark.parametrize("which", [0, 1])
@pytest.mark.parametrize("sign", [1, -1])
@settings(max_examples=15)
@given(f=polys(), g=polys(), h=polys())
def test_bracket_axioms_exact(which, sign, f, g, h):
    alg, sigma = algebras()[which]
    br = lambda a, b: bracket_poly(alg, sigma, a, b, sign)
    assert (br(f, g) + br(g, f)).is_zero()
    assert (br(f, g * h) - br(f, g) * h - g * br(f, h)).is_zero()
    assert (br(f, br(g, h)) + br(g, br(h, f)) + br(h, br(f, g))).is_zero()


@given(polys(), polys(), vectors(4))
def test_pointwise_bracket_matches_polynomial(f, g, mu):
    alg, sigma = algebras()[1]
    assert bracket_poly(alg, sigma, f, g)(mu) == affine_lp_bracket(alg, sigma, f, g, mu)


def test_coordinate_brackets_t4():
    alg, sigma = algebras()[0]
    x = [PolyObservable.coordinate(4, i) for i in range(4)]
    # {mu_i, mu_j} = -sign * Sigma_ij for an Abelian algebra
    assert bracket_poly(alg, sigma, x[0], x[3]) == PolyObservable.constant(4, R2 * BRACKET_SIGN)


def test_chu_map_is_minus_sigma(t4):
    psi = chu_map(t4)
    assert psi.shortcut
    assert np.allclose(psi.matrix, -t4.sigma)
    assert np.allclose(chu_assembled(t4, np.zeros(8)), -t4.sigma)


def test_chu_map_toy_matches_assembly(toy, rng):
    m = toy.random_point(rng)
    assert np.allclose(chu_map(toy, m).matrix, chu_assembled(toy, m))
    with pytest.raises(ValueError):
        chu_map(toy)


def test_projected_bracket_two_ways(t4_inst, rng):
    C = t4_inst.cylinder
    for _ in range(10):
        f = CylObservable.random(C.free_rank, C.torus_rank, rng)
        g = CylObservable.random(C.free_rank, C.torus_rank, rng)
        mu = rng.normal(size=4)
        assert projected_bracket(t4_inst, f, g, mu) == pytest.approx(projected_bracket_via_affine(t4_inst, f, g, mu),
                                                                    abs=1e-12)


def test_observables_need_integer_frequencies():
    with pytest.raises(ValueError):
        CylObservable(1, 1, [CylTerm(1.0, (0,), (0.5,), "cos")])


def test_non_invariant_pullback_detected(t4_inst):
    # an observable of mu that ignores the cylinder structure is not H-invariant
    class Raw(CylObservable):
        def value(self, x, theta):
            return np.sin(3.1 * theta[0])

    with pytest.raises(PreconditionError):
        check_invariant(t4_inst, Raw(2, 1, []), np.zeros(4))


def test_poisson_map_K(t4_inst, rng):
    C = t4_inst.cylinder
    for _ in range(10):
        f = CylObservable.random(C.free_rank, C.torus_rank, rng)
        g = CylObservable.random(C.free_rank, C.torus_rank, rng)
        assert verify_poisson_map_K(t4_inst, f, g, t4_inst.model.random_point(rng)) <= 1e-8


def test_t4_leaves_are_points(t4_inst):
    E = characteristic_distribution(t4_inst)
    assert E.dim == 0 == characteristic_rank_bruteforce(t4_inst)
    L = symplectic_leaf(t4_inst, np.array([1.0, 0, 0.5, 0]))
    assert L.dim == 0
    assert L.contains(t4_inst, [1.0, 0, 0.5, 0], [4.5, 0, 1.5, np.sqrt(2)])
    assert not L.contains(t4_inst, [1.0, 0, 0.5, 0], [1.0, 0.1, 0.5, 0])
    assert leaf_form_nondegenerate(t4_inst) == (0, 0)


def test_t2_magnetic_single_leaf():
    from conftest import load
    from cylred.momentum import build_instance
    inst = build_instance(load("t2_magnetic"))
    # holonomy Z^2 and n = g: the leaf is the whole torus, with nondegenerate form
    assert characteristic_distribution(inst).dim == 2
    assert leaf_form_nondegenerate(inst) == (2, 2)
