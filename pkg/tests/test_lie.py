import pytest
from hypothesis import given
import hypothesis.strategies as st

from cylred import linalg as la
from cylred.lie import (AbelianGroup, CentralExtensionGroup, CocycleError, LieAlgebra, TwoCocycle, ad_ext,
                        central_extension, extended_affine_action, mu_sigma, mu_sigma_derivative)
from cylred.scalars import Scalar, sqrt_of

from strategies import scalars, vectors

R2 = sqrt_of(2)
T4_SIGMA = [[0, 0, -1, -R2], [0, 0, 0, 0], [1, 0, 0, 0], [R2, 0, 0, 0]]


def heisenberg_plus_line():
    return LieAlgebra.from_brackets(4, {(0, 1): [0, 0, 1, 0]})


def test_jacobi_violation_rejected():
    # [e1,e2]=e2, [e2,e3]=e1, [e1,e3]=0 breaks the Jacobi identity
    with pytest.raises(ValueError):
        LieAlgebra.from_brackets(3, {(0, 1): [0, 1, 0], (1, 2): [1, 0, 0]})


def test_non_cocycle_rejected():
    S = [[0] * 4 for _ in range(4)]
    S[2][3], S[3][2] = 1, -1
    with pytest.raises(CocycleError):
        TwoCocycle(S, heisenberg_plus_line())


def test_non_antisymmetric_rejected():
    with pytest.raises(CocycleError):
        TwoCocycle([[0, 1], [1, 0]])


def test_central_extension_satisfies_jacobi():
    g = heisenberg_plus_line()
    S = [[0] * 4 for _ in range(4)]
    S[0][3], S[3][0] = 1, -1
    ext = central_extension(g, TwoCocycle(S, g))
    assert ext.dim == 5
    e = lambda i: [Scalar(int(k == i)) for k in range(5)]
    for i in range(5):
        for j in range(5):
            for k in range(5):
                assert la.is_zero_vec(ext.jacobiator(e(i), e(j), e(k)))


@given(vectors(4), vectors(4), vectors(4))
def test_group_law(u, v, w):
    G = CentralExtensionGroup(AbelianGroup(4), TwoCocycle(T4_SIGMA))
    a, b, c = (u, Scalar(1)), (v, Scalar(2)), (w, Scalar(-3))
    assert G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c))
    assert G.mul(a, G.inv(a)) == G.identity()


@given(vectors(4), vectors(4))
def test_mu_sigma_is_a_homomorphism(u, v):
    # the coadjoint action is trivial, so the cocycle identity reads mu(gh) = mu(g) + mu(h)
    G = CentralExtensionGroup(AbelianGroup(4), TwoCocycle(T4_SIGMA))
    g, h = (u, Scalar(0)), (v, Scalar(5))
    assert mu_sigma(G, G.mul(g, h)) == la.vadd(mu_sigma(G, g), mu_sigma(G, h))


@given(vectors(4), scalars())
def test_mu_sigma_derivative(xi, t):
    G = CentralExtensionGroup(AbelianGroup(4), TwoCocycle(T4_SIGMA))
    assert mu_sigma(G, (la.vscale(t, xi), Scalar(0))) == la.vscale(t, mu_sigma_derivative(G, xi))


@given(vectors(4), vectors(4))
def test_adjoint_and_affine_action(u, xi):
    G = CentralExtensionGroup(AbelianGroup(4), TwoCocycle(T4_SIGMA))
    g = (u, Scalar(0))
    xi2, s = ad_ext(G, g, (xi, Scalar(0)))
    assert xi2 == xi and s == -G.cocycle(u, xi)
    mu = [Scalar(0)] * 4
    assert extended_affine_action(G, g, mu) == [-x for x in G.cocycle.column(u)]


def test_abelian_exp():
    A = AbelianGroup(2, 1)
    assert list(A.exp([1.25, -0.5, 3.0])) == [0.25, 0.5, 3.0]
    assert len(A.kernel_lattice()) == 2
