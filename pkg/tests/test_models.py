import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st
from hypothesis.extra.numpy import arrays

from cylred.lie import AbelianGroup, TwoCocycle, UnsupportedModelError, LieAlgebra
from cylred.models import ChartFunction, ExpressionModel, MagneticCotangentModel, parse_expression

finite = st.floats(-3, 3, allow_nan=False)


@given(arrays(float, 8, elements=finite), arrays(float, 8, elements=finite))
def test_magnetic_hamiltonian_vector_closed_form(t4, m, g):
    # closed form agrees with the generic linear solve
    generic = np.linalg.solve(t4.omega(m).T, g)
    assert np.allclose(t4.hamiltonian_vector(m, g), generic, atol=1e-12)


def test_magnetic_form_is_antisymmetric_and_nondegenerate(t4):
    W = t4.omega()
    assert np.allclose(W, -W.T)
    t4.check_nondegenerate(None)


def test_generators_preserve_omega(t4):
    # the chu map of the magnetic model is minus the cocycle
    assert np.allclose(t4.chu(None), -t4.sigma)
    G = t4.generator_matrix()
    assert np.allclose(G.T @ t4.omega() @ G, -t4.sigma)


def test_non_abelian_base_rejected():
    g = LieAlgebra.from_brackets(3, {(0, 1): [0, 0, 1]})
    with pytest.raises(UnsupportedModelError):
        MagneticCotangentModel(AbelianGroup(3), TwoCocycle.zero(3, g))


def test_expression_model_rejects_bad_omega():
    with pytest.raises(ValueError):
        ExpressionModel(["x", "y"], [["0", "1"], ["1", "0"]], [["1", "0"]], ["1", "1"])


def test_parse_expression_names():
    assert ChartFunction("2*pi*x", ["x"])([1.0]) == pytest.approx(2 * np.pi)
    with pytest.raises(ValueError):
        parse_expression("z + 1", ["x"])
    with pytest.raises(ValueError):
        parse_expression("x +* 1", ["x"])


def test_chart_function_gradient():
    f = ChartFunction("sin(u1)*nu1**2", ["u1", "nu1"])
    assert f.grad([0.3, 2.0]) == pytest.approx([np.cos(0.3) * 4, 2 * np.sin(0.3) * 2])
    assert f.depends_on() == {"u1", "nu1"}


def test_toy_action_is_rotation_of_both_tori(toy):
    m = np.array([0.1, 0.2, 0.3, 0.4])
    assert toy.act([0.5], m) == pytest.approx([0.6, 0.2, 0.8, 0.4])
