import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st
from hypothesis.extra.numpy import arrays

from cylred.models import ChartFunction
from cylred.momentum import (NoGroupValuedMomentumMap, PreconditionError, affine_action, build_instance,
                             group_valued_J, infinitesimal_affine_generator, kernel_range_check, noether_drift,
                             restrict_to_subalgebra, sigma_cocycle)
from cylred.scalars import Scalar

finite = st.floats(-2, 2, allow_nan=False)


@settings(max_examples=25)
@given(arrays(float, 8, elements=finite), arrays(float, 4, elements=finite))
def test_K_is_equivariant_for_the_affine_action(t4_inst, m, u):
    # K(g.m) = Theta_g(K(m))
    lhs = t4_inst.K(t4_inst.model.act(u, m))
    rhs = affine_action(t4_inst, u, t4_inst.K(m))
    assert t4_inst.cylinder.distance(lhs, rhs) < 1e-9


@given(arrays(float, 4, elements=finite), arrays(float, 4, elements=finite))
def test_sigma_is_a_cocycle(t4_inst, u, v):
    C = t4_inst.cylinder
    # Abelian group, trivial projected coadjoint action: sigma(u+v) = sigma(u) + sigma(v)
    assert C.distance(sigma_cocycle(t4_inst, u + v), C.add(sigma_cocycle(t4_inst, u), sigma_cocycle(t4_inst, v))) < 1e-9


def test_lattice_elements_act_trivially(t4_inst):
    C = t4_inst.cylinder
    for ell in t4_inst.model.group_kernel():
        u = np.array([float(x) for x in ell])
        assert C.distance(sigma_cocycle(t4_inst, u), C.zero()) < 1e-12


def test_infinitesimal_generator_is_minus_sigma(t4_inst, rng):
    xi = rng.normal(size=4)
    mu = rng.normal(size=4)
    got = infinitesimal_affine_generator(t4_inst, xi, mu)
    expected = t4_inst.cylinder.tangent_project(-t4_inst.model.sigma @ xi)
    assert np.allclose(got, expected, atol=1e-6)


def test_gauge_shift(t4):
    nu0 = [Scalar(0), Scalar(1), Scalar(0), Scalar(0)]
    a, b = build_instance(t4), build_instance(t4, nu0=nu0)
    m = np.linspace(0.1, 0.8, 8)
    C = a.cylinder
    assert C.distance(b.K(m), C.add(a.K(m), C.project(np.array([0, 1.0, 0, 0])))) < 1e-12


def test_noether_translation_exact(t4_inst, rng):
    # H = nu1 generates translation in u1, which is G-invariant
    H = ChartFunction("nu1", t4_inst.model.coordinate_names())
    assert noether_drift(t4_inst, H, "G", t4_inst.model.random_point(rng), T=10, steps=1000) <= 1e-8


def test_noether_needs_invariance(t4_inst, rng):
    H = ChartFunction("cos(2*pi*u3)", t4_inst.model.coordinate_names())
    with pytest.raises(PreconditionError):
        noether_drift(t4_inst, H, "N", t4_inst.model.random_point(rng))


def test_g_invariance_checked(t4_inst, rng):
    H = ChartFunction("sin(2*pi*u3)", t4_inst.model.coordinate_names())
    with pytest.raises(PreconditionError):
        noether_drift(t4_inst, H, "G", t4_inst.model.random_point(rng))


def test_kernel_range_t4(t4_inst, rng):
    rep = kernel_range_check(t4_inst, t4_inst.model.random_point(rng))
    assert rep.rank == 3 and rep.kernel_dim == 5 and not rep.flagged


def test_kernel_range_toy(toy_inst, rng):
    rep = kernel_range_check(toy_inst, toy_inst.model.random_point(rng))
    assert rep.rank == 0 and not rep.flagged


def test_restriction_to_first_factor(t4_inst):
    rep = restrict_to_subalgebra(t4_inst, [0, 2], samples=5, steps=500)
    assert rep.pullback_contained
    assert rep.max_K_error < 1e-8


def test_group_valued_refused_for_dense_holonomy(t4_inst):
    with pytest.raises(NoGroupValuedMomentumMap):
        group_valued_J(t4_inst)


def test_group_valued_area_model(area):
    inst = build_instance(area)
    rep = group_valued_J(inst, samples=20)
    assert rep.holonomy_in_kernel_image and not rep.kernel_image_in_holonomy and rep.strict
    assert rep.residual <= 1e-6
