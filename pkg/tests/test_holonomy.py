import numpy as np
import pytest

from cylred import linalg as la
from cylred.holonomy import (LoopPath, convergence_ratios, estimate_holonomy_generators, holonomy_generators,
                             holonomy_of_loop, horizontal_lift, lattice_loop)
from cylred.lie import UnsupportedModelError
from cylred.scalars import sqrt_of
from cylred.subgroups import closure

R2 = sqrt_of(2)


def test_closed_form_generators(t4):
    G = holonomy_generators(t4)
    cols = [la.vec_to_float(g) for g in G.generators]
    assert np.allclose(cols, [[0, 0, 1, np.sqrt(2)], [0, 0, 0, 0], [-1, 0, 0, 0], [-np.sqrt(2), 0, 0, 0]])


def test_closed_form_needs_magnetic_model(toy):
    with pytest.raises(UnsupportedModelError):
        holonomy_generators(toy)


@pytest.mark.parametrize("k", range(4))
def test_lattice_loops_match_closed_form(t4, rng, k):
    ell = t4.group_kernel()[k]
    loop = lattice_loop(t4, ell, t4.random_point(rng), rng.normal(size=8))
    h = holonomy_of_loop(t4, loop, 2000)
    assert np.max(np.abs(h - la.vec_to_float(t4.cocycle.column(ell)))) < 1e-10


def test_holonomy_is_homotopy_invariant(t4, rng):
    ell = t4.group_kernel()[0]
    m0 = t4.random_point(rng)
    a = holonomy_of_loop(t4, lattice_loop(t4, ell, m0, rng.normal(size=8)), 4000)
    b = holonomy_of_loop(t4, lattice_loop(t4, ell, m0 + 0.3, 2 * rng.normal(size=8)), 4000)
    assert np.allclose(a, b, atol=1e-10)


def test_concatenation_adds_holonomy(t4):
    e1, e3 = t4.group_kernel()[0], t4.group_kernel()[2]
    L1, L3 = lattice_loop(t4, e1), lattice_loop(t4, e3)
    both = holonomy_of_loop(t4, L1.then(L3), 4000)
    assert np.allclose(both, holonomy_of_loop(t4, L1, 2000) + holonomy_of_loop(t4, L3, 2000), atol=1e-10)


def test_polyline_loop_from_samples(t4):
    pts = [[0] * 8, [0.5, 0, 0, 0, 0, 0, 0, 0], [0.5, 0, 0, 0, 1, 0, 0, 0], [1, 0, 0, 0, 1, 0, 0, 0],
           [1, 0, 0, 0, 0, 0, 0, 0]]
    h = holonomy_of_loop(t4, LoopPath.from_samples(pts), 400)
    assert np.allclose(h, [0, 0, 1, np.sqrt(2)], atol=1e-12)


def test_open_path_rejected(t4):
    with pytest.raises(ValueError):
        holonomy_of_loop(t4, LoopPath.straight(np.zeros(8), np.full(8, 0.3)))


def test_fourth_order_convergence(t4, rng):
    ell = t4.group_kernel()[0]
    errs, ratios = convergence_ratios(t4, ell, t4.cocycle.column(ell), m0=t4.random_point(rng),
                                      wiggle=rng.normal(size=8))
    assert all(12 <= r <= 20 for r in ratios)


def test_toy_holonomy_is_dense(toy):
    G = estimate_holonomy_generators(toy, steps=1000)
    H = closure(G)
    assert H.dim_V == 1


def test_lift_is_horizontal_on_toy(toy, rng):
    m0 = toy.random_point(rng)
    path = LoopPath.straight(m0, m0 + rng.normal(size=4))
    ts, mus = horizontal_lift(toy, path, [0.25], 500)
    P = np.array([path.point(t) for t in ts])
    expected = 0.25 - (P[:, 1] - P[0, 1]) - np.sqrt(2) * (P[:, 3] - P[0, 3])
    assert np.allclose(mus[:, 0], expected, atol=1e-12)
