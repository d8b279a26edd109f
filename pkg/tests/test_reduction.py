import numpy as np
import pytest
from fractions import Fraction

from conftest import load
from cylred.lie import UnsupportedModelError
from cylred.momentum import build_instance
from cylred.reduction import (ideal_n, isotropy, optimal_reduced, poisson_reduced, reduction_lemma_check,
                              symplectic_reduced, three_space_comparison)
from cylred.scalars import Scalar, sqrt_of
from cylred.subgroups import ClosedSubgroup

R2 = sqrt_of(2)


def v(*xs):
    return [Scalar.coerce(x) for x in xs]


def test_t4_comparison(t4_inst, rng):
    c = three_space_comparison(t4_inst, v(1, 2, 3, 4), t4_inst.model.random_point(rng))
    assert c.dims == (2, 2, 2)
    assert c.dim_H == 0 and c.components_H == 1
    assert c.coincide and c.identity_holds and not c.holonomy_closed
    target = ClosedSubgroup.make(4, [v(1, 0, 0, 0), v(0, 0, 1, R2)], [])
    assert c.poisson.model == target == c.optimal.model == c.symplectic.model


def test_ideal_contains_derived_algebra(t4_inst):
    nb, ok = ideal_n(t4_inst)
    assert len(nb) == 3 and ok


def test_zero_sigma():
    inst = build_instance(load("zero_sigma_t4"))
    c = three_space_comparison(inst, v(0, 0, 0, 0), np.zeros(8))
    # trivial holonomy: level sets are single T^4 orbits, so every quotient is a point
    assert c.dims == (0, 0, 0)
    assert c.poisson.symplectic_rank == 0


def test_t2_magnetic():
    inst = build_instance(load("t2_magnetic"))
    G = isotropy(inst, None, "G", np.zeros(4))
    # nondegenerate Sigma with closed holonomy: discrete isotropy
    assert G.dimension == 0
    c = three_space_comparison(inst, None, np.zeros(4))
    assert c.dims == (2, 2, 2) and c.holonomy_closed


def test_toy_dims(toy_inst, rng):
    c = three_space_comparison(toy_inst, None, toy_inst.model.random_point(rng))
    assert c.dims == (4, 3, 2)
    assert c.dim_H == 1 and c.identity_holds
    assert c.note


def test_non_free_action_refused(area):
    inst = build_instance(area)
    with pytest.raises(UnsupportedModelError):
        symplectic_reduced(inst, None, np.array([0.2, 0.3]))


@pytest.mark.parametrize("name", ["t4_example", "t2_magnetic", "t2xt2_example"])
def test_reduction_lemma(name, rng):
    inst = build_instance(load(name))
    for _ in range(3):
        rep = reduction_lemma_check(inst, inst.model.random_point(rng))
        assert rep.passed()
