"""The ten acceptance criteria, one test each, at their stated tolerances.

Each test prints a single PASS/FAIL line (with measured values on failure).
"""

import numpy as np
import pytest

from cylred.acceptance import CRITERIA, oracle_agrees, run_criterion
from cylred.scalars import Scalar, sqrt_of
from cylred.subgroups import ClosedSubgroup, GeneratedSubgroup, closure


@pytest.mark.parametrize("cid", sorted(CRITERIA))
def test_criterion(cid, capsys):
    res = run_criterion(cid, seed=0)
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.line()


def _g(*rows):
    return GeneratedSubgroup(2, tuple(tuple(Scalar.coerce(x) for x in r) for r in rows))


def test_oracle_rejects_wrong_closures():
    rng = np.random.default_rng(1)
    r2 = sqrt_of(2)
    G = _g((1, 0), (r2, 0), (0, 1))
    H = closure(G)
    assert H.dim_V == 1 and oracle_agrees(G, H, rng)[0]
    # too small: forgets the dense direction
    small = ClosedSubgroup.make(2, [], [[Scalar(1), Scalar(0)], [Scalar(0), Scalar(1)]])
    assert not oracle_agrees(G, small, rng)[0]
    # too big: the whole plane is not approximated by the net
    big = ClosedSubgroup.make(2, [[Scalar(1), Scalar(0)], [Scalar(0), Scalar(1)]], [])
    assert not oracle_agrees(G, big, rng)[0]
