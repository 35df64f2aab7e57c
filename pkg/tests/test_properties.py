"""Quotient soundness, demand monotonicity and certificate round trips on N=K=2."""

import pytest

from support import SOLVE_LOG, demand_subsets_2x2, optimum_2x2

WEIGHTS = [(1, 1), (2, 1), (1, 2)]
SUBSETS = demand_subsets_2x2()


def test_fifteen_configurations():
    assert len(SUBSETS) == 15


@pytest.mark.parametrize("demands", SUBSETS, ids=lambda d: "-".join("".join(map(str, x)) for x in d))
def test_stabilizer_quotient_keeps_optimum(demands):
    for w in WEIGHTS:
        assert optimum_2x2(demands, "stabilizer", w) == optimum_2x2(demands, "none", w)


@pytest.mark.parametrize("demands", SUBSETS, ids=lambda d: "-".join("".join(map(str, x)) for x in d))
def test_restricted_identification_only_strengthens(demands):
    for w in WEIGHTS:
        assert optimum_2x2(demands, "full", w) >= optimum_2x2(demands, "none", w)


def test_demand_monotonicity():
    pairs = [(a, b) for a in SUBSETS for b in SUBSETS if set(a) < set(b)]
    assert len(pairs) == 50    # 6*2 + 4*6 + 14 strict nonempty pairs
    for small, big in pairs:
        for w in WEIGHTS:
            assert optimum_2x2(small, "none", w) <= optimum_2x2(big, "none", w)
            assert optimum_2x2(small, "full", w) <= optimum_2x2(big, "full", w)


def test_every_solve_certified():
    # runs last in this module; every solve above went through support.solve
    assert len(SOLVE_LOG) >= 15 * 3 * 3
    assert all(ok for _, ok in SOLVE_LOG)
