from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st
from scipy.optimize import linprog

from cachebound.entropy_space import Inequality, LinearForm, Provenance, VarSet
from cachebound.errors import NumericOverflow
from cachebound.lp_exact import LPProblem, Refutation, check_kkt, minimize, prove_inequality
from cachebound.symmetry import symmetric_code_map

from support import model, solve

COLUMNS = [VarSet(1), VarSet(2), "M", "R"]


def _problem(rows, objective):
    ineqs = []
    for a1, a2, am, ar, b in rows:
        form = LinearForm({VarSet(1): a1, VarSet(2): a2}, m=am, r=ar, const=b)
        ineqs.append(Inequality(form, Provenance("composite")))
    ineqs.append(Inequality(LinearForm(m=1), Provenance("nonneg")))
    ineqs.append(Inequality(LinearForm(r=1), Provenance("nonneg")))
    cols = list(COLUMNS)
    return LPProblem(None, None, cols, ineqs, tuple(Fraction(v) for v in objective),
                     {c: i for i, c in enumerate(cols)})


def _scipy(p):
    a = np.array([[float(r.form.entropy.get(VarSet(1), 0)), float(r.form.entropy.get(VarSet(2), 0)),
                   float(r.form.m), float(r.form.r)] for r in p.rows])
    b = np.array([float(r.form.const) for r in p.rows])
    c = np.array([0, 0, float(p.objective[0]), float(p.objective[1])])
    return linprog(c, A_ub=-a, b_ub=b, bounds=[(None, None)] * 4, method="highs")


coef = st.integers(-3, 3)
row = st.tuples(coef, coef, coef, coef, st.integers(-5, 5))


@settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.lists(row, min_size=1, max_size=7), st.integers(0, 3), st.integers(0, 3), st.booleans())
def test_matches_float_reference(rows, lam, mu, use_float):
    if lam == mu == 0:
        lam = 1
    p = _problem(rows, (lam, mu))
    ref = _scipy(p)
    sol = minimize(p, use_float=use_float)
    if ref.status == 0:
        assert sol.status == "Optimal"
        assert abs(float(sol.value) - ref.fun) < 1e-7
        check_kkt(p, sol)
    elif ref.status == 2:
        assert sol.status == "Infeasible"
    elif ref.status == 3:
        assert sol.status == "Unbounded"


def test_textbook_optimum():
    # M + R >= 3/2, M - R >= -1/2  ->  2M + R is least at M = 1/2, R = 1
    p = _problem([(0, 0, 1, 1, Fraction(-3, 2)), (0, 0, 1, -1, Fraction(1, 2))], (2, 1))
    sol = minimize(p, use_float=False)
    assert sol.value == 2
    assert (sol.primal["M"], sol.primal["R"]) == (Fraction(1, 2), 1)
    assert sum(sol.dual.values()) > 0


def test_bit_cap():
    p = _problem([(0, 0, 3, 7, Fraction(-10 ** 40, 3))], (1, 1))
    with pytest.raises(NumericOverflow):
        minimize(p, max_bits=16)


def test_exact_path_agrees_with_float_path():
    m = model(2, 2, ((0, 1),))
    from cachebound.lp_exact import assemble
    from cachebound.symmetry import identity_map
    p = assemble(m, identity_map(m.universe), (1, 1))
    a, b = minimize(p, use_float=True), minimize(p, use_float=False)
    assert a.value == b.value
    check_kkt(p, a)
    check_kkt(p, b)


def test_man_table2_optimum_is_two():
    sol = solve(model(preset="man-table2"), "full", (1, 1), "man-table2 M+R")
    assert sol.value == 2


def test_refutation_point():
    m = model(preset="man-table2")
    r = prove_inequality(m, symmetric_code_map(m.universe), 1, 1, 3)
    assert isinstance(r, Refutation)
    assert r.value == 2
    assert r.point["M"] + r.point["R"] == 2
    assert "not LP-provable" in r.describe()
