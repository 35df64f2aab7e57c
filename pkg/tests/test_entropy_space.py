from fractions import Fraction
from itertools import combinations, product

import pytest
from hypothesis import given, strategies as st

from cachebound.entropy_space import (
    LinearForm,
    VarSet,
    build_universe,
    check_cap,
    elemental_count,
    enumerate_terms,
    iter_elemental,
    regenerate,
    term_index,
)
from cachebound.errors import DuplicateDemand, InvalidDemand, UniverseTooLarge

masks = st.integers(0, (1 << 12) - 1)


@given(masks, masks, masks)
def test_varset_lattice_laws(a, b, c):
    A, B, C = VarSet(a), VarSet(b), VarSet(c)
    assert (A | B) | C == A | (B | C)
    assert (A & B) & C == A & (B & C)
    assert A | B == B | A and A & B == B & A
    assert (A & B).issubset(A) and A.issubset(A | B)
    assert len(A | B) + len(A & B) == len(A) + len(B)
    assert (A - B) & B == VarSet(0)


def test_canonical_order():
    u = build_universe(3, 3, [(2, 1, 0), (2, 0, 1)])
    assert u.names == ("W0", "W1", "W2", "Z0", "Z1", "Z2", "X201", "X210")
    assert u.total_vars == 8
    s = u.varset("X210", "W2")
    assert u.term_name(s) == "H(W2,X210)"
    assert u.parse_term("H(W2,X210)") == s


@pytest.mark.parametrize("demands,err", [
    ([(0, 3, 1)], InvalidDemand),
    ([(0, 1)], InvalidDemand),
    ([(0, 1, 2), (0, 1, 2)], DuplicateDemand),
])
def test_universe_rejects(demands, err):
    with pytest.raises(err):
        build_universe(3, 3, demands)


def test_cap():
    u = build_universe(3, 3, [(a, b, c) for a in range(3) for b in range(3) for c in range(3)])
    assert u.total_vars == 33
    with pytest.raises(UniverseTooLarge):
        check_cap(u)


def test_term_enumeration_order():
    u = build_universe(1, 1, [(0,)])
    terms = enumerate_terms(u)
    assert [t.mask for t in terms] == list(range(1, 8))
    assert all(term_index(t) == i for i, t in enumerate(terms))


def _universe_with(n: int):
    """Some universe with exactly n variables (n >= 2)."""
    for n_files in range(1, 4):
        for n_users in range(1, 4):
            extra = n - n_files - n_users
            demands = list(product(range(n_files), repeat=n_users))
            if 0 <= extra <= len(demands):
                return build_universe(n_files, n_users, demands[:extra])
    raise AssertionError(n)


def _brute_count(n: int) -> int:
    # H(X_i | rest) for each i, and I(X_i;X_j|X_K) for each pair and each K
    return n + sum(2 ** (n - 2) for _ in combinations(range(n), 2))


@pytest.mark.parametrize("n", range(2, 13))
def test_elemental_count_law(n):
    u = _universe_with(n)
    rows = list(iter_elemental(u))
    assert len(rows) == elemental_count(n) == _brute_count(n)
    assert len({r.form for r in rows}) == len(rows)


def test_elemental_rows_regenerate():
    u = build_universe(2, 1, [(0,), (1,)])
    for row in iter_elemental(u):
        assert regenerate(row.provenance, u) == row.form
        assert not row.form.m and not row.form.r and not row.form.const


def test_linear_form_arithmetic():
    a = LinearForm.from_terms([(VarSet(1), 1), (VarSet(3), -2)], m=1, const=-1)
    b = LinearForm.from_terms([(VarSet(3), 2)], r=Fraction(1, 2))
    s = a + b
    assert s.entropy == {VarSet(1): 1}
    assert (s - b) == a
    assert (a * 2).const == -2
    assert (a - a).is_zero()
    h = {VarSet(1): Fraction(1), VarSet(3): Fraction(2)}
    assert a.evaluate(lambda v: h[v], 5, 0) == 1 - 4 + 5 - 1
