from itertools import product

import pytest
from hypothesis import given, strategies as st

from cachebound.entropy_space import VarSet, build_universe
from cachebound.errors import ImageOutsideUniverse, ParseError
from cachebound.symmetry import (
    UserPermutation,
    apply_permutation,
    make_orbit_map,
    orbit_map,
    stabilizer_subgroup,
    symmetric_code_map,
    symmetric_group,
    symmetry_equalities,
)

FULL33 = build_universe(3, 3, list(product(range(3), repeat=3)))
perms = st.sampled_from(symmetric_group(3))
subsets = st.integers(1, (1 << FULL33.total_vars) - 1).map(VarSet)


def test_worked_example_delivery_pair():
    pi = UserPermutation.parse("120")
    got = {FULL33.names[i] for i in apply_permutation(pi, FULL33.varset("X012", "X210"), FULL33).members()}
    assert got == {"X201", "X021"}


def test_worked_example_decoding_term():
    pi = UserPermutation.parse("120")
    s = FULL33.varset("W1", "Z1", "X012")
    assert FULL33.term_name(apply_permutation(pi, s, FULL33)) == "H(W1,Z2,X201)"


@given(perms, perms, subsets)
def test_action_is_a_homomorphism(p, q, s):
    lhs = apply_permutation(p @ q, s, FULL33)
    rhs = apply_permutation(p, apply_permutation(q, s, FULL33), FULL33)
    assert lhs == rhs


@given(perms, subsets)
def test_inverse_and_identity(p, s):
    e = UserPermutation.identity(3)
    assert apply_permutation(e, s, FULL33) == s
    assert apply_permutation(p.inverse(), apply_permutation(p, s, FULL33), FULL33) == s
    assert (p @ p.inverse()).is_identity()
    assert len(apply_permutation(p, s, FULL33)) == len(s)


@given(perms, perms, perms)
def test_composition_associative(a, b, c):
    assert (a @ b) @ c == a @ (b @ c)


@given(perms, subsets)
def test_files_fixed(p, s):
    files = FULL33.files
    assert apply_permutation(p, s & files, FULL33) == s & files


def test_parse_errors():
    for bad in ["12", "1a2", "112"]:
        with pytest.raises(ParseError):
            UserPermutation.parse(bad)


def test_outside_universe():
    u = build_universe(3, 3, [(2, 0, 1), (2, 1, 0)])
    with pytest.raises(ImageOutsideUniverse):
        apply_permutation(UserPermutation.parse("120"), u.varset("X201"), u)
    with pytest.raises(ImageOutsideUniverse):
        orbit_map(u, symmetric_group(3))


def test_stabilizer_of_table_demands():
    u = build_universe(3, 3, [(2, 0, 1), (2, 1, 0)])
    assert [str(p) for p in stabilizer_subgroup(u)] == ["012", "021"]


def test_orbit_representatives_are_minimal_and_idempotent():
    u = build_universe(3, 3, [(2, 0, 1), (2, 1, 0)])
    for om in (make_orbit_map(u, "stabilizer"), symmetric_code_map(u)):
        for m in range(1, 1 << u.total_vars):
            r = om.rep_of[m]
            assert r <= m and om.rep_of[r] == r
    assert symmetric_code_map(u).orbit_count == 143


def test_restricted_classes_match_equalities():
    u = build_universe(2, 2, [(0, 1), (1, 1)])
    om = symmetric_code_map(u)
    for row in symmetry_equalities(om):
        (a, ca), (b, cb) = sorted(row.form.entropy.items(), key=lambda kv: kv[0].mask)
        assert om(a) == om(b) and ca == -cb


def test_swap_identifies_caches():
    u = build_universe(3, 3, [(2, 0, 1), (2, 1, 0)])
    om = symmetric_code_map(u)
    assert om(u.varset("Z2")) == om(u.varset("Z0"))
    assert om(u.varset("W2", "Z1")) == om(u.varset("W2", "Z0"))
    assert om(u.varset("Z0", "X201")) == om(u.varset("Z0", "X210"))
