from fractions import Fraction as Q

import pytest
from hypothesis import given, strategies as st

from cachebound.errors import EmptyRegion
from cachebound.frontier import (
    AXES,
    Halfplane,
    builtin_theorem_3x3,
    farey_weights,
    inner_bound_3x3,
    parse_sweep,
    region,
    sweep,
    vertex_enum,
)
from cachebound.symmetry import make_orbit_map

from support import model

THEOREM_VERTICES = [(0, 3), (Q(1, 3), 2), (Q(2, 3), Q(4, 3)), (Q(7, 6), Q(5, 6)), (Q(5, 3), Q(1, 2)),
                    (2, Q(1, 3)), (3, 0)]


def test_builtin_list():
    hs = builtin_theorem_3x3()
    keys = [h.key for h in hs]
    assert len(hs) == 8
    assert (1, 1, 2) in keys and (12, 18, 29) in keys and (3, 6, 8) in keys
    assert "beta" in hs[5].note


def test_point_one_one():
    hs = builtin_theorem_3x3()
    assert all(h.contains((1, 1)) for h in hs)
    assert [str(h) for h in hs if h.tight((1, 1))] == ["1*M+1*R>=2"]


def test_theorem_polygon():
    fr = vertex_enum(builtin_theorem_3x3())
    assert fr.vertices == THEOREM_VERTICES
    assert not any(fr.redundant)
    for a, b in zip(fr.vertices, fr.vertices[1:]):
        shared = set(h.key for h in fr.active(a)) & set(h.key for h in fr.active(b))
        assert len(shared) == 1
        assert b[1] < a[1]


def test_small_regions():
    assert vertex_enum(list(AXES) + [Halfplane(1, 1, 1)]).vertices == [(0, 1), (1, 0)]
    two = [Halfplane(2, 1, 2), Halfplane(1, 1, Q(3, 2)), Halfplane(1, 2, 2)] + list(AXES)
    assert vertex_enum(two).vertices == [(0, 2), (Q(1, 2), 1), (1, Q(1, 2)), (2, 0)]


def test_redundant_flagged():
    hs = list(AXES) + [Halfplane(1, 1, 2), Halfplane(1, 1, 1), Halfplane(2, 2, 4)]
    fr = vertex_enum(hs)
    assert fr.redundant == [False, False, False, True, True]
    assert [str(h) for h in fr.facets] == ["1*M+1*R>=2"]


def test_empty_region():
    with pytest.raises(EmptyRegion):
        vertex_enum(list(AXES) + [Halfplane(-1, 0, 1)])
    with pytest.raises(ValueError):
        vertex_enum([Halfplane(1, 1, 1)])


def test_inner_bound_inside_outer_bound():
    pts = inner_bound_3x3()
    assert (1, 1) in pts and (0, 3) in pts and (3, 0) in pts and (2, Q(1, 3)) in pts
    for p in pts:
        assert all(h.contains(p) for h in builtin_theorem_3x3())


@given(st.integers(0, 9), st.integers(0, 9), st.integers(-9, 9), st.fractions(min_value=Q(1, 20), max_value=20))
def test_normalization_idempotent(a, b, c, k):
    if a == b == 0:
        return
    h = Halfplane(a, b, c)
    assert Halfplane(h.lam * k, h.mu * k, h.c * k).key == h.key == Halfplane(*h.key).key


def test_farey_weights():
    assert farey_weights(1) == [(0, 1), (1, 1), (1, 0)]
    w = farey_weights(3)
    assert (1, 2) in w and (2, 1) in w and (1, 3) in w and len(w) == len(set(w))
    assert parse_sweep("none") == [] and parse_sweep("1,2;3/2,1") == [(1, 2), (Q(3, 2), 1)]


def test_sweep_full_2x2():
    m = model(preset="full-2x2")
    hs = sweep(m, make_orbit_map(m.universe, "full"), [(2, 1), (1, 1), (1, 2)])
    assert [str(h) for h in hs] == ["2*M+1*R>=2", "2*M+2*R>=3", "1*M+2*R>=2"]
    assert all(h.certificate.verify() for h in hs)


def test_sweep_man_table2_and_axis():
    m = model(preset="man-table2")
    hs = sweep(m, make_orbit_map(m.universe, "full"), [(1, 1), (1, 0)])
    assert [h.key for h in hs] == [(1, 1, 2), (1, 0, 0)]


def test_empty_sweep_region():
    m = model(preset="full-2x2")
    fr = region(m, make_orbit_map(m.universe, "full"), [])
    assert [h.key for h in fr.halfplanes] == [(1, 0, 0), (0, 1, 0)]
    assert fr.facets == []


def test_csv_export():
    fr = vertex_enum(builtin_theorem_3x3())
    lines = fr.to_csv().splitlines()
    assert lines[0] == "M,R" and lines[4] == "7/6,5/6"
    assert fr.halfplane_lines().splitlines()[4] == "12*M+18*R>=29"
