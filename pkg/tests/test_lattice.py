from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dimerlab.lattice import (
    LatticeError,
    LatticePolygon,
    SlopeMultiset,
    angle_minimal_vertex,
    edge_normals,
    gl2z_canonical_form,
    gl2z_equivalent,
    heights,
    polygon_from_slopes,
    primitive,
    width,
)

from conftest import FIG4, HEXAGON, HEXAGON_MUTATED, ZAG_RESULT, ZIG_RESULT

SQUARE = LatticePolygon.hull([(0, 0), (1, 0), (1, 1), (0, 1)])
POLYS = [FIG4, HEXAGON, HEXAGON_MUTATED, ZIG_RESULT, ZAG_RESULT, SQUARE]


@pytest.mark.parametrize("v, out", [((2, 4), (1, 2)), ((-1, 2), (-1, 2)), ((-2, -2), (-1, -1))])
def test_primitive(v, out):
    assert primitive(v) == out


def test_primitive_of_zero():
    with pytest.raises(LatticeError, match="zero has no primitive direction"):
        primitive((0, 0))


def test_edge_normals_four_face_polygon():
    assert edge_normals(FIG4) == SlopeMultiset([(1, 0), (-1, 2), (-1, -1), (1, -1)])


def test_edge_normals_square():
    assert edge_normals(SQUARE) == SlopeMultiset([(0, -1), (1, 0), (0, 1), (-1, 0)])


def test_edge_normals_hexagon_top_edge():
    assert edge_normals(HEXAGON).counts[(0, 1)] == 4


def test_edge_normals_degenerate():
    with pytest.raises(LatticeError):
        edge_normals(LatticePolygon.hull([(0, 0), (2, 0)]))


def test_polygon_from_slopes_four_face():
    p = polygon_from_slopes(SlopeMultiset([(1, 0), (-1, 2), (-1, -1), (1, -1)]), angle_minimal_vertex(FIG4))
    assert p == FIG4


def test_polygon_from_slopes_not_closed():
    with pytest.raises(LatticeError, match="not closed"):
        polygon_from_slopes(SlopeMultiset([(1, 0), (0, 1)]))


@pytest.mark.parametrize("p", POLYS)
def test_slopes_round_trip(p):
    s = edge_normals(p)
    assert s.is_closed()
    assert polygon_from_slopes(s, angle_minimal_vertex(p)) == p


def test_heights():
    assert heights(FIG4, (1, 1)) == (-1, 2)
    assert heights(HEXAGON, (0, -1)) == (-3, 1)
    assert heights(SQUARE, (1, 0)) == (0, 1)


def test_canonical_zig_zag_results_agree():
    assert gl2z_canonical_form(ZIG_RESULT) == gl2z_canonical_form(ZAG_RESULT)


def test_canonical_separates():
    assert not gl2z_equivalent(FIG4, SQUARE)
    assert not gl2z_equivalent(HEXAGON, FIG4)


def test_polygon_json_round_trip():
    assert LatticePolygon.from_json(HEXAGON.to_json()) == HEXAGON
    assert HEXAGON.to_json()["vertices"][0] == list(HEXAGON.vertices[0])


def test_lattice_points_of_four_face_polygon():
    assert sorted(FIG4.lattice_points()) == [(-1, 0), (0, -1), (0, 0), (1, 0), (1, 1)]


unimodular = st.sampled_from([
    ((1, 0), (0, 1)), ((0, 1), (1, 0)), ((1, 1), (0, 1)), ((1, 0), (1, 1)), ((0, -1), (1, 0)),
    ((-1, 0), (0, 1)), ((2, 1), (1, 1)), ((1, -1), (0, 1)), ((3, 2), (1, 1)), ((-1, 0), (0, -1)),
])


@settings(max_examples=120, deadline=None)
@given(
    p=st.sampled_from(POLYS),
    mats=st.lists(unimodular, min_size=1, max_size=3),
    t=st.tuples(st.integers(-5, 5), st.integers(-5, 5)),
)
def test_canonical_form_orbit_invariant(p, mats, t):
    q = p
    for u in mats:
        q = q.transform(u)
    q = q.translate(t)
    assert gl2z_canonical_form(q) == gl2z_canonical_form(p)


points = st.lists(st.tuples(st.integers(-4, 4), st.integers(-4, 4)), min_size=3, max_size=10)


@settings(max_examples=150, deadline=None)
@given(pts=points)
def test_normals_close_and_width_when_origin_interior(pts):
    p = LatticePolygon.hull(pts)
    if p.degenerate:
        return
    assert edge_normals(p).is_closed()
    assert polygon_from_slopes(edge_normals(p), angle_minimal_vertex(p)) == p
    if p.contains((0, 0), strict=True):
        for n, _ in edge_normals(p).items():
            assert width(p, n) >= 2
