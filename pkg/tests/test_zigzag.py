from __future__ import annotations

from collections import Counter

import pytest

from dimerlab.cli.io import load_fixture
from dimerlab.dimer_core import cover
from dimerlab.lattice import edge_normals, primitive
from dimerlab.matchings import enumerate_pms, pm_polygon_fast
from dimerlab.zigzag import (
    ZigzagType,
    boundary_matchings_for,
    classify_type,
    consistency_report,
    crossing_count,
    flip_direction,
    intersection_size,
    is_consistent,
    is_isoradial,
    is_properly_ordered,
    lift_table,
    slope_multiset,
    zigzag_paths,
)

from conftest import CONSISTENT_FIXTURES


def test_paths_of_four_face_model(gamma):
    ps = zigzag_paths(gamma)
    assert Counter((tuple(z.slope), z.length) for z in ps) == Counter(
        {((1, 0), 4): 1, ((-1, 2), 6): 1, ((-1, -1), 6): 1, ((1, -1), 4): 1}
    )
    assert [tuple(z.slope) for z in ps] == [(-1, 2), (1, -1), (-1, -1), (1, 0)]
    assert slope_multiset(ps).is_closed()


def test_honeycomb_paths():
    ps = zigzag_paths(load_fixture("honeycomb"))
    assert [z.length for z in ps] == [2, 2, 2]


@pytest.mark.parametrize("name", CONSISTENT_FIXTURES + ["exA4_left"])
def test_darts_partitioned(name):
    m = load_fixture(name)
    ps = zigzag_paths(m)
    darts = [d for z in ps for d in z.darts]
    assert len(darts) == len(set(darts)) == 2 * len(m.edges)
    for z in ps:
        assert z.length % 2 == 0
        assert all(d.forward for d in z.darts[0::2])
        assert not any(d.forward for d in z.darts[1::2])


def _by_slope(ps, s):
    (k,) = [i for i, z in enumerate(ps) if tuple(z.slope) == s]
    return ps[k]


def test_crossing_counts_with_chosen_path(gamma):
    ps = zigzag_paths(gamma)
    z = _by_slope(ps, (-1, -1))
    assert crossing_count(_by_slope(ps, (1, 0)), z) == 1
    assert crossing_count(_by_slope(ps, (-1, 2)), z) == 3
    assert crossing_count(_by_slope(ps, (1, -1)), z) == 2


def test_lift_pairs_share_one_edge(gamma):
    ps = zigzag_paths(gamma)
    t = lift_table(_by_slope(ps, (1, 0)), _by_slope(ps, (-1, -1)))
    assert t.max_shared() == 1
    for z in ps:
        assert not lift_table(z, z).self_intersections()


@pytest.mark.parametrize("name", CONSISTENT_FIXTURES)
def test_slopes_are_polygon_normals(name):
    m = load_fixture(name)
    assert slope_multiset(zigzag_paths(m)) == edge_normals(pm_polygon_fast(m))


def test_four_face_model_predicates(gamma):
    assert is_consistent(gamma) and is_properly_ordered(gamma) and is_isoradial(gamma)
    ps = zigzag_paths(gamma)
    assert all(classify_type(gamma, z, ps) is ZigzagType.TYPE_I for z in ps)


@pytest.mark.parametrize("name", CONSISTENT_FIXTURES + ["exA4_left", "exA4_right"])
def test_consistent_iff_properly_ordered(name):
    m = load_fixture(name)
    assert is_consistent(m) == is_properly_ordered(m)
    if is_isoradial(m):
        assert is_consistent(m)


def test_type_two_paths():
    m = load_fixture("exA4_left")
    ps = zigzag_paths(m)
    for z in ps:
        kind = classify_type(m, z, ps)
        if tuple(z.slope) in ((-1, 1), (1, -1)):
            assert kind is ZigzagType.TYPE_II
    right = load_fixture("exA4_right")
    rps = zigzag_paths(right)
    assert all(classify_type(right, z, rps) is ZigzagType.TYPE_I for z in rps)
    assert is_isoradial(right)


def test_boundary_matchings_for_chosen_path(gamma):
    ps = zigzag_paths(gamma)
    z = _by_slope(ps, (-1, -1))
    pz, pz2 = boundary_matchings_for(gamma, z)
    assert {d.edge for d in z.darts if d.edge in pz.edges} == set(z.zigs())
    assert {d.edge for d in z.darts if d.edge in pz2.edges} == set(z.zags())
    flip = flip_direction(gamma, z)
    assert primitive(flip) == flip and flip.x * z.slope.x + flip.y * z.slope.y == 0
    assert flip in ((1, -1), (-1, 1))
    assert intersection_size(z, pz) == 3
    assert min(intersection_size(z, p) for p in enumerate_pms(gamma)) == 0


def test_covers_stay_consistent():
    for nx, ny in [(1, 2), (2, 2), (3, 3)]:
        m = cover(load_fixture("honeycomb"), nx, ny)
        assert is_consistent(m) and is_properly_ordered(m)


def test_report_lists_problems():
    from dimerlab.deformation import build_deformation_data, pre_restoration

    m = cover(load_fixture("honeycomb"), 3, 3)
    data = build_deformation_data(m, 0, 2)
    before = pre_restoration(data, bypasses=True)
    rep = consistency_report(before)
    assert not rep.ok
