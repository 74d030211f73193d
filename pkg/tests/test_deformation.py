from __future__ import annotations

import pytest

from conftest import HEXAGON_MUTATED, ZAG_RESULT, ZIG_RESULT, appb_assignment
from dimerlab.cli.io import fixture_path, load_fixture, read_schedule
from dimerlab.deformation import (
    DeformationError,
    Side,
    build_deformation_data,
    deform_zag,
    deform_zig,
    is_hexagonal,
    restore_consistency,
    run_deformation,
    slope_transform_report,
    uses_shortcut,
)
from dimerlab.dimer_core import cover, isomorphic
from dimerlab.lattice import LatticeVector as V
from dimerlab.matchings import is_nondegenerate, pm_polygon_fast
from dimerlab.zigzag import crossing_count, is_consistent, is_isoradial, zigzag_paths


def schedule(name: str):
    return read_schedule(fixture_path(f"appb_schedule_{name}.txt"))


@pytest.fixture(scope="module")
def appb_runs():
    m = load_fixture("appb_gamma")
    data = build_deformation_data(m, 0, family=[0, 6, 10], assignment=appb_assignment())
    return m, data, {k: run_deformation(data, schedule(k), shortcut=False) for k in "AB"}


def test_gamma_data(gamma):
    data = build_deformation_data(gamma, 2, 1)
    assert (data.n, data.r, data.h) == (3, 1, 2)
    assert data.p == (2,) and data.q == (2,)
    assert data.slope == V(-1, -1)
    z = data.paths[data.z]
    xs = {data.paths[k].slope: crossing_count(z, data.paths[k]) for k in data.x_paths}
    ys = {data.paths[k].slope: crossing_count(z, data.paths[k]) for k in data.y_paths}
    assert xs == {V(1, 0): 1, V(1, -1): 2}
    assert ys == {V(-1, 2): 3}


def test_weights_sum_to_height(gamma):
    for data in (build_deformation_data(gamma, 2, 1),
                 build_deformation_data(load_fixture("appb_gamma"), 0, family=[0, 6, 10])):
        assert sum(data.p) == data.h == data.n - data.r
        assert all(len(x) >= 1 for x in data.X)


def test_family_larger_than_available(gamma):
    with pytest.raises(DeformationError):
        build_deformation_data(gamma, 2, 2)


def test_appb_parameter_sizes():
    data = build_deformation_data(load_fixture("appb_gamma"), 0, family=[0, 6, 10], assignment=appb_assignment())
    assert [len(x) for x in data.X] == [1, 1, 2]
    assert data.p == (0, 0, 1)


@pytest.mark.parametrize("side, expected", [("zig", ZIG_RESULT), ("zag", ZAG_RESULT)])
def test_gamma_polygons(gamma, side, expected):
    data = build_deformation_data(gamma, 2, 1, side=side)
    out = (deform_zig if side == "zig" else deform_zag)(gamma, data)
    assert is_consistent(out)
    assert pm_polygon_fast(out).equal_up_to_translation(expected)


def test_gamma_new_paths(gamma):
    data = build_deformation_data(gamma, 2, 1)
    out = deform_zig(gamma, data)
    slopes = [z.slope for z in zigzag_paths(out)]
    assert slopes.count(V(1, 1)) == data.h
    assert V(-1, -1) not in slopes
    assert slope_transform_report(gamma, data, out).ok


@pytest.mark.parametrize("side", ["zig", "zag"])
def test_slope_report_on_hexagonal_cover(side):
    m = cover(load_fixture("honeycomb"), 3, 3)
    data = build_deformation_data(m, 0, 2, side=side)
    run = run_deformation(data, shortcut=False)
    assert is_consistent(run.result)
    assert slope_transform_report(m, data, run.result).ok


def test_consistent_but_not_isoradial():
    m = load_fixture("ex48")
    k = [i for i, z in enumerate(zigzag_paths(m)) if z.slope == V(-1, 0)][0]
    data = build_deformation_data(m, k, 1)
    assert data.p == (1,)
    out = deform_zig(m, data)
    assert is_consistent(out)
    assert not is_isoradial(out)


def test_shortcut_on_hexagonal_cover():
    m = cover(load_fixture("honeycomb"), 3, 3)
    assert is_hexagonal(m)
    for side in Side:
        data = build_deformation_data(m, 0, 2, side=side)
        assert uses_shortcut(data)
        fast = run_deformation(data, shortcut=True).result
        full = run_deformation(data, shortcut=False).result
        assert pm_polygon_fast(fast) == pm_polygon_fast(full)


def test_shortcut_single_path(gamma):
    for side in Side:
        data = build_deformation_data(gamma, 2, 1, side=side)
        fast = run_deformation(data, shortcut=True).result
        full = run_deformation(data, shortcut=False).result
        assert pm_polygon_fast(fast) == pm_polygon_fast(full)


def test_schedules_reproduce_fixtures(appb_runs):
    _, _, runs = appb_runs
    a, b = load_fixture("appb_gamma_a"), load_fixture("appb_gamma_b")
    assert isomorphic(runs["A"].result, a) and not isomorphic(runs["A"].result, b)
    assert isomorphic(runs["B"].result, b) and not isomorphic(runs["B"].result, a)


def test_schedules_give_same_polygon(appb_runs):
    m, data, runs = appb_runs
    for run in runs.values():
        assert is_consistent(run.result)
        assert pm_polygon_fast(run.result).equal_up_to_translation(HEXAGON_MUTATED)
        assert slope_transform_report(m, data, run.result).ok
        assert [s.kind for s in run.steps] == ["pair"] * 5


def test_pre_restoration_state(appb_runs):
    _, _, runs = appb_runs
    before = runs["A"].before
    assert before == runs["B"].before
    assert not is_consistent(before)
    assert is_nondegenerate(before)


def test_auto_schedule_also_reaches_the_polygon(appb_runs):
    _, data, _ = appb_runs
    out = run_deformation(data, "auto", shortcut=False).result
    assert is_consistent(out)
    assert pm_polygon_fast(out).equal_up_to_translation(HEXAGON_MUTATED)


def test_restore_leaves_consistent_model_alone(gamma):
    log = []
    out = restore_consistency(gamma, "auto", log)
    assert log == []
    assert isomorphic(out, gamma)


def test_schedule_naming_a_missing_pair(appb_runs):
    _, data, _ = appb_runs
    with pytest.raises(DeformationError):
        run_deformation(data, [(("W1", "B1"), ("W2", "B2"))], shortcut=False)


def test_data_from_another_model(gamma):
    data = build_deformation_data(gamma, 2, 1)
    with pytest.raises(DeformationError):
        deform_zig(load_fixture("ex48"), data)
