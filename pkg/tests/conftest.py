from __future__ import annotations

import json
import random

import pytest

from dimerlab.cli.io import fixture_path, load_fixture
from dimerlab.dimer_core import DimerModel, retranslate, split_move
from dimerlab.face_mutation import parse_face_darts
from dimerlab.lattice import LatticePolygon
from dimerlab.matchings import PerfectMatching

# P0 of the four-face model: the matching that the reference placement sends to the origin
GAMMA_P0 = PerfectMatching(frozenset({"e3", "e7", "e6"}))
FIG4 = LatticePolygon.hull([(1, 0), (1, 1), (-1, 0), (0, -1)])
HEXAGON = LatticePolygon.hull([(2, -1), (2, 3), (-2, 3), (-3, 2), (-3, 1), (-2, -1)])
HEXAGON_MUTATED = LatticePolygon.hull([(2, -1), (2, 3), (1, 3), (-1, 2), (-2, 1), (-3, -1)])
ZIG_RESULT = LatticePolygon.hull([(-1, 0), (1, 1), (3, -1), (2, -1)])
ZAG_RESULT = LatticePolygon.hull([(0, -1), (1, 0), (1, 1), (-1, 3)])

CONSISTENT_FIXTURES = ["gamma_4b", "ex48", "honeycomb", "appb_gamma", "appb_gamma_a", "appb_gamma_b"]
SMALL_FIXTURES = ["gamma_4b", "ex48", "honeycomb", "exA4_left", "exA4_right"]


@pytest.fixture(scope="session")
def gamma() -> DimerModel:
    return load_fixture("gamma_4b")


@pytest.fixture(scope="session")
def appb() -> DimerModel:
    return load_fixture("appb_gamma")


def edge_by_ends(m: DimerModel) -> dict[tuple[str, str], str]:
    """Edge id keyed by (white, black) node ids."""
    return {(e.white, e.black): e.id for e in m.edges.values()}


def appb_assignment():
    """Deformation data for the large example with the three-member family and X sizes (1, 1, 2)."""
    from dimerlab.deformation import assignment_for, build_deformation_data

    m = load_fixture("appb_gamma")
    eid = edge_by_ends(m)
    base = build_deformation_data(m, 0, family=[0, 6, 10])
    xs = [[eid[("W4", "B1")]], [eid[("W7", "B9")]], [eid[("W9", "B12")], eid[("W10", "B13")]]]
    return assignment_for(base, xs)


def appb_face_labels():
    data = json.loads(fixture_path("appb_gamma_b_faces.json").read_text(encoding="utf-8"))
    return {k: parse_face_darts(v) for k, v in data.items()}


def perturb(m: DimerModel, rng: random.Random, steps: int | None = None) -> DimerModel:
    """Random gauge changes and split moves; every observable is unchanged."""
    for _ in range(rng.randint(0, 3) if steps is None else steps):
        nid = rng.choice(sorted(m.node_ids()))
        if rng.random() < 0.5:
            m = retranslate(m, nid, (rng.randint(-2, 2), rng.randint(-2, 2)))
            continue
        lst = list(m.rotation[nid])
        if len(lst) < 3:
            continue
        s, k = rng.randrange(len(lst)), rng.randint(1, len(lst) - 1)
        m = split_move(m, nid, [lst[(s + i) % len(lst)] for i in range(k)])
    return m


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(mod.RESULTS):
        ok, text = mod.RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {text}")
