from __future__ import annotations

import json
import random
import re

import pytest

from conftest import FIG4, GAMMA_P0, ZAG_RESULT, ZIG_RESULT, appb_assignment
from dimerlab.cli.io import (
    FormatError,
    dimer_to_text,
    fixture_path,
    load_fixture,
    parse_dimer_text,
    parse_pairs_text,
    write_dimer,
)
from dimerlab.cli.main import main
from dimerlab.cli.render import model_svg, model_tikz, polygon_svg, polygon_tikz
from dimerlab.cli.verify import VerifyError, verify_mutation_agreement
from dimerlab.dimer_core import isomorphic, retranslate
from dimerlab.lattice import LatticePolygon
from dimerlab.matchings import PerfectMatching, enumerate_pms

FIXTURES = ["gamma_4b", "ex48", "honeycomb", "exA4_left", "exA4_right", "appb_gamma", "appb_gamma_a", "appb_gamma_b"]
GAMMA_REF = ",".join(sorted(GAMMA_P0.edges))


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("name", FIXTURES)
def test_text_round_trip(name):
    m = load_fixture(name)
    text = dimer_to_text(m)
    again = parse_dimer_text(text)
    assert again == m
    assert dimer_to_text(again) == text


def test_write_and_read_file(tmp_path, gamma):
    path = tmp_path / "g.dimer"
    write_dimer(gamma, path, header="four faces")
    assert path.read_text().startswith("# four faces")
    assert parse_dimer_text(path.read_text()) == gamma


def test_malformed_rotation():
    text = fixture_path("gamma_4b").read_text()
    broken = re.sub(r"^(W1:.*?)\s+\S+$", r"\1", text, count=1, flags=re.M)
    assert broken != text
    with pytest.raises(FormatError):
        parse_dimer_text(broken)


@pytest.mark.parametrize("text", ["[faces]\n", "B1 B\n", "[edges]\ne1 B1 W1 0\n", "[rotation]\nB1 e1\n"])
def test_malformed_lines(text):
    with pytest.raises(FormatError):
        parse_dimer_text(text)


def test_schedule_text():
    assert parse_pairs_text("# c\nW1 B2 ; W3 B4\n") == [(("W1", "B2"), ("W3", "B4"))]
    with pytest.raises(FormatError):
        parse_pairs_text("W1 B2 W3 B4\n")


def test_highlighted_matching_svg(gamma):
    pms = enumerate_pms(gamma)
    svg = model_svg(gamma, pms[1].sorted())
    assert len(re.findall(r'id="highlight-', svg)) == 3
    assert len(re.findall(r'id="edge-', svg)) == len(gamma.edges) - 3
    assert len(re.findall(r'id="node-', svg)) == len(gamma.nodes)


def test_polygon_svg_counts():
    svg = polygon_svg(FIG4)
    assert len(re.findall(r'id="vertex-', svg)) == 4
    assert len(re.findall(r'id="lattice-point-', svg)) == 5


def test_rendering_is_deterministic(gamma):
    assert model_svg(gamma, ["e1"]) == model_svg(gamma, ["e1"])
    assert polygon_svg(FIG4) == polygon_svg(FIG4)
    assert model_tikz(gamma) == model_tikz(gamma)
    assert polygon_tikz(FIG4).count("circle") == 5


def test_unknown_highlight(gamma):
    with pytest.raises(ValueError):
        model_svg(gamma, ["nope"])


def test_check_and_listing_commands(capsys):
    path = fixture_path("gamma_4b")
    code, out, _ = run(capsys, "check", path)
    assert code == 0 and json.loads(out)["consistent"] is True
    code, out, _ = run(capsys, "pms", path, "--reference", GAMMA_REF)
    assert code == 0 and json.loads(out)["count"] == 8
    code, out, _ = run(capsys, "pm-polygon", path, "--reference", GAMMA_REF)
    assert LatticePolygon.from_json(json.loads(out)) == FIG4
    code, out, _ = run(capsys, "zigzags", path)
    rows = json.loads(out)
    assert [r["length"] for r in rows] == [6, 4, 6, 4] and rows[2]["slope"] == [-1, -1]
    code, out, _ = run(capsys, "faces", path)
    sizes = [r["size"] for r in json.loads(out)]
    assert sorted(sizes) == [4, 4, 6, 6] and sum(sizes) == 2 * 10


def test_mutate_polygon_command(capsys):
    code, out, _ = run(capsys, "mutate-polygon", "--vertices", "2,-1;2,3;-2,3;-3,2;-3,1;-2,-1", "--edge", "3", "--via-dual")
    res = json.loads(out)
    assert code == 0
    assert res["w"] == [0, -1] and res["u_E"] == [-1, 0]
    assert LatticePolygon.from_json(res["result"]) == LatticePolygon.hull(
        [(2, -1), (2, 3), (1, 3), (-1, 2), (-2, 1), (-3, -1)])
    assert res["agree"] is True


def test_exit_codes(capsys, tmp_path):
    bad = tmp_path / "bad.dimer"
    bad.write_text("[nodes]\nB1 Q\n")
    assert run(capsys, "check", bad)[0] == 1
    code, _, err = run(capsys, "deform", fixture_path("gamma_4b"), "--zigzag", "9")
    assert code == 2 and err.startswith("error:")
    code, _, err = run(capsys, "mutate-polygon", "--edge", "0")
    assert code == 2
    code, _, err = run(capsys, "mutate-dimer", fixture_path("gamma_4b"), "--face", "1")
    assert code == 1 and "quadrangle" in err
    with pytest.raises(SystemExit):
        main(["no-such-command"])


def test_deform_command_with_report(capsys, tmp_path):
    out_dir = tmp_path / "rep"
    code, out, _ = run(capsys, "deform", fixture_path("gamma_4b"), "--zigzag", "3", "--report-dir", out_dir,
                       "-o", tmp_path / "d.dimer")
    res = json.loads(out)
    assert code == 0 and res["consistent"] and res["slopes"]["ok"]
    assert res["data"]["weights"] == [2]
    assert LatticePolygon.from_json(res["polygon"]).equal_up_to_translation(ZIG_RESULT)
    assert {p.name for p in out_dir.iterdir()} == {
        "original_model.svg", "deformed_model.svg", "deformed_polygon.svg", "deformed.dimer", "summary.tsv"}
    rows = dict(line.split("\t") for line in (out_dir / "summary.tsv").read_text().splitlines())
    assert rows["consistent"] == "True"


def test_mutate_dimer_replay_command(capsys, tmp_path):
    labels = fixture_path("appb_gamma_b_faces.json")
    argv = ["mutate-dimer", fixture_path("appb_gamma_b"), "--labels", labels, "-o", tmp_path / "out.dimer"]
    for k in range(1, 11):
        argv += ["--face", str(k)]
    code, _, _ = run(capsys, *argv)
    assert code == 0
    assert isomorphic(parse_dimer_text((tmp_path / "out.dimer").read_text()), load_fixture("appb_gamma_a"))


@pytest.mark.parametrize("side, expected", [("zig", ZIG_RESULT), ("zag", ZAG_RESULT)])
def test_verify_command(capsys, tmp_path, side, expected):
    code, out, _ = run(capsys, "verify", fixture_path("gamma_4b"), "--zigzag", "3", "--side", side,
                       "--reference", GAMMA_REF, "--report-dir", tmp_path)
    res = json.loads(out)
    assert code == 0 and res["verdict"] == "pass"
    assert LatticePolygon.from_json(res["mutated_polygon"]) == expected
    assert LatticePolygon.from_json(res["aligned_polygon"]) == expected
    assert (res["mutation"]["h_min"], res["mutation"]["h_max"]) == (-1, 2)
    assert (tmp_path / "summary.tsv").read_text().splitlines()[1] == "verdict\tpass"


def test_verify_rejects_inconsistent_reference(gamma):
    with pytest.raises(VerifyError, match="inconsistent"):
        verify_mutation_agreement(gamma, 2, "zig", r=1, reference=PerfectMatching(frozenset({"e7", "e8", "e10"})))


def test_verify_without_reference_places_at_height_minus_r(gamma):
    rep = verify_mutation_agreement(gamma, 2, "zig")
    assert rep.passed and rep.h_min == -1


def test_verify_is_gauge_stable(gamma):
    rng = random.Random(7)
    for _ in range(5):
        m = gamma
        for _ in range(3):
            m = retranslate(m, rng.choice(sorted(m.node_ids())), (rng.randint(-2, 2), rng.randint(-2, 2)))
        for side, expected in (("zig", ZIG_RESULT), ("zag", ZAG_RESULT)):
            rep = verify_mutation_agreement(m, 2, side, reference=GAMMA_P0)
            assert rep.passed and rep.mutated == expected


def test_verify_large_example():
    from dimerlab.cli.io import read_schedule

    m = load_fixture("appb_gamma")
    rep = verify_mutation_agreement(m, 0, "zig", family=[0, 6, 10], assignment=appb_assignment(),
                         schedule=read_schedule(fixture_path("appb_schedule_A.txt")))
    assert rep.passed
    assert (rep.w.x, rep.w.y, rep.u_e.x, rep.u_e.y) == (0, -1, -1, 0)


def test_shipped_assignment_matches_parameter_sets():
    shipped = json.loads(fixture_path("appb_assignment.json").read_text())
    assert shipped == appb_assignment()


def test_deform_command_reproduces_schedule_results(capsys, tmp_path):
    for name, fixture in (("A", "appb_gamma_a"), ("B", "appb_gamma_b")):
        out_path = tmp_path / f"{name}.dimer"
        code, out, _ = run(capsys, "deform", fixture_path("appb_gamma"), "--zigzag", "1", "--family", "1,7,11",
                           "--assignment", fixture_path("appb_assignment.json"),
                           "--schedule", fixture_path(f"appb_schedule_{name}.txt"), "-o", out_path)
        assert code == 0 and json.loads(out)["data"]["weights"] == [0, 0, 1]
        assert isomorphic(parse_dimer_text(out_path.read_text()), load_fixture(fixture))
