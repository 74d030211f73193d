"""Command line interface.

JSON goes to standard output. Exit status is 0 on success (or a passing
verification), 1 on a domain error or a failing verification, and 2 on a
usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path
from typing import Sequence

from ..deformation import (
    DeformationError,
    Side,
    build_deformation_data,
    run_deformation,
    slope_transform_report,
)
from ..dimer_core import DimerError, DimerModel, faces, natural_key, validate
from ..face_mutation import MutationError as FaceMutationError
from ..face_mutation import face_label, mutate_face, parse_face_darts, replay
from ..lattice import LatticeError, LatticePolygon, edge_normals
from ..matchings import MatchingError, PerfectMatching, enumerate_pms, is_perfect_matching, pm_polygon, pm_point_counts
from ..polygon_mutation import MutationError as PolygonMutationError
from ..polygon_mutation import admits_mutation, make_context, mutate, mutate_via_dual
from ..zigzag import classify_type, consistency_report, is_isoradial, is_properly_ordered, zigzag_paths
from .io import FormatError, dimer_to_text, parse_dimer, read_polygon, read_schedule, write_dimer
from .render import model_tikz, polygon_svg, polygon_tikz, render_svg
from .verify import VerifyError, verify_mutation_agreement

DOMAIN_ERRORS = (
    DimerError, DeformationError, FaceMutationError, FormatError, LatticeError, MatchingError,
    PolygonMutationError, VerifyError, FileNotFoundError, KeyError,
)


class UsageError(Exception):
    pass


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _ids(text: str | None) -> list[str]:
    if not text:
        return []
    return [t for t in text.replace(",", " ").split() if t]


def _path_index(text: str, count: int, what: str = "zigzag path") -> int:
    try:
        k = int(text)
    except ValueError as exc:
        raise UsageError(f"{what} id must be an integer, got {text!r}") from exc
    if not 1 <= k <= count:
        raise UsageError(f"{what} id {k} out of range 1..{count}")
    return k - 1


def _reference(m: DimerModel, text: str | None) -> PerfectMatching | None:
    if not text:
        return None
    edges = _ids(text)
    if not is_perfect_matching(m, edges):
        raise MatchingError("reference is not a perfect matching")
    return PerfectMatching(frozenset(edges))


def _assignment(text: str | None) -> dict[str, int] | None:
    if text in (None, "auto"):
        return None
    data = json.loads(Path(text).read_text(encoding="utf-8"))
    return {str(k): int(v) for k, v in data.items()}


def _schedule(text: str | None):
    if text in (None, "auto"):
        return "auto"
    return read_schedule(text)


def _shortcut(text: str) -> bool | None:
    return {"auto": None, "on": True, "off": False}[text]


# ---------------------------------------------------------------------------
# commands


def cmd_check(args) -> int:
    m = parse_dimer(args.model, check=False)
    rep = validate(m)
    out = {"valid": rep.ok, "validation": rep.to_json()}
    if rep.ok:
        cons = consistency_report(m)
        out.update(
            consistent=cons.ok,
            properly_ordered=is_properly_ordered(m),
            isoradial=is_isoradial(m),
            trivial_paths=[k + 1 for k in cons.trivial],
            self_intersecting_paths=[k + 1 for k in cons.self_intersecting],
            bad_pairs=[[a + 1, b + 1] for a, b in cons.bad_pairs],
        )
    _emit(out)
    return 0 if rep.ok else 1


def cmd_pms(args) -> int:
    m = parse_dimer(args.model)
    res = pm_polygon(m, _reference(m, args.reference))
    _emit({
        "count": len(res.matchings),
        "reference": res.reference.sorted(),
        "matchings": [
            {"edges": p.sorted(), "height": list(res.placement[p]), "kind": res.classification[p].value}
            for p in res.matchings
        ],
    })
    return 0


def cmd_pm_polygon(args) -> int:
    m = parse_dimer(args.model)
    ref = _reference(m, args.reference)
    counts = pm_point_counts(m, ref)
    poly = LatticePolygon.hull(counts)
    out = poly.to_json()
    out["points"] = [{"point": [q.x, q.y], "count": counts[q]} for q in sorted(counts)]
    out["edge_normals"] = edge_normals(poly).to_json()["slopes"] if not poly.degenerate else []
    _emit(out)
    return 0


def cmd_zigzags(args) -> int:
    m = parse_dimer(args.model)
    paths = zigzag_paths(m)
    _emit([
        {
            "id": k + 1,
            "slope": list(z.slope),
            "length": z.length,
            "type": classify_type(m, z, paths).value,
            "zigs": z.zigs(),
            "zags": z.zags(),
        }
        for k, z in enumerate(paths)
    ])
    return 0


def _deform_common(args):
    m = parse_dimer(args.model)
    paths = zigzag_paths(m)
    z = _path_index(args.zigzag, len(paths))
    family = [_path_index(t, len(paths)) for t in _ids(args.family)] or None
    if family is not None and z not in family:
        raise UsageError("the chosen zigzag path must belong to the family")
    if family is not None:
        family = [z] + [k for k in family if k != z]
    return m, paths, z, family


def cmd_deform(args) -> int:
    m, paths, z, family = _deform_common(args)
    data = build_deformation_data(m, z, args.r, family, Side(args.side), _assignment(args.assignment), paths=paths)
    run = run_deformation(data, _schedule(args.schedule), _shortcut(args.shortcut))
    out_model = run.result
    if args.output:
        write_dimer(out_model, args.output, header=f"deformation at {args.side} of path {z + 1}")
    rep = slope_transform_report(m, data, out_model)
    poly = LatticePolygon.hull(pm_point_counts(out_model))
    result = {
        "data": data.to_json(),
        "shortcut": run.shortcut,
        "removal_steps": [s.to_json() for s in run.steps],
        "nodes": len(out_model.nodes),
        "edges": len(out_model.edges),
        "consistent": consistency_report(out_model).ok,
        "polygon": poly.to_json(),
        "slopes": rep.to_json(),
    }
    if not args.output:
        result["model"] = dimer_to_text(out_model)
    if args.report_dir:
        _deform_report(Path(args.report_dir), m, out_model, poly, result)
    _emit(result)
    return 0


def _write_rows(path: Path, rows: Sequence[Sequence]) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        csv.writer(fh, delimiter="\t", lineterminator="\n").writerows(rows)


def _deform_report(out: Path, m: DimerModel, deformed: DimerModel, poly: LatticePolygon, result: dict) -> None:
    out.mkdir(parents=True, exist_ok=True)
    render_svg(m, out / "original_model.svg")
    render_svg(deformed, out / "deformed_model.svg")
    render_svg(poly, out / "deformed_polygon.svg", title="deformed")
    write_dimer(deformed, out / "deformed.dimer")
    rows = [["quantity", "value"], ["nodes", result["nodes"]], ["edges", result["edges"]],
            ["consistent", result["consistent"]], ["shortcut", result["shortcut"]],
            ["polygon", " ".join(f"{x},{y}" for x, y in result["polygon"]["vertices"])],
            ["slope_laws", result["slopes"]["ok"]]]
    _write_rows(out / "summary.tsv", rows)


def cmd_mutate_polygon(args) -> int:
    if args.polygon:
        p = read_polygon(args.polygon)
    elif args.vertices:
        p = LatticePolygon.hull(tuple(int(c) for c in pt.split(",")) for pt in args.vertices.split(";"))
    else:
        raise UsageError("give --polygon FILE or --vertices 'x,y;x,y;...'")
    ctx = make_context(p, args.edge, args.sign)
    out = {
        "polygon": p.to_json(),
        "w": list(ctx.w),
        "u_E": list(ctx.u_e),
        "h_min": ctx.h_min,
        "h_max": ctx.h_max,
        "admissible": admits_mutation(ctx),
    }
    if not out["admissible"]:
        _emit(out)
        raise PolygonMutationError("mutation not admissible")
    res = mutate(ctx)
    out["result"] = res.to_json()
    if args.via_dual:
        out["via_dual"] = mutate_via_dual(ctx).to_json()
        out["agree"] = out["via_dual"] == out["result"]
    _emit(out)
    return 0


def cmd_mutate_dimer(args) -> int:
    m = parse_dimer(args.model)
    if args.labels:
        labels = {k: parse_face_darts(v) for k, v in json.loads(Path(args.labels).read_text(encoding="utf-8")).items()}
        missing = [f for f in args.face if f not in labels]
        if missing:
            raise UsageError(f"face labels {missing} not in {args.labels}")
        out_model = replay(m, labels, args.face, args.variant)
    else:
        out_model = m
        for f in args.face:
            fs = faces(out_model)
            out_model = mutate_face(out_model, _path_index(f, len(fs), "face") , args.variant).model
    if args.output:
        write_dimer(out_model, args.output, header=f"mutation at faces {' '.join(args.face)}")
        _emit({"nodes": len(out_model.nodes), "edges": len(out_model.edges), "output": args.output})
    else:
        sys.stdout.write(dimer_to_text(out_model))
    return 0


def cmd_faces(args) -> int:
    m = parse_dimer(args.model)
    _emit([{"id": i + 1, "size": len(f), "darts": face_label(f)} for i, f in enumerate(faces(m))])
    return 0


def cmd_verify(args) -> int:
    m, paths, z, family = _deform_common(args)
    rep = verify_mutation_agreement(
        m, z, Side(args.side), args.r, family, _assignment(args.assignment), _schedule(args.schedule),
        _reference(m, args.reference), _shortcut(args.shortcut),
    )
    out = rep.to_json()
    if args.report_dir:
        d = Path(args.report_dir)
        d.mkdir(parents=True, exist_ok=True)
        render_svg(rep.polygon, d / "original_polygon.svg", title="original")
        render_svg(rep.mutated, d / "mutated_polygon.svg", title="mutation")
        render_svg(rep.aligned, d / "deformed_polygon.svg", title="deformation")
        render_svg(rep.deformed, d / "deformed_model.svg")
        write_dimer(rep.deformed, d / "deformed.dimer")
        fmt = lambda p: " ".join(f"{v.x},{v.y}" for v in p.vertices)  # noqa: E731
        _write_rows(d / "summary.tsv", [
            ["quantity", "value"],
            ["verdict", out["verdict"]],
            ["w", f"{rep.w.x},{rep.w.y}"],
            ["u_E", f"{rep.u_e.x},{rep.u_e.y}"],
            ["h_min", rep.h_min],
            ["h_max", rep.h_max],
            ["original_polygon", fmt(rep.polygon)],
            ["mutated_polygon", fmt(rep.mutated)],
            ["deformed_polygon", fmt(rep.aligned)],
            ["exact_equal", rep.exact],
            ["gl2z_equivalent", rep.gl2z],
            ["slope_laws", rep.slopes_ok],
        ])
    _emit(out)
    return 0 if rep.passed else 1


def cmd_render(args) -> int:
    if args.polygon:
        obj = read_polygon(args.polygon)
        text = polygon_tikz(obj) if args.format == "tikz" else polygon_svg(obj)
    else:
        if not args.model:
            raise UsageError("give a model file or --polygon FILE")
        obj = parse_dimer(args.model)
        hl = _ids(args.highlight)
        if args.pm is not None:
            pms = enumerate_pms(obj)
            hl += pms[_path_index(str(args.pm), len(pms), "matching")].sorted()
        if args.zigzag is not None:
            paths = zigzag_paths(obj)
            hl += paths[_path_index(str(args.zigzag), len(paths))].edges()
        hl = sorted(set(hl), key=natural_key)
        if args.format == "tikz":
            text = model_tikz(obj, hl)
        else:
            from .render import model_svg

            text = model_svg(obj, hl, args.labels)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# parser


def _deform_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("model", help=".dimer file")
    p.add_argument("--side", choices=["zig", "zag"], default="zig")
    p.add_argument("--zigzag", required=True, help="1-based id of the chosen type I path (see 'zigzags')")
    p.add_argument("--r", type=int, default=None, help="number of family members (default: family size or 1)")
    p.add_argument("--family", default=None, help="comma separated path ids of the family")
    p.add_argument("--assignment", default="auto", help="JSON file mapping sub-path labels to members, or 'auto'")
    p.add_argument("--schedule", default="auto", help="removal schedule file, or 'auto'")
    p.add_argument("--shortcut", choices=["auto", "on", "off"], default="auto")
    p.add_argument("--report-dir", default=None, help="write figures and a TSV summary here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dimerlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate a model and report consistency")
    p.add_argument("model")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("pms", help="list perfect matchings with height changes")
    p.add_argument("model")
    p.add_argument("--reference", default=None, help="edges of the reference matching")
    p.set_defaults(func=cmd_pms)

    p = sub.add_parser("pm-polygon", help="perfect matching polygon with point multiplicities")
    p.add_argument("model")
    p.add_argument("--reference", default=None)
    p.set_defaults(func=cmd_pm_polygon)

    p = sub.add_parser("zigzags", help="zigzag paths with slopes and types")
    p.add_argument("model")
    p.set_defaults(func=cmd_zigzags)

    p = sub.add_parser("faces", help="faces with their darts (for mutate-dimer)")
    p.add_argument("model")
    p.set_defaults(func=cmd_faces)

    p = sub.add_parser("deform", help="deformation at zig or zag")
    _deform_args(p)
    p.add_argument("-o", "--output", default=None, help="write the deformed model here")
    p.set_defaults(func=cmd_deform)

    p = sub.add_parser("mutate-polygon", help="mutation of a lattice polygon")
    p.add_argument("--polygon", default=None, help="polygon JSON file ({'vertices': [[x, y], ...]})")
    p.add_argument("--vertices", default=None, help="inline vertices 'x,y;x,y;...'")
    p.add_argument("--edge", type=int, required=True, help="0-based edge index (edge i joins vertex i and i+1)")
    p.add_argument("--sign", type=int, choices=[1, -1], default=1)
    p.add_argument("--via-dual", action="store_true", help="also compute through the dual polygon")
    p.set_defaults(func=cmd_mutate_polygon)

    p = sub.add_parser("mutate-dimer", help="mutation at quadrangle faces")
    p.add_argument("model")
    p.add_argument("--face", action="append", required=True,
                   help="1-based face id (see 'faces'), or a label from --labels; repeat for a sequence")
    p.add_argument("--labels", default=None, help="JSON file naming faces by their darts")
    p.add_argument("--variant", choices=["black", "white"], default="black")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_mutate_dimer)

    p = sub.add_parser("verify", help="check that deformation induces the polygon mutation")
    _deform_args(p)
    p.add_argument("--reference", default=None, help="edges of the matching placed at the origin")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("render", help="draw a model or polygon as SVG or TikZ")
    p.add_argument("model", nargs="?", default=None)
    p.add_argument("--polygon", default=None)
    p.add_argument("--highlight", default=None, help="edge ids to highlight")
    p.add_argument("--pm", type=int, default=None, help="highlight the k-th perfect matching (1-based)")
    p.add_argument("--zigzag", type=int, default=None, help="highlight a zigzag path (1-based)")
    p.add_argument("--labels", action="store_true", help="label nodes")
    p.add_argument("--format", choices=["svg", "tikz"], default="svg")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DOMAIN_ERRORS as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
