"""Compare a deformed model's polygon with the mutation of the original polygon."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..deformation import (
    DeformationData,
    DeformationError,
    Side,
    build_deformation_data,
    run_deformation,
    slope_transform_report,
)
from ..dimer_core import DimerModel
from ..lattice import ZERO, LatticePolygon, Vec, dot, gl2z_equivalent, heights, outer_normal
from ..matchings import PerfectMatching, pm_point_counts, pm_polygon_fast
from ..polygon_mutation import admits_mutation, context_for_normal, mutate
from ..zigzag import flip_direction, zigzag_paths


class VerifyError(ValueError):
    pass


@dataclass
class VerifyReport:
    polygon: LatticePolygon
    reference: PerfectMatching | None
    origin: Vec  # placement (relative to the first enumerated matching) moved to the origin
    w: Vec
    u_e: Vec
    sign: int
    h_min: int
    h_max: int
    mutated: LatticePolygon
    deformed_polygon: LatticePolygon
    aligned: LatticePolygon
    shift: Vec
    exact: bool
    gl2z: bool
    slopes_ok: bool
    data: DeformationData
    deformed: DimerModel
    steps: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.exact

    def to_json(self) -> dict:
        return {
            "verdict": "pass" if self.passed else "fail",
            "polygon": self.polygon.to_json(),
            "reference": self.reference.sorted() if self.reference is not None else None,
            "origin_shift": list(self.origin),
            "mutation": {
                "w": list(self.w),
                "u_E": list(self.u_e),
                "factor_sign": self.sign,
                "h_min": self.h_min,
                "h_max": self.h_max,
            },
            "mutated_polygon": self.mutated.to_json(),
            "deformation": self.data.to_json(),
            "deformed_model": {
                "nodes": len(self.deformed.nodes),
                "edges": len(self.deformed.edges),
                "removal_steps": [s.to_json() for s in self.steps],
            },
            "deformed_polygon": self.deformed_polygon.to_json(),
            "aligned_polygon": self.aligned.to_json(),
            "alignment_shift": list(self.shift),
            "exact_equal": self.exact,
            "gl2z_equivalent": self.gl2z,
            "slope_laws": self.slopes_ok,
        }


def _edge_start(p: LatticePolygon, v: Vec) -> Vec | None:
    for a, b in p.edges():
        if outer_normal(b - a) == v:
            return a
    return None


def _align(target: LatticePolygon, moved: LatticePolygon, keep: Sequence[Vec]) -> Vec:
    """Shift laying the first shared edge with outer normal in ``keep`` of ``moved`` onto ``target``."""
    for v in keep:
        a, b = _edge_start(target, v), _edge_start(moved, v)
        if a is not None and b is not None:
            return a - b
    return min(target.vertices) - min(moved.vertices)


def verify_mutation_agreement(
    m: DimerModel,
    z: int,
    side: Side | str = Side.ZIG,
    r: int | None = None,
    family: Sequence[int] | None = None,
    assignment: Mapping[str, int] | None = None,
    schedule="auto",
    reference: PerfectMatching | None = None,
    shortcut: bool | None = None,
) -> VerifyReport:
    """Deform ``m`` at path index ``z`` and compare with the polygon mutation it should induce.

    The polygon is placed by ``reference`` (the matching sent to the origin).
    Without a reference, the lowest lattice point at height ``h_min + r``
    along ``w = -[z]`` is moved to the origin, so that ``h_min = -r``.
    """
    side = Side(side)
    paths = zigzag_paths(m)
    w = -paths[z].slope
    if r is None and family is not None:
        r = len(family)
    counts = pm_point_counts(m, reference)
    origin = ZERO
    if reference is None and r is not None:
        lo = min(dot(w, q) for q in counts)
        level = sorted(q for q in counts if dot(w, q) == lo + r)
        if not level:
            raise VerifyError("deformation/mutation data inconsistent")
        origin = level[0]
    poly = LatticePolygon.hull(q - origin for q in counts)
    lo, hi = heights(poly, w)
    if r is None:
        r = -lo
    if r != -lo:
        raise VerifyError("deformation/mutation data inconsistent")
    n = paths[z].length // 2
    if hi != n - r:
        raise VerifyError("deformation/mutation data inconsistent")
    flip = flip_direction(m, paths[z])
    sign = 1 if side is Side.ZIG else -1
    ctx = context_for_normal(poly, w, flip * sign)
    if not admits_mutation(ctx):
        raise VerifyError("mutation not admissible")
    mutated = mutate(ctx)

    data = build_deformation_data(m, z, r, family, side, assignment, paths=paths)
    run = run_deformation(data, schedule, shortcut)
    deformed_poly = pm_polygon_fast(run.result)
    # paths crossing on the removed side keep their slopes, and so do the edges they label
    kept = data.y_paths if side is Side.ZIG else data.x_paths
    keep = [paths[k].slope for k in kept] + [w]
    shift = _align(mutated, deformed_poly, keep)
    aligned = deformed_poly.translate(shift)
    rep = slope_transform_report(m, data, run.result)
    return VerifyReport(
        poly, reference, origin, w, ctx.u_e, sign, lo, hi, mutated, deformed_poly, aligned, shift,
        aligned == mutated, gl2z_equivalent(mutated, deformed_poly), rep.ok, data, run.result, run.steps,
    )


__all__ = ["VerifyError", "VerifyReport", "verify_mutation_agreement", "DeformationError"]
