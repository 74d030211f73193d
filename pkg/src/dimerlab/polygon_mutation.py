"""Combinatorial mutation of lattice polygons and the dual-side map.

A mutation is specified by an edge ``E`` of the polygon: ``w`` is the
primitive inner normal of ``E`` and the factor is the segment from the origin
to ``u_E``, a primitive vector along ``E``. Two independent constructions are
provided: the direct slice-by-slice one (:func:`mutate`) and the one through
the dual polyhedron and the piecewise linear map (:func:`mutate_via_dual`).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import ceil, floor
from typing import Sequence

from .lattice import (
    LatticeError,
    LatticePolygon,
    RationalPolygon,
    Vec,
    convex_hull,
    cross,
    dot,
    heights,
    lattice_length,
    primitive,
    vec,
)


class MutationError(ValueError):
    """Raised when a mutation is requested that is not defined."""


@dataclass(frozen=True)
class MutationContext:
    polygon: LatticePolygon
    edge_index: int
    w: Vec
    u_e: Vec
    h_min: int
    h_max: int

    @property
    def factor(self) -> tuple[Vec, Vec]:
        return Vec(0, 0), self.u_e

    @property
    def edge(self) -> tuple[Vec, Vec]:
        return self.polygon.edges()[self.edge_index]

    @property
    def width(self) -> int:
        return self.h_max - self.h_min


def make_context(p: LatticePolygon, edge_index: int, sign: int = 1) -> MutationContext:
    """Mutation data for edge ``edge_index`` (edge i runs from vertex i to i+1).

    ``u_E`` is ``sign`` times the primitive counterclockwise direction of the
    edge.
    """
    if p.degenerate:
        raise MutationError("mutation needs a two-dimensional polygon")
    edges = p.edges()
    if not 0 <= edge_index < len(edges):
        raise MutationError(f"edge index {edge_index} out of range 0..{len(edges) - 1}")
    if sign not in (1, -1):
        raise MutationError("sign must be +1 or -1")
    a, b = edges[edge_index]
    d = primitive(b - a)
    w = Vec(-d.y, d.x)  # inner normal of a counterclockwise edge
    lo, hi = heights(p, w)
    return MutationContext(p, edge_index, w, d * sign, lo, hi)


def edge_with_inner_normal(p: LatticePolygon, w: Sequence[int]) -> int:
    """Index of the edge whose primitive inner normal is ``w``."""
    for i, (a, b) in enumerate(p.edges()):
        d = primitive(b - a)
        if Vec(-d.y, d.x) == tuple(w):
            return i
    raise MutationError(f"no edge with inner normal {tuple(w)}")


def context_for_normal(p: LatticePolygon, w: Sequence[int], u_e: Sequence[int]) -> MutationContext:
    """Context from explicit ``w`` and ``u_E`` (``u_E`` must lie along the edge)."""
    i = edge_with_inner_normal(p, w)
    ctx = make_context(p, i, 1)
    if tuple(u_e) == tuple(ctx.u_e):
        return ctx
    if tuple(u_e) == tuple(-ctx.u_e):
        return make_context(p, i, -1)
    raise MutationError(f"u_E={tuple(u_e)} is not a primitive direction of the edge")


def admits_mutation(ctx: MutationContext) -> bool:
    a, b = ctx.edge
    return lattice_length(b - a) >= -ctx.h_min


def slice_at(p: LatticePolygon, w: Sequence[int], u: Sequence[int], h: int) -> tuple[Vec, int, int] | None:
    """Lattice points of ``p`` at height ``h`` as ``(base, t0, t1)``.

    The points are ``base + t*u`` for ``t0 <= t <= t1``; ``u`` must be
    primitive with ``<w, u> = 0``. Returns ``None`` for an empty slice.
    """
    base = _point_at_height(w, h)
    lo: Fraction | None = None
    hi: Fraction | None = None
    for a, b in p.edges():
        # inside means cross(b - a, x - a) >= 0
        e = b - a
        c0 = cross(e, base - a)
        c1 = cross(e, u)
        if c1 == 0:
            if c0 < 0:
                return None
            continue
        bound = Fraction(-c0, c1)
        if c1 > 0:
            lo = bound if lo is None else max(lo, bound)
        else:
            hi = bound if hi is None else min(hi, bound)
    if lo is None or hi is None:
        raise MutationError("unbounded slice; polygon is degenerate")
    t0, t1 = ceil(lo), floor(hi)
    if t0 > t1:
        return None
    return base, t0, t1


def _point_at_height(w: Sequence[int], h: int) -> Vec:
    from .lattice import ext_gcd

    g, s, t = ext_gcd(w[0], w[1])
    if g != 1:
        raise LatticeError("w must be primitive")
    return Vec(s * h, t * h)


def _shortened_slice(
    p: LatticePolygon, w: Vec, u: Vec, h: int, sl: tuple[Vec, int, int] | None
) -> tuple[Vec, Vec] | None:
    """The segment ``G_h`` at a negative height, or ``None`` when it may be empty.

    ``G_h`` may only be empty when no vertex of ``p`` sits at height ``h``.
    """
    has_vertex = any(dot(w, v) == h for v in p.vertices)
    if sl is not None:
        base, t0, t1 = sl
        if t1 + h >= t0:
            return base + u * t0, base + u * (t1 + h)
    if has_vertex:
        raise MutationError("mutation not admissible")
    return None


def mutate(ctx: MutationContext) -> LatticePolygon:
    """Direct construction of the mutated polygon.

    Slices below height 0 lose ``-h`` steps of ``u_E`` at their ``u_E`` end;
    slices at height ``h >= 0`` are stretched by ``h`` steps of ``u_E``.
    """
    if not admits_mutation(ctx):
        raise MutationError("mutation not admissible")
    p, w, u = ctx.polygon, ctx.w, ctx.u_e
    pts: list[Vec] = []
    for h in range(ctx.h_min, ctx.h_max + 1):
        sl = slice_at(p, w, u, h)
        if h < 0:
            seg = _shortened_slice(p, w, u, h, sl)
            if seg is not None:
                pts += list(seg)
            continue
        if sl is not None:
            base, t0, t1 = sl
            pts += [base + u * t0, base + u * (t1 + h)]
    return LatticePolygon.hull(pts)


def mutate_all_choices(ctx: MutationContext) -> set[LatticePolygon]:
    """Slow oracle: hulls over every admissible choice of the segments ``G_h``.

    At each negative height every lattice segment ``G`` (or the empty set)
    with ``vertices at h  <=  G + (-h)F  <=  slice`` is tried. The result
    set should be a singleton.
    """
    p, w, u = ctx.polygon, ctx.w, ctx.u_e
    fixed: list[Vec] = []
    options: list[list[tuple[Vec, ...]]] = []
    for h in range(ctx.h_min, ctx.h_max + 1):
        sl = slice_at(p, w, u, h)
        if h >= 0:
            if sl is not None:
                base, t0, t1 = sl
                fixed += [base + u * t0, base + u * (t1 + h)]
            continue
        at_h = [v for v in p.vertices if dot(w, v) == h]
        choices: list[tuple[Vec, ...]] = [] if at_h else [()]
        if sl is not None:
            base, t0, t1 = sl
            ts = [dot(v - base, u) // dot(u, u) for v in at_h]
            # G = [a, b] gives G + (-h)F = [a, b - h] in the slice parameter
            for a in range(t0, t1 + 1):
                for b in range(a, t1 + h + 1):
                    if all(a <= t <= b - h for t in ts):
                        choices.append((base + u * a, base + u * b))
        if not choices:
            raise MutationError("mutation not admissible")
        options.append(choices)
    results: set[LatticePolygon] = set()

    def rec(i: int, acc: list[Vec]) -> None:
        if i == len(options):
            results.add(LatticePolygon.hull(fixed + acc))
            return
        for seg in options[i]:
            rec(i + 1, acc + list(seg))

    rec(0, [])
    return results


# ---------------------------------------------------------------------------
# dual polyhedra


Rat = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class DualPolyhedron:
    """``Q + C``: a bounded rational polygon plus a cone spanned by rays."""

    bounded_part: RationalPolygon
    cone_rays: tuple[Vec, ...]


def _halfplane_vertices(cons: Sequence[tuple[Sequence, Fraction]]) -> tuple[list[Rat], list[Vec]]:
    """Vertices and extreme rays of ``{x : <a, x> >= b for (a, b) in cons}``."""
    cons = [((Fraction(a[0]), Fraction(a[1])), Fraction(b)) for a, b in cons]
    if any(a == (0, 0) and b > 0 for a, b in cons):
        return [], []
    cons = [(a, b) for a, b in cons if a != (0, 0)]
    pts: set[Rat] = set()
    for (a1, b1), (a2, b2) in combinations(cons, 2):
        d = a1[0] * a2[1] - a1[1] * a2[0]
        if d == 0:
            continue
        x = (b1 * a2[1] - a1[1] * b2) / d
        y = (a1[0] * b2 - b1 * a2[0]) / d
        if all(a[0] * x + a[1] * y >= b for a, b in cons):
            pts.add((x, y))
    rays: set[Vec] = set()
    for a, _ in cons:
        for d in ((-a[1], a[0]), (a[1], -a[0])):
            if all(c[0] * d[0] + c[1] * d[1] >= 0 for c, _ in cons):
                den = 1
                for c in d:
                    den = den * c.denominator // _gcd_int(den, c.denominator)
                rays.add(primitive((int(d[0] * den), int(d[1] * den))))
    extreme = set()
    for r in rays:
        others = [s for s in rays if s != r]
        # r is extreme unless it lies strictly between two other rays
        inner = any(
            cross(s1, r) > 0 and cross(r, s2) > 0 and cross(s1, s2) > 0
            for s1 in others
            for s2 in others
        )
        if not inner:
            extreme.add(r)
    return convex_hull(pts), sorted(extreme)


def _gcd_int(a: int, b: int) -> int:
    from math import gcd

    return gcd(a, b)


def dual(p: LatticePolygon) -> DualPolyhedron:
    """Dual ``{v : <v, u> >= -1 for u in p}`` for a polygon containing the origin."""
    if not p.contains((0, 0)):
        raise MutationError("dual requires origin in P")
    cons = [(v, Fraction(-1)) for v in p.vertices]
    verts, rays = _halfplane_vertices(cons)
    return DualPolyhedron(RationalPolygon(tuple(verts)), tuple(rays))


def phi(v: Sequence, ctx: MutationContext) -> Rat:
    """Piecewise linear map on the dual side: shear by ``w`` where ``<v,u_E> < 0``."""
    s = v[0] * ctx.u_e[0] + v[1] * ctx.u_e[1]
    if s >= 0:
        return (Fraction(v[0]), Fraction(v[1]))
    return (Fraction(v[0]) - s * ctx.w[0], Fraction(v[1]) - s * ctx.w[1])


def mutate_via_dual(ctx: MutationContext) -> LatticePolygon:
    """Mutated polygon as the dual of ``phi`` applied to the dual polyhedron."""
    p = ctx.polygon
    if not p.contains((0, 0)):
        raise MutationError("dual requires origin in P")
    if not admits_mutation(ctx):
        raise MutationError("mutation not admissible")
    u = ctx.u_e
    base = [(v, Fraction(-1)) for v in p.vertices]
    points: list[Rat] = []
    rays: list[Vec] = []
    # split the dual along <v, u_E> = 0 and push each half through its linear piece
    for side in (1, -1):
        piece = base + [((side * u[0], side * u[1]), Fraction(0))]
        verts, rs = _halfplane_vertices(piece)
        points += [phi(x, ctx) if side == 1 else _shear(x, ctx) for x in verts]
        rays += [vec(phi(r, ctx)) if side == 1 else vec(_shear(r, ctx)) for r in rs]
    cons = [(x, Fraction(-1)) for x in points] + [(r, Fraction(0)) for r in rays]
    verts, rs = _halfplane_vertices(cons)
    if rs:
        raise MutationError("dual of the image is unbounded")
    result = RationalPolygon(tuple(verts))
    if not result.is_integral():
        raise MutationError("dual construction produced a non-lattice polygon")
    return result.to_lattice()


def _shear(v: Sequence, ctx: MutationContext) -> Rat:
    s = v[0] * ctx.u_e[0] + v[1] * ctx.u_e[1]
    return (Fraction(v[0]) - s * ctx.w[0], Fraction(v[1]) - s * ctx.w[1])


def image_edge_index(ctx: MutationContext, result: LatticePolygon) -> int:
    """Edge of the mutated polygon with inner normal ``-w``."""
    return edge_with_inner_normal(result, -ctx.w)


def inverse_context(ctx: MutationContext, result: LatticePolygon) -> MutationContext:
    """Context that undoes ``ctx``: inner normal ``-w`` and the same factor."""
    return context_for_normal(result, -ctx.w, ctx.u_e)
