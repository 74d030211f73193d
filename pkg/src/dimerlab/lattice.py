"""Exact two-dimensional lattice primitives and convex lattice polygons.

Everything here works over the integers or :class:`fractions.Fraction`; no
floating point is used for any combinatorial decision.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, NamedTuple, Sequence


class LatticeError(ValueError):
    """Raised for invalid lattice input (zero vectors, open slope sets, ...)."""


class LatticeVector(NamedTuple):
    x: int
    y: int

    def __add__(self, other):  # type: ignore[override]
        return LatticeVector(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return LatticeVector(self.x - other[0], self.y - other[1])

    def __neg__(self):
        return LatticeVector(-self.x, -self.y)

    def __mul__(self, k):  # type: ignore[override]
        return LatticeVector(self.x * k, self.y * k)

    __rmul__ = __mul__


Vec = LatticeVector
ZERO = Vec(0, 0)


def vec(p: Sequence[int]) -> Vec:
    return Vec(int(p[0]), int(p[1]))


def dot(a: Sequence, b: Sequence):
    return a[0] * b[0] + a[1] * b[1]


def cross(a: Sequence, b: Sequence):
    return a[0] * b[1] - a[1] * b[0]


def rot(a: Sequence[int]) -> Vec:
    """Clockwise quarter turn ``(a, b) -> (b, -a)``."""
    return Vec(a[1], -a[0])


def primitive(v: Sequence[int]) -> Vec:
    """Return ``v`` divided by the gcd of its coordinates."""
    x, y = int(v[0]), int(v[1])
    if x == 0 and y == 0:
        raise LatticeError("zero has no primitive direction")
    g = gcd(x, y)
    return Vec(x // g, y // g)


def lattice_length(v: Sequence[int]) -> int:
    return gcd(int(v[0]), int(v[1]))


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, s, t)`` with ``s*a + t*b == g == gcd(a, b) >= 0``."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a - (a // b) * b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def _half(v: Sequence) -> int:
    # 0 for angles in [0, pi), 1 for [pi, 2 pi)
    return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1


def angle_key(v: Sequence):
    """Sort key placing nonzero vectors in counterclockwise order from +x.

    The key is exact: ties are only produced by positively parallel vectors.
    """
    return _AngleKey(v)


class _AngleKey:
    __slots__ = ("v", "h")

    def __init__(self, v: Sequence):
        if v[0] == 0 and v[1] == 0:
            raise LatticeError("zero vector has no angle")
        self.v = v
        self.h = _half(v)

    def __lt__(self, other: "_AngleKey") -> bool:
        if self.h != other.h:
            return self.h < other.h
        return cross(self.v, other.v) > 0

    def __eq__(self, other) -> bool:
        return self.h == other.h and cross(self.v, other.v) == 0


def convex_hull(points: Iterable[Sequence]) -> list:
    """Vertices of the convex hull in counterclockwise order.

    Collinear boundary points are dropped. Works for ints and Fractions; a
    single point or a segment is returned as a list of 1 or 2 points.
    """
    pts = sorted(set((p[0], p[1]) for p in points))
    if len(pts) <= 2:
        return pts
    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(_d(lower[-2], lower[-1]), _d(lower[-1], p)) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(_d(upper[-2], upper[-1]), _d(upper[-1], p)) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 and hull[0] == hull[1]:
        return hull[:1]
    return hull


def _d(a, b):
    return (b[0] - a[0], b[1] - a[1])


@dataclass(frozen=True)
class LatticePolygon:
    """A convex lattice polygon given by its counterclockwise vertices.

    Points and segments are representable; :attr:`degenerate` flags them.
    """

    vertices: tuple[Vec, ...]

    def __post_init__(self):
        vs = tuple(vec(v) for v in self.vertices)
        if not vs:
            raise LatticeError("polygon needs at least one vertex")
        hull = tuple(vec(v) for v in convex_hull(vs))
        if len(hull) != len(set(vs)) or set(hull) != set(vs):
            raise LatticeError(f"vertices {list(vs)} are not in strictly convex position")
        if len(hull) >= 3:
            # keep the caller's starting vertex, but force counterclockwise order
            start = hull.index(vs[0])
            hull = hull[start:] + hull[:start]
        object.__setattr__(self, "vertices", hull)

    @classmethod
    def hull(cls, points: Iterable[Sequence[int]]) -> "LatticePolygon":
        return cls(tuple(vec(p) for p in convex_hull(points)))

    @property
    def degenerate(self) -> bool:
        return len(self.vertices) < 3

    def edges(self) -> list[tuple[Vec, Vec]]:
        vs = self.vertices
        if len(vs) < 3:
            return []
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    def normalized(self) -> "LatticePolygon":
        """Same polygon with the lexicographically smallest vertex first."""
        vs = self.vertices
        i = vs.index(min(vs))
        return LatticePolygon(vs[i:] + vs[:i])

    def __eq__(self, other) -> bool:
        if not isinstance(other, LatticePolygon):
            return NotImplemented
        return set(self.vertices) == set(other.vertices)

    def __hash__(self) -> int:
        return hash(frozenset(self.vertices))

    def translate(self, t: Sequence[int]) -> "LatticePolygon":
        return LatticePolygon(tuple(v + t for v in self.vertices))

    def at_origin(self) -> "LatticePolygon":
        """Translate so that the lexicographically smallest vertex is the origin."""
        low = min(self.vertices)
        return self.translate((-low.x, -low.y)).normalized()

    def equal_up_to_translation(self, other: "LatticePolygon") -> bool:
        return self.at_origin() == other.at_origin()

    def transform(self, m: Sequence[Sequence[int]]) -> "LatticePolygon":
        """Image under the integer matrix ``m`` (acting on column vectors)."""
        return LatticePolygon.hull(apply(m, v) for v in self.vertices)

    def twice_area(self) -> int:
        vs = self.vertices
        return sum(cross(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs)))

    def contains(self, p: Sequence, strict: bool = False) -> bool:
        vs = self.vertices
        if len(vs) == 1:
            return not strict and tuple(p) == tuple(vs[0])
        if len(vs) == 2:
            a, b = vs
            if strict or cross(_d(a, b), _d(a, p)) != 0:
                return False
            return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
        for a, b in self.edges():
            c = cross(_d(a, b), _d(a, p))
            if c < 0 or (strict and c == 0):
                return False
        return True

    def lattice_points(self) -> list[Vec]:
        xs = [v.x for v in self.vertices]
        ys = [v.y for v in self.vertices]
        return [
            Vec(x, y)
            for x in range(min(xs), max(xs) + 1)
            for y in range(min(ys), max(ys) + 1)
            if self.contains((x, y))
        ]

    def boundary_points(self) -> list[Vec]:
        """Lattice points on the boundary, counterclockwise from vertex 0."""
        out: list[Vec] = []
        vs = self.vertices
        if len(vs) == 1:
            return [vs[0]]
        pairs = self.edges() if len(vs) >= 3 else [(vs[0], vs[1]), (vs[1], vs[0])]
        for a, b in pairs:
            d = b - a
            step = primitive(d)
            for k in range(lattice_length(d)):
                out.append(a + step * k)
        return out

    def to_json(self) -> dict:
        return {"vertices": [[v.x, v.y] for v in self.vertices]}

    @classmethod
    def from_json(cls, data: dict) -> "LatticePolygon":
        return cls(tuple(vec(v) for v in data["vertices"]))

    def __repr__(self) -> str:
        return "LatticePolygon(" + ", ".join(f"({v.x},{v.y})" for v in self.vertices) + ")"


@dataclass(frozen=True)
class RationalPolygon:
    """Bounded convex polygon with rational vertices, counterclockwise."""

    vertices: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        vs = tuple((Fraction(v[0]), Fraction(v[1])) for v in self.vertices)
        object.__setattr__(self, "vertices", tuple(convex_hull(vs)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalPolygon):
            return NotImplemented
        return set(self.vertices) == set(other.vertices)

    def __hash__(self) -> int:
        return hash(frozenset(self.vertices))

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for v in self.vertices for c in v)

    def to_lattice(self) -> LatticePolygon:
        if not self.is_integral():
            raise LatticeError("polygon has non-integral vertices")
        return LatticePolygon(tuple(Vec(int(a), int(b)) for a, b in self.vertices))


class SlopeMultiset:
    """Multiset of primitive vectors, stored as ``{vector: multiplicity}``."""

    def __init__(self, entries: Iterable[Sequence[int]] | dict = ()):
        if isinstance(entries, dict):
            counts = Counter({vec(k): int(m) for k, m in entries.items() if m})
        else:
            counts = Counter(vec(e) for e in entries)
        for v in counts:
            if primitive(v) != v:
                raise LatticeError(f"slope {tuple(v)} is not primitive")
        self.counts: dict[Vec, int] = dict(counts)

    def total(self) -> Vec:
        s = ZERO
        for v, m in self.counts.items():
            s = s + v * m
        return s

    def is_closed(self) -> bool:
        return self.total() == ZERO

    def __len__(self) -> int:
        return sum(self.counts.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, SlopeMultiset):
            return NotImplemented
        return self.counts == other.counts

    def __hash__(self) -> int:
        return hash(frozenset(self.counts.items()))

    def items(self) -> list[tuple[Vec, int]]:
        return sorted(self.counts.items(), key=lambda kv: angle_key(kv[0]))

    def expanded(self) -> list[Vec]:
        return [v for v, m in self.items() for _ in range(m)]

    def to_json(self) -> dict:
        return {"slopes": [[v.x, v.y, m] for v, m in self.items()]}

    def __repr__(self) -> str:
        return "SlopeMultiset(" + ", ".join(f"({v.x},{v.y})x{m}" for v, m in self.items()) + ")"


def outer_normal(direction: Sequence[int]) -> Vec:
    """Primitive outer normal of a counterclockwise edge with this direction."""
    return primitive((direction[1], -direction[0]))


def edge_normals(p: LatticePolygon) -> SlopeMultiset:
    """Primitive outer normals of ``p``, one per primitive boundary segment."""
    if p.degenerate:
        raise LatticeError("degenerate polygon has no edge normals")
    counts: Counter = Counter()
    for a, b in p.edges():
        counts[outer_normal(b - a)] += lattice_length(b - a)
    return SlopeMultiset(dict(counts))


def polygon_from_slopes(slopes: SlopeMultiset, anchor: Sequence[int] | None = None) -> LatticePolygon:
    """Rebuild a polygon from its outer normals.

    The edge for normal ``(a, b)`` is ``(-b, a)`` times its multiplicity. The
    walk starts at the vertex that is minimal in angle order (the start of
    the edge whose normal has the smallest angle), placed at ``anchor``.
    """
    if not slopes.is_closed():
        raise LatticeError("slope multiset not closed")
    items = slopes.items()
    pts = [vec(anchor) if anchor is not None else ZERO]
    for n, m in items:
        pts.append(pts[-1] + Vec(-n.y, n.x) * m)
    return LatticePolygon.hull(pts[:-1])


def angle_minimal_vertex(p: LatticePolygon) -> Vec:
    """The vertex at which the edge with the smallest normal angle starts."""
    best = min(p.edges(), key=lambda e: angle_key(outer_normal(e[1] - e[0])))
    return best[0]


def heights(p: LatticePolygon, w: Sequence[int]) -> tuple[int, int]:
    """``(min, max)`` of the pairing with ``w`` over the polygon."""
    vals = [dot(w, v) for v in p.vertices]
    return min(vals), max(vals)


def width(p: LatticePolygon, w: Sequence[int]) -> int:
    lo, hi = heights(p, w)
    return hi - lo


def apply(m: Sequence[Sequence[int]], v: Sequence) -> Vec:
    return Vec(m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1])


def det(m: Sequence[Sequence[int]]) -> int:
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def matmul(a, b) -> tuple[tuple[int, int], tuple[int, int]]:
    return (
        (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
        (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
    )


def _to_x_axis(d: Vec) -> tuple[tuple[int, int], tuple[int, int]]:
    # SL(2,Z) matrix sending the primitive vector d to (1, 0)
    g, s, t = ext_gcd(d.x, d.y)
    assert g == 1
    return ((s, t), (-d.y, d.x))


def gl2z_canonical_form(p: LatticePolygon) -> LatticePolygon:
    """Canonical representative of the orbit under GL(2,Z) and translations.

    For every vertex and both orientations the polygon is moved so that the
    vertex sits at the origin, the outgoing edge points along +x and the
    polygon lies above it; the remaining shear is fixed by putting the
    previous vertex into the strip ``0 <= x < y``. The lexicographically least
    vertex list over all these normal forms is returned.
    """
    vs = p.vertices
    if len(vs) == 1:
        return LatticePolygon((ZERO,))
    if len(vs) == 2:
        return LatticePolygon((ZERO, Vec(lattice_length(vs[1] - vs[0]), 0)))
    best = None
    for poly in (list(vs), [Vec(v.x, -v.y) for v in reversed(vs)]):
        k = len(poly)
        for i in range(k):
            base = poly[i]
            m = _to_x_axis(primitive(poly[(i + 1) % k] - base))
            prev = apply(m, poly[i - 1] - base)
            shift = -(prev.x // prev.y)
            m = matmul(((1, shift), (0, 1)), m)
            cand = tuple(apply(m, poly[(i + j) % k] - base) for j in range(k))
            if best is None or cand < best:
                best = cand
    return LatticePolygon(best)


def gl2z_equivalent(a: LatticePolygon, b: LatticePolygon) -> bool:
    return tuple(gl2z_canonical_form(a).vertices) == tuple(gl2z_canonical_form(b).vertices)


def solve_2x2(a: Sequence[Sequence], b: Sequence) -> tuple[Fraction, Fraction] | None:
    """Solve ``a @ x = b`` exactly; ``None`` when singular."""
    d = a[0][0] * a[1][1] - a[0][1] * a[1][0]
    if d == 0:
        return None
    x = Fraction(b[0] * a[1][1] - a[0][1] * b[1], d)
    y = Fraction(a[0][0] * b[1] - b[0] * a[1][0], d)
    return x, y


def in_sublattice(v: Sequence[int], gens: Sequence[Sequence[int]]) -> bool:
    """Whether ``v`` lies in the subgroup of Z^2 generated by ``gens``."""
    basis = hermite_basis(gens)
    return reduce_mod(v, basis) == ZERO


def hermite_basis(gens: Sequence[Sequence[int]]) -> list[Vec]:
    """Echelon basis (at most two vectors) of the subgroup generated by ``gens``.

    The basis is ``[(a, b), (0, d)]`` style: the first vector has the gcd of
    all x-coordinates in its x slot, the second (if any) is vertical.
    """
    rows = [vec(g) for g in gens if tuple(g) != (0, 0)]
    if not rows:
        return []
    # column operations by integer row combinations: bring x-coordinates to gcd
    top = rows[0]
    rest: list[Vec] = []
    for r in rows[1:]:
        a, b = top, r
        while b.x != 0:
            q = a.x // b.x
            a, b = b, a - b * q
        top = a
        rest.append(b)
    vertical = 0
    for r in rest:
        vertical = gcd(vertical, r.y)
    if top.x == 0:
        vertical = gcd(vertical, top.y)
        return [Vec(0, vertical)] if vertical else []
    if top.x < 0:
        top = -top
    if vertical:
        top = Vec(top.x, top.y % vertical)
        return [top, Vec(0, vertical)]
    return [top]


def reduce_mod(v: Sequence[int], basis: Sequence[Vec]) -> Vec:
    """Canonical representative of ``v`` modulo the span of an echelon basis."""
    r = vec(v)
    if not basis:
        return r
    if len(basis) == 2:
        top, vert = basis
        q = r.x // top.x
        r = r - top * q
        return Vec(r.x, r.y % vert.y)
    (b,) = basis
    if b.x != 0:
        q = r.x // b.x
        return r - b * q
    q = r.y // b.y
    return r - b * q
