"""Zigzag paths, their intersections on the universal cover, and consistency.

Lifts are handled by exact coset arithmetic: two visits of torus edges by
paths ``z`` and ``w`` belong to the same pair of lifts iff the difference of
their lift translations lies in the subgroup spanned by ``[z]`` and ``[w]``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from math import gcd

from .dimer_core import Dart, DimerModel, natural_key
from .lattice import ZERO, Vec, angle_key, cross, dot, hermite_basis, primitive, reduce_mod, solve_2x2
from .matchings import PerfectMatching, enumerate_pms


class ZigzagType(str, Enum):
    TYPE_I = "I"
    TYPE_II = "II"


@dataclass(frozen=True)
class ZigzagPath:
    """Cyclic dart sequence; even positions (0-based) are zigs (black to white)."""

    darts: tuple[Dart, ...]
    lifts: tuple[Vec, ...]  # lift of the black end of each visited edge
    slope: Vec

    @property
    def length(self) -> int:
        return len(self.darts)

    def zigs(self) -> list[str]:
        return [d.edge for d in self.darts[0::2]]

    def zags(self) -> list[str]:
        return [d.edge for d in self.darts[1::2]]

    def edges(self) -> list[str]:
        return [d.edge for d in self.darts]

    def __len__(self) -> int:
        return len(self.darts)


def next_zigzag_dart(m: DimerModel, d: Dart) -> Dart:
    """Maximal right turn at a white node, maximal left turn at a black node."""
    v = m.head(d)
    if d.forward:
        return m.dart_from(v, m.succ(v, d.edge))
    return m.dart_from(v, m.pred(v, d.edge))


def _trace(m: DimerModel, start: Dart) -> ZigzagPath:
    darts = []
    lifts = []
    pos = ZERO  # lift of the tail of the current dart
    d = start
    while True:
        darts.append(d)
        step = m.displacement(d)
        lifts.append(pos if d.forward else pos + step)
        pos = pos + step
        d = next_zigzag_dart(m, d)
        if d == start:
            break
    return ZigzagPath(tuple(darts), tuple(lifts), pos)


def zigzag_paths(m: DimerModel) -> list[ZigzagPath]:
    """All zigzag paths, each started at the zig with the smallest edge id."""
    seen: set[Dart] = set()
    out = []
    for eid in sorted(m.edge_ids(), key=natural_key):
        d = Dart(eid, True)
        if d in seen:
            continue
        z = _trace(m, d)
        seen.update(z.darts)
        out.append(z)
    return out


def slope_multiset(paths: list[ZigzagPath]):
    from .lattice import SlopeMultiset

    return SlopeMultiset([z.slope for z in paths if z.slope != ZERO])


# ---------------------------------------------------------------------------
# intersections


@dataclass(frozen=True)
class Crossing:
    """A shared torus edge, placed on a representative pair of lifts.

    ``pos_z`` and ``pos_w`` are dart positions along the bi-infinite lifts
    of ``z`` and ``w``; ``lift_class`` identifies the pair of lifts.
    """

    edge: str
    index_z: int
    index_w: int
    sign: int  # +1 when the edge is a zig of z
    lift_class: Vec
    pos_z: int = 0
    pos_w: int = 0


@dataclass
class LiftIntersectionTable:
    z: ZigzagPath
    w: ZigzagPath
    same_path: bool
    basis: list[Vec]
    crossings: list[Crossing] = field(default_factory=list)
    # for parallel slopes, moving one period along the common direction
    # shifts positions by this amount on both lifts
    period_shift: tuple[int, int] | None = None

    @property
    def rank(self) -> int:
        return len(self.basis)

    def classes(self) -> dict[Vec, list[Crossing]]:
        out: dict[Vec, list[Crossing]] = defaultdict(list)
        for c in self.crossings:
            out[c.lift_class].append(c)
        return dict(out)

    def self_intersections(self) -> list[Crossing]:
        """Repeated visits landing on the same lift (only for ``z`` with itself)."""
        if not self.same_path:
            return []
        return [c for c in self.crossings if c.lift_class == ZERO]

    def lift_pairs(self) -> list[list[Crossing]]:
        """Crossings grouped by pair of distinct lifts, sorted along ``z``."""
        return [
            sorted(cs, key=lambda c: c.pos_z)
            for k, cs in self.classes().items()
            if not (self.same_path and k == ZERO)
        ]

    def max_shared(self) -> float:
        """Largest number of shared edges over pairs of distinct lifts."""
        best = 0.0
        for cs in self.lift_pairs():
            best = max(best, float("inf") if self.rank < 2 else len(cs))
        return best

    def _window(self, cs: list[Crossing]) -> list[tuple[int, int, Crossing]]:
        if self.rank == 2 or self.period_shift is None:
            return [(c.pos_z, c.pos_w, c) for c in cs]
        dz, dw = self.period_shift
        span = max(c.pos_z for c in cs) - min(c.pos_z for c in cs) + abs(dz)
        reach = span // max(abs(dz), 1) + 2
        return [(c.pos_z + k * dz, c.pos_w + k * dw, c) for c in cs for k in range(-reach, reach + 1)]

    def same_direction_double(self) -> bool:
        """Some pair of lifts meets twice in the same order along both lifts."""
        return bool(self.removable_pairs(first_only=True))

    def removable_pairs(self, first_only: bool = False) -> list[tuple[Crossing, Crossing]]:
        """Consecutive intersections (along ``z``) met in the same order by ``w``."""
        out = []
        for cs in self.lift_pairs():
            if self.rank < 2:
                if self.period_shift is None:
                    continue
                dz, dw = self.period_shift
                if (dz > 0) == (dw > 0):
                    # parallel lifts meeting once meet periodically in the same order
                    pts = sorted(self._window(cs), key=lambda t: t[0])
                    for a, b in zip(pts, pts[1:]):
                        out.append((a[2], b[2]))
                        if first_only:
                            return out
                    continue
            pts = sorted(self._window(cs), key=lambda t: t[0])
            for a, b in zip(pts, pts[1:]):
                if b[1] > a[1]:
                    out.append((a[2], b[2]))
                    if first_only:
                        return out
        return out

    def opposite_double(self) -> bool:
        return any(len(cs) >= 2 for cs in self.lift_pairs()) and not self.same_direction_double()

    def torus_count(self) -> int:
        """Number of shared torus edges (each counted once)."""
        if self.same_path:
            return len({c.edge for c in self.crossings})
        return len(self.crossings)


def lift_table(z: ZigzagPath, w: ZigzagPath) -> LiftIntersectionTable:
    same = z.darts == w.darts
    basis = hermite_basis([z.slope, w.slope])
    table = LiftIntersectionTable(z, w, same, basis)
    where: dict[str, list[int]] = defaultdict(list)
    for j, d in enumerate(w.darts):
        where[d.edge].append(j)
    lz, lw = z.length, w.length
    par = _parallel_data(z.slope, w.slope) if len(basis) == 1 else None
    if par is not None:
        table.period_shift = (par[2] * lz, par[3] * lw)
    for i, d in enumerate(z.darts):
        for j in where.get(d.edge, ()):
            if same and i == j:
                continue
            if w.darts[j].forward == d.forward:
                continue  # a path never meets itself in the same direction
            diff = w.lifts[j] - z.lifts[i]
            cls = reduce_mod(diff, basis)
            pz, pw = i, j
            if len(basis) == 2:
                # diff - cls = m [z] - n [w] for the lift pair (z~, w~ - cls)
                sol = solve_2x2(((z.slope.x, w.slope.x), (z.slope.y, w.slope.y)), diff - cls)
                pz, pw = i + int(sol[0]) * lz, j - int(sol[1]) * lw
            elif par is not None:
                g, a, b = par[0], par[4], par[5]
                t = _coefficient(diff - cls, g)
                m0, n0 = _solve_linear(a, -b, t)
                pz, pw = i + m0 * lz, j + n0 * lw
            table.crossings.append(Crossing(d.edge, i, j, 1 if d.forward else -1, cls, pz, pw))
    return table


def _parallel_data(sz: Vec, sw: Vec):
    """Generator ``g`` of the common line and the period shift data.

    Returns ``(g, _, step_m, step_n, a, b)`` with ``[z] = a g``, ``[w] = b g``
    and ``(step_m, step_n)`` the primitive solution of ``m a - n b = 0``.
    """
    if sz == ZERO or sw == ZERO:
        return None
    g = primitive(sz)
    a = _coefficient(sz, g)
    b = _coefficient(sw, g)
    k = gcd(a, b)
    sm, sn = b // k, a // k
    if sm < 0:
        sm, sn = -sm, -sn
    return g, None, sm, sn, a, b


def _coefficient(v: Vec, g: Vec) -> int:
    return v.x // g.x if g.x else v.y // g.y


def _solve_linear(a: int, b: int, t: int) -> tuple[int, int]:
    """Integer ``(m, n)`` with ``a m + b n = t``."""
    from .lattice import ext_gcd

    d, s, u = ext_gcd(a, b)
    k = t // d
    return s * k, u * k


def crossing_count(z: ZigzagPath, w: ZigzagPath) -> int:
    return lift_table(z, w).torus_count()


# ---------------------------------------------------------------------------
# predicates


def _tables(paths: list[ZigzagPath]):
    for a in range(len(paths)):
        for b in range(a, len(paths)):
            yield a, b, lift_table(paths[a], paths[b])


@dataclass
class ConsistencyReport:
    trivial: list[int] = field(default_factory=list)
    self_intersecting: list[int] = field(default_factory=list)
    bad_pairs: list[tuple[int, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.trivial or self.self_intersecting or self.bad_pairs)


def consistency_report(m: DimerModel, paths: list[ZigzagPath] | None = None) -> ConsistencyReport:
    paths = zigzag_paths(m) if paths is None else paths
    rep = ConsistencyReport()
    for k, z in enumerate(paths):
        if z.slope == ZERO:
            rep.trivial.append(k)
    for a, b, t in _tables(paths):
        if a == b and t.self_intersections():
            rep.self_intersecting.append(a)
        if t.same_direction_double():
            rep.bad_pairs.append((a, b))
    return rep


def is_consistent(m: DimerModel) -> bool:
    return consistency_report(m).ok


def corner_paths(m: DimerModel, paths: list[ZigzagPath] | None = None) -> dict[str, list[int]]:
    """For each node, the zigzag path through each consecutive edge pair, in rotation order.

    Entry ``k`` is the path entering along ``rotation[k]`` (for a white node)
    and leaving along its successor, or the mirrored rule at a black node.
    """
    paths = zigzag_paths(m) if paths is None else paths
    owner: dict[Dart, int] = {}
    for k, z in enumerate(paths):
        for d in z.darts:
            owner[d] = k
    out = {}
    for nid in m.node_ids():
        lst = m.rotation[nid]
        # the dart arriving at nid along lst[i] continues along lst[i+1] (white)
        # or lst[i-1] (black); record the path owning the arriving dart
        out[nid] = [owner[m.dart_from(nid, e).reverse] for e in lst]
    return out


def is_properly_ordered(m: DimerModel) -> bool:
    paths = zigzag_paths(m)
    if any(z.slope == ZERO for z in paths):
        return False
    for k, z in enumerate(paths):
        if lift_table(z, z).self_intersections():
            return False
    incident = corner_paths(m, paths)
    # (3) same-slope paths share no node
    for nid, ks in incident.items():
        slopes = [paths[k].slope for k in set(ks)]
        if len(slopes) != len(set(slopes)):
            return False
    # (4) around every node the slopes turn once counterclockwise, like the rotation
    for nid, ks in incident.items():
        if not _winds_once([paths[k].slope for k in ks]):
            return False
    return True


def _winds_once(seq: list[Vec]) -> bool:
    """Whether the cyclic sequence of directions turns counterclockwise exactly once."""
    if len(seq) < 2:
        return False
    keys = [angle_key(s) for s in seq]
    descents = 0
    for i in range(len(seq)):
        a, b = keys[i], keys[(i + 1) % len(seq)]
        if not (a < b):
            if a == b:
                return False
            descents += 1
    return descents == 1


def is_isoradial(m: DimerModel) -> bool:
    paths = zigzag_paths(m)
    for z in paths:
        nodes = [m.tail(d) for d in z.darts]
        if len(nodes) != len(set(nodes)) or z.slope == ZERO:
            return False
    for _, _, t in _tables(paths):
        if t.max_shared() > 1:
            return False
    return True


def classify_type(m: DimerModel, z: ZigzagPath, paths: list[ZigzagPath] | None = None) -> ZigzagType:
    paths = zigzag_paths(m) if paths is None else paths
    for w in paths:
        t = lift_table(z, w)
        if t.max_shared() > 1 or t.self_intersections():
            return ZigzagType.TYPE_II
    return ZigzagType.TYPE_I


def find_path(paths: list[ZigzagPath], edge: str, as_zig: bool = True) -> int:
    """Index of the path having ``edge`` as a zig (or as a zag)."""
    for k, z in enumerate(paths):
        if edge in (z.zigs() if as_zig else z.zags()):
            return k
    raise KeyError(edge)


# ---------------------------------------------------------------------------
# zigzag paths and perfect matchings


def intersection_size(z: ZigzagPath, p: PerfectMatching) -> int:
    return sum(1 for d in z.darts if d.edge in p.edges)


def boundary_matchings_for(
    m: DimerModel, z: ZigzagPath, pms: list[PerfectMatching] | None = None
) -> tuple[PerfectMatching, PerfectMatching]:
    """Matchings containing all zigs, resp. all zags, of ``z``, related by a flip along ``z``.

    ``P_z`` is chosen among matchings with ``P ∩ z = Zig(z)`` so that the flip
    ``(P \\ Zig) ∪ Zag`` is again a matching; ties resolve to the first found.
    """
    pms = enumerate_pms(m) if pms is None else pms
    zigs, zags = set(z.zigs()), set(z.zags())
    pm_set = {p.edges for p in pms}
    for p in pms:
        on = {d.edge for d in z.darts if d.edge in p.edges}
        if on != zigs:
            continue
        q = (p.edges - zigs) | zags
        if q in pm_set:
            return p, PerfectMatching(frozenset(q))
    raise ValueError("slope of z is not realized by a polygon edge")


def flip_direction(m: DimerModel, z: ZigzagPath) -> Vec:
    """``h(P'_z, P_z)``, which only depends on the zigzag path itself."""
    total = ZERO
    for d in z.darts:
        off = m.edge(d.edge).offset
        total = total + (off if not d.forward else -off)
    from .lattice import rot

    return rot(total)


def pairing(a, b) -> int:
    return dot(a, b)


def same_slope_family(paths: list[ZigzagPath], slope) -> list[int]:
    return [k for k, z in enumerate(paths) if z.slope == tuple(slope)]


def crossing_side(z: ZigzagPath, w: ZigzagPath) -> int:
    """+1 if every shared edge is a zag of ``z`` (``w`` crosses at zags), -1 for zigs, 0 if none."""
    t = lift_table(z, w)
    signs = {c.sign for c in t.crossings}
    if not signs:
        return 0
    if signs == {-1}:
        return 1
    if signs == {1}:
        return -1
    raise ValueError("path meets z on both sides")


def is_primitive_slope(z: ZigzagPath) -> bool:
    return z.slope != ZERO and primitive(z.slope) == z.slope


def orientation(a: Vec, b: Vec) -> int:
    c = cross(a, b)
    return (c > 0) - (c < 0)
