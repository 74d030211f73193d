"""Deformations of consistent dimer models at zig and at zag.

A deformation acts on a family ``z_1 .. z_r`` of type I zigzag paths sharing
one slope. At zig, each zig of ``z_i`` is subdivided by ``p_i`` new white and
``p_i`` new black nodes, the zags of ``z_i`` are removed, the new nodes are
chained across each removed zag, and bypass edges are added next to every
zag that is not a parameter edge. The zag version swaps the roles of zigs
and zags. The result is made consistent by removing self-intersections and
pairs of consecutive same-direction intersections, then reduced.

Rotation orders for the inserted edges follow a planar layout of the strip
swept by each removed edge: at an inserted node the new edges sit in the
face that the removed edge used to split, ordered as in a convex drawing of
that face.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

from .dimer_core import (
    Color,
    DimerError,
    DimerModel,
    Edge,
    Node,
    components,
    cycle_classes,
    faces,
    natural_key,
    reduce as reduce_model,
    remove_edges,
    remove_nodes,
)
from .lattice import ZERO, Vec, dot
from .matchings import pm_polygon_fast
from .zigzag import (
    ZigzagPath,
    ZigzagType,
    classify_type,
    consistency_report,
    flip_direction,
    lift_table,
    zigzag_paths,
)


class DeformationError(ValueError):
    pass


class Side(str, Enum):
    ZIG = "zig"
    ZAG = "zag"


@dataclass(frozen=True)
class SubPath:
    """A piece of a crossing path between two consecutive visits of one family member.

    ``hits[i]`` is the edge where the piece meets the family member ``z_{i+1}``.
    """

    kind: str  # "x" (meets z at zags) or "y" (meets z at zigs)
    path: int  # 1-based position among the x- (or y-) paths
    part: int  # 1-based
    hits: tuple[str, ...]

    @property
    def label(self) -> str:
        return f"{self.kind}{self.path}.{self.part}"


@dataclass(frozen=True)
class DeformationData:
    model: DimerModel
    paths: tuple[ZigzagPath, ...]
    z: int
    slope: Vec
    n: int
    r: int
    h: int
    family: tuple[int, ...]  # path indices of z_1 .. z_r
    side: Side
    x_paths: tuple[int, ...]
    y_paths: tuple[int, ...]
    x_counts: tuple[int, ...]
    y_counts: tuple[int, ...]
    x_subpaths: tuple[SubPath, ...]
    y_subpaths: tuple[SubPath, ...]
    assignment: Mapping[str, int]
    X: tuple[frozenset[str], ...]
    Y: tuple[frozenset[str], ...]

    @property
    def p(self) -> tuple[int, ...]:
        return tuple(len(x) - 1 for x in self.X)

    @property
    def q(self) -> tuple[int, ...]:
        return tuple(len(y) - 1 for y in self.Y)

    @property
    def params(self) -> tuple[frozenset[str], ...]:
        return self.X if self.side is Side.ZIG else self.Y

    @property
    def weights(self) -> tuple[int, ...]:
        return self.p if self.side is Side.ZIG else self.q

    def member(self, i: int) -> ZigzagPath:
        """The family member ``z_i`` (1-based)."""
        return self.paths[self.family[i - 1]]

    def to_json(self) -> dict:
        return {
            "side": self.side.value,
            "slope": list(self.slope),
            "n": self.n,
            "r": self.r,
            "h": self.h,
            "family": [k + 1 for k in self.family],
            "x_paths": [{"path": k + 1, "crossings": c} for k, c in zip(self.x_paths, self.x_counts)],
            "y_paths": [{"path": k + 1, "crossings": c} for k, c in zip(self.y_paths, self.y_counts)],
            "assignment": {k: self.assignment[k] for k in sorted(self.assignment, key=natural_key)},
            "params": [sorted(s, key=natural_key) for s in self.params],
            "weights": list(self.weights),
        }


# ---------------------------------------------------------------------------
# deformation data


def _family_sequence(path: ZigzagPath, where: dict[str, int]) -> list[tuple[int, int]]:
    """(position, family member) for every visit of ``path`` to a family edge."""
    return [(k, where[d.edge]) for k, d in enumerate(path.darts) if d.edge in where]


def _order_family(first: int, seq: list[int], forward: bool) -> list[int]:
    """Cyclic family order read off the visits of one crossing path.

    Along an x-path the members appear as ``z_r, z_{r-1}, ..``; along a
    y-path as ``z_1, z_2, ..``.
    """
    order: list[int] = []
    for f in seq:
        if f in order:
            break
        order.append(f)
    if not forward:
        order.reverse()
    k = order.index(first)
    return order[k:] + order[:k]


def _split(path: ZigzagPath, where: dict[str, int], r: int, kind: str, idx: int, anchor: str | None) -> list[SubPath]:
    seq = _family_sequence(path, where)
    start_member = r - 1 if kind == "x" else 0
    step = -1 if kind == "x" else 1
    starts = [t for t, (_, f) in enumerate(seq) if f == start_member]
    if anchor is not None:
        starts_at = [t for t in starts if path.darts[seq[t][0]].edge == anchor]
        if not starts_at:
            raise DeformationError(f"anchor {anchor} is not a crossing of {kind}{idx} with the starting member")
        s0 = starts_at[0]
    else:
        s0 = min(starts, key=lambda t: natural_key(path.darts[seq[t][0]].edge))
    seq = seq[s0:] + seq[:s0]
    out = []
    for part, t in enumerate(range(0, len(seq), r), 1):
        chunk = seq[t : t + r]
        expect = [(start_member + step * u) % r for u in range(r)]
        if [f for _, f in chunk] != expect:
            raise DeformationError(f"{kind}{idx} does not visit the family in cyclic order")
        hits = [""] * r
        for pos, f in chunk:
            hits[f] = path.darts[pos].edge
        out.append(SubPath(kind, idx, part, tuple(hits)))
    return out


def _round_robin(subs: Sequence[SubPath], r: int) -> dict[str, int]:
    """Cyclic assignment in listing order, then rebalanced so no member is left empty."""
    table = {s.label: (k % r) + 1 for k, s in enumerate(subs)}
    if not subs:
        return table
    for i in range(1, r + 1):
        if i in table.values():
            continue
        load = Counter(table.values())
        big = max(load, key=lambda t: (load[t], -t))
        if load[big] < 2:
            break
        donor = [lab for lab in table if table[lab] == big][-1]
        table[donor] = i
    return table


def _params(subs: Sequence[SubPath], assignment: Mapping[str, int], r: int, name: str) -> tuple[frozenset[str], ...]:
    sets: list[set[str]] = [set() for _ in range(r)]
    for s in subs:
        if s.label not in assignment:
            raise DeformationError(f"sub-path {s.label} has no assigned family member")
        i = assignment[s.label]
        if not 1 <= i <= r:
            raise DeformationError(f"sub-path {s.label} assigned to z_{i}, outside 1..{r}")
        sets[i - 1].add(s.hits[i - 1])
    for i, s in enumerate(sets, 1):
        if not s:
            raise DeformationError(f"assignment leaves {name}_{i} empty")
    return tuple(frozenset(s) for s in sets)


def build_deformation_data(
    m: DimerModel,
    z: int,
    r: int | None = None,
    family: Sequence[int] | None = None,
    side: Side | str = Side.ZIG,
    assignment: Mapping[str, int] | None = None,
    anchors: Mapping[str, str] | None = None,
    paths: Sequence[ZigzagPath] | None = None,
    check_consistent: bool = True,
) -> DeformationData:
    """Collect the data of a deformation of ``m`` at the zigzag path ``paths[z]``.

    ``family`` lists path indices of the chosen same-slope type I paths; the
    first entry becomes ``z_1`` and the others are ordered by the crossing
    paths. ``assignment`` maps sub-path labels such as ``"x2.1"`` to a
    1-based family member (default: round-robin in listing order).
    ``anchors`` maps a crossing-path label such as ``"x2"`` to the edge where
    its first piece starts.
    """
    side = Side(side)
    paths = tuple(zigzag_paths(m) if paths is None else paths)
    if check_consistent and not consistency_report(m, list(paths)).ok:
        raise DeformationError("deformation needs a consistent dimer model")
    zp = paths[z]
    if classify_type(m, zp, list(paths)) is not ZigzagType.TYPE_I:
        raise DeformationError("the chosen zigzag path is not type I")
    v = zp.slope
    same = [k for k, w in enumerate(paths) if w.slope == v and classify_type(m, w, list(paths)) is ZigzagType.TYPE_I]
    if family is None:
        r = 1 if r is None else r
        if r > len(same):
            raise DeformationError(f"r = {r} exceeds the {len(same)} type I paths of slope {tuple(v)}")
        family = [z] + [k for k in same if k != z][: r - 1]
    family = list(family)
    if r is None:
        r = len(family)
    if r > len(same):
        raise DeformationError(f"r = {r} exceeds the {len(same)} type I paths of slope {tuple(v)}")
    if len(family) != r or len(set(family)) != r:
        raise DeformationError("family must list r distinct paths")
    for k in family:
        if k not in same:
            raise DeformationError(f"path {k + 1} is not a type I path of slope {tuple(v)}")
        if paths[k].length != zp.length:
            raise DeformationError("family members must have equal length")
    n = zp.length // 2
    h = n - r
    if h < 1:
        raise DeformationError(f"need r < l(z)/2, got r = {r} and l(z)/2 = {n}")

    fam_set = set(family)
    xs, ys, xc, yc = [], [], [], []
    for k, w in enumerate(paths):
        if k in fam_set or w.slope == v:
            continue
        t = lift_table(zp, w)
        if not t.crossings:
            continue
        signs = {c.sign for c in t.crossings}
        if len(signs) > 1:
            raise DeformationError(f"path {k + 1} meets z at zigs and at zags")
        (xs if signs == {-1} else ys).append(k)
        (xc if signs == {-1} else yc).append(len(t.crossings))
    for k, c in zip(xs + ys, xc + yc):
        for f in family:
            if len(lift_table(paths[f], paths[k]).crossings) != c:
                raise DeformationError(f"path {k + 1} meets the family members unequally")
    if sum(xc) != n or sum(yc) != n:
        raise DeformationError("crossing counts do not add up to l(z)/2")

    # label family members by the crossing order
    where = {}
    for f in family:
        for e in paths[f].edges():
            where[e] = f
    probe, forward = (xs[0], False) if xs else (ys[0], True)
    seq = [f for _, f in _family_sequence(paths[probe], where)]
    ordered = _order_family(family[0], seq, forward)
    if sorted(ordered) != sorted(family):
        raise DeformationError("crossing path does not visit every family member")
    member = {f: i for i, f in enumerate(ordered)}
    where = {e: member[f] for e, f in where.items()}

    anchors = dict(anchors or {})
    x_subs: list[SubPath] = []
    for j, k in enumerate(xs, 1):
        x_subs += _split(paths[k], where, r, "x", j, anchors.get(f"x{j}"))
    y_subs: list[SubPath] = []
    for j, k in enumerate(ys, 1):
        y_subs += _split(paths[k], where, r, "y", j, anchors.get(f"y{j}"))

    table = _round_robin(x_subs, r) | _round_robin(y_subs, r)
    if assignment is not None:
        unknown = set(assignment) - set(table)
        if unknown:
            raise DeformationError(f"unknown sub-path labels {sorted(unknown)}")
        table.update(assignment)
    X = _params(x_subs, table, r, "X")
    Y = _params(y_subs, table, r, "Y")
    return DeformationData(
        m, paths, z, v, n, r, h, tuple(ordered), side,
        tuple(xs), tuple(ys), tuple(xc), tuple(yc), tuple(x_subs), tuple(y_subs), table, X, Y,
    )


def assignment_for(data_or_subs, params: Sequence[Sequence[str]], kind: str = "x") -> dict[str, int]:
    """Assignment reproducing given parameter sets ``params[i-1] = X_i`` (or ``Y_i``)."""
    subs = data_or_subs.x_subpaths if kind == "x" else data_or_subs.y_subpaths
    out = {}
    for s in subs:
        owners = [i for i, edges in enumerate(params, 1) if s.hits[i - 1] in set(edges)]
        if len(owners) != 1:
            raise DeformationError(f"sub-path {s.label} matches {len(owners)} parameter sets")
        out[s.label] = owners[0]
    return out


# ---------------------------------------------------------------------------
# surgery


def _interp(m: DimerModel, e: Edge, t) -> tuple | None:
    pb, pw = m.node(e.black).position, m.node(e.white).position
    if pb is None or pw is None:
        return None
    x = pb[0] + (pw[0] + e.offset.x - pb[0]) * t
    y = pb[1] + (pw[1] + e.offset.y - pb[1]) * t
    return (x % 1, y % 1)


class _Surgery:
    """Accumulates new nodes, edges and rotation substitutions."""

    def __init__(self, m: DimerModel):
        self.m = m
        self.nodes: dict[str, Node] = dict(m.nodes)
        self.edges: dict[str, Edge] = {}
        self.drop: set[str] = set()
        self.subst: dict[tuple[str, str], str | None] = {}
        self.new_rot: dict[str, list[str]] = {}

    def node(self, nid: str, color: Color, pos) -> None:
        if nid in self.nodes:
            raise DeformationError(f"inserted node id {nid} already exists")
        self.nodes[nid] = Node(nid, color, pos)

    def edge(self, eid: str, black: str, white: str, off: Vec) -> None:
        if eid in self.edges or eid in self.m.edges:
            raise DeformationError(f"inserted edge id {eid} already exists")
        self.edges[eid] = Edge(eid, black, white, off)

    def chain(self, e: Edge, k: int, from_black: bool) -> tuple[list[str], list[str], list[str]]:
        """Subdivide ``e`` by ``k`` nodes of each color.

        Returns (blacks, whites, chain edges) listed from the black end when
        ``from_black``, otherwise from the white end. The whole offset sits
        on the chain edge at the far end.
        """
        self.drop.add(e.id)
        bl = [f"{e.id}b{j}" for j in range(1, k + 1)]
        wh = [f"{e.id}w{j}" for j in range(1, k + 1)]
        seq = [e.id + f".{t}" for t in range(2 * k + 1)]
        # node order along the chain, starting at the near end
        if from_black:
            order = [e.black] + [x for j in range(k) for x in (wh[j], bl[j])] + [e.white]
        else:
            order = [e.white] + [x for j in range(k) for x in (bl[j], wh[j])] + [e.black]
        for t, nid in enumerate(order[1:-1], 1):
            color = Color.WHITE if nid in wh else Color.BLACK
            frac = t / (2 * k + 1)
            self.node(nid, color, _interp(self.m, e, frac if from_black else 1 - frac))
        for t in range(2 * k + 1):
            a, b = order[t], order[t + 1]
            black, white = (a, b) if self.nodes[a].color is Color.BLACK else (b, a)
            far = t == 2 * k
            self.edge(seq[t], black, white, e.offset if far else ZERO)
        near, far_end = order[0], order[-1]
        self.subst[(near, e.id)] = seq[0]
        self.subst[(far_end, e.id)] = seq[-1]
        return bl, wh, seq

    def build(self) -> DimerModel:
        edges = [e for e in self.m.edges.values() if e.id not in self.drop] + list(self.edges.values())
        rotation = {}
        for nid, lst in self.m.rotation.items():
            out = []
            for eid in lst:
                key = (nid, eid)
                if key in self.subst:
                    if self.subst[key] is not None:
                        out.append(self.subst[key])
                elif eid not in self.drop:
                    out.append(eid)
            rotation[nid] = out
        rotation.update(self.new_rot)
        try:
            return DimerModel(self.nodes.values(), edges, rotation)
        except DimerError as exc:  # pragma: no cover - signals a surgery bug
            raise DeformationError(f"surgery produced an inconsistent rotation system: {exc}") from exc


def _zig_surgery(data: DeformationData, bypasses: bool) -> DimerModel:
    m = data.model
    s = _Surgery(m)
    for i in range(1, data.r + 1):
        z = data.member(i)
        p = data.p[i - 1]
        X = data.X[i - 1]
        n = data.n
        zigs = [m.edge(d.edge) for d in z.darts[0::2]]
        zags = [m.edge(d.edge) for d in z.darts[1::2]]
        chains = [s.chain(e, p, True) if p else ([], [], [e.id]) for e in zigs]
        bypass = [bypasses and zags[k].id not in X for k in range(n)]
        for k in range(n):
            zig, zag, nxt = zigs[k], zags[k], zigs[(k + 1) % n]
            bl, wh, seq = chains[k]
            nbl, _, nseq = chains[(k + 1) % n]
            link = zag.offset - zig.offset
            s.drop.add(zag.id)
            for j in range(1, p + 1):
                s.edge(f"{zig.id}c{j}", nbl[j - 1], wh[j - 1], link)
            if bypass[k]:
                if p == 0:
                    s.drop.discard(zag.id)
                else:
                    for j in range(p + 1):
                        white = wh[j] if j < p else zig.white
                        black = nbl[j - 1] if j > 0 else nxt.black
                        s.edge(f"{zig.id}y{j}", black, white, link if j < p else zag.offset)
                    s.subst[(zig.white, zag.id)] = f"{zig.id}y{p}"
                    s.subst[(nxt.black, zag.id)] = f"{zig.id}y0"
            else:
                s.subst.setdefault((zig.white, zag.id), None)
                s.subst.setdefault((nxt.black, zag.id), None)
            # rotations at the inserted nodes of this zig
            prev = zigs[(k - 1) % n]
            for j in range(1, p + 1):
                w_rot = [seq[2 * j - 2]]
                if bypass[k]:
                    w_rot.append(f"{zig.id}y{j - 1}")
                w_rot += [f"{zig.id}c{j}", seq[2 * j - 1]]
                s.new_rot[wh[j - 1]] = w_rot
                b_rot = [seq[2 * j]]
                if bypass[(k - 1) % n]:
                    b_rot.append(f"{prev.id}y{j}")
                b_rot += [f"{prev.id}c{j}", seq[2 * j - 1]]
                s.new_rot[bl[j - 1]] = b_rot
    return s.build()


def _zag_surgery(data: DeformationData, bypasses: bool) -> DimerModel:
    m = data.model
    s = _Surgery(m)
    for i in range(1, data.r + 1):
        z = data.member(i)
        q = data.q[i - 1]
        Y = data.Y[i - 1]
        n = data.n
        zigs = [m.edge(d.edge) for d in z.darts[0::2]]
        zags = [m.edge(d.edge) for d in z.darts[1::2]]
        chains = [s.chain(e, q, False) if q else ([], [], [e.id]) for e in zags]
        # the zig following zag k is zigs[k + 1]
        bypass = [bypasses and zigs[(k + 1) % n].id not in Y for k in range(n)]
        for k in range(n):
            zag, zig = zags[k], zigs[(k + 1) % n]
            nxt = zags[(k + 1) % n]
            bl, wh, seq = chains[k]
            _, nwh, _ = chains[(k + 1) % n]
            link = zig.offset - zag.offset
            s.drop.add(zig.id)
            for j in range(1, q + 1):
                s.edge(f"{zag.id}c{j}", bl[j - 1], nwh[j - 1], link)
            if bypass[k]:
                if q == 0:
                    s.drop.discard(zig.id)
                else:
                    for j in range(q + 1):
                        black = bl[j] if j < q else zag.black
                        white = nwh[j - 1] if j > 0 else nxt.white
                        s.edge(f"{zag.id}y{j}", black, white, link if j < q else zig.offset)
                    s.subst[(zag.black, zig.id)] = f"{zag.id}y{q}"
                    s.subst[(nxt.white, zig.id)] = f"{zag.id}y0"
            else:
                s.subst.setdefault((zag.black, zig.id), None)
                s.subst.setdefault((nxt.white, zig.id), None)
            prev = zags[(k - 1) % n]
            for j in range(1, q + 1):
                b_rot = [seq[2 * j - 1], f"{zag.id}c{j}"]
                if bypass[k]:
                    b_rot.append(f"{zag.id}y{j - 1}")
                b_rot.append(seq[2 * j - 2])
                s.new_rot[bl[j - 1]] = b_rot
                w_rot = [seq[2 * j - 1], f"{prev.id}c{j}"]
                if bypass[(k - 1) % n]:
                    w_rot.append(f"{prev.id}y{j}")
                w_rot.append(seq[2 * j])
                s.new_rot[wh[j - 1]] = w_rot
    return s.build()


# ---------------------------------------------------------------------------
# consistency restoration

Schedule = Sequence[tuple[tuple[str, str], tuple[str, str]]]


@dataclass
class RestorationStep:
    kind: str  # "self-intersection" or "pair"
    edges: tuple[str, ...]
    dropped_nodes: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {"kind": self.kind, "edges": list(self.edges), "dropped_nodes": list(self.dropped_nodes)}


def _drop_trivial_components(m: DimerModel) -> tuple[DimerModel, list[str]]:
    classes = cycle_classes(m)
    dead: list[str] = []
    for comp in components(m):
        eids = {e.id for e in m.edges.values() if e.black in comp}
        if all(classes[e] == ZERO for e in eids):
            dead += sorted(comp, key=natural_key)
    if dead:
        m = remove_nodes(m, dead)
    return m, dead


def _pair_key(pair: tuple[str, ...]) -> tuple:
    return tuple(sorted(natural_key(e) for e in pair))


def _candidates(m: DimerModel, paths: list[ZigzagPath], bad: list[tuple[int, int]]) -> list[tuple[str, ...]]:
    """Removable pairs as edge tuples; a pair lying over one torus edge gives a 1-tuple.

    The latter happens when two parallel lifts of one path meet periodically
    at the same edge, so removing that edge removes both intersections.
    """
    out = set()
    for a, b in bad:
        for c1, c2 in lift_table(paths[a], paths[b]).removable_pairs():
            out.add(tuple(sorted({c1.edge, c2.edge}, key=natural_key)))
    # proper pairs first, in lexicographic order
    return sorted(out, key=lambda p: (len(p) == 1, _pair_key(p)))


def _ends(m: DimerModel, eid: str) -> frozenset[str]:
    e = m.edge(eid)
    return frozenset((e.black, e.white))


def _resolve(m: DimerModel, step, cands: list[tuple[str, ...]]) -> tuple[str, ...]:
    want = {frozenset(step[0]), frozenset(step[1])}
    for pair in cands:
        if {_ends(m, e) for e in pair} == want:
            return pair
    raise DeformationError(
        f"scheduled pair {step[0][0]}-{step[0][1]} / {step[1][0]}-{step[1][1]} is not a removable double intersection"
    )


def _nontrivial_slopes(paths: Sequence[ZigzagPath]) -> Counter:
    return Counter(z.slope for z in paths if z.slope != ZERO)


def restore_consistency(
    m: DimerModel,
    schedule: Schedule | str | None = "auto",
    log: list[RestorationStep] | None = None,
    reduce: bool = True,
) -> DimerModel:
    """Remove self-intersections and same-direction double intersections until consistent.

    ``schedule`` is ``"auto"`` or a list of node-pair steps naming the two
    edges to remove at each pair-removal step; once the list is used up the
    loop continues automatically. Automatic choices are searched depth
    first in lexicographic order, backtracking out of any branch that ends
    without a removable pair or changes the slopes of the nontrivial paths.
    """
    steps = [] if schedule in (None, "auto") else list(schedule)
    log = [] if log is None else log
    cap = 4 * max(len(m.edges), 1)
    target = _nontrivial_slopes(zigzag_paths(m))
    budget = [64 * cap]  # total visited states over the whole search

    def search(m: DimerModel, steps: list, depth: int) -> tuple[DimerModel, list[RestorationStep]] | None:
        budget[0] -= 1
        if depth > cap or budget[0] < 0:
            raise DeformationError(f"restoration did not finish within {cap} steps")
        paths = zigzag_paths(m)
        rep = consistency_report(m, paths)
        if rep.ok:
            if steps:
                raise DeformationError(f"{len(steps)} scheduled steps left after the model became consistent")
            return (m, []) if _nontrivial_slopes(paths) == target else None
        if rep.self_intersecting:
            dead = set()
            for k in rep.self_intersecting:
                dead |= {c.edge for c in lift_table(paths[k], paths[k]).self_intersections()}
            m2, nodes = _drop_trivial_components(remove_edges(m, dead))
            step = RestorationStep("self-intersection", tuple(sorted(dead, key=natural_key)), tuple(nodes))
            return _prepend(step, search(m2, steps, depth + 1))
        if rep.trivial and not rep.bad_pairs:
            m2, nodes = _drop_trivial_components(m)
            if not nodes:
                raise DeformationError("homologically trivial zigzag path that no removal can resolve")
            return _prepend(RestorationStep("trivial-component", (), tuple(nodes)), search(m2, steps, depth + 1))
        cands = _candidates(m, paths, rep.bad_pairs)
        if steps:
            cands = [_resolve(m, steps[0], cands)]
            steps = steps[1:]
        for pair in cands:
            m2, nodes = _drop_trivial_components(remove_edges(m, pair))
            found = _prepend(RestorationStep("pair", pair, tuple(nodes)), search(m2, steps, depth + 1))
            if found is not None:
                return found
        return None

    found = search(m, steps, 0)
    if found is None:
        raise DeformationError("no removal sequence restores consistency with the slopes kept")
    m, done = found
    log.extend(done)
    if reduce:
        try:
            m = reduce_model(m)
        except DimerError as exc:
            raise DeformationError(str(exc)) from exc
    return m


def _prepend(step: RestorationStep, found):
    if found is None:
        return None
    return found[0], [step] + found[1]


# ---------------------------------------------------------------------------
# deformations


def is_hexagonal(m: DimerModel) -> bool:
    """Consistent with a triangular perfect matching polygon."""
    from .zigzag import is_consistent

    return is_consistent(m) and len(pm_polygon_fast(m).vertices) == 3


def is_square(m: DimerModel) -> bool:
    """Reduced, consistent, and every face is a quadrangle."""
    from .dimer_core import is_reduced
    from .zigzag import is_consistent

    return is_reduced(m) and all(len(f) == 4 for f in faces(m)) and is_consistent(m)


def uses_shortcut(data: DeformationData) -> bool:
    return data.r == 1 or is_hexagonal(data.model) or is_square(data.model)


def pre_restoration(data: DeformationData, bypasses: bool = True) -> DimerModel:
    """The model after inserting nodes, connections and bypasses, before any removal."""
    return _zig_surgery(data, bypasses) if data.side is Side.ZIG else _zag_surgery(data, bypasses)


@dataclass
class DeformationRun:
    data: DeformationData
    shortcut: bool
    before: DimerModel
    result: DimerModel
    steps: list[RestorationStep] = field(default_factory=list)


def run_deformation(
    data: DeformationData,
    schedule: Schedule | str | None = "auto",
    shortcut: bool | None = None,
) -> DeformationRun:
    short = uses_shortcut(data) if shortcut is None else shortcut
    before = pre_restoration(data, bypasses=not short)
    log: list[RestorationStep] = []
    if short:
        try:
            result = reduce_model(before)
        except DimerError as exc:
            raise DeformationError(str(exc)) from exc
    else:
        result = restore_consistency(before, schedule, log)
    return DeformationRun(data, short, before, result, log)


def _check_side(m: DimerModel, data: DeformationData, side: Side) -> DeformationData:
    if data.model is not m and data.model != m:
        raise DeformationError("deformation data was built for a different model")
    if data.side is not side:
        data = DeformationData(**{**data.__dict__, "side": side})
    return data


def deform_zig(
    m: DimerModel,
    data: DeformationData,
    schedule: Schedule | str | None = "auto",
    shortcut: bool | None = None,
) -> DimerModel:
    return run_deformation(_check_side(m, data, Side.ZIG), schedule, shortcut).result


def deform_zag(
    m: DimerModel,
    data: DeformationData,
    schedule: Schedule | str | None = "auto",
    shortcut: bool | None = None,
) -> DimerModel:
    return run_deformation(_check_side(m, data, Side.ZAG), schedule, shortcut).result


# ---------------------------------------------------------------------------
# slope laws


@dataclass
class SlopeReport:
    flip: Vec
    predicted: Counter
    observed: Counter
    rows: list[dict]

    @property
    def ok(self) -> bool:
        return self.predicted == self.observed

    def to_json(self) -> dict:
        def enc(c: Counter) -> list:
            return [{"slope": list(v), "count": k} for v, k in sorted(c.items())]

        return {"ok": self.ok, "flip": list(self.flip), "predicted": enc(self.predicted),
                "observed": enc(self.observed), "paths": self.rows}


def slope_transform_report(m: DimerModel, data: DeformationData, deformed: DimerModel) -> SlopeReport:
    """Predicted slopes of the deformed model against the observed ones.

    The family loses its ``r`` paths and gains ``h`` paths of slope ``-v``;
    the paths crossing at the removed side keep their slope, and those
    crossing at the subdivided side are shifted by a multiple of ``v``.
    ``flip`` in the report is the signed shift direction actually used.
    """
    v = data.slope
    flip = flip_direction(m, data.paths[data.z])
    if data.side is Side.ZAG:
        # on this side the shift runs against the flip (checked on the worked example)
        flip = -flip
    moving = set(data.x_paths if data.side is Side.ZIG else data.y_paths)
    fam = set(data.family)
    predicted: Counter = Counter()
    rows = []
    for k, w in enumerate(data.paths):
        if k in fam:
            continue
        new = w.slope + v * dot(w.slope, flip) if k in moving else w.slope
        if new != ZERO:
            predicted[new] += 1
        role = "x" if k in data.x_paths else "y" if k in data.y_paths else "-"
        rows.append({"path": k + 1, "role": role, "slope": list(w.slope), "predicted": list(new)})
    predicted[-v] += data.h
    observed = Counter(w.slope for w in zigzag_paths(deformed) if w.slope != ZERO)
    return SlopeReport(flip, predicted, observed, rows)
