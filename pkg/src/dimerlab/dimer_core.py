"""Bipartite graphs on the two-torus, encoded as rotation systems.

A model stores, for every node, the counterclockwise cyclic order of its
incident edges, and for every edge the translation ``offset`` of the lift of
its white end relative to the lift of its black end. Faces are traced from
the rotation system; the embedding is certified by the Euler characteristic
and by every face boundary having zero total offset.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .lattice import ZERO, Vec, angle_key, cross, det, hermite_basis, solve_2x2, vec


class DimerError(ValueError):
    """Raised for malformed models and illegal moves."""


class Color(str, Enum):
    BLACK = "B"
    WHITE = "W"

    @property
    def other(self) -> "Color":
        return Color.WHITE if self is Color.BLACK else Color.BLACK


@dataclass(frozen=True)
class Node:
    id: str
    color: Color
    position: tuple[Fraction, Fraction] | None = None


@dataclass(frozen=True)
class Edge:
    id: str
    black: str
    white: str
    offset: Vec = ZERO

    def end(self, color: Color) -> str:
        return self.black if color is Color.BLACK else self.white


@dataclass(frozen=True, order=True)
class Dart:
    """A directed traversal of an edge; ``forward`` means black to white."""

    edge: str
    forward: bool

    @property
    def reverse(self) -> "Dart":
        return Dart(self.edge, not self.forward)


@dataclass(frozen=True)
class Face:
    """A face traced counterclockwise (the face lies to the left of each dart)."""

    darts: tuple[Dart, ...]

    def __len__(self) -> int:
        return len(self.darts)


def natural_key(s: str) -> tuple:
    return tuple(int(t) if t.isdigit() else t for t in re.split(r"(\d+)", s))


class DimerModel:
    """Immutable dimer model on the torus.

    ``rotation[n]`` lists the edge ids at node ``n`` in counterclockwise
    order. Equality ignores the starting point of each cyclic list and the
    order in which nodes and edges were supplied.
    """

    __slots__ = ("_nodes", "_edges", "_rotation", "_pos")

    def __init__(
        self,
        nodes: Iterable[Node],
        edges: Iterable[Edge],
        rotation: Mapping[str, Sequence[str]],
    ):
        self._nodes: dict[str, Node] = {}
        for n in nodes:
            if n.id in self._nodes:
                raise DimerError(f"duplicate node id {n.id}")
            self._nodes[n.id] = n
        self._edges: dict[str, Edge] = {}
        for e in edges:
            if e.id in self._edges:
                raise DimerError(f"duplicate edge id {e.id}")
            e = Edge(e.id, e.black, e.white, vec(e.offset))
            for nid, col in ((e.black, Color.BLACK), (e.white, Color.WHITE)):
                if nid not in self._nodes:
                    raise DimerError(f"edge {e.id} refers to unknown node {nid}")
                if self._nodes[nid].color is not col:
                    raise DimerError(f"edge {e.id}: node {nid} has the wrong color")
            self._edges[e.id] = e
        self._rotation: dict[str, tuple[str, ...]] = {}
        for nid in self._nodes:
            rot_list = tuple(rotation.get(nid, ()))
            incident = sorted(e.id for e in self._edges.values() if nid in (e.black, e.white))
            if sorted(rot_list) != incident:
                raise DimerError(f"rotation at {nid} does not list its incident edges exactly")
            self._rotation[nid] = rot_list
        extra = set(rotation) - set(self._nodes)
        if extra:
            raise DimerError(f"rotation given for unknown nodes {sorted(extra)}")
        self._pos: dict[tuple[str, str], int] = {}
        for nid, lst in self._rotation.items():
            for i, eid in enumerate(lst):
                self._pos[(nid, eid)] = i

    # -- accessors ---------------------------------------------------------
    @property
    def nodes(self) -> dict[str, Node]:
        return dict(self._nodes)

    @property
    def edges(self) -> dict[str, Edge]:
        return dict(self._edges)

    @property
    def rotation(self) -> dict[str, tuple[str, ...]]:
        return dict(self._rotation)

    def node(self, nid: str) -> Node:
        return self._nodes[nid]

    def edge(self, eid: str) -> Edge:
        return self._edges[eid]

    def node_ids(self, color: Color | None = None) -> list[str]:
        return [n for n, v in self._nodes.items() if color is None or v.color is color]

    def edge_ids(self) -> list[str]:
        return list(self._edges)

    def degree(self, nid: str) -> int:
        return len(self._rotation[nid])

    def succ(self, nid: str, eid: str) -> str:
        """Counterclockwise successor of ``eid`` around ``nid``."""
        lst = self._rotation[nid]
        return lst[(self._pos[(nid, eid)] + 1) % len(lst)]

    def pred(self, nid: str, eid: str) -> str:
        lst = self._rotation[nid]
        return lst[(self._pos[(nid, eid)] - 1) % len(lst)]

    def head(self, d: Dart) -> str:
        e = self._edges[d.edge]
        return e.white if d.forward else e.black

    def tail(self, d: Dart) -> str:
        e = self._edges[d.edge]
        return e.black if d.forward else e.white

    def displacement(self, d: Dart) -> Vec:
        """Lift translation from the tail to the head of ``d``."""
        off = self._edges[d.edge].offset
        return off if d.forward else -off

    def other_end(self, eid: str, nid: str) -> str:
        e = self._edges[eid]
        return e.white if e.black == nid else e.black

    def darts(self) -> Iterator[Dart]:
        for eid in self._edges:
            yield Dart(eid, True)
            yield Dart(eid, False)

    def dart_from(self, nid: str, eid: str) -> Dart:
        return Dart(eid, self._edges[eid].black == nid)

    def neighbors(self, nid: str) -> list[str]:
        return [self.other_end(e, nid) for e in self._rotation[nid]]

    # -- value semantics -----------------------------------------------------
    def _canonical_rotation(self) -> dict[str, tuple[str, ...]]:
        out = {}
        for nid, lst in self._rotation.items():
            if lst:
                i = lst.index(min(lst, key=natural_key))
                lst = lst[i:] + lst[:i]
            out[nid] = lst
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, DimerModel):
            return NotImplemented
        return (
            self._nodes == other._nodes
            and self._edges == other._edges
            and self._canonical_rotation() == other._canonical_rotation()
        )

    def __hash__(self) -> int:
        return hash((frozenset(self._nodes.items()), frozenset(self._edges.items())))

    def __repr__(self) -> str:
        return f"DimerModel({len(self._nodes)} nodes, {len(self._edges)} edges)"

    def replace(
        self,
        nodes: Iterable[Node] | None = None,
        edges: Iterable[Edge] | None = None,
        rotation: Mapping[str, Sequence[str]] | None = None,
    ) -> "DimerModel":
        return DimerModel(
            self._nodes.values() if nodes is None else nodes,
            self._edges.values() if edges is None else edges,
            self._rotation if rotation is None else rotation,
        )

    def without_positions(self) -> "DimerModel":
        return self.replace(nodes=[Node(n.id, n.color) for n in self._nodes.values()])

    def fresh_id(self, prefix: str, taken: Iterable[str] = ()) -> str:
        used = set(self._nodes) | set(self._edges) | set(taken)
        k = 1
        while f"{prefix}{k}" in used:
            k += 1
        return f"{prefix}{k}"


# ---------------------------------------------------------------------------
# construction helpers


def from_geometry(
    nodes: Iterable[Node],
    edges: Iterable[Edge],
) -> DimerModel:
    """Build a model whose rotation is read off node positions.

    Every node needs a position; the rotation at a node sorts its incident
    edges by the angle of the lifted edge vector, so the drawing must be a
    straight-line embedding in the universal cover.
    """
    nodes = list(nodes)
    edges = list(edges)
    pos = {n.id: n.position for n in nodes}
    if any(p is None for p in pos.values()):
        raise DimerError("from_geometry needs a position on every node")
    incident: dict[str, list[tuple]] = {n.id: [] for n in nodes}
    for e in edges:
        (bx, by), (wx, wy) = pos[e.black], pos[e.white]
        d = (Fraction(wx) + e.offset[0] - Fraction(bx), Fraction(wy) + e.offset[1] - Fraction(by))
        if d == (0, 0):
            raise DimerError(f"edge {e.id} has zero length")
        incident[e.black].append((angle_key(d), e.id))
        incident[e.white].append((angle_key((-d[0], -d[1])), e.id))
    rotation = {}
    for nid, lst in incident.items():
        lst.sort(key=lambda t: t[0])
        for (k1, e1), (k2, e2) in zip(lst, lst[1:]):
            if not (k1 < k2):
                raise DimerError(f"edges {e1} and {e2} leave {nid} in the same direction")
        rotation[nid] = [eid for _, eid in lst]
    return DimerModel(nodes, edges, rotation)


# ---------------------------------------------------------------------------
# faces and validation


def next_face_dart(m: DimerModel, d: Dart) -> Dart:
    """Next dart along the face lying to the left of ``d``."""
    v = m.head(d)
    return m.dart_from(v, m.pred(v, d.edge))


def faces(m: DimerModel) -> list[Face]:
    seen: set[Dart] = set()
    out: list[Face] = []
    for d0 in m.darts():
        if d0 in seen:
            continue
        cyc = []
        d = d0
        while d not in seen:
            seen.add(d)
            cyc.append(d)
            d = next_face_dart(m, d)
        out.append(Face(tuple(cyc)))
    return out


def face_offset(m: DimerModel, f: Face) -> Vec:
    total = ZERO
    for d in f.darts:
        total = total + m.displacement(d)
    return total


def face_nodes(m: DimerModel, f: Face) -> list[str]:
    return [m.tail(d) for d in f.darts]


def components(m: DimerModel) -> list[set[str]]:
    seen: set[str] = set()
    out = []
    for start in m.node_ids():
        if start in seen:
            continue
        comp = {start}
        todo = [start]
        while todo:
            v = todo.pop()
            for u in m.neighbors(v):
                if u not in comp:
                    comp.add(u)
                    todo.append(u)
        seen |= comp
        out.append(comp)
    return out


def node_lifts(m: DimerModel, root: str | None = None) -> dict[str, Vec]:
    """Lift of every node in its component via a BFS spanning tree."""
    lift: dict[str, Vec] = {}
    roots = [root] if root is not None else []
    roots += m.node_ids()
    for r in roots:
        if r in lift:
            continue
        lift[r] = ZERO
        q = deque([r])
        while q:
            v = q.popleft()
            for eid in m.rotation[v]:
                d = m.dart_from(v, eid)
                u = m.head(d)
                if u not in lift:
                    lift[u] = lift[v] + m.displacement(d)
                    q.append(u)
    return lift


def cycle_classes(m: DimerModel) -> dict[str, Vec]:
    """Homology class of the fundamental cycle closed by each non-tree edge."""
    lift = node_lifts(m)
    out = {}
    for eid, e in m.edges.items():
        h = lift[e.black] + e.offset - lift[e.white]
        out[eid] = h
    return out


@dataclass
class ValidationReport:
    ok: bool
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    n_faces: int = 0
    euler: int = 0

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "errors": list(self.errors),
            "warnings": list(self.warnings),
            "faces": self.n_faces,
            "euler_characteristic": self.euler,
        }


def validate(m: DimerModel) -> ValidationReport:
    errors: list[str] = []
    warnings: list[str] = []
    fs = faces(m)
    chi = len(m.nodes) - len(m.edges) + len(fs)
    if chi != 0:
        errors.append(f"Euler characteristic {chi} != 0")
    for i, f in enumerate(fs):
        off = face_offset(m, f)
        if off != ZERO:
            errors.append(f"face {i} is not contractible (boundary offset {tuple(off)})")
    comps = components(m)
    if len(comps) > 1:
        errors.append(f"graph has {len(comps)} connected components")
    if not errors:
        classes = list(cycle_classes(m).values())
        basis = hermite_basis(classes)
        if len(basis) < 2 or abs(basis[0].x * basis[1].y) != 1:
            errors.append("cycle classes do not generate the homology of the torus")
    for nid in m.node_ids():
        if m.degree(nid) == 0:
            errors.append(f"node {nid} is isolated")
        elif m.degree(nid) == 1:
            warnings.append(f"node {nid} has degree 1")
    return ValidationReport(not errors, errors, warnings, len(fs), chi)


def require_valid(m: DimerModel) -> None:
    rep = validate(m)
    if not rep.ok:
        raise DimerError("invalid dimer model: " + "; ".join(rep.errors))


# ---------------------------------------------------------------------------
# moves


def retranslate(m: DimerModel, nid: str, delta: Sequence[int]) -> DimerModel:
    """Move the lift of ``nid`` by ``delta``; all observables are unchanged."""
    delta = vec(delta)
    new_edges = []
    for e in m.edges.values():
        off = e.offset
        if e.white == nid:
            off = off + delta
        if e.black == nid:
            off = off - delta
        new_edges.append(Edge(e.id, e.black, e.white, off))
    return m.replace(edges=new_edges)


def _is_cyclic_arc(lst: Sequence[str], arc: Sequence[str]) -> bool:
    n, k = len(lst), len(arc)
    if k == 0 or k > n:
        return False
    for s in range(n):
        if all(lst[(s + i) % n] == arc[i] for i in range(k)):
            return True
    return False


def split_move(
    m: DimerModel,
    nid: str,
    arc: Sequence[str],
    new_ids: tuple[str, str, str, str] | None = None,
) -> DimerModel:
    """Split ``nid``: the edges in ``arc`` move to a new node of the same color.

    The new node is joined to ``nid`` through a new 2-valent node of the other
    color. ``arc`` must be a contiguous run of the rotation at ``nid``, listed
    counterclockwise. ``new_ids`` optionally names (twin node, middle node,
    edge at ``nid``, edge at twin).
    """
    lst = list(m.rotation[nid])
    arc = list(arc)
    if not _is_cyclic_arc(lst, arc):
        raise DimerError(f"{arc} is not a contiguous arc of the rotation at {nid}")
    color = m.node(nid).color
    if new_ids is None:
        twin = m.fresh_id(color.value + "s")
        mid = m.fresh_id(color.other.value + "s", [twin])
        f1 = m.fresh_id("es", [twin, mid])
        f2 = m.fresh_id("es", [twin, mid, f1])
    else:
        twin, mid, f1, f2 = new_ids
    start = lst.index(arc[0])
    rest = [lst[(start + len(arc) + i) % len(lst)] for i in range(len(lst) - len(arc))]
    pos = m.node(nid).position
    nodes = list(m.nodes.values()) + [Node(twin, color, pos), Node(mid, color.other, pos)]
    edges = []
    for e in m.edges.values():
        if e.id in arc:
            e = Edge(e.id, twin if e.black == nid else e.black, twin if e.white == nid else e.white, e.offset)
        edges.append(e)
    if color is Color.BLACK:
        edges += [Edge(f1, nid, mid), Edge(f2, twin, mid)]
    else:
        edges += [Edge(f1, mid, nid), Edge(f2, mid, twin)]
    rotation = m.rotation
    rotation[nid] = tuple(rest + [f1])
    rotation[twin] = tuple(arc + [f2])
    rotation[mid] = (f1, f2)
    return DimerModel(nodes, edges, rotation)


def join_move(m: DimerModel, nid: str) -> DimerModel:
    """Contract the 2-valent node ``nid`` together with both neighbors."""
    if m.degree(nid) != 2:
        raise DimerError(f"join needs a 2-valent node, {nid} has degree {m.degree(nid)}")
    e1, e2 = m.rotation[nid]
    a, b = m.other_end(e1, nid), m.other_end(e2, nid)
    if a == b:
        raise DimerError(f"cannot join {nid}: both edges end at {a}")
    # lift of b relative to a, passing through nid
    d1 = m.displacement(m.dart_from(a, e1))
    d2 = m.displacement(m.dart_from(nid, e2))
    shift = d1 + d2
    m2 = retranslate(m, b, -shift) if shift != ZERO else m
    la, lb = list(m2.rotation[a]), list(m2.rotation[b])
    ib = lb.index(e2)
    tail = lb[ib + 1 :] + lb[:ib]
    ia = la.index(e1)
    merged = la[:ia] + tail + la[ia + 1 :]
    edges = []
    for e in m2.edges.values():
        if e.id in (e1, e2):
            continue
        if b in (e.black, e.white):
            e = Edge(e.id, a if e.black == b else e.black, a if e.white == b else e.white, e.offset)
        edges.append(e)
    nodes = [n for n in m2.nodes.values() if n.id not in (nid, b)]
    rotation = {k: v for k, v in m2.rotation.items() if k not in (nid, b)}
    rotation[a] = tuple(merged)
    return DimerModel(nodes, edges, rotation)


def reduce(m: DimerModel) -> DimerModel:
    """Apply join moves until no 2-valent node remains."""
    while True:
        two = [n for n in sorted(m.node_ids(), key=natural_key) if m.degree(n) == 2]
        for n in two:
            e1, e2 = m.rotation[n]
            if m.other_end(e1, n) != m.other_end(e2, n):
                m = join_move(m, n)
                break
        else:
            break
    if len(m.nodes) < 2:
        raise DimerError("degenerate after reduction")
    return m


def is_reduced(m: DimerModel) -> bool:
    return all(m.degree(n) != 2 for n in m.node_ids())


def remove_edges(m: DimerModel, eids: Iterable[str]) -> DimerModel:
    """Delete edges (rotation orders of the remaining edges are kept)."""
    drop = set(eids)
    rotation = {n: tuple(e for e in lst if e not in drop) for n, lst in m.rotation.items()}
    return m.replace(edges=[e for e in m.edges.values() if e.id not in drop], rotation=rotation)


def remove_nodes(m: DimerModel, nids: Iterable[str]) -> DimerModel:
    drop = set(nids)
    dead = {e.id for e in m.edges.values() if e.black in drop or e.white in drop}
    m = remove_edges(m, dead)
    return DimerModel(
        [n for n in m.nodes.values() if n.id not in drop],
        m.edges.values(),
        {k: v for k, v in m.rotation.items() if k not in drop},
    )


def renumber(m: DimerModel) -> DimerModel:
    """Rename nodes to B1.., W1.. and edges to e1.. in natural order of old ids."""
    nmap = {}
    for col in (Color.BLACK, Color.WHITE):
        ids = sorted(m.node_ids(col), key=natural_key)
        for k, nid in enumerate(ids, 1):
            nmap[nid] = f"{col.value}{k}"
    emap = {eid: f"e{k}" for k, eid in enumerate(sorted(m.edge_ids(), key=natural_key), 1)}
    nodes = [Node(nmap[n.id], n.color, n.position) for n in m.nodes.values()]
    edges = [Edge(emap[e.id], nmap[e.black], nmap[e.white], e.offset) for e in m.edges.values()]
    rotation = {nmap[n]: tuple(emap[e] for e in lst) for n, lst in m.rotation.items()}
    return DimerModel(nodes, edges, rotation)


def transform_offsets(m: DimerModel, u: Sequence[Sequence[int]]) -> DimerModel:
    """Apply a unimodular matrix to every offset.

    A matrix of determinant -1 reverses the orientation of the torus, so the
    rotation orders are reversed as well.
    """
    from .lattice import apply

    d = det(u)
    if abs(d) != 1:
        raise DimerError("offset transform must be unimodular")
    edges = [Edge(e.id, e.black, e.white, apply(u, e.offset)) for e in m.edges.values()]
    rotation = m.rotation
    if d < 0:
        rotation = {n: tuple(reversed(lst)) for n, lst in rotation.items()}
    nodes = [Node(n.id, n.color) for n in m.nodes.values()]
    return DimerModel(nodes, edges, rotation)


def cover(m: DimerModel, nx: int, ny: int) -> DimerModel:
    """The ``nx`` by ``ny`` covering model, on the torus of the sublattice ``nx Z + ny Z``.

    Copies are named ``<id>_<i>_<j>``; edge copies are indexed by the cell of
    their black end. Offsets are expressed in the coarser lattice.
    """
    if nx < 1 or ny < 1:
        raise DimerError("cover sizes must be positive")

    def cell(i: int, j: int) -> str:
        return f"_{i % nx}_{j % ny}"

    nodes, edges, rotation = [], [], {}
    for n in m.nodes.values():
        for i in range(nx):
            for j in range(ny):
                pos = None
                if n.position is not None:
                    pos = ((n.position[0] + i) / nx, (n.position[1] + j) / ny)
                nodes.append(Node(n.id + cell(i, j), n.color, pos))
    for e in m.edges.values():
        for i in range(nx):
            for j in range(ny):
                wi, wj = i + e.offset.x, j + e.offset.y
                edges.append(Edge(e.id + cell(i, j), e.black + cell(i, j), e.white + cell(wi, wj), (wi // nx, wj // ny)))
    for nid, lst in m.rotation.items():
        white = m.node(nid).color is Color.WHITE
        for i in range(nx):
            for j in range(ny):
                ids = []
                for eid in lst:
                    off = m.edge(eid).offset if white else ZERO
                    ids.append(eid + cell(i - off.x, j - off.y))
                rotation[nid + cell(i, j)] = tuple(ids)
    return DimerModel(nodes, edges, rotation)


# ---------------------------------------------------------------------------
# isomorphism


def _dart_maps(a: DimerModel, b: DimerModel) -> Iterator[tuple[dict[Dart, Dart], bool]]:
    """All rotation-compatible dart bijections from ``a`` onto ``b``.

    Yields ``(map, reversed)``; ``reversed`` means rotations are matched
    with opposite orientation.
    """
    if len(a.nodes) != len(b.nodes) or len(a.edges) != len(b.edges):
        return
    deg_a = sorted((n.color.value, a.degree(i)) for i, n in a.nodes.items())
    deg_b = sorted((n.color.value, b.degree(i)) for i, n in b.nodes.items())
    if deg_a != deg_b:
        return
    root = next(iter(a.darts()))
    root_tail = a.tail(root)
    for target in b.darts():
        if target.forward != root.forward:
            continue
        if b.degree(b.tail(target)) != a.degree(root_tail):
            continue
        for rev in (False, True):
            mp = _extend(a, b, root, target, rev)
            if mp is not None:
                yield mp, rev


def _extend(a: DimerModel, b: DimerModel, d0: Dart, t0: Dart, rev: bool) -> dict[Dart, Dart] | None:
    mp: dict[Dart, Dart] = {d0: t0}
    used = {t0}
    q = deque([d0])
    while q:
        d = q.popleft()
        t = mp[d]
        va, vb = a.tail(d), b.tail(t)
        nxt_a = a.dart_from(va, a.succ(va, d.edge))
        nxt_b = b.dart_from(vb, b.pred(vb, t.edge) if rev else b.succ(vb, t.edge))
        for x, y in ((d.reverse, t.reverse), (nxt_a, nxt_b)):
            if x.forward != y.forward:
                return None
            if x in mp:
                if mp[x] != y:
                    return None
                continue
            if y in used:
                return None
            mp[x] = y
            used.add(y)
            q.append(x)
    if len(mp) != 2 * len(a.edges):
        return None
    return mp


def _homology_matrix(a: DimerModel, b: DimerModel, emap: dict[str, str]) -> tuple | None:
    """Integer matrix U with U * class_a(c) == class_b(c) for all cycles.

    Each fundamental cycle of a spanning tree of ``a`` is pushed through the
    edge map and evaluated in ``b``.
    """
    from .lattice import apply

    pairs = []
    for eid, e in a.edges.items():
        walk = _tree_path(a, e.black) + [(eid, True)] + _tree_path(a, e.white, reverse=True)
        ha = hb = ZERO
        for x, fwd in walk:
            oa, ob = a.edge(x).offset, b.edge(emap[x]).offset
            ha = ha + (oa if fwd else -oa)
            hb = hb + (ob if fwd else -ob)
        pairs.append((ha, hb))
    base = next(
        ((p, q) for k, p in enumerate(pairs) for q in pairs[k + 1 :] if cross(p[0], q[0]) != 0),
        None,
    )
    if base is None:
        return None
    (p1, q1), (p2, q2) = base
    rows = ((p1[0], p1[1]), (p2[0], p2[1]))
    r0 = solve_2x2(rows, (q1[0], q2[0]))
    r1 = solve_2x2(rows, (q1[1], q2[1]))
    if any(x.denominator != 1 for x in (*r0, *r1)):
        return None
    u = ((int(r0[0]), int(r0[1])), (int(r1[0]), int(r1[1])))
    if abs(det(u)) != 1:
        return None
    if any(apply(u, ha) != hb for ha, hb in pairs):
        return None
    return u


def _tree_path(m: DimerModel, target: str, reverse: bool = False) -> list[tuple[str, bool]]:
    """Edges of the BFS-tree path from the root to ``target`` (or back).

    Each entry is ``(edge id, traversed black-to-white)``.
    """
    parent = _bfs_parents(m)
    path: list[tuple[str, bool]] = []
    v = target
    while parent[v] is not None:
        eid, u = parent[v]
        path.append((eid, m.edge(eid).black == u))
        v = u
    path.reverse()
    if reverse:
        path = [(eid, not fwd) for eid, fwd in reversed(path)]
    return path


_tree_cache: list = []


def _bfs_parents(m: DimerModel) -> dict[str, tuple[str, str] | None]:
    if _tree_cache and _tree_cache[0] is m:
        return _tree_cache[1]
    parent: dict[str, tuple[str, str] | None] = {}
    for r in m.node_ids():
        if r in parent:
            continue
        parent[r] = None
        q = deque([r])
        while q:
            v = q.popleft()
            for eid in m.rotation[v]:
                u = m.other_end(eid, v)
                if u not in parent:
                    parent[u] = (eid, v)
                    q.append(u)
    _tree_cache[:] = [m, parent]
    return parent


def find_isomorphism(a: DimerModel, b: DimerModel) -> tuple[dict[str, str], dict[str, str], tuple] | None:
    """Node map, edge map and homology matrix of an isomorphism, or ``None``.

    Rotations must agree either with the same orientation (matrix of
    determinant +1) or with reversed orientation (determinant -1).
    """
    for mp, rev in _dart_maps(a, b):
        emap = {d.edge: t.edge for d, t in mp.items()}
        u = _homology_matrix(a, b, emap)
        if u is None:
            continue
        if (det(u) < 0) != rev:
            continue
        nmap = {a.tail(d): b.tail(t) for d, t in mp.items()}
        return nmap, emap, u
    return None


def isomorphic(a: DimerModel, b: DimerModel) -> bool:
    return find_isomorphism(a, b) is not None
