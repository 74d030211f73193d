"""Perfect matchings, height changes and the perfect matching polygon."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from math import comb
from typing import Iterable, Iterator

import networkx as nx

from .dimer_core import Color, DimerModel, natural_key
from .lattice import ZERO, LatticePolygon, Vec, lattice_length, primitive, rot


class MatchingError(ValueError):
    pass


@dataclass(frozen=True)
class PerfectMatching:
    edges: frozenset[str]

    def __contains__(self, eid: str) -> bool:
        return eid in self.edges

    def __len__(self) -> int:
        return len(self.edges)

    def sorted(self) -> list[str]:
        return sorted(self.edges, key=natural_key)


class PointKind(str, Enum):
    CORNER = "corner"
    BOUNDARY = "boundary"
    INTERNAL = "internal"


def is_perfect_matching(m: DimerModel, edges: Iterable[str]) -> bool:
    covered: Counter[str] = Counter()
    for eid in edges:
        e = m.edge(eid)
        covered[e.black] += 1
        covered[e.white] += 1
    return set(covered) == set(m.node_ids()) and all(c == 1 for c in covered.values())


def iter_pms(m: DimerModel) -> Iterator[PerfectMatching]:
    """Backtracking over black nodes in natural id order, edges in rotation order."""
    blacks = sorted(m.node_ids(Color.BLACK), key=natural_key)
    if len(blacks) != len(m.node_ids(Color.WHITE)):
        return
    used: set[str] = set()
    chosen: list[str] = []

    def rec(i: int) -> Iterator[PerfectMatching]:
        if i == len(blacks):
            yield PerfectMatching(frozenset(chosen))
            return
        for eid in m.rotation[blacks[i]]:
            w = m.edge(eid).white
            if w in used:
                continue
            used.add(w)
            chosen.append(eid)
            yield from rec(i + 1)
            chosen.pop()
            used.discard(w)

    yield from rec(0)


def enumerate_pms(m: DimerModel) -> list[PerfectMatching]:
    return list(iter_pms(m))


def offset_sum(m: DimerModel, p: PerfectMatching | Iterable[str]) -> Vec:
    edges = p.edges if isinstance(p, PerfectMatching) else p
    total = ZERO
    for eid in edges:
        total = total + m.edge(eid).offset
    return total


def height_change(m: DimerModel, p: PerfectMatching, p0: PerfectMatching) -> Vec:
    """Height change of ``p`` relative to ``p0``: a quarter turn of the offset difference."""
    return rot(offset_sum(m, p) - offset_sum(m, p0))


def height_counts(m: DimerModel) -> Counter[Vec]:
    """Number of perfect matchings per offset sum, by dynamic programming.

    Black nodes are processed in a fixed order; the state is the set of
    whites already used. A state is discarded as soon as some white whose
    black neighbours have all been processed is still unused.
    """
    blacks = sorted(m.node_ids(Color.BLACK), key=natural_key)
    whites = m.node_ids(Color.WHITE)
    if len(blacks) != len(whites):
        return Counter()
    last_use: dict[str, int] = {}
    for i, b in enumerate(blacks):
        for eid in m.rotation[b]:
            last_use[m.edge(eid).white] = i
    if len(last_use) != len(whites):
        return Counter()
    retire: dict[int, list[str]] = {}
    for w, i in last_use.items():
        retire.setdefault(i, []).append(w)
    states: dict[frozenset[str], Counter[Vec]] = {frozenset(): Counter({ZERO: 1})}
    for i, b in enumerate(blacks):
        nxt: dict[frozenset[str], Counter[Vec]] = {}
        for used, cnt in states.items():
            for eid in m.rotation[b]:
                e = m.edge(eid)
                if e.white in used:
                    continue
                key = used | {e.white}
                bucket = nxt.setdefault(key, Counter())
                for v, c in cnt.items():
                    bucket[v + e.offset] += c
        done = retire.get(i, [])
        states = {}
        for used, cnt in nxt.items():
            if all(w in used for w in done):
                # retired whites no longer need tracking
                states.setdefault(used - set(done), Counter()).update(cnt)
        # ``used`` keys drop retired whites, so equal futures merge
    return states.get(frozenset(), Counter())


def _kind(poly: LatticePolygon, q: Vec) -> PointKind:
    if q in poly.vertices:
        return PointKind.CORNER
    if poly.contains(q, strict=True):
        return PointKind.INTERNAL
    return PointKind.BOUNDARY


@dataclass(frozen=True)
class PmPolygonResult:
    polygon: LatticePolygon
    reference: PerfectMatching
    matchings: tuple[PerfectMatching, ...]
    placement: dict[PerfectMatching, Vec]
    classification: dict[PerfectMatching, PointKind]

    def at(self, q) -> list[PerfectMatching]:
        q = Vec(*q)
        return [p for p in self.matchings if self.placement[p] == q]

    def multiplicities(self) -> Counter[Vec]:
        return Counter(self.placement.values())

    def to_json(self) -> dict:
        counts = self.multiplicities()
        return {
            "polygon": self.polygon.to_json(),
            "reference": self.reference.sorted(),
            "points": [
                {"point": [q.x, q.y], "count": counts[q], "kind": _kind(self.polygon, q).value}
                for q in sorted(counts)
            ],
        }


def pm_polygon(m: DimerModel, p0: PerfectMatching | None = None) -> PmPolygonResult:
    pms = enumerate_pms(m)
    if not pms:
        raise MatchingError("degenerate dimer model: no perfect matchings")
    ref = pms[0] if p0 is None else p0
    if not is_perfect_matching(m, ref.edges):
        raise MatchingError("reference is not a perfect matching")
    place = {p: height_change(m, p, ref) for p in pms}
    poly = LatticePolygon.hull(place.values())
    kinds = {p: _kind(poly, q) for p, q in place.items()}
    return PmPolygonResult(poly, ref, tuple(pms), place, kinds)


def pm_point_counts(m: DimerModel, p0: PerfectMatching | None = None) -> Counter[Vec]:
    """Matching count per lattice point, without listing the matchings."""
    if p0 is None:
        p0 = next(iter_pms(m), None)
        if p0 is None:
            raise MatchingError("degenerate dimer model: no perfect matchings")
    base = offset_sum(m, p0)
    return Counter({rot(v - base): c for v, c in height_counts(m).items()})


def pm_polygon_fast(m: DimerModel, p0: PerfectMatching | None = None) -> LatticePolygon:
    counts = pm_point_counts(m, p0)
    return LatticePolygon.hull(counts)


def boundary_counts(counts: Counter[Vec] | PmPolygonResult) -> dict[tuple[int, int], list[int]]:
    """Matching counts along each polygon edge, from its first vertex on.

    Keys are ``(edge index, lattice length)``; values list the counts at the
    lattice points of that edge in counterclockwise order.
    """
    if isinstance(counts, PmPolygonResult):
        poly, counts = counts.polygon, counts.multiplicities()
    else:
        poly = LatticePolygon.hull(counts)
    out = {}
    for i, (a, b) in enumerate(poly.edges()):
        n = lattice_length(b - a)
        step = primitive(b - a)
        out[(i, n)] = [counts.get(a + step * k, 0) for k in range(n + 1)]
    return out


def binomial_boundary(poly: LatticePolygon) -> dict[tuple[int, int], list[int]]:
    return {
        (i, lattice_length(b - a)): [comb(lattice_length(b - a), k) for k in range(lattice_length(b - a) + 1)]
        for i, (a, b) in enumerate(poly.edges())
    }


def is_nondegenerate(m: DimerModel) -> bool:
    """Every edge lies in some perfect matching."""
    g = nx.Graph()
    blacks = m.node_ids(Color.BLACK)
    g.add_nodes_from(blacks, bipartite=0)
    g.add_nodes_from(m.node_ids(Color.WHITE), bipartite=1)
    g.add_edges_from((e.black, e.white) for e in m.edges.values())
    if len(blacks) * 2 != g.number_of_nodes():
        return False
    checked: dict[tuple[str, str], bool] = {}
    for e in m.edges.values():
        key = (e.black, e.white)
        if key not in checked:
            h = g.copy()
            h.remove_nodes_from(key)
            top = [b for b in blacks if b != e.black]
            size = len(nx.bipartite.hopcroft_karp_matching(h, top_nodes=top)) // 2 if top else 0
            checked[key] = size == len(top)
        if not checked[key]:
            return False
    return True
