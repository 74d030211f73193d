"""Mutation of dimer models at quadrangle faces.

The mutation makes the corners of one color 3-valent by split moves,
replaces those two corners by two new nodes of the same color (the spider
move), and joins away any 2-valent node that results. Faces keep their
identity through a mutation wherever some of their darts survive, which is
what :func:`track_faces` uses to follow a labelled face through a sequence
of mutations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .dimer_core import (
    Color,
    Dart,
    DimerError,
    DimerModel,
    Edge,
    Face,
    Node,
    faces,
    natural_key,
    reduce,
    split_move,
)
from .lattice import ZERO, Vec


class MutationError(ValueError):
    pass


@dataclass(frozen=True)
class MutationResult:
    model: DimerModel
    face: Face  # the new quadrangle in place of the mutated one


def as_color(variant: Color | str) -> Color:
    """Accept a :class:`Color`, ``"B"``/``"W"`` or ``"black"``/``"white"``."""
    if isinstance(variant, Color):
        return variant
    key = str(variant).strip().lower()
    table = {"b": Color.BLACK, "black": Color.BLACK, "w": Color.WHITE, "white": Color.WHITE}
    if key not in table:
        raise MutationError(f"unknown variant {variant!r}; use black or white")
    return table[key]


def _as_face(m: DimerModel, face: Face | int | Iterable[Dart]) -> Face:
    fs = faces(m)
    if isinstance(face, int):
        if not 0 <= face < len(fs):
            raise MutationError(f"no face with index {face}")
        return fs[face]
    darts = set(face.darts if isinstance(face, Face) else face)
    for f in fs:
        if darts <= set(f.darts):
            return f
    raise MutationError("face not found in the model")


def _replace_run(lst: list[str], run: Sequence[str], new: Sequence[str]) -> list[str]:
    """Replace the cyclically consecutive ``run`` by ``new``."""
    n, k = len(lst), len(run)
    for s in range(n):
        if all(lst[(s + i) % n] == run[i] for i in range(k)):
            rest = [lst[(s + k + i) % n] for i in range(n - k)]
            return list(new) + rest
    raise MutationError(f"edges {list(run)} are not consecutive in a rotation")


def _corners(m: DimerModel, f: Face, color: Color) -> list[Dart]:
    """Face darts starting at a corner not of ``color``."""
    darts = list(f.darts)
    k = next(i for i, d in enumerate(darts) if m.node(m.tail(d)).color is not color)
    return darts[k:] + darts[:k]


def _mid(points: Sequence[tuple[Fraction, Fraction]]) -> tuple[Fraction, Fraction]:
    x = Fraction(sum(p[0] for p in points)) / len(points)
    y = Fraction(sum(p[1] for p in points)) / len(points)
    return (x % 1, y % 1)


def spider_move(m: DimerModel, face: Face | int | Iterable[Dart], variant: Color | str = Color.BLACK) -> MutationResult:
    """Replace the two 3-valent ``variant``-colored corners of a quadrangle by two new nodes.

    Each new node is joined to one of the other two corners and to the far
    ends of both legs of the removed corners.
    """
    variant = as_color(variant)
    f = _as_face(m, face)
    if len(f) != 4:
        raise MutationError("mutation defined only at quadrangle faces")
    darts = _corners(m, f, variant)
    a0, c1, a2, c3 = (m.tail(d) for d in darts)
    e01, e12, e23, e30 = (d.edge for d in darts)
    if len({a0, c1, a2, c3}) < 4 or len({e01, e12, e23, e30}) < 4:
        raise MutationError("spider move needs four distinct corners and edges")
    for c in (c1, c3):
        if m.degree(c) != 3:
            raise MutationError(f"spider move needs 3-valent corners, {c} has degree {m.degree(c)}")
    # lifts of the corners in the plane, starting at a0
    lift = {a0: ZERO}
    pos = ZERO
    for d in darts[:-1]:
        pos = pos + m.displacement(d)
        lift[m.head(d)] = pos
    legs = {}
    for c, used in ((c1, (e01, e12)), (c3, (e23, e30))):
        (leg,) = [e for e in m.rotation[c] if e not in used]
        end = m.other_end(leg, c)
        legs[c] = (leg, end, lift[c] + m.displacement(m.dart_from(c, leg)))
    leg1, l1, lift_l1 = legs[c1]
    leg3, l3, lift_l3 = legs[c3]
    if l1 == l3 and lift_l1 == lift_l3:
        raise MutationError("both legs end at the same lifted node")

    n0 = m.fresh_id(variant.value + "m")
    n2 = m.fresh_id(variant.value + "m", [n0])
    taken = [n0, n2]
    new_e = {}
    for key in ("0a", "01", "03", "2a", "21", "23"):
        new_e[key] = m.fresh_id("em", taken)
        taken.append(new_e[key])
    lift_n0, lift_n2 = lift[c1], lift[c3]

    def make(eid: str, nv: str, lv: Vec, other: str, lo: Vec) -> Edge:
        if variant is Color.BLACK:
            return Edge(eid, nv, other, lo - lv)
        return Edge(eid, other, nv, lv - lo)

    edges = [e for e in m.edges.values() if e.id not in (e01, e12, e23, e30, leg1, leg3)]
    edges += [
        make(new_e["0a"], n0, lift_n0, a0, lift[a0]),
        make(new_e["01"], n0, lift_n0, l1, lift_l1),
        make(new_e["03"], n0, lift_n0, l3, lift_l3),
        make(new_e["2a"], n2, lift_n2, a2, lift[a2]),
        make(new_e["21"], n2, lift_n2, l1, lift_l1),
        make(new_e["23"], n2, lift_n2, l3, lift_l3),
    ]
    rotation = {k: list(v) for k, v in m.rotation.items() if k not in (c1, c3)}
    rotation[a0] = _replace_run(rotation[a0], [e01, e30], [new_e["0a"]])
    rotation[a2] = _replace_run(rotation[a2], [e23, e12], [new_e["2a"]])
    rotation[l1] = _replace_run(rotation[l1], [leg1], [new_e["21"], new_e["01"]])
    rotation[l3] = _replace_run(rotation[l3], [leg3], [new_e["03"], new_e["23"]])
    rotation[n0] = [new_e["0a"], new_e["01"], new_e["03"]]
    rotation[n2] = [new_e["2a"], new_e["23"], new_e["21"]]

    nodes = [nd for nd in m.nodes.values() if nd.id not in (c1, c3)]
    pos_n0 = pos_n2 = None
    corner_pos = [m.node(x).position for x in (a0, c1, a2, c3)]
    if all(q is not None for q in corner_pos):
        planar = [(q[0] + lift[x].x, q[1] + lift[x].y) for q, x in zip(corner_pos, (a0, c1, a2, c3))]
        cx, cy = sum(q[0] for q in planar) / 4, sum(q[1] for q in planar) / 4
        # new nodes sit halfway between the centre and the remaining corners
        pos_n0 = _mid([(cx, cy), planar[0]])
        pos_n2 = _mid([(cx, cy), planar[2]])
    nodes += [Node(n0, variant, pos_n0), Node(n2, variant, pos_n2)]
    out = DimerModel(nodes, edges, rotation)
    # the new quadrangle n0 -> l1 -> n2 -> l3, read off the face containing one of its darts
    d0 = out.dart_from(n0, new_e["01"])
    new_face = next(fc for fc in faces(out) if d0 in fc.darts)
    return MutationResult(out, new_face)


def _prepare(m: DimerModel, f: Face, variant: Color) -> tuple[DimerModel, set[Dart]]:
    """Split ``variant``-colored corners of ``f`` of degree above 3; returns the model and face darts."""
    face_darts = set(f.darts)
    for d in f.darts:
        c = m.tail(d)
        if m.node(c).color is not variant:
            continue
        deg = m.degree(c)
        if deg == 3:
            continue
        if deg < 3:
            raise MutationError(f"corner {c} has degree {deg}; reduce the model first")
        on_face = {x.edge for x in face_darts if c in (m.tail(x), m.head(x))}
        lst = list(m.rotation[c])
        k = next(i for i, e in enumerate(lst) if e not in on_face and lst[i - 1] in on_face)
        arc = []
        while lst[k % len(lst)] not in on_face:
            arc.append(lst[k % len(lst)])
            k += 1
        if len(arc) != deg - 2:
            raise MutationError(f"face edges at {c} are not consecutive")
        m = split_move(m, c, arc)
    return m, face_darts


def mutate_face(m: DimerModel, face: Face | int | Iterable[Dart], variant: Color | str = Color.BLACK) -> MutationResult:
    """Mutation at a quadrangle face: split to 3-valent corners, spider move, join 2-valent nodes."""
    variant = as_color(variant)
    f = _as_face(m, face)
    if len(f) != 4:
        raise MutationError("mutation defined only at quadrangle faces")
    m1, darts = _prepare(m, f, variant)
    f1 = _as_face(m1, darts)
    res = spider_move(m1, f1, variant)
    try:
        out = reduce(res.model)
    except DimerError as exc:
        raise MutationError(str(exc)) from exc
    survivors = set(res.face.darts) & set(out.darts())
    return MutationResult(out, _as_face(out, survivors) if survivors else res.face)


def track_faces(m: DimerModel, labelled: Mapping[str, Iterable[Dart]]) -> dict[str, Face]:
    """Match each labelled dart set to the face of ``m`` sharing most of its darts."""
    fs = faces(m)
    out = {}
    for label, darts in labelled.items():
        darts = set(darts)
        best = max(fs, key=lambda f: len(darts & set(f.darts)))
        if not darts & set(best.darts):
            raise MutationError(f"face {label} has no surviving dart")
        out[label] = best
    return out


def parse_face_darts(tokens: Iterable[str]) -> set[Dart]:
    """Darts written as ``e12+`` (black to white) or ``e12-``."""
    out = set()
    for t in tokens:
        if t[-1] not in "+-":
            raise MutationError(f"dart {t} needs a trailing + or -")
        out.add(Dart(t[:-1], t[-1] == "+"))
    return out


def replay(
    m: DimerModel,
    labelled: Mapping[str, Iterable[Dart]],
    order: Sequence[str],
    variant: Color | str = Color.BLACK,
) -> DimerModel:
    """Mutate at the labelled faces in the given order, following faces as the model changes."""
    current = {k: set(v) for k, v in labelled.items()}
    for label in order:
        f = track_faces(m, {label: current[label]})[label]
        res = mutate_face(m, f, variant)
        m = res.model
        current[label] = set(res.face.darts)
        alive = set(m.darts())
        for k in current:
            if k != label:
                kept = current[k] & alive
                if kept:
                    current[k] = set(track_faces(m, {k: kept})[k].darts)
    return m


def quadrangle_faces(m: DimerModel) -> list[int]:
    return [i for i, f in enumerate(faces(m)) if len(f) == 4]


def face_label(f: Face) -> list[str]:
    return sorted((d.edge + ("+" if d.forward else "-") for d in f.darts), key=natural_key)
