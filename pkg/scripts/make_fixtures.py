"""Regenerate the shipped ``.dimer`` fixtures from drawing coordinates.

Nodes are given by their drawn coordinates; a node drawn on the far side of
the fundamental domain is an alias of the node at the same coordinates modulo
the domain, shifted by one period. Rotations are read off the straight-line
drawing.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from dimerlab.cli.io import write_dimer
from dimerlab.dimer_core import Color, Edge, Node, faces, from_geometry, validate
from dimerlab.lattice import Vec

DATA = Path(__file__).resolve().parents[1] / "src" / "dimerlab" / "data"


def build(blacks, whites, edges, size, origin=(0, 0), extra=None):
    """``edges`` lists (white, black) name pairs, optionally with an offset."""
    w_, h_ = size
    x0, y0 = origin
    reps: dict[tuple, str] = {}
    alias: dict[str, tuple[str, Vec]] = {}
    nodes: list[Node] = []
    for color, table in ((Color.BLACK, blacks), (Color.WHITE, whites)):
        # representatives first: coordinates inside the half-open domain
        order = sorted(table.items(), key=lambda kv: not (x0 <= kv[1][0] < x0 + w_ and y0 <= kv[1][1] < y0 + h_))
        for name, (x, y) in order:
            sx, sy = (x - x0) // w_, (y - y0) // h_
            key = (color, x - sx * w_, y - sy * h_)
            if key in reps:
                alias[name] = (reps[key], Vec(int(sx), int(sy)))
                continue
            if (sx, sy) != (0, 0):
                raise ValueError(f"{name} is outside the domain and has no representative")
            reps[key] = name
            alias[name] = (name, Vec(0, 0))
            pos = (Fraction(x - x0) / w_, Fraction(y - y0) / h_)
            nodes.append(Node(name, color, pos))
    out = []
    for k, item in enumerate(edges, 1):
        wname, bname = item[0], item[1]
        extra_off = Vec(*item[2]) if len(item) > 2 else Vec(0, 0)
        b, sb = alias[bname]
        w, sw = alias[wname]
        out.append(Edge(f"e{k}", b, w, sw - sb + extra_off))
    m = from_geometry(nodes, out)
    rep = validate(m)
    if not rep.ok:
        raise ValueError(rep.errors)
    return m


def grid_names(prefix, coords):
    return {f"{prefix}{k}": (Fraction(x), Fraction(y)) for k, x, y in coords}


def pairs(text):
    return [tuple(f"{c}{v}" for c, v in zip("WB", p.split("/"))) for p in text.replace("\n", "").split(",")]


def gamma_4b():
    blacks = {"B1": (3, 1), "B2": (1, 5), "B3": (5, 3)}
    whites = {"W1": (5, 1), "W2": (1, 3), "W3": (3, 5)}
    edges = [
        ("W2", "B1"), ("W1", "B1"), ("W1", "B3"), ("W3", "B3"), ("W3", "B2"), ("W2", "B2"), ("W3", "B1"),
        ("W2", "B3", (1, 0)), ("W3", "B1", (0, -1)), ("W1", "B2", (-1, 1)),
    ]
    return build(blacks, whites, edges, (6, 6))


def honeycomb():
    blacks = {"B1": (2, 2)}
    whites = {"W1": (1, 1)}
    edges = [("W1", "B1"), ("W1", "B1", (1, 0)), ("W1", "B1", (0, 1))]
    return build(blacks, whites, edges, (3, 3))


def ex48():
    blacks = {"B1": (0.5, 1.5), "B2": (2.5, 1.5), "B3": (1.5, 3.5), "B4": (3.5, 3.5)}
    whites = {"W1": (1.5, 0.5), "W2": (3.5, 0.5), "W3": (0.5, 2.5), "W4": (2.5, 2.5)}
    blacks = {k: (Fraction(x), Fraction(y)) for k, (x, y) in blacks.items()}
    whites = {k: (Fraction(x), Fraction(y)) for k, (x, y) in whites.items()}
    edges = [
        ("W1", "B1"), ("W3", "B1"), ("W1", "B2"), ("W2", "B2"), ("W3", "B2"), ("W4", "B2"),
        ("W3", "B3"), ("W4", "B3"), ("W4", "B4"),
        ("W1", "B3", (0, 1)), ("W2", "B4", (0, 1)), ("W2", "B1", (-1, 0)), ("W2", "B3", (0, 1)),
        ("W3", "B4", (1, 0)),
    ]
    return build(blacks, whites, edges, (4, 4))


def exA4_left():
    blacks = {"B1": (0, 1), "B2": (3, 2), "B3": (1, 3), "B4": (4, 4)}
    whites = {"W1": (4, 1), "W2": (1, 2), "W3": (3, 3), "W4": (0, 4)}
    edges = [
        ("W2", "B1"), ("W1", "B2"), ("W2", "B2"), ("W3", "B2"), ("W2", "B3"), ("W3", "B3"), ("W4", "B3"),
        ("W3", "B4"),
        ("W2", "B4", (1, 0)), ("W4", "B1", (0, -1)), ("W1", "B1", (-1, 0)), ("W1", "B4", (0, 1)),
        ("W4", "B4", (1, 0)),
    ]
    return build(blacks, whites, edges, (5, 5), origin=(Fraction(-1, 2), 0))


def exA4_right():
    blacks = {"B1": (1, 1), "B2": (Fraction(5, 2), 2), "B3": (4, 4)}
    whites = {"W1": (4, 1), "W2": (1, 2), "W3": (1, 4)}
    edges = [
        ("W2", "B1"), ("W1", "B2"), ("W2", "B2"), ("W1", "B3"), ("W3", "B2"), ("W3", "B3"),
        ("W2", "B3", (1, 0)), ("W3", "B1", (0, -1)), ("W1", "B1", (-1, 0)), ("W1", "B3", (0, 1)),
        ("W3", "B3", (1, 0)),
    ]
    return build(blacks, whites, edges, (5, 5))


def appb_grid():
    blacks = grid_names("B", [(5 * i + j + 1, 2 * i + 1, 2 * j) for i in range(5) for j in range(5)])
    whites = grid_names("W", [(4 * i + j + 1, 2 * i, 2 * j + 1) for i in range(6) for j in range(4)])
    return blacks, whites


GAMMA = """1/1,1/2,2/2,2/3,3/3,3/4,4/4,4/5,5/1,5/2,5/6,5/7,6/2,6/3,6/7,6/8,7/3,7/4,7/8,7/9,8/4,8/5,8/9,8/10,
9/6,9/11,9/12,10/7,10/12,10/13,11/8,11/9,11/13,11/14,12/9,12/10,12/14,12/15,
13/11,13/12,13/16,13/17,14/12,14/13,14/17,14/18,15/13,15/14,15/18,15/19,16/14,16/15,16/19,16/20,
17/16,17/17,17/21,17/22,18/17,18/18,18/22,18/23,19/18,19/19,19/23,19/24,20/19,20/20,20/24,21/21,21/22,22/22,22/23,23/23,23/24,24/24,24/25"""

GAMMA_A = """1/1,2/2,2/3,3/3,3/4,4/4,5/1,5/2,6/2,6/3,7/3,7/4,8/4,8/5,
5/6,6/7,7/8,7/9,8/9,9/6,9/7,10/7,10/8,11/8,11/9,12/9,12/10,
9/11,10/12,11/13,12/14,
13/11,13/12,13/16,13/17,14/12,14/13,14/17,14/18,15/13,15/14,15/18,15/19,16/14,16/15,16/19,16/20,
17/16,17/17,17/21,17/22,18/17,18/18,18/22,18/23,19/18,19/19,19/23,20/19,20/20,20/24,21/21,21/22,22/22,22/23,23/23,23/24,24/24,24/25"""

GAMMA_B = """1/1,1/2,2/2,2/3,3/3,3/4,4/4,5/1,5/2,5/7,6/2,6/3,6/8,7/3,7/4,7/6,7/9,8/4,8/5,8/6,
9/6,9/10,9/11,10/7,10/8,10/12,11/8,11/9,11/13,12/9,12/10,12/14,13/10,13/11,13/15,
14/12,14/13,14/17,14/18,15/13,15/14,15/18,15/19,16/14,16/15,16/19,16/20,17/15,17/16,17/20,17/21,
18/17,18/18,18/22,19/18,19/19,19/23,20/19,20/20,20/24,21/20,21/21,21/25,
22/22,22/23,23/23,23/24,24/24,24/25,25/25,25/26"""

# face labels of the second deformed model, as drawn
GAMMA_B_LABELS = {
    1: (1, 1), 2: (3, Fraction(15, 2)), 3: (4, Fraction(11, 2)), 4: (Fraction(13, 2), Fraction(7, 2)),
    5: (8, 2), 6: (9, 3), 7: (5, 7), 8: (Fraction(13, 2), Fraction(11, 2)), 9: (8, 4), 10: (9, 5),
}


def appb_gamma():
    blacks, whites = appb_grid()
    return build(blacks, whites, pairs(GAMMA), (10, 8))


def appb_gamma_a():
    blacks, whites = appb_grid()
    return build(blacks, whites, pairs(GAMMA_A), (10, 8))


def gamma_b_coords():
    bl = [(1, 1, 0), (2, 1, 2), (3, 1, 4), (4, 1, 6), (5, 1, 8), (6, 3, 6)]
    k = 7
    for x in (5, 7, 9, 11):
        for y in (0, 2, 4, 6, 8):
            bl.append((k, x, y))
            k += 1
    wh = [(j + 1, 0, 2 * j + 1) for j in range(4)] + [(j + 5, 2, 2 * j + 1) for j in range(4)] + [(9, 4, 7)]
    k = 10
    for x in (6, 8, 10, 12):
        for y in (1, 3, 5, 7):
            wh.append((k, x, y))
            k += 1
    return grid_names("B", bl), grid_names("W", wh)


def appb_gamma_b():
    blacks, whites = gamma_b_coords()
    return build(blacks, whites, pairs(GAMMA_B), (12, 8))


def point_in_face(m, f, point, size):
    """Whether the drawn point lies inside the lifted face polygon."""
    pos = {n.id: n.position for n in m.nodes.values()}
    lift = Vec(0, 0)
    pts = []
    for d in f.darts:
        tail = m.tail(d)
        p = pos[tail]
        pts.append((p[0] + lift[0], p[1] + lift[1]))
        lift = lift + m.displacement(d)
    q = (Fraction(point[0]) / size[0], Fraction(point[1]) / size[1])
    for sx in (-1, 0, 1):
        for sy in (-1, 0, 1):
            qq = (q[0] + sx, q[1] + sy)
            if _inside(pts, qq):
                return True
    return False


def _inside(poly, q):
    # even-odd rule, exact
    inside = False
    n = len(poly)
    for i in range(n):
        (x1, y1), (x2, y2) = poly[i], poly[(i + 1) % n]
        if (y1 > q[1]) != (y2 > q[1]):
            x = x1 + (q[1] - y1) * (x2 - x1) / (y2 - y1)
            if x > q[0]:
                inside = not inside
    return inside


def face_labels(m):
    fs = faces(m)
    out = {}
    for label, pt in GAMMA_B_LABELS.items():
        hits = [i for i, f in enumerate(fs) if point_in_face(m, f, pt, (12, 8))]
        if len(hits) != 1:
            raise ValueError(f"label {label} matched faces {hits}")
        out[str(label)] = sorted(d.edge + ("+" if d.forward else "-") for d in fs[hits[0]].darts)
    return out


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)
    fixtures = {
        "gamma_4b": (gamma_4b(), "four-node-pair model with eight perfect matchings"),
        "honeycomb": (honeycomb(), "minimal hexagonal model"),
        "ex48": (ex48(), "isoradial model deformed at zig with weight 1"),
        "exA4_left": (exA4_left(), "model with a quadrangle face and type II zigzag paths"),
        "exA4_right": (exA4_right(), "its mutation at the quadrangle face"),
        "appb_gamma": (appb_gamma(), "large consistent model with a hexagonal PM polygon"),
        "appb_gamma_a": (appb_gamma_a(), "deformed large model, removal schedule A"),
        "appb_gamma_b": (appb_gamma_b(), "deformed large model, removal schedule B"),
    }
    for name, (m, note) in fixtures.items():
        write_dimer(m, DATA / f"{name}.dimer", header=note)
        print(name, len(m.nodes), len(m.edges), validate(m).n_faces)
    labels = face_labels(fixtures["appb_gamma_b"][0])
    (DATA / "appb_gamma_b_faces.json").write_text(json.dumps(labels, indent=1) + "\n")


if __name__ == "__main__":
    main()
