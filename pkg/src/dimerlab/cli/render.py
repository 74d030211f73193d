"""SVG (matplotlib) and TikZ drawings of dimer models and lattice polygons.

Output is deterministic: element ids are derived from edge and node ids,
SVG metadata carries no date, and the SVG hash salt is fixed. Highlighted
edges are drawn as separate elements with ids ``highlight-<edge>``.
"""

from __future__ import annotations

import io
from fractions import Fraction
from pathlib import Path
from typing import Iterable

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.collections import LineCollection  # noqa: E402
from matplotlib.patches import Polygon as PolygonPatch, Rectangle  # noqa: E402

from ..dimer_core import Color, DimerModel, Node, natural_key  # noqa: E402
from ..lattice import LatticePolygon  # noqa: E402

HIGHLIGHT = "#d62728"


def barycentric_layout(m: DimerModel) -> dict[str, tuple[float, float]]:
    """Harmonic placement on the torus: every node sits at the mean of its lifted neighbours.

    The first node (natural order) is pinned; the remaining system is solved
    in the least-squares sense, then reduced modulo 1.
    """
    ids = sorted(m.node_ids(), key=natural_key)
    index = {nid: i for i, nid in enumerate(ids)}
    n = len(ids)
    lap = np.zeros((n, n))
    rhs = np.zeros((n, 2))
    for e in m.edges.values():
        b, w = index[e.black], index[e.white]
        off = np.array([e.offset.x, e.offset.y], dtype=float)
        # p_w + offset - p_b should be small: spring between b and the lift of w
        lap[b, b] += 1
        lap[w, w] += 1
        lap[b, w] -= 1
        lap[w, b] -= 1
        rhs[b] += off
        rhs[w] -= off
    lap[0, :] = 0
    lap[0, 0] = 1
    rhs[0] = 0
    sol, *_ = np.linalg.lstsq(lap, rhs, rcond=None)
    out = {}
    for nid, (x, y) in zip(ids, sol):
        out[nid] = (round(float(x) % 1.0, 6) % 1.0, round(float(y) % 1.0, 6) % 1.0)
    if len(set(out.values())) < n:
        # degenerate harmonic map: spread nodes on a diagonal instead
        out = {nid: ((i + 0.5) / n, ((2 * i + 1) % (2 * n)) / (2 * n)) for i, nid in enumerate(ids)}
    return out


def positions(m: DimerModel) -> dict[str, tuple[float, float]]:
    if all(nd.position is not None for nd in m.nodes.values()):
        return {nid: (float(nd.position[0]), float(nd.position[1])) for nid, nd in m.nodes.items()}
    return barycentric_layout(m)


def _segments(m: DimerModel, pos: dict[str, tuple[float, float]], eid: str) -> list[tuple]:
    """The edge drawn from its black end and, if it leaves the square, once more from its white end."""
    e = m.edge(eid)
    bx, by = pos[e.black]
    wx, wy = pos[e.white]
    ox, oy = e.offset.x, e.offset.y
    segs = [((bx, by), (wx + ox, wy + oy))]
    if (ox, oy) != (0, 0):
        segs.append(((bx - ox, by - oy), (wx, wy)))
    return segs


def _model_figure(m: DimerModel, highlight: Iterable[str] = (), labels: bool = False):
    hl = set(highlight)
    unknown = hl - set(m.edge_ids())
    if unknown:
        raise ValueError(f"unknown edges to highlight: {sorted(unknown, key=natural_key)}")
    pos = positions(m)
    fig, ax = plt.subplots(figsize=(5, 5))
    frame = Rectangle((0, 0), 1, 1, fill=False, linestyle="--", linewidth=0.8, edgecolor="#777777")
    frame.set_gid("fundamental-domain")
    ax.add_patch(frame)
    for eid in sorted(m.edge_ids(), key=natural_key):
        coll = LineCollection(
            _segments(m, pos, eid),
            colors=HIGHLIGHT if eid in hl else "black",
            linewidths=3.0 if eid in hl else 1.2,
            zorder=2 if eid in hl else 1,
        )
        coll.set_gid(f"highlight-{eid}" if eid in hl else f"edge-{eid}")
        coll.set_clip_path(frame)
        ax.add_collection(coll)
    for nid in sorted(m.node_ids(), key=natural_key):
        nd: Node = m.node(nid)
        x, y = pos[nid]
        face = "black" if nd.color is Color.BLACK else "white"
        (pt,) = ax.plot([x], [y], marker="o", markersize=8, markerfacecolor=face,
                        markeredgecolor="black", linestyle="none", zorder=3)
        pt.set_gid(f"node-{nid}")
        if labels:
            ax.annotate(nid, (x, y), textcoords="offset points", xytext=(5, 5), fontsize=7)
    ax.set_xlim(-0.05, 1.05)
    ax.set_ylim(-0.05, 1.05)
    ax.set_aspect("equal")
    ax.axis("off")
    return fig


def _polygon_figure(p: LatticePolygon, title: str | None = None):
    fig, ax = plt.subplots(figsize=(4, 4))
    vs = [(v.x, v.y) for v in p.vertices]
    if len(vs) >= 3:
        patch = PolygonPatch(vs, closed=True, facecolor="#dbe9f6", edgecolor="black", linewidth=1.5)
        patch.set_gid("polygon")
        ax.add_patch(patch)
    for q in sorted(p.lattice_points()):
        (pt,) = ax.plot([q.x], [q.y], marker="o", markersize=5, color="black", linestyle="none")
        pt.set_gid(f"lattice-point-{q.x}_{q.y}")
    for i, v in enumerate(p.vertices):
        (pt,) = ax.plot([v.x], [v.y], marker="s", markersize=7, markerfacecolor="none",
                        markeredgecolor=HIGHLIGHT, linestyle="none")
        pt.set_gid(f"vertex-{i}")
    xs = [v.x for v in p.vertices]
    ys = [v.y for v in p.vertices]
    ax.set_xlim(min(xs) - 1, max(xs) + 1)
    ax.set_ylim(min(ys) - 1, max(ys) + 1)
    ax.set_aspect("equal")
    ax.grid(True, linewidth=0.3)
    if title:
        ax.set_title(title)
    return fig


def _save_svg(fig) -> str:
    buf = io.StringIO()
    with matplotlib.rc_context({"svg.hashsalt": "dimerlab", "svg.fonttype": "none"}):
        fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)
    return buf.getvalue()


def model_svg(m: DimerModel, highlight: Iterable[str] = (), labels: bool = False) -> str:
    return _save_svg(_model_figure(m, highlight, labels))


def polygon_svg(p: LatticePolygon, title: str | None = None) -> str:
    return _save_svg(_polygon_figure(p, title))


def render_svg(obj: DimerModel | LatticePolygon, path: str | Path, highlight: Iterable[str] = (),
               labels: bool = False, title: str | None = None) -> None:
    text = polygon_svg(obj, title) if isinstance(obj, LatticePolygon) else model_svg(obj, highlight, labels)
    Path(path).write_text(text, encoding="utf-8")


def _num(x) -> str:
    x = Fraction(x).limit_denominator(1000) if not isinstance(x, Fraction) else x
    return f"{float(x):.4g}"


def model_tikz(m: DimerModel, highlight: Iterable[str] = (), scale: float = 5.0) -> str:
    hl = set(highlight)
    pos = positions(m)
    lines = [f"\\begin{{tikzpicture}}[scale={scale:g}]",
             "\\draw[dashed, gray] (0,0) rectangle (1,1);",
             "\\clip (0,0) rectangle (1,1);"]
    for eid in sorted(m.edge_ids(), key=natural_key):
        style = "line width=0.08cm, red" if eid in hl else "line width=0.04cm"
        for (x1, y1), (x2, y2) in _segments(m, pos, eid):
            lines.append(f"\\draw[{style}] ({_num(x1)},{_num(y1)})--({_num(x2)},{_num(y2)}); % {eid}")
    for nid in sorted(m.node_ids(), key=natural_key):
        x, y = pos[nid]
        fill = "black" if m.node(nid).color is Color.BLACK else "white"
        lines.append(f"\\filldraw[line width=0.03cm, fill={fill}] ({_num(x)},{_num(y)}) circle [radius=0.02]; % {nid}")
    lines.append("\\end{tikzpicture}")
    return "\n".join(lines) + "\n"


def polygon_tikz(p: LatticePolygon) -> str:
    path = "--".join(f"({v.x},{v.y})" for v in p.vertices)
    lines = ["\\begin{tikzpicture}"]
    if len(p.vertices) >= 3:
        lines.append(f"\\draw[line width=0.05cm] {path}--cycle;")
    for q in sorted(p.lattice_points()):
        lines.append(f"\\filldraw ({q.x},{q.y}) circle [radius=0.08];")
    lines.append("\\end{tikzpicture}")
    return "\n".join(lines) + "\n"
