"""The ``.dimer`` text format, polygon JSON, and schedule files.

A ``.dimer`` file has three sections::

    [nodes]
    B1 B 1/2 1/6        # id, color, optional position in [0,1)^2
    [edges]
    e1 B1 W2 0 0        # id, black, white, offset dx dy
    [rotation]
    B1: e1 e2 e7        # counterclockwise edge order

``#`` starts a comment. Parsing validates the model.
"""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources
from pathlib import Path

from ..dimer_core import Color, DimerError, DimerModel, Edge, Node, natural_key, validate
from ..lattice import LatticePolygon, Vec


class FormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def parse_dimer_text(text: str, check: bool = True) -> DimerModel:
    section = None
    nodes: list[Node] = []
    edges: list[Edge] = []
    rotation: dict[str, list[str]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in ("nodes", "edges", "rotation"):
                raise FormatError(f"unknown section [{section}]", lineno)
            continue
        parts = line.split()
        try:
            if section == "nodes":
                if len(parts) not in (2, 4):
                    raise FormatError("node line needs: id color [x y]", lineno)
                color = Color(parts[1].upper())
                pos = (Fraction(parts[2]), Fraction(parts[3])) if len(parts) == 4 else None
                nodes.append(Node(parts[0], color, pos))
            elif section == "edges":
                if len(parts) != 5:
                    raise FormatError("edge line needs: id black white dx dy", lineno)
                edges.append(Edge(parts[0], parts[1], parts[2], Vec(int(parts[3]), int(parts[4]))))
            elif section == "rotation":
                if ":" not in line:
                    raise FormatError("rotation line needs 'node: edges'", lineno)
                nid, rest = line.split(":", 1)
                nid = nid.strip()
                if nid in rotation:
                    raise FormatError(f"rotation for {nid} given twice", lineno)
                rotation[nid] = rest.split()
            else:
                raise FormatError("content before any section header", lineno)
        except ValueError as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(str(exc), lineno) from exc
    try:
        m = DimerModel(nodes, edges, rotation)
    except DimerError as exc:
        raise FormatError(str(exc)) from exc
    if check:
        rep = validate(m)
        if not rep.ok:
            raise FormatError("validation failed: " + "; ".join(rep.errors))
    return m


def parse_dimer(path: str | Path, check: bool = True) -> DimerModel:
    return parse_dimer_text(Path(path).read_text(encoding="utf-8"), check)


def _frac(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def dimer_to_text(m: DimerModel, header: str | None = None) -> str:
    lines = []
    if header:
        lines += [f"# {h}" for h in header.splitlines()]
    lines.append("[nodes]")
    for nid in sorted(m.node_ids(), key=natural_key):
        n = m.node(nid)
        pos = f" {_frac(n.position[0])} {_frac(n.position[1])}" if n.position is not None else ""
        lines.append(f"{nid} {n.color.value}{pos}")
    lines.append("[edges]")
    for eid in sorted(m.edge_ids(), key=natural_key):
        e = m.edge(eid)
        lines.append(f"{eid} {e.black} {e.white} {e.offset.x} {e.offset.y}")
    lines.append("[rotation]")
    for nid in sorted(m.node_ids(), key=natural_key):
        lst = list(m.rotation[nid])
        if lst:
            i = lst.index(min(lst, key=natural_key))
            lst = lst[i:] + lst[:i]
        lines.append(f"{nid}: {' '.join(lst)}")
    return "\n".join(lines) + "\n"


def write_dimer(m: DimerModel, path: str | Path, header: str | None = None) -> None:
    Path(path).write_text(dimer_to_text(m, header), encoding="utf-8")


def fixture_path(name: str) -> Path:
    """Path of a shipped data file (``.dimer`` is appended when missing)."""
    base = resources.files("dimerlab") / "data"
    p = Path(str(base / name))
    if not p.exists() and not name.endswith((".dimer", ".json", ".txt")):
        p = Path(str(base / f"{name}.dimer"))
    if not p.exists():
        raise FileNotFoundError(f"no shipped fixture named {name}")
    return p


def load_fixture(name: str) -> DimerModel:
    return parse_dimer(fixture_path(name))


def read_polygon(path: str | Path) -> LatticePolygon:
    return LatticePolygon.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def parse_pairs_text(text: str) -> list[tuple[tuple[str, str], tuple[str, str]]]:
    """Removal schedule: one step per line, ``W5 B7 ; W11 B33``."""
    steps = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        halves = [h.split() for h in line.split(";")]
        if len(halves) != 2 or any(len(h) != 2 for h in halves):
            raise FormatError("schedule line needs 'node node ; node node'", lineno)
        steps.append((tuple(halves[0]), tuple(halves[1])))
    return steps


def read_schedule(path: str | Path) -> list[tuple[tuple[str, str], tuple[str, str]]]:
    return parse_pairs_text(Path(path).read_text(encoding="utf-8"))
