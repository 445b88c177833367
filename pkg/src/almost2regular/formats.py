"""Text formats for multigraphs.

* edge list: ``u v`` per line (vertex ids)
* half-edge list: ``u:slot v:slot`` per line; round-trips the labelled matching
  bit for bit
* DOT, for eyeballing small graphs

Lines starting with ``#`` are metadata comments and are ignored on read.
"""

from __future__ import annotations

import numpy as np

from .degree_seq import DegreeSequence
from .sampler import MultiGraph


def _header(meta: dict | None) -> str:
    if not meta:
        return ""
    return "".join(f"# {k}={v}\n" for k, v in meta.items())


def write_edges(g: MultiGraph, meta: dict | None = None) -> str:
    e = g.edges
    return _header(meta) + "".join(f"{u} {v}\n" for u, v in e.tolist())


def write_halfedges(g: MultiGraph, meta: dict | None = None) -> str:
    off = g.seq.offsets
    vo = g.seq.vertex_of
    lines = []
    for a, b in g.pairs.tolist():
        u, v = vo[a], vo[b]
        lines.append(f"{u}:{a - off[u]} {v}:{b - off[v]}\n")
    return _header(meta) + "".join(lines)


def write_dot(g: MultiGraph, name: str = "G") -> str:
    deg = g.seq.degrees
    out = [f"graph {name} {{"]
    for v in range(g.n):
        shape = "circle" if deg[v] == 2 else "box"
        out.append(f"  {v} [shape={shape}, label=\"{v}\"];")
    for u, v in g.edges.tolist():
        out.append(f"  {u} -- {v};")
    out.append("}")
    return "\n".join(out) + "\n"


def _data_lines(text: str):
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            yield line


def read_halfedges(text: str) -> MultiGraph:
    rows = []
    for line in _data_lines(text):
        a, b = line.split()
        u, su = (int(x) for x in a.split(":"))
        v, sv = (int(x) for x in b.split(":"))
        rows.append((u, su, v, sv))
    n = 1 + max(max(r[0], r[2]) for r in rows) if rows else 0
    deg = np.zeros(n, dtype=np.int64)
    for u, su, v, sv in rows:
        deg[u] = max(deg[u], su + 1)
        deg[v] = max(deg[v], sv + 1)
    seq = DegreeSequence(deg)
    off = seq.offsets
    pairs = [(off[u] + su, off[v] + sv) for u, su, v, sv in rows]
    return MultiGraph.from_pairs(seq, pairs)


def read_edges(text: str, n: int | None = None) -> MultiGraph:
    """Read a plain edge list; slots are assigned in order of appearance."""
    rows = [tuple(int(x) for x in line.split()[:2]) for line in _data_lines(text)]
    if n is None:
        n = 1 + max(max(r) for r in rows) if rows else 0
    deg = np.zeros(n, dtype=np.int64)
    for u, v in rows:
        deg[u] += 1
        deg[v] += 1
    seq = DegreeSequence(deg)
    nxt = seq.offsets[:-1].copy()
    pairs = []
    for u, v in rows:
        a = nxt[u]
        nxt[u] += 1
        b = nxt[v]
        nxt[v] += 1
        pairs.append((int(a), int(b)))
    return MultiGraph.from_pairs(seq, pairs)


def read_graph(text: str) -> MultiGraph:
    """Detect the half-edge or plain edge-list format."""
    for line in _data_lines(text):
        return read_halfedges(text) if ":" in line else read_edges(text)
    return read_edges(text)
