"""Connected components of a sampled multigraph and their topology classes."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numba
import numpy as np

from .degree_seq import DegreeSequence
from .errors import NoKernelHalfEdges, NonPositiveArgument
from .sampler import MultiGraph


class Topology(str, enum.Enum):
    CYCLE = "Cycle"
    LINE = "Line"
    COMPLEX = "Complex"


@dataclass(frozen=True)
class ComponentReport:
    """Component statistics of one multigraph.

    ``sizes_desc[j-1]`` is the j-th largest component and ``topo[j-1]`` its
    class. Ties in size are broken by the smallest vertex id in the component.
    """

    n: int
    sizes_desc: tuple[int, ...]
    topo: tuple[Topology, ...]
    cyclic_vertices: int
    cycle_hist: dict[int, int]
    line_sizes_desc: tuple[int, ...]
    largest_cycle: int
    non2_outside_giant: int
    edges_desc: tuple[int, ...] = field(default=(), repr=False)

    @property
    def largest(self) -> int:
        return self.sizes_desc[0] if self.sizes_desc else 0

    def size_at(self, j: int) -> int:
        """``|C_j|`` (1-based), zero when there are fewer than ``j`` components."""
        return self.sizes_desc[j - 1] if j <= len(self.sizes_desc) else 0

    def to_dict(self) -> dict:
        return {
            "sizes_desc": list(self.sizes_desc),
            "topo": [t.value for t in self.topo],
            "cyclic_vertices": self.cyclic_vertices,
            "cycle_hist": {str(k): v for k, v in sorted(self.cycle_hist.items())},
            "line_sizes_desc": list(self.line_sizes_desc),
            "largest_cycle": self.largest_cycle,
            "non2_outside_giant": self.non2_outside_giant,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def to_kv(self) -> str:
        """Flat ``key=value`` record; sequences are comma-joined, the histogram as ``k:count``."""
        d = self.to_dict()
        lines = []
        for key, val in d.items():
            if isinstance(val, list):
                val = ",".join(str(x) for x in val)
            elif isinstance(val, dict):
                val = ",".join(f"{k}:{v}" for k, v in val.items())
            lines.append(f"{key}={val}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "ComponentReport":
        sizes = tuple(int(x) for x in d["sizes_desc"])
        return cls(
            n=sum(sizes),
            sizes_desc=sizes,
            topo=tuple(Topology(t) for t in d["topo"]),
            cyclic_vertices=int(d["cyclic_vertices"]),
            cycle_hist={int(k): int(v) for k, v in d["cycle_hist"].items()},
            line_sizes_desc=tuple(int(x) for x in d["line_sizes_desc"]),
            largest_cycle=int(d["largest_cycle"]),
            non2_outside_giant=int(d["non2_outside_giant"]),
        )


@numba.njit(cache=True)
def _find(parent, a):
    while parent[a] != a:
        parent[a] = parent[parent[a]]
        a = parent[a]
    return a


@numba.njit(cache=True)
def _label_components(partner, vertex_of, n):
    # union by size with path halving; iterations over pairs are independent,
    # which matters more than asymptotics on a random matching
    parent = np.arange(n)
    size = np.ones(n, dtype=np.int64)
    for h in range(partner.size):
        p = partner[h]
        if p < h:
            continue
        a = _find(parent, vertex_of[h])
        b = _find(parent, vertex_of[p])
        if a == b:
            continue
        if size[a] < size[b]:
            a, b = b, a
        parent[b] = a
        size[a] += size[b]
    labels = np.empty(n, dtype=np.int64)
    root_label = np.full(n, -1, dtype=np.int64)
    ncomp = 0
    for v in range(n):
        r = _find(parent, v)
        if root_label[r] < 0:
            root_label[r] = ncomp
            ncomp += 1
        labels[v] = root_label[r]
    return ncomp, labels


def component_labels(g: MultiGraph) -> tuple[int, np.ndarray]:
    """Number of components and a per-vertex label.

    Labels are numbered in order of each component's smallest vertex.
    """
    if g.n == 0:
        return 0, np.zeros(0, dtype=np.int64)
    seq = g.seq
    ncomp, labels = _label_components(g.partner, seq.vertex_of, seq.n)
    return int(ncomp), labels


def analyze(g: MultiGraph) -> ComponentReport:
    seq = g.seq
    n = g.n
    ncomp, labels = component_labels(g)
    if ncomp == 0:
        return ComponentReport(0, (), (), 0, {}, (), 0, 0)
    deg = seq.degrees
    sizes = np.bincount(labels, minlength=ncomp)
    n_deg1 = np.bincount(labels, weights=(deg == 1), minlength=ncomp).astype(np.int64)
    n_non2 = np.bincount(labels, weights=(deg != 2), minlength=ncomp).astype(np.int64)
    # every half-edge is matched, so a component has half its degree sum as edges
    edge_count = np.bincount(labels, weights=deg, minlength=ncomp).astype(np.int64) // 2

    # labels follow the smallest vertex, so a stable sort on -size breaks ties
    # by smallest vertex id
    order = np.argsort(-sizes, kind="stable")
    is_cycle = (n_non2 == 0) & (edge_count == sizes)
    is_line = (n_deg1 == 2) & (n_non2 == 2) & (edge_count == sizes - 1)
    topo = np.where(is_cycle, 0, np.where(is_line, 1, 2))
    classes = (Topology.CYCLE, Topology.LINE, Topology.COMPLEX)

    cyc_sizes = sizes[is_cycle]
    ks, cnt = np.unique(cyc_sizes, return_counts=True)
    line_sizes = np.sort(sizes[is_line])[::-1]

    giant = order[0]
    non2_out = int(n_non2.sum() - n_non2[giant])

    return ComponentReport(
        n=n,
        sizes_desc=tuple(int(x) for x in sizes[order]),
        topo=tuple(classes[t] for t in topo[order]),
        cyclic_vertices=int(cyc_sizes.sum()),
        cycle_hist={int(k): int(c) for k, c in zip(ks, cnt)},
        line_sizes_desc=tuple(int(x) for x in line_sizes),
        largest_cycle=int(cyc_sizes.max()) if cyc_sizes.size else 0,
        non2_outside_giant=non2_out,
        edges_desc=tuple(int(x) for x in edge_count[order]),
    )


def s_window(seq: DegreeSequence, a: float, t: float) -> tuple[int, int]:
    """Inclusive cycle-size window ``[ceil(a*n2/l), floor(t*n2/l)]`` with ``l = ell_ne2``."""
    if seq.ell_ne2 == 0:
        raise NoKernelHalfEdges("s-process is undefined without half-edges of degree != 2")
    if not 0 < a:
        raise NonPositiveArgument(f"a must be positive, got {a}")
    scale = Fraction(seq.n2, seq.ell_ne2)
    return math.ceil(_decimal(a) * scale), math.floor(_decimal(t) * scale)


def _decimal(x) -> Fraction:
    if isinstance(x, (Fraction, int)):
        return Fraction(x)
    # go through repr so 0.4 means 2/5, not its binary neighbour
    return Fraction(repr(float(x)))


def s_process(report: ComponentReport, seq: DegreeSequence, a: float, t: float) -> int:
    """Number of Cycle components whose size lies in :func:`s_window`."""
    lo, hi = s_window(seq, a, t)
    return sum(c for k, c in report.cycle_hist.items() if lo <= k <= hi)


def deficiency(report: ComponentReport) -> int:
    """``n - |C_max|``."""
    return report.n - report.largest
