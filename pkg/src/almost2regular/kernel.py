"""Contraction of degree-2 vertices (the kernel of a configuration model)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numba
import numpy as np

from .components import component_labels
from .degree_seq import DegreeSequence
from .sampler import MultiGraph


@dataclass(frozen=True, eq=False)
class KernelGraph:
    """Kernel multigraph on the vertices of degree != 2.

    ``back_map[i]`` is the original id of kernel vertex ``i``; kernel vertices
    keep the relative order of their original ids.
    """

    graph: MultiGraph
    back_map: np.ndarray
    dropped_cycles: int

    def backmap_text(self) -> str:
        return "".join(f"{i} {int(v)}\n" for i, v in enumerate(self.back_map))


@numba.njit(cache=True)
def _splice_chains(partner, vertex_of, offsets, degrees):
    ell = partner.size
    out = np.full(ell, -1, dtype=np.int64)
    for h in range(ell):
        if degrees[vertex_of[h]] == 2 or out[h] != -1:
            continue
        x = partner[h]
        v = vertex_of[x]
        while degrees[v] == 2:
            # leave v through its other half-edge
            x = partner[2 * offsets[v] + 1 - x]
            v = vertex_of[x]
        out[h] = x
        out[x] = h
    return out


def _relabel(g: MultiGraph, kpartner: np.ndarray) -> tuple[MultiGraph, np.ndarray]:
    seq = g.seq
    keep_v = np.flatnonzero(seq.degrees != 2)
    keep_h = np.flatnonzero(seq.degrees[seq.vertex_of] != 2)
    new_index = np.full(seq.ell, -1, dtype=np.int64)
    new_index[keep_h] = np.arange(keep_h.size)
    kseq = DegreeSequence(seq.degrees[keep_v])
    kg = MultiGraph(kseq, new_index[kpartner[keep_h]])
    return kg, keep_v


def contract(g: MultiGraph) -> KernelGraph:
    """Splice out every degree-2 vertex.

    Each maximal chain of degree-2 vertices hanging off a kernel half-edge is
    walked once, so the cost is O(ell). The result equals removing the
    degree-2 vertices one at a time in any order (see
    :func:`contract_sequential`).
    """
    seq = g.seq
    kpartner = _splice_chains(g.partner, seq.vertex_of, seq.offsets, seq.degrees)
    kg, back = _relabel(g, kpartner)
    return KernelGraph(kg, back, _count_pure_cycles(g))


def _count_pure_cycles(g: MultiGraph) -> int:
    # chains starting at kernel half-edges cover every degree-2 vertex outside
    # pure cycles, so the dropped cycles are the components without a kernel vertex
    seq = g.seq
    ncomp, labels = component_labels(g)
    if ncomp == 0:
        return 0
    has_kernel = np.zeros(ncomp, dtype=bool)
    has_kernel[labels[seq.degrees != 2]] = True
    return int(np.count_nonzero(~has_kernel))


def contract_sequential(g: MultiGraph, order: Iterable[int] | None = None) -> KernelGraph:
    """Reference implementation: remove degree-2 vertices one at a time.

    ``order`` lists the degree-2 vertices in removal order (ascending id by
    default). A vertex carrying a self-loop is dropped; otherwise the two
    half-edges its half-edges were paired with are paired to each other.
    """
    seq = g.seq
    partner = g.partner.copy()
    deg2 = [int(v) for v in np.flatnonzero(seq.degrees == 2)]
    if order is None:
        order = deg2
    order = list(order)
    if sorted(order) != deg2:
        raise ValueError("order must be a permutation of the degree-2 vertices")
    cycles = 0
    for v in order:
        a = int(seq.offsets[v])
        b = a + 1
        pa, pb = int(partner[a]), int(partner[b])
        if pa == b:
            cycles += 1
        else:
            partner[pa], partner[pb] = pb, pa
        partner[a] = partner[b] = -1
    kg, back = _relabel(g, partner)
    return KernelGraph(kg, back, cycles)


def kernel_edge_identity(g: MultiGraph, kernel: KernelGraph | None = None) -> bool:
    """True iff two degree-!=2 vertices share a component in ``g`` exactly
    when they share one in the kernel."""
    kernel = kernel if kernel is not None else contract(g)
    if kernel.back_map.size == 0:
        return True
    _, lab_g = component_labels(g)
    _, lab_k = component_labels(kernel.graph)
    lg = lab_g[kernel.back_map]
    # the two labelings must induce the same partition: a bijection between labels
    pairs = np.unique(np.column_stack([lg, lab_k]), axis=0)
    return len(pairs) == len(np.unique(lg)) == len(np.unique(lab_k))
