from collections import Counter
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from almost2regular.components import (
    ComponentReport,
    Topology,
    analyze,
    component_labels,
    deficiency,
    s_process,
    s_window,
)
from almost2regular.degree_seq import DegreeSequence, build_lower, build_upper
from almost2regular.errors import NoKernelHalfEdges
from almost2regular.sampler import MultiGraph, enumerate_matchings, sample


def nx_components(g):
    G = nx.MultiGraph()
    G.add_nodes_from(range(g.n))
    G.add_edges_from(g.edges.tolist())
    return sorted((len(c) for c in nx.connected_components(G)), reverse=True)


def test_self_loop():
    g = MultiGraph(build_upper(1, {}), np.array([1, 0]))
    rep = analyze(g)
    assert rep.sizes_desc == (1,)
    assert rep.topo == (Topology.CYCLE,)
    assert rep.cyclic_vertices == 1
    assert rep.cycle_hist == {1: 1}


def test_hand_line():
    # vertices a=0, b=1 (degree 2), c=2, d=3 (degree 1); half-edges a:0,1 b:2,3 c:4 d:5
    seq = build_lower(2, 2)
    g = MultiGraph.from_pairs(seq, [(4, 0), (1, 2), (3, 5)])
    rep = analyze(g)
    assert rep.sizes_desc == (4,)
    assert rep.topo == (Topology.LINE,)
    assert rep.line_sizes_desc == (4,)
    assert rep.cyclic_vertices == 0 and rep.cycle_hist == {}


def test_enumerated_cycle_counts_two_vertices():
    seq = build_upper(2, {})
    hist = Counter()
    graphs = list(enumerate_matchings(seq))
    for g in graphs:
        hist.update(analyze(g).cycle_hist)
    assert Fraction(hist[1], len(graphs)) == Fraction(2, 3)
    assert Fraction(hist[2], len(graphs)) == Fraction(2, 3)


def test_complex_component():
    seq = build_upper(3, {3: 2})
    g = sample(seq, 5)
    rep = analyze(g)
    assert Topology.COMPLEX in rep.topo
    assert rep.non2_outside_giant in (0, 2)


def test_deficiency():
    assert deficiency(ComponentReport(100, (90, 7, 3), (Topology.COMPLEX,) * 3, 0, {}, (), 0, 0)) == 10
    g = sample(build_upper(0, {4: 1}), 0)
    assert deficiency(analyze(g)) == 0


def test_s_process_examples():
    seq = build_upper(200, {4: 1})  # n2 / ell_ne2 = 50
    empty = ComponentReport(201, (201,), (Topology.COMPLEX,), 0, {}, (), 0, 0)
    assert s_process(empty, seq, 0.1, 5.0) == 0
    seq = build_upper(400, {4: 1})  # n2 / ell_ne2 = 100
    rep = ComponentReport(401, (1, 1, 1), (Topology.CYCLE,) * 3, 300, {50: 2, 200: 1}, (), 200, 0)
    assert s_window(seq, 0.4, 1.0) == (40, 100)
    assert s_process(rep, seq, 0.4, 1.0) == 2
    assert s_process(rep, seq, 0.4, 2.0) == 3
    with pytest.raises(NoKernelHalfEdges):
        s_process(rep, build_upper(3, {}), 0.1, 1.0)


def test_window_rounding_is_exact():
    # 0.3 * 100 is 30.000000000000004 in floats; the window must still start at 30
    seq = build_upper(300, {3: 2})  # n2 / ell_ne2 = 50
    assert s_window(seq, 0.6, 1.0) == (30, 50)


def test_serialization_roundtrip():
    rep = analyze(sample(build_upper(300, {3: 4}), 11))
    back = ComponentReport.from_dict(rep.to_dict())
    assert back.to_dict() == rep.to_dict()
    kv = dict(line.split("=", 1) for line in rep.to_kv().splitlines())
    assert set(kv) == set(rep.to_dict())
    assert kv["sizes_desc"] == ",".join(map(str, rep.sizes_desc))


def check_invariants(g, rep):
    seq = g.seq
    assert sum(rep.sizes_desc) == seq.n
    assert list(rep.sizes_desc) == nx_components(g)
    assert rep.cyclic_vertices == sum(k * c for k, c in rep.cycle_hist.items())
    assert rep.cyclic_vertices == sum(s for s, t in zip(rep.sizes_desc, rep.topo) if t is Topology.CYCLE)
    for s, e, t in zip(rep.sizes_desc, rep.edges_desc, rep.topo):
        if t is Topology.CYCLE:
            assert e == s
        elif t is Topology.LINE:
            assert e == s - 1
    if seq.max_degree <= 2:
        assert Topology.COMPLEX not in rep.topo


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 60), st.integers(0, 10), st.integers(0, 4), st.integers(0, 2**32))
def test_partition_and_classification(n2, half_n1, n3, seed):
    counts = {2: n2, 1: 2 * half_n1, 3: 2 * n3}
    seq = DegreeSequence.from_counts({k: v for k, v in counts.items() if v})
    if seq.n == 0:
        return
    g = sample(seq, seed)
    check_invariants(g, analyze(g))


@pytest.mark.parametrize("seed", range(20))
def test_lower_regime_only_cycles_and_lines(seed):
    g = sample(build_lower(500, 20), seed)
    rep = analyze(g)
    check_invariants(g, rep)
    assert rep.topo.count(Topology.LINE) == 10


def test_labels_match_sizes():
    g = sample(build_upper(1000, {3: 6}), 3)
    ncomp, labels = component_labels(g)
    sizes = sorted(np.bincount(labels).tolist(), reverse=True)
    assert sizes == list(analyze(g).sizes_desc)


@pytest.mark.parametrize("seq", [build_upper(2000, {3: 10, 5: 2}), build_lower(3000, 40), build_upper(300, {})])
def test_labels_agree_with_scipy(seq):
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components

    g = sample(seq, 4)
    e = g.edges
    adj = coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(g.n, g.n))
    ref_n, ref = connected_components(adj, directed=False)
    ncomp, labels = component_labels(g)
    assert ncomp == ref_n
    # both number components by first appearance in vertex order
    assert np.array_equal(labels, ref)
