"""Command-line entry point.

Exit codes: 0 success, 1 domain error (structured JSON on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections import Counter
from fractions import Fraction

import numpy as np

from . import __version__, theory
from .components import analyze
from .degree_seq import DegreeSequence, build_lower, build_upper, diagnose, parse_degree_spec
from .errors import Almost2Error, ConfigError
from .exploration import explore, explore_lazy, pick_start
from .formats import read_graph, write_dot, write_edges, write_halfedges
from .kernel import contract
from .rng import GENERATOR_NAME, entropy_seed, make_rng, mix_seed
from .sampler import enumerate_matchings, matching_count, sample

OUT_DIR_ENV = "ALMOST2_OUT"


def _add_seq_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("degree sequence")
    g.add_argument("--n2", type=int, default=0, help="number of degree-2 vertices")
    g.add_argument("--deg", action="append", default=[], metavar="DEG:COUNT",
                   help="extra vertices, e.g. 3:30 (repeatable)")
    g.add_argument("--n1", type=int, default=None, help="number of degree-1 vertices")
    g.add_argument("--degrees", metavar="FILE", help="file with one degree per line")


def _seq_from_args(args) -> DegreeSequence:
    if args.degrees:
        return DegreeSequence.from_file(args.degrees)
    higher = parse_degree_spec(args.deg)
    if args.n1 is not None and not higher:
        return build_lower(args.n2, args.n1)
    if args.n1 is None and 1 not in higher:
        return build_upper(args.n2, higher)
    counts = Counter({2: args.n2, **higher})
    if args.n1 is not None:
        counts[1] += args.n1
    return DegreeSequence.from_counts(counts)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _counts_meta(seq: DegreeSequence) -> str:
    return ",".join(f"{k}:{v}" for k, v in seq.counts.items())


def _graph_doc(g, meta: dict) -> dict:
    off = g.seq.offsets
    vo = g.seq.vertex_of
    pairs = [[f"{vo[a]}:{a - off[vo[a]]}", f"{vo[b]}:{b - off[vo[b]]}"] for a, b in g.pairs.tolist()]
    return {**meta, "n": g.n, "pairs": pairs}


def _write_graph(g, fmt: str, meta: dict, resolved: bool, out: str | None) -> None:
    if fmt == "edges":
        text = write_halfedges(g, meta) if resolved else write_edges(g, meta)
    elif fmt == "dot":
        text = write_dot(g)
    elif fmt == "csv":
        text = "u,v\n" + "".join(f"{u},{v}\n" for u, v in g.edges.tolist())
    else:
        text = json.dumps(_graph_doc(g, meta)) + "\n"
    _emit(text, out)


def cmd_sample(args) -> int:
    seq = _seq_from_args(args)
    seed = args.seed if args.seed is not None else entropy_seed()
    g = sample(seq, seed)
    meta = {"version": __version__, "generator": GENERATOR_NAME, "seed": seed,
            "degree_counts": _counts_meta(seq)}
    _write_graph(g, args.format, meta, args.resolved, args.out)
    return 0


def cmd_enumerate(args) -> int:
    seq = _seq_from_args(args)
    total = 0
    cyc = Counter()
    cyclic = 0
    lines = []
    for g in enumerate_matchings(seq):
        total += 1
        rep = analyze(g)
        cyc.update(rep.cycle_hist)
        cyclic += rep.cyclic_vertices
        if args.format == "json":
            lines.append(json.dumps(_graph_doc(g, {})["pairs"]))
        else:
            lines.append(write_halfedges(g).strip().replace("\n", " | "))
    assert total == matching_count(seq.ell)
    summary = {"matchings": total,
               "E[C(n)]": str(Fraction(cyclic, total)),
               **{f"E[C_n({k})]": str(Fraction(c, total)) for k, c in sorted(cyc.items())}}
    if args.format == "json":
        _emit(json.dumps({"version": __version__, "degree_counts": _counts_meta(seq),
                          "matchings": [json.loads(x) for x in lines], "summary": summary}) + "\n",
              args.out)
    else:
        text = "\n".join(lines) + "\n" + "".join(f"# {k}={v}\n" for k, v in summary.items())
        _emit(text, args.out)
    return 0


def _graph_from_args(args):
    if args.graph:
        with open(args.graph) as fh:
            return read_graph(fh.read()), None
    seq = _seq_from_args(args)
    seed = args.seed if args.seed is not None else entropy_seed()
    return sample(seq, seed), seed


def cmd_kernel(args) -> int:
    g, seed = _graph_from_args(args)
    k = contract(g)
    meta = {"version": __version__, "seed": seed, "dropped_cycles": k.dropped_cycles}
    _write_graph(k.graph, args.format, meta, args.resolved, args.out)
    if args.backmap:
        with open(args.backmap, "w") as fh:
            fh.write(k.backmap_text())
    return 0


def cmd_explore(args) -> int:
    seed = args.seed if args.seed is not None else entropy_seed()
    if args.lazy:
        seq = _seq_from_args(args)
        rng = make_rng(seed)
        start = args.start if args.start is not None else pick_start(seq, args.start_degree, rng)
        traces = [explore_lazy(seq, start, mix_seed(seed, i), args.cap) for i in range(args.count)]
    else:
        g, gseed = _graph_from_args(args)
        rng = make_rng(seed)
        start = args.start if args.start is not None else pick_start(g.seq, args.start_degree, rng)
        traces = [explore(g, start, cap=args.cap)]
    _emit("".join(json.dumps({**t.to_dict(), "seed": seed}) + "\n" for t in traces), args.out)
    return 0


def cmd_theory(args) -> int:
    q = args.quantity
    if q == "table":
        grid = np.linspace(args.start, args.stop, args.num)
        rows = ["a,cdf_y2"] + [f"{a!r},{v!r}" for a, v in theory.cdf_table(grid, args.decay)]
        _emit("\n".join(rows) + "\n", args.out)
        return 0
    if q == "lambda":
        val = theory.lambda_intensity(args.t, args.decay)
    elif q == "poisson-mean":
        val = theory.poisson_mean(args.a, args.t, args.decay)
    elif q == "cdf-y2":
        val = theory.cdf_Y2(args.a, args.decay)
    elif q == "lower-prediction":
        val = theory.lower_regime_prediction(args.n, args.n1)
    else:
        seq = _seq_from_args(args)
        if q == "cyclic-vertices":
            val = theory.expected_cyclic_vertices(seq)
        elif q == "cycle-count":
            val = theory.expected_cycle_count(seq, args.k)
        else:
            val = theory.line_survival(seq, args.k)
        if args.float:
            val = float(val)
    _emit(f"{val}\n", args.out)
    return 0


def cmd_experiment(args) -> int:
    from .montecarlo import ExperimentConfig, run

    if args.seed is None:
        raise ConfigError("experiment mode requires --seed")
    with open(args.config) as fh:
        doc = json.load(fh)
    doc["master_seed"] = args.seed
    cfg = ExperimentConfig.from_dict(doc)
    res = run(cfg, workers=args.workers)
    out = args.out or os.environ.get(OUT_DIR_ENV) or "results"
    for path in res.write(out):
        print(path)
    return 0


def cmd_report(args) -> int:
    g, seed = _graph_from_args(args)
    rep = analyze(g)
    d = rep.to_dict()
    if args.format == "json":
        doc = {"version": __version__, "seed": seed, "regime": diagnose(g.seq).regime.value, **d}
        _emit(json.dumps(doc) + "\n", args.out)
    else:
        _emit("key,value\n" + "".join(f"{line.replace('=', ',', 1)}\n" for line in rep.to_kv().splitlines()),
              args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="almost2", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, formats, default):
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", default=None)
        sp.add_argument("--format", choices=formats, default=default)

    sp = sub.add_parser("sample", help="sample CM_n(d)")
    _add_seq_args(sp)
    common(sp, ["edges", "json", "csv", "dot"], "edges")
    sp.add_argument("--resolved", action="store_true", help="edges as u:slot v:slot")
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("enumerate", help="all matchings of a small sequence")
    _add_seq_args(sp)
    common(sp, ["edges", "json"], "edges")
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("kernel", help="contract degree-2 vertices")
    _add_seq_args(sp)
    common(sp, ["edges", "json", "csv", "dot"], "edges")
    sp.add_argument("--graph", help="read the graph from a file instead of sampling")
    sp.add_argument("--resolved", action="store_true")
    sp.add_argument("--backmap", metavar="FILE", help="write 'kernel_id original_id' lines")
    sp.set_defaults(func=cmd_kernel)

    sp = sub.add_parser("explore", help="run the exploration process")
    _add_seq_args(sp)
    common(sp, ["json"], "json")
    sp.add_argument("--graph")
    sp.add_argument("--lazy", action="store_true", help="sample the matching on the fly")
    sp.add_argument("--start", type=int, default=None)
    sp.add_argument("--start-degree", type=int, default=2)
    sp.add_argument("--cap", type=int, default=None)
    sp.add_argument("--count", type=int, default=1, help="lazy traces to emit")
    sp.set_defaults(func=cmd_explore)

    sp = sub.add_parser("theory", help="evaluate closed forms")
    sp.add_argument("quantity", choices=["lambda", "poisson-mean", "cdf-y2", "cyclic-vertices",
                                         "cycle-count", "line-survival", "lower-prediction", "table"])
    _add_seq_args(sp)
    common(sp, ["json", "csv"], "csv")
    sp.add_argument("--a", type=float)
    sp.add_argument("--t", type=float)
    sp.add_argument("--k", type=int)
    sp.add_argument("--n", type=int)
    sp.add_argument("--decay", type=float, default=theory.DEFAULT_DECAY)
    sp.add_argument("--float", action="store_true", help="print rationals as floats")
    sp.add_argument("--start", type=float, default=0.05)
    sp.add_argument("--stop", type=float, default=5.0)
    sp.add_argument("--num", type=int, default=100)
    sp.set_defaults(func=cmd_theory)

    sp = sub.add_parser("experiment", help="run a Monte Carlo experiment from a JSON config")
    common(sp, ["json"], "json")
    sp.add_argument("--config", required=True)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_experiment)

    sp = sub.add_parser("report", help="component report of a graph")
    _add_seq_args(sp)
    common(sp, ["json", "csv"], "json")
    sp.add_argument("--graph")
    sp.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Almost2Error as e:
        sys.stderr.write(json.dumps({"error": e.code, "message": str(e)}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
