"""Replicated experiments over degree-sequence families.

Replicate ``i`` at grid point ``g`` samples with ``mix_seed(master_seed, i, g)``
so results do not depend on worker count or scheduling. Graphs are reduced to
a flat record of statistics right away and then dropped.

Config document (JSON)::

    {
      "family": {"regime": "upper", "n": [200000], "higher": {"3": 50}},
      "replicates": 2000,
      "master_seed": 1,
      "statistics": ["deficiency", "second_rescaled", "s_process"],
      "windows": [[0.2, 2.0]],
      "factorial_orders": [1, 2],
      "references": [{"statistic": "second_rescaled", "decay": 2.0}]
    }

For the lower regime the family reads ``{"regime": "lower", "n": [...], "n1": 1000}``.
A count may also be a rule ``{"coef": c, "power": p}`` meaning ``round(c * n**p)``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import __version__
from .components import analyze, deficiency, s_process
from .degree_seq import DegreeSequence, build_lower, build_upper
from .errors import ConfigError, EmptySample
from .rng import GENERATOR_NAME, SEED_MIX_NAME, mix_seed
from .sampler import sample
from .theory import DEFAULT_DECAY, cdf_Y2_or_zero

KNOWN_STATISTICS = (
    "deficiency",
    "second_rescaled",
    "largest_log_rescaled",
    "cyclic_vertices",
    "non2_outside_giant",
    "largest_cycle",
    "top_sizes",
    "s_process",
    "line_quantiles",
)


def _resolve_count(rule, n: int) -> int:
    if isinstance(rule, dict):
        return int(round(float(rule.get("coef", 1.0)) * n ** float(rule["power"])))
    return int(rule)


@dataclass(frozen=True)
class ExperimentConfig:
    family: dict
    replicates: int
    master_seed: int
    statistics: tuple[str, ...] = ("deficiency",)
    windows: tuple[tuple[float, float], ...] = ()
    factorial_orders: tuple[int, ...] = (1, 2)
    top_k: int = 5
    line_quantiles: tuple[float, ...] = (0.5, 0.9)
    references: tuple[dict, ...] = ()

    def __post_init__(self):
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")
        if not self.family.get("n"):
            raise ConfigError("family.n must be a nonempty list")
        if self.family.get("regime") not in ("upper", "lower"):
            raise ConfigError("family.regime must be 'upper' or 'lower'")
        for s in self.statistics:
            if s not in KNOWN_STATISTICS:
                raise ConfigError(f"unknown statistic {s!r}")
        if "s_process" in self.statistics and not self.windows:
            raise ConfigError("s_process needs at least one window")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {"family", "replicates", "master_seed", "statistics", "windows",
                 "factorial_orders", "top_k", "line_quantiles", "references"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        try:
            return cls(
                family=dict(d["family"]),
                replicates=int(d["replicates"]),
                master_seed=int(d["master_seed"]),
                statistics=tuple(d.get("statistics", ("deficiency",))),
                windows=tuple((float(a), float(t)) for a, t in d.get("windows", ())),
                factorial_orders=tuple(int(h) for h in d.get("factorial_orders", (1, 2))),
                top_k=int(d.get("top_k", 5)),
                line_quantiles=tuple(float(q) for q in d.get("line_quantiles", (0.5, 0.9))),
                references=tuple(dict(r) for r in d.get("references", ())),
            )
        except KeyError as e:
            raise ConfigError(f"missing config key {e}") from None

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "replicates": self.replicates,
            "master_seed": self.master_seed,
            "statistics": list(self.statistics),
            "windows": [list(w) for w in self.windows],
            "factorial_orders": list(self.factorial_orders),
            "top_k": self.top_k,
            "line_quantiles": list(self.line_quantiles),
            "references": [dict(r) for r in self.references],
        }

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def grid(self) -> list[DegreeSequence]:
        fam = self.family
        out = []
        for n in fam["n"]:
            n = int(n)
            if fam["regime"] == "upper":
                higher = {int(k): _resolve_count(v, n) for k, v in fam.get("higher", {}).items()}
                out.append(build_upper(n - sum(higher.values()), higher))
            else:
                n1 = _resolve_count(fam["n1"], n)
                out.append(build_lower(n - n1, n1))
        return out


def window_label(a: float, t: float) -> str:
    return f"S[{a:g},{t:g}]"


def replicate_stats(seq: DegreeSequence, seed: int, cfg: ExperimentConfig) -> dict:
    """Sample one graph and reduce it to the configured statistics."""
    report = analyze(sample(seq, seed))
    n, lne2 = seq.n, seq.ell_ne2
    rec: dict = {}
    for s in cfg.statistics:
        if s == "deficiency":
            rec[s] = deficiency(report)
        elif s == "second_rescaled":
            rec[s] = report.size_at(2) * lne2 / n
        elif s == "largest_log_rescaled":
            rec[s] = report.largest * lne2 / (n * math.log(lne2)) if lne2 > 1 else float("nan")
        elif s == "cyclic_vertices":
            rec[s] = report.cyclic_vertices
        elif s == "non2_outside_giant":
            rec[s] = report.non2_outside_giant
        elif s == "largest_cycle":
            rec[s] = report.largest_cycle
        elif s == "top_sizes":
            for j in range(1, cfg.top_k + 1):
                rec[f"size_{j}"] = report.size_at(j)
        elif s == "s_process":
            for a, t in cfg.windows:
                rec[window_label(a, t)] = s_process(report, seq, a, t)
        elif s == "line_quantiles":
            ls = np.asarray(report.line_sizes_desc, dtype=float)
            for q in cfg.line_quantiles:
                rec[f"line_q{q:g}"] = float(np.quantile(ls, q)) if ls.size else 0.0
    return rec


# --- reducers ---------------------------------------------------------------

def ks_distance(sample: Sequence[float], cdf: Callable[[float], float]) -> float:
    """sup_x |F_emp(x) - F(x)|, checking both one-sided limits at every sample point.

    The left limit of ``cdf`` is taken at the next float below each point, so
    step-function references (an empirical CDF, say) are handled exactly.
    """
    x = np.sort(np.asarray(sample, dtype=float))
    m = x.size
    if m == 0:
        raise EmptySample("KS distance of an empty sample")
    f_at = np.array([cdf(v) for v in x], dtype=float)
    f_left = np.array([cdf(v) for v in np.nextafter(x, -np.inf)], dtype=float)
    # at ties use the block's top rank for the right limit and bottom rank for the left
    hi = np.searchsorted(x, x, side="right") / m
    lo = np.searchsorted(x, x, side="left") / m
    return float(max(np.max(np.abs(hi - f_at)), np.max(np.abs(f_left - lo))))


def _ks_leave_one_out(x: np.ndarray, f_at: np.ndarray, f_left: np.ndarray) -> np.ndarray:
    m = x.size
    out = np.empty(m)
    idx = np.arange(m)
    for i in range(m):
        keep = idx != i
        xs, fa, fl = x[keep], f_at[keep], f_left[keep]
        hi = np.searchsorted(xs, xs, side="right") / (m - 1)
        lo = np.searchsorted(xs, xs, side="left") / (m - 1)
        out[i] = max(np.max(np.abs(hi - fa)), np.max(np.abs(fl - lo)))
    return out


def jackknife_se(loo: np.ndarray) -> float:
    m = loo.size
    if m < 2:
        return float("nan")
    return float(math.sqrt((m - 1) / m * np.sum((loo - loo.mean()) ** 2)))


def falling(x: np.ndarray, h: int) -> np.ndarray:
    out = np.ones_like(x, dtype=float)
    for j in range(h):
        out *= x - j
    return out


def factorial_moment(sample: Iterable[int], h: int) -> float:
    """Sample mean of x (x-1) ... (x-h+1)."""
    if h < 1:
        raise ValueError("order must be >= 1")
    x = np.asarray(list(sample), dtype=float)
    if x.size == 0:
        raise EmptySample("factorial moment of an empty sample")
    return float(falling(x, h).mean())


def mean_with_jackknife(values: np.ndarray) -> tuple[float, float]:
    """Mean and its jackknife standard error (leave-one-out means)."""
    m = values.size
    total = values.sum()
    if m < 2:
        return float(total / max(m, 1)), float("nan")
    loo = (total - values) / (m - 1)
    return float(total / m), jackknife_se(loo)


def summarize(values: np.ndarray) -> dict:
    m = values.size
    mean = float(values.mean())
    se = float(values.std(ddof=1) / math.sqrt(m)) if m > 1 else float("nan")
    return {"mean": mean, "se": se, "count": m}


@dataclass
class PointResult:
    index: int
    params: dict
    records: list[dict]
    aggregates: dict = field(default_factory=dict)
    ecdf: dict = field(default_factory=dict)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    points: list[PointResult]
    metadata: dict
    timing: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "metadata": self.metadata,
            "config": self.config.to_dict(),
            "points": [
                {"index": p.index, "params": p.params, "aggregates": p.aggregates,
                 "replicates": len(p.records)}
                for p in self.points
            ],
        }

    def records_csv(self) -> str:
        buf = io.StringIO()
        cols: list[str] = []
        for p in self.points:
            for r in p.records:
                for k in r:
                    if k not in cols:
                        cols.append(k)
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["grid", *cols])
        for p in self.points:
            for r in p.records:
                w.writerow([p.index, *(r.get(c, "") for c in cols)])
        return buf.getvalue()

    def cdf_overlays(self) -> dict[str, str]:
        """Plot data per (grid point, reference): columns a, empirical, theoretical."""
        out = {}
        for p in self.points:
            for name, ref in p.ecdf.items():
                buf = io.StringIO()
                w = csv.writer(buf, lineterminator="\n")
                w.writerow(["a", "empirical", "theoretical"])
                xs = ref["sample"]
                m = len(xs)
                for i, x in enumerate(xs, 1):
                    w.writerow([repr(float(x)), repr(i / m), repr(cdf_Y2_or_zero(x, ref["decay"]))])
                out[f"cdf_{p.index}_{name}.csv"] = buf.getvalue()
        return out

    def write(self, out_dir: str | Path) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = []
        files = {
            "result.json": json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n",
            "records.csv": self.records_csv(),
            **self.cdf_overlays(),
        }
        for name, text in files.items():
            (out / name).write_text(text)
            written.append(out / name)
        (out / "timing.json").write_text(json.dumps(self.timing, indent=2, sort_keys=True) + "\n")
        written.append(out / "timing.json")
        return written


def aggregate(point: PointResult, cfg: ExperimentConfig, seq: DegreeSequence) -> None:
    """Fill ``point.aggregates`` and ``point.ecdf`` from ``point.records``, in replicate order."""
    recs = sorted(point.records, key=lambda r: r["replicate"])
    point.records = recs
    agg: dict = {}
    if not recs:
        point.aggregates, point.ecdf = agg, {}
        return
    cols = [k for k in recs[0] if k not in ("replicate", "seed")]
    for c in cols:
        vals = np.array([r[c] for r in recs], dtype=float)
        agg[c] = summarize(vals)
        if c.startswith("S["):
            fm = {}
            for h in cfg.factorial_orders:
                mean, se = mean_with_jackknife(falling(vals, h))
                fm[str(h)] = {"estimate": mean, "jackknife_se": se}
            agg[c]["factorial_moments"] = fm
            pz, pz_se = mean_with_jackknife((vals == 0).astype(float))
            agg[c]["p_zero"] = {"estimate": pz, "jackknife_se": pz_se}
    ecdf = {}
    for ref in cfg.references:
        stat = ref["statistic"]
        decay = float(ref.get("decay", DEFAULT_DECAY))
        x = np.sort(np.array([r[stat] for r in recs], dtype=float))
        cdf = lambda a, c=decay: cdf_Y2_or_zero(a, c)
        f_at = np.array([cdf(v) for v in x])
        f_left = np.array([cdf(v) for v in np.nextafter(x, -np.inf)])
        d = ks_distance(x, cdf)
        se = jackknife_se(_ks_leave_one_out(x, f_at, f_left)) if x.size > 1 else float("nan")
        name = f"{stat}_decay{decay:g}"
        agg[f"ks_{name}"] = {"distance": d, "jackknife_se": se, "count": int(x.size)}
        ecdf[name] = {"statistic": stat, "decay": decay, "sample": x.tolist()}
    point.aggregates = agg
    point.ecdf = ecdf


def _point_params(seq: DegreeSequence) -> dict:
    return {"n": seq.n, "n2": seq.n2, "ell": seq.ell, "ell_ne2": seq.ell_ne2,
            "counts": {str(k): v for k, v in seq.counts.items()}}


def _work(args) -> list[dict]:
    cfg_dict, grid_index, indices = args
    cfg = ExperimentConfig.from_dict(cfg_dict)
    seq = cfg.grid()[grid_index]
    out = []
    for i in indices:
        seed = mix_seed(cfg.master_seed, i, grid_index)
        out.append({"replicate": i, "seed": seed, **replicate_stats(seq, seed, cfg)})
    return out


def _chunks(indices: Sequence[int], size: int) -> list[list[int]]:
    return [list(indices[i:i + size]) for i in range(0, len(indices), size)]


def run(config: ExperimentConfig, workers: int = 1, indices: Sequence[int] | None = None,
        progress: Callable[[int, int], None] | None = None) -> ExperimentResult:
    """Run every replicate of every grid point.

    ``indices`` restricts the replicate range (for split runs combined with
    :func:`merge`). ``workers > 1`` uses a process pool; the fold over
    replicates is always in index order, so results are identical.
    """
    import time

    t0 = time.perf_counter()
    grid = config.grid()
    indices = list(range(config.replicates)) if indices is None else list(indices)
    cfg_dict = config.to_dict()
    points = []
    for g, seq in enumerate(grid):
        tasks = [(cfg_dict, g, ch) for ch in _chunks(indices, max(1, len(indices) // (8 * workers) or 1))]
        recs: list[dict] = []
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as ex:
                for part in ex.map(_work, tasks):
                    recs.extend(part)
                    if progress:
                        progress(len(recs), len(indices))
        else:
            for task in tasks:
                recs.extend(_work(task))
                if progress:
                    progress(len(recs), len(indices))
        pt = PointResult(g, _point_params(seq), recs)
        aggregate(pt, config, seq)
        points.append(pt)
    meta = {
        "version": __version__,
        "generator": GENERATOR_NAME,
        "seed_mixing": SEED_MIX_NAME,
        "config_hash": config.config_hash(),
        "master_seed": config.master_seed,
    }
    return ExperimentResult(config, points, meta,
                            timing={"wall_seconds": time.perf_counter() - t0, "workers": workers})


def merge(*results: ExperimentResult) -> ExperimentResult:
    """Combine runs of one config over disjoint replicate ranges."""
    if not results:
        raise EmptySample("nothing to merge")
    cfg = results[0].config
    for r in results[1:]:
        if r.config.config_hash() != cfg.config_hash():
            raise ConfigError("cannot merge results of different configs")
    grid = cfg.grid()
    points = []
    for g, seq in enumerate(grid):
        recs = [rec for r in results for rec in r.points[g].records]
        seen = [rec["replicate"] for rec in recs]
        if len(set(seen)) != len(seen):
            raise ConfigError("replicate ranges overlap")
        pt = PointResult(g, _point_params(seq), recs)
        aggregate(pt, cfg, seq)
        points.append(pt)
    meta = dict(results[0].metadata)
    timing = {"wall_seconds": sum(r.timing.get("wall_seconds", 0.0) for r in results)}
    return ExperimentResult(cfg, points, meta, timing)
