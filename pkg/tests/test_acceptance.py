"""Acceptance criteria, each at its stated tolerance.

Every criterion appends one PASS/FAIL line to the "acceptance criteria"
section of the pytest terminal summary. Lines tagged ``supplementary`` are
extra diagnostics, not criteria. Run directly with ``python3 tests/test_acceptance.py``.
"""

import math
import sys
import time
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import chi2_contingency, chisquare

from almost2regular import montecarlo as mc
from almost2regular import theory
from almost2regular.components import analyze, s_window
from almost2regular.degree_seq import build_lower, build_upper
from almost2regular.exploration import explore_lazy, vertices_of_degree
from almost2regular.kernel import contract
from almost2regular.rng import mix_seed
from almost2regular.sampler import enumerate_matchings, sample

MASTER_SEED = 20261016
P_MIN = 1e-3


def verdict(log, label, checks, elapsed=None):
    """Record one line for ``checks`` = [(name, ok, description), ...] and assert."""
    ok = all(good for _, good, _ in checks)
    timing = f" ({elapsed:.1f}s)" if elapsed is not None else ""
    body = "; ".join(f"{name}: {desc}{'' if good else ' <-- fails'}" for name, good, desc in checks)
    line = f"{'PASS' if ok else 'FAIL'}  {label}{timing}  {body}"
    log.append(line)
    print(line)
    assert ok, line


def within(est, se, target, k=3.0):
    return abs(est - target) <= k * se


# --- 1. sampler uniformity ---------------------------------------------------

def test_criterion_1_sampler_uniformity(acceptance_log):
    sample(build_upper(1, {}), 0)  # load the compiled pairing loop outside the timer
    t0 = time.perf_counter()
    seqs = {"upper(2,{})": build_upper(2, {}), "lower(2,2)": build_lower(2, 2),
            "upper(3,{})": build_upper(3, {}), "lower(3,2)": build_lower(3, 2)}
    reps = 100_000
    checks = []
    for gi, (name, seq) in enumerate(seqs.items()):
        support = [g.key() for g in enumerate_matchings(seq)]
        counts = Counter(sample(seq, (gi << 32) | i).key() for i in range(reps))
        allowed = set(support)
        stray = sum(c for k, c in counts.items() if k not in allowed)
        p = chisquare([counts[k] for k in support]).pvalue
        checks.append((name, stray == 0 and p > P_MIN, f"{len(support)} matchings, p={p:.3g}"))
    elapsed = time.perf_counter() - t0
    checks.append(("runtime", elapsed < 10, f"{elapsed:.1f}s < 10s"))
    verdict(acceptance_log, "criterion 1 sampler uniformity", checks, elapsed)


# --- 2. kernel law -------------------------------------------------------------

def test_criterion_2_kernel_law(acceptance_log):
    t0 = time.perf_counter()
    seq = build_upper(3, {3: 2})
    kseq = build_upper(0, {3: 2})
    reps = 100_000
    support = [g.key() for g in enumerate_matchings(kseq)]
    via_kernel = Counter()
    for i in range(reps):
        k = contract(sample(seq, mix_seed(MASTER_SEED, i, 0)))
        assert k.graph.seq == kseq
        via_kernel[k.graph.key()] += 1
    direct = Counter(sample(kseq, mix_seed(MASTER_SEED, i, 1)).key() for i in range(reps))
    assert set(via_kernel) <= set(support) and set(direct) <= set(support)
    table = np.array([[via_kernel[k] for k in support], [direct[k] for k in support]])
    p_two = chi2_contingency(table).pvalue
    p_uniform = chisquare(table[0]).pvalue
    elapsed = time.perf_counter() - t0
    verdict(acceptance_log, "criterion 2 kernel law", [
        ("contract vs direct CM on d'", p_two > P_MIN, f"15 outcomes, p={p_two:.3g}"),
        ("contract vs uniform", p_uniform > P_MIN, f"p={p_uniform:.3g}"),
        ("runtime", elapsed < 30, f"{elapsed:.1f}s < 30s"),
    ], elapsed)


# --- 3. exact expectations vs enumeration --------------------------------------

def exact_corpus():
    for n2 in range(2, 7):
        yield f"pure n2={n2}", build_upper(n2, {})
    for n2 in range(1, 6):
        yield f"lower n1=2 n2={n2}", build_lower(n2, 2)
    for n2 in range(0, 5):
        yield f"upper deg4 n2={n2}", build_upper(n2, {4: 1})


def test_criterion_3_exact_expectations(acceptance_log):
    t0 = time.perf_counter()
    checks = []
    for name, seq in exact_corpus():
        assert seq.ell <= 12
        hist = Counter()
        cyclic = total = 0
        for g in enumerate_matchings(seq):
            rep = analyze(g)
            hist.update(rep.cycle_hist)
            cyclic += rep.cyclic_vertices
            total += 1
        ok = Fraction(cyclic, total) == theory.expected_cyclic_vertices(seq)
        for k in range(1, seq.n2 + 1):
            ok &= Fraction(hist[k], total) == theory.expected_cycle_count(seq, k)
        checks.append((name, ok, f"{total} matchings"))
    elapsed = time.perf_counter() - t0
    checks.append(("runtime", elapsed < 60, f"{elapsed:.1f}s < 60s"))
    verdict(acceptance_log, "criterion 3 exact expectations", checks, elapsed)


# --- 4 and 5. upper regime, n = 2e5, fifty degree-3 vertices -----------------

WINDOW = (0.2, 2.0)


@pytest.fixture(scope="module")
def upper_run():
    cfg = mc.ExperimentConfig.from_dict({
        "family": {"regime": "upper", "n": [200_000], "higher": {"3": 50}},
        "replicates": 2000,
        "master_seed": MASTER_SEED,
        "statistics": ["second_rescaled", "deficiency", "non2_outside_giant", "s_process"],
        "windows": [list(WINDOW)],
        "factorial_orders": [1, 2],
        "references": [{"statistic": "second_rescaled", "decay": theory.DEFAULT_DECAY},
                       {"statistic": "second_rescaled", "decay": theory.FIRST_MOMENT_DECAY}],
    })
    t0 = time.perf_counter()
    res = mc.run(cfg)
    return res, cfg.grid()[0], time.perf_counter() - t0


@pytest.mark.slow
def test_criterion_4_second_component_law(upper_run, acceptance_log):
    res, seq, elapsed = upper_run
    (pt,) = res.points
    assert seq.n2 == 199_950 and seq.ell_ne2 == 150
    ks = pt.aggregates[f"ks_second_rescaled_decay{theory.DEFAULT_DECAY:g}"]
    dfc = pt.aggregates["deficiency"]
    target = float(theory.expected_cyclic_vertices(seq))
    flagged = np.mean([r["non2_outside_giant"] > 0 for r in pt.records])
    verdict(acceptance_log, "criterion 4 second component vs cdf_Y2", [
        ("KS", ks["distance"] <= 0.05, f"D={ks['distance']:.4f} (jackknife se {ks['jackknife_se']:.4f}) <= 0.05"),
        ("mean deficiency", within(dfc["mean"], dfc["se"], target),
         f"{dfc['mean']:.1f} +- {dfc['se']:.1f} vs n2/(l+1)={target:.1f}"),
        ("non-2 outside giant", flagged <= 0.02, f"fraction {flagged:.4f} <= 0.02"),
    ], elapsed)


@pytest.mark.slow
def test_criterion_5_poisson_window(upper_run, acceptance_log):
    res, seq, elapsed = upper_run
    agg = res.points[0].aggregates[mc.window_label(*WINDOW)]
    mu = theory.poisson_mean(*WINDOW)
    checks = []
    for h in (1, 2):
        fm = agg["factorial_moments"][str(h)]
        checks.append((f"h={h}", within(fm["estimate"], fm["jackknife_se"], mu ** h),
                       f"{fm['estimate']:.4f} +- {fm['jackknife_se']:.4f} vs mu^{h}={mu ** h:.4f}"))
    pz = agg["p_zero"]
    checks.append(("P(S=0)", within(pz["estimate"], pz["jackknife_se"], math.exp(-mu)),
                   f"{pz['estimate']:.4f} +- {pz['jackknife_se']:.4f} vs exp(-mu)={math.exp(-mu):.4f}"))
    verdict(acceptance_log, "criterion 5 Poisson window moments", checks, elapsed)


@pytest.mark.slow
def test_supplementary_upper_regime_first_moment_decay(upper_run, acceptance_log):
    """Same sample against the intensity whose rate matches the exact finite-n moments."""
    res, seq, _ = upper_run
    pt = res.points[0]
    c = theory.FIRST_MOMENT_DECAY
    ks = pt.aggregates[f"ks_second_rescaled_decay{c:g}"]
    agg = pt.aggregates[mc.window_label(*WINDOW)]
    mu = theory.poisson_mean(*WINDOW, decay=c)
    lo, hi = s_window(seq, *WINDOW)
    exact_mean = theory.expected_window_count(seq, lo, hi)
    checks = [("KS", ks["distance"] <= 0.05, f"D={ks['distance']:.4f} <= 0.05")]
    for h in (1, 2):
        fm = agg["factorial_moments"][str(h)]
        checks.append((f"h={h}", within(fm["estimate"], fm["jackknife_se"], mu ** h),
                       f"{fm['estimate']:.4f} +- {fm['jackknife_se']:.4f} vs mu^{h}={mu ** h:.4f}"))
    fm1 = agg["factorial_moments"]["1"]
    checks.append(("exact finite-n mean", within(fm1["estimate"], fm1["jackknife_se"], exact_mean),
                   f"window [{lo},{hi}] expectation {exact_mean:.4f}"))
    pz = agg["p_zero"]
    checks.append(("P(S=0)", within(pz["estimate"], pz["jackknife_se"], math.exp(-mu)),
                   f"{pz['estimate']:.4f} vs {math.exp(-mu):.4f}"))
    verdict(acceptance_log, f"supplementary 4/5 with decay {c:g}", checks)


# --- 6. line survival ------------------------------------------------------------

def test_criterion_6_line_survival(acceptance_log):
    t0 = time.perf_counter()
    n, n1 = 100_000, 100
    seq = build_lower(n - n1, n1)
    start = int(vertices_of_degree(seq, 1)[0])
    reps = 100_000
    ks = (1_000, 10_000)
    cap = max(ks)
    t_ne2 = np.empty(reps, dtype=np.int64)
    for i in range(reps):
        tr = explore_lazy(seq, start, mix_seed(MASTER_SEED, i), cap=cap)
        t_ne2[i] = cap + 1 if tr.t_ne2 is None else tr.t_ne2
    checks = []
    for k in ks:
        p_hat = float(np.mean(t_ne2 > k))
        se = math.sqrt(p_hat * (1 - p_hat) / reps)
        exact = float(theory.line_survival(seq, k))
        checks.append((f"k={k}", within(p_hat, se, exact), f"{p_hat:.5f} +- {se:.5f} vs {exact:.5f}"))
    elapsed = time.perf_counter() - t0
    verdict(acceptance_log, "criterion 6 line survival", checks, elapsed)


# --- 7. lower regime scaling -----------------------------------------------------

@pytest.mark.slow
def test_criterion_7_lower_regime_scaling(acceptance_log):
    t0 = time.perf_counter()
    cfg = mc.ExperimentConfig.from_dict({
        "family": {"regime": "lower", "n": [1_000_000], "n1": 1000},
        "replicates": 200,
        "master_seed": MASTER_SEED,
        "statistics": ["top_sizes", "largest_log_rescaled"],
        "top_k": 5,
    })
    recs = mc.run(cfg).points[0].records
    rescaled = np.array([r["largest_log_rescaled"] for r in recs])
    ratio = np.array([r["size_5"] / r["size_1"] for r in recs])
    med = float(np.median(rescaled))
    frac = float(np.mean(ratio >= 0.5))
    elapsed = time.perf_counter() - t0
    verdict(acceptance_log, "criterion 7 lower regime scaling", [
        ("median |C_max| n1/(n ln n1)", 1.5 <= med <= 2.5, f"{med:.3f} in [1.5, 2.5]"),
        ("|C_5|/|C_max| >= 0.5", frac >= 0.8, f"in {frac:.1%} of replicates (need 80%)"),
    ], elapsed)


# --- 8. numerics -------------------------------------------------------------------

def test_criterion_8_numerics(acceptance_log):
    t0 = time.perf_counter()
    points = (0.01, 0.1, 0.5, 1, 2, 5)
    gap = max(abs(theory.cdf_Y2(a, method="series") - theory.cdf_Y2(a, method="cf")) for a in points)

    rng = np.random.default_rng(MASTER_SEED)
    worst_add = 0.0
    for a, d1, d2 in zip(rng.uniform(0.01, 5, 500), rng.uniform(0, 5, 500), rng.uniform(0, 5, 500)):
        b, c = a + d1, a + d1 + d2
        lhs = theory.poisson_mean(a, c)
        worst_add = max(worst_add, abs(lhs - theory.poisson_mean(a, b) - theory.poisson_mean(b, c)))

    pairs = [(0.01, 0.1), (0.05, 1.0), (0.2, 2.0), (1.0, 2.0), (0.5, 10.0), (3.0, 60.0), (0.1, math.inf)]
    worst_quad = max(abs(theory.poisson_mean_quad(a, t) - theory.poisson_mean(a, t)) for a, t in pairs)
    elapsed = time.perf_counter() - t0
    verdict(acceptance_log, "criterion 8 numerics", [
        ("cdf_Y2 series vs continued fraction", gap <= 1e-9, f"max gap {gap:.2e} <= 1e-9"),
        ("poisson_mean additivity", worst_add <= 1e-9, f"max error {worst_add:.2e} <= 1e-9"),
        ("quadrature vs E1 identity", worst_quad <= 1e-8, f"max gap {worst_quad:.2e} <= 1e-8"),
    ], elapsed)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
