"""Acceptance suite: full-size Monte Carlo runs (N=1000, B=10000, seed 0).

Each test records one ``[PASS]``/``[FAIL]`` line, printed in the
"acceptance criteria" section at the end of the pytest run. Experiments are
cached per module, so criteria sharing a configuration share its trials.
"""
import json
import math
import time

import numpy as np
import pytest
from scipy import stats

from bootcover.cli import main as cli_main
from bootcover.distributions import DistributionSpec as D, moment_summary, true_mean
from bootcover.evaluation import coverage_report, half_max_ratios, limit_cdf, run_experiment
from bootcover.io import load_dataset, read_table
from bootcover.resampling import (
    Method,
    bayesian_bootstrap,
    dirichlet_weights_gaps,
    dirichlet_weights_naive,
    percentile_interval,
    standard_bootstrap,
)
from conftest import ACCEPTANCE_LINES

pytestmark = pytest.mark.slow

N, B, SEED = 1000, 10_000, 0
COVS = (0.50, 0.65, 0.80, 0.95)
STD, BAYES = Method.STANDARD, Method.BAYESIAN
TIME_LIMIT = 600.0

# label, spec, standard %, Bayesian %, (sigma_x, sigma_log, skew, ex. kurtosis), half-max
# each moment is (reference value, unit of its last displayed digit) or None for "not defined"
REFERENCE = [
    ("log-uniform k=20", D.log_uniform(20), 44.2, 44.3, ((0.10, 0.01), (5.78, 0.01), (6.2, 0.1), (45.0, 0.1)), 2e4),
    ("log-uniform k=5", D.log_uniform(5), 74.1, 74.5, ((0.19, 0.01), (1.44, 0.01), (2.8, 0.1), (10.4, 0.1)), 2.5),
    ("power-law-unit a=0.9", D.power_law_unit(0.9), 75.7, 76.1, ((0.20, 0.01), (4.34, 0.01), (2.7, 0.1), (9.6, 0.1)), 5.0),
    ("power-law-unit a=0.1", D.power_law_unit(0.1), 92.3, 91.8, ((0.29, 0.01), (0.48, 0.01), (0.1, 0.1), (1.8, 0.1)), 1.0),
    ("pareto a=2.9", D.pareto(2.9), 72.1, 71.4, (None, (0.23, 0.01), None, None), 1.0),
    ("pareto a=2.1", D.pareto(2.1), 26.3, 27.0, (None, (0.40, 0.01), None, None), 1.0),
    ("exponential l=1", D.exponential(1.0), 85.5, 84.5, ((1.0, 0.1), (0.56, 0.01), (2.0, 0.1), (6.0, 0.1)), 1.0),
    ("exponential l=1e-6", D.exponential(1e-6), 86.4, 85.7, ((1e6, 1e5), (0.56, 0.01), (2.0, 0.1), (6.0, 0.1)), 1.0),
    ("normal s=10", D.truncated_normal(30, 10), 89.9, 88.3, ((10.0, 1.0), (0.19, 0.01), (0.0, 0.1), (0.0, 0.1)), 1.0),
    ("normal s=1", D.truncated_normal(30, 1), 89.6, 89.1, ((1.0, 0.1), (0.01, 0.01), (0.0, 0.1), (0.0, 0.1)), 1.0),
]
ROWS = {label: spec for label, spec, *_ in REFERENCE}

_cache = {}
_timings = {}


def experiment(spec, n, coverages=COVS, **kwargs):
    """Records of one full-size experiment, computed once per module."""
    key = (spec.label, n, tuple(coverages), tuple(sorted(kwargs.items())))
    if key not in _cache:
        t0 = time.perf_counter()
        _cache[key] = run_experiment(spec, n, N, B, coverages, SEED, **kwargs)
        _timings[key] = time.perf_counter() - t0
    return _cache[key]


def report(spec, n, coverages=COVS, **kwargs):
    return coverage_report(experiment(spec, n, coverages, **kwargs), true_mean(spec))


def record(criterion, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pct(x):
    return 100.0 * x


# --------------------------------------------------------------------------- 1


def test_c1_reference_coverage():
    parts, ok = [], True
    for label, spec, want_s, want_b, *_ in REFERENCE:
        rep = report(spec, 10, (0.95,))
        got_s, got_b = pct(rep[STD, 0.95].effective_coverage), pct(rep[BAYES, 0.95].effective_coverage)
        good = abs(got_s - want_s) <= 4 and abs(got_b - want_b) <= 4
        ok &= good
        parts.append(f"{label} {got_s:.1f}/{got_b:.1f} (ref {want_s}/{want_b}){'' if good else ' <-'}")
    record("C1 coverage n=10 @95% within 4 points", ok, "; ".join(parts))
    assert ok


# --------------------------------------------------------------------------- 2


def test_c2_reference_moments():
    names = ("sigma_x", "sigma_log10_x", "skewness", "excess_kurtosis")
    bad, checked = [], 0
    for label, spec, _, _, ref, _ in REFERENCE:
        got = moment_summary(spec).as_dict()
        for name, want in zip(names, ref):
            checked += 1
            value = got[name]
            if want is None:
                if value is not None:
                    bad.append(f"{label} {name}={value:.3g} (ref: not defined)")
                continue
            target, unit = want
            if value is None or abs(value - target) > unit * (1 + 1e-9):
                bad.append(f"{label} {name}={value if value is None else round(value, 4)} (ref {target})")
    ok = not bad
    record("C2 moment columns to displayed precision", ok,
           f"{checked - len(bad)}/{checked} cells match" + (f"; mismatches: {'; '.join(bad)}" if bad else ""))
    assert ok


# --------------------------------------------------------------------------- 3


def test_c3_continuous_under_over():
    targets = {"log-uniform k=20": 55, "power-law-unit a=0.9": 23, "exponential l=1": 12}
    parts, ok = [], True
    for label, want in targets.items():
        rep = report(ROWS[label], 10, (0.95,))
        for m in (STD, BAYES):
            under, over = pct(rep[m, 0.95].under_pct), pct(rep[m, 0.95].over_pct)
            good = abs(under - want) <= 4 and over < 3
            ok &= good
            parts.append(f"{label} {m.short} under {under:.1f} (~{want}) over {over:.1f} (<3){'' if good else ' <-'}")
    a = report(ROWS["exponential l=1"], 10, (0.95,))
    b = report(ROWS["exponential l=1e-6"], 10, (0.95,))
    for m in (STD, BAYES):
        diff = abs(pct(a[m, 0.95].effective_coverage) - pct(b[m, 0.95].effective_coverage))
        good = diff < 3
        ok &= good
        parts.append(f"exp rate effect {m.short} {diff:.1f} points (<3){'' if good else ' <-'}")
    record("C3 under/over-estimation n=10 @95%", ok, "; ".join(parts))
    assert ok


# --------------------------------------------------------------------------- 4


def test_c4_rate_constant_datasets():
    targets = {"system_a": 33, "system_b": 34}
    parts, ok = [], True
    for name, want_under in targets.items():
        spec = load_dataset(name)
        rep = report(spec, spec.data.size, (0.95,))
        s, b = rep[STD, 0.95], rep[BAYES, 0.95]
        checks = [
            (f"under std {pct(s.under_pct):.1f}", abs(pct(s.under_pct) - want_under) <= 4),
            (f"under bayes {pct(b.under_pct):.1f}", abs(pct(b.under_pct) - want_under) <= 4),
            (f"over bayes {pct(b.over_pct):.1f} (7+-2.5)", abs(pct(b.over_pct) - 7) <= 2.5),
            (f"over std {pct(s.over_pct):.1f} (<1.5)", pct(s.over_pct) < 1.5),
            (f"effective std {pct(s.effective_coverage):.1f}", abs(pct(s.effective_coverage) - 60) <= 4),
            (f"effective bayes {pct(b.effective_coverage):.1f}", abs(pct(b.effective_coverage) - 60) <= 4),
        ]
        ok &= all(g for _, g in checks)
        parts.append(f"{name} (n={spec.data.size}, under ~{want_under}): "
                     + ", ".join(t + ("" if g else " <-") for t, g in checks))
    record("C4 System A/B coverage @95%", ok, "; ".join(parts))
    assert ok


# --------------------------------------------------------------------------- 5


def test_c5_toy_sample_oracle():
    toy = [0.0, 0.0, 0.0, 0.0, 1.0]
    s = percentile_interval(standard_bootstrap(toy, 100_000, SEED), 0.95)
    b = percentile_interval(bayesian_bootstrap(toy, 100_000, SEED), 0.95)
    lo_ref, up_ref = stats.beta(1, 4).ppf([0.025, 0.975])
    ok = s.lower == 0.0 and abs(b.lower - lo_ref) <= 0.002 and abs(b.upper - up_ref) <= 0.015
    record("C5 toy sample [0,0,0,0,1]", ok,
           f"standard lower {s.lower}; Bayesian region [{b.lower:.5f}, {b.upper:.4f}] "
           f"vs Beta(1,4) [{lo_ref:.5f}, {up_ref:.4f}]")
    assert ok


# --------------------------------------------------------------------------- 6


def test_c6_weight_constructions():
    rng = np.random.default_rng(SEED)
    parts, ok = [], True
    for n in (2, 5, 10, 50):
        w = np.array([dirichlet_weights_gaps(n, rng) for _ in range(10_000)])
        ks = max(stats.kstest(w[:, i], stats.beta(1, n - 1).cdf).statistic for i in range(n))
        ok &= ks < 0.02
        parts.append(f"gaps n={n} max KS {ks:.4f}")
    for n in (2, 3):
        w = np.array([dirichlet_weights_naive(n, rng) for _ in range(10_000)])
        ks = min(stats.kstest(w[:, i], stats.beta(1, n - 1).cdf).statistic for i in range(n))
        ok &= ks >= 0.02
        parts.append(f"naive n={n} min KS {ks:.4f}")
    record("C6 gaps pass / naive fail KS vs Beta(1,n-1) at 0.02", ok, "; ".join(parts))
    assert ok


# --------------------------------------------------------------------------- 7


def test_c7_upper_cdf_anchor():
    spec = ROWS["log-uniform k=20"]
    recs = experiment(spec, 5)
    mu = true_mean(spec)
    parts, ok = [], True
    for m in (STD, BAYES):
        cdf0 = limit_cdf(recs, mu, m, "upper", 0.95).fraction_below(0.0)
        ok &= abs(cdf0 - 0.72) <= 0.04
        parts.append(f"{m.short} {cdf0:.3f}")
    others = ", ".join(
        f"{m.short}@{c:g} {limit_cdf(recs, mu, m, 'upper', c).fraction_below(0.0):.3f}" for c in COVS[:-1] for m in (STD, BAYES)
    )
    record("C7 k=20 n=5 upper-limit CDF at log-ratio 0 @95% (0.72+-0.04)", ok,
           ", ".join(parts) + f" [other coverages: {others}]")
    assert ok


# --------------------------------------------------------------------------- 8


def test_c8_size_trend_and_normal():
    spec = ROWS["log-uniform k=20"]
    small, large = report(spec, 10), report(spec, 1000)
    parts, ok = [], True
    for m in (STD, BAYES):
        for c in COVS:
            u10, u1000 = pct(small[m, c].under_pct), pct(large[m, c].under_pct)
            good = u1000 < u10
            ok &= good
            parts.append(f"k=20 {m.short}@{c:g} under n=10 {u10:.1f} > n=1000 {u1000:.1f}{'' if good else ' <-'}")
    rep = report(ROWS["normal s=1"], 5)
    for m in (STD, BAYES):
        for c in COVS:
            want = pct((1 - c) / 2)
            under, over = pct(rep[m, c].under_pct), pct(rep[m, c].over_pct)
            good = abs(under - want) <= 4 and abs(over - want) <= 4
            ok &= good
            parts.append(f"normal s=1 n=5 {m.short}@{c:g} under {under:.1f} over {over:.1f} "
                         f"(expected {want:.1f}){'' if good else ' <-'}")
    record("C8 under-estimation falls with n; normal n=5 near nominal", ok, "; ".join(parts))
    assert ok


# --------------------------------------------------------------------------- 9


def test_c9_half_max_ratio(tmp_path):
    parts, ok = [], True
    for label in ("exponential l=1", "exponential l=1e-6", "normal s=10", "normal s=1"):
        spec = ROWS[label]
        r = half_max_ratios(experiment(spec, 10, (0.95,)), true_mean(spec), 0.95)
        good = all(v is not None and abs(v - 1.0) <= 0.1 for v in r.values())
        ok &= good
        parts.append(f"{label} log {r['log-ratio']:.3f} value {r['value-ratio']:.3f}{'' if good else ' <-'}")

    spec = ROWS["log-uniform k=20"]
    r = half_max_ratios(experiment(spec, 10, (0.95,)), true_mean(spec), 0.95)
    matching = [d for d, v in r.items() if v is not None and 2e4 / 3 <= v <= 2e4 * 3]
    parts.append(f"k=20 log {r['log-ratio']:.4g} value {r['value-ratio']:.4g} (2e4, factor 3); matching {matching or 'none'}")

    out = tmp_path / "k20"
    code = cli_main(["synthetic", "--family", "log-uniform", "--k", "20", "--n", "10", "--N", str(N), "--B", str(B),
                     "--coverage", "0.95", "--seed", str(SEED), "--out", str(out)])
    summary = json.loads((out / "summary.json").read_text())
    recorded = summary["half_max_definition"]
    value = summary["half_max_ratio"]["95"]
    good = code == 0 and bool(matching) and recorded in matching and value == pytest.approx(r[recorded])
    ok &= good
    parts.append(f"summary.json records {recorded} = {value:.4g}{'' if good else ' <-'}")
    record("C9 half-max CDF ratio", ok, "; ".join(parts))
    assert ok


# --------------------------------------------------------------------------- 10


def test_c10_thread_count_determinism(tmp_path):
    digests = []
    for workers in (1, 8):
        out = tmp_path / f"w{workers}"
        code = cli_main(["synthetic", "--family", "log-uniform", "--k", "20", "--n", "10", "--N", str(N), "--B", str(B),
                         "--seed", str(SEED), "--workers", str(workers), "--out", str(out)])
        assert code == 0
        digests.append((out / "trials.csv").read_bytes())
    rerun = tmp_path / "again"
    cli_main(["synthetic", "--family", "log-uniform", "--k", "20", "--n", "10", "--N", str(N), "--B", str(B),
              "--seed", str(SEED), "--workers", "1", "--out", str(rerun)])
    digests.append((rerun / "trials.csv").read_bytes())
    ok = digests[0] == digests[1] == digests[2]
    rows = len(read_table(tmp_path / "w1" / "trials.csv")[1])
    record("C10 byte-identical trials.csv (1 vs 8 threads, rerun)", ok, f"{rows} trials, {len(digests[0])} bytes each")
    assert ok


# --------------------------------------------------------------------------- 11


def test_c11_variants(tmp_path):
    spec = ROWS["log-uniform k=20"]
    base = report(spec, 5)
    parts, ok = [], True
    for mode in ("max", "scaled-max"):
        out = tmp_path / mode
        code = cli_main(["synthetic", "--family", "log-uniform", "--k", "20", "--n", "5", "--N", str(N), "--B", str(B),
                         "--seed", str(SEED), "--pseudovalue", mode, "--out", str(out)])
        ok &= code == 0 and (out / "coverage.csv").exists()
        rep = report(spec, 5, pseudovalue=mode)
        increased = all(rep[m, c].over_pct > base[m, c].over_pct for m in (STD, BAYES) for c in COVS)
        peak_c = max(COVS, key=lambda c: rep[BAYES, c].over_pct)
        peak = pct(rep[BAYES, peak_c].over_pct)
        in_band = abs(peak - 45) <= 15
        ok &= increased and in_band
        parts.append(f"{mode}: over-estimation above baseline in every cell {increased}; "
                     f"peak Bayesian over {peak:.1f}% @{peak_c:g} (45+-15){'' if in_band else ' <-'}")
    out = tmp_path / "weighted"
    code = cli_main(["synthetic", "--family", "log-uniform", "--k", "20", "--n", "5", "--N", str(N), "--B", str(B),
                     "--seed", str(SEED), "--weighted-bayes", "--out", str(out)])
    header, rows, _ = read_table(out / "coverage.csv")
    has_weighted = code == 0 and any(r[0] == "bayesw" for r in rows)
    ok &= has_weighted
    rep = report(spec, 5, weighted_bayes=True)
    parts.append("weighted: " + ", ".join(f"@{c:g} over {pct(rep[Method.BAYESIAN_WEIGHTED, c].over_pct):.1f}" for c in COVS)
                 + ("" if has_weighted else " <- no report"))
    record("C11 pseudovalue and weighted variants", ok, "; ".join(parts))
    assert ok


# --------------------------------------------------------------------------- extra invariants


def test_upper_limits_similar_between_methods():
    parts, ok = [], True
    for label, spec, *_ in REFERENCE:
        recs = experiment(spec, 10, (0.95,))
        mu = true_mean(spec)
        gap = abs(limit_cdf(recs, mu, STD, "upper").median() - limit_cdf(recs, mu, BAYES, "upper").median())
        ok &= gap < 0.2
        parts.append(f"{label} {gap:.3f}")
    record("Upper-limit medians differ by <0.2 decades", ok, ", ".join(parts))
    assert ok


def test_experiment_runtime():
    # only experiments with n <= 15 fall under the time budget
    small = {k: t for k, t in _timings.items() if k[1] <= 15}
    worst = max(small.values()) if small else math.nan
    ok = bool(small) and worst < TIME_LIMIT
    record(f"Runtime per N=1000 x B=10000 experiment (n<=15) < {TIME_LIMIT:.0f} s", ok,
           f"{len(small)} experiments, slowest {worst:.1f} s")
    assert ok
