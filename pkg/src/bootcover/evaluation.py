"""Coverage simulation: how often bootstrap intervals bracket a known mean.

For each of ``N`` trials a synthetic sample of size ``n`` is drawn from the
ground truth, both bootstraps are run on it, and percentile intervals are
recorded at every requested nominal coverage. Trials own pre-derived random
streams keyed by ``(master_seed, trial, purpose)``, so results do not depend
on how many workers run them or in what order.
"""
from __future__ import annotations

import enum
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _rng
from .distributions import DistributionSpec, sample, true_mean
from .resampling import (
    Method,
    PseudoValue,
    bayesian_bootstrap,
    intervals_for,
    pseudovalue_augment,
    standard_bootstrap,
)

DEFAULT_N = 1000
DEFAULT_B = 10_000
DEFAULT_COVERAGES = (0.50, 0.65, 0.80, 0.95)
DEFAULT_SIZES = (5, 10, 25, 50, 100, 250, 500, 1000)


@dataclass(frozen=True, eq=False)
class TrialRecord:
    trial_index: int
    sample_mean: float
    intervals: dict  # (Method, coverage) -> IntervalEstimate

    def interval(self, method, coverage):
        return self.intervals[(Method(method), float(coverage))]

    def __eq__(self, other):
        if not isinstance(other, TrialRecord):
            return NotImplemented
        return (
            self.trial_index == other.trial_index
            and self.sample_mean == other.sample_mean
            and self.intervals == other.intervals
        )


@dataclass(frozen=True)
class CoverageCell:
    n_under: int
    n_over: int
    n_trials: int

    @property
    def under_pct(self):
        return self.n_under / self.n_trials

    @property
    def over_pct(self):
        return self.n_over / self.n_trials

    @property
    def effective_coverage(self):
        return (self.n_trials - self.n_under - self.n_over) / self.n_trials


@dataclass(frozen=True)
class CoverageReport:
    """Under/over-estimation fractions per (method, nominal coverage).

    All three fractions are in [0, 1] and sum to 1 for every cell.
    """

    cells: dict  # (Method, coverage) -> CoverageCell
    sigma_log10_mean: float
    N: int
    n: int | None = None
    B: int | None = None
    ground_truth: str | None = None

    def __getitem__(self, key):
        method, coverage = key
        return self.cells[(Method(method), float(coverage))]

    @property
    def methods(self):
        return sorted({m for m, _ in self.cells}, key=list(Method).index)

    @property
    def coverages(self):
        return sorted({c for _, c in self.cells})

    def rows(self):
        for m in self.methods:
            for c in self.coverages:
                cell = self.cells[(m, c)]
                yield m, c, cell


@dataclass(frozen=True, eq=False)
class LimitCdf:
    """Empirical CDF of ``log10(limit / mu)`` across trials.

    Zero limits have no logarithm; they are placed one decade below the
    smallest finite log-ratio (``zero_floor``) and counted in ``n_zero``.
    """

    method: Method
    side: str
    coverage: float
    log_ratios: np.ndarray
    fractions: np.ndarray = field(repr=False)
    n_zero: int = 0
    zero_floor: float | None = None

    def fraction_below(self, x):
        """Fraction of trials with log-ratio strictly below ``x``."""
        return np.searchsorted(self.log_ratios, x, side="left") / self.log_ratios.size

    def cdf_at(self, x):
        return np.searchsorted(self.log_ratios, x, side="right") / self.log_ratios.size

    def median(self):
        """Log-ratio at which the CDF first reaches one half."""
        k = math.ceil(round(0.5 * self.log_ratios.size, 9))
        return float(self.log_ratios[max(k, 1) - 1])


def _check_counts(**counts):
    for name, value in counts.items():
        if int(value) != value or value < 1:
            raise ValueError(f"{name} must be a positive integer, got {value}")


def _check_coverages(coverages):
    out = tuple(sorted({float(c) for c in coverages}))
    if not out:
        raise ValueError("at least one nominal coverage is required")
    for c in out:
        if not 0.0 < c < 1.0:
            raise ValueError(f"nominal coverage must lie in (0, 1), got {c}")
    return out


def run_trial(ground_truth, n, B, coverages, master_seed, trial, *, pseudovalue=None, weighted_bayes=False, backend=None):
    """One synthetic data set and its intervals; see :func:`run_experiment`."""
    x = sample(ground_truth, n, _rng.child_stream(master_seed, trial, _rng.SAMPLE))
    xbar = x.mean()
    boot_sample = pseudovalue_augment(x, pseudovalue) if pseudovalue else x

    intervals = {}
    reps = standard_bootstrap(boot_sample, B, _rng.child_stream(master_seed, trial, _rng.STANDARD), backend=backend)
    for c, iv in intervals_for(reps, coverages).items():
        intervals[(Method.STANDARD, c)] = iv
    reps = bayesian_bootstrap(
        boot_sample, B, _rng.child_stream(master_seed, trial, _rng.BAYESIAN), weighted=weighted_bayes, backend=backend
    )
    for c, iv in intervals_for(reps, coverages).items():
        intervals[(reps.method, c)] = iv
    if weighted_bayes:
        # the same replicate draws, read through the unweighted CDF
        reps = type(reps)(reps.means, Method.BAYESIAN)
        for c, iv in intervals_for(reps, coverages).items():
            intervals[(Method.BAYESIAN, c)] = iv
    return TrialRecord(trial, xbar, intervals)


def run_experiment(
    ground_truth,
    n,
    N=DEFAULT_N,
    B=DEFAULT_B,
    coverages=DEFAULT_COVERAGES,
    master_seed=0,
    *,
    pseudovalue=None,
    weighted_bayes=False,
    workers=None,
    backend=None,
    progress=False,
):
    """Run ``N`` trials of the synthetic-data coverage experiment.

    Parameters
    ----------
    ground_truth : DistributionSpec
        Source of the synthetic samples; its exact mean is the target.
    n : int
        Size of each synthetic sample.
    N : int
        Number of synthetic samples (trials).
    B : int
        Bootstrap replicates per method per trial.
    coverages : iterable of float
        Nominal coverages in (0, 1).
    master_seed : int
        Root of every per-trial stream.
    pseudovalue : {None, "max", "scaled-max"}
        Append a pseudo-value to each sample before bootstrapping.
    weighted_bayes : bool
        Also record likelihood-weighted Bayesian intervals.
    workers : int, optional
        Threads to spread trials over; defaults to the CPU count. Results are
        identical for any value.

    Returns
    -------
    list of TrialRecord
        Ordered by trial index.
    """
    if not isinstance(ground_truth, DistributionSpec):
        raise TypeError("ground_truth must be a DistributionSpec")
    _check_counts(n=n, N=N, B=B)
    if master_seed < 0:
        raise ValueError("master_seed must be nonnegative")
    coverages = _check_coverages(coverages)
    if pseudovalue is not None:
        pseudovalue = PseudoValue(pseudovalue)
        if pseudovalue is PseudoValue.SCALED_MAX and n < 2:
            raise ValueError("scaled-max pseudovalues need n >= 2")
    workers = workers or os.cpu_count() or 1

    def one(t):
        return run_trial(
            ground_truth, n, B, coverages, master_seed, t,
            pseudovalue=pseudovalue, weighted_bayes=weighted_bayes, backend=backend,
        )

    started = time.perf_counter()
    records = []
    report_every = max(1, N // 10)
    if workers == 1:
        results = map(one, range(N))
        pool = None
    else:
        pool = ThreadPoolExecutor(max_workers=workers)
        results = pool.map(one, range(N))
    try:
        for rec in results:
            records.append(rec)
            if progress and (len(records) % report_every == 0 or len(records) == N):
                elapsed = time.perf_counter() - started
                print(f"  {ground_truth.label} n={n}: {len(records)}/{N} trials ({elapsed:.1f}s)", file=sys.stderr)
    finally:
        if pool is not None:
            pool.shutdown()
    return records


def sigma_log10_of_means(records):
    """Standard deviation of log10 of the trial sample means."""
    means = np.array([r.sample_mean for r in records])
    if np.any(means <= 0):
        return float("nan")
    return float(np.std(np.log10(means)))


def coverage_report(records, mu, *, n=None, B=None, ground_truth=None):
    """Count under-estimations (upper < mu) and over-estimations (lower > mu).

    Limits equal to ``mu`` count as covering it.
    """
    if not records:
        raise ValueError("coverage_report needs at least one trial record")
    mu = float(mu)
    if not math.isfinite(mu):
        raise ValueError("mu must be finite")
    keys = list(records[0].intervals)
    cells = {}
    for key in keys:
        under = sum(1 for r in records if r.intervals[key].upper < mu)
        over = sum(1 for r in records if r.intervals[key].lower > mu)
        cells[key] = CoverageCell(under, over, len(records))
    label = ground_truth.label if isinstance(ground_truth, DistributionSpec) else ground_truth
    return CoverageReport(cells, sigma_log10_of_means(records), len(records), n, B, label)


def limit_cdf(records, mu, method, side, coverage=0.95):
    """Empirical CDF of ``log10(limit / mu)`` for one method, side and coverage."""
    if not mu > 0:
        raise ValueError("limit CDFs need a positive true mean")
    if side not in ("lower", "upper"):
        raise ValueError(f"side must be 'lower' or 'upper', got {side!r}")
    key = (Method(method), float(coverage))
    limits = np.array([getattr(r.intervals[key], side) for r in records], dtype=np.float64)
    if np.any(limits < 0):
        raise ValueError("negative limits have no log-ratio")
    zero = limits == 0
    ratios = np.empty_like(limits)
    ratios[~zero] = np.log10(limits[~zero] / mu)
    floor = None
    if zero.any():
        floor = (float(ratios[~zero].min()) if (~zero).any() else 0.0) - 1.0
        ratios[zero] = floor
    ratios.sort()
    fractions = np.arange(1, ratios.size + 1) / ratios.size
    ratios.flags.writeable = False
    return LimitCdf(key[0], side, key[1], ratios, fractions, int(zero.sum()), floor)


class HalfMaxDefinition(str, enum.Enum):
    LOG_RATIO = "log-ratio"
    VALUE_RATIO = "value-ratio"


def half_max_cdf_ratio(standard_lower, bayes_lower, definition="value-ratio"):
    """Compare the medians of the two lower-limit CDFs.

    With ``m_s`` and ``m_b`` the median ``log10(lower / mu)`` of the standard
    and Bayesian bootstrap, ``log-ratio`` gives ``m_s / m_b`` and
    ``value-ratio`` gives ``10**(m_b - m_s)``, the ratio of the median lower
    limits themselves. Returns ``None`` when ``log-ratio`` would divide by 0.
    """
    definition = HalfMaxDefinition(definition)
    if standard_lower.side != "lower" or bayes_lower.side != "lower":
        raise ValueError("half-max ratios compare lower-limit CDFs")
    m_s, m_b = standard_lower.median(), bayes_lower.median()
    if definition is HalfMaxDefinition.LOG_RATIO:
        if m_b == 0:
            return None
        return m_s / m_b
    return 10.0 ** (m_b - m_s)


def half_max_ratios(records, mu, coverage=0.95):
    """Both half-max definitions for one experiment, keyed by definition name."""
    s = limit_cdf(records, mu, Method.STANDARD, "lower", coverage)
    b = limit_cdf(records, mu, Method.BAYESIAN, "lower", coverage)
    return {d.value: half_max_cdf_ratio(s, b, d) for d in HalfMaxDefinition}


def sweep_sizes(ground_truth, sizes, N=DEFAULT_N, B=DEFAULT_B, coverages=DEFAULT_COVERAGES, master_seed=0, **kwargs):
    """Coverage reports for several sample sizes, keyed by ``n``.

    Each size reuses ``master_seed``; keyword arguments go to
    :func:`run_experiment`.
    """
    sizes = sorted({int(s) for s in sizes})
    if not sizes:
        raise ValueError("at least one sample size is required")
    mu = true_mean(ground_truth)
    out = {}
    for n in sizes:
        records = run_experiment(ground_truth, n, N, B, coverages, master_seed, **kwargs)
        out[n] = coverage_report(records, mu, n=n, B=B, ground_truth=ground_truth)
    return out
