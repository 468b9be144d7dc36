"""Standard and Bayesian bootstrap of the sample mean.

The replicate loops run in the compiled kernels when available (see
:mod:`bootcover._backend`); interval extraction is plain numpy.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ._backend import get_kernels
from ._rng import as_generator, open_uniform
from .distributions import Sample, as_sample


class Method(str, enum.Enum):
    STANDARD = "standard"
    BAYESIAN = "bayesian"
    BAYESIAN_WEIGHTED = "bayesian-weighted"

    @property
    def short(self):
        return _SHORT[self]


_SHORT = {Method.STANDARD: "std", Method.BAYESIAN: "bayes", Method.BAYESIAN_WEIGHTED: "bayesw"}


@dataclass(frozen=True, eq=False)
class ReplicateSet:
    """The ``B`` replicate means of one bootstrap run.

    ``log_likelihoods`` holds ``sum(log pi_i)`` per replicate and is present
    only for the weighted Bayesian variant.
    """

    means: np.ndarray
    method: Method
    log_likelihoods: np.ndarray | None = None

    def __post_init__(self):
        means = np.array(self.means, dtype=np.float64).ravel()
        if means.size < 1:
            raise ValueError("a replicate set needs at least one mean")
        if not np.all(np.isfinite(means)):
            raise ValueError("replicate means must be finite")
        method = Method(self.method)
        ll = self.log_likelihoods
        if (ll is not None) != (method is Method.BAYESIAN_WEIGHTED):
            raise ValueError("log_likelihoods are required for, and only for, the weighted variant")
        if ll is not None:
            ll = np.array(ll, dtype=np.float64).ravel()
            if ll.shape != means.shape:
                raise ValueError("one log-likelihood per replicate mean is required")
            ll.flags.writeable = False
        means.flags.writeable = False
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "method", method)
        object.__setattr__(self, "log_likelihoods", ll)

    @property
    def B(self):
        return self.means.size

    @property
    def likelihoods(self):
        """Replicate likelihoods scaled so the largest is 1."""
        if self.log_likelihoods is None:
            return None
        ll = self.log_likelihoods
        return np.exp(ll - np.max(ll))


@dataclass(frozen=True)
class IntervalEstimate:
    lower: float
    upper: float
    nominal_coverage: float
    method: Method

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"lower limit {self.lower} exceeds upper limit {self.upper}")

    def covers(self, mu):
        return self.lower <= mu <= self.upper


def _check_B(B):
    B = int(B)
    if B < 1:
        raise ValueError(f"B must be >= 1, got {B}")
    return B


def standard_bootstrap(sample, B, stream=None, *, backend=None):
    """Percentile-bootstrap replicates: means of ``B`` resamples with replacement."""
    x = as_sample(sample).values
    B = _check_B(B)
    rng = as_generator(stream)
    means = get_kernels(backend).standard_means(x, B, rng.bit_generator)
    return ReplicateSet(means, Method.STANDARD)


def bayesian_bootstrap(sample, B, stream=None, *, weighted=False, backend=None):
    """Bayesian-bootstrap replicates ``sum(pi_i * x_i)`` with flat-Dirichlet ``pi``.

    Each weight vector comes from the gaps between sorted uniforms (see
    :func:`dirichlet_weights_gaps`). With ``weighted=True`` the replicate
    log-likelihoods ``sum(log pi_i)`` are kept as well, for
    :func:`weighted_percentile_interval`.
    """
    x = as_sample(sample).values
    B = _check_B(B)
    rng = as_generator(stream)
    means, ll = get_kernels(backend).bayesian_means(x, B, rng.bit_generator, bool(weighted))
    method = Method.BAYESIAN_WEIGHTED if weighted else Method.BAYESIAN
    return ReplicateSet(means, method, ll)


def dirichlet_weights_gaps(n, stream=None):
    """One flat-Dirichlet weight vector from the gaps between sorted uniforms.

    ``n - 1`` uniforms on (0, 1) are sorted between the fixed endpoints 0 and
    1; the ``n`` successive differences are the weights. Each marginal is
    Beta(1, n - 1). Consumes the stream exactly as one replicate of
    :func:`bayesian_bootstrap` does.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    u = np.sort(open_uniform(stream, n - 1))
    return np.diff(np.concatenate(([0.0], u, [1.0])))


def dirichlet_weights_naive(n, stream=None):
    """``n`` uniforms divided by their sum.

    This does NOT give flat-Dirichlet weights (marginals pile up around 1/n);
    it exists as a contrast to :func:`dirichlet_weights_gaps`.
    """
    n = int(n)
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    u = open_uniform(stream, n)
    return u / u.sum()


def _order_index(q, B):
    # 0-based position of the ceil(q*B)-th smallest value, clamped to [1, B];
    # rounding first keeps e.g. 0.975 * 200 from landing on 195.00000000000003
    k = math.ceil(round(q * B, 9))
    return min(max(k, 1), B) - 1


def _quantile_levels(c):
    c = float(c)
    if not 0.0 < c < 1.0:
        raise ValueError(f"nominal coverage must lie in (0, 1), got {c}")
    return (1.0 - c) / 2.0, (1.0 + c) / 2.0


def percentile_intervals(reps, coverages):
    """:func:`percentile_interval` at several coverages with a single partial sort."""
    coverages = [float(c) for c in coverages]
    B = reps.B
    levels = {c: _quantile_levels(c) for c in coverages}
    wanted = sorted({_order_index(q, B) for lo_up in levels.values() for q in lo_up})
    ordered = np.partition(reps.means, wanted) if len(wanted) < 64 else np.sort(reps.means)
    out = {}
    for c, (q_lo, q_up) in levels.items():
        lo = float(ordered[_order_index(q_lo, B)])
        up = float(ordered[_order_index(q_up, B)])
        out[c] = IntervalEstimate(lo, up, c, reps.method)
    return out


def percentile_interval(reps, nominal_coverage):
    """Empirical-quantile interval of the replicate means.

    The limits are the ``ceil(q*B)``-th smallest replicate means for
    ``q = (1 - c)/2`` and ``(1 + c)/2``, without interpolation. Likelihoods,
    if present, are ignored.

    >>> reps = ReplicateSet(np.arange(1.0, 101.0), "standard")
    >>> iv = percentile_interval(reps, 0.95)
    >>> iv.lower, iv.upper
    (3.0, 98.0)
    """
    return percentile_intervals(reps, [nominal_coverage])[float(nominal_coverage)]


def weighted_percentile_intervals(reps, coverages):
    if reps.log_likelihoods is None:
        raise ValueError("weighted intervals need replicate likelihoods (bayesian_bootstrap(..., weighted=True))")
    order = np.argsort(reps.means, kind="stable")
    means = reps.means[order]
    cum = np.cumsum(reps.likelihoods[order])
    cum /= cum[-1]
    out = {}
    for c in coverages:
        c = float(c)
        q_lo, q_up = _quantile_levels(c)
        i_lo = min(int(np.searchsorted(cum, q_lo, side="left")), means.size - 1)
        i_up = min(int(np.searchsorted(cum, q_up, side="left")), means.size - 1)
        out[c] = IntervalEstimate(float(means[i_lo]), float(means[i_up]), c, reps.method)
    return out


def weighted_percentile_interval(reps, nominal_coverage):
    """Interval from the likelihood-weighted CDF of the replicate means.

    Each limit is the first sorted mean whose normalized cumulative
    likelihood reaches ``(1 - c)/2`` or ``(1 + c)/2``.
    """
    return weighted_percentile_intervals(reps, [nominal_coverage])[float(nominal_coverage)]


def intervals_for(reps, coverages):
    """Dispatch to the weighted or unweighted interval rule by replicate method."""
    if reps.method is Method.BAYESIAN_WEIGHTED:
        return weighted_percentile_intervals(reps, coverages)
    return percentile_intervals(reps, coverages)


class PseudoValue(str, enum.Enum):
    MAX = "max"
    SCALED_MAX = "scaled-max"


def pseudovalue_augment(sample, mode):
    """Append one extra value to a positive sample.

    ``max`` appends ``x_max``; ``scaled-max`` appends
    ``exp(ln(x_max / x_min) / n)``. The latter is applied as written even
    though it need not lie between ``x_min`` and ``x_max``.
    """
    x = as_sample(sample).values
    mode = PseudoValue(mode)
    if np.any(x <= 0):
        raise ValueError("pseudovalue augmentation needs strictly positive values")
    if mode is PseudoValue.MAX:
        extra = x.max()
    else:
        if x.size < 2:
            raise ValueError("scaled-max needs at least two values")
        extra = math.exp(math.log(x.max() / x.min()) / x.size)
    return Sample(np.append(x, extra))
