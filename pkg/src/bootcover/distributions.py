"""Ground-truth sources: five parametric families and empirical datasets.

Every family has positive support. Sampling draws from an explicit
``numpy.random.Generator`` (or anything :func:`numpy.random.default_rng`
accepts), so a given ``(spec, n, seed)`` always produces the same sample.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from ._rng import as_generator, open_uniform

LN10 = math.log(10.0)


class Family(str, enum.Enum):
    LOG_UNIFORM = "log-uniform"
    POWER_LAW_UNIT = "power-law-unit"
    PARETO = "pareto"
    EXPONENTIAL = "exponential"
    TRUNCATED_NORMAL = "normal"
    EMPIRICAL = "empirical"


_PARAM_NAMES = {
    Family.LOG_UNIFORM: ("k",),
    Family.POWER_LAW_UNIT: ("alpha",),
    Family.PARETO: ("alpha",),
    Family.EXPONENTIAL: ("lam",),
    Family.TRUNCATED_NORMAL: ("mu", "sigma"),
    Family.EMPIRICAL: (),
}


@dataclass(frozen=True, eq=False)
class DistributionSpec:
    """A validated ground-truth description.

    Use the named constructors (:meth:`log_uniform`, :meth:`pareto`, ...)
    rather than building one directly.
    """

    family: Family
    params: dict = field(default_factory=dict)
    data: np.ndarray | None = None
    name: str | None = None

    def __post_init__(self):
        family = Family(self.family)
        object.__setattr__(self, "family", family)
        expected = set(_PARAM_NAMES[family])
        if set(self.params) != expected:
            raise ValueError(f"{family.value} takes parameters {sorted(expected)}, got {sorted(self.params)}")
        p = {key: float(v) for key, v in self.params.items()}
        object.__setattr__(self, "params", p)
        for key, v in p.items():
            if not math.isfinite(v):
                raise ValueError(f"{family.value}: {key} must be finite, got {v}")

        if family is Family.LOG_UNIFORM and not p["k"] > 0:
            raise ValueError(f"log-uniform needs k > 0, got {p['k']}")
        if family is Family.POWER_LAW_UNIT and not 0 < p["alpha"] < 1:
            raise ValueError(f"power-law-unit needs 0 < alpha < 1, got {p['alpha']}")
        if family is Family.PARETO and not p["alpha"] > 2:
            raise ValueError(f"pareto needs alpha > 2, got {p['alpha']}")
        if family is Family.EXPONENTIAL and not p["lam"] > 0:
            raise ValueError(f"exponential needs lambda > 0, got {p['lam']}")
        if family is Family.TRUNCATED_NORMAL and not p["sigma"] > 0:
            raise ValueError(f"normal needs sigma > 0, got {p['sigma']}")

        if family is Family.EMPIRICAL:
            if self.data is None:
                raise ValueError("empirical spec needs data")
            arr = np.array(self.data, dtype=np.float64).ravel()
            if arr.size == 0:
                raise ValueError("empirical dataset is empty")
            if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
                raise ValueError("empirical dataset must be finite and strictly positive")
            arr.flags.writeable = False
            object.__setattr__(self, "data", arr)
        elif self.data is not None:
            raise ValueError(f"{family.value} does not take data")

    @classmethod
    def log_uniform(cls, k):
        return cls(Family.LOG_UNIFORM, {"k": k})

    @classmethod
    def power_law_unit(cls, alpha):
        return cls(Family.POWER_LAW_UNIT, {"alpha": alpha})

    @classmethod
    def pareto(cls, alpha):
        return cls(Family.PARETO, {"alpha": alpha})

    @classmethod
    def exponential(cls, lam):
        return cls(Family.EXPONENTIAL, {"lam": lam})

    @classmethod
    def truncated_normal(cls, mu, sigma):
        return cls(Family.TRUNCATED_NORMAL, {"mu": mu, "sigma": sigma})

    @classmethod
    def empirical(cls, values, name=None):
        return cls(Family.EMPIRICAL, {}, data=values, name=name)

    @classmethod
    def from_params(cls, family, **params):
        """Build from a family name and keyword parameters, ignoring ``None`` values."""
        family = Family(family)
        given = {k: v for k, v in params.items() if v is not None}
        missing = [k for k in _PARAM_NAMES[family] if k not in given]
        if missing:
            raise ValueError(f"{family.value} requires {', '.join(missing)}")
        extra = sorted(set(given) - set(_PARAM_NAMES[family]))
        if extra:
            raise ValueError(f"{family.value} does not take {', '.join(extra)}")
        return cls(family, given)

    @property
    def is_parametric(self):
        return self.family is not Family.EMPIRICAL

    @property
    def label(self):
        if self.family is Family.EMPIRICAL:
            return f"empirical({self.name or f'{self.data.size} values'})"
        args = ",".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.family.value}({args})"

    def to_dict(self):
        out = {"family": self.family.value, "params": dict(self.params)}
        if self.family is Family.EMPIRICAL:
            out["name"] = self.name
            out["size"] = int(self.data.size)
        return out

    def __repr__(self):
        return f"DistributionSpec<{self.label}>"


@dataclass(frozen=True, eq=False)
class Sample:
    """An ordered set of ``n >= 1`` finite observations."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64).ravel()
        if arr.size < 1:
            raise ValueError("a sample needs at least one value")
        if not np.all(np.isfinite(arr)):
            raise ValueError("sample values must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def n(self):
        return self.values.size

    def mean(self):
        return float(np.mean(self.values))

    def __len__(self):
        return self.values.size


def as_sample(x):
    return x if isinstance(x, Sample) else Sample(x)


@dataclass(frozen=True)
class MomentSummary:
    """Distribution shape statistics; ``None`` marks a divergent moment."""

    sigma_x: float | None
    sigma_log10_x: float
    skewness: float | None
    excess_kurtosis: float | None

    def as_dict(self):
        return {
            "sigma_x": self.sigma_x,
            "sigma_log10_x": self.sigma_log10_x,
            "skewness": self.skewness,
            "excess_kurtosis": self.excess_kurtosis,
        }


# --------------------------------------------------------------------------- sampling


def _truncnorm_sf0(mu, sigma):
    """log P(X > 0) for X ~ N(mu, sigma)."""
    return float(special.log_ndtr(mu / sigma))


def sample(spec, n, stream=None):
    """Draw ``n`` independent values from ``spec``.

    Parameters
    ----------
    spec : DistributionSpec
    n : int
        Sample size, at least 1.
    stream : numpy.random.Generator, int or None
        Source of randomness; an int is used as a seed.

    Returns
    -------
    Sample
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"sample size must be >= 1, got {n}")
    rng = as_generator(stream)
    fam, p = spec.family, spec.params

    if fam is Family.LOG_UNIFORM:
        x = 10.0 ** (-p["k"] * open_uniform(rng, n))
    elif fam is Family.POWER_LAW_UNIT:
        x = open_uniform(rng, n) ** (1.0 / (1.0 - p["alpha"]))
    elif fam is Family.PARETO:
        x = open_uniform(rng, n) ** (-1.0 / (p["alpha"] - 1.0))
    elif fam is Family.EXPONENTIAL:
        x = -np.log(open_uniform(rng, n)) / p["lam"]
    elif fam is Family.TRUNCATED_NORMAL:
        x = _sample_truncated_normal(p["mu"], p["sigma"], n, rng)
    else:
        data = spec.data
        idx = np.minimum((open_uniform(rng, n) * data.size).astype(np.int64), data.size - 1)
        x = data[idx]
    return Sample(x)


def _sample_truncated_normal(mu, sigma, n, rng):
    log_accept = _truncnorm_sf0(mu, sigma)
    if log_accept < math.log(0.05):
        # rejection would be wasteful; invert the truncated CDF instead
        lo = special.ndtr(-mu / sigma)
        u = open_uniform(rng, n)
        return np.maximum(mu + sigma * special.ndtri(lo + u * (1.0 - lo)), np.finfo(float).tiny)
    out = np.empty(0)
    while out.size < n:
        need = n - out.size
        draw = rng.normal(mu, sigma, size=need + 8 + need // 8)
        out = np.concatenate([out, draw[draw > 0]])
    return out[:n]


# --------------------------------------------------------------------------- means


def true_mean(spec):
    """Exact mean of the ground truth."""
    fam, p = spec.family, spec.params
    if fam is Family.LOG_UNIFORM:
        k = p["k"]
        return -math.expm1(-k * LN10) / (k * LN10)
    if fam is Family.POWER_LAW_UNIT:
        a = p["alpha"]
        return (1.0 - a) / (2.0 - a)
    if fam is Family.PARETO:
        a = p["alpha"]
        return (a - 1.0) / (a - 2.0)
    if fam is Family.EXPONENTIAL:
        return 1.0 / p["lam"]
    if fam is Family.TRUNCATED_NORMAL:
        mu, sigma = p["mu"], p["sigma"]
        z = mu / sigma
        # mu + sigma * phi(z) / Phi(z), in log space for stability
        log_ratio = -0.5 * z * z - 0.5 * math.log(2 * math.pi) - float(special.log_ndtr(z))
        return mu + sigma * math.exp(log_ratio)
    return float(np.mean(spec.data))


# --------------------------------------------------------------------------- densities


def pdf(spec, x):
    """Density of a parametric spec at ``x`` (zero outside the support)."""
    x = np.asarray(x, dtype=np.float64)
    fam, p = spec.family, spec.params
    out = np.zeros_like(x)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if fam is Family.LOG_UNIFORM:
            k = p["k"]
            inside = (x >= 10.0 ** -k) & (x <= 1.0)
            out = np.where(inside, 1.0 / (k * LN10 * x), 0.0)
        elif fam is Family.POWER_LAW_UNIT:
            a = p["alpha"]
            out = np.where((x > 0) & (x <= 1.0), (1.0 - a) * x ** -a, 0.0)
        elif fam is Family.PARETO:
            a = p["alpha"]
            out = np.where(x >= 1.0, (a - 1.0) * x ** -a, 0.0)
        elif fam is Family.EXPONENTIAL:
            lam = p["lam"]
            out = np.where(x >= 0, lam * np.exp(-lam * x), 0.0)
        elif fam is Family.TRUNCATED_NORMAL:
            mu, sigma = p["mu"], p["sigma"]
            z = (x - mu) / sigma
            logp = -0.5 * z * z - 0.5 * math.log(2 * math.pi) - math.log(sigma) - _truncnorm_sf0(mu, sigma)
            out = np.where(x > 0, np.exp(logp), 0.0)
        else:
            raise ValueError("empirical specs have no density")
    return out


def ppf(spec, q):
    """Inverse CDF of a parametric spec."""
    q = np.asarray(q, dtype=np.float64)
    fam, p = spec.family, spec.params
    if fam is Family.LOG_UNIFORM:
        return 10.0 ** (p["k"] * (q - 1.0))
    if fam is Family.POWER_LAW_UNIT:
        return q ** (1.0 / (1.0 - p["alpha"]))
    if fam is Family.PARETO:
        return (1.0 - q) ** (-1.0 / (p["alpha"] - 1.0))
    if fam is Family.EXPONENTIAL:
        return -np.log1p(-q) / p["lam"]
    if fam is Family.TRUNCATED_NORMAL:
        mu, sigma = p["mu"], p["sigma"]
        lo = special.ndtr(-mu / sigma)
        return mu + sigma * special.ndtri(lo + q * (1.0 - lo))
    raise ValueError("empirical specs have no quantile function")


# --------------------------------------------------------------------------- moments


def _log_grid_expectation(spec, func, tail=1e-12, segments=48, rtol=1e-6):
    """E[func(X)] by adaptive quadrature over ln x between the ``tail`` quantiles."""
    lo, hi = ppf(spec, [tail, 1.0 - tail])
    t_edges = np.linspace(math.log(lo), math.log(hi), segments + 1)

    def integrand(t):
        x = math.exp(t)
        return func(x) * float(pdf(spec, x)) * x

    total = 0.0
    for a, b in zip(t_edges[:-1], t_edges[1:]):
        val, _ = integrate.quad(integrand, a, b, epsabs=0.0, epsrel=rtol, limit=200)
        total += val
    return total


def numeric_moments(spec, tail=1e-12, rtol=1e-6):
    """Moment summary by quadrature over a log-spaced grid.

    Truncates the support at the ``tail`` and ``1 - tail`` quantiles, so it
    is only meaningful for families whose moments converge; divergent
    moments come back as large, truncation-dependent numbers.
    """
    mass = _log_grid_expectation(spec, lambda x: 1.0, tail, rtol=rtol)
    mean = _log_grid_expectation(spec, lambda x: x, tail, rtol=rtol) / mass
    var = _log_grid_expectation(spec, lambda x: (x - mean) ** 2, tail, rtol=rtol) / mass
    sd = math.sqrt(var)
    skew = _log_grid_expectation(spec, lambda x: ((x - mean) / sd) ** 3, tail, rtol=rtol) / mass
    kurt = _log_grid_expectation(spec, lambda x: ((x - mean) / sd) ** 4, tail, rtol=rtol) / mass
    lmean = _log_grid_expectation(spec, lambda x: math.log10(x), tail, rtol=rtol) / mass
    lvar = _log_grid_expectation(spec, lambda x: (math.log10(x) - lmean) ** 2, tail, rtol=rtol) / mass
    return MomentSummary(sd, math.sqrt(lvar), skew, kurt - 3.0)


def _from_raw_moments(m1, m2, m3, m4):
    var = m2 - m1 * m1
    c3 = m3 - 3 * m1 * m2 + 2 * m1 ** 3
    c4 = m4 - 4 * m1 * m3 + 6 * m1 * m1 * m2 - 3 * m1 ** 4
    return math.sqrt(var), c3 / var ** 1.5, c4 / var ** 2 - 3.0


def moment_summary(spec):
    """Standard deviation, log10 standard deviation, skewness, excess kurtosis.

    Closed forms for the log-uniform, unit power-law, Pareto and exponential
    families; quadrature for the zero-truncated normal. Pareto moments of
    order ``r`` diverge for ``alpha <= r + 1`` and are reported as ``None``.
    """
    fam, p = spec.family, spec.params
    if fam is Family.EMPIRICAL:
        raise ValueError("moment_summary needs a parametric spec; use sample statistics for empirical data")

    if fam is Family.LOG_UNIFORM:
        k = p["k"]
        raw = [-math.expm1(-k * r * LN10) / (k * r * LN10) for r in (1, 2, 3, 4)]
        sd, skew, exk = _from_raw_moments(*raw)
        return MomentSummary(sd, k / math.sqrt(12.0), skew, exk)

    if fam is Family.POWER_LAW_UNIT:
        a = p["alpha"]
        raw = [(1.0 - a) / (r + 1.0 - a) for r in (1, 2, 3, 4)]
        sd, skew, exk = _from_raw_moments(*raw)
        return MomentSummary(sd, 1.0 / ((1.0 - a) * LN10), skew, exk)

    if fam is Family.PARETO:
        # shape s = alpha - 1 on [1, inf)
        s = p["alpha"] - 1.0
        sd = math.sqrt(s / ((s - 1.0) ** 2 * (s - 2.0))) if s > 2 else None
        skew = 2.0 * (1.0 + s) / (s - 3.0) * math.sqrt((s - 2.0) / s) if s > 3 else None
        exk = 6.0 * (s ** 3 + s ** 2 - 6.0 * s - 2.0) / (s * (s - 3.0) * (s - 4.0)) if s > 4 else None
        return MomentSummary(sd, 1.0 / (s * LN10), skew, exk)

    if fam is Family.EXPONENTIAL:
        # ln X = -ln(lam) + Gumbel-min; its variance pi^2/6 does not depend on lam
        return MomentSummary(1.0 / p["lam"], math.pi / (math.sqrt(6.0) * LN10), 2.0, 6.0)

    return numeric_moments(spec)
