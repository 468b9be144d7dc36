"""Command-line front end.

    bootcover synthetic --family log-uniform --k 20 --n 10 --coverage 0.95 --out runs/k20
    bootcover empirical --data system_a --out runs/system_a
    bootcover moments --family pareto --alpha 2.9
    bootcover weights-check --n 10 --draws 10000 --out runs/weights

Exit status: 0 success, 1 runtime or I/O failure, 2 invalid configuration.
Progress goes to stderr; stdout carries only machine-readable summaries.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np
from scipy import stats

from . import __version__
from ._backend import BACKEND
from .distributions import DistributionSpec, Family, moment_summary, true_mean
from .evaluation import (
    DEFAULT_B,
    DEFAULT_COVERAGES,
    DEFAULT_N,
    HalfMaxDefinition,
    coverage_report,
    half_max_cdf_ratio,
    limit_cdf,
    run_experiment,
)
from .io import DatasetError, load_dataset, write_table
from .resampling import Method, PseudoValue, dirichlet_weights_gaps, dirichlet_weights_naive

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG = 0, 1, 2

DEFAULT_HALF_MAX = HalfMaxDefinition.VALUE_RATIO.value


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    command: str
    family: str | None = None
    k: float | None = None
    alpha: float | None = None
    lam: float | None = None
    mu: float | None = None
    sigma: float | None = None
    data: str | None = None
    n: int | None = None
    N: int = DEFAULT_N
    B: int = DEFAULT_B
    coverages: list = None
    sizes: list | None = None
    seed: int = 0
    out: str | None = None
    force: bool = False
    pseudovalue: str | None = None
    weighted_bayes: bool = False
    half_max_def: str = DEFAULT_HALF_MAX

    def __post_init__(self):
        if self.coverages is None:
            self.coverages = list(DEFAULT_COVERAGES)

    @classmethod
    def from_mapping(cls, values):
        names = {f.name for f in fields(cls)}
        unknown = sorted(set(values) - names)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**values)

    def to_dict(self):
        # overwriting must always be asked for on the command line
        d = asdict(self)
        d.pop("force")
        return d

    def ground_truth(self):
        if self.command == "empirical":
            try:
                return load_dataset(self.data)
            except (DatasetError, KeyError) as exc:
                raise ConfigError(str(exc)) from exc
        try:
            return DistributionSpec.from_params(
                self.family, k=self.k, alpha=self.alpha, lam=self.lam, mu=self.mu, sigma=self.sigma
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def validate(self):
        """Check every field before any work starts; returns the ground truth."""
        if self.command not in ("synthetic", "empirical"):
            raise ConfigError(f"unknown experiment command {self.command!r}")
        if self.command == "synthetic":
            if self.family is None:
                raise ConfigError("--family is required")
            try:
                if Family(self.family) is Family.EMPIRICAL:
                    raise ConfigError("use the empirical command for data files")
            except ValueError:
                choices = ", ".join(f.value for f in Family if f is not Family.EMPIRICAL)
                raise ConfigError(f"unknown family {self.family!r}; choose from {choices}") from None
        elif self.data is None:
            raise ConfigError("--data is required")
        spec = self.ground_truth()
        if self.command == "empirical" and self.n is None:
            self.n = int(spec.data.size)
        if self.n is None and not self.sizes:
            raise ConfigError("--n (or --sizes) is required")
        for name in ("n", "N", "B"):
            v = getattr(self, name)
            if v is not None and (not isinstance(v, int) or isinstance(v, bool) or v < 1):
                raise ConfigError(f"--{name} must be a positive integer, got {v!r}")
        if self.sizes is not None:
            if not self.sizes or any(not isinstance(s, int) or s < 1 for s in self.sizes):
                raise ConfigError(f"--sizes must be positive integers, got {self.sizes!r}")
        if not self.coverages:
            raise ConfigError("at least one --coverage is required")
        for c in self.coverages:
            if not isinstance(c, (int, float)) or not 0 < c < 1:
                raise ConfigError(f"--coverage must lie strictly between 0 and 1, got {c!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError(f"--seed must be a nonnegative integer, got {self.seed!r}")
        if self.pseudovalue is not None:
            try:
                PseudoValue(self.pseudovalue)
            except ValueError:
                raise ConfigError(f"--pseudovalue must be max or scaled-max, got {self.pseudovalue!r}") from None
            smallest = min(self.sizes) if self.sizes else self.n
            if self.pseudovalue == "scaled-max" and smallest < 2:
                raise ConfigError("scaled-max pseudovalues need n >= 2")
        try:
            HalfMaxDefinition(self.half_max_def)
        except ValueError:
            raise ConfigError(f"--half-max-def must be log-ratio or value-ratio, got {self.half_max_def!r}") from None
        if self.out is None:
            raise ConfigError("--out is required")
        return spec


# --------------------------------------------------------------------------- outputs


def _pct(c):
    return f"{c * 100:g}"


def _methods(records):
    return sorted({m for m, _ in records[0].intervals}, key=list(Method).index)


def output_names(cfg):
    names = ["trials.csv", "coverage.csv", "summary.json"]
    for m in _config_methods(cfg):
        for side in ("lower", "upper"):
            names.append(f"limit_cdf_{m.short}_{side}.csv")
    return names


def _config_methods(cfg):
    methods = [Method.STANDARD, Method.BAYESIAN]
    if cfg.weighted_bayes:
        methods.append(Method.BAYESIAN_WEIGHTED)
    return methods


def write_experiment(out, cfg, spec, n, records):
    """Write trials, coverage, limit CDFs and summary for one sample size."""
    out.mkdir(parents=True, exist_ok=True)
    mu = true_mean(spec)
    coverages = sorted({float(c) for c in cfg.coverages})
    methods = _methods(records)

    header = ["trial", "xbar"]
    for m in methods:
        for c in coverages:
            header += [f"{m.short}_{_pct(c)}_lo", f"{m.short}_{_pct(c)}_up"]
    rows = []
    for r in records:
        row = [r.trial_index, r.sample_mean]
        for m in methods:
            for c in coverages:
                iv = r.intervals[(m, c)]
                row += [iv.lower, iv.upper]
        rows.append(row)
    write_table(out / "trials.csv", header, rows)

    report = coverage_report(records, mu, n=n, B=cfg.B, ground_truth=spec)
    write_table(
        out / "coverage.csv",
        ["method", "coverage", "under_pct", "over_pct", "effective_pct"],
        [
            [m.short, _pct(c), 100.0 * cell.under_pct, 100.0 * cell.over_pct, 100.0 * cell.effective_coverage]
            for m, c, cell in report.rows()
        ],
    )

    for m in methods:
        for side in ("lower", "upper"):
            rows, notes = [], []
            for c in coverages:
                cdf = limit_cdf(records, mu, m, side, c)
                rows += [[_pct(c), float(v), float(f)] for v, f in zip(cdf.log_ratios, cdf.fractions)]
                if cdf.n_zero:
                    notes.append(f"coverage {_pct(c)}: {cdf.n_zero} zero limits placed at log10 ratio {cdf.zero_floor:.6g}")
            write_table(out / f"limit_cdf_{m.short}_{side}.csv", ["coverage", "log10_ratio", "cdf"], rows, notes)

    ratios = {d.value: {} for d in HalfMaxDefinition}
    for c in coverages:
        s = limit_cdf(records, mu, Method.STANDARD, "lower", c)
        b = limit_cdf(records, mu, Method.BAYESIAN, "lower", c)
        for d in HalfMaxDefinition:
            ratios[d.value][_pct(c)] = half_max_cdf_ratio(s, b, d)

    summary = {
        "config": cfg.to_dict(),
        "ground_truth": spec.to_dict(),
        "n": n,
        "true_mean": mu,
        "sigma_log10_xbar": report.sigma_log10_mean,
        "half_max_definition": cfg.half_max_def,
        "half_max_ratio": ratios[cfg.half_max_def],
        "half_max_ratio_log": ratios[HalfMaxDefinition.LOG_RATIO.value],
        "half_max_ratio_value": ratios[HalfMaxDefinition.VALUE_RATIO.value],
        "moments": moment_summary(spec).as_dict() if spec.is_parametric else None,
        "version": __version__,
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2, allow_nan=True) + "\n")
    return report


def run_config(cfg, workers=None):
    spec = cfg.validate()
    out = Path(cfg.out)
    sizes = sorted(set(cfg.sizes)) if cfg.sizes else [cfg.n]
    sweep = cfg.sizes is not None
    targets = []
    for n in sizes:
        base = out / f"n{n}" if sweep else out
        targets += [base / name for name in output_names(cfg)]
    if sweep:
        targets += [out / "sweep.csv", out / "summary.json"]
    clash = [p for p in targets if p.exists()]
    if clash and not cfg.force:
        raise FileExistsError(f"{clash[0]} exists; pass --force to overwrite")

    print(f"bootcover {__version__} ({BACKEND} kernels): {spec.label}", file=sys.stderr)
    reports = {}
    for n in sizes:
        records = run_experiment(
            spec, n, cfg.N, cfg.B, cfg.coverages, cfg.seed,
            pseudovalue=cfg.pseudovalue, weighted_bayes=cfg.weighted_bayes,
            workers=workers, progress=True,
        )
        reports[n] = write_experiment(out / f"n{n}" if sweep else out, cfg, spec, n, records)

    if sweep:
        rows = []
        for n, rep in reports.items():
            for m, c, cell in rep.rows():
                rows.append([n, m.short, _pct(c), 100.0 * cell.under_pct, 100.0 * cell.over_pct,
                             100.0 * cell.effective_coverage, rep.sigma_log10_mean])
        write_table(out / "sweep.csv",
                    ["n", "method", "coverage", "under_pct", "over_pct", "effective_pct", "sigma_log10_xbar"], rows)
        top = {"config": cfg.to_dict(), "ground_truth": spec.to_dict(), "true_mean": true_mean(spec),
               "sizes": sizes, "version": __version__}
        (out / "summary.json").write_text(json.dumps(top, indent=2) + "\n")

    for n, rep in reports.items():
        for m, c, cell in rep.rows():
            print(f"n={n}\t{m.short}\t{_pct(c)}%\tunder={100 * cell.under_pct:.1f}\t"
                  f"over={100 * cell.over_pct:.1f}\teffective={100 * cell.effective_coverage:.1f}")
    return reports


# --------------------------------------------------------------------------- weights / moments


def marginal_ks(weights):
    """KS distance of each column of a (draws, n) weight matrix to Beta(1, n - 1)."""
    n = weights.shape[1]
    if n == 1:
        return [float(np.max(np.abs(weights[:, 0] - 1.0)))]
    ref = stats.beta(1, n - 1).cdf
    return [float(stats.kstest(weights[:, i], ref).statistic) for i in range(n)]


def weights_check(n, draws, seed, out, bins=20, force=False):
    out = Path(out)
    targets = [out / "weights_hist.csv", out / "weights_ks.csv"]
    if any(p.exists() for p in targets) and not force:
        raise FileExistsError(f"{out} already holds weights-check output; pass --force to overwrite")
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    constructions = {"gaps": np.array([dirichlet_weights_gaps(n, rng) for _ in range(draws)])}
    if n >= 2:
        constructions["naive"] = np.array([dirichlet_weights_naive(n, rng) for _ in range(draws)])

    hist_rows, ks_rows = [], []
    for name, w in constructions.items():
        for i, ks in enumerate(marginal_ks(w)):
            ks_rows.append([name, i + 1, ks])
            if n == 1:
                hist_rows.append([name, 1, 1.0, 1.0, 1.0])
                continue
            density, edges = np.histogram(w[:, i], bins=bins, range=(0.0, 1.0), density=True)
            hist_rows += [[name, i + 1, float(a), float(b), float(d)] for a, b, d in zip(edges[:-1], edges[1:], density)]
    write_table(out / "weights_hist.csv", ["construction", "index", "bin_lo", "bin_hi", "density"], hist_rows)
    write_table(out / "weights_ks.csv", ["construction", "index", "ks_beta"], ks_rows)
    for name, w in constructions.items():
        ks = [row[2] for row in ks_rows if row[0] == name]
        print(f"{name}\tn={n}\tdraws={draws}\tmax_ks={max(ks):.4f}\tmean_weight={w.mean():.4f}")
    return ks_rows


def _fmt_moment(v):
    return "not defined" if v is None else f"{v:.3g}"


def print_moments(spec):
    m = moment_summary(spec)
    print(f"distribution\t{spec.label}")
    print(f"mean\t{true_mean(spec):.6g}")
    for key, value in m.as_dict().items():
        print(f"{key}\t{_fmt_moment(value)}")


# --------------------------------------------------------------------------- argument parsing


def _add_family_args(p):
    p.add_argument("--family", choices=[f.value for f in Family if f is not Family.EMPIRICAL])
    p.add_argument("--k", type=float, help="decades spanned by log-uniform")
    p.add_argument("--alpha", type=float, help="power-law-unit or pareto exponent")
    p.add_argument("--lambda", dest="lam", type=float, help="exponential rate")
    p.add_argument("--mu", type=float, help="normal location")
    p.add_argument("--sigma", type=float, help="normal scale")


def _add_experiment_args(p):
    p.add_argument("--config", help="JSON config (or a previous summary.json); flags override it")
    p.add_argument("--n", type=int, help="synthetic sample size")
    p.add_argument("--N", type=int, help=f"number of synthetic samples (default {DEFAULT_N})")
    p.add_argument("--B", type=int, help=f"bootstrap replicates (default {DEFAULT_B})")
    p.add_argument("--coverage", dest="coverages", type=float, action="append",
                   help="nominal coverage in (0,1); repeatable (default 0.5 0.65 0.8 0.95)")
    p.add_argument("--sizes", type=int, nargs="+", help="run a sweep over these sample sizes")
    p.add_argument("--seed", type=int, help="master seed (default 0)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--force", action="store_true", default=None, help="overwrite existing outputs")
    p.add_argument("--pseudovalue", choices=[m.value for m in PseudoValue])
    p.add_argument("--weighted-bayes", dest="weighted_bayes", action="store_true", default=None)
    p.add_argument("--half-max-def", dest="half_max_def", choices=[d.value for d in HalfMaxDefinition])
    p.add_argument("--workers", type=int, help="threads for trials (default: CPU count; output does not depend on it)")


def build_parser():
    parser = argparse.ArgumentParser(prog="bootcover", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synthetic", help="coverage experiment on a parametric ground truth")
    _add_family_args(p)
    _add_experiment_args(p)

    p = sub.add_parser("empirical", help="coverage experiment resampling a dataset")
    p.add_argument("--data", help="CSV of positive values, or a bundled name (system_a, system_b)")
    _add_experiment_args(p)

    p = sub.add_parser("moments", help="distribution statistics of a parametric family")
    _add_family_args(p)

    p = sub.add_parser("weights-check", help="compare gaps and naive Dirichlet weight constructions")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--draws", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--out", required=True)
    p.add_argument("--force", action="store_true")
    return parser


_FLAG_KEYS = ("family", "k", "alpha", "lam", "mu", "sigma", "data", "n", "N", "B", "coverages", "sizes",
              "seed", "out", "force", "pseudovalue", "weighted_bayes", "half_max_def")


def config_from_args(args):
    values = {}
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if isinstance(loaded, dict) and "config" in loaded:
            loaded = loaded["config"]
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        values.update(loaded)
        if values.get("command", args.command) != args.command:
            raise ConfigError(f"config is for {values['command']!r}, not {args.command!r}")
    values["command"] = args.command
    for key in _FLAG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    if args.command == "empirical" and args.config is None:
        values.pop("family", None)
    return ExperimentConfig.from_mapping(values)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "moments":
            if args.family is None:
                raise ConfigError("--family is required")
            try:
                spec = DistributionSpec.from_params(args.family, k=args.k, alpha=args.alpha, lam=args.lam,
                                                    mu=args.mu, sigma=args.sigma)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
            print_moments(spec)
            return EXIT_OK
        if args.command == "weights-check":
            if args.n < 1 or args.draws < 1 or args.bins < 1 or args.seed < 0:
                raise ConfigError("--n, --draws and --bins must be positive and --seed nonnegative")
            weights_check(args.n, args.draws, args.seed, args.out, args.bins, args.force)
            return EXIT_OK
        cfg = config_from_args(args)
        if args.workers is not None and args.workers < 1:
            raise ConfigError("--workers must be positive")
        run_config(cfg, workers=args.workers)
        return EXIT_OK
    except ConfigError as exc:
        print(f"bootcover: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, DatasetError) as exc:
        print(f"bootcover: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
