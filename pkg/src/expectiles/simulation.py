"""Seeded Monte Carlo experiments on the limit behaviour of sample expectiles.

Every replication draws from its own stream, derived from
``(master_seed, n, r)`` through :class:`numpy.random.SeedSequence` spawn
keys, so results do not depend on execution order or on the number of
worker threads.

Experiments
-----------
run_stable_experiment
    heavy-tailed t data; scaled errors against the stable limit.
run_jump_experiment
    finite-variance data; ``sqrt(n)`` errors against the normal or
    two-piece normal limit.
run_consistency_experiment
    sup-norm error of the expectile curve on a level grid.
run_coverage_experiment
    coverage of plug-in normal confidence intervals.
"""
from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import special, stats

from .asymptotics import (
    StableLimit,
    confidence_interval,
    limit_law,
    mixture_limit,
    normal_covariance,
)
from .distributions import DiscreteDistribution, DistributionModel, StudentT
from .empirical import build_sample, expectile

__all__ = [
    "RngSpec",
    "ExperimentConfig",
    "SizeResult",
    "ExperimentReport",
    "sample_student_t",
    "sample_discrete",
    "draw",
    "ks_distance",
    "run_stable_experiment",
    "run_jump_experiment",
    "run_consistency_experiment",
    "run_coverage_experiment",
]

DEFAULT_REPS = {"stable": 10000, "jump": 20000, "consistency": 200, "coverage": 5000}


@dataclass(frozen=True)
class RngSpec:
    """Counter-based stream derivation from a master seed."""

    master_seed: int

    def stream(self, *key) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master_seed, spawn_key=tuple(int(k) for k in key))
        return np.random.Generator(np.random.PCG64(seq))


@dataclass(frozen=True)
class ExperimentConfig:
    model: DistributionModel
    tau: float
    sizes: tuple
    reps: int
    seed: int = 0
    standardization: str | None = None
    taus: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))
        object.__setattr__(self, "taus", tuple(float(t) for t in self.taus))
        if not 0.0 < float(self.tau) < 1.0:
            raise ValueError(f"tau must lie in (0, 1), got {self.tau!r}")
        if int(self.reps) < 1:
            raise ValueError("reps must be at least 1")
        if not self.sizes or min(self.sizes) < 2:
            raise ValueError("sample sizes must all be at least 2")
        if any(not 0.0 < t < 1.0 for t in self.taus):
            raise ValueError("tau grid must lie in (0, 1)")
        if self.standardization not in (None, "stable", "normal", "mixture"):
            raise ValueError(f"unknown standardization {self.standardization!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def rng(self):
        return RngSpec(int(self.seed))


@dataclass
class SizeResult:
    """Outcome for one sample size.  ``raw`` and ``standardized`` are in replication order."""

    n: int
    raw: np.ndarray
    standardized: np.ndarray
    ks: float | None = None
    reference: str | None = None
    ks_alternatives: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    density: dict | None = None

    @property
    def sorted_standardized(self):
        return np.sort(self.standardized)

    def to_dict(self):
        d = {"n": self.n, "reps": int(self.raw.size)}
        if self.ks is not None:
            d["ks"] = self.ks
            d["reference"] = self.reference
        if self.ks_alternatives:
            d["ks_alternatives"] = dict(self.ks_alternatives)
        d.update(self.summary)
        if self.density is not None:
            d["density"] = self.density
        return d


@dataclass
class ExperimentReport:
    experiment: str
    config: ExperimentConfig
    results: list
    limit: dict | None = None
    extra: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def ks(self):
        return [r.ks for r in self.results]

    def result(self, n):
        for r in self.results:
            if r.n == n:
                return r
        raise KeyError(n)

    @property
    def basename(self):
        cfg = self.config
        return f"{self.experiment}-{cfg.model.label}-{cfg.tau:g}-{cfg.seed}"

    def summary(self):
        """JSON-ready summary.  Wall time is left out so output is reproducible."""
        cfg = self.config
        out = {
            "experiment": self.experiment,
            "model": cfg.model.to_json(),
            "tau": cfg.tau,
            "sizes": list(cfg.sizes),
            "reps": cfg.reps,
            "seed": cfg.seed,
        }
        if cfg.taus:
            out["taus"] = list(cfg.taus)
        if self.limit is not None:
            out["limit"] = self.limit
        out.update(self.extra)
        out["results"] = [r.to_dict() for r in self.results]
        return out

    def to_json(self):
        return json.dumps(self.summary(), indent=2) + "\n"

    def to_csv(self):
        lines = ["n,r,raw,standardized"]
        for res in self.results:
            for r, (a, b) in enumerate(zip(res.raw, res.standardized)):
                lines.append(f"{res.n},{r},{a:.17g},{b:.17g}")
        return "\n".join(lines) + "\n"

    def write(self, outdir="."):
        """Write ``<basename>.csv`` and ``<basename>.json``; return both paths."""
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        csv_path = outdir / f"{self.basename}.csv"
        json_path = outdir / f"{self.basename}.json"
        csv_path.write_text(self.to_csv())
        json_path.write_text(self.to_json())
        return csv_path, json_path


def sample_student_t(alpha, n, stream: np.random.Generator):
    """``n`` draws of ``Z / sqrt(V / alpha)``, ``V = 2 * Gamma(alpha / 2)``."""
    alpha = float(alpha)
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    z = stream.standard_normal(n)
    v = 2.0 * stream.standard_gamma(alpha / 2.0, n)
    return z / np.sqrt(v / alpha)


def sample_discrete(d: DiscreteDistribution, n, stream: np.random.Generator):
    """Inverse-CDF draws from a discrete law."""
    u = stream.random(n)
    idx = np.searchsorted(np.cumsum(d.probs), u, side="right")
    return d.atoms[np.minimum(idx, d.atoms.size - 1)]


def draw(model, n, stream):
    if isinstance(model, StudentT):
        return sample_student_t(model.alpha, n, stream)
    if isinstance(model, DiscreteDistribution):
        return sample_discrete(model, n, stream)
    raise TypeError(f"no sampler for {type(model).__name__}")


def ks_distance(sorted_stats, reference_cdf):
    """Kolmogorov-Smirnov distance between the sample and ``reference_cdf``.

    ``reference_cdf`` is a callable or an array of CDF values at the
    (ascending) statistics.
    """
    x = np.asarray(sorted_stats, dtype=float)
    if x.size == 0:
        raise ValueError("empty statistics")
    if np.any(np.diff(x) < 0):
        raise ValueError("statistics must be sorted ascending")
    F = np.asarray(reference_cdf(x) if callable(reference_cdf) else reference_cdf, dtype=float)
    R = x.size
    i = np.arange(1, R + 1)
    return float(max(np.max(np.abs(i / R - F)), np.max(np.abs((i - 1) / R - F))))


def _replicate(fn, reps, threads):
    """Evaluate ``fn(r)`` for every replication; results in replication order."""
    threads = threads or os.cpu_count() or 1
    if threads <= 1 or reps < 2:
        return [fn(r) for r in range(reps)]
    chunks = np.array_split(np.arange(reps), min(threads * 4, reps))

    def work(idx):
        return [fn(int(r)) for r in idx]

    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(work, chunks))
    return [v for part in parts for v in part]


def _kde_curve(x, points=201):
    if x.size < 2 or np.ptp(x) == 0:
        return None
    kde = stats.gaussian_kde(x, bw_method="silverman")
    lo, hi = np.quantile(x, [0.001, 0.999])
    pad = 0.1 * (hi - lo)
    grid = np.linspace(lo - pad, hi + pad, points)
    return {"bandwidth": float(kde.factor * np.sqrt(kde.covariance[0, 0])),
            "x": grid.tolist(), "y": kde(grid).tolist()}


def _estimation_errors(cfg, n, tau, mu, threads):
    rng = cfg.rng

    def one(r):
        y = draw(cfg.model, n, rng.stream(n, r))
        return float(expectile(y, tau)) - mu

    return np.array(_replicate(one, cfg.reps, threads))


def run_stable_experiment(cfg: ExperimentConfig, threads=None) -> ExperimentReport:
    """Scaled errors ``n**(1-1/alpha) * c_tilde * (mu_hat - mu)`` against the stable limit."""
    m = cfg.model
    if not isinstance(m, StudentT) or not 1.0 < m.alpha < 2.0:
        raise ValueError("stable experiment needs a Student t model with 1 < alpha < 2")
    if cfg.standardization not in (None, "stable"):
        raise ValueError("stable experiment uses the stable standardization")
    start = time.perf_counter()
    lim = limit_law(m, cfg.tau)
    assert isinstance(lim, StableLimit)
    mu = float(m.expectile(cfg.tau))
    results = []
    for n in cfg.sizes:
        raw = _estimation_errors(cfg, n, cfg.tau, mu, threads)
        std = lim.scale(n) * raw
        xs = np.sort(std)
        results.append(SizeResult(n, raw, std, ks_distance(xs, lim.cdf), "stable"))
    rep = ExperimentReport("stable", cfg, results, lim.to_dict(), {"mu": mu})
    rep.wall_time = time.perf_counter() - start
    return rep


def run_jump_experiment(cfg: ExperimentConfig, threads=None) -> ExperimentReport:
    """``sqrt(n) * (mu_hat - mu)`` against the normal or two-piece normal limit.

    At an atom the report also carries the KS distances to the two pure
    normal laws ``N(0, (sigma1 sd_w)**2)`` and ``N(0, (sigma2 sd_w)**2)``.
    """
    m = cfg.model
    start = time.perf_counter()
    mix = mixture_limit(m, cfg.tau)
    mu = mix.mu
    if mix.has_atom:
        if cfg.standardization == "normal":
            raise ValueError("atom at the expectile: the normal standardization does not apply")
        ref_name, ref_cdf, limit = "mixture", mix.cdf, mix.to_dict()
    else:
        if cfg.standardization == "mixture":
            ref_name, ref_cdf, limit = "mixture", mix.cdf, mix.to_dict()
        else:
            nl = normal_covariance(m, [cfg.tau])
            sd = nl.sd()
            ref_name, limit = "normal", nl.to_dict()

            def ref_cdf(x, sd=sd):
                return special.ndtr(x / sd)

    results = []
    for n in cfg.sizes:
        raw = _estimation_errors(cfg, n, cfg.tau, mu, threads)
        std = math.sqrt(n) * raw
        xs = np.sort(std)
        res = SizeResult(n, raw, std, ks_distance(xs, ref_cdf), ref_name)
        if mix.has_atom:
            for name, s in (("normal_sigma1", mix.sigma1), ("normal_sigma2", mix.sigma2)):
                scale = s * mix.sd_w
                res.ks_alternatives[name] = ks_distance(xs, lambda x, c=scale: special.ndtr(x / c))
        res.summary["fraction_below_zero"] = float(np.mean(std < 0))
        res.density = _kde_curve(std)
        results.append(res)
    rep = ExperimentReport("jump", cfg, results, limit, {"mu": mu})
    rep.wall_time = time.perf_counter() - start
    return rep


def run_consistency_experiment(cfg: ExperimentConfig, threads=None) -> ExperimentReport:
    """Median over replications of ``max_tau |mu_hat(tau) - mu(tau)|`` per sample size."""
    if not cfg.taus:
        raise ValueError("consistency experiment needs a tau grid")
    start = time.perf_counter()
    taus = np.asarray(cfg.taus)
    mus = np.array([float(cfg.model.expectile(t)) for t in taus])
    rng = cfg.rng
    results = []
    for n in cfg.sizes:
        def one(r, n=n):
            y = draw(cfg.model, n, rng.stream(n, r))
            return float(np.max(np.abs(expectile(y, taus) - mus)))

        sup = np.array(_replicate(one, cfg.reps, threads))
        res = SizeResult(n, sup, sup)
        res.summary["median_sup_error"] = float(np.median(sup))
        results.append(res)
    med = [r.summary["median_sup_error"] for r in results]
    extra = {"mus": mus.tolist(),
             "strictly_decreasing": bool(all(a > b for a, b in zip(med, med[1:])))}
    rep = ExperimentReport("consistency", cfg, results, None, extra)
    rep.wall_time = time.perf_counter() - start
    return rep


def run_coverage_experiment(cfg: ExperimentConfig, level=0.95, threads=None) -> ExperimentReport:
    """Fraction of plug-in normal intervals that contain the true expectile.

    ``raw`` holds ``mu_hat - mu``; ``standardized`` holds the studentized
    error, which lies in ``[-z, z]`` exactly when the interval covers.
    """
    m = cfg.model
    start = time.perf_counter()
    mu = float(m.expectile(cfg.tau))
    if float(m.point_mass(mu)) > 0:
        raise ValueError("coverage experiment needs a law without an atom at the expectile")
    z = float(special.ndtri(0.5 + 0.5 * level))
    rng = cfg.rng
    results = []
    for n in cfg.sizes:
        def one(r, n=n):
            s = build_sample(draw(m, n, rng.stream(n, r)))
            lo, hi = confidence_interval(s, cfg.tau, level)
            est = 0.5 * (lo + hi)
            half = 0.5 * (hi - lo)
            return est - mu, (est - mu) / (half / z) if half > 0 else math.inf, lo <= mu <= hi

        out = _replicate(one, cfg.reps, threads)
        raw = np.array([o[0] for o in out])
        std = np.array([o[1] for o in out])
        covered = np.array([o[2] for o in out])
        res = SizeResult(n, raw, std)
        res.summary["coverage"] = float(np.mean(covered))
        results.append(res)
    rep = ExperimentReport("coverage", cfg, results, None, {"mu": mu, "level": level})
    rep.wall_time = time.perf_counter() - start
    return rep
