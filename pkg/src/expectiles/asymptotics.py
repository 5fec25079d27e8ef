"""Limit laws of sample expectiles.

Three regimes, depending on the population law at the expectile:

* finite variance, no atom at the expectile: joint normal limit at rate
  ``sqrt(n)`` (:func:`normal_covariance`);
* finite variance, atom at the expectile: the two-piece normal law of
  ``sigma1 * W * 1{W > 0} + sigma2 * W * 1{W < 0}`` (:func:`mixture_limit`);
* power tails with index ``1 < alpha < 2``: a stable limit at rate
  ``n ** (1 - 1/alpha)`` (:func:`stable_limit`).

All limit objects serialize with :meth:`to_dict`, tagged by ``"kind"``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .distributions import DistributionModel, StudentT, t_tail_constant
from .empirical import SortedSample, build_sample, expectile
from .stable import QuadratureError, stable_cdf, stable_pdf

__all__ = [
    "NormalLimit",
    "MixtureLimit",
    "StableLimit",
    "normal_covariance",
    "estimate_covariance",
    "confidence_interval",
    "mixture_limit",
    "mixture_cdf",
    "mixture_pdf",
    "stable_limit",
    "limit_law",
    "limit_from_dict",
    "stable_cdf",
    "stable_pdf",
    "QuadratureError",
]


def _norm_cdf(z):
    return special.ndtr(z)


def _ident(x, tau, y):
    d = y - x
    return np.where(d >= 0, tau, 1.0 - tau) * d


def _curvature(tau, F):
    return tau * (1.0 - F) + (1.0 - tau) * F


@dataclass(frozen=True)
class NormalLimit:
    """Joint normal limit of ``sqrt(n) * (mu_hat - mu)`` at several levels."""

    taus: np.ndarray
    mus: np.ndarray
    sigma: np.ndarray

    kind = "normal"

    def sd(self, i=0):
        return math.sqrt(self.sigma[i, i])

    def cdf(self, x, i=0):
        return _norm_cdf(np.asarray(x, dtype=float) / self.sd(i))[()]

    def to_dict(self):
        return {
            "kind": self.kind,
            "taus": self.taus.tolist(),
            "mus": self.mus.tolist(),
            "sigma": self.sigma.tolist(),
        }


@dataclass(frozen=True)
class MixtureLimit:
    """Law of ``sigma1 * W * 1{W>0} + sigma2 * W * 1{W<0}``, ``W ~ N(0, sd_w**2)``."""

    sigma1: float
    sigma2: float
    sd_w: float
    tau: float = math.nan
    mu: float = math.nan

    kind = "mixture"

    @property
    def has_atom(self):
        return self.sigma1 != self.sigma2

    def cdf(self, x):
        return mixture_cdf(self, x)

    def pdf(self, x):
        return mixture_pdf(self, x)

    def to_dict(self):
        return {
            "kind": self.kind,
            "tau": self.tau,
            "mu": self.mu,
            "sigma1": self.sigma1,
            "sigma2": self.sigma2,
            "sd_w": self.sd_w,
        }


@dataclass(frozen=True)
class StableLimit:
    """Stable limit: ``n**rate_exponent * c_tilde * (mu_hat - mu)`` -> ``S(alpha, beta_tilde) / denom``."""

    alpha: float
    beta_tilde: float
    c_tilde: float
    rate_exponent: float
    denom: float
    tau: float = math.nan

    kind = "stable"

    def cdf(self, x):
        return stable_cdf(self.alpha, self.beta_tilde, self.denom * np.asarray(x, dtype=float))

    def pdf(self, x):
        return self.denom * stable_pdf(self.alpha, self.beta_tilde,
                                       self.denom * np.asarray(x, dtype=float))

    def scale(self, n):
        """Factor turning ``mu_hat - mu`` into the standardized statistic."""
        return n ** self.rate_exponent * self.c_tilde

    def to_dict(self):
        return {
            "kind": self.kind,
            "tau": self.tau,
            "alpha": self.alpha,
            "beta_tilde": self.beta_tilde,
            "c_tilde": self.c_tilde,
            "rate_exponent": self.rate_exponent,
            "denom": self.denom,
        }


def limit_from_dict(d):
    kind = d.get("kind")
    if kind == "normal":
        return NormalLimit(np.asarray(d["taus"], float), np.asarray(d["mus"], float),
                           np.asarray(d["sigma"], float))
    if kind == "mixture":
        return MixtureLimit(d["sigma1"], d["sigma2"], d["sd_w"], d.get("tau", math.nan),
                            d.get("mu", math.nan))
    if kind == "stable":
        return StableLimit(d["alpha"], d["beta_tilde"], d["c_tilde"], d["rate_exponent"],
                           d["denom"], d.get("tau", math.nan))
    raise ValueError(f"unknown limit kind {kind!r}")


def _taus(taus):
    t = np.atleast_1d(np.asarray(taus, dtype=float))
    if t.ndim != 1 or t.size == 0 or not np.all((t > 0) & (t < 1)):
        raise ValueError(f"taus must be a nonempty list of levels in (0, 1), got {taus!r}")
    return t


def normal_covariance(m: DistributionModel, taus) -> NormalLimit:
    """Asymptotic covariance of ``sqrt(n) * (mu_hat_i - mu_i)``.

    ``Sigma_ij = E[I_i I_j] / (d_i d_j)`` with ``I_i = I_{tau_i}(mu_i, Y)``
    and ``d_i = tau_i (1 - F(mu_i)) + (1 - tau_i) F(mu_i)``.

    Raises
    ------
    ValueError
        If some ``mu_i`` is an atom of ``m`` (use :func:`mixture_limit`) or
        the variance is infinite (use :func:`stable_limit`).
    """
    t = _taus(taus)
    if not m.has_finite_variance:
        raise ValueError("infinite second moment: no normal limit; use stable_limit")
    mus = np.array([float(m.expectile(ti)) for ti in t])
    for ti, mi in zip(t, mus):
        if float(m.point_mass(mi)) > 0:
            raise ValueError(
                f"atom at the expectile mu={mi!r} (tau={ti}); the limit is not normal, "
                "use mixture_limit"
            )
    dens = _curvature(t, np.asarray(m.cdf(mus), dtype=float))
    k = t.size
    sigma = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            ti, tj, mi, mj = t[i], t[j], mus[i], mus[j]
            cross = m.expect(lambda y: _ident(mi, ti, y) * _ident(mj, tj, y), points=(mi, mj))
            sigma[i, j] = sigma[j, i] = cross / (dens[i] * dens[j])
    return NormalLimit(t, mus, sigma)


def estimate_covariance(sample, taus) -> NormalLimit:
    """Plug-in estimate of the normal-limit covariance from a sample.

    Uses the sample expectiles, the right-continuous empirical CDF and
    sample averages of the identification products.  At ``tau = 1/2`` the
    estimate is the (1/n) sample variance.
    """
    s = sample if isinstance(sample, SortedSample) else build_sample(sample)
    if s.distinct.size < 2:
        raise ValueError("zero variance: all observations are equal")
    t = _taus(taus)
    mus = np.atleast_1d(expectile(s, t))
    F = np.searchsorted(s.values, mus, side="right") / s.n
    dens = _curvature(t, F)
    y = s.values
    ids = np.stack([_ident(mi, ti, y) for ti, mi in zip(t, mus)])
    sigma = (ids @ ids.T) / s.n / np.outer(dens, dens)
    return NormalLimit(t, mus, sigma)


def confidence_interval(sample, tau, level=0.95):
    """Normal-theory interval ``mu_hat +- z * sqrt(Sigma_hat / n)``.

    Only valid when the population has no atom at the expectile.
    """
    level = float(level)
    if not 0.0 <= level < 1.0:
        raise ValueError(f"level must lie in [0, 1), got {level!r}")
    s = sample if isinstance(sample, SortedSample) else build_sample(sample)
    est = estimate_covariance(s, [tau])
    mu = float(est.mus[0])
    z = float(special.ndtri(0.5 + 0.5 * level))
    half = z * math.sqrt(est.sigma[0, 0] / s.n)
    return mu - half, mu + half


def mixture_limit(m: DistributionModel, tau) -> MixtureLimit:
    """Limit of ``sqrt(n) * (mu_hat - mu)`` allowing an atom at the expectile.

    Examples
    --------
    >>> from expectiles.distributions import DiscreteDistribution
    >>> lim = mixture_limit(DiscreteDistribution([0, 1, 2], [.4, .5, .1]), 0.8)
    >>> round(1 / lim.sigma1, 12), round(1 / lim.sigma2, 12), round(lim.sd_w ** 2, 12)
    (0.26, 0.56, 0.08)
    """
    tau = float(_taus([tau])[0])
    if not m.has_finite_variance:
        raise ValueError("infinite second moment: use stable_limit")
    mu = float(m.expectile(tau))
    F = float(m.cdf(mu))
    F_left = float(m.cdf_left(mu))
    var_w = m.expect(lambda y: _ident(mu, tau, y) ** 2, points=(mu,))
    return MixtureLimit(
        sigma1=1.0 / _curvature(tau, F),
        sigma2=1.0 / _curvature(tau, F_left),
        sd_w=math.sqrt(var_w),
        tau=tau,
        mu=mu,
    )


def mixture_cdf(lim: MixtureLimit, x):
    x = np.asarray(x, dtype=float)
    scale = np.where(x < 0, lim.sigma2, lim.sigma1) * lim.sd_w
    return _norm_cdf(x / scale)[()]


def mixture_pdf(lim: MixtureLimit, x):
    x = np.asarray(x, dtype=float)
    scale = np.where(x < 0, lim.sigma2, lim.sigma1) * lim.sd_w
    z = x / scale
    return (np.exp(-0.5 * z * z) / (math.sqrt(2 * math.pi) * scale))[()]


def stable_limit(alpha, c_plus, c_minus, tau, F_at_mu) -> StableLimit:
    """Stable-limit constants for a law in the normal domain of attraction.

    ``c_plus`` and ``c_minus`` are the limits of ``y**alpha P(Y > y)`` and
    ``y**alpha P(Y < -y)``; ``F_at_mu`` is the CDF at the expectile.
    """
    alpha = float(alpha)
    if not 1.0 < alpha < 2.0:
        raise ValueError(f"stable limit needs 1 < alpha < 2, got {alpha!r}")
    if c_plus < 0 or c_minus < 0 or c_plus + c_minus <= 0:
        raise ValueError("tail constants must be nonnegative with a positive sum")
    tau = float(_taus([tau])[0])
    up = tau ** alpha * c_plus
    down = (1.0 - tau) ** alpha * c_minus
    c_tilde = (2.0 * math.gamma(alpha) * math.sin(math.pi * alpha / 2)
               / (math.pi * (up + down))) ** (1.0 / alpha)
    beta = (up - down) / (up + down)
    return StableLimit(alpha, beta, c_tilde, 1.0 - 1.0 / alpha, _curvature(tau, F_at_mu), tau)


def limit_law(m: DistributionModel, tau):
    """The applicable limit law of the sample ``tau``-expectile under ``m``."""
    if isinstance(m, StudentT) and not m.has_finite_variance:
        if m.alpha >= 2.0:
            raise ValueError(
                f"t with alpha={m.alpha:g}: boundary case not supported; "
                "supported ranges are 1 < alpha < 2 (stable) and alpha > 2 (normal)"
            )
        c = t_tail_constant(m.alpha)
        mu = float(m.expectile(tau))
        return stable_limit(m.alpha, c, c, tau, float(m.cdf(mu)))
    mu = float(m.expectile(tau))
    if float(m.point_mass(mu)) > 0:
        return mixture_limit(m, tau)
    return normal_covariance(m, [tau])
