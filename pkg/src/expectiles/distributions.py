"""Population expectiles.

Discrete laws get an exact piecewise-rational curve (the same machinery as
sample expectiles, with probabilities in place of multiplicities).  Any
other model only needs a CDF and the upper partial moment
``E[(Y - x)+]``: the expectation of the identification function is

    E I_tau(x, Y) = tau * U(x) - (1 - tau) * (U(x) - mean + x),

continuous and strictly decreasing in ``x``, so a bracketing solver always
finds the root.
"""
from __future__ import annotations

import math
from abc import ABC, abstractmethod

import numpy as np
from scipy import integrate, optimize, special

from ._curve import AtomCurve
from .empirical import BreakpointTable

__all__ = [
    "ConvergenceError",
    "DistributionModel",
    "DiscreteDistribution",
    "StudentT",
    "discrete_breakpoints",
    "discrete_expectile",
    "solve_expectile",
    "t_upper_partial",
    "t_tail_constant",
    "expectile_derivative",
    "population_identification",
    "model_from_json",
]


class ConvergenceError(RuntimeError):
    """A numerical routine failed to reach its tolerance."""


def _check_tau(tau):
    tau = float(tau)
    if not 0.0 < tau < 1.0:
        raise ValueError(f"tau must lie in the open interval (0, 1), got {tau!r}")
    return tau


class DistributionModel(ABC):
    """Univariate law with finite mean.

    Subclasses provide the CDF, the point masses, the mean and the upper
    partial moment ``E[(Y - x)+]``; everything else is derived.
    """

    @abstractmethod
    def cdf(self, x): ...

    @abstractmethod
    def point_mass(self, x): ...

    @abstractmethod
    def upper_partial(self, x): ...

    @property
    @abstractmethod
    def mean(self) -> float: ...

    @property
    @abstractmethod
    def support(self) -> tuple[float, float]: ...

    @property
    def has_finite_variance(self) -> bool:
        return True

    @abstractmethod
    def expect(self, fn, points=()):
        """``E fn(Y)``; ``points`` are kinks of ``fn`` (used by quadrature)."""

    @property
    def label(self) -> str:
        return type(self).__name__.lower()

    def cdf_left(self, x):
        return self.cdf(x) - self.point_mass(x)

    def identification(self, x, tau):
        u = self.upper_partial(x)
        return tau * u - (1.0 - tau) * (u - self.mean + x)

    def expectile(self, tau, tol=1e-12):
        return solve_expectile(self, tau, tol)

    @property
    def variance(self) -> float:
        if not self.has_finite_variance:
            return math.inf
        mu = self.mean
        return float(self.expect(lambda y: (y - mu) ** 2, points=(mu,)))

    def to_json(self) -> dict:
        raise NotImplementedError


class DiscreteDistribution(DistributionModel):
    """Law with finitely many atoms.

    Parameters
    ----------
    support : array_like
        Strictly increasing atoms.
    probs : array_like
        Positive probabilities summing to one (to 1e-12).
    """

    def __init__(self, support, probs):
        a = np.asarray(support, dtype=float).ravel()
        p = np.asarray(probs, dtype=float).ravel()
        if a.size == 0 or a.size != p.size:
            raise ValueError("support and probs must be nonempty and of equal length")
        if not np.all(np.isfinite(a)):
            raise ValueError("support must be finite")
        if np.any(np.diff(a) <= 0):
            raise ValueError("support must be strictly increasing")
        if np.any(p <= 0) or not np.all(np.isfinite(p)):
            raise ValueError("probs must be positive")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError(f"probs must sum to 1, got {p.sum()!r}")
        a.setflags(write=False)
        p.setflags(write=False)
        self.atoms = a
        self.probs = p
        self._cum = np.cumsum(p)
        self._curve = AtomCurve(a, p)
        self._mean = float(np.dot(a, p))

    def __repr__(self):
        return f"DiscreteDistribution(support={self.atoms.tolist()}, probs={self.probs.tolist()})"

    @property
    def label(self):
        return f"discrete{self.atoms.size}"

    @property
    def mean(self):
        return self._mean

    @property
    def support(self):
        return float(self.atoms[0]), float(self.atoms[-1])

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.atoms, x, side="right")
        return np.where(idx > 0, self._cum[np.maximum(idx - 1, 0)], 0.0)[()]

    def cdf_left(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.atoms, x, side="left")
        return np.where(idx > 0, self._cum[np.maximum(idx - 1, 0)], 0.0)[()]

    def point_mass(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.clip(np.searchsorted(self.atoms, x), 0, self.atoms.size - 1)
        return np.where(self.atoms[idx] == x, self.probs[idx], 0.0)[()]

    def upper_partial(self, x):
        x = np.asarray(x, dtype=float)
        d = np.maximum(self.atoms - x[..., None], 0.0)
        return (d @ self.probs)[()]

    def expect(self, fn, points=()):
        return float(np.dot(fn(self.atoms), self.probs))

    def expectile(self, tau, tol=1e-12):
        return discrete_expectile(self, tau)

    def to_json(self):
        return {"support": self.atoms.tolist(), "probs": self.probs.tolist()}


class StudentT(DistributionModel):
    """Standard Student t law with ``alpha`` degrees of freedom (``alpha > 1``)."""

    def __init__(self, alpha):
        alpha = float(alpha)
        if not alpha > 1.0 or not math.isfinite(alpha):
            raise ValueError(f"Student t needs alpha > 1 for a finite mean, got {alpha!r}")
        self.alpha = alpha
        self._log_norm = (
            special.gammaln((alpha + 1) / 2)
            - special.gammaln(alpha / 2)
            - 0.5 * math.log(alpha * math.pi)
        )

    def __repr__(self):
        return f"StudentT({self.alpha:g})"

    @property
    def label(self):
        return f"t{self.alpha:g}"

    @property
    def mean(self):
        return 0.0

    @property
    def support(self):
        return -math.inf, math.inf

    @property
    def has_finite_variance(self):
        return self.alpha > 2.0

    @property
    def variance(self):
        return self.alpha / (self.alpha - 2.0) if self.alpha > 2.0 else math.inf

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        a = self.alpha
        return np.exp(self._log_norm - (a + 1) / 2 * np.log1p(x * x / a))[()]

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        a = self.alpha
        tail = 0.5 * special.betainc(a / 2, 0.5, a / (a + x * x))
        return np.where(x < 0, tail, 1.0 - tail)[()]

    def sf(self, x):
        return self.cdf(-np.asarray(x, dtype=float))

    def point_mass(self, x):
        return np.zeros(np.shape(x))[()]

    def upper_partial(self, x):
        return t_upper_partial(self.alpha, x)

    def expect(self, fn, points=()):
        cuts = sorted({float(p) for p in points})
        pieces = [-np.inf, *cuts, np.inf]
        total = 0.0
        for lo, hi in zip(pieces[:-1], pieces[1:]):
            val, _ = integrate.quad(lambda y: fn(y) * self.pdf(y), lo, hi,
                                    epsabs=1e-13, epsrel=1e-12, limit=200)
            total += val
        return total

    def to_json(self):
        return {"t": self.alpha}


def model_from_json(obj) -> DistributionModel:
    """Build a model from ``{"t": alpha}`` or ``{"support": [...], "probs": [...]}``."""
    if not isinstance(obj, dict):
        raise ValueError("model JSON must be an object")
    if "t" in obj:
        return StudentT(obj["t"])
    if "support" in obj and "probs" in obj:
        return DiscreteDistribution(obj["support"], obj["probs"])
    raise ValueError('model JSON needs either {"t": alpha} or {"support": [...], "probs": [...]}')


def population_identification(m: DistributionModel, x, tau):
    """``E I_tau(x, Y)`` from the upper partial moment."""
    return m.identification(x, _check_tau(tau))


def discrete_breakpoints(d: DiscreteDistribution) -> BreakpointTable:
    """Level at which each atom is the expectile; 0 for the first, 1 for the last.

    Examples
    --------
    >>> d = DiscreteDistribution([0, 1, 2], [0.4, 0.5, 0.1])
    >>> discrete_breakpoints(d).taus.tolist()
    [0.0, 0.8, 1.0]
    """
    c = d._curve
    taus = c.taus.copy() if not c.degenerate else np.array([0.0, 1.0])
    return BreakpointTable(taus, d.atoms.copy())


def discrete_expectile(d: DiscreteDistribution, tau):
    tau = np.asarray(tau, dtype=float)
    if not np.all((tau > 0) & (tau < 1)):
        raise ValueError(f"tau must lie in the open interval (0, 1), got {tau!r}")
    return d._curve.value(tau)


def solve_expectile(m: DistributionModel, tau, tol=1e-12, maxiter=500):
    """Root of ``x -> E I_tau(x, Y)`` for an arbitrary model.

    The root is bracketed by doubling steps away from the mean and then
    polished with Brent's method.  ``tol`` bounds the identification value,
    relative to ``1 + |mean| + E[(Y - mean)+]``.
    """
    tau = _check_tau(tau)
    if not tol > 0:
        raise ValueError("tol must be positive")
    mean = m.mean
    scale = 1.0 + abs(mean) + float(m.upper_partial(mean))

    def g(x):
        return float(m.identification(x, tau))

    g0 = g(mean)
    if g0 == 0.0:
        return mean
    step = max(1.0, abs(mean))
    direction = 1.0 if g0 > 0 else -1.0
    prev = mean
    for _ in range(1100):
        far = mean + direction * step
        gf = g(far)
        if gf == 0.0:
            return far
        if (gf > 0) != (g0 > 0):
            lo, hi = sorted((prev, far))
            break
        prev = far
        step *= 2.0
    else:
        raise ConvergenceError(f"could not bracket the expectile for tau={tau}")
    if g(lo) == 0.0:
        return lo
    if g(hi) == 0.0:
        return hi
    try:
        x, res = optimize.brentq(g, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                                 maxiter=maxiter, full_output=True, disp=False)
    except (ValueError, RuntimeError) as exc:
        raise ConvergenceError(f"root finder failed on [{lo}, {hi}]: {exc}") from exc
    if not res.converged or abs(g(x)) > tol * scale:
        raise ConvergenceError(
            f"expectile not converged for tau={tau}: final bracket around {x!r}, "
            f"identification value {g(x)!r}"
        )
    return x


def t_upper_partial(alpha, x):
    """``E[(Y - x)+]`` for ``Y ~ t_alpha`` in closed form.

    Examples
    --------
    >>> round(float(t_upper_partial(3.0, 0.0)), 10) == round(3 ** 0.5 / math.pi, 10)
    True
    """
    alpha = float(alpha)
    if not alpha > 1.0:
        raise ValueError(f"alpha must exceed 1 (finite mean), got {alpha!r}")
    x = np.asarray(x, dtype=float)
    log_k = (0.5 * math.log(alpha) + special.gammaln((alpha + 1) / 2)
             - 0.5 * math.log(math.pi) - math.log(alpha - 1) - special.gammaln(alpha / 2))
    a = np.exp(log_k + (1 - alpha) / 2 * np.log1p(x * x / alpha))
    tail = 0.5 * special.betainc(alpha / 2, 0.5, alpha / (alpha + x * x))
    sf = np.where(x < 0, 1.0 - tail, tail)
    return (a - x * sf)[()]


def t_tail_constant(alpha):
    """Limit of ``y**alpha * P(Y > y)`` for ``Y ~ t_alpha``, ``1 < alpha < 2``.

    The same constant governs the left tail.
    """
    alpha = float(alpha)
    if not 1.0 < alpha < 2.0:
        raise ValueError(
            f"tail constant is only used for stable limits; alpha must lie in (1, 2), got {alpha!r}"
        )
    return math.exp(special.gammaln((alpha + 1) / 2) - special.gammaln(alpha / 2)
                    + (alpha / 2 - 1) * math.log(alpha) - 0.5 * math.log(math.pi))


def expectile_derivative(m: DistributionModel, tau):
    """Slope of ``tau -> mu_tau`` at a level whose expectile is not an atom.

    Uses ``int_mu^inf (1 - F) + int_-inf^mu F = 2 U(mu) + mu - mean``, so no
    quadrature is needed.
    """
    tau = _check_tau(tau)
    mu = float(m.expectile(tau))
    if float(m.point_mass(mu)) > 0.0:
        raise ValueError(f"derivative undefined at atom {mu!r} (tau={tau})")
    F = float(m.cdf(mu))
    num = 2.0 * float(m.upper_partial(mu)) + mu - m.mean
    return num / (tau * (1.0 - F) + (1.0 - tau) * F)
