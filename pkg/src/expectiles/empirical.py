"""Sample expectiles in closed form.

The empirical expectile curve ``tau -> mu_hat(tau)`` is piecewise rational
in ``tau``: between consecutive breakpoints it is the ratio of two linear
functions built from partial sums of the order statistics.  Once the
sample is sorted, every query is a binary search plus a handful of flops,
so no root-finding is involved anywhere in this module.

>>> s = build_sample([0, 0, 0, 0, 1, 1, 1, 1, 1, 2])
>>> round(float(expectile(s, 0.7)), 6)
0.907407
>>> float(expectile(s, 0.8))
1.0
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ._curve import AtomCurve

__all__ = [
    "SortedSample",
    "BreakpointTable",
    "ExpectileCurve",
    "build_sample",
    "breakpoints",
    "expectile",
    "expectile_curve",
    "tau_of",
    "curve_derivative",
    "identification_value",
]


def _frozen(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SortedSample:
    """Order statistics of a sample, with tie multiplicities and partial sums.

    ``prefix_sums`` has length ``n + 1``: ``prefix_sums[i]`` is the sum of
    the ``i`` smallest observations, so ``prefix_sums[0] == 0`` and
    ``prefix_sums[n] == total_sum``.
    """

    values: np.ndarray
    distinct: np.ndarray
    counts: np.ndarray
    prefix_sums: np.ndarray
    total_sum: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "total_sum", float(self.prefix_sums[-1]))

    @property
    def n(self):
        return self.values.size

    @property
    def mean(self):
        return self.total_sum / self.n

    @cached_property
    def _curve(self):
        return AtomCurve(self.distinct, self.counts)

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"SortedSample(n={self.n}, distinct={self.distinct.size})"


@dataclass(frozen=True)
class BreakpointTable:
    """Levels ``taus[i]`` at which the expectile equals ``anchor_values[i]``.

    For a sample with at least two distinct values the two arrays have the
    same length, ``taus[0] == 0`` and ``taus[-1] == 1``.  A constant sample
    gives ``taus == (0, 1)`` with a single anchor.
    """

    taus: np.ndarray
    anchor_values: np.ndarray

    def __len__(self):
        return self.taus.size

    def rows(self):
        if self.anchor_values.size == 1:
            c = float(self.anchor_values[0])
            return [(0.0, c), (1.0, c)]
        return [(float(t), float(a)) for t, a in zip(self.taus, self.anchor_values)]


@dataclass(frozen=True)
class ExpectileCurve:
    """Breakpoints plus per-segment coefficients.

    On ``[taus[j], taus[j+1])`` the expectile is
    ``(A[j] + tau * B[j]) / (C[j] + tau * D[j])``.
    """

    breakpoints: BreakpointTable
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __call__(self, tau):
        tau = np.asarray(tau, dtype=float)
        taus = self.breakpoints.taus
        j = np.clip(np.searchsorted(taus, tau, side="right") - 1, 0, self.A.size - 1)
        return ((self.A[j] + tau * self.B[j]) / (self.C[j] + tau * self.D[j]))[()]


def build_sample(data) -> SortedSample:
    """Sort ``data`` and tabulate ties and partial sums.

    Raises
    ------
    ValueError
        If ``data`` is empty or contains a NaN or infinite value.
    """
    y = np.asarray(data, dtype=float).ravel()
    if y.size == 0:
        raise ValueError("empty sample")
    bad = np.flatnonzero(~np.isfinite(y))
    if bad.size:
        raise ValueError(f"non-finite value at index {int(bad[0])}: {y[bad[0]]!r}")
    y = np.sort(y, kind="stable")
    distinct, counts = np.unique(y, return_counts=True)
    prefix = np.empty(y.size + 1)
    prefix[0] = 0.0
    np.cumsum(y, out=prefix[1:])
    return SortedSample(_frozen(y), _frozen(distinct), _frozen(counts), _frozen(prefix))


def _as_sample(sample):
    if isinstance(sample, SortedSample):
        return sample
    return build_sample(sample)


def _check_tau(tau):
    t = np.asarray(tau, dtype=float)
    if not np.all((t > 0.0) & (t < 1.0)):
        raise ValueError(f"tau must lie in the open interval (0, 1), got {tau!r}")
    return t


def breakpoints(sample) -> BreakpointTable:
    """Breakpoint table of the empirical expectile curve.

    One level per distinct order statistic, computed with ``i`` equal to
    the number of observations ``<=`` that value.

    Examples
    --------
    >>> breakpoints(build_sample([0, 1, 2])).taus.tolist()
    [0.0, 0.5, 1.0]
    """
    s = _as_sample(sample)
    c = s._curve
    taus = c.taus.copy() if not c.degenerate else np.array([0.0, 1.0])
    return BreakpointTable(_frozen(taus), _frozen(s.distinct.copy()))


def expectile_curve(sample) -> ExpectileCurve:
    s = _as_sample(sample)
    A, B, C, D = s._curve.coefficients()
    return ExpectileCurve(breakpoints(s), *(_frozen(v) for v in (A, B, C, D)))


def expectile(sample, tau):
    """Empirical ``tau``-expectile; ``tau`` may be a scalar or an array.

    At a breakpoint the corresponding order statistic is returned exactly.
    """
    s = _as_sample(sample)
    t = _check_tau(tau)
    return s._curve.value(t)


def tau_of(sample, x):
    """Inverse of the expectile curve: the level whose expectile is ``x``.

    Returns 0 at the sample minimum and 1 at the maximum.
    """
    s = _as_sample(sample)
    xv = np.asarray(x, dtype=float)
    lo, hi = s.distinct[0], s.distinct[-1]
    if np.any((xv < lo) | (xv > hi)) or np.any(np.isnan(xv)):
        raise ValueError(f"x must lie in the sample range [{lo}, {hi}], got {x!r}")
    return s._curve.tau_of(xv)


def curve_derivative(sample, tau, side=None):
    """Slope of the empirical expectile curve.

    The curve is only piecewise differentiable.  At a breakpoint a one-sided
    slope must be requested with ``side='left'`` or ``side='right'``;
    otherwise a ``ValueError`` is raised.
    """
    s = _as_sample(sample)
    t = _check_tau(tau)
    return s._curve.derivative(t, side=side)


def identification_value(sample, x, tau):
    """Sample mean of the identification function ``I_tau(x, Y_k)``.

    Computed by a direct pass over the observations (no partial-sum
    tables), so it can serve as an independent check of :func:`expectile`.
    Strictly decreasing and continuous in ``x``.
    """
    s = _as_sample(sample)
    t = float(_check_tau(tau))
    d = s.values - float(x)
    pos = np.where(d >= 0.0, d, 0.0)
    neg = np.where(d < 0.0, -d, 0.0)
    return t * math.fsum(pos) / s.n - (1.0 - t) * math.fsum(neg) / s.n
