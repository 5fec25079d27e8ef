"""Piecewise-rational expectile curve of a finite weighted point set.

Shared by sample expectiles (weights are multiplicities) and discrete
laws (weights are probabilities).  Everything is expressed through the
one-sided gap sums

    lower[j] = sum_{k <= j} w_k (a_j - a_k)
    upper[j] = sum_{k >  j} w_k (a_k - a_j)

which are accumulated from nonnegative increments, so the breakpoints
lower / (lower + upper) carry no cancellation error.
"""
from __future__ import annotations

import numpy as np


class AtomCurve:
    """Expectile curve of atoms ``a_0 < ... < a_{m-1}`` with weights ``w``."""

    def __init__(self, atoms, weights):
        a = np.asarray(atoms, dtype=float)
        w = np.asarray(weights, dtype=float)
        self.atoms = a
        self.weights = w
        self.total = float(w.sum())
        self.cum = np.cumsum(w)
        gaps = np.diff(a)
        m = a.size
        lower = np.zeros(m)
        upper = np.zeros(m)
        if m > 1:
            lower[1:] = np.cumsum(self.cum[:-1] * gaps)
            tail = self.total - self.cum[:-1]
            upper[:-1] = np.cumsum((tail * gaps)[::-1])[::-1]
        self.lower = lower
        self.upper = upper
        if m > 1:
            taus = lower / (lower + upper)
            taus[0], taus[-1] = 0.0, 1.0
        else:
            taus = np.array([0.0, 1.0])
        self.taus = taus

    @property
    def degenerate(self):
        return self.atoms.size == 1

    def segment(self, tau, side="right"):
        """Index j with ``taus[j] <= tau < taus[j+1]`` (``side='left'``: ``<``, ``<=``)."""
        m = self.atoms.size
        j = np.searchsorted(self.taus, tau, side=side) - 1
        return np.clip(j, 0, m - 2)

    def denominator(self, j, tau):
        wj = self.cum[j]
        return (1.0 - tau) * wj + tau * (self.total - wj)

    def value(self, tau):
        tau = np.asarray(tau, dtype=float)
        if self.degenerate:
            return np.full(tau.shape, self.atoms[0])[()]
        j = self.segment(tau)
        num = tau * self.upper[j] - (1.0 - tau) * self.lower[j]
        # num / den is the offset from a_j; it lies in [0, a_{j+1} - a_j)
        out = self.atoms[j] + num / self.denominator(j, tau)
        out = np.minimum(out, self.atoms[j + 1])
        # exact anchors at breakpoints
        hit = tau == self.taus[j]
        out = np.where(hit, self.atoms[j], out)
        hit_last = tau == self.taus[j + 1]
        out = np.where(hit_last, self.atoms[j + 1], out)
        return out[()]

    def derivative(self, tau, side=None):
        """d value / d tau; ``side`` selects the segment at a breakpoint."""
        tau = np.asarray(tau, dtype=float)
        if self.degenerate:
            return np.zeros(tau.shape)[()]
        if side is None:
            on_break = np.isin(tau, self.taus[1:-1])
            if np.any(on_break):
                raise ValueError(
                    "derivative undefined at breakpoint; pass side='left' or 'right'"
                )
            side = "right"
        if side not in ("left", "right"):
            raise ValueError(f"side must be 'left' or 'right', got {side!r}")
        j = self.segment(tau, side=side)
        wj = self.cum[j]
        num = wj * self.upper[j] + (self.total - wj) * self.lower[j]
        return (num / self.denominator(j, tau) ** 2)[()]

    def tau_of(self, x):
        x = np.asarray(x, dtype=float)
        if self.degenerate:
            return np.full(x.shape, 0.5)[()]
        j = np.clip(np.searchsorted(self.atoms, x, side="right") - 1, 0, self.atoms.size - 2)
        dx = x - self.atoms[j]
        wj = self.cum[j]
        lo = self.lower[j] + wj * dx
        up = self.upper[j] - (self.total - wj) * dx
        up = np.maximum(up, 0.0)
        return (lo / (lo + up))[()]

    def coefficients(self):
        """Per-segment (A, B, C, D) with value = (A + tau*B) / (C + tau*D)."""
        if self.degenerate:
            a = self.atoms[0] * self.total
            return (np.array([a]), np.array([0.0]), np.array([self.total]), np.array([0.0]))
        first = np.cumsum(self.atoms * self.weights)[:-1]
        total_first = float(np.dot(self.atoms, self.weights))
        cum = self.cum[:-1]
        A = first
        B = (total_first - first) - first
        C = cum
        D = (self.total - cum) - cum
        return A, B, C, D
