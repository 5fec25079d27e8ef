"""
The sample expectile curve without root finding
===============================================

A sample expectile solves a piecewise linear equation, so the whole curve
``tau -> mu_hat(tau)`` is piecewise rational. Between consecutive
breakpoints it is a ratio of two affine functions of ``tau``, and at each
breakpoint it passes through an order statistic.

This script computes the breakpoint table for a small sample with ties,
evaluates the curve on a fine grid, and overlays the population curve of
the three-point law the sample came from.
"""

import matplotlib.pyplot as plt
import numpy as np

from expectiles import DiscreteDistribution, breakpoints, build_sample, expectile, expectile_curve

# %%
# A sample with ties
# ------------------
# Four zeros, five ones and one two. Ties are stored once with their
# multiplicity, so the table has one row per distinct value.
sample = build_sample([0] * 4 + [1] * 5 + [2])
table = breakpoints(sample)
for tau, value in table.rows():
    print(f"tau* = {tau:.6f}   expectile = {value:g}")

# %%
# The closed-form curve
# ---------------------
# ``expectile_curve`` returns the coefficients of every rational piece.
# Calling it on a grid gives the same numbers as ``expectile``.
curve = expectile_curve(sample)
grid = np.linspace(0.001, 0.999, 999)
assert np.allclose(curve(grid), expectile(sample, grid))

# %%
# Population counterpart
# ----------------------
# Because the sample frequencies equal the probabilities (0.4, 0.5, 0.1),
# the population curve coincides with the sample curve.
law = DiscreteDistribution([0, 1, 2], [0.4, 0.5, 0.1])

fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(grid, curve(grid), label="sample curve")
ax.plot(grid, law.expectile(grid), "--", label="population curve")
ax.plot(table.taus, table.anchor_values, "o", label="breakpoints")
ax.set_xlabel("tau")
ax.set_ylabel("expectile")
ax.legend()
fig.tight_layout()
plt.show()
