"""
Heavy tails and the stable limit
================================

When the data have infinite variance the sample expectile no longer
converges at rate ``sqrt(n)``. For Student t data with ``1 < alpha < 2``
the error, scaled by ``n ** (1 - 1/alpha)``, approaches a skewed
alpha-stable law whose skewness depends on the level ``tau``.

We simulate t data with ``alpha = 1.5`` at level 0.8 for three sample
sizes and compare the empirical CDF of the scaled errors with the
limiting stable CDF.
"""

import matplotlib.pyplot as plt
import numpy as np

from expectiles import StudentT, limit_law
from expectiles.simulation import ExperimentConfig, run_stable_experiment

# %%
# Limit parameters
# ----------------
# ``limit_law`` picks the right limit for the model. Here it is stable,
# with a skewness parameter that grows as ``tau`` moves away from 1/2.
model = StudentT(1.5)
lim = limit_law(model, 0.8)
print(f"beta = {lim.beta_tilde:.4f}, scale constant = {lim.c_tilde:.4f}")

# %%
# Simulation
# ----------
# Two thousand replications per size keep the run short. Every
# replication has its own random stream, so the numbers do not depend on
# how many threads are used.
cfg = ExperimentConfig(model, 0.8, (20, 200, 2000), reps=2000, seed=7)
report = run_stable_experiment(cfg)
for res in report.results:
    print(f"n = {res.n:5d}   KS distance = {res.ks:.4f}")

# %%
# Empirical CDFs against the limit
# --------------------------------
x = np.linspace(-6, 6, 601)
fig, ax = plt.subplots(figsize=(6, 4))
for res in report.results:
    z = np.sort(res.standardized)
    ax.step(z, np.arange(1, z.size + 1) / z.size, where="post", label=f"n = {res.n}")
ax.plot(x, lim.cdf(x), "k--", label="stable limit")
ax.set_xlim(x[0], x[-1])
ax.set_xlabel("scaled error")
ax.set_ylabel("CDF")
ax.legend()
fig.tight_layout()
plt.show()
