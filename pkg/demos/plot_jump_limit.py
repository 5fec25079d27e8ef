"""
A non-normal limit at an atom
=============================

For a discrete law the expectile curve can sit exactly on an atom. At
such a level the left and right slopes of the estimating equation differ,
and ``sqrt(n)`` times the error converges to a two-piece normal: one
scale for positive values, another for negative ones.

The three-point law on {0, 1, 2} with probabilities (0.4, 0.5, 0.1) has
its 0.8-expectile at the atom 1, while at level 0.7 the expectile lies
strictly between atoms and the usual normal limit applies.
"""

import matplotlib.pyplot as plt
import numpy as np

from expectiles import DiscreteDistribution, mixture_limit
from expectiles.simulation import ExperimentConfig, run_jump_experiment

law = DiscreteDistribution([0, 1, 2], [0.4, 0.5, 0.1])

# %%
# The two scales
# --------------
mix = mixture_limit(law, 0.8)
print(f"expectile = {mix.mu:g}, right scale = {mix.sigma1:.4f}, left scale = {mix.sigma2:.4f}")

# %%
# Simulated densities
# -------------------
# The report carries a kernel density estimate of the standardized
# errors. At level 0.8 we also compare with the two pure normal laws
# that use only one of the scales.
fig, axes = plt.subplots(1, 2, figsize=(9, 3.5), sharey=True)
for ax, tau in zip(axes, (0.7, 0.8)):
    cfg = ExperimentConfig(law, tau, (500,), reps=5000, seed=7)
    res = run_jump_experiment(cfg).result(500)
    print(f"tau = {tau}: KS to the {res.reference} limit = {res.ks:.4f}")
    for name, ks in res.ks_alternatives.items():
        print(f"    KS to {name.replace('_', ' ')} = {ks:.4f}")
    ax.plot(res.density["x"], res.density["y"], label="simulated")
    x = np.asarray(res.density["x"])
    lim = mixture_limit(law, tau)
    ax.plot(x, lim.pdf(x), "k--", label="limit")
    if lim.has_atom:
        for s, style in ((lim.sigma1, ":"), (lim.sigma2, "-.")):
            sd = s * lim.sd_w
            ax.plot(x, np.exp(-0.5 * (x / sd) ** 2) / (sd * np.sqrt(2 * np.pi)), style,
                    label=f"normal, sd {sd:.2f}")
    ax.set_title(f"tau = {tau}")
    ax.set_xlabel("sqrt(n) * error")
    ax.legend(fontsize=8)
fig.tight_layout()
plt.show()
