"""Information carried by a single N-photon detection record.

Conditioning on one total photon number N gives a highly entangled state
whose per-shot information grows like N^2, but the record only occurs with
probability G_N, and the weighted product G_N * F_N is what an experiment
actually collects.  For 8 input photons the best single record is N = 10
with three quarters of the light in the coherent port, and across the mean
photon number the best single record scales barely faster than linearly:
postselection alone cannot beat the classical limit.

Writes demos/out/component_objective.png and component_scaling.png.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from mzfisher.fisher import qfi_per_n_operator_oracle
from mzfisher.optimize import component_scan, fit_power_law, optimize_single_component
from mzfisher.states import LightSource, build_amplitude_table, generation_probability, postselect

OUT = Path(__file__).resolve().parent / "out"
OUT.mkdir(exist_ok=True)

N_BAR = 8.0
N_MAX = 28

# objective landscape over (N, alpha^2)
alphas = np.linspace(0.0, N_BAR, 81)
landscape = np.zeros((N_MAX + 1, alphas.size))
for j, a2 in enumerate(alphas):
    amps = build_amplitude_table(LightSource.from_mean_photons(N_BAR, float(a2)), cutoff=N_MAX)
    for n in range(N_MAX + 1):
        g = generation_probability(amps, n)
        if g > 0.0:
            landscape[n, j] = g * qfi_per_n_operator_oracle(postselect(amps, n))

opt = optimize_single_component(N_BAR)
print(f"n_bar = {N_BAR}: best record N = {opt.n_opt} at alpha^2/n_bar = {opt.alpha2_opt / N_BAR:.2f}, "
      f"objective {opt.value:.4f}")

fig, axes = plt.subplots(1, 3, figsize=(12, 3.6))
im = axes[0].pcolormesh(alphas / N_BAR, np.arange(N_MAX + 1), landscape, shading="nearest")
axes[0].set_xlabel(r"$\alpha^2/\bar n$")
axes[0].set_ylabel("record size $N$")
fig.colorbar(im, ax=axes[0], label=r"$G_N F_N$")
axes[1].plot(np.arange(N_MAX + 1), landscape[:, np.argmin(np.abs(alphas - opt.alpha2_opt))], "o-")
axes[1].set_xlabel("record size $N$")
axes[1].set_ylabel(r"$G_N F_N$ at the best $\alpha^2$")
axes[2].plot(alphas / N_BAR, landscape[opt.n_opt], "o-")
axes[2].set_xlabel(r"$\alpha^2/\bar n$")
axes[2].set_ylabel(rf"$G_N F_N$ at $N = {opt.n_opt}$")
fig.tight_layout()
fig.savefig(OUT / "component_objective.png", dpi=160)
print("wrote", OUT / "component_objective.png")

# scaling of the best record with the mean photon number
n_values = [float(v) for v in np.geomspace(1.0, 60.0, 16)]
rows = component_scan(n_values)
fit = fit_power_law([(r.n_bar, r.value) for r in rows])
print(f"best-record scaling: {fit.prefactor:.3f} * n^{fit.exponent:.3f} (log-RMS {fit.residual:.3f})")

fig, ax = plt.subplots(figsize=(5, 4))
ns = np.array([r.n_bar for r in rows])
ax.loglog(ns, [r.value for r in rows], "ko", label="best single record")
ax.loglog(ns, fit.prefactor * ns**fit.exponent, "r-", label=rf"${fit.prefactor:.2f}\,\bar n^{{{fit.exponent:.2f}}}$")
ax.loglog(ns, ns, "k--", label=r"classical limit $F = \bar n$")
ax.set_xlabel(r"$\bar n$")
ax.set_ylabel(r"$\max_{N,\alpha^2} G_N F_N$")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "component_scaling.png", dpi=160)
print("wrote", OUT / "component_scaling.png")
