"""Total information versus detector resolution threshold.

Counting every event up to the threshold recovers quadratic (Heisenberg)
scaling even when the threshold only matches the mean photon number: the
optimal split stays close to half coherent / half squeezed and the optimal
total approaches 0.199 * n^2 from above.  The erfc closed form predicts the
optimal split without any Fock-space sum.

Writes demos/out/threshold_curves.png and threshold_scaling.png.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from mzfisher.fisher import asymptotic_constant, total_fisher_approx, total_fisher_ideal
from mzfisher.optimize import optimize_alpha, scaling_scan
from mzfisher.states import LightSource

OUT = Path(__file__).resolve().parent / "out"
OUT.mkdir(exist_ok=True)

N_BAR = 10.0

fig, ax = plt.subplots(figsize=(6, 4.2))
markers = {10: "D", 20: "s", 50: "o"}
for n_res, marker in markers.items():
    scan = optimize_alpha(N_BAR, n_res, engine="exact", grid_step=0.02, refine=False)
    grid = np.array(scan.grid)
    ax.plot(grid[:, 0] / N_BAR, grid[:, 1], marker, ms=4, label=rf"double sum, $N_{{\rm res}} = {n_res}$")
    valid = grid[:, 0] < N_BAR
    approx = [total_fisher_approx(LightSource.from_mean_photons(N_BAR, a2), n_res) for a2 in grid[valid, 0]]
    ax.plot(grid[valid, 0] / N_BAR, approx, "-", lw=1)
    print(f"N_res = {n_res}: optimum {scan.max_value:.3f} at alpha^2/n_bar = {scan.argmax / N_BAR:.3f}")
ideal = [total_fisher_ideal(LightSource.from_mean_photons(N_BAR, a2)) for a2 in np.linspace(0, N_BAR, 101)]
ax.plot(np.linspace(0, 1, 101), ideal, "k-.", label="unlimited resolution")
ax.set_xlabel(r"$\alpha^2/\bar n$")
ax.set_ylabel(r"total Fisher information $F$")
ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig(OUT / "threshold_curves.png", dpi=160)
print("wrote", OUT / "threshold_curves.png")

# optimal split and optimal total against the mean photon number
n_values = [float(n) for n in range(1, 41)]
fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
for factor, marker in ((1.0, "D"), (2.0, "s"), (5.0, "o")):
    rows = scaling_scan(n_values, factor, engine="exact", grid_step=0.02)
    ns = np.array([r.n_bar for r in rows])
    ax1.plot(ns, [r.alpha2_opt / r.n_bar for r in rows], marker, ms=4, label=rf"$N_{{\rm res}} = {factor:g}\,\bar n$")
    ax2.loglog(ns, [r.fq_opt for r in rows], marker, ms=4)
rows_inf = scaling_scan(n_values, None, engine="exact", grid_step=0.02)
ax2.loglog(n_values, [r.fq_opt for r in rows_inf], "k-.", label="unlimited")
const = asymptotic_constant().constant
ax2.loglog(n_values, const * np.array(n_values) ** 2, "r--", label=rf"${const:.3f}\,\bar n^2$")
ax2.loglog(n_values, n_values, "k:", label=r"classical $F = \bar n$")
ax1.set_xlabel(r"$\bar n$")
ax1.set_ylabel(r"$\alpha^2_{\rm opt}/\bar n$")
ax1.axhline(0.5, color="k", lw=0.5)
ax1.legend(fontsize=8)
ax2.set_xlabel(r"$\bar n$")
ax2.set_ylabel(r"$F_{\rm opt}$")
ax2.legend(fontsize=8)
fig.tight_layout()
fig.savefig(OUT / "threshold_scaling.png", dpi=160)
print("wrote", OUT / "threshold_scaling.png")

rows_eq = scaling_scan([50.0, 80.0, 100.0], 1.0, engine="exact")
for r in rows_eq:
    print(f"n_bar = {r.n_bar:.0f}, threshold = n_bar: F_opt/n_bar^2 = {r.fq_opt / r.n_bar**2:.4f}")
print(f"asymptotic constant: {const:.6f}")
