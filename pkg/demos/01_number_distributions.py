"""Photon-number statistics of the two interferometer inputs.

A coherent beam carrying 10 photons on average is Poissonian; a squeezed
vacuum with 5 photons on average lives on even numbers only and is much
wider.  The factorial-free closed form of the squeezed distribution tracks
the exact weights closely once a few photon pairs are present.

Writes demos/out/number_distributions.png and the same table as CSV.
"""

import csv
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from mzfisher.states import LightSource, build_amplitude_table, squeezed_number_distribution

OUT = Path(__file__).resolve().parent / "out"
OUT.mkdir(exist_ok=True)

N_MAX = 30
src = LightSource.from_mean_photons(15.0, 10.0)  # alpha^2 = 10, sinh^2 xi = 5
amps = build_amplitude_table(src, cutoff=N_MAX)

n = np.arange(N_MAX + 1)
p_coherent = np.exp(2.0 * amps.coherent_log)
p_squeezed = np.exp(2.0 * amps.squeezed_log)
p_closed_form = squeezed_number_distribution(src.xi_mag, N_MAX, mode="stirling")

# moments from a tail-complete table (the plot itself stops at N_MAX)
full = build_amplitude_table(src)
nf = np.arange(full.cutoff + 1)
pc_full = np.exp(2.0 * full.coherent_log)
ps_full = np.exp(2.0 * full.squeezed_log)
print(f"coherent mean {np.sum(nf * pc_full):.4f}, variance "
      f"{np.sum(nf**2 * pc_full) - np.sum(nf * pc_full)**2:.4f} (Poissonian: both 10)")
mean_sq = np.sum(nf * ps_full)
var_sq = np.sum(nf**2 * ps_full) - mean_sq**2
print(f"squeezed mean {mean_sq:.4f}, variance {var_sq:.4f} (2 nb (nb+1) = {2 * 5 * 6}: much wider)")

even = n[2::2]
ratio = p_closed_form[2::2] / p_squeezed[2::2]
print("closed-form/exact ratio at n = 10, 20, 30:", ", ".join(f"{ratio[k]:.4f}" for k in (4, 9, 14)))

fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(n, p_coherent, "o", mfc="none", label=r"coherent, $\bar n_a = 10$")
ax.plot(even, p_squeezed[2::2], "ko", label=r"squeezed vacuum, $\bar n_b = 5$")
ax.plot(even, p_closed_form[2::2], "r--", label="factorial-free closed form")
ax.set_xlabel("photon number $n$")
ax.set_ylabel("probability")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "number_distributions.png", dpi=160)
print("wrote", OUT / "number_distributions.png")

with open(OUT / "number_distributions.csv", "w", newline="") as fh:
    writer = csv.writer(fh)
    writer.writerow(["n", "p_coherent", "p_squeezed_exact", "p_squeezed_stirling"])
    for i in range(N_MAX + 1):
        writer.writerow([i, f"{p_coherent[i]:.12g}", f"{p_squeezed[i]:.12g}", f"{p_closed_form[i]:.12g}"])
print("wrote", OUT / "number_distributions.csv")
