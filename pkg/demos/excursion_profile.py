"""Geodesic excursions into the cusp, measured and predicted.

Flowing the frame over slope z and reducing into the fundamental
domain gives a height profile whose peaks happen exactly at the
continued-fraction return times t_k, with closed-form heights
1/(2 q_k^2 |z - p_k/q_k|).  A rational slope has finitely many returns
and then rides straight into the cusp at rate e^t / q^2.
"""

import math
import os
from fractions import Fraction

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from lattice_orbits.diophantine import (
    NAMED_SLOPES,
    cf_expand,
    convergent_peak,
    excursion_height,
    excursion_profile,
    slope_vector,
)

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "out")
os.makedirs(OUT, exist_ok=True)

golden = NAMED_SLOPES["golden"]
times, heights = excursion_profile(float(golden), 0.0, 8.0)
print(f"golden slope, t in [0, 8]: {len(times)} samples, peak "
      f"{max(heights):.4f}")

# every local peak should sit on a convergent
exp = cf_expand(golden, 20)
print(f"{'k':>3s} {'t_k':>8s} {'predicted peak':>15s} "
      f"{'measured':>10s}")
for k in range(1, 8):
    t_k, peak = convergent_peak(exp, k)
    measured = excursion_height(slope_vector(golden), t_k - 0.3,
                                t_k + 0.3)
    print(f"{k:3d} {t_k:8.3f} {peak:15.6f} {measured:10.6f}")

# rational comparison: one return, then monotone escape
half = Fraction(1, 2)
times_r, heights_r = excursion_profile(float(half), 0.0, 8.0)
print(f"\nz = 1/2: height at t=8 is {heights_r[-1]:.2f} vs "
      f"e^8/4 = {math.exp(8.0) / 4:.2f}")

fig, ax = plt.subplots(figsize=(7.0, 4.0))
ax.plot(times, heights, "-", color="k", linewidth=0.9,
        label="z = golden")
ax.plot(times_r, heights_r, "-", color="tab:red", linewidth=0.9,
        label="z = 1/2")
for k in range(1, 8):
    t_k, peak = convergent_peak(exp, k)
    ax.plot([t_k], [peak], "o", color="tab:blue", markersize=4)
ax.set_yscale("log")
ax.set_xlabel("flow time t")
ax.set_ylabel("reduced height")
ax.legend()
fig.tight_layout()
path = os.path.join(OUT, "excursion_profiles.png")
fig.savefig(path, dpi=150)
print("wrote", path)
