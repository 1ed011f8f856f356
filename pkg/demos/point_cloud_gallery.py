"""Gallery of lattice orbit clouds at constant T * window.

An orbit { gamma u : ||gamma|| <= T } restricted to a view window
[-w, w]^2 holds roughly T * w points, so shrinking the window while
growing the ball keeps the pictures comparable.  The gallery renders
three irrational slopes through three such zoom levels with the
operator norm, plus one cocompact cloud for contrast: the modular
clouds organize along horocycle strands while the quaternion cloud
spreads more evenly at every zoom.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from lattice_orbits.diophantine import NAMED_SLOPES
from lattice_orbits.experiments import cloud_points
from lattice_orbits.lattice import LatticeKind, LatticeSpec
from lattice_orbits.linalg import MatrixNorm

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "out")
os.makedirs(OUT, exist_ok=True)

SLOPES = [
    ("sqrt2 - 1", float(NAMED_SLOPES["sqrt2m1"])),
    ("sqrt3 - 1", float(NAMED_SLOPES["sqrt3m1"])),
    ("1/e", float(NAMED_SLOPES["inve"])),
]
ZOOMS = [(100.0, 0.25), (25.0, 1.0), (9.0, 3.0)]

spec = LatticeSpec(LatticeKind.SL2Z, MatrixNorm.OPERATOR_2)
fig, axes = plt.subplots(len(SLOPES), len(ZOOMS), figsize=(10.5, 10.5))
for row, (label, z) in enumerate(SLOPES):
    for col, (T, w) in enumerate(ZOOMS):
        _, pts = cloud_points(spec, (1.0, z), T, w)
        ax = axes[row][col]
        ax.plot(pts[:, 0], pts[:, 1], ".", markersize=2.0, color="k")
        ax.set_xlim(-w, w)
        ax.set_ylim(-w, w)
        ax.set_aspect("equal")
        ax.set_title(f"u = (1, {label}), T={T:g}, w={w:g}, "
                     f"{pts.shape[0]} pts", fontsize=9)
        print(f"sl2z  slope {label:10s} T={T:6.1f} w={w:5.2f} "
              f"-> {pts.shape[0]:5d} points")
fig.tight_layout()
path = os.path.join(OUT, "cloud_gallery_sl2z.png")
fig.savefig(path, dpi=150)
print("wrote", path)

# the cocompact comparison: no strands, no cusp directions
spec_q = LatticeSpec(LatticeKind.QUATERNION, MatrixNorm.OPERATOR_2)
_, pts = cloud_points(spec_q, (1.0, 0.0), 100.0, 3.0)
print(f"quaternion23 u=(1,0) T=100 w=3 -> {pts.shape[0]} points")
fig, ax = plt.subplots(figsize=(5.0, 5.0))
ax.plot(pts[:, 0], pts[:, 1], ".", markersize=2.0, color="k")
ax.set_xlim(-3, 3)
ax.set_ylim(-3, 3)
ax.set_aspect("equal")
ax.set_title(f"quaternion order, T=100, w=3, {pts.shape[0]} pts",
             fontsize=9)
fig.tight_layout()
path = os.path.join(OUT, "cloud_quaternion.png")
fig.savefig(path, dpi=150)
print("wrote", path)

# raw coordinates for anyone who wants to replot
np.savetxt(os.path.join(OUT, "cloud_quaternion.csv"), pts,
           delimiter=",", header="x,y", comments="")
print("wrote", os.path.join(OUT, "cloud_quaternion.csv"))
