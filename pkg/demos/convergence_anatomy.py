"""Anatomy of one orbit-sum convergence run, start to finish.

The running quantity is S_f(T), the sum of f over the orbit points
gamma u with ||gamma|| <= T.  Its linear growth rate against T times
the density integral I recovers a constant 2/mu that depends only on
the lattice, never on f or u; everything below makes that concrete for
the modular group at the golden slope.
"""

import math
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from lattice_orbits import fastball
from lattice_orbits.density import AnnulusIndicator, RadialHat
from lattice_orbits.experiments import (
    constant_independence,
    convergence_study,
    run_is_admissible,
    scaling_sweep,
    xi_hat_for_run,
)
from lattice_orbits.lattice import LatticeKind, LatticeSpec
from lattice_orbits.linalg import MatrixNorm

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "out")
os.makedirs(OUT, exist_ok=True)

spec = LatticeSpec(LatticeKind.SL2Z, MatrixNorm.MAX_ENTRY)
u = (1.0, (math.sqrt(5.0) - 1.0) / 2.0)
grid = [125.0, 250.0, 500.0, 1000.0, 2000.0]

# one band scan serves every test function supported in [0.5, 2.5]
hits = fastball.orbit_hits(spec, grid[-1], u, 0.5, 2.5)
print(f"orbit scan: {hits[0].shape[0]} points in the band up to "
      f"T={grid[-1]:g}\n")

reports = []
for f in (AnnulusIndicator(1.0, 2.0), RadialHat(1.75, 0.75)):
    rep = convergence_study(spec, u, f, grid, tol=1e-7, hits=hits)
    reports.append(rep)
    print(f"f = {f.config()}")
    print(f"  I(f, u) = {rep.I:.6f}")
    print(f"  {'T':>7s} {'S(T)':>12s} {'S/(T I)':>10s} {'line err':>10s}")
    for row in rep.rows:
        print(f"  {row.T:7.0f} {row.S:12.2f} {row.ratio:10.5f} "
              f"{row.err:10.3f}")
    print(f"  slope = {rep.slope:.6f}, mu_hat = 2/slope = "
          f"{rep.mu_hat:.4f}, error exponent ~ T^{rep.error_exponent:.2f}")
    print()

stats = constant_independence(reports)
print(f"mu_hat across functions: "
      f"{', '.join('%.4f' % m for m in stats['mu_values'])} "
      f"(spread {stats['mu_spread']:.4f})\n")

# diophantine sanity: is T large enough for this slope and support?
f = AnnulusIndicator(1.0, 2.0)
for T in (16.0, 1000.0):
    xi = xi_hat_for_run(f, T, u)
    print(f"T={T:6.0f}: window bound xi_hat = {xi:g}, admissible = "
          f"{run_is_admissible(f, T, u)}")
print()

# the same limit through shrinking (alpha > 0) or growing (alpha < 0)
# arguments; alpha = 0 is the plain orbit sum again
mu = reports[0].mu_hat
print(f"{'alpha':>6s} {'W(T_max)':>10s} {'normalized':>11s} "
      f"{'target I':>9s}")
for alpha in (-0.25, 0.0, 0.25, 0.5):
    srep = scaling_sweep(spec, u, f, grid, alpha, mu_hat=mu, tol=1e-7)
    last = srep.rows[-1]
    print(f"{alpha:6.2f} {last.W:10.4f} {last.normalized:11.4f} "
          f"{srep.I:9.4f}")

fig, ax = plt.subplots(figsize=(6.0, 4.0))
for rep, marker in zip(reports, ("o", "s")):
    xs = [row.T * rep.I for row in rep.rows]
    ys = [row.S for row in rep.rows]
    ax.plot(xs, ys, marker, label=rep.config["f"]["kind"])
    ax.plot(xs, [rep.slope * x for x in xs], "-", color="gray",
            linewidth=0.8)
ax.set_xlabel("T * I(f, u)")
ax.set_ylabel("S_f(T)")
ax.legend()
fig.tight_layout()
path = os.path.join(OUT, "convergence_lines.png")
fig.savefig(path, dpi=150)
print("\nwrote", path)
