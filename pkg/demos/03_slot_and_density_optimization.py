"""Maximize spatial throughput over the slot split and the density.

Shows the quasi-concave throughput kernel and its peak load per antenna
count, the (T1, T2) tradeoff curve at a fixed optimum, how the curve
shrinks when the information-outage cap tightens, and the density sweep
with its feasibility window.
"""

import numpy as np

from bwpc.model import LinkTargets, NetworkParams, SlotConfig, db_to_linear
from bwpc.optimize import density_sweep, optimal_load, optimize_slot

print("peak interferer load of the throughput kernel x * poisson_cdf(x, M):")
for m in range(1, 6):
    print(f"  M={m}: x* = {optimal_load(m):.4f}  (always in (M/2, M])")
print()

params = NetworkParams()
base = LinkTargets(E_C=6.0, gamma_R=db_to_linear(5.0), eps_e=0.4, eps_i=0.5)
opt, pts = optimize_slot(params, base, grid_size=10)
print(f"slot-split optimum: load* {opt.load_star:.4f}, R_opt {opt.R_opt:.5f} bits/(m^2*ms), "
      f"T2 range ({opt.T2_lo:.3f}, {opt.T2_hi:.3f}] ms")
print("tradeoff curve (every feasible point attains R_opt):")
for pt in pts:
    flag = "ok " if pt.feasible else "infeasible"
    print(f"  T2 {pt.T2:.3f} ms -> T1 {pt.T1:.3f} ms  [{flag}]")
print()

print("tightening the information-outage cap shrinks the curve:")
for eps_i in (0.5, 0.3, 0.2):
    o, _ = optimize_slot(params, LinkTargets(E_C=6.0, gamma_R=base.gamma_R, eps_e=0.4, eps_i=eps_i), grid_size=4)
    print(f"  eps_i={eps_i}: load* {o.load_star:.4f}, T2 range length {o.T2_hi - o.T2_lo:.4f} ms, "
          f"R_opt {o.R_opt:.5f}")
print()

slot = SlotConfig()
t = LinkTargets(E_C=6.0, gamma_R=db_to_linear(5.0), eps_e=0.35, eps_i=0.35)
print("density sweep at M=3 (feasible window and interior optimum):")
pts = density_sweep(params, slot, t, np.geomspace(0.002, 0.3, 40))
best = max(pts, key=lambda x: x.R if x.feasible else -1.0)
for pt in pts[::4]:
    mark = "*" if pt is best else (" " if pt.feasible else "x")
    print(f"  lam {pt.lam:.4f}: R {pt.R:.5f}  P_eo {pt.P_eo:.3f}  P_io {pt.P_io:.3f}  {mark}")
print(f"best feasible density: lam = {best.lam:.4f}, R = {best.R:.5f} bits/(m^2*ms)")
