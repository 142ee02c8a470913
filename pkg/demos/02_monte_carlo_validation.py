"""Validate the closed forms against the time-space Poisson simulator.

Desk-scale version of the validation experiments: sample moments against
the harvested-energy formulas, the simulated energy outage against the
Gamma approximation, and joint vs thinned information outage against the
closed form.
"""

from bwpc import montecarlo as mc
from bwpc.analytic import (
    energy_outage,
    info_outage,
    mean_harvested_energy,
    variance_harvested_energy,
)
from bwpc.model import LinkTargets, NetworkParams, SlotConfig, derive

params = NetworkParams()
slot = SlotConfig()
TRIALS = 4000  # raise to 10^5 for the acceptance-grade comparison

mean_r, var_r = mc.estimate_energy_moments(params, slot, trials=TRIALS, seed=1)
print(f"mean E_H: sim {mean_r.estimate:.3f} +-{mean_r.half_width_99:.3f} uJ "
      f"vs formula {mean_harvested_energy(params, slot):.3f} uJ")
print(f"var  E_H: sim {var_r.estimate:.1f} +-{var_r.half_width_99:.1f} uJ^2 "
      f"vs formula {variance_harvested_energy(params, slot):.1f} uJ^2")
print()

print("energy outage (sim vs Gamma approximation):")
ecs = [2.0, 6.0, 10.0, 14.0]
for ec, res in zip(ecs, mc.energy_outage_sweep(params, slot, ecs, trials=TRIALS, seed=2)):
    print(f"  E_C={ec:5.1f} uJ: sim {res.estimate:.4f} +-{res.half_width_99:.4f} "
          f"approx {energy_outage(params, slot, ec):.4f}")
print()

targets = LinkTargets()  # gamma_R = 5 dB, E_C = 6 uJ
p_eo = energy_outage(params, slot, targets.E_C)
thm = info_outage(derive(params, slot, targets, p_eo), slot, params.M)
thinned = mc.estimate_info_outage(params, slot, targets, trials=800, seed=3, mode="thinned")
joint = mc.estimate_info_outage(params, slot, targets, trials=300, seed=3, mode="joint")
print("information outage at the reference point:")
print(f"  closed form      {thm:.4f}")
print(f"  thinned  sim     {thinned.estimate:.4f} +-{thinned.half_width_99:.4f}")
print(f"  joint    sim     {joint.estimate:.4f} +-{joint.half_width_99:.4f} "
      f"(conditioned on {joint.n_used}/{joint.trials} energized trials)")
print()

sens = mc.truncation_sensitivity(params, slot, targets, trials=1000, seed=4)
print("window truncation check (paired doubling of each radius):")
for r in sens:
    print(f"  {r.quantity}: default {r.estimate_default:.4f}, doubled {r.estimate_doubled:.4f}, "
          f"delta {r.delta:+.4f} +-{r.delta_half_width_99:.4f}")
