"""Estimate the path response matrix with condition-number-optimized pairs.

After the angles are known, K extra pilots at chosen (t, r) pairs make the
stacked linear system in vec(PRM) well posed.  Picking the pairs to minimize
its condition number beats random picks.

Run:  python3 docs/examples/04_prm_estimation.py
"""

import numpy as np

from strcs import (
    assemble,
    baseline_positions,
    estimate_aoas,
    estimate_aods,
    estimate_prm,
    make_trajectory,
    min_condition_positions,
    random_scenario,
)
from strcs.evaluation import build_grid, nmse
from strcs.measurement import measure_pairs, run_strcs_measurements
from strcs.prm import FriEstimate, min_rank_k, positions_csv

rng = np.random.default_rng(3)
sc = random_scenario(3, 3, 1.0, rng)
traj = make_trajectory("upa", 256, 4.0)
power = 100.0  # 20 dB
meas = run_strcs_measurements(sc, traj, traj, power, 1.0, rng)
aods = estimate_aods(meas, 200, 4).angles
aoas = estimate_aoas(meas, 200, 4).angles
print("smallest admissible K for 4x4 unknowns:", min_rank_k(4, 4))

k = 10
grid = build_grid(4.0, 0.2)
choices = {
    "proposed": min_condition_positions(aods, aoas, meas, k, 4.0, rng),
    "rps": baseline_positions("rps", aods, aoas, meas, k, 4.0, rng),
    "rp": baseline_positions("rp", aods, aoas, meas, k, 4.0, rng),
}
for name, add in choices.items():
    y_add = measure_pairs(sc, add.t_pairs, add.r_pairs, power, 1.0, rng)
    system = assemble(meas.with_additional(add.t_pairs, add.r_pairs, y_add), aods, aoas)
    prm_hat = estimate_prm(system, 4, 4)
    err = nmse(sc, FriEstimate(aods, aoas, prm_hat), grid)
    print(f"{name:>8}: kappa {add.kappa:10.1f}  NMSE {err:.4f}")

print(positions_csv(choices["proposed"]))
