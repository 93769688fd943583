"""Recover AoDs and AoAs with orthogonal matching pursuit.

The transmit antenna sweeps a UPA trajectory while the receiver stays put,
then the roles swap.  Each sweep is a sparse measurement of the angles on
one side of the link.

Run:  python3 docs/examples/03_angle_recovery.py
"""

import numpy as np

from strcs import AngleGrid, estimate_aoas, estimate_aods, make_trajectory, random_scenario
from strcs.measurement import run_strcs_measurements

rng = np.random.default_rng(7)
sc = random_scenario(3, 3, 1.0, rng)
traj = make_trajectory("upa", 256, 4.0)
power = 10 ** (20 / 10)  # 20 dB SNR with unit noise variance
meas = run_strcs_measurements(sc, traj, traj, power, 1.0, rng)
print(f"{meas.pilot_count} pilots so far (the shared pair is counted once)")

grid = AngleGrid(200)
aod = estimate_aods(meas, grid, 4)  # one more path than the truth
aoa = estimate_aoas(meas, grid, 4)


def report(name, truth, est):
    print(f"{name}: true / nearest estimate / |coefficient|")
    for row in truth:
        j = np.argmin(np.linalg.norm(est.angles - row, axis=1))
        print(f"  {row.round(3)}  {est.angles[j].round(3)}  {abs(est.coefficients[j]):.2f}")
    print(f"  residual norm history: {np.round(est.residual_history, 2)}")


report("AoD", sc.t_angles, aod)
report("AoA", sc.r_angles, aoa)
