"""The four measurement trajectories and their CSV form.

Run:  python3 docs/examples/02_trajectories.py
"""

import numpy as np

from strcs import make_trajectory
from strcs.measurement import trajectory_csv

side = 4.0  # region side A, in wavelengths

for shape in ("square", "cross", "upa", "circle"):
    traj = make_trajectory(shape, 256, side)
    pos = traj.positions
    step = np.linalg.norm(np.diff(pos, axis=0), axis=1)
    print(
        f"{shape:>6}: {len(traj)} points, x-span {np.ptp(pos[:, 0]):.2f}, "
        f"y-span {np.ptp(pos[:, 1]):.2f}, median step {np.median(step):.4f}"
    )

# The UPA lattice is the only shape that covers the region in both
# dimensions, which is what the angle dictionary needs for resolution.
upa = make_trajectory("upa", 16, side)
print(trajectory_csv(upa))

# Counts must suit the shape.
try:
    make_trajectory("upa", 15, side)
except ValueError as exc:
    print("rejected:", exc)
