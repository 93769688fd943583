"""Field-response channel model: one random scenario, seen across the region.

Run:  python3 docs/examples/01_field_response.py
"""

import numpy as np

from strcs import channel, channel_matrix, random_scenario, t_frv, to_virtual

rng = np.random.default_rng(0)

# Physical elevation/azimuth map to virtual angles (direction cosines).
# A path arriving broadside (elevation pi/2, azimuth pi/2) has theta = phi = 0.
print("broadside ->", to_virtual(np.pi / 2, np.pi / 2))
print("endfire   ->", to_virtual(np.pi / 2, 0.0))

# Three transmit paths, three receive paths, eta = 1 (diagonal and
# off-diagonal PRM entries carry equal total power).
sc = random_scenario(3, 3, 1.0, rng)
print("AoDs (theta, phi):\n", sc.t_angles.round(3))
print("AoAs (theta, phi):\n", sc.r_angles.round(3))
print("|PRM|^2:\n", (np.abs(sc.prm) ** 2).round(3))

# Field response vectors have unit-modulus entries at every position.
g = t_frv(sc, [0.7, -1.3])
print("|g(t)| =", np.abs(g))

# Channel between the region centers is just the sum of PRM entries.
print("h(0, 0) =", channel(sc, [0, 0], [0, 0]), " sum(prm) =", sc.prm.sum())

# The same scenario over a 9x9 lattice of transmit positions with the
# receiver parked at the center: the channel varies smoothly in space.
axis = np.linspace(-2, 2, 9)
xx, yy = np.meshgrid(axis, axis)
t_pos = np.column_stack([xx.ravel(), yy.ravel()])
h = channel_matrix(sc.t_angles, sc.r_angles, sc.prm, t_pos, [[0, 0]])[0]
print("channel gain |h| over the transmit region (dB):")
print((20 * np.log10(np.abs(h).reshape(9, 9))).round(1))
