"""Antenna trajectories and noisy pilot measurements."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .fields import Scenario, channel_matrix, complex_normal

__all__ = [
    "SHAPES",
    "Trajectory",
    "make_trajectory",
    "trajectory_csv",
    "MeasurementRecord",
    "measure",
    "measure_pairs",
    "StrcsMeasurements",
    "run_strcs_measurements",
]

SHAPES = ("square", "cross", "upa", "circle")


@dataclass(frozen=True)
class Trajectory:
    """Ordered antenna positions inside the square region ``[-A/2, A/2]^2``."""

    positions: NDArray[np.float64]
    region_side: float
    shape: str = "custom"

    def __post_init__(self) -> None:
        pos = np.array(self.positions, dtype=float).reshape(-1, 2)
        half = self.region_side / 2
        if np.any(np.abs(pos) > half * (1 + 1e-12)):
            raise ValueError("trajectory leaves the region")
        if self.shape == "upa" and math.isqrt(len(pos)) ** 2 != len(pos):
            raise ValueError("a upa trajectory needs a perfect-square point count")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    def __len__(self) -> int:
        return len(self.positions)

    @property
    def first(self) -> NDArray[np.float64]:
        return self.positions[0]

    @property
    def last(self) -> NDArray[np.float64]:
        return self.positions[-1]


def _square(count: int, side: float) -> NDArray[np.float64]:
    # counter-clockwise perimeter walk from the lower-left corner
    h = side / 2
    s = np.arange(count) * (4 * side / count)
    edge, frac = np.divmod(s, side)
    edge = edge.astype(int)
    x = np.select(
        [edge == 0, edge == 1, edge == 2], [-h + frac, h, h - frac], default=-h
    )
    y = np.select(
        [edge == 0, edge == 1, edge == 2], [-h, -h + frac, h], default=h - frac
    )
    return np.column_stack([x, y])


def _cross(count: int, side: float) -> NDArray[np.float64]:
    h = side / 2
    nx = -(-count // 2)
    ny = count - nx
    xs = np.linspace(-h, h, nx)
    if nx % 2 == 1 and ny % 2 == 1:
        # both segments would hit the origin; it stays on the x-segment
        ys = np.delete(np.linspace(-h, h, ny + 1), ny // 2)
    else:
        ys = np.linspace(-h, h, ny)
    return np.vstack(
        [np.column_stack([xs, np.zeros(nx)]), np.column_stack([np.zeros(ny), ys])]
    )


def _upa(count: int, side: float) -> NDArray[np.float64]:
    n = math.isqrt(count)
    if n * n != count:
        raise ValueError(f"upa needs a perfect-square count, got {count}")
    axis = np.linspace(-side / 2, side / 2, n)
    xx, yy = np.meshgrid(axis, axis)
    return np.column_stack([xx.ravel(), yy.ravel()])


def _circle(count: int, side: float) -> NDArray[np.float64]:
    ang = 2 * np.pi * np.arange(count) / count
    pts = (side / 2) * np.column_stack([np.cos(ang), np.sin(ang)])
    # snap cos/sin round-off so points never leave the region
    pts[np.abs(pts) < 1e-15] = 0.0
    return np.clip(pts, -side / 2, side / 2)


_BUILDERS = {"square": _square, "cross": _cross, "upa": _upa, "circle": _circle}


def make_trajectory(shape: str, count: int, side: float) -> Trajectory:
    """Build one of the standard measurement trajectories.

    Parameters
    ----------
    shape : {"square", "cross", "upa", "circle"}
        ``square`` walks the region boundary with spacing ``4A/count``;
        ``cross`` places two perpendicular segments through the origin;
        ``upa`` is a ``sqrt(count)`` by ``sqrt(count)`` lattice spanning the
        region; ``circle`` is the inscribed circle sampled uniformly by angle.
    count : int
        Number of positions, at least 4.
    side : float
        Region side length ``A`` in wavelengths.
    """
    if shape not in _BUILDERS:
        raise ValueError(f"unknown trajectory shape {shape!r}")
    if count < 4:
        raise ValueError("a trajectory needs at least 4 positions")
    if not side > 0:
        raise ValueError("region side must be positive")
    return Trajectory(_BUILDERS[shape](count, side), side, shape)


def trajectory_csv(traj: Trajectory) -> str:
    out = io.StringIO()
    out.write("index,x,y\n")
    for i, (x, y) in enumerate(traj.positions):
        out.write(f"{i},{float(x)!r},{float(y)!r}\n")
    return out.getvalue()


@dataclass(frozen=True)
class MeasurementRecord:
    t_pos: tuple[float, float]
    r_pos: tuple[float, float]
    value: complex
    power: float
    noise_var: float


def _check_power(power: float, noise_var: float) -> None:
    if not power > 0:
        raise ValueError("transmit power must be positive")
    if noise_var < 0:
        raise ValueError("noise variance must be nonnegative")


def measure_pairs(
    scenario: Scenario,
    t_positions: ArrayLike,
    r_positions: ArrayLike,
    power: float,
    noise_var: float,
    rng: np.random.Generator,
) -> NDArray[np.complex128]:
    """Received pilots for paired positions ``(t_positions[k], r_positions[k])``."""
    _check_power(power, noise_var)
    t = np.atleast_2d(np.asarray(t_positions, dtype=float))
    r = np.atleast_2d(np.asarray(r_positions, dtype=float))
    if t.shape != r.shape:
        raise ValueError("transmit and receive position lists differ in length")
    g = np.exp(2j * np.pi * (scenario.t_angles @ t.T))
    f = np.exp(2j * np.pi * (scenario.r_angles @ r.T))
    h = np.einsum("qk,qp,pk->k", f.conj(), scenario.prm, g)
    noise = complex_normal(rng, noise_var, len(h)) if noise_var > 0 else 0.0
    return np.sqrt(power) * h + noise


def measure(
    scenario: Scenario,
    t: ArrayLike,
    r: ArrayLike,
    power: float,
    noise_var: float,
    rng: np.random.Generator,
) -> MeasurementRecord:
    """One pilot ``sqrt(P) h(t, r) + z`` with ``z ~ CN(0, noise_var)``."""
    value = measure_pairs(scenario, [t], [r], power, noise_var, rng)[0]
    return MeasurementRecord(
        tuple(map(float, t)), tuple(map(float, r)), complex(value), power, noise_var
    )


@dataclass(frozen=True)
class StrcsMeasurements:
    """Pilots collected by the three successive measurement steps.

    ``y_t[m]`` is taken at ``(t_traj[m], r_traj[0])`` and ``y_r[n]`` at
    ``(t_traj[-1], r_traj[n])``; the pair ``(t_traj[-1], r_traj[0])`` is
    measured once and shared, so ``y_r[0] == y_t[-1]``.  ``y_add`` holds the
    additional paired measurements at ``t_add``/``r_add``.
    """

    y_t: NDArray[np.complex128]
    y_r: NDArray[np.complex128]
    t_traj: Trajectory
    r_traj: Trajectory
    power: float
    noise_var: float
    y_add: NDArray[np.complex128] = field(
        default_factory=lambda: np.zeros(0, dtype=complex)
    )
    t_add: NDArray[np.float64] = field(default_factory=lambda: np.zeros((0, 2)))
    r_add: NDArray[np.float64] = field(default_factory=lambda: np.zeros((0, 2)))

    @property
    def t_fixed(self) -> NDArray[np.float64]:
        return self.t_traj.last

    @property
    def r_fixed(self) -> NDArray[np.float64]:
        return self.r_traj.first

    @property
    def pilot_count(self) -> int:
        return len(self.y_t) + len(self.y_r) - 1 + len(self.y_add)

    def with_additional(
        self, t_add: ArrayLike, r_add: ArrayLike, y_add: ArrayLike
    ) -> "StrcsMeasurements":
        t_add = np.asarray(t_add, dtype=float).reshape(-1, 2)
        r_add = np.asarray(r_add, dtype=float).reshape(-1, 2)
        y_add = np.asarray(y_add, dtype=complex).ravel()
        if not len(t_add) == len(r_add) == len(y_add):
            raise ValueError("additional positions and values differ in length")
        return replace(self, t_add=t_add, r_add=r_add, y_add=y_add)


def run_strcs_measurements(
    scenario: Scenario,
    t_traj: Trajectory,
    r_traj: Trajectory,
    power: float,
    noise_var: float,
    rng: np.random.Generator,
) -> StrcsMeasurements:
    """Simulate the transmit-sweep and receive-sweep pilot phases.

    Step one moves the transmit antenna over ``t_traj`` while the receiver sits
    at ``r_traj[0]``; step two parks the transmitter at ``t_traj[-1]`` and
    moves the receiver over the remaining ``r_traj`` points.  Exactly
    ``M + N - 1`` fresh pilots are drawn.
    """
    _check_power(power, noise_var)
    if len(t_traj) < 1 or len(r_traj) < 1:
        raise ValueError("both trajectories need at least one position")
    t_pos, r_pos = t_traj.positions, r_traj.positions
    h_t = channel_matrix(
        scenario.t_angles, scenario.r_angles, scenario.prm, t_pos, r_pos[:1]
    )[0]
    h_r = channel_matrix(
        scenario.t_angles, scenario.r_angles, scenario.prm, t_pos[-1:], r_pos[1:]
    )[:, 0]
    amp = np.sqrt(power)
    if noise_var > 0:
        z = complex_normal(rng, noise_var, len(h_t) + len(h_r))
    else:
        z = np.zeros(len(h_t) + len(h_r), dtype=complex)
    y_t = amp * h_t + z[: len(h_t)]
    y_r = np.concatenate([y_t[-1:], amp * h_r + z[len(h_t):]])
    return StrcsMeasurements(y_t, y_r, t_traj, r_traj, power, noise_var)
