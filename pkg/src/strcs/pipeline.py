"""End-to-end successive transmitter-receiver estimation of one channel."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .angles import AngleGrid, SparseAngleEstimate, estimate_aoas, estimate_aods
from .fields import Scenario
from .measurement import StrcsMeasurements, Trajectory, measure_pairs, run_strcs_measurements
from .prm import (
    AdditionalPositions,
    FriEstimate,
    assemble,
    baseline_positions,
    estimate_prm,
    min_condition_positions,
)

__all__ = ["SCHEMES", "StrcsResult", "run_strcs"]

SCHEMES = ("proposed", "rp", "rps", "peam")


@dataclass(frozen=True)
class StrcsResult:
    estimate: FriEstimate
    measurements: StrcsMeasurements
    additional: AdditionalPositions
    aod_fit: SparseAngleEstimate
    aoa_fit: SparseAngleEstimate


def run_strcs(
    scenario: Scenario,
    t_traj: Trajectory,
    r_traj: Trajectory,
    power: float,
    noise_var: float,
    k: int,
    rng: np.random.Generator,
    grid: AngleGrid | int = 200,
    n_t_hat: int | None = None,
    n_r_hat: int | None = None,
    scheme: str = "proposed",
    **search,
) -> StrcsResult:
    """Estimate the field-response information of ``scenario`` from pilots.

    Sweeps the transmitter then the receiver, recovers AoDs and AoAs by OMP,
    picks ``k`` additional position pairs by ``scheme``, measures them and
    solves for the path response matrix.  ``n_t_hat``/``n_r_hat`` default to
    one more than the true path counts.  Extra keyword arguments go to the
    condition-number search.
    """
    if isinstance(grid, int):
        grid = AngleGrid(grid)
    n_t_hat = scenario.n_t + 1 if n_t_hat is None else n_t_hat
    n_r_hat = scenario.n_r + 1 if n_r_hat is None else n_r_hat
    side = t_traj.region_side

    meas = run_strcs_measurements(scenario, t_traj, r_traj, power, noise_var, rng)
    aod_fit = estimate_aods(meas, grid, n_t_hat)
    aoa_fit = estimate_aoas(meas, grid, n_r_hat)
    aods, aoas = aod_fit.angles, aoa_fit.angles

    if scheme == "proposed":
        add = min_condition_positions(aods, aoas, meas, k, side, rng, **search)
    else:
        add = baseline_positions(scheme, aods, aoas, meas, k, side, rng, **search)
    y_add = measure_pairs(scenario, add.t_pairs, add.r_pairs, power, noise_var, rng)
    meas = meas.with_additional(add.t_pairs, add.r_pairs, y_add)

    system = assemble(meas, aods, aoas, include_sweeps=scheme != "peam")
    prm_hat = estimate_prm(system, len(aoas), len(aods))
    return StrcsResult(FriEstimate(aods, aoas, prm_hat), meas, add, aod_fit, aoa_fit)
