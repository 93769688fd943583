"""Reconstruction error over a uniform evaluation grid and Monte-Carlo sweeps."""

from __future__ import annotations

import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .fields import Scenario, channel_matrix, complex_normal, random_scenario
from .measurement import make_trajectory
from .pipeline import run_strcs
from .prm import FriEstimate, RankBoundError, RankDeficiencyError, reconstruct_matrix

__all__ = [
    "EvaluationGrid",
    "build_grid",
    "nmse",
    "nmse_matrix",
    "em_baseline",
    "SweepPoint",
    "NmseCurve",
    "SweepConfig",
    "realization_rng",
    "run_realization",
    "run_sweep",
    "sweep_axis",
    "true_matrix",
]


@dataclass(frozen=True)
class EvaluationGrid:
    """Cell centers of a ``(A/spacing) x (A/spacing)`` partition of the region."""

    centers: NDArray[np.float64]
    spacing: float

    @property
    def size(self) -> int:
        return len(self.centers)


def build_grid(side: float, spacing: float) -> EvaluationGrid:
    ratio = side / spacing
    n = int(round(ratio))
    if n < 1 or not math.isclose(ratio, n, rel_tol=1e-9):
        raise ValueError(f"region side {side} is not a multiple of spacing {spacing}")
    axis = -side / 2 + spacing * (np.arange(n) + 0.5)
    xx, yy = np.meshgrid(axis, axis)
    return EvaluationGrid(np.column_stack([xx.ravel(), yy.ravel()]), spacing)


def nmse_matrix(h: NDArray[np.complex128], h_hat: NDArray[np.complex128]) -> float:
    ref = np.vdot(h, h).real
    if ref == 0:
        raise ZeroDivisionError("reference channel has zero energy")
    err = h - h_hat
    return float(np.vdot(err, err).real / ref)


def true_matrix(scenario: Scenario, grid: EvaluationGrid) -> NDArray[np.complex128]:
    return channel_matrix(
        scenario.t_angles, scenario.r_angles, scenario.prm, grid.centers, grid.centers
    )


def nmse(scenario: Scenario, est: FriEstimate, grid: EvaluationGrid) -> float:
    """Single-realization ``||H - H_hat||_F^2 / ||H||_F^2`` over all grid pairs."""
    h = true_matrix(scenario, grid)
    h_hat = reconstruct_matrix(est, grid.centers, grid.centers)
    return nmse_matrix(h, h_hat)


def em_baseline(
    scenario: Scenario,
    grid: EvaluationGrid,
    power: float,
    noise_var: float,
    rng: np.random.Generator,
) -> float:
    """NMSE of measuring every grid pair once and scaling by ``1/sqrt(P)``."""
    h = true_matrix(scenario, grid)
    if noise_var == 0:
        return 0.0
    z = complex_normal(rng, noise_var, h.shape)
    h_hat = h + z / np.sqrt(power)
    return nmse_matrix(h, h_hat)


@dataclass(frozen=True)
class SweepConfig:
    """Parameters of one Monte-Carlo experiment.

    ``sweep`` selects the axis: ``"snr"`` iterates ``snr_db``, ``"k"``
    iterates ``k_values``, and ``"single"`` evaluates ``snr_db[0]`` with
    ``k``.  ``scheme`` is ``proposed``, ``rp``, ``rps``, ``peam`` or ``em``.
    """

    sweep: str = "snr"
    snr_db: tuple[float, ...] = (-5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0)
    k: int = 16
    k_values: tuple[int, ...] = (16,)
    m: int = 256
    n: int = 256
    n_t: int = 3
    n_r: int = 3
    n_t_hat: int = 4
    n_r_hat: int = 4
    grid_size: int = 200
    side: float = 4.0
    spacing: float = 0.2
    eta: float = 1.0
    shape: str = "upa"
    scheme: str = "proposed"
    realizations: int = 200
    seed: int = 0
    starts: int = 8
    maxfev: int = 1000
    method: str = "l-bfgs-b"
    rps_candidates: int = 100


@dataclass(frozen=True)
class SweepPoint:
    value: float
    mean_nmse: float
    stderr: float
    n_ok: int
    n_excluded: int


@dataclass
class NmseCurve:
    sweep_name: str
    points: list[SweepPoint] = field(default_factory=list)

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("sweep_value,mean_nmse,stderr,n_ok,n_excluded\n")
        for p in self.points:
            out.write(
                f"{p.value!r},{p.mean_nmse!r},{p.stderr!r},{p.n_ok},{p.n_excluded}\n"
            )
        return out.getvalue()

    @property
    def excluded(self) -> int:
        return sum(p.n_excluded for p in self.points)


def realization_rng(seed: int, index: int) -> np.random.Generator:
    """Independent generator for realization ``index`` under master ``seed``."""
    return np.random.default_rng([seed, index])


def run_realization(
    cfg: SweepConfig, snr_db: float, k: int, index: int, grid: EvaluationGrid | None = None
) -> float:
    """NMSE of one realization; the scenario depends only on ``(seed, index)``.

    Scenario draws use their own stream so every sweep point and scheme sees
    the same channels for a given index.
    """
    scenario = random_scenario(cfg.n_t, cfg.n_r, cfg.eta, realization_rng(cfg.seed, index))
    rng = np.random.default_rng([cfg.seed, index, 1])
    grid = grid if grid is not None else build_grid(cfg.side, cfg.spacing)
    power, noise_var = 10.0 ** (snr_db / 10.0), 1.0
    if cfg.scheme == "em":
        return em_baseline(scenario, grid, power, noise_var, rng)
    t_traj = make_trajectory(cfg.shape, cfg.m, cfg.side)
    r_traj = make_trajectory(cfg.shape, cfg.n, cfg.side)
    search = {}
    if cfg.scheme in ("proposed", "peam"):
        search = {"starts": cfg.starts, "maxfev": cfg.maxfev, "method": cfg.method}
    elif cfg.scheme == "rps":
        search = {"candidates": cfg.rps_candidates}
    result = run_strcs(
        scenario,
        t_traj,
        r_traj,
        power,
        noise_var,
        k,
        rng,
        grid=cfg.grid_size,
        n_t_hat=cfg.n_t_hat,
        n_r_hat=cfg.n_r_hat,
        scheme=cfg.scheme,
        **search,
    )
    return nmse(scenario, result.estimate, grid)


def _safe_realization(args) -> float:
    cfg, snr_db, k, index, grid = args
    try:
        return run_realization(cfg, snr_db, k, index, grid)
    except (RankDeficiencyError, RankBoundError):
        return float("nan")


def sweep_axis(cfg: SweepConfig) -> list[tuple[float, float, int]]:
    """``(sweep value, snr_db, k)`` for every point of the configured sweep."""
    if not cfg.snr_db:
        raise ValueError("at least one SNR value is required")
    if cfg.sweep == "snr":
        return [(s, s, cfg.k) for s in cfg.snr_db]
    if cfg.sweep == "k":
        return [(k, cfg.snr_db[0], k) for k in cfg.k_values]
    if cfg.sweep == "single":
        return [(cfg.snr_db[0], cfg.snr_db[0], cfg.k)]
    raise ValueError(f"unknown sweep kind {cfg.sweep!r}")


def run_sweep(cfg: SweepConfig, progress=None, workers: int = 1) -> NmseCurve:
    """Mean NMSE and standard error for every point on the sweep axis.

    Realizations that fail with a rank error are counted in ``n_excluded``
    and left out of the mean.  ``progress``, if given, is a writable stream.
    With ``workers > 1`` realizations run in a process pool; results are
    keyed by realization index, so the curve does not depend on ``workers``.
    """
    axis = sweep_axis(cfg)
    grid = build_grid(cfg.side, cfg.spacing)
    curve = NmseCurve(cfg.sweep)
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        for value, snr_db, k in axis:
            jobs = [(cfg, snr_db, k, i, grid) for i in range(cfg.realizations)]
            if pool is None:
                results = list(map(_safe_realization, jobs))
            else:
                results = list(pool.map(_safe_realization, jobs, chunksize=4))
            values = np.array(results, dtype=float)
            ok = values[~np.isnan(values)]
            n_ok = len(ok)
            mean = float(ok.mean()) if n_ok else float("nan")
            stderr = float(ok.std(ddof=1) / np.sqrt(n_ok)) if n_ok > 1 else float("nan")
            curve.points.append(
                SweepPoint(float(value), mean, stderr, n_ok, cfg.realizations - n_ok)
            )
            if progress is not None:
                print(
                    f"{cfg.sweep}={value}: nmse={mean:.4g} ok={n_ok}/{cfg.realizations}",
                    file=progress,
                    flush=True,
                )
    finally:
        if pool is not None:
            pool.shutdown()
    return curve
