"""Path response matrix estimation from the stacked pilot system.

All Kronecker constructions use column-major vectorization: unknown ``k`` of
``gamma = vec(prm)`` is ``prm[k % Lr, k // Lr]``, and a measurement at
``(t, r)`` has row ``sqrt(P) * kron(g(t), conj(f(r)))`` so that the noiseless
pilot equals ``row @ gamma``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import optimize

from .angles import steering_matrix
from .fields import frv
from .measurement import StrcsMeasurements

__all__ = [
    "RankDeficiencyError",
    "RankBoundError",
    "FriEstimate",
    "AdditionalPositions",
    "StackedSystem",
    "psi_t_block",
    "psi_r_block",
    "psi_additional",
    "additional_rows",
    "assemble",
    "condition_number",
    "ConditionObjective",
    "min_rank_k",
    "min_condition_positions",
    "random_positions",
    "baseline_positions",
    "estimate_prm",
    "reconstruct_channel",
    "reconstruct_matrix",
    "positions_csv",
]


class RankDeficiencyError(np.linalg.LinAlgError):
    """The stacked system does not have full column rank."""

    def __init__(self, message: str, singular_values: NDArray[np.float64]):
        super().__init__(message)
        self.singular_values = singular_values


class RankBoundError(ValueError):
    """Too few additional measurements for the unknown count."""


@dataclass(frozen=True)
class FriEstimate:
    """Estimated field-response information: AoDs, AoAs and the PRM."""

    aods: NDArray[np.float64]
    aoas: NDArray[np.float64]
    prm_hat: NDArray[np.complex128]

    def __post_init__(self) -> None:
        aods = np.asarray(self.aods, dtype=float).reshape(-1, 2)
        aoas = np.asarray(self.aoas, dtype=float).reshape(-1, 2)
        prm = np.asarray(self.prm_hat, dtype=complex)
        if prm.shape != (len(aoas), len(aods)):
            raise ValueError(
                f"prm_hat must be {len(aoas)}x{len(aods)}, got {prm.shape}"
            )
        object.__setattr__(self, "aods", aods)
        object.__setattr__(self, "aoas", aoas)
        object.__setattr__(self, "prm_hat", prm)


@dataclass(frozen=True)
class AdditionalPositions:
    """Paired transmit/receive positions for the coefficient-estimation step.

    ``kappa`` is the condition number of the system these positions produce,
    ``initial_kappa`` the best value among the starting candidates, and
    ``improved`` whether local search beat that starting value.
    """

    t_pairs: NDArray[np.float64]
    r_pairs: NDArray[np.float64]
    kappa: float = float("nan")
    initial_kappa: float = float("nan")
    improved: bool = True

    def __post_init__(self) -> None:
        t = np.asarray(self.t_pairs, dtype=float).reshape(-1, 2)
        r = np.asarray(self.r_pairs, dtype=float).reshape(-1, 2)
        if len(t) != len(r):
            raise ValueError("t_pairs and r_pairs differ in length")
        object.__setattr__(self, "t_pairs", t)
        object.__setattr__(self, "r_pairs", r)

    def __len__(self) -> int:
        return len(self.t_pairs)


@dataclass(frozen=True)
class StackedSystem:
    """Linear system ``rhs ~ matrix @ vec(prm)``.

    Rows are the transmit sweep, then the receive sweep, then the additional
    pairs; ``blocks`` records the three row counts.
    """

    matrix: NDArray[np.complex128]
    rhs: NDArray[np.complex128]
    blocks: tuple[int, int, int]


def _angles(a: ArrayLike) -> NDArray[np.float64]:
    arr = np.asarray(a, dtype=float).reshape(-1, 2)
    if len(arr) == 0:
        raise ValueError("angle lists must be nonempty")
    return arr


def psi_t_block(
    aods: ArrayLike, aoas: ArrayLike, r1: ArrayLike, t_positions: ArrayLike, power: float
) -> NDArray[np.complex128]:
    """Rows of the transmit-sweep pilots: ``sqrt(P) kron(conj(A), f(r1)^H)``."""
    a = steering_matrix(t_positions, _angles(aods))
    f = frv(_angles(aoas), np.asarray(r1, dtype=float))
    return np.sqrt(power) * np.kron(a.conj(), f.conj()[None, :])


def psi_r_block(
    aods: ArrayLike, aoas: ArrayLike, t_m: ArrayLike, r_positions: ArrayLike, power: float
) -> NDArray[np.complex128]:
    """Rows of the receive-sweep pilots: ``sqrt(P) kron(g(tM)^T, B)``."""
    g = frv(_angles(aods), np.asarray(t_m, dtype=float))
    b = steering_matrix(r_positions, _angles(aoas))
    return np.sqrt(power) * np.kron(g[None, :], b)


def psi_additional(
    aods: ArrayLike, aoas: ArrayLike, t: ArrayLike, r: ArrayLike, power: float
) -> NDArray[np.complex128]:
    """``psi(t, r) = sqrt(P) kron(conj(g(t)), f(r))``; its conjugate is the row."""
    g = frv(_angles(aods), np.asarray(t, dtype=float))
    f = frv(_angles(aoas), np.asarray(r, dtype=float))
    return np.sqrt(power) * np.kron(g.conj(), f)


def additional_rows(
    aods: ArrayLike, aoas: ArrayLike, t_pairs: ArrayLike, r_pairs: ArrayLike, power: float
) -> NDArray[np.complex128]:
    """``(K, Lr*Lt)`` rows ``psi(t_k, r_k)^H`` for all additional pairs."""
    t = np.asarray(t_pairs, dtype=float).reshape(-1, 2)
    r = np.asarray(r_pairs, dtype=float).reshape(-1, 2)
    g = np.exp(2j * np.pi * (t @ _angles(aods).T))  # (K, Lt)
    f = np.exp(-2j * np.pi * (r @ _angles(aoas).T))  # (K, Lr), conjugated
    rows = g[:, :, None] * f[:, None, :]
    return np.sqrt(power) * rows.reshape(len(t), g.shape[1] * f.shape[1])


def _sweep_rows(aods, aoas, meas: StrcsMeasurements) -> NDArray[np.complex128]:
    return np.vstack(
        [
            psi_t_block(aods, aoas, meas.r_fixed, meas.t_traj.positions, meas.power),
            psi_r_block(aods, aoas, meas.t_fixed, meas.r_traj.positions, meas.power),
        ]
    )


def assemble(
    meas: StrcsMeasurements,
    aods: ArrayLike,
    aoas: ArrayLike,
    include_sweeps: bool = True,
) -> StackedSystem:
    """Stack all pilots of ``meas`` into one linear system in ``vec(prm)``.

    With ``include_sweeps=False`` only the additional pairs are used.
    """
    extra = additional_rows(aods, aoas, meas.t_add, meas.r_add, meas.power)
    if len(extra) != len(meas.y_add):
        raise ValueError("additional measurements and positions differ in length")
    if not include_sweeps:
        return StackedSystem(extra, np.asarray(meas.y_add), (0, 0, len(extra)))
    sweeps = _sweep_rows(aods, aoas, meas)
    matrix = np.vstack([sweeps, extra])
    rhs = np.concatenate([meas.y_t, meas.y_r, meas.y_add])
    return StackedSystem(matrix, rhs, (len(meas.y_t), len(meas.y_r), len(extra)))


def condition_number(matrix: ArrayLike) -> float:
    s = np.linalg.svd(np.asarray(matrix), compute_uv=False)
    if s[-1] == 0:
        return float("inf")
    return float(s[0] / s[-1])


def min_rank_k(n_t_hat: int, n_r_hat: int, include_sweeps: bool = True) -> int:
    """Smallest admissible number of additional pairs.

    With the sweeps included this is ``Lr*Lt - Lr - Lt``; note the shared
    ``(tM, r1)`` pilot makes the sweep blocks rank ``Lr + Lt - 1``, so one
    more pair is needed for full column rank.
    """
    n = n_t_hat * n_r_hat
    return max(n - n_t_hat - n_r_hat, 0) if include_sweeps else n


class ConditionObjective:
    """Condition number of the stacked system as a function of the pairs.

    The sweep rows are fixed, so their Gram matrix is computed once and each
    evaluation only adds the ``K`` rank-one terms of the additional rows.
    Transmit power scales every row equally and is therefore ignored.
    """

    def __init__(
        self,
        aods: ArrayLike,
        aoas: ArrayLike,
        meas: StrcsMeasurements | None = None,
    ):
        self.aods = _angles(aods)
        self.aoas = _angles(aoas)
        n = len(self.aods) * len(self.aoas)
        if meas is None:
            self.base = np.zeros((n, n), dtype=complex)
        else:
            rows = _sweep_rows(self.aods, self.aoas, meas) / np.sqrt(meas.power)
            self.base = rows.conj().T @ rows
        self.evaluations = 0

        self._t_phase = 2j * np.pi * self.aods.T
        self._r_phase = -2j * np.pi * self.aoas.T

    def rows(self, t_pairs, r_pairs) -> NDArray[np.complex128]:
        return additional_rows(self.aods, self.aoas, t_pairs, r_pairs, 1.0)

    def _kappa(self, t: NDArray[np.float64], r: NDArray[np.float64]) -> float:
        self.evaluations += 1
        g = np.exp(t @ self._t_phase)
        f = np.exp(r @ self._r_phase)
        rows = (g[:, :, None] * f[:, None, :]).reshape(len(t), -1)
        ev = np.linalg.eigvalsh(self.base + rows.conj().T @ rows)
        if ev[0] <= ev[-1] * 1e-30:
            return float("inf")
        return float(np.sqrt(ev[-1] / ev[0]))

    def kappa(self, t_pairs: ArrayLike, r_pairs: ArrayLike) -> float:
        t = np.asarray(t_pairs, dtype=float).reshape(-1, 2)
        r = np.asarray(r_pairs, dtype=float).reshape(-1, 2)
        return self._kappa(t, r)

    def log_kappa(self, z: NDArray[np.float64]) -> float:
        k = len(z) // 4
        value = self._kappa(z[: 2 * k].reshape(k, 2), z[2 * k :].reshape(k, 2))
        # cap keeps the search arithmetic finite for singular configurations
        return float(np.log(min(value, 1e300)))


def random_positions(
    rng: np.random.Generator, count: int, side: float
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    h = side / 2
    t = rng.uniform(-h, h, (count, 2))
    r = rng.uniform(-h, h, (count, 2))
    return t, r


def _check_k(k: int, n_t_hat: int, n_r_hat: int, include_sweeps: bool) -> None:
    need = min_rank_k(n_t_hat, n_r_hat, include_sweeps)
    if k < need:
        raise RankBoundError(
            f"K={k} additional pairs cannot identify a {n_r_hat}x{n_t_hat} "
            f"path response matrix (need K >= {need})"
        )


def min_condition_positions(
    aods: ArrayLike,
    aoas: ArrayLike,
    meas: StrcsMeasurements | None,
    k: int,
    side: float,
    rng: np.random.Generator,
    starts: int = 8,
    maxfev: int = 1000,
    method: str = "l-bfgs-b",
    xtol: float = 1e-4,
) -> AdditionalPositions:
    """Additional pairs that locally minimize the stacked condition number.

    Each of ``starts`` uniformly random configurations seeds a bounded local
    search over the ``4K`` coordinates; the lowest condition number wins, ties
    going to the earlier start.  Passing ``meas=None`` optimizes the
    additional rows alone.

    Parameters
    ----------
    method : {"l-bfgs-b", "nelder-mead", "powell"}
        Local search.  ``l-bfgs-b`` works on finite-difference gradients;
        the other two are derivative free.
    maxfev : int
        Objective evaluation budget per start.
    """
    if method not in ("l-bfgs-b", "nelder-mead", "powell"):
        raise ValueError(f"unknown local search method {method!r}")
    aods, aoas = _angles(aods), _angles(aoas)
    include = meas is not None
    _check_k(k, len(aods), len(aoas), include)
    objective = ConditionObjective(aods, aoas, meas)
    h = side / 2
    bounds = [(-h, h)] * (4 * k)

    best_z, best_val = None, np.inf
    initial_val = np.inf
    initial_z = None
    for _ in range(starts):
        t0, r0 = random_positions(rng, k, side)
        z0 = np.concatenate([t0.ravel(), r0.ravel()])
        v0 = objective.log_kappa(z0)
        if v0 < initial_val:
            initial_val, initial_z = v0, z0
        if method == "l-bfgs-b":
            opts = {"maxfun": maxfev}
        elif method == "powell":
            opts = {"maxfev": maxfev, "xtol": xtol, "ftol": 1e-8}
        else:
            opts = {"maxfev": maxfev, "xatol": xtol, "fatol": 1e-8, "adaptive": True}
        res = optimize.minimize(
            objective.log_kappa, z0, method=method, bounds=bounds, options=opts
        )
        z = np.clip(res.x, -h, h)
        v = objective.log_kappa(z)
        if v0 < v:
            z, v = z0, v0
        if v < best_val:
            best_z, best_val = z, v

    improved = best_val < initial_val
    if not improved:
        best_z, best_val = initial_z, initial_val
        warnings.warn(
            "condition-number search did not improve on its starting points",
            RuntimeWarning,
            stacklevel=2,
        )
    pos = best_z.reshape(2 * k, 2)
    return AdditionalPositions(
        pos[:k], pos[k:], float(np.exp(best_val)), float(np.exp(initial_val)), improved
    )


def baseline_positions(
    scheme: str,
    aods: ArrayLike,
    aoas: ArrayLike,
    meas: StrcsMeasurements,
    k: int,
    side: float,
    rng: np.random.Generator,
    candidates: int = 100,
    **search,
) -> AdditionalPositions:
    """Additional pairs chosen by one of the benchmark rules.

    ``rp`` draws one uniform configuration, ``rps`` keeps the best of
    ``candidates`` draws by stacked condition number, and ``peam`` minimizes
    the condition number of the additional rows alone (the estimator must then
    skip the sweep pilots too).
    """
    scheme = scheme.lower()
    aods, aoas = _angles(aods), _angles(aoas)
    if scheme == "peam":
        return min_condition_positions(aods, aoas, None, k, side, rng, **search)
    if scheme not in ("rp", "rps"):
        raise ValueError(f"unknown baseline scheme {scheme!r}")
    _check_k(k, len(aods), len(aoas), True)
    objective = ConditionObjective(aods, aoas, meas)
    n_draws = 1 if scheme == "rp" else candidates
    best = None
    for _ in range(n_draws):
        t, r = random_positions(rng, k, side)
        kap = objective.kappa(t, r)
        if best is None or kap < best[0]:
            best = (kap, t, r)
    kap, t, r = best
    return AdditionalPositions(t, r, kap, kap, False)


def estimate_prm(
    system: StackedSystem, n_r_hat: int, n_t_hat: int, rcond: float = 1e-10
) -> NDArray[np.complex128]:
    """Least-squares PRM ``unvec(pinv(matrix) @ rhs)`` (column-major).

    Raises
    ------
    RankDeficiencyError
        If any singular value falls below ``rcond`` times the largest.
    """
    a = system.matrix
    if a.shape[1] != n_r_hat * n_t_hat:
        raise ValueError("system width does not match the PRM size")
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    if len(s) < a.shape[1] or s[-1] <= rcond * s[0]:
        raise RankDeficiencyError(
            f"stacked system is rank deficient (sigma_min/sigma_max = "
            f"{(s[-1] / s[0]) if len(s) == a.shape[1] else 0.0:.3e})",
            s,
        )
    gamma = vh.conj().T @ ((u.conj().T @ system.rhs) / s)
    return gamma.reshape(n_t_hat, n_r_hat).T


def reconstruct_matrix(
    est: FriEstimate, t_positions: ArrayLike, r_positions: ArrayLike
) -> NDArray[np.complex128]:
    """Reconstructed channels, entry ``[v, u]`` for ``(t[u], r[v])``."""
    g = frv(est.aods, np.atleast_2d(t_positions))
    f = frv(est.aoas, np.atleast_2d(r_positions))
    return f.conj().T @ est.prm_hat @ g


def reconstruct_channel(est: FriEstimate, t: ArrayLike, r: ArrayLike) -> complex:
    return complex(reconstruct_matrix(est, [t], [r])[0, 0])


def positions_csv(add: AdditionalPositions) -> str:
    lines = ["k,xt,yt,xr,yr"]
    for i, (t, r) in enumerate(zip(add.t_pairs, add.r_pairs)):
        coords = ",".join(repr(float(v)) for v in (*t, *r))
        lines.append(f"{i},{coords}")
    return "\n".join(lines) + "\n"
