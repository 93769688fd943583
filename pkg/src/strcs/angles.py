"""Angular-grid dictionaries and orthogonal matching pursuit.

The dictionary for a set of ``M`` antenna positions has one column per
``(theta, phi)`` pair on a ``G x G`` grid; column ``g1 + g2*G`` (0-based)
is the steering vector for ``(grid[g1], grid[g2])``.  Correlations against
all ``G**2`` columns factor into two ``M x G`` matrices, so the dictionary is
only built in full on request.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .measurement import StrcsMeasurements

__all__ = [
    "AngleGrid",
    "SparseAngleEstimate",
    "steering_vector",
    "steering_matrix",
    "dictionary_column",
    "dictionary",
    "correlations",
    "omp",
    "estimate_aods",
    "estimate_aoas",
]


@dataclass(frozen=True)
class AngleGrid:
    """Uniform grid ``-1 + 2g/G`` for ``g = 1..G`` on each virtual-angle axis."""

    size: int

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError("grid size must be positive")

    @property
    def values(self) -> NDArray[np.float64]:
        g = np.arange(1, self.size + 1)
        return -1.0 + 2.0 * g / self.size

    def column_index(self, g1: int, g2: int) -> int:
        """0-based dictionary column of the 1-based grid pair ``(g1, g2)``."""
        if not (1 <= g1 <= self.size and 1 <= g2 <= self.size):
            raise IndexError(f"grid indices ({g1}, {g2}) outside 1..{self.size}")
        return (g1 - 1) + (g2 - 1) * self.size

    def pair(self, column: int) -> tuple[int, int]:
        """1-based ``(g1, g2)`` of a 0-based column index."""
        g2, g1 = divmod(int(column), self.size)
        return g1 + 1, g2 + 1

    def angles(self, columns: ArrayLike) -> NDArray[np.float64]:
        """``(n, 2)`` virtual angles of 0-based column indices."""
        g2, g1 = np.divmod(np.asarray(columns, dtype=int), self.size)
        v = self.values
        return np.column_stack([v[g1], v[g2]])


@dataclass(frozen=True)
class SparseAngleEstimate:
    """Result of one OMP run.

    ``angles`` and ``coefficients`` are ordered by selection.  ``dropped``
    counts candidate columns that were rejected because they made the selected
    support numerically rank deficient.
    """

    angles: NDArray[np.float64]
    coefficients: NDArray[np.complex128]
    columns: NDArray[np.int64]
    residual_norm: float
    residual_history: NDArray[np.float64]
    grid: AngleGrid
    dropped: int = 0

    def __len__(self) -> int:
        return len(self.columns)

    @property
    def pairs(self) -> list[tuple[tuple[float, float], complex]]:
        return [
            ((float(a[0]), float(a[1])), complex(c))
            for a, c in zip(self.angles, self.coefficients)
        ]


def steering_matrix(positions: ArrayLike, angles: ArrayLike) -> NDArray[np.complex128]:
    """``(M, L)`` matrix with entries ``exp(-j 2 pi (x_m theta_l + y_m phi_l))``."""
    pos = np.atleast_2d(np.asarray(positions, dtype=float))
    ang = np.atleast_2d(np.asarray(angles, dtype=float))
    return np.exp(-2j * np.pi * (pos @ ang.T))


def steering_vector(positions: ArrayLike, angles: ArrayLike) -> NDArray[np.complex128]:
    pos = np.atleast_2d(np.asarray(positions, dtype=float))
    if len(pos) == 0:
        raise ValueError("need at least one position")
    return steering_matrix(pos, np.asarray(angles, dtype=float).reshape(1, 2))[:, 0]


def dictionary_column(
    positions: ArrayLike, grid: AngleGrid, g1: int, g2: int
) -> NDArray[np.complex128]:
    """Dictionary column for the 1-based grid pair ``(g1, g2)``."""
    col = grid.column_index(g1, g2)
    return steering_vector(positions, grid.angles([col])[0])


def dictionary(positions: ArrayLike, grid: AngleGrid) -> NDArray[np.complex128]:
    """Materialize the full ``M x G**2`` dictionary.

    Memory grows as ``16 * M * G**2`` bytes; :func:`omp` never needs this.
    """
    pos = np.atleast_2d(np.asarray(positions, dtype=float))
    return steering_matrix(pos, grid.angles(np.arange(grid.size**2)))


def _axis_factors(positions: NDArray[np.float64], grid: AngleGrid):
    v = grid.values
    ex = np.exp(2j * np.pi * np.outer(positions[:, 0], v))
    ey = np.exp(2j * np.pi * np.outer(positions[:, 1], v))
    return ex, ey


def correlations(
    positions: ArrayLike, grid: AngleGrid, y: ArrayLike, factors=None
) -> NDArray[np.complex128]:
    """Inner products ``a_col^H y`` for every dictionary column.

    Returned flat in column order (``g1`` fastest).
    """
    pos = np.atleast_2d(np.asarray(positions, dtype=float))
    ex, ey = factors if factors is not None else _axis_factors(pos, grid)
    # conj(a)[m] = ex[m, g1] * ey[m, g2]
    corr = ex.T @ (np.asarray(y)[:, None] * ey)  # [g1, g2]
    return corr.T.ravel()


def omp(
    y: ArrayLike,
    positions: ArrayLike,
    grid: AngleGrid | int,
    sparsity: int,
    rank_tol: float = 1e-10,
) -> SparseAngleEstimate:
    """Orthogonal matching pursuit over the angular dictionary.

    Runs exactly ``sparsity`` iterations.  Each one picks the column with the
    largest correlation magnitude against the residual (lowest index on ties),
    then re-fits all selected coefficients by least squares.  All columns have
    norm ``sqrt(M)``, so no column normalization is applied.
    """
    if isinstance(grid, int):
        grid = AngleGrid(grid)
    y = np.asarray(y, dtype=complex).ravel()
    pos = np.atleast_2d(np.asarray(positions, dtype=float))
    if len(pos) != len(y):
        raise ValueError("one measurement per position is required")
    if not 1 <= sparsity <= len(y):
        raise ValueError(f"sparsity must be in 1..{len(y)}, got {sparsity}")
    if sparsity > grid.size**2:
        raise ValueError("sparsity exceeds the dictionary size")

    factors = _axis_factors(pos, grid)
    y_norm = np.linalg.norm(y)
    selected: list[int] = []
    excluded = np.zeros(grid.size**2, dtype=bool)
    atoms = np.zeros((len(y), 0), dtype=complex)
    coef = np.zeros(0, dtype=complex)
    residual = y.copy()
    history = [float(y_norm)]
    dropped = 0

    while len(selected) < sparsity:
        score = np.abs(correlations(pos, grid, residual, factors))
        score[excluded] = -1.0
        col = int(np.argmax(score))
        if score[col] < 0:
            raise RuntimeError("dictionary exhausted before reaching the sparsity")
        excluded[col] = True
        cand = np.column_stack([atoms, steering_vector(pos, grid.angles([col])[0])])
        s = np.linalg.svd(cand, compute_uv=False)
        if y_norm > 0 and s[-1] <= rank_tol * s[0]:
            dropped += 1
            continue
        atoms = cand
        selected.append(col)
        if y_norm == 0:
            coef = np.zeros(len(selected), dtype=complex)
        else:
            coef = np.linalg.lstsq(atoms, y, rcond=None)[0]
        residual = y - atoms @ coef
        history.append(float(np.linalg.norm(residual)))

    if dropped:
        warnings.warn(
            f"OMP skipped {dropped} rank-deficient column(s)", RuntimeWarning, stacklevel=2
        )
    cols = np.asarray(selected, dtype=np.int64)
    return SparseAngleEstimate(
        angles=grid.angles(cols),
        coefficients=coef,
        columns=cols,
        residual_norm=history[-1],
        residual_history=np.asarray(history),
        grid=grid,
        dropped=dropped,
    )


def estimate_aods(
    meas: StrcsMeasurements, grid: AngleGrid | int, sparsity: int
) -> SparseAngleEstimate:
    """Virtual AoDs from the transmit-sweep pilots.

    The transmit sweep observes ``y_t = conj(A) x``, so the recovery runs on
    ``conj(y_t)`` against the steering dictionary.
    """
    return omp(meas.y_t.conj(), meas.t_traj.positions, grid, sparsity)


def estimate_aoas(
    meas: StrcsMeasurements, grid: AngleGrid | int, sparsity: int
) -> SparseAngleEstimate:
    """Virtual AoAs from the receive-sweep pilots."""
    return omp(meas.y_r, meas.r_traj.positions, grid, sparsity)
