"""Field-response channel model between two movable antennas.

Positions are measured in wavelengths (the carrier wavelength is fixed to 1),
so a phase of ``2*pi*(x*theta + y*phi)`` is accumulated by a path with
virtual angles ``(theta, phi)`` at position ``(x, y)``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

__all__ = [
    "VirtualAngles",
    "Scenario",
    "to_virtual",
    "frv",
    "t_frv",
    "r_frv",
    "channel",
    "channel_matrix",
    "complex_normal",
    "random_scenario",
    "dump_scenario",
    "load_scenario",
]


class VirtualAngles(NamedTuple):
    """Direction cosines of one path, both in ``[-1, 1]``."""

    theta: float
    phi: float


def to_virtual(elev: float, azim: float) -> VirtualAngles:
    """Convert physical elevation/azimuth (radians, both in ``[0, pi]``)."""
    if not (0.0 <= elev <= np.pi and 0.0 <= azim <= np.pi):
        raise ValueError(f"angles must lie in [0, pi], got elev={elev}, azim={azim}")
    return VirtualAngles(float(np.sin(elev) * np.cos(azim)), float(np.cos(elev)))


def _as_angles(angles: ArrayLike) -> NDArray[np.float64]:
    arr = np.asarray(angles, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"angles must have shape (L, 2), got {arr.shape}")
    if np.any(np.abs(arr) > 1.0 + 1e-12):
        raise ValueError("virtual angles must lie in [-1, 1]")
    return arr


@dataclass(frozen=True)
class Scenario:
    """Ground-truth field-response information of one channel realization.

    Attributes
    ----------
    t_angles : (Lt, 2) float array
        Virtual AoDs, one ``(theta, phi)`` row per transmit-side path.
    r_angles : (Lr, 2) float array
        Virtual AoAs, one ``(theta, phi)`` row per receive-side path.
    prm : (Lr, Lt) complex array
        Path response matrix between the region centers.
    eta : float
        Diagonal to off-diagonal average power ratio used to draw ``prm``.
    """

    t_angles: NDArray[np.float64]
    r_angles: NDArray[np.float64]
    prm: NDArray[np.complex128]
    eta: float = 1.0

    def __post_init__(self) -> None:
        t = _as_angles(self.t_angles)
        r = _as_angles(self.r_angles)
        prm = np.atleast_2d(np.asarray(self.prm, dtype=complex))
        if prm.shape != (len(r), len(t)):
            raise ValueError(
                f"prm must be {len(r)}x{len(t)} (Lr x Lt), got {prm.shape}"
            )
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        for arr in (t, r, prm):
            arr.setflags(write=False)
        object.__setattr__(self, "t_angles", t)
        object.__setattr__(self, "r_angles", r)
        object.__setattr__(self, "prm", prm)

    @property
    def n_t(self) -> int:
        return self.t_angles.shape[0]

    @property
    def n_r(self) -> int:
        return self.r_angles.shape[0]


def frv(angles: ArrayLike, positions: ArrayLike) -> NDArray[np.complex128]:
    """Field response vectors of ``angles`` at one or many positions.

    A single position ``(x, y)`` gives a length-L vector; an ``(n, 2)`` array
    of positions gives an ``(L, n)`` matrix whose columns are the vectors.
    """
    ang = _as_angles(angles)
    pos = np.asarray(positions, dtype=float)
    phase = 2 * np.pi * (ang @ pos.T)
    return np.exp(1j * phase)


def t_frv(scenario: Scenario, t: ArrayLike) -> NDArray[np.complex128]:
    return frv(scenario.t_angles, t)


def r_frv(scenario: Scenario, r: ArrayLike) -> NDArray[np.complex128]:
    return frv(scenario.r_angles, r)


def channel(scenario: Scenario, t: ArrayLike, r: ArrayLike) -> complex:
    """End-to-end channel ``f(r)^H prm g(t)`` for one position pair."""
    g = t_frv(scenario, t)
    f = r_frv(scenario, r)
    return complex(f.conj() @ scenario.prm @ g)


def channel_matrix(
    t_angles: ArrayLike,
    r_angles: ArrayLike,
    prm: ArrayLike,
    t_positions: ArrayLike,
    r_positions: ArrayLike,
) -> NDArray[np.complex128]:
    """Channels between every transmit and receive position.

    Returns an ``(n_r, n_t)`` matrix with entry ``[v, u]`` equal to the channel
    from ``t_positions[u]`` to ``r_positions[v]``.
    """
    g = frv(t_angles, np.atleast_2d(t_positions))
    f = frv(r_angles, np.atleast_2d(r_positions))
    return f.conj().T @ np.asarray(prm, dtype=complex) @ g


def complex_normal(
    rng: np.random.Generator, var: ArrayLike, size=None
) -> NDArray[np.complex128]:
    """Circularly-symmetric complex normal samples with variance ``var``."""
    scale = np.sqrt(np.asarray(var, dtype=float) / 2)
    if size is None:
        size = np.shape(scale)
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def prm_variances(n_t: int, n_r: int, eta: float) -> NDArray[np.float64]:
    """Per-entry variances of the random path response matrix.

    The ``min(n_t, n_r)`` diagonal entries share power ``eta/(eta+1)`` and the
    off-diagonal entries share ``1/(eta+1)``, so the total is 1.  With a single
    receive path there are no off-diagonal entries at all.
    """
    var = np.zeros((n_r, n_t))
    if n_r > 1:
        var[:] = 1.0 / ((eta + 1) * (n_r - 1) * n_r)
    idx = np.arange(min(n_t, n_r))
    var[idx, idx] = eta / ((eta + 1) * n_r)
    return var


def random_scenario(
    n_t: int, n_r: int, eta: float, rng: np.random.Generator
) -> Scenario:
    """Draw a random channel with uniformly distributed physical angles.

    Elevation and azimuth of every path are uniform on ``[0, pi]``.  The
    diagonal PRM entries have variance ``eta/((eta+1)*n_r)`` and the
    off-diagonal ones ``1/((eta+1)*(n_r-1)*n_r)``.
    """
    if n_t < 1 or n_r < 1:
        raise ValueError("path counts must be positive")
    if not eta > 0:
        raise ValueError("eta must be positive")

    def draw_angles(n):
        elev = rng.uniform(0.0, np.pi, n)
        azim = rng.uniform(0.0, np.pi, n)
        return np.column_stack([np.sin(elev) * np.cos(azim), np.cos(elev)])

    t_angles = draw_angles(n_t)
    r_angles = draw_angles(n_r)
    prm = complex_normal(rng, prm_variances(n_t, n_r, eta))
    return Scenario(t_angles, r_angles, prm, eta)


def dump_scenario(scenario: Scenario) -> str:
    """Render a scenario as plain text (``key = value`` header, then entries).

    Angles are written one path per line as ``theta phi``; the PRM follows in
    row-major order, one ``re im`` pair per line.
    """
    out = io.StringIO()
    out.write(f"n_t = {scenario.n_t}\n")
    out.write(f"n_r = {scenario.n_r}\n")
    out.write(f"eta = {float(scenario.eta)!r}\n")
    out.write("[t_angles]\n")
    for theta, phi in scenario.t_angles:
        out.write(f"{float(theta)!r} {float(phi)!r}\n")
    out.write("[r_angles]\n")
    for theta, phi in scenario.r_angles:
        out.write(f"{float(theta)!r} {float(phi)!r}\n")
    out.write("[prm]\n")
    for z in scenario.prm.ravel():
        out.write(f"{float(z.real)!r} {float(z.imag)!r}\n")
    return out.getvalue()


def load_scenario(text: str) -> Scenario:
    """Inverse of :func:`dump_scenario`."""
    header: dict[str, str] = {}
    sections: dict[str, list[list[float]]] = {}
    current = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1]
            sections[current] = []
        elif current is None:
            key, _, value = line.partition("=")
            header[key.strip()] = value.strip()
        else:
            sections[current].append([float(v) for v in line.split()])
    n_t, n_r = int(header["n_t"]), int(header["n_r"])
    pairs = np.asarray(sections["prm"], dtype=float)
    prm = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(n_r, n_t)
    return Scenario(
        np.asarray(sections["t_angles"]),
        np.asarray(sections["r_angles"]),
        prm,
        float(header["eta"]),
    )
