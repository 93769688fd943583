"""Plain-text experiment configuration (``key = value`` lines, ``#`` comments)."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, fields, replace

from .evaluation import SweepConfig
from .measurement import SHAPES
from .pipeline import SCHEMES

__all__ = ["ConfigError", "ExperimentConfig", "parse_config", "render_config"]

SWEEPS = ("snr", "k", "single")
METHODS = ("l-bfgs-b", "nelder-mead", "powell")


class ConfigError(ValueError):
    """Invalid configuration; ``line`` is the 1-based offending line if known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class ExperimentConfig(SweepConfig):
    """Sweep parameters plus the CLI-only output path and worker count.

    Defaults follow the reference setup: M = N = 256, K = 16, three paths per
    side with one extra estimated path, eta = 1, G = 200, A = 4 and a
    0.2-wavelength evaluation grid.
    """

    output: str = "nmse.csv"
    workers: int = 1

    def sweep_config(self) -> SweepConfig:
        names = [f.name for f in fields(SweepConfig)]
        return SweepConfig(**{n: getattr(self, n) for n in names})

    def validate(self) -> "ExperimentConfig":
        """Raise :class:`ConfigError` on invalid values; warn if ``L_hat < L``."""
        positive = (
            "m", "n", "n_t", "n_r", "n_t_hat", "n_r_hat", "grid_size",
            "realizations", "starts", "maxfev", "rps_candidates", "workers", "k",
        )
        for name in positive:
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if any(k < 1 for k in self.k_values) or not self.k_values:
            raise ConfigError("k_values must be a nonempty list of positive counts")
        for name in ("side", "spacing", "eta"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ConfigError(f"{name} must be positive")
        if self.seed < 0:
            raise ConfigError("seed must be nonnegative")
        if not self.snr_db:
            raise ConfigError("snr_db needs at least one value")
        ratio = self.side / self.spacing
        if not math.isclose(ratio, round(ratio), rel_tol=1e-9):
            raise ConfigError("side must be an integer multiple of spacing")
        choices = {
            "sweep": SWEEPS,
            "shape": SHAPES,
            "scheme": SCHEMES + ("em",),
            "method": METHODS,
        }
        for name, allowed in choices.items():
            if getattr(self, name) not in allowed:
                raise ConfigError(f"{name} must be one of {', '.join(allowed)}")
        if self.shape == "upa":
            for name in ("m", "n"):
                count = getattr(self, name)
                if math.isqrt(count) ** 2 != count:
                    raise ConfigError(f"upa needs a perfect-square {name}, got {count}")
        if self.m < 4 or self.n < 4:
            raise ConfigError("trajectories need at least 4 positions")
        if self.n_t_hat < self.n_t or self.n_r_hat < self.n_r:
            warnings.warn(
                "estimated path counts below the true counts cannot recover all paths",
                UserWarning,
                stacklevel=2,
            )
        return self


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _convert(name: str, text: str):
    kind = _FIELD_TYPES[name]
    if kind.startswith("tuple"):
        item = float if "float" in kind else int
        parts = [p.strip() for p in text.split(",") if p.strip()]
        return tuple(item(p) for p in parts)
    if kind == "int":
        return int(text)
    if kind == "float":
        return float(text)
    return text


def parse_config(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Parse ``key = value`` lines over ``base`` (default: reference values).

    ``upa_count`` is shorthand for setting both ``m`` and ``n``.  Unknown keys
    and malformed values raise :class:`ConfigError` naming the line.
    """
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip().lower(), value.strip()
        if not sep or not key:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        names = ("m", "n") if key == "upa_count" else (key,)
        for name in names:
            if name not in _FIELD_TYPES:
                raise ConfigError(f"unknown key {key!r}", lineno)
            try:
                values[name] = _convert(name, value)
            except ValueError:
                raise ConfigError(f"bad value {value!r} for {key}", lineno) from None
    cfg = replace(base or ExperimentConfig(), **values)
    return cfg.validate()


def render_config(cfg: ExperimentConfig) -> str:
    """Text that :func:`parse_config` maps back to ``cfg``."""
    lines = []
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if isinstance(value, tuple):
            text = ",".join(repr(v) for v in value)
        else:
            text = repr(value) if isinstance(value, float) else str(value)
        lines.append(f"{f.name} = {text}")
    return "\n".join(lines) + "\n"
