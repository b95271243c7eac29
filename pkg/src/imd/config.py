"""Parameter dataclasses shared across the pipeline."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PROBE_DISTS = ("rademacher", "gaussian")
VR_MODES = ("off", "linear_cv", "taylor2")
KNN_MODES = ("exact", "approx")

DEFAULT_T_MIN = 0.1
DEFAULT_T_MAX = 10.0
DEFAULT_T_STEPS = 256


@dataclass(frozen=True)
class SlqParams:
    """Stochastic Lanczos quadrature knobs.

    m:   Lanczos steps per probe.
    n_v: number of Hutchinson probe vectors.
    """

    m: int = 10
    n_v: int = 100
    probe_dist: str = "rademacher"
    seed: int = 42
    variance_reduction: str = "linear_cv"

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if self.n_v < 1:
            raise ValueError(f"n_v must be >= 1, got {self.n_v}")
        if self.probe_dist not in PROBE_DISTS:
            raise ValueError(f"probe_dist must be one of {PROBE_DISTS}, got {self.probe_dist!r}")
        if self.variance_reduction not in VR_MODES:
            raise ValueError(
                f"variance_reduction must be one of {VR_MODES}, got {self.variance_reduction!r}"
            )
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")


@dataclass(frozen=True)
class TemperatureGrid:
    """Strictly increasing positive temperatures at which hkt is sampled."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("grid must be a non-empty 1-D array")
        if not np.all(arr > 0):
            raise ValueError("grid temperatures must be positive")
        if arr.size > 1 and not np.all(np.diff(arr) > 0):
            raise ValueError("grid must be strictly increasing")
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size

    def same(self, other: "TemperatureGrid") -> bool:
        """Exact (bitwise) grid equality; descriptors round-trip exactly, so
        grids from the same settings always compare equal."""
        return self.values.shape == other.values.shape and bool(
            np.all(self.values == other.values)
        )

    @classmethod
    def log_spaced(
        cls,
        t_min: float = DEFAULT_T_MIN,
        t_max: float = DEFAULT_T_MAX,
        steps: int = DEFAULT_T_STEPS,
    ) -> "TemperatureGrid":
        if steps < 2:
            raise ValueError("log grid needs at least 2 points")
        if not 0 < t_min < t_max:
            raise ValueError("need 0 < t_min < t_max")
        vals = np.power(10.0, np.linspace(np.log10(t_min), np.log10(t_max), steps))
        vals[0] = t_min  # endpoints inclusive regardless of log/pow rounding
        vals[-1] = t_max
        return cls(vals)


def default_grid() -> TemperatureGrid:
    """256 log-spaced temperatures on [0.1, 10]; essentially all the mass of
    the distance weight e^{-2(t+1/t)} lives inside this range."""
    return TemperatureGrid.log_spaced()


@dataclass(frozen=True)
class DescriptorConfig:
    """Everything `imdesc` needs besides the points themselves."""

    k: int = 5
    knn_mode: str = "exact"
    slq: SlqParams = field(default_factory=SlqParams)
    grid: TemperatureGrid = field(default_factory=default_grid)
    nn_descent_rho: float = 1.0
    nn_descent_iters: int = 10

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.knn_mode not in KNN_MODES:
            raise ValueError(f"knn_mode must be one of {KNN_MODES}, got {self.knn_mode!r}")
