"""Uniform time grids and sampled process paths."""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class TimeGrid:
    """Uniform discretization of [0, T] with N steps (N+1 points, t_0 = 0)."""

    t_final: float
    n_steps: int

    def __post_init__(self):
        if not (self.t_final > 0 and np.isfinite(self.t_final)):
            raise ValueError(f"horizon must be finite and positive, got {self.t_final}")
        if not (isinstance(self.n_steps, (int, np.integer)) and self.n_steps >= 1):
            raise ValueError(f"step count must be a positive integer, got {self.n_steps}")

    @property
    def dt(self):
        return self.t_final / self.n_steps

    @cached_property
    def points(self):
        t = np.linspace(0.0, self.t_final, self.n_steps + 1)
        t.setflags(write=False)
        return t

    def index_of(self, t, what="time"):
        """Snap a time to the nearest grid index (tolerance dt/2 by construction)."""
        if not (0.0 <= t <= self.t_final * (1 + 1e-12)):
            raise ValueError(f"{what} {t} outside [0, {self.t_final}]")
        return int(round(t / self.dt))

    def aligned_steps(self, h, what="increment"):
        """Number of grid steps in h; h must be a multiple of dt."""
        steps = h / self.dt
        if abs(steps - round(steps)) > 1e-9 * max(1.0, abs(steps)):
            raise ValueError(f"{what} {h} is not a multiple of the grid step {self.dt}")
        return int(round(steps))

    def trapezoid_weights(self, j_last):
        """Composite trapezoid weights on points 0..j_last."""
        if j_last == 0:
            return np.zeros(1)
        w = np.full(j_last + 1, self.dt)
        w[0] = w[-1] = 0.5 * self.dt
        return w


@dataclass(frozen=True)
class SamplePath:
    """A d-dimensional process sampled on a TimeGrid.

    values has shape (d, N+1); values[:, 0] is the initial state.
    """

    grid: TimeGrid
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[1] != self.grid.n_steps + 1:
            raise ValueError(
                f"values must have shape (d, {self.grid.n_steps + 1}), got {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("path contains non-finite entries")
        object.__setattr__(self, "values", v)

    @property
    def dim(self):
        return self.values.shape[0]
