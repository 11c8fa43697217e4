# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Perday CatalogLAB™

"""
Fixed-step RK4 integration of the meal model.

``integrate`` runs the compiled kernel over a uniform ``TimeGrid`` and
evaluates the observables at every node. ``Trajectory`` keeps both matrices
read-only; ``sample`` interpolates plasma glucose at arbitrary times.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Final

import numpy as np
import pandas as pd

from .exceptions import IntegrationError, ValidationError
from .files import atomic_write_text
from .models import (
    OBSERVABLE_NAMES,
    STATE_NAMES,
    BasalState,
    DoseProfile,
    EstimatedParameters,
    FixedParameters,
    ModelState,
    Observables,
    TimeGrid,
)
from .physiology import (
    N_OBSERVABLES,
    derive_basal_state,
    initial_state,
    observe_kernel,
    pack_parameters,
    rk4_kernel,
)

__all__ = [
    "TRAJECTORY_COLUMNS",
    "Trajectory",
    "fit_grid",
    "integrate",
    "interpolate_on_grid",
    "sample",
    "simulate",
]

logger = logging.getLogger(__name__)

TRAJECTORY_COLUMNS: Final[tuple[str, ...]] = (
    "t_min",
    "G",
    "I",
    "EGP",
    "Ra",
    "S",
    "U",
    "E",
    "Qsto",
    "Qgut",
    "X",
    "Ipo",
)

_STATE_INDEX: Final[dict[str, int]] = {name: i for i, name in enumerate(STATE_NAMES)}
_OBSERVABLE_INDEX: Final[dict[str, int]] = {name: i for i, name in enumerate(OBSERVABLE_NAMES)}


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States and observables at every node of ``grid``.

    ``state_matrix`` is (n_points, 12) in ``STATE_NAMES`` order and
    ``observable_matrix`` is (n_points, 14) in ``OBSERVABLE_NAMES`` order.
    """

    grid: TimeGrid
    times: np.ndarray
    state_matrix: np.ndarray
    observable_matrix: np.ndarray

    def __post_init__(self) -> None:
        n = self.grid.n_points
        if not (
            self.times.shape == (n,)
            and self.state_matrix.shape == (n, len(STATE_NAMES))
            and self.observable_matrix.shape == (n, len(OBSERVABLE_NAMES))
        ):
            raise ValueError("trajectory arrays do not match the grid point count")
        for array in (self.times, self.state_matrix, self.observable_matrix):
            array.flags.writeable = False

    def __len__(self) -> int:
        return self.grid.n_points

    @property
    def states(self) -> tuple[ModelState, ...]:
        return tuple(ModelState.from_array(row) for row in self.state_matrix)

    @property
    def observables(self) -> tuple[Observables, ...]:
        return tuple(Observables.from_array(row) for row in self.observable_matrix)

    def state(self, name: str) -> np.ndarray:
        """Column of one state component."""
        return self.state_matrix[:, _STATE_INDEX[name]]

    def observable(self, name: str) -> np.ndarray:
        """Column of one observable."""
        return self.observable_matrix[:, _OBSERVABLE_INDEX[name]]

    @property
    def glucose(self) -> np.ndarray:
        return self.observable("G")

    def to_frame(self) -> pd.DataFrame:
        """Export table with the ``TRAJECTORY_COLUMNS`` header."""
        columns: dict[str, np.ndarray] = {"t_min": np.asarray(self.times)}
        for name in TRAJECTORY_COLUMNS[1:]:
            if name in _OBSERVABLE_INDEX:
                columns[name] = np.asarray(self.observable(name))
            else:
                columns[name] = np.asarray(self.state(name))
        return pd.DataFrame(columns, columns=list(TRAJECTORY_COLUMNS))

    def to_csv_text(self) -> str:
        # pandas writes floats with repr(), the shortest round-trip form
        return str(self.to_frame().to_csv(index=False, lineterminator="\n"))

    def write_csv(self, path: str | Path) -> Path:
        target = Path(path)
        atomic_write_text(target, self.to_csv_text())
        logger.info("Wrote %d trajectory rows to %s", len(self), target)
        return target


def integrate(
    fixed: FixedParameters,
    theta: EstimatedParameters,
    basal: BasalState,
    dose: DoseProfile,
    grid: TimeGrid,
    clamp_egp: bool = False,
) -> Trajectory:
    """Integrate from the basal initial condition with classical RK4 steps of ``grid.dt``.

    Raises:
        IntegrationError: a state component stopped being finite; ``time`` is
            the first offending node.
    """
    p = pack_parameters(fixed, theta, basal, dose, clamp_egp)
    x0 = initial_state(basal, dose)
    times = grid.times
    states = np.empty((grid.n_points, len(STATE_NAMES)), dtype=np.float64)
    failed_at = int(rk4_kernel(x0, p, float(grid.t0), float(grid.dt), states))
    if failed_at >= 0:
        raise IntegrationError(float(times[failed_at]))

    obs = np.empty((grid.n_points, N_OBSERVABLES), dtype=np.float64)
    observe_kernel(states, times, p, obs)
    return Trajectory(grid=grid, times=times, state_matrix=states, observable_matrix=obs)


def simulate(
    fixed: FixedParameters,
    theta: EstimatedParameters,
    Gb: float,
    dose: DoseProfile | None = None,
    grid: TimeGrid | None = None,
    basal_consistency: bool = False,
    clamp_egp: bool = False,
) -> Trajectory:
    """Derive the basal state for ``Gb`` and integrate in one call."""
    basal = derive_basal_state(fixed, theta, Gb, basal_consistency=basal_consistency)
    return integrate(
        fixed,
        theta,
        basal,
        dose if dose is not None else DoseProfile(amount=fixed.D),
        grid if grid is not None else TimeGrid(),
        clamp_egp=clamp_egp,
    )


def sample(traj: Trajectory, times: Iterable[float] | Sequence[float]) -> list[float]:
    """Plasma glucose at ``times`` by linear interpolation between grid nodes.

    Raises:
        ValidationError: a requested time lies outside ``[t0, t_end]``.
    """
    requested = np.asarray(list(times), dtype=np.float64)
    grid = traj.grid
    slack = 1e-9 * grid.dt
    outside = requested[
        (requested < grid.t0 - slack) | (requested > grid.t_end + slack) | ~np.isfinite(requested)
    ]
    if outside.size:
        raise ValidationError(
            "times", str(outside.tolist()), f"outside the horizon [{grid.t0:g}, {grid.t_end:g}]"
        )
    return [float(v) for v in interpolate_on_grid(traj.glucose, grid, requested)]


def interpolate_on_grid(values: np.ndarray, grid: TimeGrid, times: np.ndarray) -> np.ndarray:
    """Linear interpolation of a node series; on-node queries return the stored value."""
    node_times = grid.times
    position = (times - grid.t0) / grid.dt
    nearest = np.clip(np.rint(position), 0, grid.n_steps)
    on_node = np.abs(position - nearest) < 1e-9
    out = np.interp(times, node_times, values)
    out[on_node] = values[nearest[on_node].astype(np.int64)]
    return out


def fit_grid(times: np.ndarray, dt: float) -> TimeGrid:
    """Smallest grid from 0 with step ``dt`` that covers every sample time."""
    horizon = float(np.max(times))
    n_steps = max(1, math.ceil(horizon / dt - 1e-9))
    return TimeGrid(t0=0.0, t_end=n_steps * dt, dt=dt)
