# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Perday CatalogLAB™

"""
Synthetic subjects and corpora.

Subjects generated here are sampled from the model itself, so fitting them
back has a known answer. The engineered classification corpus skips the
model and builds glucose curves of prescribed shape directly.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from typing import Final

import numpy as np

from .integrator import Trajectory, fit_grid, integrate, interpolate_on_grid
from .models import (
    DEFAULT_BASAL_GLUCOSE,
    OBSERVABLE_NAMES,
    OGTT_SAMPLE_TIMES,
    STATE_NAMES,
    THETA_NAMES,
    EstimatedParameters,
    EstimationResult,
    FitConfig,
    FixedParameters,
    ParameterBounds,
    SubjectRecord,
    TimeGrid,
)
from .physiology import derive_basal_state

__all__ = [
    "PHYSIOLOGICAL_RANGES",
    "curve_trajectory",
    "engineered_classification_corpus",
    "random_theta",
    "synthesize_subject",
    "synthetic_corpus",
]

logger = logging.getLogger(__name__)

GlucoseCurve = Callable[[np.ndarray], np.ndarray]

# Sub-box of the estimation bounds where curves look like healthy OGTT responses
PHYSIOLOGICAL_RANGES: Final[dict[str, tuple[float, float]]] = {
    "Kmin": (0.010, 0.020),
    "Kmax": (0.045, 0.075),
    "Kabs": (0.04, 0.25),
    "Kgri": (0.03, 0.08),
    "b": (0.75, 0.90),
    "d": (1e-4, 2e-3),
    "EGPb": (1.8, 2.3),
    "kp2": (0.0015, 0.003),
    "kp3": (0.004, 0.010),
    "kp4": (0.02, 0.05),
    "ki": (5e-4, 1e-3),
}


def random_theta(rng: np.random.Generator) -> EstimatedParameters:
    """Uniform draw from ``PHYSIOLOGICAL_RANGES``."""
    return EstimatedParameters(
        **{name: float(rng.uniform(*PHYSIOLOGICAL_RANGES[name])) for name in THETA_NAMES}
    )


def synthesize_subject(
    theta: EstimatedParameters,
    subject_id: str,
    Gb: float = DEFAULT_BASAL_GLUCOSE,
    times: Sequence[float] = OGTT_SAMPLE_TIMES,
    fixed: FixedParameters | None = None,
    config: FitConfig | None = None,
    offset: float = 0.0,
) -> SubjectRecord:
    """Sample the model at ``times`` on the same grid the loss integrates over.

    ``offset`` shifts every sample except the t=0 basal value.
    """
    fixed_params = fixed if fixed is not None else FixedParameters()
    cfg = config if config is not None else FitConfig()
    sample_times = np.asarray(times, dtype=np.float64)
    grid = fit_grid(sample_times, cfg.dt)
    basal = derive_basal_state(fixed_params, theta, Gb, basal_consistency=cfg.basal_consistency)
    traj = integrate(fixed_params, theta, basal, cfg.dose(fixed_params), grid)
    values = interpolate_on_grid(traj.glucose, grid, sample_times)
    values[sample_times > 0] += offset
    values[sample_times == 0] = Gb
    return SubjectRecord(id=subject_id, samples=tuple(zip(sample_times.tolist(), values.tolist())))


def synthetic_corpus(
    n: int,
    seed: int = 0,
    fixed: FixedParameters | None = None,
    config: FitConfig | None = None,
) -> list[SubjectRecord]:
    """``n`` subjects with θ and Gb drawn from one seeded generator."""
    rng = np.random.default_rng(seed)
    subjects = []
    for index in range(n):
        theta = random_theta(rng)
        Gb = float(rng.uniform(80.0, 100.0))
        subjects.append(
            synthesize_subject(theta, f"S{index + 1:02d}", Gb=Gb, fixed=fixed, config=config)
        )
    logger.info("Synthesized %d subject(s) with seed %d", n, seed)
    return subjects


def curve_trajectory(glucose: GlucoseCurve, grid: TimeGrid | None = None) -> Trajectory:
    """Trajectory carrying only a prescribed glucose curve (other columns zero)."""
    grid = grid if grid is not None else TimeGrid()
    times = grid.times
    observables = np.zeros((grid.n_points, len(OBSERVABLE_NAMES)), dtype=np.float64)
    observables[:, OBSERVABLE_NAMES.index("G")] = glucose(times)
    states = np.zeros((grid.n_points, len(STATE_NAMES)), dtype=np.float64)
    return Trajectory(grid=grid, times=times, state_matrix=states, observable_matrix=observables)


def _gamma_curve(Gb: float, amplitude: float, t_peak: float) -> GlucoseCurve:
    # unimodal, maximum exactly at t_peak
    return lambda t: Gb + amplitude * (t / t_peak) * np.exp(1.0 - t / t_peak)


def _sharp_curve(Gb: float, amplitude: float, t_peak: float) -> GlucoseCurve:
    return lambda t: Gb + amplitude * np.exp(-((t - t_peak) ** 2) / (2.0 * 8.0**2))


def _plateau_curve(Gb: float) -> GlucoseCurve:
    # reaches 150 at 25 min, creeps to 152 at 70 min, then declines
    return lambda t: np.interp(t, [0.0, 25.0, 70.0, 120.0], [Gb, 150.0, 152.0, 100.0])


def _result(subject_id: str, kabs: float, Gb: float) -> EstimationResult:
    theta = ParameterBounds().initial_parameters().model_copy(update={"Kabs": kabs})
    return EstimationResult(
        subject_id=subject_id,
        theta=theta,
        loss=0.0,
        evals=0,
        converged=True,
        reason="loss_below_tol",
        min_EGP=1.0,
        Gb=Gb,
    )


def engineered_classification_corpus(
    Gb: float = DEFAULT_BASAL_GLUCOSE,
) -> tuple[list[EstimationResult], list[Trajectory]]:
    """Results and curves with peaks at 25 min (x16), 38 min (x8), 67 min (x5) plus 6 outliers.

    Outliers peak late with Group1-like Kabs; the three plateau-shaped ones
    have a biological peak before 30 min, the three sharp ones do not.
    """
    results: list[EstimationResult] = []
    trajectories: list[Trajectory] = []

    def add(prefix: str, index: int, kabs: float, curve: GlucoseCurve) -> None:
        results.append(_result(f"{prefix}{index + 1:02d}", kabs, Gb))
        trajectories.append(curve_trajectory(curve))

    for i in range(16):
        # half the early peaks above the 155 mg/dL split, half below
        amplitude = 55.0 if i % 2 == 0 else 80.0
        add("G1-", i, 0.28 + 0.005 * ((i % 5) - 2), _gamma_curve(Gb, amplitude, 25.0))
    for i in range(8):
        add("G2-", i, 0.12 + 0.005 * ((i % 5) - 2), _gamma_curve(Gb, 60.0, 38.0))
    for i in range(5):
        add("G3-", i, 0.06 + 0.005 * ((i % 5) - 2), _gamma_curve(Gb, 50.0, 67.0))
    for i in range(3):
        add("OS-", i, 0.28 + 0.005 * i, _sharp_curve(Gb, 70.0, 44.0))
    for i in range(3):
        add("OP-", i, 0.28 + 0.005 * i, _plateau_curve(Gb))
    return results, trajectories
