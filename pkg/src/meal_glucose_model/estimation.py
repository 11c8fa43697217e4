# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Perday CatalogLAB™

"""
Per-subject estimation of the eleven gastric/hepatic parameters.

The loss is the mean squared glucose error at the sample times plus a fixed
penalty whenever endogenous glucose production dips below zero anywhere on
the fitted horizon. Minimization runs in box-normalized coordinates so every
proposed point can be projected onto the bounds before evaluation.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .exceptions import (
    BasalStateError,
    EstimationError,
    MealModelError,
    NumericalError,
    ValidationError,
)
from .integrator import Trajectory, fit_grid, interpolate_on_grid, simulate
from .models import (
    STATE_NAMES,
    THETA_NAMES,
    ConvergenceReason,
    EstimatedParameters,
    EstimationResult,
    FitConfig,
    FitFailure,
    FixedParameters,
    SubjectRecord,
    TimeGrid,
)
from .physiology import derive_basal_state, egp_series, initial_state, pack_parameters, rk4_kernel

__all__ = ["LossFunction", "batch_fit", "fit", "loss", "simulate_result"]

logger = logging.getLogger(__name__)

_SIMPLEX_STEP = 0.1
_GP = STATE_NAMES.index("Gp")


class _Stop(Exception):
    def __init__(self, reason: ConvergenceReason) -> None:
        super().__init__(reason)
        self.reason: ConvergenceReason = reason


@dataclass
class _Best:
    value: float = math.inf
    vector: np.ndarray | None = None
    min_egp: float = math.nan


class LossFunction:
    """Penalized loss of one subject, evaluated on raw θ vectors.

    Keeps the evaluation count and the best point seen so the optimizer
    driver can stop on loss, budget or stall and still report the minimum.
    """

    def __init__(self, subject: SubjectRecord, fixed: FixedParameters, config: FitConfig) -> None:
        self.subject_id = subject.id
        self.fixed = fixed
        self.config = config
        self.Gb = subject.Gb
        self.sample_times = subject.times
        self.observed = subject.glucose
        self.grid = fit_grid(self.sample_times, config.dt)
        self.dose = config.dose(fixed)
        self.evals = 0
        self.finite_evals = 0
        self.best = _Best()
        self._states = np.empty((self.grid.n_points, len(STATE_NAMES)), dtype=np.float64)

    def evaluate(self, vector: np.ndarray) -> tuple[float, float]:
        """Return ``(loss, min EGP)``; a failed integration gives ``(inf, nan)``."""
        theta = EstimatedParameters.model_construct(
            **{name: float(v) for name, v in zip(THETA_NAMES, vector)}
        )
        try:
            basal = derive_basal_state(
                self.fixed, theta, self.Gb, basal_consistency=self.config.basal_consistency
            )
        except BasalStateError:
            return math.inf, math.nan

        p = pack_parameters(self.fixed, theta, basal, self.dose)
        failed_at = rk4_kernel(initial_state(basal, self.dose), p, 0.0, self.grid.dt, self._states)
        if failed_at >= 0:
            logger.debug("%s: integration diverged at node %d", self.subject_id, failed_at)
            return math.inf, math.nan

        glucose = self._states[:, _GP] / self.fixed.VG
        simulated = interpolate_on_grid(glucose, self.grid, self.sample_times)
        mse = float(np.mean((self.observed - simulated) ** 2))
        min_egp = float(np.min(egp_series(self._states, p)))
        value = mse + (self.config.penalty if min_egp < 0.0 else 0.0)
        if not math.isfinite(value):
            return math.inf, min_egp
        return value, min_egp

    def __call__(self, vector: np.ndarray) -> float:
        if self.evals >= self.config.max_evals:
            raise _Stop("budget_exhausted")
        self.evals += 1
        value, min_egp = self.evaluate(vector)
        if math.isfinite(value):
            self.finite_evals += 1
            if value < self.best.value:
                self.best = _Best(value, np.array(vector, dtype=np.float64), min_egp)
                if value < self.config.tol:
                    raise _Stop("loss_below_tol")
        return value


def loss(
    theta: EstimatedParameters,
    subject: SubjectRecord,
    fixed: FixedParameters,
    config: FitConfig | None = None,
) -> float:
    """Penalized mean squared error [(mg/dL)^2]; +inf when the integration fails."""
    cfg = config if config is not None else FitConfig()
    value, _ = LossFunction(subject, fixed, cfg).evaluate(theta.to_vector())
    return value


class _BoxMap:
    """Affine map between θ and the unit box."""

    def __init__(self, lower: np.ndarray, upper: np.ndarray) -> None:
        self.lower = lower
        self.upper = upper
        self.span = upper - lower

    def to_theta(self, u: np.ndarray) -> np.ndarray:
        return np.clip(self.lower + np.clip(u, 0.0, 1.0) * self.span, self.lower, self.upper)

    def to_unit(self, x: np.ndarray) -> np.ndarray:
        return np.clip((x - self.lower) / self.span, 0.0, 1.0)


def _initial_simplex(u0: np.ndarray) -> np.ndarray:
    # step toward the interior so vertices on a face do not collapse the simplex
    simplex = np.tile(u0, (u0.size + 1, 1))
    for i in range(u0.size):
        step = _SIMPLEX_STEP if u0[i] + _SIMPLEX_STEP <= 1.0 else -_SIMPLEX_STEP
        simplex[i + 1, i] = u0[i] + step
    return simplex


def _run_local(
    objective: LossFunction, box: _BoxMap, u0: np.ndarray, config: FitConfig
) -> ConvergenceReason:
    def unit_objective(u: np.ndarray) -> float:
        return objective(box.to_theta(u))

    unit_bounds = [(0.0, 1.0)] * u0.size
    remaining = config.max_evals - objective.evals
    try:
        if config.optimizer == "quasi-newton":
            minimize(
                unit_objective,
                u0,
                method="L-BFGS-B",
                bounds=unit_bounds,
                options={"maxfun": remaining, "maxiter": remaining, "ftol": 0.0, "gtol": 0.0},
            )
        else:
            minimize(
                unit_objective,
                u0,
                method="Nelder-Mead",
                bounds=unit_bounds,
                options={
                    "maxfev": remaining,
                    "maxiter": remaining,
                    "xatol": config.tol,
                    "fatol": math.inf,
                    "adaptive": True,
                    "initial_simplex": _initial_simplex(u0),
                },
            )
    except _Stop as stop:
        return stop.reason
    if objective.evals >= config.max_evals:
        return "budget_exhausted"
    return "param_stalled"


def fit(
    subject: SubjectRecord,
    fixed: FixedParameters,
    config: FitConfig | None = None,
) -> EstimationResult:
    """Estimate θ for one subject by box-constrained local minimization.

    Starts from the bounds' initial values, restarts ``config.restarts`` times
    from the best point while budget remains, and returns the best θ seen.

    Raises:
        BasalStateError: the subject's basal glucose gives an invalid steady state.
        EstimationError: no evaluation produced a finite loss.
    """
    cfg = config if config is not None else FitConfig()
    bounds = cfg.bounds
    derive_basal_state(
        fixed, bounds.initial_parameters(), subject.Gb, basal_consistency=cfg.basal_consistency
    )

    box = _BoxMap(bounds.lower_vector(), bounds.upper_vector())
    objective = LossFunction(subject, fixed, cfg)
    logger.info(
        "Fitting subject %s (%d samples, Gb=%g)", subject.id, len(subject.samples), subject.Gb
    )

    start = box.to_unit(bounds.initial_vector())
    reason = _run_local(objective, box, start, cfg)
    for attempt in range(cfg.restarts):
        if reason != "param_stalled" or objective.best.vector is None:
            break
        logger.debug(
            "%s: restart %d from best vertex (loss=%g)",
            subject.id,
            attempt + 1,
            objective.best.value,
        )
        reason = _run_local(objective, box, box.to_unit(objective.best.vector), cfg)

    best = objective.best
    if best.vector is None:
        raise EstimationError(subject.id, f"all {objective.evals} loss evaluations were non-finite")

    theta = EstimatedParameters.from_vector(np.clip(best.vector, box.lower, box.upper))
    result = EstimationResult(
        subject_id=subject.id,
        theta=theta,
        loss=best.value,
        evals=objective.evals,
        converged=reason != "budget_exhausted",
        reason=reason,
        min_EGP=best.min_egp,
        Gb=subject.Gb,
    )
    logger.info(
        "Subject %s: loss=%.6g evals=%d reason=%s", subject.id, result.loss, result.evals, reason
    )
    return result


def _fit_or_failure(
    job: tuple[SubjectRecord, FixedParameters, FitConfig],
) -> EstimationResult | FitFailure:
    subject, fixed, config = job
    try:
        return fit(subject, fixed, config)
    except ValidationError as exc:
        logger.warning("Subject %s rejected: %s", subject.id, exc)
        return FitFailure(subject_id=subject.id, kind="validation", error=str(exc))
    except NumericalError as exc:
        logger.warning("Subject %s could not be fitted: %s", subject.id, exc)
        return FitFailure(subject_id=subject.id, kind="numerical", error=str(exc))
    except (MealModelError, ValueError, ArithmeticError) as exc:
        # unexpected errors stay with their subject
        logger.warning("Subject %s failed unexpectedly", subject.id, exc_info=True)
        return FitFailure(
            subject_id=subject.id, kind="numerical", error=f"{type(exc).__name__}: {exc}"
        )


def batch_fit(
    subjects: Sequence[SubjectRecord],
    fixed: FixedParameters,
    config: FitConfig | None = None,
    parallelism: int = 1,
) -> list[EstimationResult | FitFailure]:
    """Fit every subject; output order matches input and failures stay in place.

    Fits are independent and deterministic, so ``parallelism`` only changes
    wall-clock time.
    """
    if not subjects:
        raise ValidationError("subjects", "[]", "at least one subject is required")
    if parallelism < 1:
        raise ValidationError("parallelism", str(parallelism), "must be >= 1")

    cfg = config if config is not None else FitConfig()
    jobs = [(subject, fixed, cfg) for subject in subjects]
    workers = min(parallelism, len(jobs))
    logger.info("Fitting %d subject(s) with %d worker(s)", len(jobs), workers)
    if workers == 1:
        return [_fit_or_failure(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_fit_or_failure, jobs))


def simulate_result(
    result: EstimationResult,
    fixed: FixedParameters,
    config: FitConfig | None = None,
    t_end: float = 120.0,
) -> Trajectory:
    """Re-simulate a fitted subject over ``[0, t_end]`` on the config step."""
    cfg = config if config is not None else FitConfig()
    return simulate(
        fixed,
        result.theta,
        result.Gb,
        dose=cfg.dose(fixed),
        grid=TimeGrid(t0=0.0, t_end=t_end, dt=cfg.dt),
        basal_consistency=cfg.basal_consistency,
    )
