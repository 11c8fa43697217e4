# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Perday CatalogLAB™

"""
Meal Glucose Model

Six-compartment glucose-insulin model of an oral glucose tolerance test, with
per-subject parameter estimation and peak-time group analysis.

This package provides:
- Basal steady state and right-hand side of the twelve-state model
- Fixed-step RK4 integration with trajectory export
- Penalized least-squares fitting of the eleven gastric/hepatic parameters
- Peak detection, three-group classification and outlier reclassification
- One-way ANOVA with Bonferroni post-hoc comparisons

Example:
    >>> from meal_glucose_model import FixedParameters, ParameterBounds, simulate
    >>> theta = ParameterBounds().initial_parameters()
    >>> traj = simulate(FixedParameters(), theta, Gb=90.0)
    >>> print(f"{len(traj)} nodes, G(0) = {traj.glucose[0]:.1f} mg/dL")
    2401 nodes, G(0) = 90.0 mg/dL
"""

from __future__ import annotations

from .analysis import (
    anova_oneway,
    assign_groups,
    biological_peak,
    bonferroni,
    classify,
    detect_peak,
    flag_outliers,
    group_stats,
    reclassify_outliers,
    significance,
)
from .dataset import load_corpus, load_subject, write_subject
from .estimation import batch_fit, fit, loss, simulate_result
from .exceptions import (
    BasalStateError,
    ConfigLoadError,
    DatasetError,
    EstimationError,
    IntegrationError,
    MealModelError,
    NumericalError,
    StatisticsError,
    SubjectValidationError,
    ValidationError,
)
from .integrator import Trajectory, integrate, sample, simulate
from .models import (
    BasalState,
    DoseProfile,
    EstimatedParameters,
    EstimationResult,
    FitConfig,
    FixedParameters,
    ModelState,
    Observables,
    ParameterBounds,
    SubjectRecord,
    TimeGrid,
)
from .physiology import derive_basal_state, gastric_emptying_rate, observables, rhs

__version__ = "1.0.0"

__all__ = [
    "BasalState",
    "BasalStateError",
    "ConfigLoadError",
    "DatasetError",
    "DoseProfile",
    "EstimatedParameters",
    "EstimationError",
    "EstimationResult",
    "FitConfig",
    "FixedParameters",
    "IntegrationError",
    "MealModelError",
    "ModelState",
    "NumericalError",
    "Observables",
    "ParameterBounds",
    "StatisticsError",
    "SubjectRecord",
    "SubjectValidationError",
    "TimeGrid",
    "Trajectory",
    "ValidationError",
    "__version__",
    "anova_oneway",
    "assign_groups",
    "batch_fit",
    "biological_peak",
    "bonferroni",
    "classify",
    "derive_basal_state",
    "detect_peak",
    "fit",
    "flag_outliers",
    "gastric_emptying_rate",
    "group_stats",
    "integrate",
    "load_corpus",
    "load_subject",
    "loss",
    "observables",
    "reclassify_outliers",
    "rhs",
    "sample",
    "significance",
    "simulate",
    "simulate_result",
    "write_subject",
]
