# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Perday CatalogLAB™

"""Shared fixtures for the meal glucose model tests."""

from __future__ import annotations

from collections.abc import Callable
from pathlib import Path

import pytest
from meal_glucose_model.integrator import Trajectory
from meal_glucose_model.models import (
    EstimatedParameters,
    EstimationResult,
    FitConfig,
    FixedParameters,
    ParameterBounds,
)
from meal_glucose_model.synthetic import engineered_classification_corpus


@pytest.fixture
def fixed() -> FixedParameters:
    return FixedParameters()


@pytest.fixture
def initial_theta() -> EstimatedParameters:
    """Table starting point (ki clamped to its upper bound)."""
    return ParameterBounds().initial_parameters()


@pytest.fixture
def theta() -> EstimatedParameters:
    """A healthy-looking θ whose EGP stays positive over the OGTT."""
    return EstimatedParameters(
        Kmin=0.015,
        Kmax=0.06,
        Kabs=0.12,
        Kgri=0.05,
        b=0.85,
        d=0.0005,
        EGPb=2.2,
        kp2=0.002,
        kp3=0.006,
        kp4=0.03,
        ki=8e-4,
    )


@pytest.fixture
def config() -> FitConfig:
    return FitConfig()


@pytest.fixture
def write_csv(tmp_path: Path) -> Callable[[str, str], Path]:
    """Write raw CSV text under ``tmp_path`` and return the path."""

    def _write(name: str, text: str) -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write


@pytest.fixture(scope="session")
def engineered_corpus() -> tuple[list[EstimationResult], list[Trajectory]]:
    return engineered_classification_corpus()
