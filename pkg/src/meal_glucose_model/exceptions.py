# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Perday CatalogLAB™

"""
Specific exception types for the meal glucose model.

Validation problems (bad files, bad parameters) and numerical problems
(blown-up integrations, unusable fits) live in separate branches so the CLI
can map them to distinct exit codes.
"""

from __future__ import annotations


class MealModelError(Exception):
    """Base exception for all meal glucose model errors."""


class ConfigLoadError(MealModelError):
    """Raised when a configuration or parameter file cannot be loaded."""

    def __init__(self, file_path: str, reason: str) -> None:
        self.file_path = file_path
        self.reason = reason
        super().__init__(f"Failed to load config '{file_path}': {reason}")


class ValidationError(MealModelError):
    """Raised when input validation fails."""

    def __init__(self, field: str, value: str, reason: str) -> None:
        self.field = field
        self.value = value
        self.reason = reason
        super().__init__(f"Validation failed for {field}='{value}': {reason}")


class SubjectValidationError(ValidationError):
    """Raised when a subject sample file violates the OGTT record rules."""

    def __init__(self, code: str, source: str, detail: str) -> None:
        self.code = code
        self.source = source
        self.detail = detail
        super().__init__("subject", source, f"{code}: {detail}")


class BasalStateError(ValidationError):
    """Raised when a derived basal quantity is non-finite or non-positive."""

    def __init__(self, quantity: str, value: float) -> None:
        self.quantity = quantity
        super().__init__(
            quantity,
            repr(value),
            "derived basal value must be finite and positive "
            "(fixed parameters are inconsistent)",
        )


class DatasetError(MealModelError):
    """Raised when a corpus as a whole cannot be used."""

    def __init__(self, code: str, path: str, reason: str) -> None:
        self.code = code
        self.path = path
        self.reason = reason
        super().__init__(f"{code} in '{path}': {reason}")


class NumericalError(MealModelError):
    """Raised when a computation produces non-finite values."""


class IntegrationError(NumericalError):
    """Raised when the ODE state stops being finite."""

    def __init__(self, time: float, reason: str = "non-finite state") -> None:
        self.time = time
        self.reason = reason
        super().__init__(f"Integration aborted at t={time:g} min: {reason}")


class EstimationError(NumericalError):
    """Raised when a subject cannot be fitted at all."""

    def __init__(self, subject_id: str, reason: str) -> None:
        self.subject_id = subject_id
        self.reason = reason
        super().__init__(f"Estimation failed for subject '{subject_id}': {reason}")


class StatisticsError(NumericalError):
    """Raised when a test statistic is undefined for the given groups."""
