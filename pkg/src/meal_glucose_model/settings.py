# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Perday CatalogLAB™

"""
Configuration loading.

Precedence is command-line flag over config file over built-in default. The
built-in defaults are the model defaults in ``models.py``; files only need to
name the fields they change.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Mapping
from importlib import resources
from pathlib import Path
from typing import Any, TypeVar

from pydantic import BaseModel
from pydantic import ValidationError as PydanticValidationError

from .exceptions import ConfigLoadError
from .files import load_json
from .models import FitConfig, FixedParameters, ParameterSet

__all__ = [
    "load_fit_config",
    "load_fixed_parameters",
    "load_parameter_set",
    "parameter_schema",
    "resolve_fit_config",
    "shipped_config",
]

logger = logging.getLogger(__name__)

ModelT = TypeVar("ModelT", bound=BaseModel)


def _load_model(path: str | Path, model: type[ModelT]) -> ModelT:
    data = load_json(path)
    if not isinstance(data, dict):
        raise ConfigLoadError(str(path), f"expected a JSON object, got {type(data).__name__}")
    try:
        loaded = model.model_validate(data)
    except PydanticValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}"
            for err in exc.errors()
        )
        raise ConfigLoadError(str(path), problems) from exc
    logger.info("Loaded %s from %s", model.__name__, path)
    return loaded


def load_fit_config(path: str | Path) -> FitConfig:
    return _load_model(path, FitConfig)


def load_parameter_set(path: str | Path) -> ParameterSet:
    """Read ``{"estimated": ..., "fixed": ..., "Gb": ...}``; every section is optional."""
    return _load_model(path, ParameterSet)


def load_fixed_parameters(path: str | Path) -> FixedParameters:
    return _load_model(path, FixedParameters)


def resolve_fit_config(
    path: str | Path | None = None, overrides: Mapping[str, Any] | None = None
) -> FitConfig:
    """Merge defaults, an optional file and explicit overrides (``None`` means unset)."""
    base = load_fit_config(path) if path is not None else FitConfig()
    changes = {k: v for k, v in (overrides or {}).items() if v is not None}
    if not changes:
        return base
    try:
        return FitConfig.model_validate({**base.model_dump(), **changes})
    except PydanticValidationError as exc:
        raise ConfigLoadError(str(path or "<command line>"), str(exc)) from exc


def parameter_schema() -> dict[str, Any]:
    """JSON schema of the parameter-set document, units in each description."""
    return ParameterSet.model_json_schema()


def shipped_config(name: str) -> dict[str, Any]:
    """Read one of the JSON files bundled under ``meal_glucose_model/config``."""
    resource = resources.files("meal_glucose_model").joinpath("config").joinpath(name)
    try:
        data: dict[str, Any] = json.loads(resource.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigLoadError(f"config/{name}", "not bundled with the package") from exc
    return data
