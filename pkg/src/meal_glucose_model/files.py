# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Perday CatalogLAB™

"""File helpers: JSON loading with config errors and atomic writes."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Any

from pydantic import BaseModel

from .exceptions import ConfigLoadError

__all__ = ["atomic_write_json", "atomic_write_text", "load_json", "model_json"]


def load_json(path: str | Path) -> Any:
    """Read a JSON document, mapping I/O and syntax problems to ``ConfigLoadError``."""
    target = Path(path)
    try:
        return json.loads(target.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigLoadError(str(target), "file missing") from exc
    except IsADirectoryError as exc:
        raise ConfigLoadError(str(target), "is a directory") from exc
    except json.JSONDecodeError as exc:
        raise ConfigLoadError(str(target), f"invalid json: {exc}") from exc


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write ``text`` next to ``path`` and rename it into place."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp_name, target)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise


def model_json(payload: Any) -> str:
    """Serialize models (or lists/dicts of them) with stable key order."""
    return json.dumps(_plain(payload), indent=2, ensure_ascii=False) + "\n"


def atomic_write_json(path: str | Path, payload: Any) -> None:
    atomic_write_text(path, model_json(payload))


def _plain(value: Any) -> Any:
    if isinstance(value, BaseModel):
        return value.model_dump(mode="json")
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value
