# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Perday CatalogLAB™

"""
OGTT sample file ingestion.

One CSV per subject with header ``t_min,glucose_mg_dl`` and an optional
``id`` column. A corpus is a directory of such files, optionally with a
``corpus.json`` manifest mapping file names to subject ids.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Final

import numpy as np
import pandas as pd
from pydantic import TypeAdapter
from pydantic import ValidationError as PydanticValidationError

from .exceptions import ConfigLoadError, DatasetError, SubjectValidationError
from .files import atomic_write_text, load_json
from .models import Corpus, CorpusIssue, SubjectRecord, sample_problem

__all__ = [
    "GLUCOSE_COLUMN",
    "ID_COLUMN",
    "MANIFEST_NAME",
    "TIME_COLUMN",
    "load_corpus",
    "load_subject",
    "write_subject",
]

logger = logging.getLogger(__name__)

TIME_COLUMN: Final[str] = "t_min"
GLUCOSE_COLUMN: Final[str] = "glucose_mg_dl"
ID_COLUMN: Final[str] = "id"
MANIFEST_NAME: Final[str] = "corpus.json"

_MANIFEST_FILES = TypeAdapter(dict[str, str])


def _numeric_column(frame: pd.DataFrame, column: str, source: str) -> np.ndarray:
    values = pd.to_numeric(frame[column], errors="coerce")
    bad = values.isna()
    if bad.any():
        rows = [int(i) + 2 for i in np.flatnonzero(bad.to_numpy())]
        detail = f"non-numeric {column} on line(s) {rows}"
        raise SubjectValidationError("unparseable", source, detail)
    return values.to_numpy(dtype=np.float64)


def load_subject(path: str | Path, subject_id: str | None = None) -> SubjectRecord:
    """Read and validate one subject file.

    The id comes from the ``id`` column when present, else ``subject_id``,
    else the file stem.

    Raises:
        SubjectValidationError: with ``code`` naming the broken rule.
    """
    target = Path(path)
    source = str(target)
    try:
        frame = pd.read_csv(
            target, dtype={ID_COLUMN: str}, skipinitialspace=True, float_precision="round_trip"
        )
    except FileNotFoundError as exc:
        raise SubjectValidationError("unreadable", source, "file not found") from exc
    except pd.errors.EmptyDataError as exc:
        raise SubjectValidationError("empty_file", source, "file has no content") from exc
    except (pd.errors.ParserError, UnicodeDecodeError, IsADirectoryError) as exc:
        raise SubjectValidationError("unparseable", source, str(exc).strip()) from exc

    frame.columns = [str(c).strip() for c in frame.columns]
    missing = [c for c in (TIME_COLUMN, GLUCOSE_COLUMN) if c not in frame.columns]
    if missing:
        raise SubjectValidationError(
            "missing_column", source, f"missing column(s) {missing}; found {list(frame.columns)}"
        )
    if frame.empty:
        raise SubjectValidationError("empty_file", source, "header without sample rows")

    times = _numeric_column(frame, TIME_COLUMN, source)
    glucose = _numeric_column(frame, GLUCOSE_COLUMN, source)

    identifier = subject_id if subject_id is not None else target.stem
    if ID_COLUMN in frame.columns:
        ids = {str(v).strip() for v in frame[ID_COLUMN].dropna()} - {""}
        if len(ids) > 1:
            raise SubjectValidationError("inconsistent_id", source, f"several ids {sorted(ids)}")
        if ids:
            (file_id,) = ids
            if subject_id is not None and file_id != subject_id:
                raise SubjectValidationError(
                    "inconsistent_id",
                    source,
                    f"id column says '{file_id}' but the manifest says '{subject_id}'",
                )
            identifier = file_id

    problem = sample_problem(times, glucose)
    if problem is not None:
        code, detail = problem
        raise SubjectValidationError(code, source, detail)

    return SubjectRecord(id=identifier, samples=tuple(zip(times.tolist(), glucose.tolist())))


def write_subject(record: SubjectRecord, path: str | Path, include_id: bool = True) -> Path:
    """Write a subject in the ingestion format; reloading gives an equal record."""
    frame = pd.DataFrame({TIME_COLUMN: record.times, GLUCOSE_COLUMN: record.glucose})
    if include_id:
        frame[ID_COLUMN] = record.id
    target = Path(path)
    atomic_write_text(target, frame.to_csv(index=False, lineterminator="\n"))
    return target


def _read_manifest(root: Path) -> dict[str, str]:
    manifest = root / MANIFEST_NAME
    if not manifest.exists():
        return {}
    data = load_json(manifest)
    try:
        files = data["files"] if isinstance(data, dict) else None
        return _MANIFEST_FILES.validate_python(files)
    except (KeyError, PydanticValidationError) as exc:
        raise ConfigLoadError(str(manifest), 'expected {"files": {"name.csv": "id"}}') from exc


def load_corpus(directory: str | Path) -> Corpus:
    """Load every ``*.csv`` subject file in ``directory``.

    Malformed files become ``CorpusIssue`` entries instead of aborting.

    Raises:
        DatasetError: the directory is missing or contains no subject files.
        ConfigLoadError: ``corpus.json`` exists but is malformed.
    """
    root = Path(directory)
    if not root.is_dir():
        raise DatasetError("not_a_directory", str(root), "corpus path must be a directory")

    files = sorted(p for p in root.glob("*.csv") if p.is_file())
    if not files:
        raise DatasetError("empty_corpus", str(root), "no *.csv subject files found")

    mapping = _read_manifest(root)
    subjects: list[SubjectRecord] = []
    issues: list[CorpusIssue] = []
    seen: dict[str, Path] = {}
    for file in files:
        try:
            record = load_subject(file, subject_id=mapping.get(file.name))
        except SubjectValidationError as exc:
            logger.warning("Skipping %s: %s", file, exc.reason)
            issues.append(CorpusIssue(path=str(file), code=exc.code, message=exc.detail))
            continue
        if record.id in seen:
            message = f"id '{record.id}' already loaded from {seen[record.id].name}"
            logger.warning("Skipping %s: %s", file, message)
            issues.append(CorpusIssue(path=str(file), code="duplicate_id", message=message))
            continue
        seen[record.id] = file
        subjects.append(record)

    logger.info("Loaded %d subject(s) from %s (%d issue(s))", len(subjects), root, len(issues))
    return Corpus(subjects=tuple(subjects), issues=tuple(issues), source=str(root))
