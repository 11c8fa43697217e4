# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Perday CatalogLAB™

"""
Peak-time analysis of fitted glucose curves.

Peaks are read off the re-simulated model trajectory, not the raw samples.
Subjects are grouped by peak time (<30, 30-50, >50 min); late-peak subjects
with a fast absorption rate are flagged as outliers and may return to Group1
through the biological peak, the first time the curve comes within tol_G of
its maximum. Group statistics use one-way ANOVA with Bonferroni post-hoc
comparisons.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping, Sequence
from itertools import combinations
from typing import Final

import numpy as np
import pandas as pd
from scipy import stats
from scipy.integrate import trapezoid
from scipy.special import betainc

from .exceptions import StatisticsError, ValidationError
from .integrator import Trajectory
from .models import (
    DEFAULT_KABS_THRESHOLD,
    DEFAULT_TOL_G,
    GROUP1_PEAK_LIMIT,
    GROUP2_PEAK_LIMIT,
    PEAK_VALUE_SPLIT,
    THETA_NAMES,
    CorrelationResult,
    EstimationResult,
    GroupAssignment,
    GroupLabel,
    GroupStats,
    MetricSummary,
    PairwiseComparison,
    PeakInfo,
    SignificanceResult,
    SpreadMode,
)

__all__ = [
    "ASSIGNMENT_COLUMNS",
    "DEFAULT_METRICS",
    "anova_oneway",
    "assign_groups",
    "assignments_frame",
    "attach_peak",
    "biological_peak",
    "bonferroni",
    "classify",
    "default_kabs_threshold",
    "detect_peak",
    "flag_outliers",
    "group_stats",
    "group_values",
    "incremental_auc",
    "pairwise_bonferroni",
    "parameter_correlations",
    "parameter_summary",
    "peak_info",
    "reclassify_outliers",
    "significance",
    "split_group1",
    "stars",
    "summarize",
    "trajectory_envelope",
]

logger = logging.getLogger(__name__)

DEFAULT_METRICS: Final[tuple[str, ...]] = ("peak_time", "kabs", "kgri", "b", "G_bio")
ASSIGNMENT_COLUMNS: Final[tuple[str, ...]] = (
    "subject",
    "group",
    "peak_time",
    "peak_value",
    "t_bio",
    "kabs",
    "kgri",
    "b",
)
LOW_PEAK_GROUP: Final[str] = "Group1 (G_bio<=155)"
HIGH_PEAK_GROUP: Final[str] = "Group1 (G_bio>155)"

# (threshold, label) pairs checked from the strictest down
_STAR_THRESHOLDS: Final[tuple[tuple[float, str], ...]] = (
    (1e-4, "****"),
    (1e-3, "***"),
    (1e-2, "**"),
    (5e-2, "*"),
)

_CORRELATION_PAIRS: Final[tuple[tuple[str, str], ...]] = (
    ("peak_time", "kabs"),
    ("peak_time", "kgri"),
    ("peak_time", "b"),
    ("kabs", "kgri"),
    ("G_bio", "b"),
)


# Peaks


def detect_peak(traj: Trajectory) -> tuple[float, float]:
    """Return ``(t̄, Ḡ)``: the maximum glucose and the earliest node attaining it."""
    glucose = traj.glucose
    index = int(np.argmax(glucose))
    return float(traj.times[index]), float(glucose[index])


def biological_peak(traj: Trajectory, tol_G: float = DEFAULT_TOL_G) -> tuple[float, float]:
    """Return ``(t_bio, G_bio)`` with ``G_bio = Ḡ - tol_G``.

    ``t_bio`` is the earliest node where the curve reaches ``G_bio``.
    """
    if not (math.isfinite(tol_G) and tol_G >= 0):
        raise ValidationError("tol_G", str(tol_G), "must be a finite value >= 0")
    glucose = traj.glucose
    g_bio = float(np.max(glucose)) - tol_G
    index = int(np.argmax(glucose >= g_bio))
    return float(traj.times[index]), g_bio


def peak_info(traj: Trajectory, tol_G: float = DEFAULT_TOL_G) -> PeakInfo:
    t_peak, g_peak = detect_peak(traj)
    t_bio, g_bio = biological_peak(traj, tol_G)
    return PeakInfo(t_peak=t_peak, G_peak=g_peak, t_bio=t_bio, G_bio=g_bio)


def attach_peak(
    result: EstimationResult, traj: Trajectory, tol_G: float = DEFAULT_TOL_G
) -> EstimationResult:
    """Copy of ``result`` with its ``peak`` filled from the fitted trajectory."""
    return result.model_copy(update={"peak": peak_info(traj, tol_G)})


def incremental_auc(traj: Trajectory, baseline: float | None = None) -> float:
    """Area of the glucose curve above ``baseline`` (default: G at t0) [mg*min/dL]."""
    glucose = traj.glucose
    base = float(glucose[0]) if baseline is None else baseline
    return float(trapezoid(np.clip(glucose - base, 0.0, None), traj.times))


# Classification


def classify(peak_time: float) -> GroupLabel:
    """Group by peak time: [0, 30) Group1, [30, 50] Group2, above 50 Group3."""
    if not (math.isfinite(peak_time) and peak_time >= 0):
        raise ValidationError("peak_time", str(peak_time), "must be a finite time >= 0")
    if peak_time < GROUP1_PEAK_LIMIT:
        return "Group1"
    if peak_time <= GROUP2_PEAK_LIMIT:
        return "Group2"
    return "Group3"


def _require_peak(result: EstimationResult) -> PeakInfo:
    if result.peak is None:
        raise ValidationError("peak", result.subject_id, "call attach_peak before classifying")
    return result.peak


def flag_outliers(
    results: Sequence[EstimationResult], kabs_threshold: float = DEFAULT_KABS_THRESHOLD
) -> list[bool]:
    """Late peak (>= 30 min) despite an absorption rate typical of Group1."""
    return [
        _require_peak(r).t_peak >= GROUP1_PEAK_LIMIT and r.theta.Kabs >= kabs_threshold
        for r in results
    ]


def reclassify_outliers(
    labels: Sequence[GroupLabel],
    flags: Sequence[bool],
    trajectories: Sequence[Trajectory],
    tol_G: float = DEFAULT_TOL_G,
) -> list[GroupLabel]:
    """Move flagged subjects whose biological peak is before 30 min into Group1.

    Flagged subjects that stay late keep the ``Outlier`` label; unflagged
    subjects are returned untouched.
    """
    if not len(labels) == len(flags) == len(trajectories):
        raise ValidationError("labels", str(len(labels)), "labels, flags and trajectories differ")
    updated: list[GroupLabel] = []
    for label, flagged, traj in zip(labels, flags, trajectories):
        if not flagged:
            updated.append(label)
            continue
        t_bio, _ = biological_peak(traj, tol_G)
        updated.append("Group1" if t_bio < GROUP1_PEAK_LIMIT else "Outlier")
    return updated


def default_kabs_threshold(results: Sequence[EstimationResult]) -> float:
    """Midpoint of the Group1 and Group2 mean Kabs, grouping by raw peak time."""
    by_group: dict[str, list[float]] = {"Group1": [], "Group2": []}
    for result in results:
        label = classify(_require_peak(result).t_peak)
        if label in by_group:
            by_group[label].append(result.theta.Kabs)
    if min(len(v) for v in by_group.values()) < 2:
        logger.warning(
            "Too few Group1/Group2 subjects for a corpus Kabs threshold; using %g",
            DEFAULT_KABS_THRESHOLD,
        )
        return DEFAULT_KABS_THRESHOLD
    return float((np.mean(by_group["Group1"]) + np.mean(by_group["Group2"])) / 2.0)


def assign_groups(
    results: Sequence[EstimationResult],
    trajectories: Sequence[Trajectory],
    tol_G: float = DEFAULT_TOL_G,
    kabs_threshold: float | None = None,
) -> list[GroupAssignment]:
    """Classify, flag and reclassify every fitted subject in one pass."""
    if len(results) != len(trajectories):
        raise ValidationError("trajectories", str(len(trajectories)), "one per result required")
    peaked = [
        r if r.peak is not None else attach_peak(r, traj, tol_G)
        for r, traj in zip(results, trajectories)
    ]
    threshold = default_kabs_threshold(peaked) if kabs_threshold is None else kabs_threshold
    flags = flag_outliers(peaked, threshold)
    labels: list[GroupLabel] = [
        "Outlier" if flagged else classify(_require_peak(r).t_peak)
        for r, flagged in zip(peaked, flags)
    ]
    final = reclassify_outliers(labels, flags, trajectories, tol_G)

    assignments = []
    for result, traj, flagged, label in zip(peaked, trajectories, flags, final):
        t_peak, g_peak = detect_peak(traj)
        t_bio, g_bio = biological_peak(traj, tol_G)
        reclassified = flagged and label == "Group1"
        assignments.append(
            GroupAssignment(
                subject_id=result.subject_id,
                label=label,
                outlier=flagged,
                reclassified=reclassified,
                peak_time=t_bio if reclassified else t_peak,
                t_peak=t_peak,
                G_peak=g_peak,
                t_bio=t_bio,
                G_bio=g_bio if reclassified else g_peak,
                kabs=result.theta.Kabs,
                kgri=result.theta.Kgri,
                b=result.theta.b,
                iauc=incremental_auc(traj),
            )
        )
    counts = {g: sum(a.label == g for a in assignments) for g in ("Group1", "Group2", "Group3")}
    logger.info(
        "Assigned %d subject(s): %s, %d outlier(s) flagged with Kabs threshold %.4g",
        len(assignments),
        counts,
        sum(flags),
        threshold,
    )
    return assignments


def assignments_frame(assignments: Sequence[GroupAssignment]) -> pd.DataFrame:
    """Flat table for external plotting, one row per subject."""
    rows = [
        (a.subject_id, a.label, a.peak_time, a.G_bio, a.t_bio, a.kabs, a.kgri, a.b)
        for a in assignments
    ]
    return pd.DataFrame(rows, columns=list(ASSIGNMENT_COLUMNS))


# Descriptive statistics


def summarize(values: Sequence[float], spread: SpreadMode = "sd") -> MetricSummary:
    """Mean with sample SD and SEM; a single value has zero spread."""
    data = np.asarray(values, dtype=np.float64)
    if data.size == 0:
        return MetricSummary(mean=None, sd=None, sem=None, spread=None)
    sd = float(np.std(data, ddof=1)) if data.size > 1 else 0.0
    sem = sd / math.sqrt(data.size)
    return MetricSummary(
        mean=float(np.mean(data)), sd=sd, sem=sem, spread=sd if spread == "sd" else sem
    )


def split_group1(
    assignments: Sequence[GroupAssignment], threshold: float = PEAK_VALUE_SPLIT
) -> dict[str, list[GroupAssignment]]:
    """Group1 members split by peak value; a value equal to the threshold goes low."""
    group1 = [a for a in assignments if a.label == "Group1"]
    return {
        LOW_PEAK_GROUP: [a for a in group1 if a.G_bio <= threshold],
        HIGH_PEAK_GROUP: [a for a in group1 if a.G_bio > threshold],
    }


def group_values(
    assignments: Sequence[GroupAssignment],
    metric: str,
    groups: Sequence[str] = ("Group1", "Group2", "Group3"),
    split_peak_value: bool = False,
) -> dict[str, list[float]]:
    """Metric values keyed by group, in the order of ``groups``."""
    if split_peak_value:
        members = split_group1(assignments)
    else:
        members = {g: [a for a in assignments if a.label == g] for g in groups}
    return {name: [a.metric(metric) for a in items] for name, items in members.items()}


def group_stats(
    assignments: Sequence[GroupAssignment],
    metrics: Sequence[str] = DEFAULT_METRICS,
    spread: SpreadMode = "sd",
    groups: Sequence[str] = ("Group1", "Group2", "Group3"),
    split_peak_value: bool = False,
) -> list[GroupStats]:
    """Per-group n, mean and spread; an empty group reports n=0 and no mean.

    ``Outlier`` subjects are left out unless listed in ``groups``. With
    ``split_peak_value`` the rows are the two Group1 peak-value buckets.
    """
    if split_peak_value:
        members = split_group1(assignments)
    else:
        members = {g: [a for a in assignments if a.label == g] for g in groups}
    out = []
    for name, items in members.items():
        summaries = {m: summarize([a.metric(m) for a in items], spread) for m in metrics}
        out.append(GroupStats(group=name, n=len(items), spread_mode=spread, metrics=summaries))
    return out


def parameter_summary(
    results: Sequence[EstimationResult], spread: SpreadMode = "sd"
) -> dict[str, MetricSummary]:
    """Corpus-wide mean and spread of every θ component."""
    return {
        name: summarize([getattr(r.theta, name) for r in results], spread) for name in THETA_NAMES
    }


def parameter_correlations(
    assignments: Sequence[GroupAssignment],
    pairs: Sequence[tuple[str, str]] = _CORRELATION_PAIRS,
) -> list[CorrelationResult]:
    """Pearson r between peak descriptors and gastric parameters."""
    out = []
    for x_name, y_name in pairs:
        x = np.array([a.metric(x_name) for a in assignments], dtype=np.float64)
        y = np.array([a.metric(y_name) for a in assignments], dtype=np.float64)
        if x.size < 3 or np.ptp(x) == 0 or np.ptp(y) == 0:
            out.append(CorrelationResult(x=x_name, y=y_name, n=int(x.size)))
            continue
        r, p = stats.pearsonr(x, y)
        out.append(CorrelationResult(x=x_name, y=y_name, n=int(x.size), r=float(r), p=float(p)))
    return out


def trajectory_envelope(
    trajectories: Sequence[Trajectory], names: Sequence[str] = ("G", "I", "EGP", "Ra")
) -> pd.DataFrame:
    """Node-wise mean and sample SD of observables across subjects."""
    if not trajectories:
        raise ValidationError("trajectories", "[]", "at least one trajectory is required")
    reference = trajectories[0]
    if any(t.grid != reference.grid for t in trajectories[1:]):
        raise ValidationError("trajectories", "grid", "all trajectories must share one grid")
    columns: dict[str, np.ndarray] = {"t_min": np.asarray(reference.times)}
    ddof = 1 if len(trajectories) > 1 else 0
    for name in names:
        stack = np.vstack([t.observable(name) for t in trajectories])
        columns[f"{name}_mean"] = stack.mean(axis=0)
        columns[f"{name}_sd"] = stack.std(axis=0, ddof=ddof)
    return pd.DataFrame(columns)


# Significance


def stars(p_value: float) -> str:
    for threshold, label in _STAR_THRESHOLDS:
        if p_value < threshold:
            return label
    return ""


def bonferroni(pvalues: Sequence[float], m: int | None = None) -> list[tuple[float, str]]:
    """Adjusted p-values ``min(1, m*p)`` with their star labels."""
    count = len(pvalues) if m is None else m
    if count < len(pvalues):
        raise ValidationError("m", str(count), f"must be >= the {len(pvalues)} comparisons")
    adjusted = [min(1.0, count * float(p)) for p in pvalues]
    return [(p, stars(p)) for p in adjusted]


def _clean_groups(groups: Sequence[Sequence[float]]) -> list[np.ndarray]:
    arrays = [np.asarray(g, dtype=np.float64) for g in groups]
    if len(arrays) < 2:
        raise StatisticsError(f"need at least 2 groups, got {len(arrays)}")
    if any(a.size == 0 for a in arrays):
        raise StatisticsError("every group needs at least one value")
    if sum(a.size for a in arrays) - len(arrays) < 1:
        raise StatisticsError("no within-group degrees of freedom (all groups are singletons)")
    if not all(np.all(np.isfinite(a)) for a in arrays):
        raise StatisticsError("group values must be finite")
    return arrays


def _within_mean_square(arrays: Sequence[np.ndarray]) -> tuple[float, int]:
    ss_within = float(sum(np.sum((a - a.mean()) ** 2) for a in arrays))
    df_within = sum(a.size for a in arrays) - len(arrays)
    return ss_within / df_within, df_within


def anova_oneway(groups: Sequence[Sequence[float]]) -> tuple[float, float]:
    """One-way ANOVA ``(F, p)``; p is the F upper tail via the regularized incomplete beta."""
    arrays = _clean_groups(groups)
    grand = float(np.concatenate(arrays).mean())
    centred = [a - grand for a in arrays]
    ss_between = float(sum(c.size * c.mean() ** 2 for c in centred))
    ss_within = float(sum(np.sum((c - c.mean()) ** 2) for c in centred))
    ss_total = float(sum(np.sum(c**2) for c in centred))
    df_between = len(arrays) - 1
    df_within = sum(a.size for a in arrays) - len(arrays)

    # cutoffs are relative to the total spread, never absolute
    if ss_total == 0.0 or ss_between <= 1e-12 * ss_total:
        return 0.0, 1.0
    if ss_within <= 1e-12 * ss_total:
        return math.inf, 0.0
    f_stat = (ss_between / df_between) / (ss_within / df_within)
    x = df_within / (df_within + df_between * f_stat)
    p = float(betainc(df_within / 2.0, df_between / 2.0, x))
    return float(f_stat), min(1.0, max(0.0, p))


def pairwise_bonferroni(groups: Mapping[str, Sequence[float]]) -> list[PairwiseComparison]:
    """Two-sided t tests on the pooled within-group variance, Bonferroni-adjusted."""
    names = list(groups)
    arrays = _clean_groups([groups[n] for n in names])
    ms_within, df_within = _within_mean_square(arrays)
    pairs = list(combinations(range(len(names)), 2))

    raw: list[float] = []
    differences: list[float] = []
    for i, j in pairs:
        diff = float(arrays[i].mean() - arrays[j].mean())
        standard_error = math.sqrt(ms_within * (1.0 / arrays[i].size + 1.0 / arrays[j].size))
        if standard_error == 0.0:
            p = 1.0 if diff == 0.0 else 0.0
        else:
            p = float(2.0 * stats.t.sf(abs(diff) / standard_error, df_within))
        differences.append(diff)
        raw.append(min(1.0, p))

    adjusted = bonferroni(raw, len(pairs))
    return [
        PairwiseComparison(
            group_a=names[i],
            group_b=names[j],
            mean_difference=diff,
            p_raw=p_raw,
            p_adjusted=p_adj,
            stars=label,
        )
        for (i, j), diff, p_raw, (p_adj, label) in zip(pairs, differences, raw, adjusted)
    ]


def significance(groups: Mapping[str, Sequence[float]], metric: str = "") -> SignificanceResult:
    """ANOVA across ``groups`` followed by the Bonferroni post-hoc table."""
    f_stat, p = anova_oneway(list(groups.values()))
    n_total = sum(len(v) for v in groups.values())
    return SignificanceResult(
        metric=metric,
        groups=list(groups),
        F=f_stat,
        p=p,
        df_between=len(groups) - 1,
        df_within=n_total - len(groups),
        pairwise=pairwise_bonferroni(groups),
    )
