# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Perday CatalogLAB™

"""
Typed models for the meal glucose model.

This module provides Pydantic models for parameters, basal states, ODE states,
fit configuration and analysis results. Field descriptions carry the units;
the shipped JSON schema is generated from the same descriptions.
"""

from __future__ import annotations

from datetime import datetime, timezone
from typing import Any, Final, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

# Literal types
DoseMode = Literal["instantaneous", "gaussian"]
GroupLabel = Literal["Group1", "Group2", "Group3", "Outlier"]
ConvergenceReason = Literal["loss_below_tol", "param_stalled", "budget_exhausted"]
SpreadMode = Literal["sd", "sem"]
OptimizerName = Literal["nelder-mead", "quasi-newton"]
FailureKind = Literal["validation", "numerical"]

# Ordering of the estimated vector θ
THETA_NAMES: Final[tuple[str, ...]] = (
    "Kmin",
    "Kmax",
    "Kabs",
    "Kgri",
    "b",
    "d",
    "EGPb",
    "kp2",
    "kp3",
    "kp4",
    "ki",
)

# Ordering of the twelve ODE state components
STATE_NAMES: Final[tuple[str, ...]] = (
    "Gp",
    "Gt",
    "Il",
    "Ip",
    "I1",
    "Id",
    "Qsto1",
    "Qsto2",
    "Qgut",
    "X",
    "Ipo",
    "Y",
)

OBSERVABLE_NAMES: Final[tuple[str, ...]] = (
    "G",
    "I",
    "EGP",
    "Ra",
    "S",
    "Spo",
    "U",
    "Uid",
    "E",
    "HE",
    "m3",
    "Kempt",
    "Qsto",
    "dGdt",
)

GROUP_LABELS: Final[tuple[GroupLabel, ...]] = ("Group1", "Group2", "Group3", "Outlier")

# Constants
DEFAULT_BASAL_GLUCOSE: Final[float] = 90.0
DEFAULT_TOL_G: Final[float] = 2.6
DEFAULT_KABS_THRESHOLD: Final[float] = 0.21
PEAK_VALUE_SPLIT: Final[float] = 155.0
GROUP1_PEAK_LIMIT: Final[float] = 30.0
GROUP2_PEAK_LIMIT: Final[float] = 50.0
OGTT_SAMPLE_TIMES: Final[tuple[float, ...]] = tuple(15.0 * k for k in range(9))


class FixedParameters(BaseModel):
    """Constants of the glucose-insulin model that are not estimated."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    VG: float = Field(default=1.88, gt=0, description="Glucose distribution volume [dL/kg]")
    k1: float = Field(default=0.065, gt=0, description="Plasma to tissue glucose rate [1/min]")
    k2: float = Field(default=0.079, gt=0, description="Tissue to plasma glucose rate [1/min]")
    VI: float = Field(default=0.05, gt=0, description="Insulin distribution volume [L/kg]")
    m1: float = Field(default=0.190, gt=0, description="Liver to plasma insulin rate [1/min]")
    m2: float = Field(default=0.484, gt=0, description="Plasma to liver insulin rate [1/min]")
    m4: float = Field(default=0.194, gt=0, description="Peripheral insulin degradation [1/min]")
    m5: float = Field(
        default=0.0304, gt=0, description="Hepatic extraction slope vs secretion [min*kg/pmol]"
    )
    m6: float = Field(
        default=0.6471, gt=0, description="Hepatic extraction at zero secretion [dimensionless]"
    )
    HEb: float = Field(
        default=0.6, gt=0, lt=1, description="Basal hepatic insulin extraction [dimensionless]"
    )
    f: float = Field(
        default=0.90, gt=0, le=1, description="Fraction of absorbed glucose reaching plasma [-]"
    )
    Fcns: float = Field(
        default=1.0, gt=0, description="Insulin-independent utilization [mg/kg/min]"
    )
    Vm0: float = Field(default=2.50, gt=0, description="Basal Michaelis-Menten Vmax [mg/kg/min]")
    Vmx: float = Field(
        default=0.047, gt=0, description="Insulin action on Vmax [mg/kg/min per pmol/L]"
    )
    Km0: float = Field(default=225.59, gt=0, description="Michaelis-Menten constant [mg/kg]")
    p2U: float = Field(
        default=0.0331, gt=0, description="Insulin action on peripheral utilization [1/min]"
    )
    K: float = Field(
        default=2.30, gt=0, description="Responsivity to glucose rate of change [pmol/kg per mg/dL]"
    )
    alpha: float = Field(default=0.050, gt=0, description="Secretion delay rate [1/min]")
    beta: float = Field(
        default=0.11, gt=0, description="Responsivity to glucose [pmol/kg/min per mg/dL]"
    )
    gamma: float = Field(default=0.5, gt=0, description="Portal vein to liver rate [1/min]")
    ke1: float = Field(default=1e-4, gt=0, description="Renal excretion rate [1/min]")
    ke2: float = Field(default=339.0, gt=0, description="Renal excretion threshold [mg/kg]")
    BW: float = Field(default=78.0, gt=0, description="Body weight [kg]")
    D: float = Field(default=50000.0, ge=0, description="Ingested glucose dose [mg]")


class EstimatedParameters(BaseModel):
    """The eleven-component vector θ fitted per subject."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    Kmin: float = Field(gt=0, description="Minimum gastric emptying rate [1/min]")
    Kmax: float = Field(gt=0, description="Maximum gastric emptying rate [1/min]")
    Kabs: float = Field(gt=0, description="Intestinal absorption rate [1/min]")
    Kgri: float = Field(gt=0, description="Grinding rate [1/min]")
    b: float = Field(gt=0, lt=1, description="Dose fraction at the emptying decay midpoint [-]")
    d: float = Field(gt=0, lt=1, description="Dose fraction at the emptying recovery midpoint [-]")
    EGPb: float = Field(gt=0, description="Basal endogenous glucose production [mg/kg/min]")
    kp2: float = Field(gt=0, description="Liver glucose effectiveness [1/min]")
    kp3: float = Field(gt=0, description="Delayed insulin action on EGP [mg/kg/min per pmol/L]")
    kp4: float = Field(gt=0, description="Portal insulin action on EGP [mg/kg/min per pmol/kg]")
    ki: float = Field(gt=0, description="Insulin signal delay rate [1/min]")

    @model_validator(mode="after")
    def _check_orderings(self) -> EstimatedParameters:
        if not self.Kmin < self.Kmax:
            raise ValueError(f"Kmin ({self.Kmin}) must be below Kmax ({self.Kmax})")
        if not self.d < self.b:
            raise ValueError(f"d ({self.d}) must be below b ({self.b})")
        return self

    def to_vector(self) -> np.ndarray:
        """Return θ as a float array in ``THETA_NAMES`` order."""
        return np.array([getattr(self, name) for name in THETA_NAMES], dtype=np.float64)

    @classmethod
    def from_vector(cls, values: Any) -> EstimatedParameters:
        vector = np.asarray(values, dtype=np.float64)
        if vector.shape != (len(THETA_NAMES),):
            raise ValueError(f"expected {len(THETA_NAMES)} components, got shape {vector.shape}")
        return cls(**{name: float(v) for name, v in zip(THETA_NAMES, vector)})


class ParameterBound(BaseModel):
    """Lower/upper bound and starting value for one θ component."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    lower: float = Field(description="Lower bound (component units)")
    upper: float = Field(description="Upper bound (component units)")
    initial: float = Field(description="Starting value, clamped into [lower, upper]")

    @model_validator(mode="before")
    @classmethod
    def _clamp_initial(cls, data: Any) -> Any:
        if isinstance(data, dict) and {"lower", "upper", "initial"} <= data.keys():
            lower, upper = float(data["lower"]), float(data["upper"])
            if lower < upper:
                data = {**data, "initial": min(max(float(data["initial"]), lower), upper)}
        return data

    @model_validator(mode="after")
    def _check_order(self) -> ParameterBound:
        if not self.lower < self.upper:
            raise ValueError(f"lower ({self.lower}) must be below upper ({self.upper})")
        return self


def _bound(lower: float, upper: float, initial: float) -> ParameterBound:
    return ParameterBound(lower=lower, upper=upper, initial=initial)


class ParameterBounds(BaseModel):
    """Box constraints and starting values for the estimation."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    Kmin: ParameterBound = Field(default_factory=lambda: _bound(1e-4, 0.025, 0.015))
    Kmax: ParameterBound = Field(default_factory=lambda: _bound(0.035, 0.1, 0.0558))
    Kabs: ParameterBound = Field(default_factory=lambda: _bound(0.01, 0.3, 0.057))
    Kgri: ParameterBound = Field(default_factory=lambda: _bound(1e-5, 0.1, 0.049))
    b: ParameterBound = Field(default_factory=lambda: _bound(0.65, 0.995, 0.85))
    d: ParameterBound = Field(default_factory=lambda: _bound(1e-7, 0.01, 0.00018))
    EGPb: ParameterBound = Field(default_factory=lambda: _bound(1.5, 2.5, 2.0))
    kp2: ParameterBound = Field(default_factory=lambda: _bound(1e-3, 0.01, 0.0021))
    kp3: ParameterBound = Field(default_factory=lambda: _bound(1e-5, 0.02, 0.009))
    kp4: ParameterBound = Field(default_factory=lambda: _bound(1e-4, 0.1, 0.0618))
    # the customary ki start 0.0079 lies above the upper bound; clamped to 1e-3
    ki: ParameterBound = Field(default_factory=lambda: _bound(1e-5, 1e-3, 0.0079))

    def lower_vector(self) -> np.ndarray:
        return np.array([getattr(self, n).lower for n in THETA_NAMES], dtype=np.float64)

    def upper_vector(self) -> np.ndarray:
        return np.array([getattr(self, n).upper for n in THETA_NAMES], dtype=np.float64)

    def initial_vector(self) -> np.ndarray:
        return np.array([getattr(self, n).initial for n in THETA_NAMES], dtype=np.float64)

    def initial_parameters(self) -> EstimatedParameters:
        return EstimatedParameters.from_vector(self.initial_vector())

    def violations(self, theta: EstimatedParameters) -> list[str]:
        """Names of θ components outside their bounds."""
        out: list[str] = []
        for name in THETA_NAMES:
            bound: ParameterBound = getattr(self, name)
            value = getattr(theta, name)
            if not bound.lower <= value <= bound.upper:
                out.append(name)
        return out


class BasalState(BaseModel):
    """Fasting steady-state quantities derived from Gb, θ and the fixed constants."""

    model_config = ConfigDict(frozen=True)

    Gb: float = Field(description="Basal plasma glucose [mg/dL]")
    Gpb: float = Field(description="Basal plasma glucose mass [mg/kg]")
    Gtb: float = Field(description="Basal tissue glucose mass [mg/kg]")
    Ib: float = Field(description="Basal plasma insulin [pmol/L]")
    Ipb: float = Field(description="Basal plasma insulin mass [pmol/kg]")
    Ilb: float = Field(description="Basal liver insulin mass [pmol/kg]")
    Ipob: float = Field(description="Basal portal insulin [pmol/kg]")
    Sb: float = Field(description="Basal insulin secretion [pmol/kg/min]")
    m30: float = Field(description="Basal hepatic clearance rate m3(0) [1/min]")
    kp1: float = Field(description="Extrapolated EGP at zero glucose and insulin [mg/kg/min]")
    h: float = Field(description="Secretion glucose threshold [mg/dL]")
    Vm0: float = Field(description="Michaelis-Menten Vmax used by the dynamics [mg/kg/min]")


class ModelState(BaseModel):
    """The twelve-component ODE state (or its time derivative)."""

    model_config = ConfigDict(frozen=True)

    Gp: float = Field(description="Plasma glucose mass [mg/kg]")
    Gt: float = Field(description="Tissue glucose mass [mg/kg]")
    Il: float = Field(description="Liver insulin mass [pmol/kg]")
    Ip: float = Field(description="Plasma insulin mass [pmol/kg]")
    I1: float = Field(description="Auxiliary delayed insulin [pmol/L]")
    Id: float = Field(description="Delayed insulin signal [pmol/L]")
    Qsto1: float = Field(description="Stomach glucose, solid phase [mg]")
    Qsto2: float = Field(description="Stomach glucose, liquid phase [mg]")
    Qgut: float = Field(description="Intestinal glucose [mg]")
    X: float = Field(description="Interstitial insulin [pmol/L]")
    Ipo: float = Field(description="Portal vein insulin [pmol/kg]")
    Y: float = Field(description="Glucose-driven secretion component [pmol/kg/min]")

    def to_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in STATE_NAMES], dtype=np.float64)

    @classmethod
    def from_array(cls, values: Any) -> ModelState:
        vector = np.asarray(values, dtype=np.float64)
        return cls(**{name: float(v) for name, v in zip(STATE_NAMES, vector)})


class Observables(BaseModel):
    """Algebraic outputs of the model at one instant."""

    model_config = ConfigDict(frozen=True)

    G: float = Field(description="Plasma glucose [mg/dL]")
    I: float = Field(description="Plasma insulin [pmol/L]")  # noqa: E741
    EGP: float = Field(description="Endogenous glucose production, unclamped [mg/kg/min]")
    Ra: float = Field(description="Rate of appearance [mg/kg/min]")
    S: float = Field(description="Insulin secretion [pmol/kg/min]")
    Spo: float = Field(description="Pancreatic secretion into the portal vein [pmol/kg/min]")
    U: float = Field(description="Total glucose utilization [mg/kg/min]")
    Uid: float = Field(description="Insulin-dependent utilization [mg/kg/min]")
    E: float = Field(description="Renal excretion [mg/kg/min]")
    HE: float = Field(description="Hepatic insulin extraction (clamped) [-]")
    m3: float = Field(description="Hepatic insulin clearance rate [1/min]")
    Kempt: float = Field(description="Gastric emptying rate [1/min]")
    Qsto: float = Field(description="Total stomach glucose [mg]")
    dGdt: float = Field(description="Plasma glucose rate of change [mg/dL/min]")

    @classmethod
    def from_array(cls, values: Any) -> Observables:
        vector = np.asarray(values, dtype=np.float64)
        return cls(**{name: float(v) for name, v in zip(OBSERVABLE_NAMES, vector)})


class DoseProfile(BaseModel):
    """How the glucose dose enters the stomach."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    mode: DoseMode = Field(default="instantaneous", description="Ingestion impulse shape")
    amount: float = Field(default=50000.0, ge=0, description="Ingested glucose D [mg]")
    center: float = Field(default=7.5, description="Gaussian impulse center [min]")
    width: float = Field(default=2.5, gt=0, description="Gaussian impulse width [min]")


class TimeGrid(BaseModel):
    """Uniform integration grid."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    t0: float = Field(default=0.0, description="Start time [min]")
    t_end: float = Field(default=120.0, description="End time [min]")
    dt: float = Field(default=0.05, gt=0, description="Step size [min]")

    @model_validator(mode="after")
    def _check_span(self) -> TimeGrid:
        if not self.t0 < self.t_end:
            raise ValueError(f"t0 ({self.t0}) must be below t_end ({self.t_end})")
        steps = (self.t_end - self.t0) / self.dt
        if abs(steps - round(steps)) > 1e-6 * max(1.0, steps):
            raise ValueError(f"span {self.t_end - self.t0} is not a multiple of dt={self.dt}")
        return self

    @property
    def n_steps(self) -> int:
        return int(round((self.t_end - self.t0) / self.dt))

    @property
    def n_points(self) -> int:
        return self.n_steps + 1

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n_points, dtype=np.float64)


class FitConfig(BaseModel):
    """Estimation settings (defaults reproduce the reference setup)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    tol: float = Field(default=1e-10, gt=0, description="Loss / step tolerance [-]")
    max_evals: int = Field(
        default=500 * len(THETA_NAMES), ge=1, description="Loss evaluation budget [count]"
    )
    dt: float = Field(default=0.05, gt=0, description="Integration step [min]")
    penalty: float = Field(default=1e6, gt=0, description="Negative-EGP penalty χ [-]")
    bounds: ParameterBounds = Field(default_factory=ParameterBounds)
    optimizer: OptimizerName = Field(default="nelder-mead", description="Local minimizer")
    restarts: int = Field(default=1, ge=0, description="Restarts from the best vertex")
    basal_consistency: bool = Field(
        default=False, description="Recompute Vm0 per subject so the basal state is exact"
    )
    dose_mode: DoseMode = Field(default="instantaneous", description="Ingestion impulse shape")
    dose_center: float = Field(default=7.5, description="Gaussian impulse center [min]")
    dose_width: float = Field(default=2.5, gt=0, description="Gaussian impulse width [min]")

    def dose(self, fixed: FixedParameters) -> DoseProfile:
        return DoseProfile(
            mode=self.dose_mode, amount=fixed.D, center=self.dose_center, width=self.dose_width
        )


def sample_problem(times: Any, values: Any) -> tuple[str, str] | None:
    """Return ``(code, detail)`` for the first rule an OGTT sample set breaks."""
    t = np.asarray(times, dtype=np.float64)
    g = np.asarray(values, dtype=np.float64)
    if t.size < 2:
        return "too_few_samples", f"need at least 2 samples, got {t.size}"
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(g))):
        return "unparseable", "times and glucose values must be finite numbers"
    if not np.any(t == 0.0):
        return "missing_basal", "no sample at t=0 min"
    unique, counts = np.unique(t, return_counts=True)
    if np.any(counts > 1):
        return "duplicate_time", f"repeated time(s) {unique[counts > 1].tolist()}"
    if np.any(np.diff(t) <= 0) or t[0] != 0.0:
        return "non_monotone_time", "times must be strictly increasing from 0"
    if np.any(g <= 0):
        return "non_positive_glucose", "glucose values must be positive"
    return None


class SubjectRecord(BaseModel):
    """Sampled glucose curve of one subject."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    id: str = Field(min_length=1, description="Subject identifier")
    samples: tuple[tuple[float, float], ...] = Field(
        description="Ordered (t [min], glucose [mg/dL]) pairs"
    )

    @model_validator(mode="after")
    def _check_samples(self) -> SubjectRecord:
        problem = sample_problem(self.times, self.glucose)
        if problem is not None:
            code, detail = problem
            raise ValueError(f"{code}: {detail}")
        return self

    @property
    def Gb(self) -> float:  # noqa: N802
        """Basal glucose: the t=0 sample [mg/dL]."""
        return self.samples[0][1]

    @property
    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.samples], dtype=np.float64)

    @property
    def glucose(self) -> np.ndarray:
        return np.array([g for _, g in self.samples], dtype=np.float64)


class CorpusIssue(BaseModel):
    """A file that could not be ingested."""

    model_config = ConfigDict(frozen=True)

    path: str
    code: str
    message: str


class Corpus(BaseModel):
    """Subjects loaded from one directory plus provenance."""

    model_config = ConfigDict(frozen=True)

    subjects: tuple[SubjectRecord, ...]
    issues: tuple[CorpusIssue, ...] = ()
    source: str = Field(description="Directory the corpus was read from")
    loaded_at: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))

    @model_validator(mode="after")
    def _check_unique_ids(self) -> Corpus:
        ids = [s.id for s in self.subjects]
        if len(ids) != len(set(ids)):
            raise ValueError("subject ids must be unique")
        return self


class PeakInfo(BaseModel):
    """Mathematical and biological glycemic peak of a simulated curve."""

    model_config = ConfigDict(frozen=True)

    t_peak: float = Field(description="Time of the maximum [min]")
    G_peak: float = Field(description="Maximum glucose [mg/dL]")
    t_bio: float = Field(description="Biological peak time [min]")
    G_bio: float = Field(description="Biological peak value, maximum minus tol_G [mg/dL]")

    @model_validator(mode="after")
    def _check_order(self) -> PeakInfo:
        if self.t_bio > self.t_peak:
            raise ValueError("t_bio cannot follow t_peak")
        return self


class EstimationResult(BaseModel):
    """Fitted θ with optimizer diagnostics."""

    model_config = ConfigDict(frozen=True)

    subject_id: str
    theta: EstimatedParameters
    loss: float = Field(ge=0, description="Penalized mean squared error [(mg/dL)^2]")
    evals: int = Field(ge=0, description="Loss evaluations used [count]")
    converged: bool = Field(description="False when the evaluation budget ran out")
    reason: ConvergenceReason
    min_EGP: float = Field(description="Minimum EGP over the fitted trajectory [mg/kg/min]")
    Gb: float = Field(gt=0, description="Basal glucose used for the fit [mg/dL]")
    peak: PeakInfo | None = None


class FitFailure(BaseModel):
    """A subject the batch could not fit."""

    model_config = ConfigDict(frozen=True)

    subject_id: str
    kind: FailureKind
    error: str


class GroupAssignment(BaseModel):
    """Peak-time classification of one fitted subject."""

    model_config = ConfigDict(frozen=True)

    subject_id: str
    label: GroupLabel
    outlier: bool = Field(description="Flagged as late-peak / fast-absorption outlier")
    reclassified: bool = Field(description="Moved to Group1 through the biological peak")
    peak_time: float = Field(description="Time used for classification [min]")
    t_peak: float = Field(description="Mathematical peak time [min]")
    G_peak: float = Field(description="Mathematical peak value [mg/dL]")
    t_bio: float = Field(description="Biological peak time [min]")
    G_bio: float = Field(description="Peak value used for the Group1 split [mg/dL]")
    kabs: float = Field(description="Kabs [1/min]")
    kgri: float = Field(description="Kgri [1/min]")
    b: float = Field(description="b [-]")
    iauc: float = Field(description="Incremental glucose AUC [mg*min/dL]")

    def metric(self, name: str) -> float:
        return float(getattr(self, name))


class MetricSummary(BaseModel):
    """Mean and spread of one metric inside one group."""

    model_config = ConfigDict(frozen=True)

    mean: float | None
    sd: float | None
    sem: float | None
    spread: float | None


class GroupStats(BaseModel):
    """Per-group descriptive statistics."""

    model_config = ConfigDict(frozen=True)

    group: str
    n: int = Field(ge=0)
    spread_mode: SpreadMode = "sd"
    metrics: dict[str, MetricSummary] = Field(default_factory=dict)


class PairwiseComparison(BaseModel):
    """Bonferroni-corrected post-hoc comparison of two groups."""

    model_config = ConfigDict(frozen=True)

    group_a: str
    group_b: str
    mean_difference: float
    p_raw: float = Field(ge=0, le=1)
    p_adjusted: float = Field(ge=0, le=1)
    stars: str


class SignificanceResult(BaseModel):
    """One-way ANOVA with Bonferroni post-hoc comparisons."""

    model_config = ConfigDict(frozen=True)

    metric: str = ""
    groups: list[str] = Field(default_factory=list)
    F: float = Field(ge=0)
    p: float = Field(ge=0, le=1)
    df_between: int
    df_within: int
    pairwise: list[PairwiseComparison] = Field(default_factory=list)


class CorrelationResult(BaseModel):
    """Pearson correlation between two per-subject quantities."""

    model_config = ConfigDict(frozen=True)

    x: str
    y: str
    n: int = Field(ge=0)
    r: float | None = Field(default=None, description="Pearson r, None when undefined")
    p: float | None = Field(default=None, description="Two-sided p-value, None when undefined")


class ParameterSet(BaseModel):
    """JSON document accepted by the simulate command."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    estimated: EstimatedParameters = Field(
        default_factory=lambda: ParameterBounds().initial_parameters()
    )
    fixed: FixedParameters = Field(default_factory=FixedParameters)
    Gb: float = Field(default=DEFAULT_BASAL_GLUCOSE, gt=0, description="Basal glucose [mg/dL]")


class RunManifest(BaseModel):
    """Provenance written next to every CLI output."""

    model_config = ConfigDict(frozen=True)

    command: str
    argv: list[str]
    config: dict[str, Any] = Field(default_factory=dict)
    inputs: list[str] = Field(default_factory=list)
    outputs: list[str] = Field(default_factory=list)
    tool_version: str
    seed: int | None = None
    duration_seconds: float = Field(ge=0.0)
    created_at: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))


class BenchmarkResult(BaseModel):
    """Result from benchmark testing."""

    model_config = ConfigDict(validate_assignment=True)

    test_name: str = Field(description="Name of the benchmark test")
    items_processed: int = Field(ge=0, description="Number of integrations or fits")
    time_seconds: float = Field(ge=0.0, description="Execution time in seconds")
    items_per_second: float = Field(ge=0.0, description="Processing rate")
    metadata: dict[str, str | int | float] = Field(
        default_factory=dict,
        description="Additional benchmark metadata",
    )

