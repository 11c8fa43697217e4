# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Perday CatalogLAB™

"""Tests for the pydantic domain types."""

from __future__ import annotations

import numpy as np
import pytest
from meal_glucose_model.models import (
    OGTT_SAMPLE_TIMES,
    THETA_NAMES,
    EstimatedParameters,
    FitConfig,
    FixedParameters,
    ParameterBound,
    ParameterBounds,
    PeakInfo,
    SubjectRecord,
    TimeGrid,
    sample_problem,
)
from pydantic import ValidationError as PydanticValidationError


class TestFixedParameters:
    """Default constants and their constraints."""

    def test_defaults_match_reference_values(self):
        fixed = FixedParameters()
        assert fixed.VG == 1.88
        assert fixed.k1 == 0.065
        assert fixed.k2 == 0.079
        assert fixed.m1 == 0.190
        assert fixed.HEb == 0.6
        assert fixed.Vm0 == 2.50
        assert fixed.ke2 == 339.0
        assert fixed.D == 50000.0
        assert fixed.BW == 78.0

    @pytest.mark.parametrize(
        "field,value",
        [("HEb", 0.0), ("HEb", 1.0), ("f", 0.0), ("f", 1.5), ("VG", -1.0), ("BW", 0.0)],
    )
    def test_out_of_range_values_are_rejected(self, field, value):
        with pytest.raises(PydanticValidationError):
            FixedParameters(**{field: value})

    def test_zero_dose_is_allowed(self):
        assert FixedParameters(D=0.0).D == 0.0

    def test_unknown_field_is_rejected(self):
        with pytest.raises(PydanticValidationError):
            FixedParameters(Vm1=1.0)

    def test_frozen(self):
        fixed = FixedParameters()
        with pytest.raises(PydanticValidationError):
            fixed.VG = 2.0


class TestEstimatedParameters:
    def test_vector_follows_theta_order(self, theta):
        vector = theta.to_vector()
        assert vector.shape == (len(THETA_NAMES),)
        assert vector[THETA_NAMES.index("Kabs")] == theta.Kabs
        assert EstimatedParameters.from_vector(vector) == theta

    def test_kmin_must_be_below_kmax(self, theta):
        with pytest.raises(PydanticValidationError, match="Kmin"):
            EstimatedParameters.model_validate({**theta.model_dump(), "Kmin": 0.07})

    def test_d_must_be_below_b(self, theta):
        with pytest.raises(PydanticValidationError, match="must be below b"):
            EstimatedParameters.model_validate({**theta.model_dump(), "d": 0.9})

    def test_wrong_vector_length(self):
        with pytest.raises(ValueError, match="expected 11"):
            EstimatedParameters.from_vector(np.ones(10))


class TestParameterBounds:
    def test_ki_start_is_clamped_into_the_box(self):
        bounds = ParameterBounds()
        assert bounds.ki.initial == pytest.approx(1e-3)
        assert bounds.initial_parameters().ki == pytest.approx(1e-3)

    def test_initial_vector_inside_bounds(self):
        bounds = ParameterBounds()
        initial = bounds.initial_vector()
        assert np.all(bounds.lower_vector() <= initial)
        assert np.all(initial <= bounds.upper_vector())
        assert bounds.violations(bounds.initial_parameters()) == []

    def test_violations_names_offending_components(self, theta):
        outside = theta.model_copy(update={"Kabs": 0.5})
        assert ParameterBounds().violations(outside) == ["Kabs"]

    def test_lower_must_be_below_upper(self):
        with pytest.raises(PydanticValidationError):
            ParameterBound(lower=1.0, upper=1.0, initial=1.0)

    def test_initial_below_lower_is_raised_to_lower(self):
        assert ParameterBound(lower=0.1, upper=0.2, initial=0.0).initial == 0.1


class TestTimeGrid:
    @pytest.mark.parametrize("dt,points", [(0.05, 2401), (0.025, 4801), (0.1, 1201)])
    def test_point_count(self, dt, points):
        grid = TimeGrid(dt=dt)
        assert grid.n_points == points
        assert grid.times[0] == 0.0
        assert grid.times[-1] == pytest.approx(120.0)

    def test_span_must_be_positive(self):
        with pytest.raises(PydanticValidationError):
            TimeGrid(t0=10.0, t_end=10.0)

    def test_span_must_be_a_multiple_of_dt(self):
        with pytest.raises(PydanticValidationError, match="multiple"):
            TimeGrid(t_end=1.0, dt=0.3)


def test_fit_config_defaults():
    config = FitConfig()
    assert config.tol == 1e-10
    assert config.max_evals == 500 * len(THETA_NAMES) == 5500
    assert config.dt == 0.05
    assert config.penalty == 1e6
    assert config.optimizer == "nelder-mead"
    assert config.dose(FixedParameters(D=30000.0)).amount == 30000.0


class TestSubjectRecord:
    def test_valid_ogtt_record(self):
        values = [92, 130, 160, 150, 135, 120, 110, 100, 95]
        record = SubjectRecord(id="s1", samples=tuple(zip(OGTT_SAMPLE_TIMES, values)))
        assert record.Gb == 92
        assert len(record.times) == 9

    @pytest.mark.parametrize(
        "times,values,code",
        [
            ([15.0, 30.0], [100.0, 120.0], "missing_basal"),
            ([0.0, 15.0, 15.0, 30.0], [90.0, 100.0, 110.0, 120.0], "duplicate_time"),
            ([0.0, 30.0, 15.0], [90.0, 100.0, 110.0], "non_monotone_time"),
            ([0.0, 15.0], [90.0, 0.0], "non_positive_glucose"),
            ([0.0], [90.0], "too_few_samples"),
            ([0.0, float("nan")], [90.0, 100.0], "unparseable"),
        ],
    )
    def test_sample_rules(self, times, values, code):
        problem = sample_problem(times, values)
        assert problem is not None
        assert problem[0] == code
        with pytest.raises(PydanticValidationError, match=code):
            SubjectRecord(id="bad", samples=tuple(zip(times, values)))


def test_peak_info_rejects_biological_peak_after_peak():
    with pytest.raises(PydanticValidationError):
        PeakInfo(t_peak=20.0, G_peak=150.0, t_bio=25.0, G_bio=147.4)
