# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Perday CatalogLAB™

"""Tests for the fixed-step RK4 integrator and trajectory export."""

from __future__ import annotations

import numpy as np
import pandas as pd
import pytest
from meal_glucose_model.exceptions import IntegrationError, ValidationError
from meal_glucose_model.integrator import (
    TRAJECTORY_COLUMNS,
    Trajectory,
    fit_grid,
    integrate,
    interpolate_on_grid,
    sample,
    simulate,
)
from meal_glucose_model.models import (
    OGTT_SAMPLE_TIMES,
    DoseProfile,
    EstimatedParameters,
    FixedParameters,
    ParameterBounds,
    TimeGrid,
)
from meal_glucose_model.physiology import derive_basal_state, initial_state
from meal_glucose_model.synthetic import curve_trajectory
from scipy.integrate import cumulative_trapezoid, trapezoid
from scipy.stats import norm


def _random_theta(rng: np.random.Generator) -> EstimatedParameters:
    bounds = ParameterBounds()
    return EstimatedParameters.from_vector(
        rng.uniform(bounds.lower_vector(), bounds.upper_vector())
    )


class TestIntegrate:
    def test_default_grid_has_2401_nodes(self, fixed, initial_theta):
        traj = simulate(fixed, initial_theta, 90.0)
        assert len(traj) == 2401
        assert traj.state_matrix.shape == (2401, 12)
        assert traj.observable_matrix.shape == (2401, 14)
        assert traj.times[-1] == pytest.approx(120.0)

    def test_first_state_is_the_initial_condition(self, fixed, theta):
        basal = derive_basal_state(fixed, theta, 90.0)
        dose = DoseProfile(amount=fixed.D)
        traj = integrate(fixed, theta, basal, dose, TimeGrid())
        np.testing.assert_array_equal(traj.state_matrix[0], initial_state(basal, dose))
        first = traj.states[0]
        assert first.Qsto1 == fixed.D
        assert first.Qsto2 == first.Qgut == first.X == first.Y == 0.0
        assert first.I1 == first.Id == basal.Ib

    def test_glucose_stays_basal_without_a_dose(self, fixed):
        rng = np.random.default_rng(3)
        for _ in range(20):
            theta = _random_theta(rng)
            traj = simulate(
                fixed, theta, 90.0, dose=DoseProfile(amount=0.0), basal_consistency=True
            )
            assert np.max(np.abs(traj.glucose - 90.0)) <= 1e-6

    def test_dose_raises_glucose(self, fixed, theta):
        traj = simulate(fixed, theta, 90.0)
        assert traj.glucose.max() > 120.0
        assert np.all(traj.observable("Ra") >= 0.0)

    def test_gut_chain_stays_nonnegative(self, fixed, theta):
        traj = simulate(fixed, theta, 90.0)
        for name in ("Qsto1", "Qsto2", "Qgut", "Gp", "Gt", "Il", "Ip", "Ipo"):
            assert np.all(traj.state(name) >= 0.0), name

    def test_bit_identical_reruns(self, fixed, theta):
        first = simulate(fixed, theta, 92.0)
        second = simulate(fixed, theta, 92.0)
        np.testing.assert_array_equal(first.state_matrix, second.state_matrix)
        np.testing.assert_array_equal(first.observable_matrix, second.observable_matrix)

    def test_arrays_are_read_only(self, fixed, theta):
        traj = simulate(fixed, theta, 90.0)
        with pytest.raises(ValueError):
            traj.state_matrix[0, 0] = 1.0

    def test_divergence_reports_the_time(self, fixed, theta):
        # an absurd insulin action rate overflows within the horizon
        exploding = theta.model_copy(update={"ki": 1e308})
        basal = derive_basal_state(fixed, theta, 90.0)
        with pytest.raises(IntegrationError) as excinfo:
            integrate(fixed, exploding, basal, DoseProfile(amount=fixed.D), TimeGrid())
        assert 0.0 < excinfo.value.time <= 120.0


class TestConvergence:
    """Accuracy of the fixed-step scheme."""

    def test_fourth_order_on_a_switch_free_window(self, fixed, theta):
        # glucose rises monotonically over the first minutes after the dose
        def run(dt: float) -> np.ndarray:
            return simulate(fixed, theta, 90.0, grid=TimeGrid(t_end=10.0, dt=dt)).state_matrix

        reference = run(0.0125)[::8]
        coarse = run(0.1)
        fine = run(0.05)[::2]
        coarse_error = np.max(np.abs(coarse - reference))
        fine_error = np.max(np.abs(fine - reference))
        assert 12.0 <= coarse_error / fine_error <= 20.0

    def test_sampled_glucose_is_stable_under_refinement(self, fixed, theta):
        default = sample(simulate(fixed, theta, 90.0), OGTT_SAMPLE_TIMES)
        halved = sample(simulate(fixed, theta, 90.0, grid=TimeGrid(dt=0.025)), OGTT_SAMPLE_TIMES)
        assert np.max(np.abs(np.subtract(default, halved))) < 1e-4

    def test_absorbed_mass_matches_the_dose(self, fixed):
        rng = np.random.default_rng(5)
        bounds = ParameterBounds()
        lower, upper = bounds.lower_vector(), bounds.upper_vector()
        # rates near their lower bounds would leave glucose unabsorbed at 600 min
        lower[0], lower[2], lower[3] = 0.015, 0.03, 0.02
        grid = TimeGrid(t_end=600.0)
        for _ in range(10):
            theta = EstimatedParameters.from_vector(rng.uniform(lower, upper))
            traj = simulate(fixed, theta, 90.0, grid=grid)
            absorbed = trapezoid(traj.observable("Ra"), traj.times)
            assert absorbed == pytest.approx(fixed.f * fixed.D / fixed.BW, rel=1e-2)

    def test_gaussian_dose_is_conserved(self, fixed, theta):
        dose = DoseProfile(mode="gaussian", amount=fixed.D)
        traj = simulate(fixed, theta, 90.0, dose=dose, grid=TimeGrid(t_end=60.0))
        assert traj.states[0].Qsto1 == 0.0
        held = traj.state("Qsto1") + traj.state("Qsto2") + traj.state("Qgut")
        absorbed = cumulative_trapezoid(theta.Kabs * traj.state("Qgut"), traj.times, initial=0.0)
        impulse = norm(loc=dose.center, scale=dose.width)
        ingested = fixed.D * (impulse.cdf(traj.times) - impulse.cdf(0.0)) / impulse.sf(0.0)
        np.testing.assert_allclose(held + absorbed, ingested, rtol=1e-3, atol=1.0)
        assert held[-1] + absorbed[-1] == pytest.approx(fixed.D, rel=1e-3)
        assert held[-1] > 0.0


class TestSample:
    def test_on_node_values_are_exact(self, fixed, theta):
        traj = simulate(fixed, theta, 90.0)
        values = sample(traj, [0.0, 15.0, 37.5])
        assert values[0] == traj.glucose[0]
        assert values[1] == traj.glucose[300]
        assert values[2] == traj.glucose[750]

    def test_midpoint_interpolation(self):
        grid = TimeGrid(t_end=1.0, dt=0.5)

        def ramp(t: np.ndarray) -> np.ndarray:
            return np.interp(t, [0.0, 0.5, 1.0], [100.0, 102.0, 104.0])

        traj = curve_trajectory(ramp, grid)
        assert sample(traj, [0.25]) == [pytest.approx(101.0)]

    def test_ogtt_grid_gives_nine_values(self, fixed, theta):
        assert len(sample(simulate(fixed, theta, 90.0), OGTT_SAMPLE_TIMES)) == 9

    @pytest.mark.parametrize("time", [-1.0, 120.5, float("nan")])
    def test_outside_the_horizon(self, fixed, theta, time):
        traj = simulate(fixed, theta, 90.0)
        with pytest.raises(ValidationError, match="outside the horizon"):
            sample(traj, [time])


def test_interpolate_on_grid_between_nodes():
    grid = TimeGrid(t_end=2.0, dt=1.0)
    values = np.array([0.0, 10.0, 30.0])
    out = interpolate_on_grid(values, grid, np.array([0.0, 0.5, 1.0, 1.75]))
    np.testing.assert_allclose(out, [0.0, 5.0, 10.0, 25.0])


@pytest.mark.parametrize(
    "times,dt,t_end",
    [([0.0, 15.0, 120.0], 0.05, 120.0), ([0.0, 10.0, 33.3], 0.1, 33.3), ([0.0, 0.01], 0.05, 0.05)],
)
def test_fit_grid_covers_the_samples(times, dt, t_end):
    grid = fit_grid(np.array(times), dt)
    assert grid.t0 == 0.0
    assert grid.t_end == pytest.approx(t_end)
    assert grid.t_end >= max(times) - 1e-9


class TestExport:
    def test_csv_header_and_rows(self, fixed, theta, tmp_path):
        traj = simulate(fixed, theta, 90.0)
        path = traj.write_csv(tmp_path / "trajectory.csv")
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == ",".join(TRAJECTORY_COLUMNS)
        assert len(lines) == 2402

    def test_csv_round_trips_full_precision(self, fixed, theta, tmp_path):
        traj = simulate(fixed, theta, 90.0)
        path = traj.write_csv(tmp_path / "trajectory.csv")
        frame = pd.read_csv(path, float_precision="round_trip")
        np.testing.assert_array_equal(frame["G"].to_numpy(), traj.glucose)
        np.testing.assert_array_equal(frame["Qgut"].to_numpy(), traj.state("Qgut"))

    def test_frame_columns(self, fixed, theta):
        frame = simulate(fixed, theta, 90.0).to_frame()
        assert tuple(frame.columns) == TRAJECTORY_COLUMNS

    def test_mismatched_arrays_are_rejected(self):
        grid = TimeGrid(t_end=1.0, dt=0.5)
        with pytest.raises(ValueError, match="grid point count"):
            Trajectory(
                grid=grid,
                times=grid.times,
                state_matrix=np.zeros((2, 12)),
                observable_matrix=np.zeros((3, 14)),
            )


def test_zero_dose_leaves_stomach_empty():
    fixed = FixedParameters(D=0.0)
    traj = simulate(fixed, ParameterBounds().initial_parameters(), 90.0)
    assert np.all(traj.observable("Qsto") == 0.0)
    assert np.all(traj.observable("Ra") == 0.0)
