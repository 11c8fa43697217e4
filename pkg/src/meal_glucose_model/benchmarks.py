# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Perday CatalogLAB™

"""Desk-scale timings of integration, loss evaluation and batch fitting."""

from __future__ import annotations

import gc
import time

from .estimation import LossFunction, batch_fit
from .integrator import simulate
from .models import BenchmarkResult, FitConfig, FixedParameters, ParameterBounds
from .synthetic import synthetic_corpus


def run_integration_benchmark(num_runs: int = 200) -> BenchmarkResult:
    """
    Time full 0-120 min integrations at the default step.

    The first call compiles the kernels, so it runs before the clock starts.
    """
    fixed = FixedParameters()
    theta = ParameterBounds().initial_parameters()
    simulate(fixed, theta, 90.0)

    gc.collect()
    start_time = time.perf_counter()
    for _ in range(num_runs):
        simulate(fixed, theta, 90.0)
    time_seconds = time.perf_counter() - start_time

    rate = num_runs / time_seconds if time_seconds > 0 else 0.0
    print(f"BENCHMARK: {rate:,.1f} integrations / sec, {time_seconds:.3f}s total")
    return BenchmarkResult(
        test_name="integration",
        items_processed=num_runs,
        time_seconds=time_seconds,
        items_per_second=rate,
        metadata={"dt": 0.05, "t_end": 120.0},
    )


def run_loss_benchmark(num_evals: int = 1000) -> BenchmarkResult:
    """Time raw loss evaluations, the inner loop of every fit."""
    fixed = FixedParameters()
    config = FitConfig()
    subject = synthetic_corpus(1, seed=0)[0]
    objective = LossFunction(subject, fixed, config)
    vector = config.bounds.initial_vector()
    objective.evaluate(vector)

    gc.collect()
    start_time = time.perf_counter()
    for _ in range(num_evals):
        objective.evaluate(vector)
    time_seconds = time.perf_counter() - start_time

    rate = num_evals / time_seconds if time_seconds > 0 else 0.0
    return BenchmarkResult(
        test_name="loss_evaluation",
        items_processed=num_evals,
        time_seconds=time_seconds,
        items_per_second=rate,
        metadata={"max_evals_per_fit": config.max_evals},
    )


def run_batch_benchmark(
    num_subjects: int = 35, jobs: int = 1, max_evals: int | None = None, seed: int = 0
) -> BenchmarkResult:
    """Fit a synthetic corpus end to end."""
    fixed = FixedParameters()
    config = FitConfig() if max_evals is None else FitConfig(max_evals=max_evals)
    subjects = synthetic_corpus(num_subjects, seed=seed)

    gc.collect()
    start_time = time.perf_counter()
    outcomes = batch_fit(subjects, fixed, config, parallelism=jobs)
    time_seconds = time.perf_counter() - start_time

    failures = sum(1 for o in outcomes if not hasattr(o, "theta"))
    rate = num_subjects / time_seconds if time_seconds > 0 else 0.0
    return BenchmarkResult(
        test_name=f"batch_fit_jobs{jobs}",
        items_processed=num_subjects,
        time_seconds=time_seconds,
        items_per_second=rate,
        metadata={"jobs": jobs, "max_evals": config.max_evals, "failures": failures, "seed": seed},
    )


def run_comprehensive_benchmark(jobs: int = 1) -> list[BenchmarkResult]:
    """Integration, loss and a small batch fit."""
    return [
        run_integration_benchmark(),
        run_loss_benchmark(),
        run_batch_benchmark(num_subjects=4, jobs=jobs, max_evals=500),
    ]


if __name__ == "__main__":
    # CLI usage for CI / CD
    for outcome in run_comprehensive_benchmark():
        print(
            f"{outcome.test_name}: {outcome.items_processed} in {outcome.time_seconds:.3f}s "
            f"({outcome.items_per_second:,.1f} / second)"
        )
