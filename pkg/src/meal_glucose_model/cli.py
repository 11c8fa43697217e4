# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Perday CatalogLAB™

"""Command-line interface for the meal glucose model."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any, Final, NoReturn

from pydantic import BaseModel, TypeAdapter
from pydantic import ValidationError as PydanticValidationError

from . import __version__
from .analysis import (
    assign_groups,
    assignments_frame,
    attach_peak,
    default_kabs_threshold,
    group_stats,
    group_values,
    parameter_correlations,
    parameter_summary,
    significance,
    summarize,
    trajectory_envelope,
)
from .dataset import load_corpus, load_subject
from .estimation import batch_fit, simulate_result
from .exceptions import (
    ConfigLoadError,
    DatasetError,
    NumericalError,
    StatisticsError,
    ValidationError,
)
from .files import atomic_write_json, atomic_write_text, load_json
from .integrator import simulate
from .models import (
    DEFAULT_TOL_G,
    GROUP_LABELS,
    OBSERVABLE_NAMES,
    CorpusIssue,
    DoseProfile,
    EstimationResult,
    FitConfig,
    FitFailure,
    FixedParameters,
    GroupAssignment,
    GroupStats,
    MetricSummary,
    ParameterSet,
    RunManifest,
    TimeGrid,
)
from .settings import load_parameter_set, parameter_schema, resolve_fit_config

logger = logging.getLogger(__name__)

EXIT_OK: Final[int] = 0
EXIT_VALIDATION: Final[int] = 1
EXIT_NUMERICAL: Final[int] = 2

METRIC_CHOICES: Final[tuple[str, ...]] = (
    "peak_time",
    "kabs",
    "kgri",
    "b",
    "G_bio",
    "G_peak",
    "t_bio",
    "iauc",
)
_METRIC_LABELS: Final[dict[str, str]] = {
    "peak_time": "peak time [min]",
    "kabs": "Kabs [1/min]",
    "kgri": "Kgri [1/min]",
    "b": "b [-]",
    "G_bio": "peak value [mg/dL]",
    "G_peak": "max glucose [mg/dL]",
    "t_bio": "t_bio [min]",
    "iauc": "iAUC [mg*min/dL]",
}

_RESULTS = TypeAdapter(list[EstimationResult])
_ASSIGNMENTS = TypeAdapter(list[GroupAssignment])


class _Run:
    """Provenance collected while a command executes."""

    def __init__(self, command: str, argv: Sequence[str], seed: int | None) -> None:
        self.command = command
        self.argv = list(argv)
        self.seed = seed
        self.config: dict[str, Any] = {}
        self.inputs: list[str] = []
        self.outputs: list[str] = []
        self._started = time.perf_counter()

    def output(self, path: Path) -> Path:
        self.outputs.append(str(path))
        return path

    def write_manifest(self, out: Path) -> Path:
        manifest = RunManifest(
            command=self.command,
            argv=self.argv,
            config=self.config,
            inputs=self.inputs,
            outputs=self.outputs,
            tool_version=__version__,
            seed=self.seed,
            duration_seconds=time.perf_counter() - self._started,
        )
        path = _sibling(out, "manifest.json")
        atomic_write_json(path, manifest)
        logger.info("Wrote manifest %s", path)
        return path


def _sibling(out: Path, suffix: str) -> Path:
    return out.with_name(f"{out.stem}.{suffix}")


def _dump(model: BaseModel) -> dict[str, Any]:
    return model.model_dump(mode="json")


def _load_list(path: str, adapter: TypeAdapter[Any], key: str | None = None) -> Any:
    data = load_json(path)
    try:
        payload = data[key] if key is not None else data
        return adapter.validate_python(payload)
    except (KeyError, TypeError) as exc:
        raise ConfigLoadError(path, f"missing '{key}' section") from exc
    except PydanticValidationError as exc:
        raise ConfigLoadError(path, f"invalid content: {exc.error_count()} error(s)") from exc


def _load_results(path: str) -> list[EstimationResult]:
    results: list[EstimationResult] = _load_list(path, _RESULTS)
    if not results:
        raise ValidationError("results", path, "file holds no estimation results")
    return results


def _fixed_parameters(params_path: str | None, run: _Run) -> FixedParameters:
    if params_path is None:
        return FixedParameters()
    run.inputs.append(params_path)
    return load_parameter_set(params_path).fixed


def _fit_config(args: argparse.Namespace, run: _Run) -> FitConfig:
    if args.config is not None:
        run.inputs.append(args.config)
    overrides = {
        "tol": getattr(args, "tol", None),
        "max_evals": getattr(args, "max_evals", None),
        "dt": args.dt,
        "penalty": getattr(args, "penalty", None),
        "optimizer": getattr(args, "optimizer", None),
        "restarts": getattr(args, "restarts", None),
        "basal_consistency": True if args.basal_consistency else None,
        "dose_mode": args.dose_mode,
    }
    return resolve_fit_config(args.config, overrides)


def _format_summary(summary: MetricSummary) -> str:
    if summary.mean is None:
        return "n/a"
    return f"{summary.mean:.4g} ± {summary.spread:.3g}"


def _print_group_table(rows: Sequence[GroupStats], metrics: Sequence[str]) -> None:
    header = f"{'group':<22}{'n':>4}  " + "".join(f"{_METRIC_LABELS[m]:<24}" for m in metrics)
    print(header)
    for row in rows:
        cells = "".join(f"{_format_summary(row.metrics[m]):<24}" for m in metrics)
        print(f"{row.group:<22}{row.n:>4}  {cells}")


# Commands


def _simulate_command(args: argparse.Namespace, run: _Run) -> int:
    if args.params is not None:
        run.inputs.append(args.params)
        params = load_parameter_set(args.params)
    else:
        params = ParameterSet()
    updates = {k: v for k, v in {"D": args.dose, "BW": args.bw}.items() if v is not None}
    fixed = FixedParameters.model_validate({**params.fixed.model_dump(), **updates})
    Gb = args.gb if args.gb is not None else params.Gb
    grid = TimeGrid(t0=0.0, t_end=args.horizon, dt=args.dt)
    dose = DoseProfile(
        mode=args.dose_mode or "instantaneous",
        amount=fixed.D,
        center=args.dose_center,
        width=args.dose_width,
    )
    traj = simulate(
        fixed,
        params.estimated,
        Gb,
        dose=dose,
        grid=grid,
        basal_consistency=args.basal_consistency,
        clamp_egp=args.clamp_egp,
    )
    out = run.output(Path(args.out))
    traj.write_csv(out)
    atomic_write_json(run.output(_sibling(out, "params.schema.json")), parameter_schema())
    run.config = {
        "estimated": _dump(params.estimated),
        "fixed": _dump(fixed),
        "Gb": Gb,
        "grid": _dump(grid),
        "dose": _dump(dose),
        "basal_consistency": args.basal_consistency,
        "clamp_egp": args.clamp_egp,
    }
    run.write_manifest(out)
    print(f"✅ Wrote {len(traj)} rows to {out}")
    return EXIT_OK


def _fit_command(args: argparse.Namespace, run: _Run) -> int:
    fixed = _fixed_parameters(args.params, run)
    config = _fit_config(args, run)
    issues: list[CorpusIssue] = []
    if args.dir is not None:
        run.inputs.append(args.dir)
        corpus = load_corpus(args.dir)
        subjects = list(corpus.subjects)
        issues = list(corpus.issues)
    else:
        run.inputs.append(args.subject)
        subjects = [load_subject(args.subject)]

    outcomes = batch_fit(subjects, fixed, config, parallelism=args.jobs) if subjects else []
    results = [o for o in outcomes if isinstance(o, EstimationResult)]
    failures = [o for o in outcomes if isinstance(o, FitFailure)]

    out = run.output(Path(args.out))
    atomic_write_json(out, results)
    atomic_write_json(run.output(_sibling(out, "schema.json")), _RESULTS.json_schema())
    if issues or failures:
        errors_path = run.output(_sibling(out, "errors.json"))
        atomic_write_json(errors_path, {"corpus_issues": issues, "fit_failures": failures})
    run.config = {"fixed": _dump(fixed), "fit": _dump(config), "jobs": args.jobs}
    run.write_manifest(out)

    print(f"✅ Fitted {len(results)} subject(s) -> {out}")
    for issue in issues:
        print(f"❌ {issue.path}: {issue.code}: {issue.message}")
    for failure in failures:
        print(f"❌ {failure.subject_id}: {failure.error}")

    if any(f.kind == "numerical" for f in failures):
        return EXIT_NUMERICAL
    if issues or failures:
        return EXIT_VALIDATION
    return EXIT_OK


def _classify_command(args: argparse.Namespace, run: _Run) -> int:
    run.inputs.append(args.results)
    results = _load_results(args.results)
    fixed = _fixed_parameters(args.params, run)
    config = _fit_config(args, run)

    trajectories = [simulate_result(r, fixed, config) for r in results]
    peaked = [attach_peak(r, t, args.tolg) for r, t in zip(results, trajectories)]
    threshold = (
        args.kabs_threshold if args.kabs_threshold is not None else default_kabs_threshold(peaked)
    )
    assignments = assign_groups(peaked, trajectories, args.tolg, threshold)
    summary = group_stats(assignments, ("peak_time", "kabs", "kgri"), spread=args.spread)
    split = group_stats(assignments, ("b", "G_bio"), spread=args.spread, split_peak_value=True)

    out = run.output(Path(args.out))
    atomic_write_json(
        out,
        {
            "tol_G": args.tolg,
            "kabs_threshold": threshold,
            "outliers_flagged": sum(a.outlier for a in assignments),
            "assignments": assignments,
            "summary": summary,
            "group1_split": split,
        },
    )
    csv_path = run.output(Path(args.csv) if args.csv else _sibling(out, "csv"))
    frame = assignments_frame(assignments)
    atomic_write_text(csv_path, frame.to_csv(index=False, lineterminator="\n"))
    run.config = {
        "fixed": _dump(fixed),
        "fit": _dump(config),
        "tol_G": args.tolg,
        "kabs_threshold": threshold,
    }
    run.write_manifest(out)

    counts = {label: sum(a.label == label for a in assignments) for label in GROUP_LABELS}
    print(f"✅ Classified {len(assignments)} subject(s): {counts}")
    flagged = sum(a.outlier for a in assignments)
    moved = sum(a.reclassified for a in assignments)
    print(f"   {flagged} outlier(s) flagged, {moved} reclassified (Kabs threshold {threshold:.4g})")
    _print_group_table(summary, ("peak_time", "kabs", "kgri"))
    return EXIT_OK


def _stats_command(args: argparse.Namespace, run: _Run) -> int:
    run.inputs.append(args.groups)
    assignments: list[GroupAssignment] = _load_list(args.groups, _ASSIGNMENTS, "assignments")
    rows = group_stats(
        assignments, (args.metric,), spread=args.spread, split_peak_value=args.split_peak_value
    )
    values = group_values(assignments, args.metric, split_peak_value=args.split_peak_value)
    populated = {name: v for name, v in values.items() if v}

    result = None
    note = ""
    try:
        result = significance(populated, metric=args.metric)
    except StatisticsError as exc:
        note = f"significance skipped: {exc}"
        logger.warning("%s", note)

    out = run.output(Path(args.out))
    atomic_write_json(
        out,
        {
            "metric": args.metric,
            "spread": args.spread,
            "stats": rows,
            "significance": result,
            "note": note,
        },
    )
    run.config = {"metric": args.metric, "spread": args.spread, "split": args.split_peak_value}
    run.write_manifest(out)

    _print_group_table(rows, (args.metric,))
    if result is not None:
        dfs = f"{result.df_between}, {result.df_within}"
        print(f"ANOVA F({dfs}) = {result.F:.6g}, p = {result.p:.3g}")
        for pair in result.pairwise:
            print(f"  {pair.group_a} vs {pair.group_b}: p_adj = {pair.p_adjusted:.3g} {pair.stars}")
    else:
        print(f"❌ {note}")
    return EXIT_OK


def _envelope_command(args: argparse.Namespace, run: _Run) -> int:
    run.inputs.append(args.results)
    results = _load_results(args.results)
    fixed = _fixed_parameters(args.params, run)
    config = _fit_config(args, run)
    trajectories = [simulate_result(r, fixed, config) for r in results]
    frame = trajectory_envelope(trajectories, args.names)

    out = run.output(Path(args.out))
    atomic_write_text(out, frame.to_csv(index=False, lineterminator="\n"))
    run.config = {"fixed": _dump(fixed), "fit": _dump(config), "names": list(args.names)}
    run.write_manifest(out)
    names = ", ".join(args.names)
    print(f"✅ Wrote mean ± SD of {names} over {len(results)} subject(s) to {out}")
    return EXIT_OK


def _summary_command(args: argparse.Namespace, run: _Run) -> int:
    run.inputs.append(args.results)
    results = _load_results(args.results)
    parameters = parameter_summary(results, spread=args.spread)
    document: dict[str, Any] = {
        "n": len(results),
        "spread": args.spread,
        "parameters": parameters,
        "loss": summarize([r.loss for r in results], args.spread),
    }
    if args.groups is not None:
        run.inputs.append(args.groups)
        assignments = _load_list(args.groups, _ASSIGNMENTS, "assignments")
        document["correlations"] = parameter_correlations(assignments)

    out = run.output(Path(args.out))
    atomic_write_json(out, document)
    run.config = {"spread": args.spread}
    run.write_manifest(out)

    print(f"{'parameter':<10}{'mean ± ' + args.spread:<28}")
    for name, summary in parameters.items():
        print(f"{name:<10}{_format_summary(summary):<28}")
    return EXIT_OK


def _replay_command(args: argparse.Namespace, run: _Run) -> int:
    try:
        manifest = RunManifest.model_validate(load_json(args.manifest))
    except PydanticValidationError as exc:
        raise ConfigLoadError(args.manifest, "not a run manifest") from exc
    if manifest.command == "replay":
        raise ValidationError("manifest", args.manifest, "cannot replay a replay")
    print(f"🔁 Replaying: {' '.join(manifest.argv)}")
    return run_cli(manifest.argv)


def _benchmark_command(args: argparse.Namespace, run: _Run) -> int:
    from .benchmarks import run_comprehensive_benchmark

    print("🚀 Running benchmark...")
    outcomes = run_comprehensive_benchmark(jobs=args.jobs)
    for outcome in outcomes:
        print(
            f"✅ {outcome.test_name}: {outcome.items_processed} in {outcome.time_seconds:.3f}s "
            f"({outcome.items_per_second:,.1f} / second)"
        )
    if args.out is not None:
        atomic_write_json(Path(args.out), outcomes)
    return EXIT_OK


# Parser


def _add_model_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--params", help="parameter set JSON (fixed section is used)")
    parser.add_argument("--config", help="fit configuration JSON")
    parser.add_argument("--dt", type=float, help="integration step [min]")
    parser.add_argument("--dose-mode", choices=("instantaneous", "gaussian"))
    parser.add_argument(
        "--basal-consistency", action="store_true", help="recompute Vm0 per subject"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meal-glucose-model",
        description="OGTT simulation, parameter estimation and peak-time analysis.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--log-level", default="WARNING", choices=("DEBUG", "INFO", "WARNING", "ERROR")
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="shorthand for INFO logs")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="recorded in the manifest; runs are deterministic")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="integrate one parameter set")
    p.add_argument("--params", help="parameter set JSON")
    p.add_argument("--dose", type=float, help="ingested glucose D [mg]")
    p.add_argument("--bw", type=float, help="body weight [kg]")
    p.add_argument("--gb", type=float, help="basal glucose [mg/dL]")
    p.add_argument("--horizon", type=float, default=120.0, help="end time [min]")
    p.add_argument("--dt", type=float, default=0.05, help="step [min]")
    p.add_argument("--dose-mode", choices=("instantaneous", "gaussian"))
    p.add_argument("--dose-center", type=float, default=7.5, help="Gaussian center [min]")
    p.add_argument("--dose-width", type=float, default=2.5, help="Gaussian width [min]")
    p.add_argument("--basal-consistency", action="store_true")
    p.add_argument("--clamp-egp", action="store_true", help="floor EGP at zero in the dynamics")
    p.add_argument("--out", required=True, help="trajectory CSV")
    p.set_defaults(handler=_simulate_command)

    p = sub.add_parser("fit", parents=[common], help="estimate θ per subject")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("subject", nargs="?", help="one subject CSV")
    source.add_argument("--dir", help="directory of subject CSVs")
    _add_model_options(p)
    p.add_argument("--tol", type=float)
    p.add_argument("--max-evals", type=int)
    p.add_argument("--penalty", type=float)
    p.add_argument("--optimizer", choices=("nelder-mead", "quasi-newton"))
    p.add_argument("--restarts", type=int)
    p.add_argument("--jobs", type=int, default=1, help="parallel fits")
    p.add_argument("--out", required=True, help="results JSON")
    p.set_defaults(handler=_fit_command)

    p = sub.add_parser("classify", parents=[common], help="group subjects by peak time")
    p.add_argument("results", help="results JSON from fit")
    _add_model_options(p)
    p.add_argument("--tolg", type=float, default=DEFAULT_TOL_G, help="tol_G [mg/dL]")
    p.add_argument("--kabs-threshold", type=float, help="outlier Kabs threshold [1/min]")
    p.add_argument("--spread", choices=("sd", "sem"), default="sd")
    p.add_argument("--out", required=True, help="groups JSON")
    p.add_argument("--csv", help="flat assignment CSV (default: next to --out)")
    p.set_defaults(handler=_classify_command)

    p = sub.add_parser("stats", parents=[common], help="group statistics and significance")
    p.add_argument("groups", help="groups JSON from classify")
    p.add_argument("--metric", choices=METRIC_CHOICES, default="peak_time")
    p.add_argument("--spread", choices=("sd", "sem"), default="sd")
    p.add_argument(
        "--split-peak-value", action="store_true", help="Group1 only, split at 155 mg/dL"
    )
    p.add_argument("--out", required=True, help="stats JSON")
    p.set_defaults(handler=_stats_command)

    p = sub.add_parser("envelope", parents=[common], help="mean ± SD curves of fitted subjects")
    p.add_argument("results", help="results JSON from fit")
    _add_model_options(p)
    p.add_argument(
        "--names",
        nargs="+",
        choices=OBSERVABLE_NAMES,
        default=["G", "I", "EGP", "Ra"],
        help="observables to aggregate",
    )
    p.add_argument("--out", required=True, help="envelope CSV")
    p.set_defaults(handler=_envelope_command)

    p = sub.add_parser("summary", parents=[common], help="corpus-wide parameter table")
    p.add_argument("results", help="results JSON from fit")
    p.add_argument("--groups", help="groups JSON for correlations")
    p.add_argument("--spread", choices=("sd", "sem"), default="sd")
    p.add_argument("--out", required=True, help="summary JSON")
    p.set_defaults(handler=_summary_command)

    p = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    p.add_argument("manifest")
    p.set_defaults(handler=_replay_command, seed=None)

    p = sub.add_parser("benchmark", help="desk-scale timings")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="benchmark JSON")
    p.set_defaults(handler=_benchmark_command, seed=None)
    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.INFO if args.verbose and args.log_level == "WARNING" else args.log_level
    logging.basicConfig(level=level, format="%(asctime)s - %(levelname)s - %(message)s")
    logging.getLogger("meal_glucose_model").setLevel(level)


def run_cli(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv`` and run one command; returns the process exit code."""
    arguments = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(arguments)
    _configure_logging(args)
    handler: Callable[[argparse.Namespace, _Run], int] = args.handler
    run = _Run(args.command, arguments, args.seed)
    try:
        return handler(args, run)
    except (ValidationError, ConfigLoadError, DatasetError) as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except PydanticValidationError as exc:
        print(f"❌ Invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"❌ Numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def main() -> NoReturn:
    """Main CLI entry point."""
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
