"""Subcommands gen, run, sweep and report."""
import json
import logging
from pathlib import Path
from typing import List, Sequence

import numpy as np

from mixreg import __version__
from mixreg.cli.scenario import ESTIMATORS, Scenario, ScenarioError
from mixreg.cli.trials import TOOL_NAME, run_trials, summarise_trials
from mixreg.numeric.data_generation.sample_dataset import sample_dataset
from mixreg.utils.IO import DatasetIO
from mixreg.utils.csv_io import write_dataset_csv, write_sweep_csv, write_trace_csv

logger = logging.getLogger(__name__)

SUMMARY_FILE_NAME = "summary.json"
SWEEP_CSV_FILE_NAME = "sweep.csv"
SWEEP_SUMMARY_FILE_NAME = "sweep_summary.json"
REPORT_REQUIRED_KEYS = (
    "tool",
    "version",
    "scenario_id",
    "estimator",
    "median_final_matched_error",
    "median_iterations",
    "condition_report",
)


def dump_json(file_name, document: dict) -> None:
    """Sorted keys, two-space indent and a trailing LF."""
    with open(file_name, "w", encoding="utf-8", newline="\n") as f:
        json.dump(document, f, sort_keys=True, indent=2)
        f.write("\n")


def cmd_gen(scenario: Scenario, out_path) -> str:
    """Write the trial-0 dataset of `scenario`, CSV when out_path ends in .csv.

    Returns the "n d k seed" line printed to standard output.
    """
    seed = scenario.dataset_seed(0)
    dataset = sample_dataset(scenario.truth, scenario.n, seed)
    out_path = Path(out_path)
    if out_path.parent != Path(""):
        out_path.parent.mkdir(parents=True, exist_ok=True)
    if out_path.suffix.lower() == ".csv":
        write_dataset_csv(out_path, dataset)
    else:
        DatasetIO().save(out_path, dataset)
    logger.info(f"wrote dataset to {out_path}")
    return (
        f"n={dataset.num_samples} d={dataset.dim} "
        f"k={scenario.truth.num_components} seed={seed}"
    )


def cmd_run(scenario: Scenario, out_dir, jobs: int = 1) -> dict:
    """Run all trials; write one trace CSV per trial and the summary JSON."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = run_trials(scenario, jobs=jobs)
    for result in results:
        write_trace_csv(
            out_dir / f"trace_trial_{result.trial:04d}.csv",
            result.trace,
            truth=scenario.truth,
        )
    summary = summarise_trials(scenario, results)
    dump_json(out_dir / SUMMARY_FILE_NAME, summary)
    logger.info(f"wrote {len(results)} traces and {SUMMARY_FILE_NAME} to {out_dir}")
    return summary


def fit_log_log_slope(values: Sequence[float], medians: Sequence[float]):
    """Least-squares slope of log(median) against log(value), None if undefined."""
    values = np.asarray(values, dtype=np.float64)
    medians = np.asarray(medians, dtype=np.float64)
    if values.size < 2 or np.any(medians <= 0.0) or not np.all(np.isfinite(medians)):
        return None
    slope, _ = np.polyfit(np.log(values), np.log(medians), 1)
    return float(slope)


def cmd_sweep(scenario: Scenario, out_dir, jobs: int = 1) -> dict:
    """cmd_run at every sweep value with shared seeds, plus the scaling fit."""
    if scenario.sweep is None:
        raise ScenarioError("sweep needs a scenario with a 'sweep' section")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    axis = scenario.sweep.axis
    rows = []
    medians = []
    for value in scenario.sweep.values:
        point = scenario.at_sweep_value(value)
        summary = cmd_run(point, out_dir / f"{axis}={value!r}", jobs=jobs)
        medians.append(summary["median_final_matched_error"])
        for trial in range(point.trials):
            rows.append(
                (
                    axis,
                    value,
                    trial,
                    summary["final_matched_error"][trial],
                    summary["iterations"][trial],
                    summary["degenerate_counts"][trial],
                )
            )
    write_sweep_csv(out_dir / SWEEP_CSV_FILE_NAME, rows)
    positive = [median for median in medians if median > 0.0]
    sweep_summary = {
        "tool": TOOL_NAME,
        "version": __version__,
        "scenario_id": scenario.name,
        "estimator": scenario.estimator,
        "scenario": scenario.document,
        "axis": axis,
        "values": list(scenario.sweep.values),
        "median_final_matched_error": medians,
        "log_log_slope": fit_log_log_slope(scenario.sweep.values, medians),
        "max_min_ratio": max(positive) / min(positive)
        if len(positive) == len(medians)
        else None,
    }
    dump_json(out_dir / SWEEP_SUMMARY_FILE_NAME, sweep_summary)
    logger.info(
        f"wrote {SWEEP_CSV_FILE_NAME} and {SWEEP_SUMMARY_FILE_NAME} to {out_dir}"
    )
    return sweep_summary


def load_summary(file_name) -> dict:
    with open(file_name, "r", encoding="utf-8") as f:
        try:
            summary = json.load(f)
        except json.JSONDecodeError as error:
            raise ScenarioError(f"{file_name} is not valid JSON: {error}") from error
    if not isinstance(summary, dict):
        raise ScenarioError(f"{file_name}: schema mismatch, expected a JSON object")
    missing = [key for key in REPORT_REQUIRED_KEYS if key not in summary]
    if missing or summary["tool"] != TOOL_NAME:
        raise ScenarioError(
            f"{file_name}: schema mismatch, missing keys {missing}"
            if missing
            else f"{file_name}: schema mismatch, not a {TOOL_NAME} summary"
        )
    if summary["estimator"] not in ESTIMATORS:
        raise ScenarioError(
            f"{file_name}: schema mismatch, unknown estimator {summary['estimator']!r}"
        )
    return summary


def _format_number(value) -> str:
    return f"{value:.6g}"


def cmd_report(summary_paths: List) -> str:
    """Markdown comparison table, one row per (scenario id, estimator).

    Rows are sorted by scenario id, then em-split, em-pooled, am.
    """
    if not summary_paths:
        raise ScenarioError("report needs at least one summary file")
    summaries = {}
    for path in summary_paths:
        summary = load_summary(path)
        key = (summary["scenario_id"], summary["estimator"])
        if key in summaries:
            logger.warning(
                f"duplicate summary for scenario '{key[0]}' ({key[1]}) in {path}, "
                f"keeping the first"
            )
            continue
        summaries[key] = summary

    lines = [
        "| scenario | estimator | median final D_m | median iterations | conditions |",
        "|---|---|---|---|---|",
    ]
    for key in sorted(summaries, key=lambda k: (k[0], ESTIMATORS.index(k[1]))):
        summary = summaries[key]
        lines.append(
            f"| {key[0]} | {key[1]} "
            f"| {_format_number(summary['median_final_matched_error'])} "
            f"| {_format_number(summary['median_iterations'])} "
            f"| {summary['condition_report']['verdict']} |"
        )
    return "\n".join(lines)
