"""CSV export of datasets, run traces and sweep tables.

All files use '.' decimals, LF line endings and a mandatory header row.
Floats are written with repr so they read back bit-identically.
"""
import csv
from typing import Iterable, List, Optional, Sequence

import numpy as np

from mixreg.numeric.data_generation.dataset import Dataset
from mixreg.numeric.em_ops.em_state import RunTrace
from mixreg.numeric.metrics.contraction_trace import contraction_trace
from mixreg.numeric.metrics.matched_error import cross_distances
from mixreg.numeric.mixture_model.mixture_params import MixtureParams

SWEEP_CSV_COLUMNS = (
    "axis",
    "value",
    "trial",
    "final_matched_error",
    "iterations",
    "degenerate_count",
)


def format_csv_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(file_name, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(file_name, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_csv_value(value) for value in row])


def dataset_csv_header(dim: int, with_labels: bool) -> List[str]:
    header = [f"x{m}" for m in range(dim)] + ["y"]
    if with_labels:
        header.append("label")
    return header


def write_dataset_csv(file_name, dataset: Dataset) -> None:
    """Write rows x0, ..., x{d-1}, y[, label]."""
    with_labels = dataset.labels is not None

    def _rows():
        for i in range(dataset.num_samples):
            row = list(dataset.design[i]) + [dataset.response[i]]
            if with_labels:
                row.append(dataset.labels[i])
            yield row

    write_csv(file_name, dataset_csv_header(dataset.dim, with_labels), _rows())


def read_dataset_csv(file_name, seed: int = 0) -> Dataset:
    """Read a dataset CSV with header x0, ..., x{d-1}, y[, label]."""
    with open(file_name, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{file_name} is empty, a header row is required")
        rows = [row for row in reader if row]
    with_labels = bool(header) and header[-1] == "label"
    dim = len(header) - (2 if with_labels else 1)
    if dim < 1 or header != dataset_csv_header(dim, with_labels):
        raise ValueError(
            f"{file_name} header must be x0,...,x{{d-1}},y[,label], got {header}"
        )
    if not rows:
        raise ValueError(f"{file_name} holds no samples")
    values = np.array(rows, dtype=np.float64)
    labels = values[:, dim + 1].astype(np.int64) if with_labels else None
    return Dataset(
        design=values[:, :dim], response=values[:, dim], labels=labels, seed=seed
    )


def trace_csv_header(dim: int, with_truth: bool) -> List[str]:
    header = ["iter", "component"] + [f"beta_{m}" for m in range(dim)] + ["pi"]
    if with_truth:
        header.append("matched_error")
    return header + ["degenerate_flag", "estimator"]


def write_trace_csv(
    file_name, trace: RunTrace, truth: Optional[MixtureParams] = None
) -> None:
    """One row per (iteration, component) of `trace`.

    With a truth, matched_error is the distance of the component to the true
    component it was matched with at iteration 0.
    """
    dim = trace.states[0].dim
    if truth is not None:
        # truth index matched to each estimate component
        permutation = contraction_trace(trace, truth).permutation
        matched_truth = np.argsort(permutation)

    def _rows():
        for iteration, state in enumerate(trace.states):
            if truth is not None:
                distances = cross_distances(state.betas, truth.betas)
            for j in range(state.num_components):
                row = [iteration, j] + list(state.betas[j]) + [state.weights[j]]
                if truth is not None:
                    row.append(distances[matched_truth[j], j])
                row += [bool(state.degenerate[j]), trace.estimator]
                yield row

    write_csv(file_name, trace_csv_header(dim, truth is not None), _rows())


def write_sweep_csv(file_name, rows: Iterable[Sequence]) -> None:
    """Long-format sweep table with SWEEP_CSV_COLUMNS."""
    write_csv(file_name, SWEEP_CSV_COLUMNS, rows)
