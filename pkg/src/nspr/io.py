"""File output helpers: atomic writes and the run/suite file formats."""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .sampler import RunResult, equal_weight_samples


def atomic_write_text(path, text: str) -> None:
    """Write via a temp file in the same directory plus rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_csv(path, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_dead_points_csv(result: RunResult, path) -> None:
    header = ["iteration", "log_like", "log_weight"] + result.param_names
    rows = []
    for i in range(result.dead_log_like.size):
        rows.append([i + 1, result.dead_log_like[i], result.dead_log_weight[i]]
                    + list(result.dead_params[i]))
    write_csv(path, header, rows)


def write_equal_weights_csv(result: RunResult, path, count=None,
                            seed=0) -> None:
    samples = equal_weight_samples(result, count,
                                   np.random.default_rng(seed))
    write_csv(path, result.param_names, samples)


def write_summary_json(summary: dict, path) -> None:
    atomic_write_text(path, json.dumps(summary, indent=2, sort_keys=True) + "\n")


def json_safe(value):
    """Recursively convert numpy scalars/arrays for json.dumps."""
    if isinstance(value, dict):
        return {k: json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    if isinstance(value, np.ndarray):
        return [json_safe(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        v = float(value)
        return v if np.isfinite(v) else repr(v)
    if isinstance(value, np.integer):
        return int(value)
    return value
