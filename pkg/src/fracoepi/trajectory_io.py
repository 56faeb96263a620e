"""Trajectory CSV serialization.

Comma-separated, one header row, LF line endings, %.17g floats so a parsed
file reproduces the in-memory arrays bit-exactly.  Data files carry no
timestamps; identical runs yield byte-identical files.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .solver import Trajectory

__all__ = ["save_trajectory_csv", "load_trajectory_csv", "format_float"]

DEFAULT_COLUMNS = ("S", "I", "P")


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def save_trajectory_csv(
    traj: Trajectory, path: Path | str, columns: tuple[str, ...] = DEFAULT_COLUMNS
) -> Path:
    path = Path(path)
    dim = traj.states.shape[1]
    if len(columns) != dim:
        columns = tuple(f"x{i}" for i in range(dim))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t," + ",".join(columns) + "\n")
        for t, row in zip(traj.times, traj.states):
            fh.write(format_float(t) + "," + ",".join(format_float(v) for v in row) + "\n")
    return path


def load_trajectory_csv(path: Path | str, order: float = float("nan")) -> Trajectory:
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        rows = [[float(tok) for tok in line.strip().split(",")] for line in fh if line.strip()]
    data = np.array(rows)
    if data.ndim != 2 or data.shape[1] != len(header):
        raise ValueError(f"{path}: malformed trajectory CSV")
    times = data[:, 0].copy()
    states = data[:, 1:].copy()
    step = float(times[1] - times[0]) if len(times) > 1 else float("nan")
    return Trajectory(
        times=times,
        states=states,
        order=order,
        metadata={"step": step, "source": str(path)},
    )
