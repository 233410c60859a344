"""Deterministic fidelity sweeps over (theta, e, d) grids.

Grid points are independent, so the engine may fan them out to a process
pool; results are sorted back into canonical (theta, e, d) order before
emission, which keeps the CSV byte-identical no matter how many workers ran.
The environment variable ``COHERE_QEC_THREADS`` caps the worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channels import depolarizing_error
from .codes import nine_qubit_protocol

__all__ = ["SweepConfig", "SweepRecord", "run_sweep", "emit_csv", "worker_count"]

THREADS_ENV_VAR = "COHERE_QEC_THREADS"
_DEFAULT_WORKERS = 4
# Process startup is not worth it for tiny grids.
_MIN_POINTS_FOR_POOL = 64


def _validate_grid(name: str, grid: Sequence[float], lo: float, hi: float) -> tuple[float, ...]:
    values = tuple(float(v) for v in grid)
    if not values:
        raise ValueError(f"{name} must not be empty")
    if any(b < a for a, b in zip(values, values[1:])):
        raise ValueError(f"{name} must be sorted ascending")
    eps = 1e-12
    for v in values:
        if not lo - eps <= v <= hi + eps:
            raise ValueError(f"{name} value {v!r} outside [{lo}, {hi}]")
    return values


@dataclass(frozen=True)
class SweepConfig:
    """A sweep of the nine-qubit protocol under averaged (or fixed-position)
    depolarizing noise."""

    theta_grid: tuple[float, ...]
    e_grid: tuple[float, ...]
    d_grid: tuple[float, ...]
    placement: int | None = None  # None = average over all nine positions
    output_path: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta_grid", _validate_grid("theta_grid", self.theta_grid, 0.0, np.pi))
        object.__setattr__(self, "e_grid", _validate_grid("e_grid", self.e_grid, 0.0, 1.0))
        object.__setattr__(self, "d_grid", _validate_grid("d_grid", self.d_grid, 0.0, 1.0))
        if self.placement is not None and not 1 <= self.placement <= 9:
            raise ValueError(f"placement {self.placement!r} is not a register position")

    @property
    def n_points(self) -> int:
        return len(self.theta_grid) * len(self.e_grid) * len(self.d_grid)


@dataclass(frozen=True)
class SweepRecord:
    theta: float
    e: float
    d: float
    fidelity: float

    def key(self) -> tuple[float, float, float]:
        return (self.theta, self.e, self.d)


def _evaluate_point(args: tuple[float, float, float, int | None]) -> SweepRecord:
    theta, e, d, placement = args
    fid = nine_qubit_protocol(theta, e, depolarizing_error(d, placement))
    return SweepRecord(theta, e, d, fid)


def worker_count(n_points: int) -> int:
    """Workers for a sweep: the CPU count capped at a small default, further
    capped by COHERE_QEC_THREADS when set."""
    raw = os.environ.get(THREADS_ENV_VAR)
    cpus = os.cpu_count() or 1
    workers = min(cpus, _DEFAULT_WORKERS)
    if raw is not None:
        try:
            cap = int(raw)
        except ValueError:
            raise ValueError(f"{THREADS_ENV_VAR}={raw!r} is not an integer") from None
        if cap < 1:
            raise ValueError(f"{THREADS_ENV_VAR} must be a positive integer, got {cap}")
        workers = min(workers, cap)
    return max(1, min(workers, n_points))


def run_sweep(config: SweepConfig) -> list[SweepRecord]:
    """One record per grid point, in (theta, e, d) lexicographic order.

    Reruns of the same config produce bit-identical results; per-point
    arithmetic does not depend on the worker pool layout.
    """
    points = [
        (theta, e, d, config.placement)
        for theta in config.theta_grid
        for e in config.e_grid
        for d in config.d_grid
    ]
    workers = worker_count(len(points))
    if workers == 1 or len(points) < _MIN_POINTS_FOR_POOL:
        records = [_evaluate_point(p) for p in points]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunk = max(1, len(points) // (workers * 4))
            records = list(pool.map(_evaluate_point, points, chunksize=chunk))
    records.sort(key=SweepRecord.key)
    return records


def emit_csv(records: Sequence[SweepRecord], path: str) -> None:
    """Write ``theta,e,d,fidelity`` rows, floats at 12 significant digits.

    Records must already be in canonical (theta, e, d) order.
    """
    if not records:
        raise ValueError("no records to emit")
    keys = [r.key() for r in records]
    if any(b < a for a, b in zip(keys, keys[1:])):
        raise ValueError("records are not in canonical (theta, e, d) order")
    lines = ["theta,e,d,fidelity"]
    for r in records:
        lines.append(
            f"{r.theta:.12g},{r.e:.12g},{r.d:.12g},{r.fidelity:.12g}"
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
