"""Trace loading, predictor strategies, and synthetic scenario traces.

Trace CSV format: a ``time,var1,var2,...`` header, one row per sample,
decimal values, ``#`` starting a comment line.  The sampling period is
inferred from the first two rows and uniformity is enforced to a 1e-6
relative tolerance; configuring it separately would just invite mismatch
bugs.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .oracle import Trace
from .semantics import Rho, StateSample


class TraceError(ValueError):
    """Malformed or inconsistent trace data."""


class TraceExhausted(TraceError):
    """Perfect prediction requested past the end of the loaded trace."""


class ConfigError(ValueError):
    """Inconsistent run configuration."""


class PredictorMode(Enum):
    """Source of the future samples handed to the monitor each step."""

    HOLD = "hold"        # repeat the current sample (zero-order hold)
    PERFECT = "perfect"  # read the actual future from the loaded trace
    NONE = "none"        # no predictions; only valid for zero-horizon formulas


@dataclass
class RunConfig:
    """Everything one monitoring run needs; built by the command line."""

    formula_path: str
    predicates_path: str
    trace_path: str
    predictor: PredictorMode
    out_path: str
    time_units: str = "samples"
    fail_on_violation: bool = False


def load_trace(path: str) -> Trace:
    """Load and validate a trace CSV."""
    with open(path, newline="", encoding="utf-8") as fh:
        lines = [line for line in fh if line.strip() and not line.lstrip().startswith("#")]
    reader = csv.reader(lines)
    rows = list(reader)
    if not rows:
        raise TraceError("missing column: empty trace file")
    header = [cell.strip() for cell in rows[0]]
    if not header or header[0] != "time":
        raise TraceError("missing column: header must start with 'time'")
    variables = header[1:]
    samples = []
    for ridx, row in enumerate(rows[1:]):
        if len(row) != len(header):
            raise TraceError(f"missing column at row {ridx}: expected {len(header)} cells, got {len(row)}")
        values = {}
        parsed = []
        for name, cell in zip(header, row):
            try:
                value = float(cell)
            except ValueError:
                raise TraceError(f"non-numeric value {cell.strip()!r} at row {ridx}, column {name!r}") from None
            if not math.isfinite(value):
                raise TraceError(f"non-numeric value {cell.strip()!r} at row {ridx}, column {name!r}")
            parsed.append(value)
        for name, value in zip(variables, parsed[1:]):
            values[name] = value
        samples.append(StateSample(values, parsed[0]))
    delta_t = None
    if len(samples) >= 2:
        delta_t = samples[1].time - samples[0].time
        if delta_t <= 0:
            raise TraceError("non-uniform sampling at row 1: time stamps must increase")
        tol = 1e-6 * delta_t
        for k in range(2, len(samples)):
            if abs(samples[k].time - samples[k - 1].time - delta_t) > tol:
                raise TraceError(f"non-uniform sampling at row {k}")
    return Trace(tuple(samples), delta_t)


def predict(mode: PredictorMode, trace: Trace, i: int, horizon: int) -> list[StateSample]:
    """Future samples for step i: held, looked up, or none at all."""
    if mode is PredictorMode.NONE:
        if horizon > 0:
            raise ConfigError(
                f"predictor 'none' requires a zero-horizon formula, but the formula needs {horizon} future samples"
            )
        return []
    if mode is PredictorMode.HOLD:
        return [trace.samples[i]] * horizon
    if i + horizon >= len(trace.samples):
        raise TraceExhausted(f"trace exhausted: step {i} needs {horizon} future samples")
    return list(trace.samples[i + 1 : i + 1 + horizon])


def gen_case_study_trace(
    excursion_start: float,
    excursion_len: float,
    total: float,
    delta_t: float,
) -> Trace:
    """Synthetic normalized-ratio signal: baseline 1.0 with one rectangular
    excursion to 1.2 (outside the +/-10% band) over the given window."""
    if delta_t <= 0:
        raise ConfigError(f"sampling period must be positive, got {delta_t}")
    if total <= 0 or excursion_start < 0 or excursion_len < 0 or excursion_start + excursion_len > total:
        raise ConfigError(
            f"invalid scenario geometry: excursion [{excursion_start}, {excursion_start + excursion_len}] "
            f"must lie within [0, {total}]"
        )
    count = int(round(total / delta_t))
    eps = 1e-6 * delta_t
    samples = []
    for k in range(count + 1):
        t = k * delta_t
        out = excursion_start - eps <= t < excursion_start + excursion_len - eps
        samples.append(StateSample({"lambda": 1.2 if out else 1.0}, t))
    return Trace(tuple(samples), delta_t)


def write_robustness_csv(path: str, rows: Iterable[tuple[int, float, Rho]]) -> None:
    """Write monitor output rows as ``step,time,robustness``."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("step,time,robustness\n")
        for step, time, value in rows:
            fh.write(f"{step},{time!r},{value!r}\n")
