"""Extended-real robustness values and signed-distance predicates.

Robustness values live on the extended real line: ordinary floats plus
+inf and -inf.  NaN is never a valid value; trace loading rejects it at
the door.  Max and min over empty collections follow the lattice
conventions (max of nothing is -inf, min of nothing is +inf), which is
what makes empty temporal windows come out right.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping

Rho = float  # extended real; +inf and -inf are legal, NaN is not

POS_INF = math.inf
NEG_INF = -math.inf


def emax(values: Iterable[Rho]) -> Rho:
    """Maximum over extended reals; -inf for an empty collection."""
    best = NEG_INF
    for v in values:
        if v > best:
            best = v
    return best


def emin(values: Iterable[Rho]) -> Rho:
    """Minimum over extended reals; +inf for an empty collection."""
    best = POS_INF
    for v in values:
        if v < best:
            best = v
    return best


@dataclass(frozen=True)
class StateSample:
    """One observation: a map of variable values plus the sampling time."""

    values: Mapping[str, float]
    time: float = 0.0


class PredicateError(ValueError):
    """Bad predicate definition or predicate configuration text."""


@dataclass(frozen=True)
class Predicate:
    """Atomic proposition ``lo <= variable <= hi`` over one trace variable.

    Its robustness at a sample is the signed distance from the variable's
    value to the closed set [lo, hi]: positive inside, negative outside,
    zero exactly on the boundary.  One of the bounds may be infinite,
    giving the half-line forms ``variable <= hi`` and ``variable >= lo``.
    `gain` scales the distance, so predicates can be weighted without
    rewriting traces.
    """

    name: str
    variable: str
    lo: float = NEG_INF
    hi: float = POS_INF
    gain: float = 1.0

    def __post_init__(self) -> None:
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise PredicateError(f"{self.name}: NaN bound")
        if self.lo > self.hi:
            raise PredicateError(f"{self.name}: empty set, {self.lo} > {self.hi}")
        if self.lo == NEG_INF and self.hi == POS_INF:
            raise PredicateError(f"{self.name}: set must be bounded on at least one side")
        if not self.gain > 0:
            raise PredicateError(f"{self.name}: gain must be positive")


def signed_distance(sample: StateSample, predicate: Predicate) -> Rho:
    """Signed distance from the sample's value to the predicate's set."""
    try:
        x = sample.values[predicate.variable]
    except KeyError:
        raise KeyError(
            f"unknown variable {predicate.variable!r} in sample at t={sample.time}"
        ) from None
    return predicate.gain * min(x - predicate.lo, predicate.hi - x)


_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_ID = r"[A-Za-z_][A-Za-z0-9_]*"
_AT_MOST = re.compile(rf"^({_ID})\s*<=\s*({_NUM})$")
_AT_LEAST = re.compile(rf"^({_ID})\s*>=\s*({_NUM})$")
_BETWEEN = re.compile(rf"^({_NUM})\s*<=\s*({_ID})\s*<=\s*({_NUM})$")


def parse_predicates(text: str) -> dict[str, Predicate]:
    """Parse a predicate configuration, one binding per line.

    Accepted forms (``#`` starts a comment)::

        name : var <= c
        name : var >= c
        name : a <= var <= b
    """
    out: dict[str, Predicate] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise PredicateError(f"line {lineno}: expected 'name : constraint'")
        name, body = (part.strip() for part in line.split(":", 1))
        if not re.fullmatch(_ID, name):
            raise PredicateError(f"line {lineno}: bad predicate name {name!r}")
        if name in out:
            raise PredicateError(f"line {lineno}: duplicate predicate {name!r}")
        if m := _AT_MOST.match(body):
            pred = Predicate(name, m.group(1), hi=float(m.group(2)))
        elif m := _AT_LEAST.match(body):
            pred = Predicate(name, m.group(1), lo=float(m.group(2)))
        elif m := _BETWEEN.match(body):
            pred = Predicate(name, m.group(2), lo=float(m.group(1)), hi=float(m.group(3)))
        else:
            raise PredicateError(f"line {lineno}: cannot parse constraint {body!r}")
        out[name] = pred
    return out
