"""Bounded-memory streaming robustness monitor.

The monitor keeps one row per compiled subformula over a fixed window of
column offsets j in [-history, horizon], where column 0 is the current
step, negative columns are the stored past, and positive columns hold the
supplied predictions.  The history side is sized as horizon +
core_history so that everything the carry values summarize was computed
from actual samples; predicted values never survive into the past because
every column >= 0 is recomputed from scratch each step.

Each step:

1. for every unbounded-since row whose leftmost maintained column already
   holds a value, save that value into the row's carry slot (it is the
   running result of the recurrence one step further back),
2. shift the atom rows one column to the left, dropping the oldest
   column,
3. recompute every row bottom-up (operands live at larger indices):
   since rows left to right because their recurrence consumes the
   previous column, everything else right to left,
4. return the root row at column 0.

Columns whose absolute time i+j is negative are undefined.  Reads that
would land there resolve to the identity of the surrounding operation: a
since trigger read yields -inf (that window position does not exist, so
its disjunct must vanish), a since left-operand read yields +inf (it only
feeds already-vanished disjuncts), and the recurrence seed at "step -1"
is -inf (a maximum over nothing).  Carry slots start at -inf for the same
reason.  This makes warm-up steps agree exactly with evaluation on the
finite prefix.

Rows with large windows are filled through numpy kernels that compute the
same max-of-min network data-parallel; small rows use plain loops.  The
two paths produce bit-identical results (min/max select, they never
round), and the per-step work stays quadratic in the window either way.
"""

from __future__ import annotations

import math
from typing import Mapping, Sequence

import numpy as np

from .formula import ATOM, NOT, OR, SINCE, TRUE, UNTIL, Formula
from .semantics import (
    NEG_INF,
    POS_INF,
    Predicate,
    PredicateError,
    Rho,
    StateSample,
    signed_distance,
)

_BLOCK = 1 << 20      # elements per temporary kernel block
_VECTOR_CELLS = 4096  # windowed rows go through numpy above this many cell-ops
_VECTOR_WIDTH = 64    # elementwise rows go through numpy above this width


class _Row:
    __slots__ = ("kind", "left", "right", "lo", "up", "start", "pred", "unbounded", "vector", "dead")

    def __init__(self, kind, left, right, lo, up, start, pred, unbounded, vector, dead):
        self.kind = kind
        self.left = left
        self.right = right
        self.lo = lo
        self.up = up
        self.start = start
        self.pred = pred
        self.unbounded = unbounded
        self.vector = vector
        self.dead = dead


class Monitor:
    """Streaming evaluator for one compiled formula over one sample stream.

    Storage is fixed at construction: a node-count by (history+1+horizon)
    table plus one carry value per row; it never grows with the stream.
    step() is single-writer: do not call it concurrently on the same
    instance.  Independent monitors are fully isolated.
    """

    def __init__(
        self,
        formula: Formula,
        predicates: Mapping[str, Predicate],
        engine: str = "auto",
    ):
        if engine not in ("auto", "plain", "vector"):
            raise ValueError(f"unknown engine {engine!r}")
        missing = sorted(formula.atom_names - set(predicates))
        if missing:
            raise PredicateError("unbound atoms: " + ", ".join(missing))
        self.formula = formula
        self.horizon = formula.horizon
        self.history = formula.history
        self.width = self.history + 1 + self.horizon
        self.engine = engine
        self.table = np.full((len(formula.nodes), self.width), np.nan)
        self.carry = np.full(len(formula.nodes), NEG_INF)
        self.i = 0
        self._now = -1
        self._frontier: list[StateSample] = []
        self._var_cache: dict[str, np.ndarray] = {}
        self._rows = [self._plan(node, predicates) for node in formula.nodes]
        self._atom_rows = [k for k, r in enumerate(self._rows) if r.kind == ATOM]
        self._carry_rows = [k for k, r in enumerate(self._rows) if r.unbounded and not r.dead]

    def _plan(self, node, predicates) -> _Row:
        lo = node.interval.lower if node.interval is not None else 0
        up = node.interval.upper if node.interval is not None else 0
        unbounded = node.kind == SINCE and up == math.inf
        start = node.history - self.history
        dead = start > self.horizon
        pred = predicates[node.name] if node.kind == ATOM else None
        if self.engine == "plain":
            vector = False
        elif node.kind == SINCE and unbounded:
            vector = False  # the recurrence is inherently sequential
        elif node.kind in (UNTIL, SINCE):
            window = int(up) - lo + 1
            vector = self.engine == "vector" or self.width * window >= _VECTOR_CELLS
        else:
            vector = self.engine == "vector" or self.width >= _VECTOR_WIDTH
        return _Row(node.kind, node.left, node.right, lo, up, start, pred, unbounded, vector, dead)

    def step(self, sample: StateSample, predictions: Sequence[StateSample] = ()) -> Rho:
        """Consume the current sample plus horizon predicted samples and
        return the robustness of the specification at this step."""
        predictions = list(predictions)
        if len(predictions) != self.horizon:
            raise ValueError(
                f"prediction length mismatch: formula horizon is {self.horizon}, "
                f"got {len(predictions)} samples"
            )
        i = self.i
        self._now = i
        self._frontier = [sample, *predictions]
        self._var_cache = {}
        T = self.table
        off = self.history
        for k in self._carry_rows:
            start = self._rows[k].start
            if i - 1 + start >= 0:
                self.carry[k] = T[k, start + off]
        if off > 0:
            for k in self._atom_rows:
                T[k, :off] = T[k, 1 : off + 1]
        for k in range(len(self._rows) - 1, -1, -1):
            self._fill_row(k)
        self.i = i + 1
        return float(T[0, off])

    def cell(self, k: int, j: int) -> Rho | None:
        """Stored value of subformula k at column j, or None where the
        column precedes the stream or history the row does not maintain."""
        if not -self.history <= j <= self.horizon:
            raise IndexError(f"column {j} outside [-{self.history}, {self.horizon}]")
        row = self._rows[k]
        if row.dead or j < row.start or self._now + j < 0:
            return None
        return float(self.table[k, j + self.history])

    # ------------------------------------------------------------------
    # Row updates

    def _fill_row(self, k: int) -> None:
        row = self._rows[k]
        if row.dead:
            return
        jlo = max(row.start, -self._now)
        if jlo > self.horizon:
            return
        T = self.table
        off = self.history
        if row.kind == ATOM:
            if row.vector:
                xs = self._var_values(row.pred.variable)
                d = np.minimum(xs - row.pred.lo, row.pred.hi - xs)
                if row.pred.gain != 1.0:
                    np.multiply(row.pred.gain, d, out=d)
                T[k, off:] = d
            else:
                for j in range(0, self.horizon + 1):
                    T[k, j + off] = signed_distance(self._frontier[j], row.pred)
            return
        if row.vector:
            a = jlo + off
            if row.kind == TRUE:
                T[k, a:] = POS_INF
            elif row.kind == NOT:
                np.negative(T[row.left, a:], out=T[k, a:])
            elif row.kind == OR:
                np.maximum(T[row.left, a:], T[row.right, a:], out=T[k, a:])
            elif row.kind == UNTIL:
                self._fill_until_vector(k, row, jlo)
            else:
                self._fill_since_vector(k, row, jlo)
            return
        if row.kind == SINCE:
            for j in range(jlo, self.horizon + 1):
                T[k, j + off] = self.cr(k, j)
        else:
            for j in range(self.horizon, jlo - 1, -1):
                T[k, j + off] = self.cr(k, j)

    def cr(self, k: int, j: int) -> Rho:
        """Value of row k at column j, recomputed from the operand rows.

        One cell of the table update; exposed so single cells can be
        inspected and tested.  Only meaningful on columns the update would
        visit (operand rows filled, absolute time i+j nonnegative).
        """
        row = self._rows[k]
        T = self.table
        off = self.history
        kind = row.kind
        if kind == TRUE:
            return POS_INF
        if kind == ATOM:
            if j >= 0:
                return signed_distance(self._frontier[j], row.pred)
            return float(T[k, j + off])  # shifted history cell
        if kind == NOT:
            return -float(T[row.left, j + off])
        if kind == OR:
            return float(max(T[row.left, j + off], T[row.right, j + off]))
        m, n = row.left, row.right
        lo = row.lo
        if kind == UNTIL:
            if j + lo > self.horizon:
                return NEG_INF
            tmp = POS_INF
            for jp in range(j, j + lo):
                tmp = min(tmp, float(T[m, jp + off]))
            acc = NEG_INF
            for jp in range(j + lo, min(self.horizon, j + int(row.up)) + 1):
                acc = max(acc, min(tmp, float(T[n, jp + off])))
                tmp = min(tmp, float(T[m, jp + off]))
            return acc
        # since
        tmp = POS_INF
        for jp in range(j - lo + 1, j + 1):
            tmp = min(tmp, self._past(m, jp, POS_INF))
        if row.unbounded:
            if j == row.start:
                prev = float(self.carry[k])
            else:
                prev = self._past(k, j - 1, NEG_INF)
            head = min(prev, float(T[m, j + off]))
            return max(min(self._past(n, j - lo, NEG_INF), tmp), head)
        up = int(row.up)
        acc = NEG_INF
        for jp in range(j - lo, j - up - 1, -1):
            acc = max(acc, min(tmp, self._past(n, jp, NEG_INF)))
            if jp > j - up:  # the extension after the last disjunct is unused
                tmp = min(tmp, self._past(m, jp, POS_INF))
        return acc

    def _past(self, row: int, j: int, undefined: Rho) -> Rho:
        if self._now + j < 0:
            return undefined
        return float(self.table[row, j + self.history])

    def _var_values(self, var: str) -> np.ndarray:
        arr = self._var_cache.get(var)
        if arr is None:
            try:
                arr = np.array([s.values[var] for s in self._frontier], dtype=float)
            except KeyError:
                raise KeyError(f"unknown variable {var!r} in input samples") from None
            self._var_cache[var] = arr
        return arr

    def _fill_until_vector(self, k: int, row: _Row, jlo: int) -> None:
        T = self.table
        off = self.history
        hrz = self.horizon
        m, n, lo = row.left, row.right, row.lo
        up = int(row.up)
        count = hrz - jlo + 1
        a = jlo + off
        if up == 0:
            np.copyto(T[k, a:], T[n, a:])
            return
        # operand views padded past the horizon: missing trigger positions
        # contribute -inf disjuncts, missing left positions are neutral
        em = np.full(count + up - 1, POS_INF)
        em[:count] = T[m, a:]
        en = np.full(count + up - lo, NEG_INF)
        if count > lo:
            en[: count - lo] = T[n, a + lo :]
        T[k, a:] = _max_min_window(em, en, lo, up, count)

    def _fill_since_vector(self, k: int, row: _Row, jlo: int) -> None:
        T = self.table
        off = self.history
        hrz = self.horizon
        i = self._now
        m, n, lo = row.left, row.right, row.lo
        up = int(row.up)
        count = hrz - jlo + 1
        a = jlo + off
        if up == 0:
            np.copyto(T[k, a:], T[n, a:])
            return
        # mirror the window into the shared forward kernel; reads from
        # before the stream start take the same identities as in cr()
        xm = np.arange(hrz, jlo - up, -1)
        base_m = T[m, (jlo - up + 1) + off : hrz + off + 1][::-1]
        fm = np.where(xm < -i, POS_INF, base_m)
        xn = np.arange(hrz - lo, jlo - up - 1, -1)
        base_n = T[n, (jlo - up) + off : (hrz - lo) + off + 1][::-1]
        fn = np.where(xn < -i, NEG_INF, base_n)
        T[k, a:] = _max_min_window(fm, fn, lo, up, count)[::-1]


def _max_min_window(em: np.ndarray, en: np.ndarray, lo: int, up: int, count: int) -> np.ndarray:
    """out[r] = max over w in [lo, up] of min(en[r + w - lo], pmin(em, r, w))

    where pmin(em, r, 0) = +inf and pmin(em, r, w) = min(em[r : r + w]).
    Requires up >= 1, len(em) = count + up - 1, len(en) = count + up - lo.
    Processes row blocks so temporaries stay small.
    """
    out = np.empty(count)
    vm = np.lib.stride_tricks.sliding_window_view(em, up)
    vn = np.lib.stride_tricks.sliding_window_view(en, up - lo + 1)
    rows = max(1, _BLOCK // up)
    for r0 in range(0, count, rows):
        r1 = min(count, r0 + rows)
        c = np.minimum.accumulate(vm[r0:r1], axis=1)
        if lo == 0:
            d = np.empty((r1 - r0, up + 1))
            d[:, 0] = POS_INF
            d[:, 1:] = c
        else:
            d = c[:, lo - 1 : up]
        np.minimum(d, vn[r0:r1], out=d)
        np.max(d, axis=1, out=out[r0:r1])
    return out
