"""Error sequences, per-step convergence rates, and step-weight diagnostics.

The per-step rate pairs consecutive errors through

    c_k = log|E_{k+1}| / log|E_k|,   E_k = x_k - root

which is independent of the log base.  Entries are valid only while both
errors sit strictly between round-off noise and 1; the asymptotic order is
the median of the last few valid entries (about 2.414 for the two-point
iteration on a simple root, 2 for Newton, 1.618 for secant).
"""

from __future__ import annotations

import math
import statistics
import sys
from dataclasses import dataclass

from .solvers import Method, Trace, ieee_div

__all__ = [
    "ConvergenceReport",
    "ErrorSequence",
    "ck_sequence",
    "error_sequence",
    "weight_sequence",
]

_ORDER_TAIL = 5
_FLOOR_FACTOR = 1e3 * sys.float_info.epsilon


@dataclass(frozen=True)
class ErrorSequence:
    reference_root: float
    errors: tuple[float, ...]


@dataclass(frozen=True)
class ConvergenceReport:
    ck: tuple[float, ...]  # NaN where the validity filter rejected the pair
    valid_mask: tuple[bool, ...]
    estimated_order: float | None  # present only with >= 3 valid entries
    tail_window: int


def error_sequence(trace: Trace, reference_root: float) -> ErrorSequence:
    if not math.isfinite(reference_root):
        raise ValueError("reference root must be finite")
    return ErrorSequence(reference_root, tuple(rec.x - reference_root for rec in trace.records))


def ck_sequence(errors: ErrorSequence) -> ConvergenceReport:
    """Per-step rates with a validity filter and a median tail estimate.

    Both errors of a pair must lie in (floor, 1), where the floor is
    1e3 * machine epsilon scaled by the root magnitude; outside that band
    the log ratio measures noise or flips sign.
    """
    errs = errors.errors
    if len(errs) < 2:
        raise ValueError("need at least two iterates to estimate rates")
    floor = _FLOOR_FACTOR * max(1.0, abs(errors.reference_root))
    ck: list[float] = []
    mask: list[bool] = []
    for ek, ek1 in zip(errs, errs[1:]):
        a, b = abs(ek), abs(ek1)
        if floor < a < 1.0 and floor < b < 1.0:
            ck.append(math.log(b) / math.log(a))
            mask.append(True)
        else:
            ck.append(math.nan)
            mask.append(False)
    valid = [c for c, ok in zip(ck, mask) if ok]
    if len(valid) >= 3:
        window = min(_ORDER_TAIL, len(valid))
        order = statistics.median(valid[-window:])
    else:
        window = 0
        order = None
    return ConvergenceReport(tuple(ck), tuple(mask), order, window)


def weight_sequence(trace: Trace) -> tuple[tuple[float, float, float], ...]:
    """Per-record (r, w_prev, w_cur) with w_prev = 1 - 1/r and w_cur = 1/r.

    r = +/-inf maps to weights (1, 0); records without an outgoing
    two-point step (r = NaN) are omitted.
    """
    if trace.method is not Method.TWO_POINT:
        raise ValueError(f"weights are defined for two-point traces, not {trace.method.value}")
    out = []
    for rec in trace.records:
        r = rec.r_weight
        if math.isnan(r):
            continue
        w_cur = ieee_div(1.0, r)
        out.append((r, 1.0 - w_cur, w_cur))
    return tuple(out)
