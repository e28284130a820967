"""Newton, secant, and two-point Newton iterations with full trace recording.

The two-point step combines the previous two iterates with the current
derivative through the weight

    r = 1 - (y_cur/y_prev) * (((y_cur - y_prev)/(x_cur - x_prev)) / dy_cur)
    x_next = x_prev - (x_prev - x_cur) / r
           = (1 - 1/r) * x_prev + (1/r) * x_cur

computed under IEEE semantics, so a vanishing derivative gives r = +/-inf
and the step keeps x_prev (weight 0 on the current point), while y_cur = 0
gives r = 1 and the step is a fixed point at the root.  Every run ends in a
classified :class:`Outcome`: converged, diverged, oscillating, domain
failure, derivative stall, or iteration budget exhausted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Sequence, Union

from .expressions import DomainError, Dual, Expression, eval_dual

__all__ = [
    "Converged",
    "CoincidentPointsError",
    "DegenerateSlopeError",
    "DerivativeStall",
    "Diverged",
    "DomainFailure",
    "GuardedNewton",
    "IterationRecord",
    "MaxIterationsExceeded",
    "Method",
    "Oscillating",
    "Outcome",
    "Perturb",
    "PrevPointIsRootError",
    "SeedingError",
    "SolverConfig",
    "Trace",
    "classify",
    "ieee_div",
    "newton_step",
    "secant_step",
    "seed_second_point",
    "solve",
    "twopoint_step",
]

_NAN = math.nan

DEFAULT_DELTA_REL = 1e-4
DEFAULT_SEP_EPSILON = 1e-300


class Method(Enum):
    NEWTON = "newton"
    SECANT = "secant"
    TWO_POINT = "twopoint"


@dataclass(frozen=True)
class Perturb:
    """Seed the second point at ``x0 + delta_rel * max(1, |x0|)``."""

    delta_rel: float = DEFAULT_DELTA_REL


@dataclass(frozen=True)
class GuardedNewton:
    """Seed with a Newton step from x0, halving it until it stays in-domain."""

    max_halvings: int = 40


SeedStrategy = Union[Perturb, GuardedNewton]


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-15
    max_iter: int = 1000
    divergence_bound: float = 1e12
    seed_strategy: SeedStrategy = Perturb()
    sep_epsilon: float = DEFAULT_SEP_EPSILON
    cycle_period_max: int = 4
    cycle_tol_rel: float = 1e-9
    cycle_min_iters: int = 20

    def __post_init__(self):
        if not (math.isfinite(self.tol) and self.tol > 0.0):
            raise ValueError("tol must be finite and positive")
        if self.max_iter < 2:
            raise ValueError("max_iter must be at least 2")
        if not (math.isfinite(self.divergence_bound) and self.divergence_bound > 1.0):
            raise ValueError("divergence_bound must be finite and > 1")
        for name in ("sep_epsilon", "cycle_tol_rel"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise ValueError(f"{name} must be finite and positive")

    def nudge_delta(self) -> float:
        strat = self.seed_strategy
        return strat.delta_rel if isinstance(strat, Perturb) else DEFAULT_DELTA_REL


@dataclass(frozen=True)
class IterationRecord:
    k: int
    x: float
    y: float
    dy: float  # NaN for secant, which never consumes derivatives
    r_weight: float  # two-point weight of the step taken *from* this record


@dataclass(frozen=True)
class Converged:
    root: float
    iterations: int
    label = "converged"


@dataclass(frozen=True)
class Diverged:
    last_x: float
    label = "diverged"


@dataclass(frozen=True)
class Oscillating:
    period: int
    label = "oscillating"


@dataclass(frozen=True)
class DomainFailure:
    iteration: int  # 1-based index of the step that could not be taken
    detail: str
    label = "domain-failure"


@dataclass(frozen=True)
class DerivativeStall:
    iteration: int
    label = "derivative-stall"


@dataclass(frozen=True)
class MaxIterationsExceeded:
    last_x: float
    label = "max-iterations"


Outcome = Union[Converged, Diverged, Oscillating, DomainFailure, DerivativeStall, MaxIterationsExceeded]


@dataclass(frozen=True)
class Trace:
    method: Method
    records: tuple[IterationRecord, ...]
    outcome: Outcome
    config: SolverConfig

    @property
    def iterations(self) -> int:
        """Step-formula applications performed (seed points are not steps)."""
        last = self.records[-1].k
        return last if self.method is Method.NEWTON else max(last - 1, 0)


class SeedingError(ValueError):
    """Both seeding strategies produced out-of-domain second points."""


class StepError(ValueError):
    pass


class DegenerateSlopeError(StepError):
    """Secant slope undefined: equal ordinates or coincident points."""


class CoincidentPointsError(StepError):
    """Two-point step needs |x_cur - x_prev| >= sep_epsilon."""


class PrevPointIsRootError(StepError):
    """Two-point step needs y_prev != 0."""


def ieee_div(num: float, den: float) -> float:
    """Division with IEEE-754 semantics: finite/0 is signed inf, 0/0 is NaN."""
    try:
        return num / den
    except ZeroDivisionError:
        if num == 0.0 or math.isnan(num):
            return _NAN
        return math.copysign(math.inf, num) * math.copysign(1.0, den)


def newton_step(x: float, y: float, dy: float) -> float:
    """x - y/dy; the root is a fixed point, dy = 0 with y != 0 gives +/-inf."""
    if y == 0.0:
        return x
    return x - ieee_div(y, dy)


def secant_step(
    x_prev: float, y_prev: float, x_cur: float, y_cur: float, sep_epsilon: float = DEFAULT_SEP_EPSILON
) -> float:
    if abs(x_cur - x_prev) < sep_epsilon or y_cur == y_prev:
        raise DegenerateSlopeError(f"secant slope degenerate between x={x_prev!r} and x={x_cur!r}")
    return x_cur - y_cur * (x_cur - x_prev) / (y_cur - y_prev)


def twopoint_step(
    x_prev: float,
    y_prev: float,
    x_cur: float,
    y_cur: float,
    dy_cur: float,
    sep_epsilon: float = DEFAULT_SEP_EPSILON,
) -> tuple[float, float]:
    """One two-point update; returns (x_next, r).

    dy_cur may be 0 or infinite: r then lands on +/-inf or 1 and the step
    degenerates gracefully to x_prev or x_cur per the weight identity.
    """
    if y_prev == 0.0:
        raise PrevPointIsRootError(f"previous ordinate is zero at x={x_prev!r}")
    if abs(x_cur - x_prev) < sep_epsilon:
        raise CoincidentPointsError(f"points x={x_prev!r} and x={x_cur!r} coincide")
    if y_cur == 0.0:
        return x_cur, 1.0
    slope = (y_cur - y_prev) / (x_cur - x_prev)
    r = 1.0 - (y_cur / y_prev) * ieee_div(slope, dy_cur)
    return x_prev - ieee_div(x_prev - x_cur, r), r


def _eval_ok(expr: Expression, x: float) -> bool:
    if not math.isfinite(x):
        return False
    try:
        eval_dual(expr, x)
    except DomainError:
        return False
    return True


def seed_second_point(expr: Expression, x0: float, config: SolverConfig | None = None) -> float:
    """Pick the second starting point for the two-seed methods."""
    config = config or SolverConfig()
    strat = config.seed_strategy
    delta = DEFAULT_DELTA_REL
    if isinstance(strat, GuardedNewton):
        d0 = eval_dual(expr, x0)
        if d0.deriv != 0.0 and math.isfinite(d0.deriv):
            step = ieee_div(d0.value, d0.deriv)
            t = 1.0
            for _ in range(strat.max_halvings):
                cand = x0 - t * step
                if cand != x0 and _eval_ok(expr, cand):
                    return cand
                t *= 0.5
        # fall through to a plain perturbation
    else:
        delta = strat.delta_rel
    x1 = x0 + delta * max(1.0, abs(x0))
    if _eval_ok(expr, x1):
        return x1
    raise SeedingError(f"no in-domain second point near x0={x0!r}")


def _converged(records: Sequence[IterationRecord], tol: float) -> bool:
    rec = records[-1]
    if rec.y == 0.0:
        return True
    if len(records) < 2:
        return False
    return abs(rec.x - records[-2].x) + abs(rec.y) < tol


def _step_count(records: Sequence[IterationRecord], method: Method) -> int:
    last = records[-1].k
    return last if method is Method.NEWTON else max(last - 1, 0)


def classify(
    records: Sequence[IterationRecord],
    config: SolverConfig,
    method: Method,
    *,
    domain_error: DomainError | None = None,
    steps_exhausted: bool = False,
) -> Outcome | None:
    """Outcome of a partial trace, or None if the iteration should continue.

    Priority: convergence, domain failure, divergence, derivative stall
    (Newton only), oscillation, iteration budget.
    """
    rec = records[-1]
    if _converged(records, config.tol):
        return Converged(rec.x, _step_count(records, method))
    if domain_error is not None:
        return DomainFailure(rec.k + 1, str(domain_error))
    if not math.isfinite(rec.x) or abs(rec.x) > config.divergence_bound:
        return Diverged(rec.x)
    if method is Method.NEWTON and rec.dy == 0.0 and rec.y != 0.0:
        return DerivativeStall(rec.k + 1)
    osc = _oscillation(records, config)
    if osc is not None:
        return osc
    if steps_exhausted:
        return MaxIterationsExceeded(rec.x)
    return None


def _oscillation(records: Sequence[IterationRecord], config: SolverConfig) -> Oscillating | None:
    k = records[-1].k
    if k < config.cycle_min_iters:
        return None
    xs = [rec.x for rec in records]

    def ctol(x: float) -> float:
        return config.cycle_tol_rel * max(1.0, abs(x))

    # A genuine cycle keeps moving while near-repeating at lag p; requiring
    # a non-shrinking movement rejects slow (possibly sign-alternating)
    # convergence, whose lag-p differences also drop below any tolerance.
    move = abs(xs[-1] - xs[-2])
    if move <= ctol(xs[-1]):
        return None
    for p in range(2, config.cycle_period_max + 1):
        if k - p - 1 < 0:
            continue
        prior_move = abs(xs[-1 - p] - xs[-2 - p])
        if move < 0.75 * prior_move:
            continue
        if abs(xs[-1] - xs[-1 - p]) <= ctol(xs[-1]) and abs(xs[-2] - xs[-2 - p]) <= ctol(xs[-2]):
            return Oscillating(p)
    return None


def solve(
    expr: Expression,
    method: Method,
    x0: float,
    config: SolverConfig | None = None,
    x1: float | None = None,
) -> Trace:
    """Iterate ``method`` from x0 (and x1 for the two-seed methods).

    Terminates as converged when |x_k - x_{k-1}| + |y_k| < tol, otherwise
    through :func:`classify`.  x1 is ignored for Newton and seeded per the
    configured strategy when absent.
    """
    config = config or SolverConfig()
    records: list[IterationRecord] = []

    def evaluate(x: float) -> Dual | DomainError:
        try:
            return eval_dual(expr, x)
        except DomainError as err:
            return err

    def append(k: int, x: float, d: Dual | None) -> None:
        if d is None:
            records.append(IterationRecord(k, x, _NAN, _NAN, _NAN))
        else:
            dy = d.deriv if method is not Method.SECANT else _NAN
            records.append(IterationRecord(k, x, d.value, dy, _NAN))

    def finish(outcome: Outcome) -> Trace:
        return Trace(method, tuple(records), outcome, config)

    d0 = evaluate(x0)
    if isinstance(d0, DomainError):
        append(0, x0, None)
        return finish(DomainFailure(1, str(d0)))
    append(0, x0, d0)
    outcome = classify(records, config, method)
    if outcome is not None:
        return finish(outcome)

    if method is not Method.NEWTON:
        if x1 is None:
            x1 = seed_second_point(expr, x0, config)
        elif x1 == x0:
            raise ValueError("x1 must differ from x0")
        d1 = evaluate(x1)
        if isinstance(d1, DomainError):
            append(1, x1, None)
            return finish(DomainFailure(2, str(d1)))
        append(1, x1, d1)
        outcome = classify(records, config, method)
        if outcome is not None:
            return finish(outcome)

    while outcome is None:
        cur = records[-1]
        if method is Method.NEWTON:
            x_next = newton_step(cur.x, cur.y, cur.dy)
        elif method is Method.SECANT:
            prev = records[-2]
            try:
                x_next = secant_step(prev.x, prev.y, cur.x, cur.y, config.sep_epsilon)
            except DegenerateSlopeError:
                return finish(DerivativeStall(cur.k + 1))
        else:
            prev = records[-2]
            if abs(cur.x - prev.x) < config.sep_epsilon:
                # degenerate-slope guard: substitute a Newton step
                x_next = newton_step(cur.x, cur.y, cur.dy)
            else:
                x_next, r = twopoint_step(prev.x, prev.y, cur.x, cur.y, cur.dy, config.sep_epsilon)
                records[-1] = replace(cur, r_weight=r)
            if x_next == prev.x:
                # an exact return to x_prev (the dy = 0 limit) would start a
                # 2-cycle; nudge to break it
                x_next = x_next + config.nudge_delta() * max(1.0, abs(x_next))
        k = cur.k + 1
        if not math.isfinite(x_next):
            append(k, x_next, None)
            outcome = classify(records, config, method)
            break
        d = evaluate(x_next)
        if isinstance(d, DomainError):
            append(k, x_next, None)
            outcome = classify(records, config, method, domain_error=d)
            break
        append(k, x_next, d)
        outcome = classify(
            records, config, method, steps_exhausted=_step_count(records, method) >= config.max_iter
        )
    assert outcome is not None
    return finish(outcome)
