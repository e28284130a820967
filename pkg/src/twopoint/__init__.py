"""Scalar root finding built around a two-point Newton iteration.

The package bundles an expression parser with forward-mode automatic
differentiation, three iterative methods (Newton, secant, and the
two-point variant with super-quadratic convergence), trace analysis for
per-step convergence rates, a benchmark problem corpus, and a CLI.
"""

from .analysis import ConvergenceReport, ErrorSequence, ck_sequence, error_sequence, weight_sequence
from .corpus import (
    ExpectedResult,
    Problem,
    ProblemFileError,
    builtin_problems,
    find_problem,
    load_problems,
    table1_problems,
    table2_problems,
)
from .expressions import (
    BinOp,
    Call,
    Constant,
    DomainError,
    Dual,
    Expression,
    Neg,
    Number,
    ParseError,
    Variable,
    eval_dual,
    parse,
    render,
)
from .solvers import (
    CoincidentPointsError,
    Converged,
    DegenerateSlopeError,
    DerivativeStall,
    Diverged,
    DomainFailure,
    GuardedNewton,
    IterationRecord,
    MaxIterationsExceeded,
    Method,
    Oscillating,
    Outcome,
    Perturb,
    PrevPointIsRootError,
    SeedingError,
    SolverConfig,
    Trace,
    classify,
    newton_step,
    secant_step,
    seed_second_point,
    solve,
    twopoint_step,
)

__version__ = "0.1.0"
