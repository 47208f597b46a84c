from ._harmonic import (
    Domain,
    GridSpec,
    Nonlinearity,
    NumericalError,
    Problem,
    SolutionCurve,
    ValidationError,
    antimax,
    classify,
    count_solutions,
    fishing,
    solve_at,
    trace,
    turning_point,
)

__all__ = [
    "Domain",
    "GridSpec",
    "Nonlinearity",
    "NumericalError",
    "Problem",
    "SolutionCurve",
    "ValidationError",
    "antimax",
    "classify",
    "count_solutions",
    "fishing",
    "solve_at",
    "trace",
    "turning_point",
]
