"""Exception types shared across the package.

The CLI maps these onto process exit codes: DataError -> 2,
SolverFailure -> 3, anything argument-shaped -> 1.
"""


class LupiError(Exception):
    """Base class for package errors."""


class DataError(LupiError):
    """Malformed or inconsistent input data (files, labels, shapes)."""


class SolverFailure(LupiError):
    """An optimizer declared the problem infeasible or unusable."""


class DegenerateRanksError(LupiError):
    """Rank correlation is undefined because one input is constant."""
