"""divisorlab: a numerical laboratory for the divisor and circle problem
error terms, their truncated cosine expansions, moment asymptotics, and
square-root spacing counts."""

from .error_terms import (ErrorTermKind, PiecewiseErrorSegment, error_term,
                          delta_star_identity_residual, segments)
from .errors import (BudgetError, CapacityError, DegenerateFitError,
                     DivisorLabError, RangeError, TableFormatError,
                     TableKindMismatch)
from .sieves import (DivisorTable, TableKind, alternating_summatory_d,
                     load_table, save_table, sieve_divisors, sieve_r,
                     summatory_d, summatory_r)

__version__ = "0.1.0"

__all__ = [
    "BudgetError", "CapacityError", "DegenerateFitError", "DivisorLabError",
    "DivisorTable", "ErrorTermKind", "PiecewiseErrorSegment", "RangeError",
    "TableFormatError", "TableKind", "TableKindMismatch",
    "alternating_summatory_d", "delta_star_identity_residual", "error_term",
    "load_table", "save_table", "segments", "sieve_divisors", "sieve_r",
    "summatory_d", "summatory_r",
]
