"""Computable measure theory on replayable token streams.

Measurable sets are named by streams of rational bounds on mu(R n A) for the
elements R of a countable ring; the modules translate between such names,
build Cauchy names for two metrics, and run the complementation reductions
relative to supplied oracles.
"""

from .kernel import (
    BudgetExhausted,
    ConfigError,
    DomainError,
    InconsistentNames,
    InsufficientPrecision,
    NameStream,
    PreconditionError,
    UnsupportedOperation,
)
from .measure import (
    ComputableMeasure,
    geometric_measure,
    lebesgue_measure,
    measure_by_name,
    nat3_measure,
    nat3_probability,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetExhausted",
    "ComputableMeasure",
    "ConfigError",
    "DomainError",
    "InconsistentNames",
    "InsufficientPrecision",
    "NameStream",
    "PreconditionError",
    "UnsupportedOperation",
    "geometric_measure",
    "lebesgue_measure",
    "measure_by_name",
    "nat3_measure",
    "nat3_probability",
]
