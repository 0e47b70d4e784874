"""Minimal dimension, alpha/beta invariants and base sizes of finite groups."""

from .errors import Budget, BudgetError, InputError, InternalCheckError, MindimError, ValidationError
from .permcore import (
    CosetAction,
    GeneratedGroup,
    Permutation,
    StabilizerChain,
    coset_action,
    is_primitive,
    orbit,
    stabilizer_chain,
)

__version__ = "0.1.0"

__all__ = [
    "Budget",
    "BudgetError",
    "CosetAction",
    "GeneratedGroup",
    "InputError",
    "InternalCheckError",
    "MindimError",
    "Permutation",
    "StabilizerChain",
    "ValidationError",
    "coset_action",
    "is_primitive",
    "orbit",
    "stabilizer_chain",
    "__version__",
]
