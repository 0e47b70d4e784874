"""Exception types and resource budgets shared across the package."""

from __future__ import annotations

from dataclasses import dataclass


class MindimError(Exception):
    """Base class for all package errors."""


class InputError(MindimError):
    """Malformed or out-of-contract input (CLI exit code 2)."""


class BudgetError(MindimError):
    """A configured resource budget was exceeded (CLI exit code 3).

    `partial` may carry best-known bounds or other salvaged results.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ValidationError(MindimError):
    """A dataset record failed validation; names the failing item."""


class InternalCheckError(MindimError):
    """A built-in self check failed (e.g. commutator relations)."""


@dataclass(frozen=True)
class Budget:
    """Resource limits threaded through the compute modules."""

    max_degree: int = 200_000
    max_elements: int = 2_000_000
    max_enumeration: int = 10_000_000
    oracle_bound: int = 500
    search_nodes: int = 5_000_000

    def check_degree(self, degree, what="action degree"):
        if degree > self.max_degree:
            raise BudgetError(f"{what} {degree} exceeds degree budget {self.max_degree}")

    def check_elements(self, count, what="element count"):
        if count > self.max_elements:
            raise BudgetError(f"{what} {count} exceeds element-set budget {self.max_elements}")

    def check_enumeration(self, count, what="enumeration"):
        if count > self.max_enumeration:
            raise BudgetError(f"{what} size {count} exceeds enumeration budget {self.max_enumeration}")


DEFAULT_BUDGET = Budget()
