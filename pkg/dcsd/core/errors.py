"""
Error types for the dcsd toolkit.

Every failure the library signals on purpose derives from DcsdError, so the
CLI can separate data problems (exit 1) from usage problems (exit 2) and from
genuine bugs.
"""

from typing import Any, Dict, List, Optional, Tuple


class DcsdError(Exception):
    """Base class for all errors raised deliberately by dcsd."""


class ContractViolation(DcsdError, ValueError):
    """A documented precondition of an operation was not met."""


class InvalidSpec(DcsdError, ValueError):
    """A circulant or search specification is internally inconsistent."""


class DegenerateExtension(DcsdError):
    """Extending a code by a vector it already contains."""


class WorkBudgetExceeded(DcsdError):
    """The requested counting radius needs more work than the budget allows."""

    def __init__(self, requested_radius: int, achieved_radius: int, required_work: int, budget: int):
        self.requested_radius = requested_radius
        self.achieved_radius = achieved_radius
        self.required_work = required_work
        self.budget = budget
        super().__init__(
            f"radius {requested_radius} needs {required_work} message evaluations "
            f"(budget {budget}); largest guaranteed radius within budget is {achieved_radius}"
        )


class InconsistentProfile(DcsdError):
    """Weight counts do not belong to a self-dual code of the claimed family."""


class AmbiguousEnumerator(DcsdError):
    """Several enumerator forms fit the supplied counts."""

    def __init__(self, message: str, candidates: List[Any]):
        self.candidates = candidates
        super().__init__(message)


class UnsupportedCoefficient(DcsdError):
    """The family's published series does not display this coefficient."""


class UnsupportedLength(DcsdError):
    """No extremal value is encoded for this (length, parity) pair."""


class EquivalenceUndecided(DcsdError):
    """The search node budget ran out before a decision was reached."""

    def __init__(
        self,
        message: str,
        partial_order: Optional[int] = None,
        generators: Tuple[Tuple[int, ...], ...] = (),
    ):
        self.partial_order = partial_order
        self.generators = generators
        super().__init__(message)


class RowParseError(DcsdError):
    """A row token or row-list line could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None, position: Optional[int] = None):
        self.line = line
        self.position = position
        where = []
        if line is not None:
            where.append(f"line {line}")
        if position is not None:
            where.append(f"position {position}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class DataError(DcsdError):
    """Well-formed input describing something that violates the data contract."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class BudgetExhausted(DcsdError):
    """A long-running job stopped at its work limit; `checkpoint` resumes it."""

    def __init__(self, message: str, checkpoint: Any, partial: Optional[Dict[str, Any]] = None):
        self.checkpoint = checkpoint
        self.partial = partial or {}
        super().__init__(message)
