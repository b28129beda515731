"""Exception hierarchy shared by every solver and by the CLI exit-code mapping."""

from __future__ import annotations


class CausalGamesError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ModelValidationError(CausalGamesError):
    """A model violates one of its structural invariants."""

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class UnknownNode(CausalGamesError):
    pass


class UnknownState(CausalGamesError):
    pass


class UnknownGraph(CausalGamesError):
    pass


class CyclicGraph(CausalGamesError):
    pass


class IncompleteAssignment(CausalGamesError):
    pass


class IncompleteProfile(CausalGamesError):
    pass


class StateSpaceMismatch(CausalGamesError):
    pass


class DimensionMismatch(CausalGamesError):
    pass


class OverlappingSets(CausalGamesError):
    pass


class ImperfectInformation(CausalGamesError):
    """Backward induction asked of a tree with a non-singleton information set."""

    exit_code = 4


class ZeroProbabilityEvidence(CausalGamesError):
    exit_code = 5


class ZeroProbabilityType(CausalGamesError):
    pass


class EnumerationLimitExceeded(CausalGamesError):
    exit_code = 2

    def __init__(self, count: int, limit: int):
        self.count = count
        self.limit = limit
        super().__init__(f"{count} joint profiles exceed the enumeration limit {limit}")


class ParseError(CausalGamesError):
    exit_code = 3

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)


class SchemaViolation(ParseError):
    pass


class UnresolvedReference(ParseError):
    pass


class ConceptMismatch(CausalGamesError):
    """Requested solution concept is not defined for the model type."""

    exit_code = 4
