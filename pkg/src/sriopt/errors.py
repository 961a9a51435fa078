"""Exception hierarchy shared by all modules."""


class SRIError(Exception):
    """Base class for every error raised by sriopt."""


class ParseError(SRIError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class ValidationError(SRIError):
    """An instance or matching violates a structural invariant."""


class UnacceptablePairError(SRIError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class BudgetExceededError(SRIError):
    def __init__(self, message, nodes=None):
        super().__init__(message)
        self.nodes = nodes


class NoStableMatchingError(SRIError):
    """Raised where a stable matching is a precondition and none exists."""


class GraphError(SRIError):
    """Malformed graph input, or a graph that does not meet a builder's precondition."""
