"""Exception hierarchy shared by all dlfit modules."""


class DLFitError(Exception):
    """Base class for every error raised by dlfit."""


class InputError(DLFitError):
    """User input is malformed or inconsistent (e.g. P and N overlap)."""


class DatabaseError(InputError):
    """A fact set violates the database invariants."""


class ParseError(InputError):
    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class ConceptTooLarge(DLFitError):
    """Expanding a concept DAG into a tree would exceed the node budget."""


class NotSeparable(DLFitError):
    """Requested a separating/fitting concept where none exists."""


class EncodingError(DLFitError):
    pass


class InternalConsistencyError(DLFitError):
    """A decoded model does not fit; this indicates an encoder bug."""


class SolverError(DLFitError):
    pass


class SolverConfigError(SolverError):
    """The external solver could not be started (missing binary etc.)."""


class SolverProcessError(SolverError):
    """The external solver crashed or returned an unexpected exit status."""


class SolverOutputError(SolverError):
    """Solver output could not be parsed."""


class ModelVerificationError(SolverError):
    """A model claimed by a solver falsifies at least one clause."""


class ConfigError(InputError):
    """A search configuration is invalid."""
