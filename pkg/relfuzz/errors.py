"""Domain exceptions.

Every failure the engine signals is a ``ValueError`` subclass carrying a
stable ``code`` string; the CLI maps any of them to exit status 2.
"""


class RelFuzzError(ValueError):
    """Base class for all relfuzz errors."""

    code = "relfuzz-error"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code


class FieldOutOfRangeError(RelFuzzError):
    """Field bytes [p, p+s) do not fit inside the input."""

    code = "field-out-of-range"


class ValueOverflowError(RelFuzzError):
    """Value does not fit in s bytes."""

    code = "value-overflow"


class InvalidOpError(RelFuzzError):
    """Mutation operator indices are out of bounds."""

    code = "invalid-op"


class InvalidRelationError(RelFuzzError):
    """Relation field violates a < b or its width/position constraints."""

    code = "invalid-relation"


class NoBaselineCoverageError(RelFuzzError):
    """Original execution produced no coverage features."""

    code = "no-baseline-coverage"


class NothingToRestoreError(RelFuzzError):
    """Destructive mutant lost no features."""

    code = "nothing-to-restore"


class BudgetExceededError(RelFuzzError):
    """Analysis ran out of target invocations."""

    code = "budget-exceeded"


class TargetError(RelFuzzError):
    """Executor raised while running an input."""

    code = "target-error"


class CorpusIOError(RelFuzzError):
    """Corpus, seed or sidecar file could not be read or written."""

    code = "io-error"


class UnknownTargetError(RelFuzzError):
    """No target registered under the requested name."""

    code = "unknown-target"
