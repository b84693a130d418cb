"""Exception hierarchy shared by every module of the package."""


class RainbowError(Exception):
    """Base class for all package errors."""


class InputError(RainbowError, ValueError):
    """Malformed or hypothesis-violating input."""


class LoopEdge(InputError):
    pass


class ParallelEdge(InputError):
    pass


class VertexOutOfRange(InputError):
    pass


class AlreadyDead(RainbowError):
    pass


class UnknownEdge(InputError):
    pass


class OddT(InputError):
    pass


class NotLatin(InputError):
    pass


class EmptyColor(InputError):
    pass


class OutOfDomain(InputError):
    pass


class DenominatorNonpositive(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigInvalid(InputError):
    pass


class GenerationBudgetExceeded(RainbowError):
    pass


class BudgetExceeded(RainbowError):
    """A search or resampling loop ran out of budget.

    ``state`` carries whatever best-so-far object the caller can use.
    """

    def __init__(self, message, state=None, conflicts=None):
        super().__init__(message)
        self.state = state
        self.conflicts = conflicts


class SolverFailure(RainbowError):
    """A solver could not meet its target; the partial result is attached."""

    def __init__(self, message, partial=None, report=None):
        super().__init__(message)
        self.partial = partial
        self.report = report


class CompletionFailed(SolverFailure):
    pass


class GreedyStuck(SolverFailure):
    def __init__(self, message, target=None, partial=None, report=None):
        super().__init__(message, partial=partial, report=report)
        self.target = target


class AugmentStuck(SolverFailure):
    pass


class ReductionFailed(SolverFailure):
    pass


class TargetMissed(SolverFailure):
    pass


class IdentityViolated(RainbowError):
    def __init__(self, message, worst=None):
        super().__init__(message)
        self.worst = worst


class InvariantViolation(RainbowError):
    """Internal invariant broken; maps to CLI exit code 3."""


class ADeadUnmatched(InvariantViolation):
    """A side-A vertex died without being covered by the partial matching."""
