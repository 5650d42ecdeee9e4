"""Exception hierarchy shared by the engines and the CLI."""


class UrnLabError(Exception):
    """Base class; `exit_code` is what the CLI returns for this error."""

    exit_code = 3

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "message": str(self)}


# Spec problems (exit 2)

class SpecError(UrnLabError):
    exit_code = 2


class TenabilityViolation(SpecError):
    pass


class NonPositiveParameter(SpecError):
    pass


# Caller asked for something outside a domain (exit 1)

class UsageError(UrnLabError):
    exit_code = 1


class SpecParseError(UsageError):
    pass


class OutOfRange(UsageError):
    pass


# Numeric failures (exit 3)

class NumericError(UrnLabError):
    exit_code = 3


class InternalTenabilityBreach(NumericError):
    """A reachable state asked for more balls than it holds."""


class ReversionFailure(NumericError):
    pass


class NormalizationBreach(NumericError):
    """A singular-expansion coefficient came out irrational."""


class ToleranceNotMet(NumericError):
    pass


class BranchTrackingFailure(NumericError):
    pass


class PrecisionLoss(NumericError):
    pass


class RootNotBracketed(NumericError):
    pass


class PoleAt(NumericError):
    pass


class TailTooLarge(NumericError):
    pass


class DegenerateDistribution(NumericError):
    pass
