"""Exception types raised across the toolkit."""


class FairRankError(Exception):
    """Base class for all toolkit errors."""


class PositionError(FairRankError, IndexError):
    """A 1-based position lies outside the ranking."""


class DuplicateError(FairRankError, ValueError):
    """A candidate is already part of the candidate set."""


class MembershipError(FairRankError, ValueError):
    """A candidate does not belong to the population."""


class SizeGuardError(FairRankError, ValueError):
    """An exhaustive computation was requested for a too-large input."""


class CapacityError(FairRankError, ValueError):
    """The population is too small for the requested construction."""


class NormalizationError(FairRankError, ValueError):
    """A probability vector does not sum to one."""


class DivergenceDomainError(FairRankError, ValueError):
    """KL divergence is infinite because q vanishes where p does not."""


class CutoffError(FairRankError, ValueError):
    """The cut-off set is empty or exceeds the ranking length."""


class InapplicableSettingError(FairRankError, ValueError):
    """The metric is not defined for this ranking setting (e.g. PSP on a subset)."""


class NormalizerZeroError(FairRankError, ArithmeticError):
    """Every ranking of the candidate set has an unnormalized prefix sum of zero."""


class UndefinedMetricError(FairRankError, ArithmeticError):
    """A metric denominator vanished.

    ``quantity`` names the vanishing term, e.g. ``"Exposure(G0)"`` or ``"Y(G1)"``.
    ``ranking`` is filled in by callers that know which ranking triggered it.
    """

    def __init__(self, metric, quantity, ranking=None):
        self.metric = metric
        self.quantity = quantity
        self.ranking = ranking
        super().__init__(f"{metric} is undefined: {quantity} = 0")


class ParseError(FairRankError, ValueError):
    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


class ValidationError(FairRankError, ValueError):
    def __init__(self, line, reason):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")
