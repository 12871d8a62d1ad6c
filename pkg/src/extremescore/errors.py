"""Exception hierarchy.

``ConfigError`` subclasses map to CLI exit code 2, ``GuardViolation``
subclasses to exit code 3.
"""


class ExtremeScoreError(Exception):
    """Base class for all package errors."""


class ConfigError(ExtremeScoreError, ValueError):
    """Invalid user-supplied parameters."""


class GuardViolation(ExtremeScoreError):
    """A computation would exceed a resource guard."""


# distributions
class InvalidDistribution(ConfigError):
    pass


class AsymmetricSupport(InvalidDistribution):
    pass


class ProbSumMismatch(InvalidDistribution):
    pass


class SingletonSupport(InvalidDistribution):
    pass


class ValueOutOfRange(InvalidDistribution):
    pass


class NonPositiveProbability(InvalidDistribution):
    pass


# engine / statistics
class PlayerCountTooSmall(ConfigError):
    pass


class KOutOfRange(ConfigError):
    pass


# asymptotics
class NonPositiveX(ConfigError):
    pass


class NoRootInBracket(ConfigError):
    pass


# tilting
class SupportTooLarge(GuardViolation):
    pass


class MgfOverflow(ExtremeScoreError, OverflowError):
    """The MGF is not representable as a float; use ``log_mgf``."""


# oracle
class StateSpaceTooLarge(GuardViolation):
    pass


class InexactProbabilities(ConfigError):
    pass


# experiments
class EmptyExperiment(ConfigError):
    pass


class InvalidCounts(ConfigError):
    pass
