"""
Exception hierarchy shared by the services, the JSON API and the CLI.
"""


class Bsc4Error(ValueError):
    """Base class for every input or precondition failure."""


class ProfileError(Bsc4Error):
    """Malformed profile text, codebook file or count vector."""


class ProbabilityError(Bsc4Error):
    """Crossover probability malformed or outside (0, 1/2)."""


class LengthMismatchError(Bsc4Error):
    pass


class OracleSizeError(Bsc4Error):
    """Block length or row count beyond what the brute-force engine accepts."""


class ParityError(Bsc4Error):
    """Counts violate the Class-I parity rules."""


class ScenarioError(Bsc4Error):
    """Comparison scenario does not match the codebook it is applied to."""


class PartitionError(Bsc4Error):
    """An output landed in zero or several partition sets."""


class RuleNotApplicable(Bsc4Error):
    """Precondition of a reduction rule is not met."""


class SearchSizeError(Bsc4Error):
    pass


class OptimalityViolation(Bsc4Error):
    """Exhaustive search found no linear code among the maximizers."""
