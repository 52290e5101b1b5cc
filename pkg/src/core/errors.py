"""
Error Types
===========

Exception hierarchy shared by every core module.
Input validation failures also derive from ValueError.
"""


class FractalGroupsError(Exception):
    """Base class for all library errors."""


class ConfigurationError(FractalGroupsError, ValueError):
    """Invalid configuration value or budget string."""


# =============================================================================
# CYCLIC ORDER
# =============================================================================

class DegenerateTriple(FractalGroupsError, ValueError):
    pass


class DegenerateQuadruple(FractalGroupsError, ValueError):
    pass


class DegeneratePair(FractalGroupsError, ValueError):
    pass


class TooFewPoints(FractalGroupsError, ValueError):
    pass


class NotMonotone(FractalGroupsError, ValueError):
    pass


class NotSubset(FractalGroupsError, ValueError):
    pass


class Singleton(FractalGroupsError, ValueError):
    pass


class NotMember(FractalGroupsError, ValueError):
    pass


class NotInjective(FractalGroupsError, ValueError):
    """A finite map repeats a source or a target."""


# =============================================================================
# COLORED TREES
# =============================================================================

class BadArity(FractalGroupsError, ValueError):
    pass


class InvalidAddress(FractalGroupsError, ValueError):
    pass


class InconsistentElement(FractalGroupsError, ValueError):
    pass


class NotCenterClosed(FractalGroupsError, ValueError):
    pass


class NotPartialHomomorphism(FractalGroupsError, ValueError):
    pass


class BoundaryMismatch(FractalGroupsError, ValueError):
    pass


class NotOrientation(FractalGroupsError, ValueError):
    pass


class IllDefined(FractalGroupsError, AssertionError):
    """Internal assertion: two ear vertices disagree on the orientation homomorphism."""


class WrongSide(FractalGroupsError, ValueError):
    pass


class OutOfRadius(FractalGroupsError, ValueError):
    pass


# =============================================================================
# DENDRITES
# =============================================================================

class SamePoint(FractalGroupsError, ValueError):
    pass


class SameColor(FractalGroupsError, ValueError):
    pass


class UnknownBranchPoint(FractalGroupsError, ValueError):
    pass


class SupportExceedsDepth(FractalGroupsError, ValueError):
    pass


# =============================================================================
# REPLACEMENT SYSTEMS
# =============================================================================

class InvalidSystem(FractalGroupsError, ValueError):
    pass


class NoSuchEdge(FractalGroupsError, KeyError):
    pass


class InvalidWord(FractalGroupsError, ValueError):
    pass


class NotStabilized(FractalGroupsError):
    pass


class Disconnected(FractalGroupsError):
    pass


class NotRabbitSystem(FractalGroupsError, ValueError):
    pass


class NotAirplaneSystem(FractalGroupsError, ValueError):
    pass


# =============================================================================
# LAMINATIONS
# =============================================================================

class NoConsistentPairing(FractalGroupsError, AssertionError):
    pass


class NotBijection(FractalGroupsError, ValueError):
    pass


# =============================================================================
# JULIA SETS
# =============================================================================

class NoConvergence(FractalGroupsError):
    pass
