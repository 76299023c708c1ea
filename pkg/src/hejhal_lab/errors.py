"""Exception types raised by the geometry / solver layers."""


class HejhalLabError(Exception):
    """Base class for all package errors."""


# ---------------------------------------------------------------- geometry

class SelfIntersectingCurve(HejhalLabError):
    pass


class CurveNesting(HejhalLabError):
    pass


class DegenerateCurve(HejhalLabError):
    pass


class UnderResolved(HejhalLabError):
    pass


class CutConstructionFailed(HejhalLabError):
    pass


class MarginTooLarge(HejhalLabError):
    pass


class HoleCollision(HejhalLabError):
    pass


# -------------------------------------------------------------- quadrature

class MeasureMismatch(HejhalLabError):
    pass


class TooCloseToBoundary(HejhalLabError):
    pass


# ----------------------------------------------------------------- solvers

class IllConditioned(HejhalLabError):
    pass


class NonConvergent(HejhalLabError):
    pass


class PoleTargetCollision(HejhalLabError):
    pass


class WTooCloseToCut(HejhalLabError):
    pass


class RankDeficientSamples(HejhalLabError):
    pass


class ZeroNotFound(HejhalLabError):
    pass


# ------------------------------------------------------------ verification

class NondegeneracyViolation(HejhalLabError):
    pass


class PositivityViolation(HejhalLabError):
    pass


class MethodDisagreement(Warning):
    """Cross-method lambda matrices disagree beyond tolerance (reported, not fatal)."""
