"""Exception hierarchy shared by all tropcur modules.

Every structured failure carries enough data (the ``payload`` attribute)
to re-verify the complaint: a witness pair of cones, an offending ray, a
sample point, etc.
"""


class TropcurError(Exception):
    """Base class; ``payload`` holds machine-readable witness data."""

    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload


# --- fans ---------------------------------------------------------------
class NotStrictlyConvex(TropcurError):
    pass


class NotSmooth(TropcurError):
    pass


class BadIntersection(TropcurError):
    pass


class OutsideSupport(TropcurError):
    pass


class NotAFace(TropcurError):
    pass


# --- fiber algebra ------------------------------------------------------
class DimensionMismatch(TropcurError):
    pass


class WrongAlgebra(TropcurError):
    pass


class NotSquareBidegree(TropcurError):
    pass


class BidegreeMismatch(TropcurError):
    pass


# --- fields -------------------------------------------------------------
class NonCompactSupport(TropcurError):
    pass


class ToleranceNotMet(TropcurError):
    pass


class CompatibilityViolation(TropcurError):
    pass


# --- measures -----------------------------------------------------------
class Divergent(TropcurError):
    pass


class NonMeasurePiece(TropcurError):
    pass


class NotLocallyFinite(TropcurError):
    pass


class SignNotCertified(TropcurError):
    pass


# --- currents / correspondence -------------------------------------------
class SupportEscapesU(TropcurError):
    pass


class NotPositive(TropcurError):
    pass


class NotCFinite(TropcurError):
    pass


class MixedDimension(TropcurError):
    pass


class FamilyEscape(TropcurError):
    pass


class InvalidShadow(TropcurError):
    pass


# --- cli ------------------------------------------------------------------
class ParseError(TropcurError):
    pass


class ValidationError(TropcurError):
    pass
