"""Exception hierarchy shared by every module."""


class ChowWittError(ValueError):
    """Base class for computation errors (CLI exit code 65)."""

    code = "ChowWittError"

    def to_json(self):
        return {"error": type(self).__name__, "message": str(self)}


class DegreeBoundExceeded(ChowWittError):
    pass


class ZeroPolynomial(ChowWittError):
    pass


class EvenCharacteristic(ChowWittError):
    pass


class FieldMismatch(ChowWittError):
    pass


class Degenerate(ChowWittError):
    pass


class CharacteristicTwo(ChowWittError):
    pass


class UnsupportedField(ChowWittError):
    pass


class TruncationRequired(ChowWittError):
    pass


class ResidueCharacteristicTwo(ChowWittError):
    pass


class UnsupportedExtension(ChowWittError):
    pass


class UnsupportedDegree(ChowWittError):
    pass


class InvalidDelta(ChowWittError):
    pass


class UnsupportedCoefficientDegree(ChowWittError):
    pass


class TwoNotInvertible(ChowWittError):
    pass


class NotFormallyReal(ChowWittError):
    pass


class NonStabilized(ChowWittError):
    pass


class ParseError(ChowWittError):
    pass
