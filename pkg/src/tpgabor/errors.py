"""Exception types. Every error carries a short machine-readable ``code``."""


class TpgaborError(ValueError):
    code = "TpgaborError"


class ZeroDelta(TpgaborError):
    code = "ZeroDelta"


class TooFewPoles(TpgaborError):
    code = "TooFewPoles"


class NonpositiveScale(TpgaborError):
    code = "NonpositiveScale"


class RepeatedPoles(TpgaborError):
    code = "RepeatedPoles"


class PoleOnTorus(TpgaborError):
    code = "PoleOnTorus"


class MultiplicityTooHigh(TpgaborError):
    code = "MultiplicityTooHigh"


class ZeroNotResolved(TpgaborError):
    code = "ZeroNotResolved"


class DivisibilityError(TpgaborError):
    code = "DivisibilityError"


class DensityError(TpgaborError):
    code = "DensityError"


class RankDeficient(TpgaborError):
    code = "RankDeficient"


class LeftInverseResidual(TpgaborError):
    code = "LeftInverseResidual"


class LengthMismatch(TpgaborError):
    code = "LengthMismatch"


class ShapeMismatch(TpgaborError):
    code = "ShapeMismatch"


class OffsetNotTabulated(TpgaborError):
    code = "OffsetNotTabulated"


class UsageError(TpgaborError):
    code = "UsageError"
