"""Exception hierarchy. Every computational failure carries a stable ``code``."""

from __future__ import annotations


class PolyConvexError(Exception):
    """Base class for all computation errors raised by the library."""

    code = "PolyConvexError"

    def __init__(self, message: str = "", **details):
        super().__init__(message or self.code)
        self.message = message or self.code
        self.details = details

    def to_dict(self) -> dict:
        out = {"error": self.code, "message": self.message}
        if self.details:
            out["details"] = self.details
        return out


class InvalidParameter(PolyConvexError, ValueError):
    code = "InvalidParameter"


class DegenerateInput(PolyConvexError, ValueError):
    code = "DegenerateInput"


class CurveThroughOrigin(PolyConvexError):
    code = "CurveThroughOrigin"


class UndersampledCurve(PolyConvexError):
    code = "UndersampledCurve"


class NotTransverse(PolyConvexError):
    code = "NotTransverse"


class NotTotallyReal(PolyConvexError):
    code = "NotTotallyReal"


class EigenvalueDegenerate(PolyConvexError):
    code = "EigenvalueDegenerate"


class CommutatorNotPositive(PolyConvexError):
    code = "CommutatorNotPositive"


class NotFactorable(PolyConvexError):
    code = "NotFactorable"

    def __init__(self, residual: float, message: str = ""):
        super().__init__(message or f"a2^2 - 3 a1 a3 residual {residual:.3e}", residual=residual)
        self.residual = residual


class BranchUndefined(PolyConvexError):
    code = "BranchUndefined"


class RootOnCircle(PolyConvexError):
    code = "RootOnCircle"


class NotIsolatedSingularity(PolyConvexError):
    code = "NotIsolatedSingularity"


class Undersampled(PolyConvexError):
    code = "Undersampled"


class HypothesisViolated(PolyConvexError):
    code = "HypothesisViolated"

    def __init__(self, hypothesis: str, message: str = "", **details):
        super().__init__(message or f"hypothesis '{hypothesis}' fails", hypothesis=hypothesis, **details)
        self.hypothesis = hypothesis
