"""Error hierarchy for formalcurves.

Every error carries a stable ``code`` string. The CLI maps domain errors to
exit code 1 and front-end errors (parse, type, flags) to exit code 2.
"""


class FormalCurvesError(ValueError):
    """Base class for all domain errors."""

    code = "FormalCurvesError"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message}


# =============================================================================
# Algebra
# =============================================================================

class SpecMismatch(FormalCurvesError):
    code = "SpecMismatch"


class NotAUnit(FormalCurvesError):
    code = "NotAUnit"


class NotNilpotent(FormalCurvesError):
    code = "NotNilpotent"


class NotSubstitutable(FormalCurvesError):
    code = "NotSubstitutable"


class NotInvertible(FormalCurvesError):
    code = "NotInvertible"


class MidNotAUnit(FormalCurvesError):
    code = "MidNotAUnit"


class OutOfSubgroup(FormalCurvesError):
    """A Laurent map does not have the support of the requested subgroup."""

    code = "OutOfSubgroup"


# =============================================================================
# Graphs and corollas
# =============================================================================

class InvalidGraph(FormalCurvesError):
    code = "InvalidGraph"


class EdgeNotInGraph(FormalCurvesError):
    code = "EdgeNotInGraph"


class LabelMismatch(FormalCurvesError):
    code = "LabelMismatch"


class InvalidMorphism(FormalCurvesError):
    code = "InvalidMorphism"


class ClosedLoop(FormalCurvesError):
    code = "ClosedLoop"


class ColorMismatch(FormalCurvesError):
    code = "ColorMismatch"


# =============================================================================
# Curves
# =============================================================================

class InvalidCurve(FormalCurvesError):
    code = "InvalidCurve"


class UnstableCurve(FormalCurvesError):
    code = "UnstableCurve"


class SlotOutOfRange(FormalCurvesError):
    code = "SlotOutOfRange"


# =============================================================================
# Front end
# =============================================================================

class FrontEndError(FormalCurvesError):
    """Errors in user input rather than in the mathematics (exit code 2)."""

    code = "FrontEndError"


class RingFlagError(FrontEndError):
    code = "RingFlagError"


class DslSyntaxError(FrontEndError):
    code = "SyntaxError"

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "line": self.line, "column": self.column}


class DslTypeError(FrontEndError):
    code = "TypeError"

    def __init__(self, message: str, expected: str = "", actual: str = ""):
        super().__init__(message)
        self.expected = expected
        self.actual = actual

    def to_dict(self) -> dict:
        return {
            "code": self.code,
            "message": self.message,
            "expected": self.expected,
            "actual": self.actual,
        }
