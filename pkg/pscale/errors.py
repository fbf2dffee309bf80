class PscaleError(Exception):
    """Base class for every error raised by pscale."""


class ParseError(PscaleError, ValueError):
    def __init__(self, message: str, position: int = -1) -> None:
        if position >= 0:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class VariableIndexError(ParseError):
    pass


class NvarsMismatchError(PscaleError, ValueError):
    def __init__(self, left: int, right: int) -> None:
        super().__init__(f"nvars mismatch: {left} != {right}")
        self.left = left
        self.right = right


class DegreeCapError(PscaleError):
    def __init__(self, degree: int, cap: int) -> None:
        super().__init__(f"polynomial degree {degree} exceeds degree cap {cap}")
        self.degree = degree
        self.cap = cap


class HolomorphyError(PscaleError, ValueError):
    pass


class NotInteriorError(PscaleError, ValueError):
    pass


class BoundaryError(PscaleError, ValueError):
    """A point expected on the boundary (or near the origin chart) is not."""


class HypothesisError(PscaleError):
    """A standing hypothesis (finite type, corank, model class) fails."""


class FiniteTypeError(HypothesisError):
    pass


class LeviBlockError(HypothesisError):
    pass


class HarmonicTermError(HypothesisError, ValueError):
    pass


class ModelSpaceError(HypothesisError, ValueError):
    pass


class NonConvergenceError(PscaleError):
    def __init__(self, report) -> None:
        super().__init__("limit polynomial did not converge within jmax")
        self.report = report
