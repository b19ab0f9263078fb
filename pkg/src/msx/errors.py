"""Exception types raised across the engine."""


class MsxError(Exception):
    """Base class for every error the engine raises on purpose."""


class DivisionByZero(MsxError, ZeroDivisionError):
    pass


class PoleAtPoint(MsxError):
    pass


class PoleAtSubstitution(MsxError):
    pass


class ChartMismatch(MsxError):
    pass


class DegreeZero(MsxError):
    pass


class DegreeMismatch(MsxError):
    pass


class BadDimensions(MsxError):
    pass


class BadDegree(MsxError):
    pass


class NotProjectable(MsxError):
    pass


class NotAllowable(MsxError):
    """The structure equation has no solution for the given observable."""


class SingularStructure(MsxError):
    """The contraction map of the structure form has a nontrivial kernel."""


class SolveFailed(MsxError):
    pass


class OutOfCharacterizedRegime(MsxError):
    pass


class ShapeMismatch(MsxError):
    pass


class SingularFrame(MsxError):
    pass


class RouteDisagreement(MsxError):
    """Two independent computations of the same quantity differ."""


class ScriptSyntaxError(MsxError):
    def __init__(self, message, line, column):
        super().__init__(f"{message} at line {line}, column {column}")
        self.message = message
        self.line = line
        self.column = column


class UnboundName(MsxError):
    def __init__(self, name, line=None, column=None):
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"unbound name {name!r}{where}")
        self.name = name
        self.line = line
        self.column = column


class ScriptTypeError(MsxError):
    """A script statement produced a value of the wrong kind."""
