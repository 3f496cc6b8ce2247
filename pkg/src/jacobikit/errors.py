"""Exception hierarchy shared by every jacobikit module."""


class JacobiKitError(Exception):
    """Base class for all library errors."""


class ParseError(JacobiKitError):
    def __init__(self, message, position=None, line=None):
        self.position = position
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if position is not None:
            where.append(f"col {position + 1}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.message = message


class UnknownVariableError(ParseError):
    pass


class EvaluationError(JacobiKitError):
    pass


class PoleError(EvaluationError):
    pass


class SingularMatrixError(JacobiKitError):
    def __init__(self, message="matrix is singular", det=None):
        super().__init__(message)
        self.det = det


class InconclusiveError(JacobiKitError):
    """Nonvanishing could not be decided: no certificate and no samples."""


class ChartMismatchError(JacobiKitError):
    pass


class DegreeError(JacobiKitError):
    pass


class StructureError(JacobiKitError):
    """An input fails the defining identities of the structure it claims to be."""

    def __init__(self, message, residues=None, witness=None):
        super().__init__(message)
        self.residues = residues or {}
        self.witness = witness


class NotSubmersionError(JacobiKitError):
    pass
