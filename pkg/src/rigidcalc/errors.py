"""Exception types shared across the package."""
from __future__ import annotations


class RigidCalcError(Exception):
    """Base class for all library errors."""


class ParseError(RigidCalcError):
    def __init__(self, message: str, line: int = None, column: int = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
        if column is not None:
            where += (", " if where else "") + f"column {column}"
        super().__init__(f"{where}: {message}" if where else message)


class RingMismatch(RigidCalcError):
    """Operands live over different rings."""


class DegreeBoundExceeded(RigidCalcError):
    """A Groebner computation produced an S-polynomial above the degree bound."""


class NotRegular(RigidCalcError):
    """A sequence expected to be Koszul-regular is not."""


class NotSmooth(RigidCalcError):
    """A smoothness or etaleness test failed."""


class LiftError(RigidCalcError):
    """A required lift or linear solve has no solution."""


class CheckFailed(RigidCalcError):
    """A verification predicate evaluated to false."""


class InconsistentRing(RigidCalcError):
    """The presented ring is the zero ring."""


class NotFinite(RigidCalcError):
    """A ring map is not module-finite, so restriction is not finitely presented."""


class NotKoszulRegular(NotRegular):
    pass


class CodimMismatch(RigidCalcError):
    """The top exterior power of the conormal module is not free of rank one."""


class WindowTooSmall(RigidCalcError):
    """A truncated resolution cannot determine the requested degree."""


class NotConcentrated(RigidCalcError):
    """A complex that must live in a single degree does not."""


class NotEtale(RigidCalcError):
    pass


class NotMorita(RigidCalcError):
    """The derived Morita property fails."""


class NotUnit(RigidCalcError):
    pass


class NoCoordinates(RigidCalcError):
    pass


class UnsupportedBase(RigidCalcError):
    """A relative construction needs a base this desk-scale engine does not handle."""
