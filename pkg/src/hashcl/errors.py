"""Diagnostics and the error hierarchy shared by every stage of the toolchain."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Pos:
    line: int = 0
    col: int = 0

    def __str__(self):
        return f"{self.line}:{self.col}"


@dataclass
class Diagnostic:
    """A single finding, rendered as ``file:line:col: severity: message``."""

    code: str
    message: str
    pos: Pos = field(default_factory=Pos)
    severity: str = "error"
    subject: str = ""

    def render(self, path: str = "<input>") -> str:
        return f"{path}:{self.pos.line}:{self.pos.col}: {self.severity}: {self.message}"


class HclError(Exception):
    """Base for all toolchain errors; carries a position for diagnostics."""

    def __init__(self, message: str, pos: Pos | None = None):
        super().__init__(message)
        self.message = message
        self.pos = pos or Pos()

    def render(self, path: str = "<input>") -> str:
        return f"{path}:{self.pos.line}:{self.pos.col}: error: {self.message}"


class LexError(HclError):
    pass


class HclSyntaxError(HclError):
    def __init__(self, message: str, pos: Pos | None = None, expected: tuple[str, ...] = ()):
        if expected:
            message = f"{message} (expected one of: {', '.join(expected)})"
        super().__init__(message, pos)
        self.expected = expected


class UnknownKind(HclSyntaxError):
    pass


class IteratorBoundMismatch(HclError):
    pass


class UnboundVariable(HclError):
    pass


class FreeVariable(HclError):
    pass


class UnknownConfig(HclError):
    pass


class UnknownUnit(HclError):
    pass


class UncoveredInner(HclError):
    pass


class ArityMismatch(HclError):
    pass


class SupplyArityMismatch(HclError):
    pass


class NotAnAbstractTarget(HclError):
    pass


class BoundViolation(HclError):
    def __init__(self, message: str, index: int, trace=None, pos: Pos | None = None):
        super().__init__(message, pos)
        self.index = index
        self.trace = trace


class ManifestError(HclError):
    pass


class CycleInHierarchy(HclError):
    pass


class DuplicateImplementation(HclError):
    pass


class ShapeInconsistentExtends(HclError):
    pass


class NoImplementation(HclError):
    pass
