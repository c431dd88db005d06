"""Named errors raised across the package.

The CLI maps every subclass of `SprayGeometryError` to a machine-readable error
record, so raise these rather than bare `ValueError` for domain failures.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from pydantic import ValidationError


class SprayGeometryError(Exception):
    """Base class for all domain errors."""

    def details(self) -> dict[str, Any]:
        return {}


class DimensionMismatchError(SprayGeometryError, ValueError):
    def __init__(self, expected: int, got: int, what: str = "vector") -> None:
        super().__init__(f"{what} has dimension {got}, expected {expected}")
        self.expected = expected
        self.got = got

    def details(self) -> dict[str, Any]:
        return {"expected": self.expected, "got": self.got}


class UnknownAlgebraError(SprayGeometryError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown algebra"


class ZeroVectorError(SprayGeometryError, ValueError):
    """A map defined on the slit algebra was evaluated at 0."""


class NonFiniteError(SprayGeometryError, ArithmeticError):
    """A norm, derivative or trajectory produced NaN or infinity."""


class StrongConvexityError(SprayGeometryError, ValueError):
    def __init__(self, message: str, witness: Any = None, min_eigenvalue: float | None = None) -> None:
        super().__init__(message)
        self.witness = witness
        self.min_eigenvalue = min_eigenvalue

    def details(self) -> dict[str, Any]:
        witness = None if self.witness is None else [float(x) for x in self.witness]
        return {"witness": witness, "min_eigenvalue": self.min_eigenvalue}


class StencilError(SprayGeometryError, ValueError):
    """A finite-difference stencil would cross the origin."""


class ExpressionError(SprayGeometryError, ValueError):
    def __init__(self, message: str, token: str | None = None) -> None:
        super().__init__(message)
        self.token = token

    def details(self) -> dict[str, Any]:
        return {"token": self.token}


class MissingRepresentationError(SprayGeometryError, ValueError):
    pass


class IntegrationError(SprayGeometryError, RuntimeError):
    def __init__(self, message: str, last_time: float) -> None:
        super().__init__(message)
        self.last_time = last_time

    def details(self) -> dict[str, Any]:
        return {"last_time": self.last_time}


class StepSizeUnderflowError(IntegrationError):
    pass


class DegenerateScanError(SprayGeometryError, ValueError):
    """No sign change of the tangential spray component was found."""


class FlowAtZeroError(SprayGeometryError, ValueError):
    """The flow was started at (or runs into) a zero of the spray vector field."""


class ConfigError(SprayGeometryError, ValueError):
    def __init__(
        self,
        message: str,
        line: int | None = None,
        column: int | None = None,
        key_path: str | None = None,
    ) -> None:
        super().__init__(message)
        self.line = line
        self.column = column
        self.key_path = key_path

    def details(self) -> dict[str, Any]:
        return {"line": self.line, "column": self.column, "key_path": self.key_path}

    @classmethod
    def from_validation(cls, exc: ValidationError, source: str | None = None) -> ConfigError:
        """First pydantic error as a ConfigError carrying its dotted key path."""
        error = exc.errors()[0]
        # model-level validators report an empty loc
        key_path = key_path_from_loc(tuple(error["loc"])) or None
        if error["type"] == "extra_forbidden":
            message = f"unknown key {key_path!r}"
        else:
            message = error["msg"].removeprefix("Value error, ")
            if key_path:
                message = f"{key_path}: {message}"
        if source is not None:
            message = f"{source}: {message}"
        return cls(message, key_path=key_path)


def key_path_from_loc(loc: tuple[Any, ...]) -> str:
    """Dotted key path of a validation error location; representation images keep their ``e<i>`` key."""
    path = ""
    for part in loc:
        if part == "images":
            continue
        if isinstance(part, int):
            path += f"[{part}]"
        else:
            path += f".{part}" if path else str(part)
    return path
