"""Exceptions raised by the operator Hölder laboratory."""

from __future__ import annotations

from typing import Any


class HolderLabError(Exception):
    """Base class for all laboratory errors."""


class InputError(HolderLabError):
    """A matrix or scalar input is malformed."""

    def __init__(self, message: str, deviation: float | None = None) -> None:
        super().__init__(message)
        self.deviation = deviation


class NumericError(HolderLabError):
    """A decomposition or quadrature did not meet its accuracy contract."""

    def __init__(self, message: str, residual: float | None = None) -> None:
        super().__init__(message)
        self.residual = residual


class ParameterError(HolderLabError):
    """A parameter is outside the range an operation supports."""


class DomainError(HolderLabError):
    """A function was evaluated outside its working interval."""

    def __init__(
        self,
        message: str,
        values: list[float] | None = None,
        index: int | None = None,
    ) -> None:
        super().__init__(message)
        self.values = values or []
        self.index = index


class ScaleTooLarge(HolderLabError):
    """A trial witness left the regime of the inequality under test."""


class ConfigError(HolderLabError):
    """A configuration file could not be loaded or validated."""

    def __init__(
        self, message: str, key: str | None = None, line: int | None = None
    ) -> None:
        self.key = key
        self.line = line
        context = []
        if key:
            context.append(f"key {key}")
        if line is not None:
            context.append(f"line {line}")
        if context:
            message = f"{message} ({', '.join(context)})"
        super().__init__(message)

    def as_dict(self) -> dict[str, Any]:
        """Return the error as a plain mapping for logs and reports."""
        return {"message": str(self), "key": self.key, "line": self.line}
