"""Exception types shared across the package."""

from __future__ import annotations


class ValidationError(ValueError):
    """Bad parameters or inputs detected before any time stepping."""


class ConfigError(ValidationError):
    """One or more problems in a config file.

    Carries every issue found, not just the first, as ``issues``:
    a list of ``(line_number, message)`` pairs where ``line_number``
    may be ``None`` for file-level problems (e.g. a missing key).
    """

    def __init__(self, issues):
        self.issues = list(issues)
        lines = []
        for line, msg in self.issues:
            prefix = f"line {line}: " if line is not None else ""
            lines.append(prefix + msg)
        super().__init__("\n".join(lines))


class CflError(ValidationError):
    """Requested time step exceeds the admissible stability bound."""


class NumericsError(RuntimeError):
    """Mid-run numerical failure (NaN, overflow, invalid state)."""


class VacuumError(NumericsError):
    """Density fell below the vacuum floor in a pressure-coupled cell."""
