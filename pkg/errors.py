#!/usr/bin/env python3
"""
Exceptions raised by the vacuum workbench modules.

Library code raises these; only the entry points (vacuum_workbench.py,
api_server.py) catch them and turn them into exit codes or HTTP errors.
"""

from typing import Optional


class WorkbenchError(Exception):
    """Base class for every error the workbench raises on purpose"""


class InvalidDirectionError(WorkbenchError):
    """Propagation direction is zero or not a unit vector"""


class SchemeError(WorkbenchError):
    """Commutator scheme is inconsistent"""


class NonPositiveNormError(SchemeError):
    """A commutator constant that must be positive is zero or negative"""


class SchemeTypeError(SchemeError):
    """Operation needs a different kind of scheme"""


class InvalidModeError(WorkbenchError):
    """Mode set or mode frequency is not usable"""


class OscillatorLookupError(WorkbenchError):
    """Fock representation has no oscillator for a (mode, pol) pair"""


class CapacityError(WorkbenchError):
    """Fock space dimension exceeds the configured cap"""


class TruncationRiskError(WorkbenchError):
    """Operator degree could reach the Fock truncation boundary"""


class SymmetryRequiredError(InvalidModeError):
    """Operation needs a mode set closed under m -> -m"""


class AliasingError(WorkbenchError):
    """Quadrature grid is too coarse for the mode set"""


class ResolutionError(WorkbenchError):
    """Oscillatory quadrature is undersampled or cut off too early"""


class ExprSyntaxError(WorkbenchError):
    """Operator expression could not be parsed"""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


class ConfigError(WorkbenchError):
    """Run configuration is invalid"""

    def __init__(self, message: str, path: Optional[str] = None):
        super().__init__(f"{path}: {message}" if path else message)
        self.message = message
        self.path = path
