"""
Exception hierarchy for fusionblocks.

Every error raised on purpose by the library derives from ``FusionBlocksError`` so the CLI can
turn it into a non-zero exit status with a readable message.
"""
from __future__ import annotations

from typing import (
    Any,
    Sequence,
)


class FusionBlocksError(Exception):
    """Base class for all library errors."""


class StructuralError(FusionBlocksError, ValueError):
    """Input data has inconsistent shape (tensor dimensions, permutations, label counts)."""


class AxiomViolationError(FusionBlocksError, ValueError):
    """A fusion ring was refused because it fails one or more axioms."""

    def __init__(self, message: str, report: Sequence[Any] = ()) -> None:
        super().__init__(message)
        self.report = list(report)


class LabelError(FusionBlocksError, KeyError):
    """A label index or name could not be resolved."""

    def __init__(self, label: Any, valid: Sequence[str] = ()) -> None:
        self.label = label
        self.valid = list(valid)
        super().__init__(f'Unknown label {label!r}; valid labels are {self.valid}')

    def __str__(self) -> str:
        return str(self.args[0])


class UnstableCurveError(FusionBlocksError, ValueError):
    """A pointed curve or one of its components fails 2g - 2 + n > 0."""


class DisconnectedGraphError(FusionBlocksError, ValueError):
    """A dual graph is not connected."""


class EnumerationBoundError(FusionBlocksError, ValueError):
    """A graph enumeration was requested beyond the supported genus/leg bound."""


class TruncationError(FusionBlocksError, ArithmeticError):
    """A series coefficient was requested outside the order or window on which it is known."""


class NonIntegralError(FusionBlocksError, ArithmeticError):
    """A Verlinde sum is not within tolerance of an integer."""


class NonUnitaryError(FusionBlocksError, ValueError):
    """An S-matrix is not unitary (or symmetric) within tolerance."""


class NonHomogeneousError(FusionBlocksError, ValueError):
    """An operation that needs a homogeneous vector was handed a mixture of weights."""


class FormulaMismatchError(FusionBlocksError, AssertionError):
    """Two expressions that must agree by a theorem gave different values."""


class ConfigError(FusionBlocksError, ValueError):
    """Settings could not be validated."""


class FormatError(FusionBlocksError, ValueError):
    """A data file could not be parsed; the message names the offending field."""
