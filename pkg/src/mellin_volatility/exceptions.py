"""Exception hierarchy for the estimation library.

Every error raised on purpose by this package derives from
``MellinVolatilityError`` and, where it makes sense, from the builtin
exception a caller would naturally catch (``ValueError``, ``KeyError``,
``RuntimeError``). The CLI maps these families to exit codes.
"""

from __future__ import annotations


class MellinVolatilityError(Exception):
    """Base class for all errors raised by mellin-volatility."""


class PoleError(MellinVolatilityError, ValueError):
    """Argument hits a pole of the Gamma function (0, -1, -2, ...)."""


class DomainError(MellinVolatilityError, ValueError):
    """Input lies outside the domain of an operation (e.g. nonpositive x)."""


class AdmissibilityError(MellinVolatilityError, ValueError):
    """The development point is not admissible for a noise or truth model."""


class ShapeMismatchError(MellinVolatilityError, ValueError):
    """Array shapes disagree with the declared grid or path layout."""


class StationarityError(MellinVolatilityError, ValueError):
    """Drift matrix has an eigenvalue with nonnegative real part."""


class EmptyCandidateGridError(MellinVolatilityError, ValueError):
    """No cutoff candidate satisfies the variance constraint."""


class ObservationParseError(MellinVolatilityError, ValueError):
    """An observations file could not be parsed.

    Attributes:
        row: 1-based data row number (header excluded) that failed, if known.
    """

    def __init__(self, message: str, row: int | None = None) -> None:
        super().__init__(message)
        self.row = row


class UnknownPresetError(MellinVolatilityError, KeyError):
    """Requested preset is not registered."""

    def __init__(self, name: str, available: list[str]) -> None:
        super().__init__(name)
        self.name = name
        self.available = available

    def __str__(self) -> str:
        return f"Unknown preset '{self.name}'. Available presets: {', '.join(self.available)}"


class NumericalDiagnosticError(MellinVolatilityError, RuntimeError):
    """A numerical self-check failed (e.g. non-vanishing imaginary residue)."""


class DivergentIntegralError(NumericalDiagnosticError):
    """Quadrature of an inverse noise transform failed to converge."""


class ReplicationError(MellinVolatilityError, RuntimeError):
    """A Monte-Carlo replication failed.

    Attributes:
        index: Replication index.
        seed: Entropy of the replication's seed sequence.
    """

    def __init__(self, index: int, seed: tuple[int, ...], cause: BaseException) -> None:
        super().__init__(f"Replication {index} (seed {seed}) failed: {cause}")
        self.index = index
        self.seed = seed
