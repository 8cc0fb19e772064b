"""Type definitions for the estimation library.

This module contains the data structures shared across modules: model
kinds, the development point, cutoff rectangles, the frequency quadrature
grid, observation sets and simulated path bundles.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import TYPE_CHECKING

import numpy as np
from numpy.typing import ArrayLike, NDArray

from mellin_volatility.exceptions import DomainError

if TYPE_CHECKING:
    from mellin_volatility.config import PathConfig

FloatArray = NDArray[np.float64]
ComplexArray = NDArray[np.complex128]
Pair = tuple[float, float]

DEFAULT_FREQUENCY_STEP = 0.05
"""Default trapezoid step ``h_t`` of the frequency grid."""


class ProcessKind(str, Enum):
    """Volatility processes that can be simulated."""

    EXP_OU = "exp-ou"
    """Exponential of a bivariate Ornstein-Uhlenbeck process."""

    CIR = "cir"
    """Bivariate Cox-Ingersoll-Ross process with independent coordinates."""

    EXP_CIR = "exp-cir"
    """Exponential of a bivariate Cox-Ingersoll-Ross process."""


class NoiseKind(str, Enum):
    """Multiplicative error laws, one independent factor per coordinate."""

    CHI_SQUARED_1 = "chi2"
    """Chi-squared with one degree of freedom, i.e. Gamma(1/2, rate 1/2)."""

    GAMMA = "gamma"
    """Gamma(p, rate q) per coordinate."""

    NOISELESS = "none"
    """Direct observation; the noise Mellin transform is identically one."""


class TruthKind(str, Enum):
    """Analytic stationary densities with closed-form Mellin transforms."""

    BIV_LOGNORMAL = "lognormal"
    """Bivariate log-normal, stationary law of the exponential OU process."""

    GAMMA_PRODUCT = "gamma"
    """Product of Gamma laws, stationary law of the CIR process."""

    LOGGAMMA_PRODUCT = "loggamma"
    """Product of log-Gamma laws, stationary law of the exponential CIR process."""


class SelectionMode(str, Enum):
    """Penalty used by the data-driven cutoff selection."""

    VOLATILITY = "volatility"
    """``chi k1 k2 exp(pi (k1 + k2)) / n`` for chi-squared noise."""

    GENERAL = "general"
    """``chi mu_Y k1 k2 Lambda_g(k) / n`` for any admissible noise."""


class DevelopmentPointWarning(UserWarning):
    """Development point below the thresholds required by the risk bounds."""


class FellerConditionWarning(UserWarning):
    """CIR parameters violate ``2 kappa theta >= sigma^2``."""


def as_pair(value: ArrayLike) -> Pair:
    """Coerce a length-2 sequence into a float pair."""
    arr = np.asarray(value, dtype=np.float64).reshape(-1)
    if arr.size != 2:
        raise DomainError(f"Expected a pair of values, got {arr.size}")
    return float(arr[0]), float(arr[1])


@dataclass(frozen=True)
class DevelopmentPoint:
    """Vertical line ``c = (c1, c2)`` along which Mellin transforms are taken.

    Attributes:
        c1: First coordinate.
        c2: Second coordinate.
    """

    c1: float = 1.0
    c2: float = 1.0

    @classmethod
    def of(cls, value: DevelopmentPoint | ArrayLike | None) -> DevelopmentPoint:
        """Build from a pair, pass an instance through, default on None."""
        if value is None:
            return cls()
        if isinstance(value, DevelopmentPoint):
            return value
        c1, c2 = as_pair(value)
        return cls(c1, c2)

    @property
    def pair(self) -> Pair:
        return (self.c1, self.c2)

    @property
    def array(self) -> FloatArray:
        return np.array([self.c1, self.c2])

    @property
    def is_unit(self) -> bool:
        """Whether ``c = (1, 1)``, the main case."""
        return self.c1 == 1.0 and self.c2 == 1.0

    def check_theory(self) -> None:
        """Warn when ``c`` is below the thresholds of the risk/adaptivity bounds."""
        if self.is_unit:
            return
        if min(self.pair) <= 0.75:
            warnings.warn(
                f"Development point {self.pair} is not > (3/4, 3/4); "
                "risk bounds do not cover this case.",
                DevelopmentPointWarning,
                stacklevel=3,
            )
        elif min(self.pair) <= 0.875:
            warnings.warn(
                f"Development point {self.pair} is not > (7/8, 7/8); "
                "adaptivity bounds do not cover this case.",
                DevelopmentPointWarning,
                stacklevel=3,
            )


@dataclass(frozen=True, order=True)
class CutoffRect:
    """Anisotropic spectral cutoff ``k = (k1, k2)``; the box is ``[-k, k]``.

    Ordering is lexicographic on ``(k1, k2)``.
    """

    k1: float
    k2: float

    def __post_init__(self) -> None:
        if not (self.k1 > 0.0 and self.k2 > 0.0) or not (
            math.isfinite(self.k1) and math.isfinite(self.k2)
        ):
            raise DomainError(f"Cutoff must be positive and finite, got ({self.k1}, {self.k2})")

    @classmethod
    def of(cls, value: CutoffRect | ArrayLike) -> CutoffRect:
        if isinstance(value, CutoffRect):
            return value
        k1, k2 = as_pair(value)
        return cls(k1, k2)

    @property
    def pair(self) -> Pair:
        return (self.k1, self.k2)

    @property
    def area(self) -> float:
        """Lebesgue measure of the box ``[-k, k]``."""
        return 4.0 * self.k1 * self.k2

    def contains(self, other: CutoffRect) -> bool:
        """Whether ``other``'s box is nested inside this one."""
        return other.k1 <= self.k1 and other.k2 <= self.k2


def _axis_nodes(k: float, step: float) -> tuple[FloatArray, FloatArray]:
    # 1e-9 guards k/step landing a hair above an integer.
    half = max(1, math.ceil(k / step - 1e-9))
    spacing = k / half
    nodes = np.arange(-half, half + 1, dtype=np.float64) * spacing
    weights = np.full(nodes.size, spacing)
    weights[0] *= 0.5
    weights[-1] *= 0.5
    return nodes, weights


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    """Tensor-product trapezoid grid on the box ``[-k1, k1] x [-k2, k2]``.

    Each axis is a uniform partition with ``2 * ceil(k / step) + 1`` nodes,
    symmetric about zero, so Hermitian integrands integrate to a real value.

    Attributes:
        cutoff: The box.
        step: Requested node spacing ``h_t``; the realized spacing per axis is
            ``k / ceil(k / step)``.
    """

    cutoff: CutoffRect
    step: float = DEFAULT_FREQUENCY_STEP

    def __post_init__(self) -> None:
        if not self.step > 0.0:
            raise DomainError(f"Grid step must be positive, got {self.step}")

    @cached_property
    def _axis1(self) -> tuple[FloatArray, FloatArray]:
        return _axis_nodes(self.cutoff.k1, self.step)

    @cached_property
    def _axis2(self) -> tuple[FloatArray, FloatArray]:
        return _axis_nodes(self.cutoff.k2, self.step)

    @property
    def t1(self) -> FloatArray:
        return self._axis1[0]

    @property
    def t2(self) -> FloatArray:
        return self._axis2[0]

    @property
    def w1(self) -> FloatArray:
        return self._axis1[1]

    @property
    def w2(self) -> FloatArray:
        return self._axis2[1]

    @property
    def spacing(self) -> Pair:
        """Realized node spacing per axis."""
        return (float(self.w1[1]), float(self.w2[1]))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.t1.size, self.t2.size)

    @property
    def weights(self) -> FloatArray:
        """Outer product of axis weights, shape ``self.shape``."""
        return np.outer(self.w1, self.w2)

    def mesh(self) -> tuple[FloatArray, FloatArray]:
        """Node coordinates as two arrays of shape ``self.shape``."""
        t1, t2 = np.meshgrid(self.t1, self.t2, indexing="ij")
        return t1, t2

    def integrate(self, values: ArrayLike) -> complex:
        """Trapezoid quadrature of node values over the box."""
        arr = np.asarray(values)
        return complex(self.w1 @ arr @ self.w2)

    def sub_slices(self, cutoff: CutoffRect) -> tuple[slice, slice] | None:
        """Index slices of a nested box whose edges fall on this grid's nodes.

        Returns None when ``cutoff`` is not nested or not node-aligned.
        """
        if not self.cutoff.contains(cutoff):
            return None
        slices: list[slice] = []
        for k, spacing, size in zip(cutoff.pair, self.spacing, self.shape, strict=True):
            ratio = k / spacing
            m = round(ratio)
            if m < 1 or abs(ratio - m) > 1e-9:
                return None
            centre = size // 2
            slices.append(slice(centre - m, centre + m + 1))
        return slices[0], slices[1]


@dataclass(frozen=True, eq=False)
class ObservationSet:
    """A sample of positive bivariate observations.

    Attributes:
        rows: Array of shape ``(n, 2)``, every entry strictly positive.
        delta: Sampling step ``Delta`` in (0, 1).
        c: Development point used by estimators built on this sample.
    """

    rows: FloatArray
    delta: float = 0.01
    c: DevelopmentPoint = field(default_factory=DevelopmentPoint)

    def __post_init__(self) -> None:
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim != 2 or rows.shape[1] != 2:
            raise DomainError(f"Observations must have shape (n, 2), got {rows.shape}")
        if rows.shape[0] < 1:
            raise DomainError("Observation set must contain at least one row")
        if not np.all(np.isfinite(rows)) or np.any(rows <= 0.0):
            raise DomainError("All observations must be finite and strictly positive")
        if not 0.0 < self.delta < 1.0:
            raise DomainError(f"Sampling step must lie in (0, 1), got {self.delta}")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return int(self.rows.shape[0])

    @cached_property
    def log_rows(self) -> FloatArray:
        return np.log(self.rows)

    def with_c(self, c: DevelopmentPoint | ArrayLike) -> ObservationSet:
        """Same sample with another development point."""
        return ObservationSet(self.rows, self.delta, DevelopmentPoint.of(c))


@dataclass(frozen=True, eq=False)
class PathBundle:
    """Simulated volatility with its integrated volatilities.

    Attributes:
        vbar: Integrated volatilities ``Vbar_j``, shape ``(n, 2)``, positive.
        meta: Path configuration used for the simulation.
        process: Which process was simulated.
        raw_path: Fine-grid volatility path, shape ``(n * m + 1, 2)``, if kept.
        latent_path: Fine-grid latent state before exponentiation
            (exponential processes only), if kept.
    """

    vbar: FloatArray
    meta: PathConfig
    process: ProcessKind
    raw_path: FloatArray | None = None
    latent_path: FloatArray | None = None

    @property
    def n(self) -> int:
        return int(self.vbar.shape[0])

    def as_observations(self, c: DevelopmentPoint | None = None) -> ObservationSet:
        """The integrated volatilities as a noiseless observation set."""
        return ObservationSet(self.vbar, self.meta.delta, DevelopmentPoint.of(c))
