"""Analytic stationary densities and their Mellin transforms.

Each truth is the stationary law of one of the simulated processes:

- ``lognormal``: ``V = exp(Z)`` with ``Z ~ N(0, S)``, the exponential OU case.
- ``gamma``: independent Gamma(rho, rate) coordinates, the CIR case.
- ``loggamma``: ``V = exp(Z)`` with Gamma(rho, rate) coordinates ``Z``, the
  exponential CIR case.

At a development point ``c`` the Mellin transform is ``E[V^{s}]`` with
``s = c - 1 + it``, which is available in closed form for all three.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike
from scipy import integrate, special

from mellin_volatility.config import CIRParams, OUParams
from mellin_volatility.exceptions import AdmissibilityError, DomainError
from mellin_volatility.mellin import FOUR_PI_SQ, as_points, inverse_mellin_surface
from mellin_volatility.processes import stationary_cov_ou
from mellin_volatility.special import log_gamma_complex
from mellin_volatility.types import (
    ComplexArray,
    CutoffRect,
    DevelopmentPoint,
    FloatArray,
    FrequencyGrid,
    Pair,
    ProcessKind,
    TruthKind,
    as_pair,
)

Matrix2 = tuple[tuple[float, float], tuple[float, float]]

DEFAULT_LOGNORMAL_COV: Matrix2 = ((4.0 / 7.0, 1.0 / 7.0), (1.0 / 7.0, 2.0 / 7.0))
"""Stationary covariance of the default OU process."""


@dataclass(frozen=True)
class TailConfig:
    """Truncation of the frequency complement in bias computations.

    Attributes:
        radius: Split point ``T``; ``[k, T]`` and ``[T, inf)`` are integrated
            separately per axis.
        rel_tol: Relative tolerance of the adaptive quadrature.
    """

    radius: float = 60.0
    rel_tol: float = 1e-10


@dataclass(frozen=True, eq=False)
class TruthSpec:
    """An analytic bivariate density on ``(0, inf)^2``.

    Use the factories rather than the constructor.

    Attributes:
        kind: Family.
        cov: Covariance ``S`` of ``log V`` (lognormal only).
        shape: Gamma shape ``rho`` per coordinate (gamma and loggamma).
        rate: Gamma rate per coordinate (gamma and loggamma).

    Example:
        ```python
        truth = TruthSpec.lognormal()
        truth.density((1.0, 1.0))  # sqrt(7) / (2 pi)
        mellin_at(truth, (1.0, 0.0))  # exp(-2/7)
        ```
    """

    kind: TruthKind
    cov: Matrix2 | None = None
    shape: Pair = (1.0, 1.0)
    rate: Pair = (1.0, 1.0)

    def __post_init__(self) -> None:
        if self.kind is TruthKind.BIV_LOGNORMAL:
            if self.cov is None:
                raise DomainError("A lognormal truth needs a covariance matrix")
            cov = np.asarray(self.cov, dtype=np.float64)
            if cov.shape != (2, 2) or not np.allclose(cov, cov.T):
                raise DomainError("Covariance must be a symmetric 2x2 matrix")
            if np.any(np.linalg.eigvalsh(cov) <= 0.0):
                raise DomainError("Covariance must be positive definite")
        elif min(self.shape) <= 0.0 or min(self.rate) <= 0.0:
            raise DomainError(f"Shape and rate must be positive, got {self.shape}, {self.rate}")

    @classmethod
    def lognormal(cls, cov: ArrayLike | None = None) -> TruthSpec:
        """Bivariate log-normal with ``log V ~ N(0, cov)``."""
        matrix = np.asarray(DEFAULT_LOGNORMAL_COV if cov is None else cov, dtype=np.float64)
        frozen = (
            (float(matrix[0, 0]), float(matrix[0, 1])),
            (float(matrix[1, 0]), float(matrix[1, 1])),
        )
        return cls(TruthKind.BIV_LOGNORMAL, cov=frozen)

    @classmethod
    def gamma_product(
        cls, shape: ArrayLike = (3.0, 3.0), rate: ArrayLike = (1.0, 1.0)
    ) -> TruthSpec:
        """Independent Gamma(shape, rate) coordinates."""
        return cls(TruthKind.GAMMA_PRODUCT, shape=as_pair(shape), rate=as_pair(rate))

    @classmethod
    def loggamma_product(
        cls, shape: ArrayLike = (2.0, 2.0), rate: ArrayLike = (1.0, 1.0)
    ) -> TruthSpec:
        """``exp`` of independent Gamma(shape, rate) coordinates, supported on ``(1, inf)^2``."""
        return cls(TruthKind.LOGGAMMA_PRODUCT, shape=as_pair(shape), rate=as_pair(rate))

    @property
    def cov_matrix(self) -> FloatArray:
        if self.cov is None:
            raise DomainError(f"{self.kind.value} truth has no covariance matrix")
        return np.asarray(self.cov, dtype=np.float64)

    def check_admissible(self, c: DevelopmentPoint) -> None:
        """Require ``E[V^{c-1}] < inf``.

        Raises:
            AdmissibilityError: For gamma if ``rho + c - 1 <= 0``, for loggamma
                if ``c - 1 >= rate``.
        """
        for axis in range(2):
            a = c.pair[axis] - 1.0
            if self.kind is TruthKind.GAMMA_PRODUCT and self.shape[axis] + a <= 0.0:
                raise AdmissibilityError(
                    f"Gamma truth has no Mellin transform at c{axis + 1} = {c.pair[axis]}"
                )
            if self.kind is TruthKind.LOGGAMMA_PRODUCT and a >= self.rate[axis]:
                raise AdmissibilityError(
                    f"Log-Gamma truth has no Mellin transform at c{axis + 1} = {c.pair[axis]}"
                )

    def density(self, x: ArrayLike) -> Any:
        return density_at(self, x)

    def surface(self, x_axis: ArrayLike, y_axis: ArrayLike) -> FloatArray:
        x1, x2 = np.meshgrid(
            np.asarray(x_axis, dtype=np.float64),
            np.asarray(y_axis, dtype=np.float64),
            indexing="ij",
        )
        values = density_at(self, np.column_stack([x1.ravel(), x2.ravel()]))
        return np.asarray(values).reshape(x1.shape)


def density_at(spec: TruthSpec, x: ArrayLike) -> Any:
    """Evaluate the density at one point or at the rows of an ``(m, 2)`` array.

    Args:
        spec: Truth.
        x: A positive pair or an array of positive pairs.

    Returns:
        A float for a single point, otherwise a float array of length ``m``.

    Raises:
        DomainError: If some coordinate is not strictly positive.
    """
    points, single = as_points(x)
    logs = np.log(points)

    if spec.kind is TruthKind.BIV_LOGNORMAL:
        cov = spec.cov_matrix
        quad_form = np.einsum("ij,jk,ik->i", logs, np.linalg.inv(cov), logs)
        norm = 2.0 * math.pi * math.sqrt(np.linalg.det(cov))
        values = np.exp(-0.5 * quad_form) / (norm * points[:, 0] * points[:, 1])
    elif spec.kind is TruthKind.GAMMA_PRODUCT:
        rho, rate = np.asarray(spec.shape), np.asarray(spec.rate)
        log_density = rho * np.log(rate) + (rho - 1.0) * logs - rate * points - special.gammaln(rho)
        values = np.exp(log_density.sum(axis=1))
    else:
        rho, rate = np.asarray(spec.shape), np.asarray(spec.rate)
        inside = np.all(points > 1.0, axis=1)
        z = np.where(inside[:, None], logs, 1.0)
        log_density = (
            rho * np.log(rate) + (rho - 1.0) * np.log(z) - (rate + 1.0) * z - special.gammaln(rho)
        )
        values = np.where(inside, np.exp(log_density.sum(axis=1)), 0.0)

    return float(values[0]) if single else values


def _log_mellin_axis(spec: TruthSpec, axis: int, s: ArrayLike) -> Any:
    s_arr = np.asarray(s, dtype=np.complex128)
    rho, rate = spec.shape[axis], spec.rate[axis]
    if spec.kind is TruthKind.GAMMA_PRODUCT:
        log_norm = log_gamma_complex(complex(rho)) + s_arr * math.log(rate)
        return log_gamma_complex(rho + s_arr) - log_norm
    return -rho * np.log(1.0 - s_arr / rate)


def mellin_at(spec: TruthSpec, t: ArrayLike, c: DevelopmentPoint | ArrayLike | None = None) -> Any:
    """Closed-form Mellin transform ``M_c[f](t) = E[V^{c - 1 + it}]``.

    Args:
        spec: Truth.
        t: A pair ``(t1, t2)``; entries may be broadcastable arrays.
        c: Development point, defaults to ``(1, 1)``.

    Returns:
        A complex scalar for scalar frequencies, otherwise a complex array.

    Raises:
        AdmissibilityError: If the transform does not exist at ``c``.
    """
    c = DevelopmentPoint.of(c)
    spec.check_admissible(c)
    t1, t2 = (np.asarray(v, dtype=np.float64) for v in t)  # type: ignore[union-attr]
    s1 = (c.c1 - 1.0) + 1j * t1
    s2 = (c.c2 - 1.0) + 1j * t2
    if spec.kind is TruthKind.BIV_LOGNORMAL:
        (a, b), (_, d) = spec.cov_matrix
        value = np.exp(0.5 * (a * s1 * s1 + 2.0 * b * s1 * s2 + d * s2 * s2))
    else:
        value = np.exp(_log_mellin_axis(spec, 0, s1) + _log_mellin_axis(spec, 1, s2))
    if np.ndim(value) == 0:
        return complex(value)
    return value


def mellin_grid(
    spec: TruthSpec, grid: FrequencyGrid, c: DevelopmentPoint | ArrayLike | None = None
) -> ComplexArray:
    """``mellin_at`` on every node of a frequency grid."""
    t1, t2 = grid.mesh()
    return np.asarray(mellin_at(spec, (t1, t2), c), dtype=np.complex128)


def truth_surface_approximation(
    spec: TruthSpec,
    c: DevelopmentPoint | ArrayLike | None,
    grid: FrequencyGrid,
    x_axis: ArrayLike,
    y_axis: ArrayLike,
) -> FloatArray:
    """Truncated inverse of the analytic transform on a tensor grid of points."""
    return inverse_mellin_surface(mellin_grid(spec, grid, c), c, None, grid, x_axis, y_axis)


def _gaussian_box_complement(cov: FloatArray, k1: float, k2: float) -> float:
    """``int exp(-t^T S t) dt`` over the complement of ``[-k1, k1] x [-k2, k2]``."""
    s11, s12, s22 = float(cov[0, 0]), float(cov[0, 1]), float(cov[1, 1])
    a = (s11 * s22 - s12 * s12) / s22
    root22 = math.sqrt(s22)
    # |t1| > k1 with t2 free; the t2 integral completes the square
    outer = math.pi / math.sqrt(s22 * a) * float(special.erfc(math.sqrt(a) * k1))
    if k1 == 0.0:
        return outer

    def strip(t1: float) -> float:
        b = s12 * t1 / s22
        tails = special.erfc(root22 * (k2 + b)) + special.erfc(root22 * (k2 - b))
        return math.exp(-a * t1 * t1) * 0.5 * math.sqrt(math.pi / s22) * float(tails)

    inner, _ = integrate.quad(strip, 0.0, k1, epsabs=0.0, epsrel=1e-12, limit=200)
    return outer + 2.0 * inner


def _abs2_axis(spec: TruthSpec, c: DevelopmentPoint, axis: int) -> Any:
    a = c.pair[axis] - 1.0

    def value(t: float) -> float:
        return math.exp(2.0 * float(np.real(_log_mellin_axis(spec, axis, complex(a, t)))))

    return value


def _axis_integral(f: Any, lo: float, hi: float, tail: TailConfig) -> float:
    result, _ = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=tail.rel_tol, limit=400)
    return float(result)


def _axis_tail(f: Any, k: float, tail: TailConfig) -> float:
    """``int_{|t| > k} f`` for an even ``f``."""
    if k >= tail.radius:
        return 2.0 * _axis_integral(f, k, math.inf, tail)
    near = _axis_integral(f, k, tail.radius, tail)
    return 2.0 * (near + _axis_integral(f, tail.radius, math.inf, tail))


def bias_norm_sq(
    spec: TruthSpec,
    c: DevelopmentPoint | ArrayLike | None = None,
    k: CutoffRect | ArrayLike = (0.0, 0.0),
    tail: TailConfig | None = None,
) -> float:
    """Squared weighted distance ``||f - f_k||^2 = (4 pi^2)^-1 int_{[-k,k]^c} |M_c[f]|^2``.

    The lognormal case reduces to one-dimensional error-function integrals;
    the product truths factor per axis and use adaptive quadrature on the
    complement, split at ``tail.radius``.

    Args:
        spec: Truth.
        c: Development point, defaults to ``(1, 1)``.
        k: Cutoff; a zero coordinate is allowed and ``k = (0, 0)`` gives ``||f||^2``.
        tail: Tail quadrature settings.

    Returns:
        A nonnegative float, decreasing in each coordinate of ``k``.
    """
    c = DevelopmentPoint.of(c)
    spec.check_admissible(c)
    tail = tail or TailConfig()
    k1, k2 = k.pair if isinstance(k, CutoffRect) else as_pair(k)
    if k1 < 0.0 or k2 < 0.0:
        raise DomainError(f"Cutoff must be nonnegative, got ({k1}, {k2})")

    if spec.kind is TruthKind.BIV_LOGNORMAL:
        cov = spec.cov_matrix
        shift = c.array - 1.0
        # |exp(s^T S s / 2)|^2 = exp(a^T S a) exp(-t^T S t) for s = a + it
        scale = math.exp(float(shift @ cov @ shift))
        return scale * _gaussian_box_complement(cov, k1, k2) / FOUR_PI_SQ

    f1, f2 = _abs2_axis(spec, c, 0), _abs2_axis(spec, c, 1)
    tail1, tail2 = _axis_tail(f1, k1, tail), _axis_tail(f2, k2, tail)
    box1 = 2.0 * _axis_integral(f1, 0.0, k1, tail) if k1 > 0.0 else 0.0
    full2 = _axis_tail(f2, 0.0, tail)
    return (tail1 * full2 + box1 * tail2) / FOUR_PI_SQ


def norm_sq(spec: TruthSpec, c: DevelopmentPoint | ArrayLike | None = None) -> float:
    """``||f||^2`` in the weighted norm of ``c``."""
    return bias_norm_sq(spec, c, (0.0, 0.0))


def truth_for_process(
    process: ProcessKind | str, ou: OUParams | None = None, cir: CIRParams | None = None
) -> TruthSpec:
    """The analytic stationary law of a simulated process.

    Example:
        ```python
        truth_for_process("exp-ou")  # lognormal with the default OU covariance
        truth_for_process("cir", cir=CIRParams(theta=(2.0, 4.0)))  # Gamma((2, 4), 1)
        ```
    """
    process = ProcessKind(process)
    if process is ProcessKind.EXP_OU:
        return TruthSpec.lognormal(stationary_cov_ou(ou or OUParams()))
    params = cir or CIRParams()
    shape, rate = params.stationary_shape, params.stationary_rate
    if process is ProcessKind.CIR:
        return TruthSpec.gamma_product(shape, rate)
    return TruthSpec.loggamma_product(shape, rate)
