"""Multiplicative noise models and their Mellin transforms.

The error ``U`` acts coordinatewise, ``Y = X * U``, with independent
coordinates. For a Gamma(p, rate q) coordinate

    M_c[g](t) = q^{1 - c - it} Gamma(p + c - 1 + it) / Gamma(p),

which for chi-squared noise (p = q = 1/2) at c = 1 reduces to
``2^{it} Gamma(1/2 + it) / sqrt(pi)`` and ``|M_1[g](t)|^-2 = cosh(pi t)``.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike
from scipy import integrate

from mellin_volatility.exceptions import AdmissibilityError, DivergentIntegralError, DomainError
from mellin_volatility.special import log_gamma_complex
from mellin_volatility.types import (
    ComplexArray,
    CutoffRect,
    DevelopmentPoint,
    FloatArray,
    NoiseKind,
    Pair,
    as_pair,
)

_CHI_SQUARED_PARAMS: Pair = (0.5, 0.5)


@dataclass(frozen=True)
class NoiseModel:
    """Product error density ``g`` of the multiplicative model.

    Attributes:
        kind: Law of each coordinate.
        shape: Gamma shape ``p`` per coordinate (fixed to 1/2 for chi-squared).
        rate: Gamma rate ``q`` per coordinate (fixed to 1/2 for chi-squared).

    Example:
        ```python
        noise = NoiseModel.chi_squared()
        mellin_g(noise, DevelopmentPoint(), (1.0, 0.0))
        ```
    """

    kind: NoiseKind = NoiseKind.CHI_SQUARED_1
    shape: Pair = _CHI_SQUARED_PARAMS
    rate: Pair = _CHI_SQUARED_PARAMS

    def __post_init__(self) -> None:
        if self.kind is NoiseKind.CHI_SQUARED_1:
            object.__setattr__(self, "shape", _CHI_SQUARED_PARAMS)
            object.__setattr__(self, "rate", _CHI_SQUARED_PARAMS)
        shape, rate = as_pair(self.shape), as_pair(self.rate)
        if min(shape) <= 0.0 or min(rate) <= 0.0:
            raise DomainError(f"Gamma noise needs positive shape and rate, got {shape}, {rate}")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "rate", rate)

    @classmethod
    def chi_squared(cls) -> NoiseModel:
        return cls(NoiseKind.CHI_SQUARED_1)

    @classmethod
    def gamma(cls, shape: ArrayLike, rate: ArrayLike) -> NoiseModel:
        return cls(NoiseKind.GAMMA, as_pair(shape), as_pair(rate))

    @classmethod
    def noiseless(cls) -> NoiseModel:
        return cls(NoiseKind.NOISELESS)

    @classmethod
    def from_kind(
        cls, kind: NoiseKind | str, shape: ArrayLike = (0.5, 0.5), rate: ArrayLike = (0.5, 0.5)
    ) -> NoiseModel:
        """Build from a kind plus (ignored unless gamma) parameters."""
        kind = NoiseKind(kind)
        if kind is NoiseKind.GAMMA:
            return cls.gamma(shape, rate)
        return cls(kind)

    @property
    def is_noiseless(self) -> bool:
        return self.kind is NoiseKind.NOISELESS

    def check_admissible(self, c: DevelopmentPoint) -> None:
        """Require ``p + c - 1 > 0`` so that ``E(U^{c-1})`` is finite.

        Raises:
            AdmissibilityError: If a coordinate violates the condition.
        """
        if self.is_noiseless:
            return
        for axis, (p, cl) in enumerate(zip(self.shape, c.pair, strict=True), start=1):
            if p + cl - 1.0 <= 0.0:
                raise AdmissibilityError(
                    f"Noise Mellin transform does not exist on axis {axis}: "
                    f"p + c - 1 = {p + cl - 1.0:g} <= 0"
                )

    def sample(self, rng: np.random.Generator, size: int) -> FloatArray:
        """Draw ``size`` independent noise pairs, shape ``(size, 2)``."""
        if self.is_noiseless:
            return np.ones((size, 2))
        if self.kind is NoiseKind.CHI_SQUARED_1:
            return rng.standard_normal((size, 2)) ** 2
        return rng.gamma(np.asarray(self.shape), 1.0 / np.asarray(self.rate), size=(size, 2))


def mellin_g_axis(model: NoiseModel, c: DevelopmentPoint, axis: int, t: ArrayLike) -> Any:
    """One coordinate factor of the noise Mellin transform.

    Args:
        model: Noise model.
        c: Development point.
        axis: 0 or 1.
        t: Frequencies.

    Returns:
        ``q^{1-c-it} Gamma(p + c - 1 + it) / Gamma(p)`` with the shape of ``t``.
    """
    t_arr = np.asarray(t, dtype=np.float64)
    if model.is_noiseless:
        return np.ones(t_arr.shape, dtype=np.complex128)
    model.check_admissible(c)
    p, q, cl = model.shape[axis], model.rate[axis], c.pair[axis]
    log_value = (
        (1.0 - cl - 1j * t_arr) * math.log(q)
        + log_gamma_complex(p + cl - 1.0 + 1j * t_arr)
        - log_gamma_complex(complex(p))
    )
    return np.exp(log_value)


def mellin_g(model: NoiseModel, c: DevelopmentPoint, t: ArrayLike) -> Any:
    """Mellin transform ``M_c[g](t)`` of the product noise density.

    Args:
        model: Noise model.
        c: Development point.
        t: A pair ``(t1, t2)``; each entry may be an array, broadcast together.

    Returns:
        A complex scalar for scalar frequencies, otherwise a complex array.

    Raises:
        AdmissibilityError: If ``p + c - 1 <= 0`` on some axis.
    """
    t1, t2 = t  # type: ignore[misc]
    value = mellin_g_axis(model, c, 0, t1) * mellin_g_axis(model, c, 1, t2)
    if np.ndim(value) == 0:
        return complex(value)
    return value


def mellin_g_grid(
    model: NoiseModel, c: DevelopmentPoint, t1: FloatArray, t2: FloatArray
) -> ComplexArray:
    """Noise Mellin transform on the tensor grid ``t1 x t2``."""
    return np.outer(mellin_g_axis(model, c, 0, t1), mellin_g_axis(model, c, 1, t2))


def _abs2_inv_axis(model: NoiseModel, c: DevelopmentPoint, axis: int, t: ArrayLike) -> Any:
    t_arr = np.asarray(t, dtype=np.float64)
    if model.is_noiseless:
        return np.ones(t_arr.shape)
    if model.kind is NoiseKind.CHI_SQUARED_1 and c.pair[axis] == 1.0:
        return np.cosh(np.pi * t_arr)
    return 1.0 / np.abs(mellin_g_axis(model, c, axis, t_arr)) ** 2


def mellin_g_abs2_inv(
    model: NoiseModel, t: ArrayLike, c: DevelopmentPoint | None = None
) -> Any:
    """``|M_c[g](t)|^-2``, in closed form ``cosh(pi t1) cosh(pi t2)`` for chi-squared at c = 1.

    Args:
        model: Noise model.
        t: A pair ``(t1, t2)`` of scalars or broadcastable arrays.
        c: Development point, defaults to ``(1, 1)``.

    Returns:
        A float for scalar frequencies, otherwise an array.
    """
    c = DevelopmentPoint.of(c)
    t1, t2 = t  # type: ignore[misc]
    value = _abs2_inv_axis(model, c, 0, t1) * _abs2_inv_axis(model, c, 1, t2)
    if np.ndim(value) == 0:
        return float(value)
    return value


def _axis_integral(model: NoiseModel, c: DevelopmentPoint, axis: int, k: float) -> float:
    # evaluated through log Gamma, never through a closed form
    def integrand(s: float) -> float:
        if model.is_noiseless:
            return 1.0
        return float(1.0 / abs(mellin_g_axis(model, c, axis, s)) ** 2)

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, _ = integrate.quad(integrand, -k, k, epsabs=0.0, epsrel=1e-12, limit=200)
        except integrate.IntegrationWarning as exc:  # pragma: no cover
            raise DivergentIntegralError(
                f"Quadrature of |M_c[g]|^-2 on axis {axis + 1} over [-{k}, {k}] "
                f"did not converge: {exc}"
            ) from exc
    if not math.isfinite(value):  # pragma: no cover
        raise DivergentIntegralError(f"|M_c[g]|^-2 is not integrable on axis {axis + 1}")
    return float(value)


def _as_box(k: CutoffRect | ArrayLike) -> Pair:
    return k.pair if isinstance(k, CutoffRect) else as_pair(k)


def lambda_g_quadrature(
    model: NoiseModel, c: DevelopmentPoint | None, k: CutoffRect | ArrayLike
) -> float:
    """``Lambda_g(k)`` by adaptive quadrature, one axis at a time.

    Raises:
        DivergentIntegralError: If the quadrature does not converge.
    """
    c = DevelopmentPoint.of(c)
    k1, k2 = _as_box(k)
    if k1 <= 0.0 or k2 <= 0.0:
        return 0.0
    model.check_admissible(c)
    product = _axis_integral(model, c, 0, k1) * _axis_integral(model, c, 1, k2)
    return product / (4.0 * math.pi**2)


@functools.lru_cache(maxsize=4096)
def lambda_g_axis(model: NoiseModel, c: DevelopmentPoint, axis: int, k: float) -> float:
    """One-axis factor ``int_[-k, k] |M_c[g]|^-2``, in closed form when available."""
    if k <= 0.0:
        return 0.0
    if model.is_noiseless:
        return 2.0 * k
    if model.kind is NoiseKind.CHI_SQUARED_1 and c.pair[axis] == 1.0:
        return 2.0 * math.sinh(math.pi * k) / math.pi
    model.check_admissible(c)
    return _axis_integral(model, c, axis, k)


def lambda_g(model: NoiseModel, c: DevelopmentPoint | None, k: CutoffRect | ArrayLike) -> float:
    """Variance functional ``Lambda_g(k) = (4 pi^2)^-1 int_[-k,k] |M_c[g](t)|^-2 dt``.

    Closed forms are used for chi-squared noise at ``c = (1, 1)``
    (``sinh(pi k1) sinh(pi k2) / pi^4``) and for direct observation
    (``k1 k2 / pi^2``); other cases use adaptive quadrature. A box with a
    zero side has measure zero and yields 0.

    Args:
        model: Noise model.
        c: Development point, defaults to ``(1, 1)``.
        k: Cutoff rectangle or a pair of nonnegative numbers.

    Returns:
        ``Lambda_g(k) >= 0``.
    """
    c = DevelopmentPoint.of(c)
    k1, k2 = _as_box(k)
    if k1 <= 0.0 or k2 <= 0.0:
        return 0.0
    if model.is_noiseless:
        return k1 * k2 / math.pi**2
    if model.kind is NoiseKind.CHI_SQUARED_1 and c.is_unit:
        return math.sinh(math.pi * k1) * math.sinh(math.pi * k2) / math.pi**4
    return lambda_g_axis(model, c, 0, k1) * lambda_g_axis(model, c, 1, k2) / (4.0 * math.pi**2)
