"""Empirical, inverse and Plancherel-type Mellin computations on (0, inf)^2.

For a development point ``c`` the Mellin transform of ``h`` is

    M_c[h](t) = int x^{c - 1 + it} h(x) dx,

and a function with transform ``H`` supported on the box ``[-k, k]`` is
recovered by ``(2 pi)^-2 int_[-k, k] x^{-c - it} H(t) dt``. All frequency
integrals are trapezoid sums on a ``FrequencyGrid``.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from typing import Any

import numpy as np
from numpy.typing import ArrayLike
from scipy import integrate

from mellin_volatility.exceptions import DomainError, NumericalDiagnosticError, ShapeMismatchError
from mellin_volatility.types import (
    ComplexArray,
    CutoffRect,
    DevelopmentPoint,
    FloatArray,
    FrequencyGrid,
    ObservationSet,
    as_pair,
)

FOUR_PI_SQ = 4.0 * math.pi**2
IMAGINARY_TOLERANCE = 1e-8
"""Largest admissible imaginary residue relative to the absolute quadrature mass."""

DEFAULT_X_DOMAIN: tuple[float, float] = (1e-4, 60.0)
DEFAULT_X_RESOLUTION = 400

_CHUNK_ROWS = 4096

FrequencyFunction = Callable[[FloatArray, FloatArray], ArrayLike]
"""``H(t1, t2)`` evaluated on meshgrid arrays of the frequency nodes."""


def as_points(x: ArrayLike) -> tuple[FloatArray, bool]:
    """Points in ``(0, inf)^2`` as an ``(m, 2)`` array, and whether a single pair was given."""
    arr = np.asarray(x, dtype=np.float64)
    single = arr.ndim == 1
    points = np.atleast_2d(arr)
    if points.ndim != 2 or points.shape[1] != 2:
        raise ShapeMismatchError(f"Points must be a pair or an (m, 2) array, got shape {arr.shape}")
    if not np.all(np.isfinite(points)) or np.any(points <= 0.0):
        raise DomainError("Evaluation points must be finite and strictly positive")
    return points, single


def _positive_axis(values: ArrayLike) -> FloatArray:
    axis = np.asarray(values, dtype=np.float64).reshape(-1)
    if axis.size == 0 or not np.all(np.isfinite(axis)) or np.any(axis <= 0.0):
        raise DomainError("Evaluation axis must be nonempty, finite and strictly positive")
    return axis


def resolve_grid(
    k: CutoffRect | ArrayLike | None, grid: FrequencyGrid | None, step: float | None = None
) -> FrequencyGrid:
    """Pick the frequency grid for a box, building a default one if needed.

    Raises:
        ShapeMismatchError: If ``grid`` covers a different box than ``k``.
    """
    if grid is None:
        if k is None:
            raise DomainError("Either a cutoff or a frequency grid is required")
        cutoff = CutoffRect.of(k)
        return FrequencyGrid(cutoff) if step is None else FrequencyGrid(cutoff, step)
    if k is not None and CutoffRect.of(k) != grid.cutoff:
        raise ShapeMismatchError(
            f"Frequency grid covers {grid.cutoff.pair}, "
            f"not the requested box {CutoffRect.of(k).pair}"
        )
    return grid


def values_on_grid(H: FrequencyFunction | ArrayLike, grid: FrequencyGrid) -> ComplexArray:
    """Tabulate ``H`` on the grid nodes.

    ``H`` may be a callable on meshgrid arrays, an array matching ``grid.shape``
    or a scalar (a constant transform).
    """
    if callable(H):
        t1, t2 = grid.mesh()
        values = np.asarray(H(t1, t2), dtype=np.complex128)
    else:
        values = np.asarray(H, dtype=np.complex128)
    if values.ndim == 0:
        return np.full(grid.shape, complex(values))
    if values.shape != grid.shape:
        raise ShapeMismatchError(
            f"Transform table has shape {values.shape}, grid has {grid.shape}"
        )
    return values


def empirical_mellin(obs: ObservationSet, t: ArrayLike) -> complex:
    """Empirical Mellin transform ``n^-1 sum_j Y_j^{c - 1 + it}`` at one frequency.

    Evaluated in log space. ``empirical_mellin(obs, -t)`` is exactly the
    complex conjugate of ``empirical_mellin(obs, t)``.

    Args:
        obs: Observation sample; its ``c`` is used.
        t: Frequency pair ``(t1, t2)``.

    Returns:
        The complex transform value.

    Example:
        ```python
        obs = ObservationSet(np.array([[math.e, 1.0], [1.0, 1.0]]))
        empirical_mellin(obs, (1.0, 0.0))  # (0.7702+0.4207j)
        ```
    """
    t1, t2 = as_pair(t)
    logs = obs.log_rows
    c1, c2 = obs.c.pair
    magnitude = np.exp((c1 - 1.0) * logs[:, 0] + (c2 - 1.0) * logs[:, 1])
    phase = t1 * logs[:, 0] + t2 * logs[:, 1]
    real = float(np.sum(magnitude * np.cos(phase)))
    imag = float(np.sum(magnitude * np.sin(phase)))
    return complex(real, imag) / obs.n


def empirical_mellin_grid(obs: ObservationSet, grid: FrequencyGrid) -> ComplexArray:
    """Empirical Mellin transform on every node of a frequency grid.

    The tensor structure ``Y^{s} = Y_1^{s_1} Y_2^{s_2}`` turns the table into a
    matrix product, accumulated over fixed-size row chunks.

    Args:
        obs: Observation sample; its ``c`` is used.
        grid: Frequency grid.

    Returns:
        Complex array of shape ``grid.shape``.
    """
    c1, c2 = obs.c.pair
    s1 = (c1 - 1.0) + 1j * grid.t1
    s2 = (c2 - 1.0) + 1j * grid.t2
    table = np.zeros(grid.shape, dtype=np.complex128)
    logs = obs.log_rows
    for start in range(0, obs.n, _CHUNK_ROWS):
        chunk = logs[start : start + _CHUNK_ROWS]
        a1 = np.exp(s1[:, None] * chunk[None, :, 0])
        a2 = np.exp(s2[:, None] * chunk[None, :, 1])
        table += a1 @ a2.T
    return table / obs.n


def _inverse_kernel(axis: FloatArray, c: float, t: FloatArray, weights: FloatArray) -> ComplexArray:
    log_axis = np.log(axis)
    return (axis ** (-c))[:, None] * np.exp(-1j * np.outer(log_axis, t)) * weights[None, :]


def _check_imaginary(values: ComplexArray, scale: FloatArray) -> None:
    residue = np.abs(values.imag)
    if np.any(residue > IMAGINARY_TOLERANCE * scale):
        worst = float(np.max(residue / np.where(scale > 0.0, scale, 1.0)))
        raise NumericalDiagnosticError(
            f"Inverse Mellin quadrature left an imaginary residue of {worst:.3e} "
            "relative to its absolute mass; the transform is not Hermitian on the grid"
        )


def inverse_mellin_cutoff(
    H: FrequencyFunction | ArrayLike,
    c: DevelopmentPoint | ArrayLike | None,
    k: CutoffRect | ArrayLike | None,
    grid: FrequencyGrid | None,
    x: ArrayLike,
) -> Any:
    """Truncated inverse Mellin transform ``(2 pi)^-2 int_[-k, k] x^{-c-it} H(t) dt``.

    The imaginary part of the quadrature must vanish up to
    ``IMAGINARY_TOLERANCE`` of the absolute mass and is discarded.

    Args:
        H: Transform, as a callable, a table on ``grid`` or a constant.
        c: Development point, defaults to ``(1, 1)``.
        k: Cutoff box; may be None when ``grid`` is given.
        grid: Frequency grid on ``[-k, k]``; built with the default step when None.
        x: A positive pair or an ``(m, 2)`` array of positive pairs.

    Returns:
        A float for a single point, otherwise a float array of length ``m``.

    Raises:
        DomainError: If some ``x`` is not strictly positive.
        NumericalDiagnosticError: If the imaginary residue is too large.

    Example:
        ```python
        inverse_mellin_cutoff(1.0, None, (1.0, 1.0), None, (1.0, 1.0))  # 1 / pi^2
        ```
    """
    c = DevelopmentPoint.of(c)
    grid = resolve_grid(k, grid)
    table = values_on_grid(H, grid)
    points, single = as_points(x)

    k1 = _inverse_kernel(points[:, 0], c.c1, grid.t1, grid.w1)
    k2 = _inverse_kernel(points[:, 1], c.c2, grid.t2, grid.w2)
    values = np.sum((k1 @ table) * k2, axis=1) / FOUR_PI_SQ
    scale = np.sum((np.abs(k1) @ np.abs(table)) * np.abs(k2), axis=1) / FOUR_PI_SQ
    _check_imaginary(values, scale)

    real = values.real
    return float(real[0]) if single else real


def inverse_mellin_surface(
    H: FrequencyFunction | ArrayLike,
    c: DevelopmentPoint | ArrayLike | None,
    k: CutoffRect | ArrayLike | None,
    grid: FrequencyGrid | None,
    x_axis: ArrayLike,
    y_axis: ArrayLike,
) -> FloatArray:
    """``inverse_mellin_cutoff`` on the tensor grid ``x_axis x y_axis``.

    Returns:
        Array of shape ``(len(x_axis), len(y_axis))``.
    """
    c = DevelopmentPoint.of(c)
    grid = resolve_grid(k, grid)
    table = values_on_grid(H, grid)
    k1 = _inverse_kernel(_positive_axis(x_axis), c.c1, grid.t1, grid.w1)
    k2 = _inverse_kernel(_positive_axis(y_axis), c.c2, grid.t2, grid.w2)
    values = (k1 @ table @ k2.T) / FOUR_PI_SQ
    scale = (np.abs(k1) @ np.abs(table) @ np.abs(k2).T) / FOUR_PI_SQ
    _check_imaginary(values, scale)
    return np.ascontiguousarray(values.real)


def plancherel_norm_sq(
    H: FrequencyFunction | ArrayLike,
    k: CutoffRect | ArrayLike | None,
    grid: FrequencyGrid | None = None,
) -> float:
    """``(4 pi^2)^-1 int_[-k, k] |H(t)|^2 dt``, the weighted norm of the inverse.

    Args:
        H: Transform, as a callable, a table on ``grid`` or a constant.
        k: Cutoff box; may be None when ``grid`` is given.
        grid: Frequency grid on ``[-k, k]``.

    Returns:
        A nonnegative float.
    """
    grid = resolve_grid(k, grid)
    table = values_on_grid(H, grid)
    return max(grid.integrate(np.abs(table) ** 2).real / FOUR_PI_SQ, 0.0)


def _domain_axes(x_domain: ArrayLike) -> tuple[tuple[float, float], tuple[float, float]]:
    arr = np.asarray(x_domain, dtype=np.float64)
    if arr.shape == (2,):
        arr = np.vstack([arr, arr])
    if arr.shape != (2, 2):
        raise ShapeMismatchError(
            f"Domain must be (lo, hi) or ((lo1, hi1), (lo2, hi2)), got {arr.shape}"
        )
    if np.any(arr <= 0.0) or np.any(arr[:, 1] <= arr[:, 0]):
        raise DomainError(f"Domain edges must satisfy 0 < lo < hi, got {arr.tolist()}")
    return (float(arr[0, 0]), float(arr[0, 1])), (float(arr[1, 0]), float(arr[1, 1]))


def weighted_l2_norm_sq_xspace(
    f: Callable[[FloatArray, FloatArray], ArrayLike],
    c: DevelopmentPoint | ArrayLike | None = None,
    x_domain: ArrayLike = DEFAULT_X_DOMAIN,
    resolution: int = DEFAULT_X_RESOLUTION,
) -> float:
    """``int |f(x)|^2 x1^{2c1-1} x2^{2c2-1} dx`` over a rectangle, in log coordinates.

    Trapezoid rule on a log-uniform grid with ``resolution`` nodes per axis.
    Used as an oracle for ``plancherel_norm_sq``.

    Args:
        f: Density evaluated on meshgrid arrays ``(x1, x2)``.
        c: Development point, defaults to ``(1, 1)``.
        x_domain: ``(lo, hi)`` for both axes or one pair per axis.
        resolution: Nodes per axis, at least 2.

    Returns:
        A nonnegative float.
    """
    if resolution < 2:
        raise DomainError(f"Resolution must be at least 2, got {resolution}")
    c = DevelopmentPoint.of(c)
    (lo1, hi1), (lo2, hi2) = _domain_axes(x_domain)
    u1 = np.linspace(math.log(lo1), math.log(hi1), resolution)
    u2 = np.linspace(math.log(lo2), math.log(hi2), resolution)
    x1, x2 = np.meshgrid(np.exp(u1), np.exp(u2), indexing="ij")
    values = np.abs(np.asarray(f(x1, x2), dtype=np.complex128)) ** 2
    # dx = x du in each coordinate
    integrand = values * x1 ** (2.0 * c.c1) * x2 ** (2.0 * c.c2)
    inner = integrate.trapezoid(integrand, u2, axis=1)
    return max(float(integrate.trapezoid(inner, u1)), 0.0)
