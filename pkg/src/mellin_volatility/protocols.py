"""Protocol definitions for density sources.

Analytic truths and fitted estimates are evaluated, compared and summarized
by the same evaluation code. This module defines the interface both satisfy.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Any, Protocol, runtime_checkable

from numpy.typing import ArrayLike

if TYPE_CHECKING:
    from mellin_volatility.types import FloatArray


@runtime_checkable
class DensitySource(Protocol):
    """Anything that can be evaluated as a bivariate density on ``(0, inf)^2``.

    Example:
        ```python
        def peak(source: DensitySource) -> float:
            return float(source.density((1.0, 1.0)))

        peak(TruthSpec.lognormal())
        peak(build_estimate(obs, NoiseModel.chi_squared(), None, (1, 1)))
        ```
    """

    def density(self, x: ArrayLike) -> Any:
        """Density at one point ``(x1, x2)`` or at rows of an ``(m, 2)`` array.

        Args:
            x: A positive pair or an array of positive pairs.

        Returns:
            A float for a single point, otherwise an array of length ``m``.
        """
        ...

    def surface(self, x_axis: ArrayLike, y_axis: ArrayLike) -> FloatArray:
        """Density on the tensor grid ``x_axis x y_axis``, indexed ``[i, j]``.

        Args:
            x_axis: Positive nodes of the first coordinate.
            y_axis: Positive nodes of the second coordinate.

        Returns:
            Array of shape ``(len(x_axis), len(y_axis))``.
        """
        ...
