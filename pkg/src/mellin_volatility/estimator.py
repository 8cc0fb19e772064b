"""Spectral cut-off density estimation and data-driven cutoff selection.

The estimator divides the empirical Mellin transform of the observations by
the Mellin transform of the noise and inverts on the box ``[-k, k]``:

    f_k(x) = (4 pi^2)^-1 int_[-k, k] x^{-c-it} M_hat_c(t) / M_c[g](t) dt.

The ratio is tabulated once on the frequency grid of the handle. The cutoff
is chosen by minimizing ``-||f_k||^2 + pen(k)`` over a lattice of candidates,
with every candidate norm read off one table on the largest candidate box.

Example:
    ```python
    from mellin_volatility import NoiseModel, SelectionConfig, select_cutoff

    k_hat, diagnostics = select_cutoff(obs, NoiseModel.chi_squared(), SelectionConfig())
    handle = restrict(diagnostics.table, k_hat)
    evaluate_density(handle, (1.0, 1.0))
    ```
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike

from mellin_volatility.config import SelectionConfig
from mellin_volatility.exceptions import (
    DomainError,
    EmptyCandidateGridError,
    ShapeMismatchError,
)
from mellin_volatility.mellin import (
    empirical_mellin_grid,
    inverse_mellin_cutoff,
    inverse_mellin_surface,
    plancherel_norm_sq,
    resolve_grid,
)
from mellin_volatility.noise import NoiseModel, lambda_g_axis, mellin_g_grid
from mellin_volatility.truth import TruthSpec, mellin_grid
from mellin_volatility.types import (
    ComplexArray,
    CutoffRect,
    DevelopmentPoint,
    FloatArray,
    FrequencyGrid,
    ObservationSet,
    SelectionMode,
)

logger = logging.getLogger(__name__)

_LATTICE_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class EstimateHandle:
    """A fitted spectral cut-off estimator.

    Attributes:
        obs: The sample, or None for synthetic ratio tables.
        noise: Noise model used for deconvolution.
        c: Development point.
        k: Cutoff box.
        grid: Frequency grid on ``[-k, k]``.
        ratio: ``M_hat_c(t) / M_c[g](t)`` on the grid nodes, read-only.
    """

    obs: ObservationSet | None
    noise: NoiseModel
    c: DevelopmentPoint
    k: CutoffRect
    grid: FrequencyGrid
    ratio: ComplexArray

    def __post_init__(self) -> None:
        if self.grid.cutoff != self.k:
            raise ShapeMismatchError(
                f"Grid covers {self.grid.cutoff.pair}, handle cutoff is {self.k.pair}"
            )
        ratio = np.array(self.ratio, dtype=np.complex128)
        if ratio.shape != self.grid.shape:
            raise ShapeMismatchError(
                f"Ratio table {ratio.shape} does not match grid {self.grid.shape}"
            )
        ratio.setflags(write=False)
        object.__setattr__(self, "ratio", ratio)

    @classmethod
    def from_ratio(
        cls,
        ratio: ArrayLike,
        k: CutoffRect | ArrayLike,
        *,
        c: DevelopmentPoint | ArrayLike | None = None,
        noise: NoiseModel | None = None,
        grid: FrequencyGrid | None = None,
    ) -> EstimateHandle:
        """Wrap a given ratio table, e.g. a zero or an analytic transform.

        ``ratio`` may be a scalar, broadcast over the grid.
        """
        cutoff = CutoffRect.of(k)
        grid = resolve_grid(cutoff, grid)
        table = np.broadcast_to(np.asarray(ratio, dtype=np.complex128), grid.shape)
        return cls(
            obs=None,
            noise=noise or NoiseModel.noiseless(),
            c=DevelopmentPoint.of(c),
            k=cutoff,
            grid=grid,
            ratio=table,
        )

    def density(self, x: ArrayLike) -> Any:
        return evaluate_density(self, x)

    def surface(self, x_axis: ArrayLike, y_axis: ArrayLike) -> FloatArray:
        return evaluate_surface(self, x_axis, y_axis)


def build_estimate(
    obs: ObservationSet,
    noise: NoiseModel,
    c: DevelopmentPoint | ArrayLike | None,
    k: CutoffRect | ArrayLike,
    grid: FrequencyGrid | None = None,
) -> EstimateHandle:
    """Tabulate the deconvolution ratio and return the estimator handle.

    Args:
        obs: Sample of positive observations.
        noise: Noise model.
        c: Development point; None uses ``obs.c``.
        k: Cutoff box.
        grid: Frequency grid on ``[-k, k]``; default step when None.

    Returns:
        A handle whose ratio table is a deterministic function of the inputs.

    Raises:
        AdmissibilityError: If the noise has no Mellin transform at ``c``.
        DomainError: If ``M_hat_c(0)`` is not finite (``E[Y^{c-1}]`` looks infinite).
    """
    point = obs.c if c is None else DevelopmentPoint.of(c)
    point.check_theory()
    noise.check_admissible(point)
    if point != obs.c:
        obs = obs.with_c(point)
    cutoff = CutoffRect.of(k)
    grid = resolve_grid(cutoff, grid)

    table = empirical_mellin_grid(obs, grid)
    if not np.all(np.isfinite(table)):
        raise DomainError(f"Empirical Mellin transform is not finite at c = {point.pair}")
    ratio = table / mellin_g_grid(noise, point, grid.t1, grid.t2)
    return EstimateHandle(obs=obs, noise=noise, c=point, k=cutoff, grid=grid, ratio=ratio)


def restrict(handle: EstimateHandle, k: CutoffRect | ArrayLike) -> EstimateHandle:
    """The same estimator on a nested box.

    Slices the ratio table when the nested box falls on the handle's nodes;
    otherwise rebuilds from the sample.

    Raises:
        ShapeMismatchError: If the box is not nested, or a rebuild is needed
            for a synthetic handle.
    """
    cutoff = CutoffRect.of(k)
    if cutoff == handle.k:
        return handle
    if not handle.k.contains(cutoff):
        raise ShapeMismatchError(f"Box {cutoff.pair} is not nested in {handle.k.pair}")
    sub_grid = FrequencyGrid(cutoff, handle.grid.step)
    slices = handle.grid.sub_slices(cutoff)
    if slices is not None:
        sliced = handle.ratio[slices]
        return EstimateHandle(handle.obs, handle.noise, handle.c, cutoff, sub_grid, sliced)
    if handle.obs is None:
        raise ShapeMismatchError(f"Box {cutoff.pair} is not aligned with the synthetic table")
    return build_estimate(handle.obs, handle.noise, handle.c, cutoff, sub_grid)


def evaluate_density(handle: EstimateHandle, x: ArrayLike) -> Any:
    """Estimated density at one point or at the rows of an ``(m, 2)`` array.

    Values may be negative; no positivity correction is applied.

    Raises:
        DomainError: If some coordinate is not strictly positive.
    """
    return inverse_mellin_cutoff(handle.ratio, handle.c, None, handle.grid, x)


def evaluate_surface(handle: EstimateHandle, x_axis: ArrayLike, y_axis: ArrayLike) -> FloatArray:
    """Estimated density on the tensor grid ``x_axis x y_axis``."""
    return inverse_mellin_surface(handle.ratio, handle.c, None, handle.grid, x_axis, y_axis)


def evaluate_clipped(handle: EstimateHandle, x_axis: ArrayLike, y_axis: ArrayLike) -> FloatArray:
    """``max(f_k, 0)`` on a tensor grid, for presentation only."""
    return np.maximum(evaluate_surface(handle, x_axis, y_axis), 0.0)


def estimate_norm_sq(handle: EstimateHandle) -> float:
    """``||f_k||^2 = (4 pi^2)^-1 int_[-k, k] |ratio|^2`` by Plancherel."""
    return plancherel_norm_sq(handle.ratio, None, handle.grid)


def truth_approximation(
    truth: TruthSpec,
    c: DevelopmentPoint | ArrayLike | None,
    k: CutoffRect | ArrayLike,
    grid: FrequencyGrid | None,
    x: ArrayLike,
) -> Any:
    """The cut-off approximation ``f_k`` of an analytic truth at ``x``.

    Example:
        ```python
        truth_approximation(TruthSpec.lognormal(), None, (6, 6), None, (1.0, 1.0))  # ~0.421
        ```
    """
    grid = resolve_grid(k, grid)
    return inverse_mellin_cutoff(mellin_grid(truth, grid, c), c, None, grid, x)


def _lattice(n: int, step: float) -> list[float]:
    top = math.floor(math.log(n) + _LATTICE_SLACK)
    count = math.floor(top / step + _LATTICE_SLACK)
    return [step * j for j in range(1, count + 1)]


def candidate_grid(
    n: int,
    noise: NoiseModel,
    config: SelectionConfig | None = None,
    c: DevelopmentPoint | ArrayLike | None = None,
) -> list[CutoffRect]:
    """Candidate cutoffs on the lattice ``{dk, 2 dk, ..., floor(log n)}^2``.

    Volatility mode keeps ``exp(pi (k1 + k2)) <= n``, general mode keeps
    ``Lambda_g(k) <= n``. Candidates are sorted lexicographically.

    Args:
        n: Sample size.
        noise: Noise model (used in general mode).
        config: Selection settings.
        c: Development point, defaults to ``(1, 1)``.

    Returns:
        Nonempty list of cutoffs.

    Raises:
        EmptyCandidateGridError: If no lattice point satisfies the constraint.
    """
    if n < 1:
        raise DomainError(f"Sample size must be positive, got {n}")
    config = config or SelectionConfig()
    point = DevelopmentPoint.of(c)
    values = _lattice(n, config.grid_step)
    log_n = math.log(n)

    candidates: list[CutoffRect] = []
    if config.mode is SelectionMode.VOLATILITY:
        for k1 in values:
            candidates.extend(
                CutoffRect(k1, k2)
                for k2 in values
                if math.pi * (k1 + k2) <= log_n + _LATTICE_SLACK
            )
    else:
        # Lambda_g factors over the axes
        axis1 = [lambda_g_axis(noise, point, 0, v) for v in values]
        axis2 = [lambda_g_axis(noise, point, 1, v) for v in values]
        for k1, a1 in zip(values, axis1, strict=True):
            candidates.extend(
                CutoffRect(k1, k2)
                for k2, a2 in zip(values, axis2, strict=True)
                if a1 * a2 / (4.0 * math.pi**2) <= n
            )
    if not candidates:
        raise EmptyCandidateGridError(
            f"No cutoff on the lattice of step {config.grid_step} satisfies the "
            f"{config.mode.value} constraint for n = {n}"
        )
    return candidates


def mu_hat(obs: ObservationSet | None) -> float:
    """``n^-1 sum_j Y_j^{2(c - 1)}``; exactly 1 at ``c = (1, 1)`` or without a sample."""
    if obs is None or obs.c.is_unit:
        return 1.0
    exponent = 2.0 * (obs.log_rows @ (obs.c.array - 1.0))
    return float(np.mean(np.exp(exponent)))


def penalty(
    k: CutoffRect | ArrayLike,
    n: int,
    noise: NoiseModel,
    obs: ObservationSet | None,
    config: SelectionConfig | None = None,
) -> float:
    """Penalty of the contrast.

    Volatility mode: ``chi k1 k2 exp(pi (k1 + k2)) / n``.
    General mode: ``chi mu_hat k1 k2 Lambda_g(k) / n``.

    Args:
        k: Cutoff.
        n: Sample size.
        noise: Noise model (general mode).
        obs: Sample for ``mu_hat`` and ``c`` (general mode); may be None at ``c = (1, 1)``.
        config: Selection settings.

    Returns:
        A positive float.
    """
    config = config or SelectionConfig()
    cutoff = CutoffRect.of(k)
    k1, k2 = cutoff.pair
    if config.mode is SelectionMode.VOLATILITY:
        return config.chi * k1 * k2 * math.exp(math.pi * (k1 + k2)) / n
    point = obs.c if obs is not None else DevelopmentPoint()
    lam = lambda_g_axis(noise, point, 0, k1) * lambda_g_axis(noise, point, 1, k2)
    lam /= 4.0 * math.pi**2
    return config.chi * mu_hat(obs) * k1 * k2 * lam / n


@dataclass(frozen=True)
class CandidateScore:
    """Contrast terms of one candidate cutoff."""

    k: CutoffRect
    norm_sq: float
    pen: float

    @property
    def contrast(self) -> float:
        return -self.norm_sq + self.pen


@dataclass(frozen=True, eq=False)
class SelectionDiagnostics:
    """Outcome of a cutoff selection.

    Attributes:
        candidates: Scores in candidate-grid order.
        selected: The minimizing cutoff.
        table: Estimator on the largest candidate box, from which every
            candidate is a restriction.
        config: Selection settings used.
    """

    candidates: tuple[CandidateScore, ...]
    selected: CutoffRect
    table: EstimateHandle
    config: SelectionConfig

    @property
    def chosen(self) -> CandidateScore:
        return next(s for s in self.candidates if s.k == self.selected)

    def estimate(self) -> EstimateHandle:
        """The estimator at the selected cutoff."""
        return restrict(self.table, self.selected)


def max_box(candidates: list[CutoffRect]) -> CutoffRect:
    """Smallest box containing every candidate."""
    return CutoffRect(max(k.k1 for k in candidates), max(k.k2 for k in candidates))


def select_cutoff(
    obs: ObservationSet,
    noise: NoiseModel,
    config: SelectionConfig | None = None,
) -> tuple[CutoffRect, SelectionDiagnostics]:
    """Minimize ``-||f_k||^2 + pen(k)`` over the candidate grid.

    Ties are broken towards the lexicographically smallest ``(k1, k2)``.

    Args:
        obs: Sample; its ``c`` is used.
        noise: Noise model.
        config: Selection settings.

    Returns:
        The selected cutoff and the per-candidate diagnostics.

    Raises:
        EmptyCandidateGridError: If the candidate grid is empty.
    """
    config = config or SelectionConfig()
    candidates = candidate_grid(obs.n, noise, config, obs.c)
    largest = max_box(candidates)
    grid = FrequencyGrid(largest, config.frequency_step)
    table = build_estimate(obs, noise, obs.c, largest, grid)

    scores = tuple(
        CandidateScore(
            k=k,
            norm_sq=estimate_norm_sq(restrict(table, k)),
            pen=penalty(k, obs.n, noise, obs, config),
        )
        for k in candidates
    )
    best = min(scores, key=lambda s: (s.contrast, s.k.k1, s.k.k2))
    logger.info(
        "Selected cutoff (%g, %g) among %d candidates (%s mode, chi=%g)",
        best.k.k1,
        best.k.k2,
        len(scores),
        config.mode.value,
        config.chi,
    )
    return best.k, SelectionDiagnostics(scores, best.k, table, config)
