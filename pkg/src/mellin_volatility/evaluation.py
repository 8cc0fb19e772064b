"""Integrated squared error, Monte-Carlo replications and their summaries.

The ISE of a cut-off estimator splits exactly into an in-box term and the
bias of the truth outside the box, both computed in frequency space:

    ||f - f_hat_k||^2 = (4 pi^2)^-1 int_[-k, k] |ratio - M_c[f]|^2 + ||f - f_k||^2.

A Monte-Carlo study repeats, per replication, simulation of a path, noisy
observations, adaptive estimation from the noisy data and from the
integrated volatilities themselves, and scoring against the analytic truth.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike

from mellin_volatility.config import MCConfig, SelectionConfig
from mellin_volatility.estimator import (
    CandidateScore,
    EstimateHandle,
    build_estimate,
    candidate_grid,
    estimate_norm_sq,
    evaluate_surface,
    max_box,
    restrict,
    select_cutoff,
)
from mellin_volatility.exceptions import DomainError, ReplicationError, ShapeMismatchError
from mellin_volatility.mellin import plancherel_norm_sq
from mellin_volatility.noise import NoiseModel
from mellin_volatility.processes import generate_observations, simulate_path
from mellin_volatility.truth import (
    TailConfig,
    TruthSpec,
    bias_norm_sq,
    mellin_grid,
    truth_for_process,
)
from mellin_volatility.types import CutoffRect, FloatArray, FrequencyGrid, ObservationSet

logger = logging.getLogger(__name__)

EstimateKind = Literal["noisy", "oracle"]


def ise_components(
    handle: EstimateHandle, spec: TruthSpec, tail: TailConfig | None = None
) -> tuple[float, float]:
    """In-box estimation error and out-of-box bias of ``handle`` against ``spec``."""
    difference = handle.ratio - mellin_grid(spec, handle.grid, handle.c)
    in_box = plancherel_norm_sq(difference, None, handle.grid)
    return in_box, bias_norm_sq(spec, handle.c, handle.k, tail)


def ise_against_truth(
    handle: EstimateHandle, spec: TruthSpec, tail: TailConfig | None = None
) -> float:
    """Weighted integrated squared error ``||f - f_hat_k||^2`` of one estimate.

    Example:
        ```python
        truth = TruthSpec.lognormal()
        zero = EstimateHandle.from_ratio(0.0, (8.0, 8.0))
        ise_against_truth(zero, truth)  # ~ ||f||^2 = sqrt(7) / (4 pi)
        ```
    """
    in_box, bias = ise_components(handle, spec, tail)
    return in_box + bias


def oracle_cutoff(
    obs: ObservationSet,
    noise: NoiseModel,
    spec: TruthSpec,
    config: SelectionConfig | None = None,
    tail: TailConfig | None = None,
) -> tuple[CutoffRect, float]:
    """The candidate cutoff with the smallest true ISE.

    Uses the same candidate grid as ``select_cutoff``; ties go to the
    lexicographically smallest cutoff.

    Returns:
        The best cutoff and its ISE.
    """
    config = config or SelectionConfig()
    candidates = candidate_grid(obs.n, noise, config, obs.c)
    largest = max_box(candidates)
    grid = FrequencyGrid(largest, config.frequency_step)
    table = build_estimate(obs, noise, obs.c, largest, grid)
    scored = [(ise_against_truth(restrict(table, k), spec, tail), k) for k in candidates]
    ise, best = min(scored, key=lambda item: (item[0], item[1].k1, item[1].k2))
    return best, ise


def median_surface(
    surfaces: Sequence[ArrayLike], shape: tuple[int, ...] | None = None
) -> FloatArray:
    """Pointwise median across replications.

    Args:
        surfaces: One surface per replication, all of the same shape.
        shape: Expected shape, e.g. that of the probe grid.

    Raises:
        ShapeMismatchError: If the shapes disagree.
    """
    if not surfaces:
        raise DomainError("Need at least one surface")
    stack = [np.asarray(s, dtype=np.float64) for s in surfaces]
    expected = stack[0].shape if shape is None else tuple(shape)
    for i, surface in enumerate(stack):
        if surface.shape != expected:
            raise ShapeMismatchError(f"Surface {i} has shape {surface.shape}, expected {expected}")
    return np.median(np.stack(stack), axis=0)


@dataclass(frozen=True, eq=False)
class SectionTrace:
    """A one-dimensional slice of a surface.

    Attributes:
        axis: 0 fixes the first coordinate ``x``, 1 fixes the second ``y``.
        requested: Requested coordinate of the fixed axis.
        coordinate: Realized (nearest node) coordinate of the fixed axis.
        nodes: Nodes of the free axis.
        values: Surface values along the free axis.
    """

    axis: int
    requested: float
    coordinate: float
    nodes: FloatArray
    values: FloatArray


def section_trace(
    surface: ArrayLike, probe: ArrayLike, axis: int, coordinate: float = 0.54
) -> SectionTrace:
    """Nearest-node slice of a surface on the square probe grid ``probe x probe``.

    Raises:
        ShapeMismatchError: If the surface is not ``(len(probe), len(probe))``.
        DomainError: If ``coordinate`` lies outside the probe range.
    """
    grid = np.asarray(surface, dtype=np.float64)
    nodes = np.asarray(probe, dtype=np.float64)
    if grid.shape != (nodes.size, nodes.size):
        raise ShapeMismatchError(
            f"Surface {grid.shape} does not match a {nodes.size}-node probe grid"
        )
    if axis not in (0, 1):
        raise DomainError(f"Axis must be 0 or 1, got {axis}")
    if not nodes[0] <= coordinate <= nodes[-1]:
        raise DomainError(
            f"Coordinate {coordinate} outside the probe range [{nodes[0]}, {nodes[-1]}]"
        )
    index = int(np.argmin(np.abs(nodes - coordinate)))
    values = grid[index, :] if axis == 0 else grid[:, index]
    return SectionTrace(axis, coordinate, float(nodes[index]), nodes, values.copy())


def replication_seeds(master_seed: int, index: int) -> tuple[int, int]:
    """Path and noise seeds of replication ``index``, independent of run order."""
    sequence = np.random.SeedSequence(entropy=master_seed, spawn_key=(index,))
    path_seed, noise_seed = sequence.generate_state(2, dtype=np.uint64)
    return int(path_seed), int(noise_seed)


def noise_model(cfg: MCConfig) -> NoiseModel:
    """Noise model of the noisy observations of a study."""
    return NoiseModel.from_kind(cfg.noise, cfg.gamma_shape, cfg.gamma_rate)


@dataclass(frozen=True, eq=False)
class ReplicationResult:
    """One replication: adaptive estimates from noisy and direct data.

    Attributes:
        index: Replication index.
        seed: ``(master_seed, index)``, enough to re-run it standalone.
        k_noisy: Cutoff selected from the noisy observations.
        k_oracle: Cutoff selected from the integrated volatilities.
        ise_noisy: ISE of the noisy-data estimate.
        ise_oracle: ISE of the direct-data estimate.
        norm_noisy: ``||f_hat||^2`` of the noisy-data estimate.
        norm_oracle: ``||f_hat||^2`` of the direct-data estimate.
        surface_noisy: Noisy-data estimate on the probe grid.
        surface_oracle: Direct-data estimate on the probe grid.
        scores_noisy: Selection scores of the noisy-data estimate.
        scores_oracle: Selection scores of the direct-data estimate.
    """

    index: int
    seed: tuple[int, int]
    k_noisy: CutoffRect
    k_oracle: CutoffRect
    ise_noisy: float
    ise_oracle: float
    norm_noisy: float
    norm_oracle: float
    surface_noisy: FloatArray
    surface_oracle: FloatArray
    scores_noisy: tuple[CandidateScore, ...]
    scores_oracle: tuple[CandidateScore, ...]


def run_replication(
    cfg: MCConfig,
    index: int,
    truth: TruthSpec | None = None,
    probe: FloatArray | None = None,
) -> ReplicationResult:
    """Run replication ``index`` of a study; the result depends only on ``cfg`` and ``index``.

    Raises:
        ReplicationError: Wrapping any failure, with the replication seed.
    """
    truth = truth or truth_for_process(cfg.process, cfg.ou, cfg.cir)
    probe = cfg.probe_axis() if probe is None else probe
    try:
        path_seed, noise_seed = replication_seeds(cfg.master_seed, index)
        bundle = simulate_path(
            cfg.process, cfg.path.model_copy(update={"seed": path_seed}), cfg.ou, cfg.cir
        )
        noise = noise_model(cfg)
        noisy_obs = generate_observations(bundle, noise_seed, noise)
        k_noisy, noisy = select_cutoff(noisy_obs, noise, cfg.selection)
        k_oracle, oracle = select_cutoff(
            bundle.as_observations(), NoiseModel.noiseless(), cfg.oracle_selection
        )
        noisy_handle, oracle_handle = noisy.estimate(), oracle.estimate()
        result = ReplicationResult(
            index=index,
            seed=(cfg.master_seed, index),
            k_noisy=k_noisy,
            k_oracle=k_oracle,
            ise_noisy=ise_against_truth(noisy_handle, truth),
            ise_oracle=ise_against_truth(oracle_handle, truth),
            norm_noisy=estimate_norm_sq(noisy_handle),
            norm_oracle=estimate_norm_sq(oracle_handle),
            surface_noisy=evaluate_surface(noisy_handle, probe, probe),
            surface_oracle=evaluate_surface(oracle_handle, probe, probe),
            scores_noisy=noisy.candidates,
            scores_oracle=oracle.candidates,
        )
    except Exception as exc:
        raise ReplicationError(index, (cfg.master_seed, index), exc) from exc
    logger.info(
        "Replication %d: k_noisy=(%g, %g) ise_noisy=%.4g, k_oracle=(%g, %g) ise_oracle=%.4g",
        index,
        k_noisy.k1,
        k_noisy.k2,
        result.ise_noisy,
        k_oracle.k1,
        k_oracle.k2,
        result.ise_oracle,
    )
    return result


@dataclass(frozen=True)
class IseSummary:
    """Quartiles of the ISE across replications."""

    median: float
    lower_quartile: float
    upper_quartile: float


@dataclass(frozen=True, eq=False)
class MCResult:
    """All replications of a study plus the truth on the probe grid.

    Attributes:
        config: The study.
        replications: Results ordered by replication index.
        probe: Probe nodes shared by both axes.
        truth_surface: Analytic density on ``probe x probe``.
    """

    config: MCConfig
    replications: tuple[ReplicationResult, ...]
    probe: FloatArray
    truth_surface: FloatArray

    def ise(self, kind: EstimateKind = "noisy") -> FloatArray:
        attr = "ise_noisy" if kind == "noisy" else "ise_oracle"
        return np.array([getattr(r, attr) for r in self.replications])

    def summary(self, kind: EstimateKind = "noisy") -> IseSummary:
        q1, median, q3 = np.percentile(self.ise(kind), [25.0, 50.0, 75.0])
        return IseSummary(float(median), float(q1), float(q3))

    def median_surface(self, kind: EstimateKind = "noisy") -> FloatArray:
        attr = "surface_noisy" if kind == "noisy" else "surface_oracle"
        shape = (self.probe.size, self.probe.size)
        return median_surface([getattr(r, attr) for r in self.replications], shape)

    def section(self, axis: int, kind: EstimateKind | Literal["truth"] = "noisy") -> SectionTrace:
        """Section of the median (or truth) surface at ``config.section_coordinate``."""
        surface = self.truth_surface if kind == "truth" else self.median_surface(kind)
        return section_trace(surface, self.probe, axis, self.config.section_coordinate)


def run_monte_carlo(cfg: MCConfig) -> MCResult:
    """Run every replication of a study, on ``cfg.threads`` worker threads.

    Results are collected in replication order, so aggregates do not depend
    on the thread count or on completion order.

    Raises:
        ReplicationError: For the first failing replication, with its seed.
    """
    truth = truth_for_process(cfg.process, cfg.ou, cfg.cir)
    probe = cfg.probe_axis()
    logger.info(
        "Monte-Carlo study: %s, n=%d, delta=%g, %d replications on %d threads",
        cfg.process.value,
        cfg.path.n,
        cfg.path.delta,
        cfg.replications,
        cfg.threads,
    )

    def one(index: int) -> ReplicationResult:
        return run_replication(cfg, index, truth, probe)

    indices = range(cfg.replications)
    if cfg.threads == 1:
        results = [one(i) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(one, indices))
    return MCResult(cfg, tuple(results), probe, truth.surface(probe, probe))
