"""Declarative configuration models.

Pydantic models for process parameters, path simulation, cutoff selection,
Monte-Carlo studies and CLI runs. ``RunConfig`` is deliberately flat so it
can be written to a TOML manifest and read back verbatim.

Example TOML:
    ```toml
    command = "mc"
    preset = "figure1"
    process = "exp-ou"
    n = 5000
    delta = 0.01
    reps = 50
    seed = 1
    ```

Example usage:
    ```python
    from mellin_volatility.config import RunConfig

    config = RunConfig.from_file("manifest.toml")
    mc = config.mc_config(config.n)
    ```
"""

from __future__ import annotations

import math
import tomllib
from pathlib import Path
from typing import Any, Literal

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationInfo,
    field_validator,
    model_validator,
)

from mellin_volatility.types import NoiseKind, ProcessKind, SelectionMode

Matrix2 = tuple[tuple[float, float], tuple[float, float]]
PositivePair = tuple[float, float]

DEFAULT_OU_DRIFT: Matrix2 = ((-9.0, 1.0), (0.0, -7.0))
DEFAULT_OU_DIFFUSION: Matrix2 = ((3.0, 1.0), (0.0, 2.0))


def _positive_pair(value: PositivePair, name: str) -> PositivePair:
    if not all(v > 0.0 and math.isfinite(v) for v in value):
        raise ValueError(f"{name} must be a pair of positive finite numbers, got {value}")
    return value


class OUParams(BaseModel):
    """Drift ``B`` and diffusion ``A`` of ``dZ = B Z dt + A dW``.

    Attributes:
        drift: 2x2 drift matrix; all eigenvalues must have negative real part.
        diffusion: 2x2 diffusion matrix.
    """

    model_config = ConfigDict(frozen=True)

    drift: Matrix2 = DEFAULT_OU_DRIFT
    diffusion: Matrix2 = DEFAULT_OU_DIFFUSION

    @model_validator(mode="after")
    def _check_stable(self) -> OUParams:
        eigenvalues = np.linalg.eigvals(self.drift_matrix)
        if np.any(eigenvalues.real >= 0.0):
            raise ValueError(
                f"Drift matrix is not stable; eigenvalues {eigenvalues.tolist()} "
                "must have negative real parts"
            )
        return self

    @property
    def drift_matrix(self) -> np.ndarray:
        return np.array(self.drift, dtype=np.float64)

    @property
    def diffusion_matrix(self) -> np.ndarray:
        return np.array(self.diffusion, dtype=np.float64)


class CIRParams(BaseModel):
    """Coordinatewise ``dV = kappa (theta - V) dt + sigma sqrt(V) dW``.

    With ``kappa = 1`` and ``sigma = sqrt(2)`` the stationary law of each
    coordinate is Gamma(theta, 1).

    Attributes:
        theta: Long-run levels.
        kappa: Mean-reversion speeds.
        sigma: Volatility of volatility.
    """

    model_config = ConfigDict(frozen=True)

    theta: PositivePair = (3.0, 3.0)
    kappa: PositivePair = (1.0, 1.0)
    sigma: PositivePair = (math.sqrt(2.0), math.sqrt(2.0))

    @field_validator("theta", "kappa")
    @classmethod
    def _check_positive(cls, value: PositivePair, info: ValidationInfo) -> PositivePair:
        return _positive_pair(value, info.field_name or "value")

    @field_validator("sigma")
    @classmethod
    def _check_sigma(cls, value: PositivePair) -> PositivePair:
        if not all(v >= 0.0 and math.isfinite(v) for v in value):
            raise ValueError(f"sigma must be a pair of nonnegative finite numbers, got {value}")
        return value

    @classmethod
    def from_shape(cls, rho: PositivePair) -> CIRParams:
        """Parameters whose stationary law is Gamma(rho, 1) per coordinate."""
        return cls(theta=rho)

    @property
    def stationary_shape(self) -> np.ndarray:
        """Gamma shape ``2 kappa theta / sigma^2`` of the stationary law."""
        k, t, s = (np.asarray(v) for v in (self.kappa, self.theta, self.sigma))
        with np.errstate(divide="ignore"):
            return 2.0 * k * t / s**2

    @property
    def stationary_rate(self) -> np.ndarray:
        """Gamma rate ``2 kappa / sigma^2`` of the stationary law."""
        k, s = np.asarray(self.kappa), np.asarray(self.sigma)
        with np.errstate(divide="ignore"):
            return 2.0 * k / s**2

    @property
    def satisfies_feller(self) -> bool:
        return bool(np.all(self.stationary_shape >= 1.0))


class PathConfig(BaseModel):
    """Time discretization of one simulated path.

    Attributes:
        delta: Observation step ``Delta`` in (0, 1).
        n: Number of observations.
        substeps: Euler steps per observation interval.
        seed: Seed of the path noise stream.
        burn_in: Observation intervals simulated and discarded first.
    """

    model_config = ConfigDict(frozen=True)

    delta: float = Field(default=0.01, gt=0.0, lt=1.0)
    n: int = Field(default=5000, ge=1)
    substeps: int = Field(default=10, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    burn_in: int = Field(default=0, ge=0)

    @property
    def fine_step(self) -> float:
        return self.delta / self.substeps

    @property
    def total_fine_steps(self) -> int:
        return (self.n + self.burn_in) * self.substeps


class SelectionConfig(BaseModel):
    """Penalized contrast selection of the cutoff.

    Attributes:
        chi: Penalty constant.
        grid_step: Lattice step ``delta_k`` of the candidate cutoffs.
        mode: Which penalty to use.
        frequency_step: Trapezoid step ``h_t`` of the frequency grid.
    """

    model_config = ConfigDict(frozen=True)

    chi: float = Field(default=1e-2, gt=0.0)
    grid_step: float = Field(default=0.25, gt=0.0)
    mode: SelectionMode = SelectionMode.VOLATILITY
    frequency_step: float = Field(default=0.05, gt=0.0)


DEFAULT_ORACLE_SELECTION = SelectionConfig(chi=1.0, mode=SelectionMode.GENERAL)
"""Selection used for the direct (noiseless) estimator in Monte-Carlo studies."""


class MCConfig(BaseModel):
    """One Monte-Carlo study at a single sample size.

    Attributes:
        process: Simulated volatility process.
        ou: Parameters of the exponential OU process.
        cir: Parameters of the (exponential) CIR process.
        path: Path template; its seed is replaced per replication.
        noise: Noise law of the observations.
        gamma_shape: Shape ``p`` per coordinate when ``noise`` is gamma.
        gamma_rate: Rate ``q`` per coordinate when ``noise`` is gamma.
        selection: Selection for the estimator on noisy observations.
        oracle_selection: Selection for the estimator on the integrated
            volatilities themselves.
        replications: Number of replications ``R``.
        probe_min: Lower edge of the log-uniform probe grid.
        probe_max: Upper edge of the log-uniform probe grid.
        probe_size: Probe nodes per axis.
        section_coordinate: Coordinate of the reported sections.
        master_seed: Seed from which replication seeds are derived.
        threads: Worker threads for replications; results do not depend on it.
    """

    model_config = ConfigDict(frozen=True)

    process: ProcessKind = ProcessKind.EXP_OU
    ou: OUParams = Field(default_factory=OUParams)
    cir: CIRParams = Field(default_factory=CIRParams)
    path: PathConfig = Field(default_factory=PathConfig)
    noise: NoiseKind = NoiseKind.CHI_SQUARED_1
    gamma_shape: PositivePair = (0.5, 0.5)
    gamma_rate: PositivePair = (0.5, 0.5)
    selection: SelectionConfig = Field(default_factory=SelectionConfig)
    oracle_selection: SelectionConfig = DEFAULT_ORACLE_SELECTION
    replications: int = Field(default=50, ge=1)
    probe_min: float = Field(default=0.1, gt=0.0)
    probe_max: float = Field(default=5.0, gt=0.0)
    probe_size: int = Field(default=60, ge=2)
    section_coordinate: float = Field(default=0.54, gt=0.0)
    master_seed: int = Field(default=0, ge=0)
    threads: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _check_probe(self) -> MCConfig:
        if self.probe_max <= self.probe_min:
            raise ValueError("probe_max must exceed probe_min")
        return self

    def probe_axis(self) -> np.ndarray:
        """Log-uniform probe nodes shared by both axes."""
        return log_probe_axis(self.probe_min, self.probe_max, self.probe_size)


def log_probe_axis(lower: float, upper: float, size: int) -> np.ndarray:
    """``size`` log-uniform nodes on ``[lower, upper]``, plus 1 when it lies inside.

    Sections through 1 then fall on a node instead of its nearest neighbour.
    """
    nodes = np.geomspace(lower, upper, size)
    if lower <= 1.0 <= upper and not np.any(np.isclose(nodes, 1.0, rtol=1e-12, atol=0.0)):
        nodes = np.union1d(nodes, [1.0])
    return nodes


DeltaRule = Literal["fixed", "theorem-rate"]


def theorem_rate_delta(n: int) -> float:
    """``Delta_n = (sqrt(n) log(n)^2)^{-1}``."""
    if n < 3:
        raise ValueError("theorem-rate sampling step needs n >= 3")
    return 1.0 / (math.sqrt(n) * math.log(n) ** 2)


class RunConfig(BaseModel):
    """Flat, fully resolved configuration of one CLI run.

    Every field has a default so the manifest written after a run echoes the
    complete configuration. Fields that are None are omitted from manifests.
    """

    model_config = ConfigDict(extra="forbid")

    command: Literal["simulate", "estimate", "mc"] = "simulate"
    preset: str | None = None

    # simulation
    process: ProcessKind = ProcessKind.EXP_OU
    n: int = Field(default=5000, ge=1)
    sizes: list[int] | None = None
    delta: float = Field(default=0.01, gt=0.0, lt=1.0)
    delta_rule: DeltaRule = "fixed"
    substeps: int = Field(default=10, ge=1)
    burn_in: int = Field(default=0, ge=0)
    seed: int = Field(default=0, ge=0, lt=2**64)
    ou_drift: Matrix2 = DEFAULT_OU_DRIFT
    ou_diffusion: Matrix2 = DEFAULT_OU_DIFFUSION
    cir_theta: PositivePair = (3.0, 3.0)
    cir_kappa: PositivePair = (1.0, 1.0)
    cir_sigma: PositivePair = (math.sqrt(2.0), math.sqrt(2.0))

    # estimation
    noise: NoiseKind = NoiseKind.CHI_SQUARED_1
    gamma_shape: PositivePair = (0.5, 0.5)
    gamma_rate: PositivePair = (0.5, 0.5)
    c: PositivePair = (1.0, 1.0)
    k: PositivePair | None = None
    adaptive: bool = False
    chi: float = Field(default=1e-2, gt=0.0)
    grid_step: float = Field(default=0.25, gt=0.0)
    frequency_step: float = Field(default=0.05, gt=0.0)
    mode: SelectionMode = SelectionMode.VOLATILITY
    oracle_chi: float = Field(default=1.0, gt=0.0)

    # evaluation
    reps: int = Field(default=50, ge=1)
    probe_min: float = Field(default=0.1, gt=0.0)
    probe_max: float = Field(default=5.0, gt=0.0)
    probe_size: int = Field(default=60, ge=2)
    section_coordinate: float = Field(default=0.54, gt=0.0)
    threads: int = Field(default=1, ge=1)

    # files
    input: str | None = None
    out: str = "out"

    @field_validator("sizes")
    @classmethod
    def _check_sizes(cls, value: list[int] | None) -> list[int] | None:
        if value is not None and (not value or any(v < 1 for v in value)):
            raise ValueError("sizes must be a nonempty list of positive integers")
        return value

    @classmethod
    def from_file(cls, path: str | Path, **overrides: Any) -> RunConfig:
        """Load a TOML config file; keyword overrides win over file values."""
        with open(path, "rb") as f:
            data = tomllib.load(f)
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)

    def to_manifest(self) -> dict[str, Any]:
        """JSON/TOML-compatible dict of the resolved configuration."""
        return self.model_dump(mode="json", exclude_none=True)

    def sample_sizes(self) -> list[int]:
        return list(self.sizes) if self.sizes else [self.n]

    def resolved_delta(self, n: int) -> float:
        if self.delta_rule == "theorem-rate":
            return theorem_rate_delta(n)
        return self.delta

    def ou_params(self) -> OUParams:
        return OUParams(drift=self.ou_drift, diffusion=self.ou_diffusion)

    def cir_params(self) -> CIRParams:
        return CIRParams(theta=self.cir_theta, kappa=self.cir_kappa, sigma=self.cir_sigma)

    def path_config(self, n: int | None = None) -> PathConfig:
        size = self.n if n is None else n
        return PathConfig(
            delta=self.resolved_delta(size),
            n=size,
            substeps=self.substeps,
            seed=self.seed,
            burn_in=self.burn_in,
        )

    def selection_config(self) -> SelectionConfig:
        return SelectionConfig(
            chi=self.chi,
            grid_step=self.grid_step,
            mode=self.mode,
            frequency_step=self.frequency_step,
        )

    def probe_axis(self) -> np.ndarray:
        return log_probe_axis(self.probe_min, self.probe_max, self.probe_size)

    def mc_config(self, n: int | None = None) -> MCConfig:
        return MCConfig(
            process=self.process,
            ou=self.ou_params(),
            cir=self.cir_params(),
            path=self.path_config(n),
            noise=self.noise,
            gamma_shape=self.gamma_shape,
            gamma_rate=self.gamma_rate,
            selection=self.selection_config(),
            oracle_selection=SelectionConfig(
                chi=self.oracle_chi,
                grid_step=self.grid_step,
                mode=SelectionMode.GENERAL,
                frequency_step=self.frequency_step,
            ),
            replications=self.reps,
            probe_min=self.probe_min,
            probe_max=self.probe_max,
            probe_size=self.probe_size,
            section_coordinate=self.section_coordinate,
            master_seed=self.seed,
            threads=self.threads,
        )
