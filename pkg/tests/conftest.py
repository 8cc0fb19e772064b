"""Pytest fixtures and configuration for tests."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest

from mellin_volatility import (
    NoiseModel,
    ObservationSet,
    PathConfig,
    PresetRegistry,
    SelectionConfig,
    SelectionMode,
    TruthSpec,
    default_registry,
)


@pytest.fixture
def chi2() -> NoiseModel:
    """Chi-squared noise with one degree of freedom."""
    return NoiseModel.chi_squared()


@pytest.fixture
def noiseless() -> NoiseModel:
    """Direct observation."""
    return NoiseModel.noiseless()


@pytest.fixture
def lognormal() -> TruthSpec:
    """Stationary law of the default exponential OU process."""
    return TruthSpec.lognormal()


@pytest.fixture
def two_point_obs() -> ObservationSet:
    """Observations {(e, 1), (1, 1)}."""
    return ObservationSet(np.array([[math.e, 1.0], [1.0, 1.0]]))


@pytest.fixture
def unit_obs() -> ObservationSet:
    """A single observation at (1, 1)."""
    return ObservationSet(np.array([[1.0, 1.0]]))


@pytest.fixture
def lognormal_obs() -> ObservationSet:
    """2000 direct draws from the default lognormal truth."""
    rng = np.random.default_rng(12345)
    cov = np.array([[4.0, 1.0], [1.0, 2.0]]) / 7.0
    z = rng.multivariate_normal(np.zeros(2), cov, size=2000)
    return ObservationSet(np.exp(z))


@pytest.fixture
def small_path() -> PathConfig:
    """A short path configuration."""
    return PathConfig(delta=0.01, n=200, substeps=5, seed=3)


@pytest.fixture
def volatility_selection() -> SelectionConfig:
    """Volatility-mode selection on a unit lattice."""
    return SelectionConfig(chi=1e-2, grid_step=1.0, mode=SelectionMode.VOLATILITY)


@pytest.fixture
def registry() -> PresetRegistry:
    """An empty preset registry."""
    return PresetRegistry()


@pytest.fixture
def presets() -> PresetRegistry:
    """The built-in presets."""
    return default_registry()


@pytest.fixture
def out_dir(tmp_path: Path) -> Path:
    """Output directory for CLI runs."""
    return tmp_path / "out"
