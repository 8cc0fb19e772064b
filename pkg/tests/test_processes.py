"""Tests for processes module."""

from __future__ import annotations

import math

import numpy as np
import pytest

from mellin_volatility import (
    CIRParams,
    DevelopmentPoint,
    DomainError,
    FellerConditionWarning,
    NoiseModel,
    ObservationSet,
    OUParams,
    PathConfig,
    ProcessKind,
    StationarityError,
    generate_observations,
    integrated_volatility,
    mellin_g,
    simulate_cir,
    simulate_exp_cir,
    simulate_exp_ou,
    simulate_path,
    solve_stationary_covariance,
    stationary_cov_ou,
)
from mellin_volatility.exceptions import ShapeMismatchError
from mellin_volatility.mellin import empirical_mellin


class TestStationaryCovariance:
    """Tests for the Lyapunov solver."""

    def test_default_ou(self):
        """Test the default OU process has covariance [[4, 1], [1, 2]] / 7."""
        params = OUParams()
        sigma = stationary_cov_ou(params)
        np.testing.assert_allclose(sigma, np.array([[4.0, 1.0], [1.0, 2.0]]) / 7.0, atol=1e-14)
        b, a = params.drift_matrix, params.diffusion_matrix
        residual = b @ sigma + sigma @ b.T + a @ a.T
        assert np.linalg.norm(residual) < 1e-12

    def test_symmetric(self):
        """Test the solution is exactly symmetric."""
        sigma = solve_stationary_covariance([[-2.0, 0.5], [0.3, -1.0]], [[1.0, 0.2], [0.0, 0.7]])
        assert sigma[0, 1] == sigma[1, 0]

    def test_unstable_drift_raises(self):
        """Test a drift with a nonnegative eigenvalue has no stationary law."""
        with pytest.raises(StationarityError):
            solve_stationary_covariance([[0.5, 0.0], [0.0, -1.0]], np.eye(2))

    def test_bad_shape_raises(self):
        """Test only 2x2 matrices are accepted."""
        with pytest.raises(ShapeMismatchError):
            solve_stationary_covariance(-np.eye(3), np.eye(3))


class TestIntegratedVolatility:
    """Tests for integrated_volatility."""

    def test_linear_path_is_exact(self):
        """Test the trapezoid rule integrates a linear path exactly."""
        path = np.linspace(0.0, 1.5, 13)
        np.testing.assert_allclose(integrated_volatility(path, 0.5, 4), [0.25, 0.75, 1.25])

    def test_constant_path(self):
        """Test a constant path averages to itself."""
        path = np.full((21, 2), 3.0)
        np.testing.assert_array_equal(integrated_volatility(path, 0.01, 5), np.full((4, 2), 3.0))

    def test_bad_node_count_raises(self):
        """Test the node count must be n * substeps + 1."""
        with pytest.raises(ShapeMismatchError):
            integrated_volatility(np.ones(12), 0.1, 4)
        with pytest.raises(ShapeMismatchError):
            integrated_volatility(np.ones(3), 0.1, 4)
        with pytest.raises(ShapeMismatchError, match="substep"):
            integrated_volatility(np.ones(5), 0.1, 0)

    def test_bad_delta_raises(self):
        """Test the observation step must be positive."""
        with pytest.raises(DomainError):
            integrated_volatility(np.ones(5), 0.0, 4)


class TestSimulateExpOU:
    """Tests for simulate_exp_ou."""

    def test_shapes(self, small_path: PathConfig):
        """Test the bundle holds n intervals of substeps fine steps."""
        bundle = simulate_exp_ou(OUParams(), small_path)
        assert bundle.n == 200
        assert bundle.vbar.shape == (200, 2)
        assert bundle.raw_path is not None and bundle.raw_path.shape == (1001, 2)
        assert bundle.latent_path is not None
        np.testing.assert_allclose(bundle.raw_path, np.exp(bundle.latent_path))
        assert bundle.process is ProcessKind.EXP_OU
        assert np.all(bundle.vbar > 0.0)

    def test_burn_in_is_discarded(self, small_path: PathConfig):
        """Test burn-in intervals do not appear in the output."""
        cfg = small_path.model_copy(update={"burn_in": 50})
        bundle = simulate_exp_ou(OUParams(), cfg)
        assert bundle.vbar.shape == (200, 2)
        assert bundle.raw_path is not None and bundle.raw_path.shape == (1001, 2)

    def test_deterministic(self, small_path: PathConfig):
        """Test the same seed reproduces the path bit for bit."""
        first = simulate_exp_ou(OUParams(), small_path)
        second = simulate_exp_ou(OUParams(), small_path)
        np.testing.assert_array_equal(first.vbar, second.vbar)
        other = simulate_exp_ou(OUParams(), small_path.model_copy(update={"seed": 4}))
        assert not np.array_equal(first.vbar, other.vbar)

    def test_zero_diffusion_from_origin(self, small_path: PathConfig):
        """Test Z stays at zero without noise, so V is identically one."""
        params = OUParams(diffusion=((0.0, 0.0), (0.0, 0.0)))
        bundle = simulate_exp_ou(params, small_path, initial=(0.0, 0.0))
        np.testing.assert_array_equal(bundle.vbar, np.ones((200, 2)))


class TestSimulateCIR:
    """Tests for simulate_cir and simulate_exp_cir."""

    def test_zero_sigma_stays_at_theta(self, small_path: PathConfig):
        """Test a noiseless CIR coordinate started at theta never moves."""
        params = CIRParams(theta=(3.0, 2.0), sigma=(0.0, 0.0))
        bundle = simulate_cir(params, small_path)
        np.testing.assert_array_equal(bundle.vbar[:, 0], 3.0)
        np.testing.assert_array_equal(bundle.vbar[:, 1], 2.0)

    def test_fixed_initial_state(self):
        """Test a given start is the first recorded level of each coordinate."""
        cfg = PathConfig(delta=0.02, n=50, substeps=2, burn_in=0, seed=3)
        params = CIRParams(sigma=(0.0, 0.0))
        bundle = simulate_cir(params, cfg, initial=(1.0, 2.0))
        assert bundle.raw_path is not None
        np.testing.assert_array_equal(bundle.raw_path[0], [1.0, 2.0])
        # deterministic pull toward theta = 3 from below
        assert np.all(np.diff(bundle.raw_path, axis=0) > 0.0)

    def test_stationary_mean(self):
        """Test the long-run mean of CIR(kappa=1, sigma=sqrt(2), theta=3) is 3."""
        cfg = PathConfig(delta=0.01, n=20_000, substeps=5, seed=11)
        bundle = simulate_cir(CIRParams(), cfg)
        horizon = cfg.n * cfg.delta
        # variance of a time average: 2 Var(V) / (kappa T), Var(V) = 3
        standard_error = math.sqrt(2.0 * 3.0 / horizon)
        for axis in range(2):
            assert abs(bundle.vbar[:, axis].mean() - 3.0) < 4.0 * standard_error

    def test_stationary_variance(self):
        """Test the long-run variance of CIR(kappa=1, sigma=sqrt(2), theta=3) is 3."""
        cfg = PathConfig(delta=0.05, n=20_000, substeps=5, seed=12)
        bundle = simulate_cir(CIRParams(), cfg)
        assert bundle.raw_path is not None
        levels = bundle.raw_path[:: cfg.substeps]
        horizon = cfg.n * cfg.delta
        # Var((V - 3)^2) = 9 (2 + 6 / 3), autocorrelation time at most 2 / kappa
        standard_error = math.sqrt(36.0 * 2.0 / horizon)
        for axis in range(2):
            assert abs(levels[:, axis].var() - 3.0) < 4.0 * standard_error

    def test_exp_cir_moment(self):
        """Test E[V^{i t}] = (1 - i)^-2 at t = (1, 0) for Gamma(2, 1) log-levels."""
        cfg = PathConfig(delta=0.05, n=20_000, substeps=5, seed=13)
        bundle = simulate_exp_cir(CIRParams(theta=(2.0, 2.0)), cfg)
        assert bundle.raw_path is not None
        levels = ObservationSet(bundle.raw_path[:: cfg.substeps])
        moment = empirical_mellin(levels, (1.0, 0.0))
        horizon = cfg.n * cfg.delta
        # each term has variance 1 - |(1 - i)^-2|^2 = 3/4, autocorrelation time about 2 / kappa
        standard_error = math.sqrt(0.75 * 2.0 / horizon)
        assert abs(moment - (1.0 - 1.0j) ** -2) < 4.0 * standard_error

    def test_values_are_floored(self, small_path: PathConfig):
        """Test recorded values stay positive even when the Feller condition fails."""
        params = CIRParams(theta=(0.2, 0.2), kappa=(1.0, 1.0), sigma=(2.0, 2.0))
        with pytest.warns(FellerConditionWarning):
            bundle = simulate_cir(params, small_path)
        assert bundle.raw_path is not None
        assert np.all(bundle.raw_path > 0.0)
        assert np.all(bundle.vbar > 0.0)

    def test_exp_cir_above_one(self, small_path: PathConfig):
        """Test V = exp(Z) with Z >= 0 lives on [1, inf)^2."""
        bundle = simulate_exp_cir(CIRParams(theta=(2.0, 2.0)), small_path)
        assert bundle.process is ProcessKind.EXP_CIR
        assert np.all(bundle.vbar >= 1.0)

    def test_dispatch(self, small_path: PathConfig):
        """Test simulate_path picks the simulator by kind."""
        assert simulate_path("cir", small_path).process is ProcessKind.CIR
        assert simulate_path(ProcessKind.EXP_CIR, small_path).process is ProcessKind.EXP_CIR
        direct = simulate_exp_ou(OUParams(), small_path)
        np.testing.assert_array_equal(simulate_path("exp-ou", small_path).vbar, direct.vbar)


class TestGenerateObservations:
    """Tests for generate_observations."""

    def test_unit_noise_hook(self, small_path: PathConfig):
        """Test xi = 1 reproduces the integrated volatilities."""
        bundle = simulate_exp_ou(OUParams(), small_path)
        obs = generate_observations(bundle, seed=0, xi=np.ones((200, 2)))
        np.testing.assert_array_equal(obs.rows, bundle.vbar)
        assert obs.delta == small_path.delta

    def test_noiseless(self, small_path: PathConfig):
        """Test direct observation gives the integrated volatilities."""
        bundle = simulate_exp_ou(OUParams(), small_path)
        obs = generate_observations(bundle, seed=5, noise=NoiseModel.noiseless())
        np.testing.assert_array_equal(obs.rows, bundle.vbar)

    def test_noise_stream_is_separate(self, small_path: PathConfig):
        """Test redrawing the noise does not change the path and changes Y."""
        bundle = simulate_exp_ou(OUParams(), small_path)
        first = generate_observations(bundle, seed=1)
        second = generate_observations(bundle, seed=2)
        again = generate_observations(bundle, seed=1)
        assert not np.array_equal(first.rows, second.rows)
        np.testing.assert_array_equal(first.rows, again.rows)

    def test_development_point_attached(self, small_path: PathConfig):
        """Test the requested c travels with the observations."""
        bundle = simulate_exp_ou(OUParams(), small_path)
        obs = generate_observations(bundle, seed=1, c=(0.9, 1.1))
        assert obs.c == DevelopmentPoint(0.9, 1.1)

    def test_convolution_identity(self):
        """Test M_hat[Y] = M_hat[Vbar] M[g] up to Monte-Carlo error."""
        cfg = PathConfig(delta=0.01, n=10_000, substeps=2, seed=21)
        bundle = simulate_exp_ou(OUParams(), cfg)
        noise = NoiseModel.chi_squared()
        noisy = generate_observations(bundle, seed=22, noise=noise)
        direct = bundle.as_observations()
        for t in [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]:
            transform = mellin_g(noise, DevelopmentPoint(), t)
            # given Vbar, each term has variance 1 - |M[g](t)|^2
            standard_error = math.sqrt((1.0 - abs(transform) ** 2) / cfg.n)
            gap = empirical_mellin(noisy, t) - empirical_mellin(direct, t) * transform
            assert abs(gap) < 4.0 * standard_error
