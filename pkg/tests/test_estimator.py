"""Tests for estimator module."""

from __future__ import annotations

import math

import numpy as np
import pytest

from mellin_volatility import (
    AdmissibilityError,
    CutoffRect,
    DensitySource,
    DevelopmentPoint,
    DevelopmentPointWarning,
    DomainError,
    EmptyCandidateGridError,
    EstimateHandle,
    FrequencyGrid,
    NoiseModel,
    ObservationSet,
    SelectionConfig,
    SelectionMode,
    TruthSpec,
    build_estimate,
    candidate_grid,
    empirical_mellin,
    estimate_norm_sq,
    evaluate_clipped,
    evaluate_density,
    evaluate_surface,
    mellin_g,
    penalty,
    restrict,
    select_cutoff,
    truth_approximation,
    weighted_l2_norm_sq_xspace,
)
from mellin_volatility.estimator import max_box, mu_hat
from mellin_volatility.exceptions import ShapeMismatchError
from mellin_volatility.truth import mellin_grid


class TestBuildEstimate:
    """Tests for build_estimate and EstimateHandle."""

    def test_overflowing_moment_raises(self, noiseless: NoiseModel):
        """Test huge observations whose moment at c overflows are rejected."""
        obs = ObservationSet(np.full((2, 2), 1e200), c=DevelopmentPoint(2.0, 2.0))
        with pytest.raises(DomainError, match="not finite"):
            build_estimate(obs, noiseless, None, (1.0, 1.0))

    def test_single_observation_noiseless(self, unit_obs: ObservationSet, noiseless: NoiseModel):
        """Test one observation at (1, 1) gives 1 / pi^2 at (1, 1) for k = (1, 1)."""
        handle = build_estimate(unit_obs, noiseless, None, (1.0, 1.0))
        assert evaluate_density(handle, (1.0, 1.0)) == pytest.approx(1.0 / math.pi**2, rel=1e-12)
        assert estimate_norm_sq(handle) == pytest.approx(1.0 / math.pi**2, rel=1e-12)

    def test_ratio_is_read_only(self, two_point_obs: ObservationSet, chi2: NoiseModel):
        """Test the tabulated ratio cannot be modified."""
        handle = build_estimate(two_point_obs, chi2, None, (1.0, 1.0))
        with pytest.raises(ValueError):
            handle.ratio[0, 0] = 0.0

    def test_ratio_divides_by_noise(self, two_point_obs: ObservationSet, chi2: NoiseModel):
        """Test the ratio is M_hat / M[g] at a grid node."""
        grid = FrequencyGrid(CutoffRect(1.0, 1.0), 0.5)
        handle = build_estimate(two_point_obs, chi2, None, (1.0, 1.0), grid)
        t1, t2 = grid.mesh()
        # node (1, 0) sits at index (4, 2)
        assert (t1[4, 2], t2[4, 2]) == (1.0, 0.0)
        expected = empirical_mellin(two_point_obs, (1.0, 0.0)) / mellin_g(
            chi2, DevelopmentPoint(), (1.0, 0.0)
        )
        assert handle.ratio[4, 2] == pytest.approx(expected, rel=1e-12)

    def test_explicit_c_overrides_sample(self, two_point_obs: ObservationSet, chi2: NoiseModel):
        """Test a c passed to build_estimate is attached to the handle."""
        handle = build_estimate(two_point_obs, chi2, (1.2, 1.1), (1.0, 1.0))
        assert handle.c == DevelopmentPoint(1.2, 1.1)
        assert handle.obs is not None and handle.obs.c == handle.c

    def test_inadmissible_noise_raises(self, two_point_obs: ObservationSet, chi2: NoiseModel):
        """Test the noise must have a Mellin transform at c."""
        with pytest.warns(DevelopmentPointWarning), pytest.raises(AdmissibilityError):
            build_estimate(two_point_obs, chi2, (0.4, 1.0), (1.0, 1.0))

    def test_theory_warning(self, two_point_obs: ObservationSet, chi2: NoiseModel):
        """Test c between 3/4 and 7/8 warns that adaptivity bounds do not apply."""
        with pytest.warns(DevelopmentPointWarning, match="adaptivity"):
            build_estimate(two_point_obs, chi2, (0.8, 1.0), (1.0, 1.0))

    def test_infinite_transform_raises(self, noiseless: NoiseModel):
        """Test an overflowing empirical transform is rejected."""
        obs = ObservationSet(np.array([[1e300, 1.0], [1.0, 1.0]]))
        with np.errstate(over="ignore", invalid="ignore"), pytest.raises(DomainError):
            build_estimate(obs, noiseless, (3.0, 1.0), (1.0, 1.0))

    def test_from_ratio(self):
        """Test synthetic handles built from a constant ratio."""
        zero = EstimateHandle.from_ratio(0.0, (2.0, 2.0))
        assert zero.obs is None
        assert zero.noise.is_noiseless
        assert estimate_norm_sq(zero) == 0.0
        assert evaluate_density(zero, (1.0, 1.0)) == 0.0

    def test_shape_mismatch(self):
        """Test a ratio table must match the grid."""
        grid = FrequencyGrid(CutoffRect(1.0, 1.0), 0.5)
        with pytest.raises(ShapeMismatchError):
            EstimateHandle(
                None, NoiseModel.noiseless(), DevelopmentPoint(), grid.cutoff, grid, np.ones((2, 2))
            )
        with pytest.raises(ShapeMismatchError, match="cutoff"):
            EstimateHandle(
                None,
                NoiseModel.noiseless(),
                DevelopmentPoint(),
                CutoffRect(2.0, 1.0),
                grid,
                np.ones(grid.shape),
            )

    def test_is_density_source(self, unit_obs: ObservationSet, noiseless: NoiseModel):
        """Test estimates satisfy the DensitySource protocol."""
        handle = build_estimate(unit_obs, noiseless, None, (1.0, 1.0))
        assert isinstance(handle, DensitySource)
        surface = handle.surface([0.5, 1.0], [1.0])
        assert surface.shape == (2, 1)
        assert surface[1, 0] == pytest.approx(handle.density((1.0, 1.0)))


class TestEvaluation:
    """Tests for surfaces, clipping and norms of estimates."""

    def test_surface_matches_points(self, lognormal_obs: ObservationSet, chi2: NoiseModel):
        """Test tensor and pointwise evaluation agree."""
        handle = build_estimate(lognormal_obs, chi2, None, (1.0, 1.0))
        surface = evaluate_surface(handle, [0.5, 1.0], [0.7, 2.0])
        point = evaluate_density(handle, (1.0, 2.0))
        assert surface[1, 1] == pytest.approx(point, rel=1e-10, abs=1e-14)

    def test_clipped_is_nonnegative(self, lognormal_obs: ObservationSet, chi2: NoiseModel):
        """Test the clipped view is max(f, 0) of the raw surface."""
        handle = build_estimate(lognormal_obs, chi2, None, (1.5, 1.5))
        axis = np.geomspace(0.01, 50.0, 15)
        raw = evaluate_surface(handle, axis, axis)
        clipped = evaluate_clipped(handle, axis, axis)
        assert np.all(clipped >= 0.0)
        np.testing.assert_array_equal(clipped, np.maximum(raw, 0.0))

    def test_norm_matches_x_space(self, lognormal: TruthSpec):
        """Test ||f_k||^2 from the ratio table against x-space quadrature of the surface."""
        grid = FrequencyGrid(CutoffRect(8.0, 8.0))
        handle = EstimateHandle.from_ratio(mellin_grid(lognormal, grid), grid.cutoff, grid=grid)

        def density(x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
            return handle.surface(x1[:, 0], x2[0, :])

        domain = (math.exp(-8.0), math.exp(8.0))
        xspace = weighted_l2_norm_sq_xspace(density, None, domain, resolution=801)
        assert estimate_norm_sq(handle) == pytest.approx(xspace, rel=1e-5)
        assert xspace == pytest.approx(math.sqrt(7.0) / (4.0 * math.pi), rel=1e-5)

    def test_noiseless_estimate_tracks_cutoff_truth(
        self, lognormal: TruthSpec, noiseless: NoiseModel
    ):
        """Test 10^4 direct draws recover f_k(1, 1) at k = (3, 3)."""
        rng = np.random.default_rng(31)
        draws = np.exp(rng.multivariate_normal(np.zeros(2), lognormal.cov_matrix, size=10_000))
        handle = build_estimate(ObservationSet(draws), noiseless, None, (3.0, 3.0))
        target = truth_approximation(lognormal, None, (3.0, 3.0), None, (1.0, 1.0))
        assert evaluate_density(handle, (1.0, 1.0)) == pytest.approx(target, abs=0.05)
        # the box keeps about 84% of the mass of M[f], so f_k(1, 1) sits well below f(1, 1)
        assert 0.33 < target < 0.38

    def test_unbiased_for_cutoff_truth(self, lognormal: TruthSpec, noiseless: NoiseModel):
        """Test the Monte-Carlo mean of f_hat_k matches f_k at nine points."""
        k = (2.0, 2.0)
        axis = np.array([0.7, 1.0, 1.4])
        x1, x2 = np.meshgrid(axis, axis, indexing="ij")
        points = np.column_stack([x1.ravel(), x2.ravel()])
        rng = np.random.default_rng(59)
        values = np.empty((200, points.shape[0]))
        for rep in range(values.shape[0]):
            draws = np.exp(rng.multivariate_normal(np.zeros(2), lognormal.cov_matrix, size=2000))
            handle = build_estimate(ObservationSet(draws), noiseless, None, k)
            values[rep] = evaluate_density(handle, points)

        target = truth_approximation(lognormal, None, k, None, points)
        standard_error = values.std(axis=0, ddof=1) / math.sqrt(values.shape[0])
        assert np.all(np.abs(values.mean(axis=0) - target) < 4.0 * standard_error)

    def test_truth_approximation(self, lognormal: TruthSpec):
        """Test the k = (6, 6) approximation of the lognormal peak."""
        value = truth_approximation(lognormal, None, (6.0, 6.0), None, (1.0, 1.0))
        assert value == pytest.approx(math.sqrt(7.0) / (2.0 * math.pi), abs=2e-3)


class TestRestrict:
    """Tests for restrict."""

    def test_aligned_slice_matches_rebuild(self, lognormal_obs: ObservationSet, chi2: NoiseModel):
        """Test a node-aligned restriction equals a fresh estimate on the smaller box."""
        big = build_estimate(lognormal_obs, chi2, None, (2.0, 2.0))
        small = restrict(big, (1.0, 0.5))
        fresh = build_estimate(lognormal_obs, chi2, None, (1.0, 0.5))
        assert small.k == CutoffRect(1.0, 0.5)
        np.testing.assert_array_equal(small.grid.t1, fresh.grid.t1)
        np.testing.assert_allclose(small.ratio, fresh.ratio, rtol=1e-12, atol=1e-15)

    def test_same_box_is_identity(self, two_point_obs: ObservationSet, chi2: NoiseModel):
        """Test restricting to the handle's own box returns it."""
        handle = build_estimate(two_point_obs, chi2, None, (1.0, 1.0))
        assert restrict(handle, (1.0, 1.0)) is handle

    def test_unaligned_rebuilds(self, two_point_obs: ObservationSet, chi2: NoiseModel):
        """Test an off-node box is rebuilt from the sample."""
        handle = build_estimate(two_point_obs, chi2, None, (1.0, 1.0))
        small = restrict(handle, (0.53, 0.5))
        assert small.grid.shape == FrequencyGrid(CutoffRect(0.53, 0.5)).shape
        fresh = build_estimate(two_point_obs, chi2, None, (0.53, 0.5))
        np.testing.assert_allclose(small.ratio, fresh.ratio, rtol=1e-12)

    def test_not_nested_raises(self, two_point_obs: ObservationSet, chi2: NoiseModel):
        """Test a larger box cannot be obtained by restriction."""
        handle = build_estimate(two_point_obs, chi2, None, (1.0, 1.0))
        with pytest.raises(ShapeMismatchError, match="not nested"):
            restrict(handle, (1.5, 0.5))

    def test_synthetic_unaligned_raises(self):
        """Test a synthetic table cannot be rebuilt."""
        handle = EstimateHandle.from_ratio(1.0, (1.0, 1.0))
        assert restrict(handle, (0.5, 0.5)).grid.shape == (21, 21)
        with pytest.raises(ShapeMismatchError, match="synthetic"):
            restrict(handle, (0.53, 0.5))


class TestCandidateGrid:
    """Tests for candidate_grid."""

    def test_single_candidate(self, chi2: NoiseModel, volatility_selection: SelectionConfig):
        """Test unit lattice steps leave only (1, 1) below n = 1000."""
        assert candidate_grid(1000, chi2, volatility_selection) == [CutoffRect(1.0, 1.0)]

    def test_half_step_lattice(self, chi2: NoiseModel):
        """Test the constraint pi (k1 + k2) <= log n on a 0.5 lattice."""
        config = SelectionConfig(grid_step=0.5)
        candidates = candidate_grid(5000, chi2, config)
        assert CutoffRect(0.5, 2.0) in candidates
        assert CutoffRect(1.0, 1.5) in candidates
        assert CutoffRect(1.5, 1.5) not in candidates
        assert candidates == sorted(candidates)

    def test_empty_grid_raises(self, chi2: NoiseModel):
        """Test tiny samples admit no cutoff."""
        with pytest.raises(EmptyCandidateGridError):
            candidate_grid(2, chi2, SelectionConfig(grid_step=0.25))
        with pytest.raises(DomainError):
            candidate_grid(0, chi2)

    def test_general_mode_noiseless(self, noiseless: NoiseModel):
        """Test Lambda_g = k1 k2 / pi^2 <= n keeps the whole lattice for n = 100."""
        config = SelectionConfig(grid_step=1.0, mode=SelectionMode.GENERAL)
        assert len(candidate_grid(100, noiseless, config)) == 16

    def test_general_mode_chi_squared(self, chi2: NoiseModel):
        """Test sinh(pi k1) sinh(pi k2) / pi^4 <= 100 on the unit lattice."""
        config = SelectionConfig(grid_step=1.0, mode=SelectionMode.GENERAL)
        assert candidate_grid(100, chi2, config) == [
            CutoffRect(1.0, 1.0),
            CutoffRect(1.0, 2.0),
            CutoffRect(2.0, 1.0),
        ]

    @pytest.mark.parametrize(("n", "top"), [(5000, 8.0), (1000, 6.0)])
    def test_lattice_stops_at_floor_log_n(self, noiseless: NoiseModel, n: int, top: float):
        """Test the largest lattice value is floor(log n), not log n."""
        config = SelectionConfig(grid_step=0.25, mode=SelectionMode.GENERAL)
        candidates = candidate_grid(n, noiseless, config)
        assert max(k.k1 for k in candidates) == top
        assert max(k.k2 for k in candidates) == top
        assert len(candidates) == int(4 * top) ** 2

    def test_max_box(self):
        """Test the enclosing box of a candidate list."""
        boxes = [CutoffRect(0.5, 2.0), CutoffRect(1.5, 0.5)]
        assert max_box(boxes) == CutoffRect(1.5, 2.0)


class TestPenalty:
    """Tests for penalty and mu_hat."""

    def test_volatility_mode(self, chi2: NoiseModel):
        """Test chi k1 k2 exp(pi (k1 + k2)) / n."""
        value = penalty((1.0, 1.0), 5000, chi2, None, SelectionConfig(chi=1.0))
        assert value == pytest.approx(math.exp(2.0 * math.pi) / 5000.0)
        assert value == pytest.approx(0.1070983, rel=1e-6)

    def test_general_mode(self, chi2: NoiseModel, noiseless: NoiseModel):
        """Test chi mu_hat k1 k2 Lambda_g(k) / n at c = 1."""
        config = SelectionConfig(chi=1.0, mode=SelectionMode.GENERAL)
        lambda_chi2 = math.sinh(math.pi) ** 2 / math.pi**4
        assert penalty((1.0, 1.0), 1, noiseless, None, config) == pytest.approx(1.0 / math.pi**2)
        assert penalty((1.0, 1.0), 1, chi2, None, config) == pytest.approx(lambda_chi2, rel=1e-12)

    def test_mu_hat(self):
        """Test mu_hat = mean Y^{2(c - 1)}."""
        obs = ObservationSet(np.array([[4.0, 1.0], [1.0, 1.0]]), c=DevelopmentPoint(1.5, 1.0))
        assert mu_hat(obs) == pytest.approx(2.5)
        assert mu_hat(obs.with_c((1.0, 1.0))) == 1.0
        assert mu_hat(None) == 1.0


class TestSelectCutoff:
    """Tests for select_cutoff."""

    def test_single_candidate_is_chosen(self, chi2: NoiseModel):
        """Test a grid with one candidate selects it."""
        obs = ObservationSet(np.exp(np.random.default_rng(3).normal(size=(1000, 2))))
        k_hat, diagnostics = select_cutoff(obs, chi2, SelectionConfig(grid_step=1.0))
        assert k_hat == CutoffRect(1.0, 1.0)
        assert len(diagnostics.candidates) == 1
        assert diagnostics.chosen.k == k_hat

    def test_constant_sample(self, noiseless: NoiseModel):
        """Test a sample at (1, 1) maximizes k1 k2 under the volatility constraint."""
        obs = ObservationSet(np.ones((5000, 2)))
        config = SelectionConfig(chi=1e-2, grid_step=0.25)
        k_hat, diagnostics = select_cutoff(obs, noiseless, config)
        assert k_hat == CutoffRect(1.25, 1.25)
        score = diagnostics.chosen
        assert score.norm_sq == pytest.approx(1.5625 / math.pi**2, rel=1e-10)
        assert score.contrast == pytest.approx(-score.norm_sq + score.pen)
        assert diagnostics.estimate().k == k_hat

    def test_matches_exhaustive_enumeration(self, chi2: NoiseModel):
        """Test selection equals brute-force minimization on 20 random samples."""
        cov = np.array([[4.0, 1.0], [1.0, 2.0]]) / 7.0
        for instance in range(20):
            rng = np.random.default_rng(1000 + instance)
            n = int(rng.integers(300, 3000))
            latent = np.exp(rng.multivariate_normal(np.zeros(2), cov, size=n))
            rows = np.maximum(latent * rng.standard_normal((n, 2)) ** 2, 1e-300)
            obs = ObservationSet(rows)
            chi = float(rng.uniform(1e-3, 1.0))
            if instance % 2 == 0:
                config = SelectionConfig(chi=chi, grid_step=0.25)
            else:
                config = SelectionConfig(chi=chi, grid_step=0.5, mode=SelectionMode.GENERAL)

            k_hat, _ = select_cutoff(obs, chi2, config)

            best: tuple[float, CutoffRect] | None = None
            for k in candidate_grid(n, chi2, config):
                fresh = build_estimate(obs, chi2, None, k, FrequencyGrid(k, config.frequency_step))
                contrast = -estimate_norm_sq(fresh) + penalty(k, n, chi2, obs, config)
                if best is None or contrast < best[0]:
                    best = (contrast, k)
            assert best is not None
            assert k_hat == best[1], f"instance {instance}"

    def test_deterministic(self, lognormal_obs: ObservationSet, chi2: NoiseModel):
        """Test repeated selection gives identical diagnostics."""
        first_k, first = select_cutoff(lognormal_obs, chi2)
        second_k, second = select_cutoff(lognormal_obs, chi2)
        assert first_k == second_k
        assert [s.contrast for s in first.candidates] == [s.contrast for s in second.candidates]

    def test_empty_grid_raises(self, chi2: NoiseModel):
        """Test tiny samples cannot be selected on."""
        obs = ObservationSet(np.ones((2, 2)))
        with pytest.raises(EmptyCandidateGridError):
            select_cutoff(obs, chi2)
