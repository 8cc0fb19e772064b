"""Analytic-identity checks of the numerical core.

Each check compares a computed quantity against a closed form and passes
when the discrepancy is below its tolerance. ``run_selftest`` prints one
line per check and returns the CLI exit status.
"""

from __future__ import annotations

import logging
import math
import sys
import time
from collections.abc import Callable
from dataclasses import dataclass
from typing import TextIO

import numpy as np
from scipy import special

from mellin_volatility.config import OUParams
from mellin_volatility.mellin import (
    empirical_mellin,
    inverse_mellin_cutoff,
    plancherel_norm_sq,
    weighted_l2_norm_sq_xspace,
)
from mellin_volatility.noise import (
    NoiseModel,
    lambda_g,
    lambda_g_quadrature,
    mellin_g,
    mellin_g_abs2_inv,
)
from mellin_volatility.processes import stationary_cov_ou
from mellin_volatility.special import gamma_half_line_abs2, log_gamma_complex
from mellin_volatility.truth import TruthSpec
from mellin_volatility.types import DevelopmentPoint, ObservationSet

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 4


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one identity check.

    Attributes:
        name: Check identifier.
        error: Observed discrepancy.
        tolerance: Largest acceptable discrepancy.
        seconds: Wall time of the check.
        failure: Exception text if the check raised.
    """

    name: str
    error: float
    tolerance: float
    seconds: float
    failure: str | None = None

    @property
    def passed(self) -> bool:
        return self.failure is None and self.error < self.tolerance

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        if self.failure is not None:
            return f"{status} {self.name}: {self.failure}"
        return (
            f"{status} {self.name}: error {self.error:.3e} "
            f"(tolerance {self.tolerance:.0e}, {self.seconds:.2f}s)"
        )


def _relative(a: np.ndarray | float, b: np.ndarray | float) -> float:
    a_arr, b_arr = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a_arr - b_arr) / np.abs(b_arr)))


def check_log_gamma_factorials() -> float:
    z = np.arange(1, 21, dtype=np.float64)
    return float(np.max(np.abs(log_gamma_complex(z + 0j).real - special.gammaln(z))))


def check_log_gamma_reflection() -> float:
    # log Gamma(z) + log Gamma(1 - z) = log(pi / sin(pi z)) modulo 2 pi i
    z = np.linspace(-2.7, 2.3, 11) + 0.7j
    lhs = np.exp(log_gamma_complex(z) + log_gamma_complex(1.0 - z))
    return _relative(lhs, np.pi / np.sin(np.pi * z))


def check_gamma_half_line() -> float:
    t = np.linspace(-10.0, 10.0, 201)
    computed = np.exp(2.0 * log_gamma_complex(0.5 + 1j * t).real)
    return _relative(computed, gamma_half_line_abs2(t))


def check_gamma_cosh_identity() -> float:
    axis = np.round(np.arange(-30, 31) * 0.1, 12)
    t1, t2 = np.meshgrid(axis, axis, indexing="ij")
    chi2 = NoiseModel.chi_squared()
    closed = mellin_g_abs2_inv(chi2, (t1, t2))
    via_gamma = 1.0 / np.abs(mellin_g(chi2, DevelopmentPoint(), (t1, t2))) ** 2
    return _relative(closed, via_gamma)


def check_lambda_closed_form() -> float:
    chi2 = NoiseModel.chi_squared()
    return max(
        _relative(lambda_g(chi2, None, k), lambda_g_quadrature(chi2, None, k))
        for k in ((0.5, 0.5), (1.0, 1.0), (1.5, 2.0))
    )


def check_lyapunov() -> float:
    params = OUParams()
    sigma = stationary_cov_ou(params)
    b, a = params.drift_matrix, params.diffusion_matrix
    residual = np.linalg.norm(b @ sigma + sigma @ b.T + a @ a.T)
    expected = np.array([[4.0, 1.0], [1.0, 2.0]]) / 7.0
    return max(float(residual), float(np.max(np.abs(sigma - expected))))


def check_empirical_conjugation() -> float:
    obs = ObservationSet(np.array([[math.e, 1.0], [1.0, 1.0], [0.3, 2.5]]))
    worst = 0.0
    for t in ((1.0, 0.0), (0.7, -2.2), (3.1, 4.0)):
        plus = empirical_mellin(obs, t)
        minus = empirical_mellin(obs, (-t[0], -t[1]))
        worst = max(worst, abs(minus - plus.conjugate()))
    return worst


def check_constant_inversion() -> float:
    # a unit transform on [-1, 1]^2 inverts to 1 / pi^2 at (1, 1)
    value = inverse_mellin_cutoff(1.0, None, (1.0, 1.0), None, (1.0, 1.0))
    norm = plancherel_norm_sq(1.0, (1.0, 1.0))
    target = 1.0 / math.pi**2
    return max(abs(value - target), abs(norm - target)) / target


def check_plancherel_lognormal() -> float:
    truth = TruthSpec.lognormal()

    def density(x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
        points = np.column_stack([x1.ravel(), x2.ravel()])
        return np.asarray(truth.density(points)).reshape(x1.shape)

    return _relative(weighted_l2_norm_sq_xspace(density), math.sqrt(7.0) / (4.0 * math.pi))


CHECKS: tuple[tuple[str, Callable[[], float], float], ...] = (
    ("log-gamma at integers", check_log_gamma_factorials, 1e-12),
    ("log-gamma reflection", check_log_gamma_reflection, 1e-10),
    ("|Gamma(1/2 + it)|^2 = pi / cosh(pi t)", check_gamma_half_line, 1e-10),
    ("chi-squared |M[g]|^-2 = cosh cosh", check_gamma_cosh_identity, 1e-10),
    ("Lambda_g closed form vs quadrature", check_lambda_closed_form, 1e-8),
    ("OU stationary covariance", check_lyapunov, 1e-12),
    ("empirical Mellin conjugation", check_empirical_conjugation, 1e-14),
    ("constant transform inversion", check_constant_inversion, 1e-12),
    ("lognormal norm in x-space", check_plancherel_lognormal, 1e-3),
)


def run_check(name: str, check: Callable[[], float], tolerance: float) -> CheckResult:
    start = time.perf_counter()
    try:
        error = check()
    except Exception as exc:  # reported as a failed check
        logger.debug("Check %s raised", name, exc_info=True)
        return CheckResult(name, math.inf, tolerance, time.perf_counter() - start, repr(exc))
    return CheckResult(name, error, tolerance, time.perf_counter() - start)


def run_selftest(stream: TextIO | None = None) -> int:
    """Run every identity check and print ``PASS``/``FAIL`` lines.

    Returns:
        0 if all checks pass, 4 otherwise.
    """
    out = stream or sys.stdout
    results = [run_check(name, check, tolerance) for name, check, tolerance in CHECKS]
    for result in results:
        print(result.line(), file=out)
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed", file=out)
    return EXIT_OK if failed == 0 else EXIT_FAILED
