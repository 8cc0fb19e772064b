"""Simulation of the volatility processes and of the noisy observations.

Three processes are supported: the exponential of a bivariate
Ornstein-Uhlenbeck process, a CIR process with independent coordinates and
the exponential of such a CIR process. Paths are advanced on a fine grid with
``substeps`` Euler steps per observation interval, integrated per interval,
and multiplied by independent noise to give the observations.

Path noise and multiplicative noise come from separate counter-based
(Philox) streams, so redrawing observations never changes a path.
"""

from __future__ import annotations

import logging
import math
import warnings

import numpy as np
from numpy.typing import ArrayLike
from scipy import linalg

from mellin_volatility.config import CIRParams, OUParams, PathConfig
from mellin_volatility.exceptions import DomainError, ShapeMismatchError, StationarityError
from mellin_volatility.noise import NoiseModel
from mellin_volatility.types import (
    DevelopmentPoint,
    FellerConditionWarning,
    FloatArray,
    ObservationSet,
    PathBundle,
    ProcessKind,
)

logger = logging.getLogger(__name__)

CIR_RECORDING_FLOOR = 1e-12
"""Smallest value recorded for a CIR coordinate."""

_PATH_STREAM = 0
_NOISE_STREAM = 1


def path_generator(seed: int) -> np.random.Generator:
    """Random stream for the Brownian increments and initial states of a path."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, _PATH_STREAM])))


def noise_generator(seed: int) -> np.random.Generator:
    """Random stream for the multiplicative observation noise."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, _NOISE_STREAM])))


def solve_stationary_covariance(drift: ArrayLike, diffusion: ArrayLike) -> FloatArray:
    """Solve ``B S + S B^T + A A^T = 0`` for the stationary covariance ``S``.

    Args:
        drift: Drift matrix ``B``.
        diffusion: Diffusion matrix ``A``.

    Returns:
        The symmetric covariance matrix.

    Raises:
        StationarityError: If ``B`` has an eigenvalue with nonnegative real part.
    """
    b = np.asarray(drift, dtype=np.float64)
    a = np.asarray(diffusion, dtype=np.float64)
    if b.shape != (2, 2) or a.shape != (2, 2):
        raise ShapeMismatchError(f"Expected 2x2 matrices, got {b.shape} and {a.shape}")
    eigenvalues = np.linalg.eigvals(b)
    if np.any(eigenvalues.real >= 0.0):
        raise StationarityError(
            f"Drift eigenvalues {eigenvalues.tolist()} must have negative real parts"
        )
    sigma = linalg.solve_continuous_lyapunov(b, -a @ a.T)
    return 0.5 * (sigma + sigma.T)


def stationary_cov_ou(params: OUParams) -> FloatArray:
    """Covariance of the invariant Gaussian law of the OU process.

    Example:
        ```python
        stationary_cov_ou(OUParams())  # [[4/7, 1/7], [1/7, 2/7]]
        ```
    """
    return solve_stationary_covariance(params.drift_matrix, params.diffusion_matrix)


def integrated_volatility(path: ArrayLike, delta: float, substeps: int) -> FloatArray:
    """Per-interval time averages ``Delta^-1 int V ds`` by the composite trapezoid rule.

    Args:
        path: Fine-grid values, shape ``(n * substeps + 1,)`` or ``(n * substeps + 1, d)``.
        delta: Observation step; the fine step is ``delta / substeps``.
        substeps: Fine steps per interval.

    Returns:
        Array of shape ``(n,)`` or ``(n, d)``.

    Raises:
        ShapeMismatchError: If the node count is not ``n * substeps + 1`` with n >= 1.
    """
    values = np.asarray(path, dtype=np.float64)
    if not delta > 0.0:
        raise DomainError(f"Observation step must be positive, got {delta}")
    if substeps < 1:
        raise ShapeMismatchError(f"Need at least one substep per interval, got {substeps}")
    if values.ndim not in (1, 2) or values.shape[0] < substeps + 1:
        raise ShapeMismatchError(f"Path of shape {values.shape} spans less than one interval")
    if (values.shape[0] - 1) % substeps != 0:
        raise ShapeMismatchError(
            f"Path has {values.shape[0]} nodes, not a multiple of {substeps} plus one"
        )
    n = (values.shape[0] - 1) // substeps
    blocks = values[:-1].reshape((n, substeps) + values.shape[1:]).sum(axis=1)
    # the time step delta / substeps and the 1 / delta scaling cancel
    return (blocks - 0.5 * values[:-1:substeps] + 0.5 * values[substeps::substeps]) / substeps


def _euler_ou(
    start: FloatArray, drift: FloatArray, shocks: FloatArray, step: float
) -> FloatArray:
    f11, f12 = 1.0 + step * drift[0, 0], step * drift[0, 1]
    f21, f22 = step * drift[1, 0], 1.0 + step * drift[1, 1]
    z1, z2 = float(start[0]), float(start[1])
    out = np.empty((shocks.shape[0] + 1, 2))
    out[0] = (z1, z2)
    for i, (e1, e2) in enumerate(shocks.tolist(), start=1):
        z1, z2 = f11 * z1 + f12 * z2 + e1, f21 * z1 + f22 * z2 + e2
        out[i, 0] = z1
        out[i, 1] = z2
    return out


def simulate_exp_ou(
    params: OUParams, cfg: PathConfig, *, initial: ArrayLike | None = None
) -> PathBundle:
    """Simulate ``V = exp(Z)`` for the OU process ``dZ = B Z dt + A dW``.

    ``Z_0`` is drawn from the stationary law ``N(0, S)`` unless ``initial``
    is given; ``Z`` is advanced by Euler-Maruyama with step ``delta / substeps``.

    Args:
        params: Drift and diffusion.
        cfg: Time discretization and seed.
        initial: Optional fixed ``Z_0``.

    Returns:
        Bundle with integrated volatilities, the fine path of ``V`` and the
        latent ``Z``.
    """
    logger.info(
        "Simulating exp-ou path: n=%d, substeps=%d, delta=%g", cfg.n, cfg.substeps, cfg.delta
    )
    rng = path_generator(cfg.seed)
    if initial is None:
        chol = np.linalg.cholesky(stationary_cov_ou(params))
        start = chol @ rng.standard_normal(2)
    else:
        start = np.asarray(initial, dtype=np.float64).reshape(2)
    h = cfg.fine_step
    normals = rng.standard_normal((cfg.total_fine_steps, 2))
    shocks = math.sqrt(h) * normals @ params.diffusion_matrix.T
    latent = _euler_ou(start, params.drift_matrix, shocks, h)[cfg.burn_in * cfg.substeps :]
    volatility = np.exp(latent)
    return PathBundle(
        vbar=integrated_volatility(volatility, cfg.delta, cfg.substeps),
        meta=cfg,
        process=ProcessKind.EXP_OU,
        raw_path=volatility,
        latent_path=latent,
    )


def _euler_cir(
    start: float, kappa: float, theta: float, sigma: float, step: float, xi: FloatArray
) -> FloatArray:
    # full truncation: drift and diffusion see max(v, 0); the raw state may dip below zero
    root_step = math.sqrt(step)
    v = start
    out = np.empty(xi.size + 1)
    out[0] = v
    for i, shock in enumerate(xi.tolist(), start=1):
        positive = v if v > 0.0 else 0.0
        v = v + kappa * (theta - positive) * step + sigma * math.sqrt(positive) * root_step * shock
        out[i] = v
    return np.maximum(out, CIR_RECORDING_FLOOR)


def _simulate_cir_latent(
    params: CIRParams, cfg: PathConfig, initial: ArrayLike | None
) -> FloatArray:
    if not params.satisfies_feller:
        warnings.warn(
            f"CIR parameters violate the Feller condition 2 kappa theta >= sigma^2 "
            f"(stationary shape {params.stationary_shape.tolist()})",
            FellerConditionWarning,
            stacklevel=3,
        )
    rng = path_generator(cfg.seed)
    if initial is None:
        shape, rate = params.stationary_shape, params.stationary_rate
        start = np.array(
            [
                params.theta[i] if params.sigma[i] == 0.0 else rng.gamma(shape[i], 1.0 / rate[i])
                for i in range(2)
            ]
        )
    else:
        start = np.asarray(initial, dtype=np.float64).reshape(2)
    xi = rng.standard_normal((cfg.total_fine_steps, 2))
    columns = [
        _euler_cir(
            float(start[i]),
            params.kappa[i],
            params.theta[i],
            params.sigma[i],
            cfg.fine_step,
            xi[:, i],
        )
        for i in range(2)
    ]
    return np.column_stack(columns)[cfg.burn_in * cfg.substeps :]


def simulate_cir(
    params: CIRParams, cfg: PathConfig, *, initial: ArrayLike | None = None
) -> PathBundle:
    """Simulate ``dV = kappa (theta - V) dt + sigma sqrt(V) dW`` per coordinate.

    Full-truncation Euler scheme; recorded values are floored at
    ``CIR_RECORDING_FLOOR``. The start is drawn from the stationary
    Gamma(2 kappa theta / sigma^2, rate 2 kappa / sigma^2) law unless
    ``initial`` is given (a coordinate with ``sigma = 0`` starts at ``theta``).

    Warns:
        FellerConditionWarning: If ``2 kappa theta < sigma^2`` on some axis.
    """
    logger.info("Simulating cir path: n=%d, substeps=%d, delta=%g", cfg.n, cfg.substeps, cfg.delta)
    volatility = _simulate_cir_latent(params, cfg, initial)
    return PathBundle(
        vbar=integrated_volatility(volatility, cfg.delta, cfg.substeps),
        meta=cfg,
        process=ProcessKind.CIR,
        raw_path=volatility,
    )


def simulate_exp_cir(
    params: CIRParams, cfg: PathConfig, *, initial: ArrayLike | None = None
) -> PathBundle:
    """Simulate ``V = exp(Z)`` for a CIR process ``Z``; ``V`` lives on ``[1, inf)^2``.

    Warns:
        FellerConditionWarning: If ``2 kappa theta < sigma^2`` on some axis.
    """
    logger.info(
        "Simulating exp-cir path: n=%d, substeps=%d, delta=%g", cfg.n, cfg.substeps, cfg.delta
    )
    latent = _simulate_cir_latent(params, cfg, initial)
    volatility = np.exp(latent)
    return PathBundle(
        vbar=integrated_volatility(volatility, cfg.delta, cfg.substeps),
        meta=cfg,
        process=ProcessKind.EXP_CIR,
        raw_path=volatility,
        latent_path=latent,
    )


def simulate_path(
    process: ProcessKind | str,
    cfg: PathConfig,
    ou: OUParams | None = None,
    cir: CIRParams | None = None,
) -> PathBundle:
    """Dispatch to the simulator of ``process`` with default parameters when omitted."""
    process = ProcessKind(process)
    if process is ProcessKind.EXP_OU:
        return simulate_exp_ou(ou or OUParams(), cfg)
    if process is ProcessKind.CIR:
        return simulate_cir(cir or CIRParams(), cfg)
    return simulate_exp_cir(cir or CIRParams(), cfg)


def generate_observations(
    bundle: PathBundle,
    seed: int,
    noise: NoiseModel | None = None,
    *,
    c: DevelopmentPoint | ArrayLike | None = None,
    xi: ArrayLike | None = None,
) -> ObservationSet:
    """Draw ``Y_j = Vbar_j * U_j`` from the exact conditional law of the model.

    Args:
        bundle: Simulated path.
        seed: Seed of the noise stream, independent of the path stream.
        noise: Law of ``U``, chi-squared with one degree of freedom by default.
        c: Development point attached to the observations.
        xi: Test hook; when given, ``U = xi^2`` and no random draw is made.

    Returns:
        Observation set with the bundle's ``delta``; entries are floored at the
        smallest positive normal float.
    """
    noise = noise or NoiseModel.chi_squared()
    if xi is not None:
        factors = np.broadcast_to(np.asarray(xi, dtype=np.float64) ** 2, bundle.vbar.shape)
    else:
        factors = noise.sample(noise_generator(seed), bundle.n)
    rows = np.maximum(bundle.vbar * factors, np.finfo(np.float64).tiny)
    return ObservationSet(rows, bundle.meta.delta, DevelopmentPoint.of(c))
