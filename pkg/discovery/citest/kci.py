"""Kernel conditional independence (KCI) test.

The unconditional statistic is the HSIC trace ``sum(Kx * Ky)`` on centered
Gram matrices. For the conditional case both Grams are residualized on the
conditioning Gram with a ridge-regularized projector and the statistic is
taken on the residualized pair. The null is either a moment-matched gamma
(default) or a permutation/spectral approximation.
"""

import logging
from typing import Optional

import numpy as np
from scipy import linalg, stats

from discovery.citest.kernels import as_2d, center_gram, rbf_gram, zscore
from discovery.citest.parcorr import CIOutcome
from discovery.config import KciParams
from shared.constants import KCI_MIN_SAMPLES, NULL_PERMUTATION
from shared.errors import DegenerateInput, InvalidInput, NumericalError, ShapeError

logger = logging.getLogger(__name__)


def kci_test(
    x: np.ndarray,
    y: np.ndarray,
    z: Optional[np.ndarray] = None,
    params: Optional[KciParams] = None,
    *,
    seed: int = 0,
    surrogate_y: bool = False,
    z_surrogate: Optional[np.ndarray] = None,
    surrogate_width: Optional[float] = None,
) -> CIOutcome:
    """Test x ⫫ y | z with kernel Gram matrices.

    Args:
        x, y: (n,) or (n, d) samples.
        z: Observed conditioning samples, or None.
        params: Kernel settings; defaults when None.
        seed: Seed for the permutation null.
        surrogate_y: ``y`` is the time-index proxy. It is used raw rather
            than standardized and gets ``surrogate_width``.
        z_surrogate: Time-index proxy joining the conditioning set.
        surrogate_width: Kernel width on the proxy, None for the bandwidth rule.

    Raises:
        InvalidInput: Fewer than 20 samples.
        DegenerateInput: A block has zero variance.
        NumericalError: The residualizing solve failed.
    """
    params = params or KciParams()
    xs = as_2d(x)
    ys = as_2d(y)
    n = xs.shape[0]
    if ys.shape[0] != n:
        raise ShapeError(f"x has {n} samples but y has {ys.shape[0]}")
    if n < KCI_MIN_SAMPLES:
        raise InvalidInput(f"KCI needs at least {KCI_MIN_SAMPLES} samples, got {n}")

    zs = None
    if z is not None and as_2d(z).shape[1] > 0:
        zs = as_2d(z)
        if zs.shape[0] != n:
            raise ShapeError(f"z has {zs.shape[0]} samples, expected {n}")
        zs = zscore(zs)

    if surrogate_y:
        ky = rbf_gram(ys, surrogate_width if surrogate_width is not None else params.fixed_bandwidth)
    else:
        ky = rbf_gram(zscore(ys), params.fixed_bandwidth)

    if zs is None and z_surrogate is None:
        kx = rbf_gram(zscore(xs), params.fixed_bandwidth)
        return _unconditional(center_gram(kx), center_gram(ky), params, seed)

    x_block = zscore(xs) if zs is None else np.hstack([zscore(xs), 0.5 * zs])
    kx = rbf_gram(x_block, params.fixed_bandwidth)

    kz = np.ones((n, n)) if zs is None else rbf_gram(zs, params.fixed_bandwidth)
    if z_surrogate is not None:
        width = surrogate_width if surrogate_width is not None else params.fixed_bandwidth
        kz = kz * rbf_gram(as_2d(z_surrogate), width)
    return _conditional(center_gram(kx), center_gram(ky), center_gram(kz), params, seed)


# ------------------------------------------------------------------
# Unconditional
# ------------------------------------------------------------------

def _unconditional(kx: np.ndarray, ky: np.ndarray, params: KciParams, seed: int) -> CIOutcome:
    n = kx.shape[0]
    stat = float(np.sum(kx * ky))

    if params.null_method == NULL_PERMUTATION:
        exceed = 0
        for k in range(params.permutations):
            order = np.random.default_rng([seed, k]).permutation(n)
            if np.sum(kx * ky[np.ix_(order, order)]) >= stat:
                exceed += 1
        return CIOutcome(stat, (1 + exceed) / (1 + params.permutations))

    mean = np.trace(kx) * np.trace(ky) / n
    var = 2.0 * np.sum(kx * kx) * np.sum(ky * ky) / (n * n)
    return CIOutcome(stat, _gamma_pvalue(stat, mean, var))


# ------------------------------------------------------------------
# Conditional
# ------------------------------------------------------------------

def _conditional(
    kx: np.ndarray, ky: np.ndarray, kz: np.ndarray, params: KciParams, seed: int
) -> CIOutcome:
    n = kx.shape[0]
    eps = params.ridge_epsilon * float(np.mean(np.diag(kz)))
    if eps <= 0:
        raise DegenerateInput("conditioning Gram matrix is zero after centering")
    try:
        rz = linalg.solve(kz + eps * np.eye(n), eps * np.eye(n), assume_a="sym")
    except (linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"residualizing solve failed: {exc}") from exc
    rz = 0.5 * (rz + rz.T)
    if not np.all(np.isfinite(rz)):
        raise NumericalError("residualizing solve produced non-finite values")

    kxr = rz @ kx @ rz
    kyr = rz @ ky @ rz
    u = kxr * kyr
    stat = float(np.sum(u))

    if params.null_method == NULL_PERMUTATION:
        # Spectral null: weighted chi-square(1) draws on the eigenvalues of U.
        eig = np.clip(np.linalg.eigvalsh(0.5 * (u + u.T)), 0.0, None)
        eig = eig[eig > eig.max() * 1e-10] if eig.max() > 0 else eig
        rng = np.random.default_rng(seed)
        draws = rng.chisquare(1, size=(eig.size, params.permutations))
        null = eig @ draws
        exceed = int(np.sum(null >= stat))
        return CIOutcome(stat, (1 + exceed) / (1 + params.permutations))

    mean = float(np.trace(u))
    var = 2.0 * float(np.sum(u * u))
    return CIOutcome(stat, _gamma_pvalue(stat, mean, var))


def _gamma_pvalue(stat: float, mean: float, var: float) -> float:
    if mean <= 0 or var <= 0:
        logger.debug("Degenerate gamma moments (mean=%g, var=%g); reporting p=1", mean, var)
        return 1.0
    shape = mean * mean / var
    scale = var / mean
    p_value = float(stats.gamma.sf(stat, shape, scale=scale))
    if not np.isfinite(p_value):
        raise NumericalError(f"gamma null produced p={p_value}")
    return float(np.clip(p_value, 0.0, 1.0))
