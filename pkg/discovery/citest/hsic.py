"""Kernel dependence between changing causal modules.

``hsic_dependence(x, y, c)`` estimates how strongly the module that
generates x over time (the embedding of P(x | C)) co-varies with the module
that generates y from x (the embedding of P(y | x, C)). Both modules are
represented by kernel-ridge conditional mean embeddings indexed by the
time proxy C. The measure is normalized HSIC between the two module
Gram matrices, so it lies in [0, 1]. For a true edge x -> y the value in
the causal direction is the smaller one.
"""

import logging
from typing import Optional

import numpy as np
from scipy import linalg

from discovery.citest.kernels import as_2d, center_gram, rbf_gram, zscore
from discovery.config import KciParams
from shared.constants import KCI_MIN_SAMPLES
from shared.errors import DegenerateInput, InvalidInput, NumericalError, ShapeError

logger = logging.getLogger(__name__)


def hsic_dependence(
    x: np.ndarray,
    y: np.ndarray,
    c: np.ndarray,
    params: Optional[KciParams] = None,
    *,
    c_width: Optional[float] = None,
) -> float:
    """Normalized dependence between the x-module and the (y | x)-module.

    Args:
        x: Candidate cause samples.
        y: Candidate effect samples.
        c: Time-index proxy aligned with x and y.
        params: Kernel settings; only the ``hsic_*`` fields and the
            bandwidth rule are read.
        c_width: Kernel width on the proxy, None for the bandwidth rule.

    Raises:
        DegenerateInput: A module Gram matrix has zero centered trace.
    """
    params = params or KciParams()
    xs = as_2d(x)
    ys = as_2d(y)
    cs = as_2d(c)
    n = xs.shape[0]
    if ys.shape[0] != n or cs.shape[0] != n:
        raise ShapeError("x, y and c must have the same number of samples")
    if n < KCI_MIN_SAMPLES:
        raise InvalidInput(f"need at least {KCI_MIN_SAMPLES} samples, got {n}")

    if n > params.hsic_max_samples:
        idx = np.unique(np.linspace(0, n - 1, params.hsic_max_samples).round().astype(int))
        xs, ys, cs = xs[idx], ys[idx], cs[idx]
        n = xs.shape[0]

    xs = zscore(xs)
    ys = zscore(ys)
    width = params.fixed_bandwidth
    kc = rbf_gram(cs, c_width if c_width is not None else width)
    kx = rbf_gram(xs, width)
    ky = rbf_gram(ys, width)
    lam = params.hsic_ridge * n * float(np.mean(np.diag(kc)))
    eye = np.eye(n)

    # Module of x: embeddings of P(x | c_i), compared through the x kernel.
    b = _solve_sym(kc + lam * eye, kc).T
    g_x = b @ kx @ b.T

    # Module of y given x: embeddings of P(y | c_i, x_k) for reference points x_k.
    s = _solve_sym(kc * kx + lam * eye, eye)
    p = s @ ky @ s
    refs = _reference_points(xs[:, 0], params.hsic_reference_points)
    g_yx = np.zeros((n, n))
    for r in refs:
        weights = kx[r]
        m = kc @ (p * np.outer(weights, weights)) @ kc
        norms = np.sqrt(np.clip(np.diag(m), 0.0, None))
        if np.any(norms <= 0):
            raise DegenerateInput("conditional embedding vanished at a reference point")
        g_yx += m / np.outer(norms, norms)
    g_yx /= len(refs)

    gx_c = center_gram(g_x)
    gyx_c = center_gram(g_yx)
    tr_x = float(np.trace(gx_c))
    tr_yx = float(np.trace(gyx_c))
    tiny = 1e-12 * n
    if tr_x <= tiny or tr_yx <= tiny:
        raise DegenerateInput("module Gram matrix has zero centered trace")
    value = float(np.sum(gx_c * gyx_c)) / (tr_x * tr_yx)
    logger.debug("hsic dependence %.6g over %d samples", value, n)
    return max(value, 0.0)


def _reference_points(values: np.ndarray, count: int) -> np.ndarray:
    """Row indices at evenly spaced empirical quantiles of ``values``."""
    order = np.argsort(values, kind="stable")
    picks = np.linspace(0, values.shape[0] - 1, min(count, values.shape[0])).round().astype(int)
    return np.unique(order[picks])


def _solve_sym(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    try:
        out = linalg.solve(a, b, assume_a="sym")
    except (linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"kernel ridge solve failed: {exc}") from exc
    if not np.all(np.isfinite(out)):
        raise NumericalError("kernel ridge solve produced non-finite values")
    return out
