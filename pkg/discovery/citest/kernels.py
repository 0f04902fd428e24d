"""RBF Gram matrices, centering and the median bandwidth heuristic."""

from typing import Optional

import numpy as np
from scipy.spatial.distance import pdist, squareform

from shared.constants import MEDIAN_SUBSAMPLE_ROWS
from shared.errors import DegenerateInput, InvalidInput, ShapeError


def as_2d(samples: np.ndarray) -> np.ndarray:
    """Return ``samples`` as an (n, d) float matrix."""
    arr = np.asarray(samples, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ShapeError(f"samples must be 1-D or 2-D, got shape {arr.shape}")
    return arr


def zscore(samples: np.ndarray) -> np.ndarray:
    """Standardize each column; a constant column is degenerate."""
    arr = as_2d(samples)
    std = arr.std(axis=0)
    if np.any(std <= 0.0):
        raise DegenerateInput("cannot standardize a constant column")
    return (arr - arr.mean(axis=0)) / std


def median_bandwidth(samples: np.ndarray) -> float:
    """Median pairwise Euclidean distance over at most 500 evenly spaced rows.

    Falls back to the mean positive distance when duplicates push the median
    to zero.
    """
    arr = as_2d(samples)
    if arr.shape[0] > MEDIAN_SUBSAMPLE_ROWS:
        idx = np.unique(np.linspace(0, arr.shape[0] - 1, MEDIAN_SUBSAMPLE_ROWS).round().astype(int))
        dists = pdist(arr[idx])
        if not np.any(dists > 0):
            dists = pdist(arr)
    else:
        dists = pdist(arr)
    positive = dists[dists > 0]
    if positive.size == 0:
        raise DegenerateInput("all pairwise distances are zero")
    median = float(np.median(dists))
    if median <= 0.0:
        median = float(positive.mean())
    return median


def rbf_gram(samples: np.ndarray, bandwidth: Optional[float] = None) -> np.ndarray:
    """Gaussian Gram matrix exp(-|a - b|^2 / (2 sigma^2)).

    Args:
        samples: (n, d) or (n,) array, n >= 2, finite.
        bandwidth: Kernel width sigma; ``None`` selects the median heuristic.

    Raises:
        DegenerateInput: Every pairwise distance is zero.
    """
    arr = as_2d(samples)
    if arr.shape[0] < 2:
        raise ShapeError(f"need at least two samples, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("samples contain non-finite values")
    sq = squareform(pdist(arr, "sqeuclidean"))
    if not np.any(sq > 0):
        raise DegenerateInput("all pairwise distances are zero")
    sigma = median_bandwidth(arr) if bandwidth is None else float(bandwidth)
    if sigma <= 0:
        raise InvalidInput(f"bandwidth must be positive, got {sigma}")
    return np.exp(-sq / (2.0 * sigma * sigma))


def center_gram(g: np.ndarray) -> np.ndarray:
    """Return H g H with H = I - 11^T / n."""
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ShapeError(f"Gram matrix must be square, got shape {g.shape}")
    return g - g.mean(axis=0, keepdims=True) - g.mean(axis=1, keepdims=True) + g.mean()
