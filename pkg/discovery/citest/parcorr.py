"""Linear partial-correlation test."""

from typing import NamedTuple, Optional

import numpy as np
from scipy import stats

from discovery.citest.kernels import as_2d
from shared.errors import DegenerateInput, InvalidInput, ShapeError, SingularConditioning


_RESIDUAL_TOL = 1e-10


class CIOutcome(NamedTuple):
    statistic: float
    p_value: float


def partial_correlation_test(
    x: np.ndarray, y: np.ndarray, z: Optional[np.ndarray] = None
) -> CIOutcome:
    """Correlation of the residuals of x and y after regressing both on z.

    The p-value is two-sided from the Student-t transform with
    ``n - 2 - |z|`` degrees of freedom.

    Raises:
        InvalidInput: Too few samples for the conditioning set.
        SingularConditioning: The design matrix [1, z] is rank deficient.
        DegenerateInput: A residual vector is constant.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    n = x.shape[0]
    if y.shape[0] != n:
        raise ShapeError(f"x has {n} samples but y has {y.shape[0]}")
    k = 0 if z is None else as_2d(z).shape[1]
    if k + 2 >= n:
        raise InvalidInput(f"{n} samples cannot support a conditioning set of size {k}")

    design = np.ones((n, 1))
    if k:
        zz = as_2d(z)
        if zz.shape[0] != n:
            raise ShapeError(f"z has {zz.shape[0]} samples, expected {n}")
        design = np.hstack([design, zz])
    if np.linalg.matrix_rank(design) < design.shape[1]:
        raise SingularConditioning(f"conditioning design of rank < {design.shape[1]}")

    coef, *_ = np.linalg.lstsq(design, np.column_stack([x, y]), rcond=None)
    resid = np.column_stack([x, y]) - design @ coef
    rx, ry = resid[:, 0], resid[:, 1]
    sx, sy = np.sqrt(rx @ rx), np.sqrt(ry @ ry)
    # Residuals at rounding level mean z explains x or y exactly.
    if sx <= _RESIDUAL_TOL * np.sqrt(x @ x) or sy <= _RESIDUAL_TOL * np.sqrt(y @ y):
        raise DegenerateInput("residuals are constant")

    r = float(np.clip(rx @ ry / (sx * sy), -1.0, 1.0))
    dof = n - 2 - k
    with np.errstate(divide="ignore", invalid="ignore"):
        t_stat = r * np.sqrt(dof / (1.0 - r * r)) if abs(r) < 1.0 else np.inf
    p_value = float(np.clip(2.0 * stats.t.sf(abs(t_stat), dof), 0.0, 1.0))
    return CIOutcome(r, p_value)
