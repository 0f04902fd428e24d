"""Time-series dataset container plus CSV ingestion and writing.

Columns are variables, rows are time points in order.  The container is
immutable once built so it can be shared freely between worker threads.
"""

import logging
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from shared.errors import InvalidInput, ParseError, SchemaError

logger = logging.getLogger(__name__)


class TimeSeriesDataset:
    """N named variables observed at T time points."""

    __slots__ = ("_names", "_values", "metadata")

    def __init__(
        self,
        names: Sequence[str],
        values: Union[np.ndarray, Sequence[Sequence[float]]],
        metadata: str = "",
    ) -> None:
        arr = np.array(values, dtype=float)
        if arr.ndim != 2:
            raise InvalidInput(f"values must be a T x N matrix, got shape {arr.shape}")
        names = tuple(str(n) for n in names)
        if len(names) != arr.shape[1]:
            raise InvalidInput(
                f"{len(names)} names given for {arr.shape[1]} value columns"
            )
        if len(set(names)) != len(names):
            raise InvalidInput(f"variable names must be unique: {names}")
        if not np.all(np.isfinite(arr)):
            row, col = np.argwhere(~np.isfinite(arr))[0]
            raise InvalidInput(f"non-finite value at row {row}, variable {names[col]!r}")
        arr.setflags(write=False)
        self._names: Tuple[str, ...] = names
        self._values: np.ndarray = arr
        self.metadata: str = metadata

    # ------------------------------------------------------------------
    # Properties
    # ------------------------------------------------------------------

    @property
    def names(self) -> Tuple[str, ...]:
        return self._names

    @property
    def values(self) -> np.ndarray:
        """Read-only T x N matrix."""
        return self._values

    @property
    def n_samples(self) -> int:
        return self._values.shape[0]

    @property
    def n_vars(self) -> int:
        return self._values.shape[1]

    def column(self, index: int) -> np.ndarray:
        return self._values[:, index]

    def surrogate(self) -> np.ndarray:
        """Return the time proxy C as the normalized index t/T."""
        return np.arange(self.n_samples, dtype=float) / self.n_samples

    # ------------------------------------------------------------------
    # Derived datasets
    # ------------------------------------------------------------------

    def permuted(self, order: Sequence[int]) -> "TimeSeriesDataset":
        """Return a copy with columns reordered as ``order``."""
        order = list(order)
        if sorted(order) != list(range(self.n_vars)):
            raise InvalidInput(f"{order} is not a permutation of {self.n_vars} columns")
        return TimeSeriesDataset(
            [self._names[i] for i in order], self._values[:, order], self.metadata
        )

    # ------------------------------------------------------------------
    # Validation
    # ------------------------------------------------------------------

    def check_ready(self, tau_max: int) -> None:
        """Check the invariants a discovery run needs for lags up to tau_max."""
        if self.n_samples == 0 or self.n_vars == 0:
            raise InvalidInput("dataset is empty")
        if self.n_vars < 2:
            raise InvalidInput("at least two variables are required")
        required = 3 * (tau_max + 1)
        if self.n_samples < required:
            raise InvalidInput(
                f"T = {self.n_samples} is too short for tau_max = {tau_max} "
                f"(need at least {required})"
            )
        variances = self._values.var(axis=0)
        constant = [n for n, v in zip(self._names, variances) if v <= 0.0]
        if constant:
            raise InvalidInput(f"constant columns have zero variance: {constant}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TimeSeriesDataset):
            return NotImplemented
        return self._names == other._names and np.array_equal(self._values, other._values)

    def __repr__(self) -> str:
        return f"TimeSeriesDataset(N={self.n_vars}, T={self.n_samples}, names={list(self._names)})"


# ----------------------------------------------------------------------
# CSV
# ----------------------------------------------------------------------


def load_csv(path: Union[str, Path], metadata: Optional[str] = None) -> TimeSeriesDataset:
    """Read a header + numeric-rows CSV into a dataset.

    Raises:
        ParseError: A cell is missing, non-numeric or non-finite, or the
            file cannot be tokenized.
        SchemaError: The header is empty or contains duplicate names.
    """
    path = Path(path)
    try:
        raw = pd.read_csv(
            path,
            header=None,
            dtype=str,
            keep_default_na=False,
            na_filter=False,
            skip_blank_lines=True,
        )
    except pd.errors.EmptyDataError as exc:
        raise SchemaError(f"{path}: file has no header") from exc
    except pd.errors.ParserError as exc:
        raise ParseError(f"{path}: {exc}") from exc

    header = [h.strip() for h in raw.iloc[0].tolist()]
    if any(not h for h in header):
        raise SchemaError(f"{path}: header contains an empty name")
    duplicates = sorted({h for h in header if header.count(h) > 1})
    if duplicates:
        raise SchemaError(f"{path}: duplicate header names {duplicates}")

    body = raw.iloc[1:].reset_index(drop=True)
    body.columns = header
    values = np.empty(body.shape, dtype=float)
    for col_index, name in enumerate(header):
        converted = pd.to_numeric(body[name].str.strip(), errors="coerce").to_numpy(dtype=float)
        bad = np.flatnonzero(~np.isfinite(converted))
        if bad.size:
            row = int(bad[0]) + 1
            raise ParseError(
                f"{path}: invalid numeric cell {body[name].iloc[bad[0]]!r}",
                row=row,
                column=name,
            )
        values[:, col_index] = converted

    logger.debug("Loaded %s: %d rows x %d columns", path, values.shape[0], values.shape[1])
    return TimeSeriesDataset(header, values, metadata if metadata is not None else str(path))


def dataset_to_csv(dataset: TimeSeriesDataset) -> str:
    """Render a dataset as CSV text with shortest round-trip float formatting."""
    frame = pd.DataFrame(np.asarray(dataset.values), columns=list(dataset.names))
    text = frame.to_csv(index=False, lineterminator="\n")
    return text


def write_csv(dataset: TimeSeriesDataset, path: Union[str, Path]) -> Path:
    """Write ``dataset`` to ``path`` and return the path."""
    path = Path(path)
    path.write_text(dataset_to_csv(dataset), encoding="utf-8", newline="")
    return path


def make_names(count: int, prefix: str = "X") -> List[str]:
    """Return the default variable names X1..XN."""
    return [f"{prefix}{i + 1}" for i in range(count)]
