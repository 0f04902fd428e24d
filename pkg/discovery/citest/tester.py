"""Node-level CI test dispatcher.

Turns a test request over window-graph nodes into aligned sample arrays
and runs the configured test. Rows are aligned so that a node at lag tau
contributes ``values[t - tau]`` for every retained time point t.
"""

import logging
import threading
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from discovery.citest.kci import kci_test
from discovery.citest.parcorr import partial_correlation_test
from discovery.config import DiscoveryConfig
from shared.constants import TEST_KCI, TEST_KINDS, TEST_PARCORR
from shared.dataset import TimeSeriesDataset
from shared.errors import InvalidInput
from shared.graph import NodeId

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CITestResult:
    """Outcome of one conditional independence test."""

    statistic: float
    p_value: float
    x: NodeId
    y: NodeId
    cond: Tuple[NodeId, ...]
    test_kind: str

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_value <= 1.0:
            raise InvalidInput(f"p-value {self.p_value} outside [0, 1]")
        if not np.isfinite(self.statistic):
            raise InvalidInput(f"statistic {self.statistic} is not finite")
        if self.x in self.cond or self.y in self.cond:
            raise InvalidInput("conditioning set must exclude the tested nodes")
        if self.test_kind not in TEST_KINDS:
            raise InvalidInput(f"unknown test kind {self.test_kind!r}")

    def independent(self, alpha: float) -> bool:
        """Independence decision used by every phase: p > alpha."""
        return self.p_value > alpha

    def to_dict(self, names: Optional[Sequence[str]] = None) -> Dict[str, Any]:
        return {
            "x": self.x.label(names),
            "y": self.y.label(names),
            "cond": [n.label(names) for n in self.cond],
            "statistic": float(self.statistic),
            "p_value": float(self.p_value),
            "test": self.test_kind,
        }


def _node_entropy(node: NodeId) -> Tuple[int, int]:
    return (0, 0) if node.is_surrogate else (node.var + 1, node.lag)


class CITester:
    """Runs CI tests between window-graph nodes of one dataset.

    ``history`` keeps every result in the order the tests finished.
    """

    def __init__(self, data: TimeSeriesDataset, config: DiscoveryConfig) -> None:
        self.data = data
        self.config = config
        self._values = data.values
        self._surrogate = data.surrogate()
        steps = config.kci.surrogate_bandwidth_steps
        # Surrogate width expressed in units of the normalized time index.
        self._surrogate_width: Optional[float] = (
            None if steps is None else float(steps) / data.n_samples
        )
        self.history: List[CITestResult] = []
        self._lock = threading.Lock()

    # ------------------------------------------------------------------
    # Sample alignment
    # ------------------------------------------------------------------

    def _first_row(self, nodes: Iterable[NodeId]) -> int:
        lags = [n.lag for n in nodes if not n.is_surrogate]
        return max([self.config.tau_max] + lags)

    def samples(self, node: NodeId, first_row: int) -> np.ndarray:
        """Aligned column for ``node`` over rows t in [first_row, T)."""
        end = self.data.n_samples
        if node.is_surrogate:
            return self._surrogate[first_row:end]
        if node.var >= self.data.n_vars:
            raise InvalidInput(f"{node!r} does not exist in a dataset of {self.data.n_vars} variables")
        return self._values[first_row - node.lag : end - node.lag, node.var]

    def seed_for(self, x: NodeId, y: NodeId, cond: Sequence[NodeId]) -> int:
        """Per-test seed derived from the base seed and the tested nodes."""
        entropy = [int(self.config.seed)]
        for node in (x, y, *cond):
            entropy.extend(_node_entropy(node))
        return int(np.random.SeedSequence(entropy).generate_state(1)[0])

    # ------------------------------------------------------------------
    # Tests
    # ------------------------------------------------------------------

    def run(self, x: NodeId, y: NodeId, cond: Iterable[NodeId], kind: str) -> CITestResult:
        """Test x ⫫ y | cond with the given test kind."""
        cond = tuple(sorted(set(cond)))
        first = self._first_row((x, y, *cond))
        if first >= self.data.n_samples:
            raise InvalidInput(f"lag {first} leaves no samples in a series of length {self.data.n_samples}")

        if kind == TEST_PARCORR:
            outcome = self._run_parcorr(x, y, cond, first)
        elif kind == TEST_KCI:
            outcome = self._run_kci(x, y, cond, first)
        else:
            raise InvalidInput(f"unknown test kind {kind!r}")

        result = CITestResult(float(outcome.statistic), float(outcome.p_value), x, y, cond, kind)
        with self._lock:
            self.history.append(result)
        logger.debug(
            "%s %s _|_ %s | {%s}: stat=%.6g p=%.6g",
            kind,
            x.label(self.data.names),
            y.label(self.data.names),
            ", ".join(n.label(self.data.names) for n in cond),
            result.statistic,
            result.p_value,
        )
        return result

    def _run_parcorr(self, x: NodeId, y: NodeId, cond: Tuple[NodeId, ...], first: int):
        z = None
        if cond:
            z = np.column_stack([self.samples(n, first) for n in cond])
        return partial_correlation_test(self.samples(x, first), self.samples(y, first), z)

    def _run_kci(self, x: NodeId, y: NodeId, cond: Tuple[NodeId, ...], first: int):
        if x.is_surrogate:
            x, y = y, x
        observed = [n for n in cond if not n.is_surrogate]
        z = np.column_stack([self.samples(n, first) for n in observed]) if observed else None
        z_surrogate = self.samples(cond[-1], first) if cond and cond[-1].is_surrogate else None
        return kci_test(
            self.samples(x, first),
            self.samples(y, first),
            z,
            self.config.kci,
            seed=self.seed_for(x, y, cond),
            surrogate_y=y.is_surrogate,
            z_surrogate=z_surrogate,
            surrogate_width=self._surrogate_width,
        )


def format_test_log(results: Sequence[CITestResult], names: Sequence[str]) -> str:
    """Render a test log as TSV text with a header row."""
    lines = ["index\ttest\tx\ty\tcond\tstatistic\tp_value"]
    for i, r in enumerate(results):
        cond = ",".join(n.label(names) for n in r.cond)
        lines.append(
            f"{i}\t{r.test_kind}\t{r.x.label(names)}\t{r.y.label(names)}\t{cond}\t"
            f"{r.statistic!r}\t{r.p_value!r}"
        )
    return "\n".join(lines) + "\n"
