"""Top-level driver composing the four discovery phases."""

import logging
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from discovery.citest.tester import CITester, CITestResult
from discovery.config import DiscoveryConfig
from discovery.lagged import LaggedParentSet, detect_lagged_parents
from discovery.orient import (
    OrientationReport,
    finalize_report,
    orient_by_hsic,
    orient_c_triples,
    orient_changing_modules,
    orient_lagged,
)
from discovery.skeleton import SepsetStore, build_partial_graph, discover_skeleton
from discovery.utils.timing import PhaseTimer
from shared.constants import PHASE_LAGGED, PHASE_ORIENT, PHASE_PARTIAL_GRAPH, PHASE_SKELETON
from shared.dataset import TimeSeriesDataset
from shared.errors import CdansError, PhaseError
from shared.graph import SummaryGraph, WindowGraph, summary_from_window
from shared.protocol import GraphDocument

logger = logging.getLogger(__name__)


@dataclass
class DiscoveryResult:
    """Everything a CDANs run produces."""

    graph: WindowGraph
    summary: SummaryGraph
    lagged_parents: LaggedParentSet
    skeleton: WindowGraph
    sepsets: SepsetStore
    report: OrientationReport
    test_log: List[CITestResult]
    variables: Tuple[str, ...]
    surrogate: np.ndarray
    timings: Dict[str, float] = field(default_factory=dict)
    test_counts: Dict[str, int] = field(default_factory=dict)

    @property
    def changing_modules(self) -> List[str]:
        return [self.variables[i] for i in self.graph.changing_modules]

    def to_document(self, include_log: bool = True) -> GraphDocument:
        """Graph document with the orientation report and, optionally, the test log."""
        names = list(self.variables)
        log = [r.to_dict(names) for r in self.test_log] if include_log else None
        return GraphDocument(self.graph, names, self.report.to_dict(names), log)


class _PhaseRunner:
    """Times phases and wraps their failures in PhaseError.

    A failure carries every test the shared tester finished, including
    those of the failing phase.
    """

    def __init__(self, tester: CITester) -> None:
        self.tester = tester
        self.timer = PhaseTimer()
        self.log: List[CITestResult] = []
        self.counts: Dict[str, int] = {}

    @contextmanager
    def phase(self, name: str) -> Iterator[None]:
        logger.info("Phase %s started", name)
        before = len(self.log)
        try:
            with self.timer.phase(name):
                yield
        except CdansError as exc:
            logger.error("Phase %s failed: %s", name, exc)
            raise PhaseError(name, exc, self.tester.history) from exc
        self.counts[name] = len(self.log) - before
        logger.info(
            "Phase %s finished: %d tests in %.2fs", name, self.counts[name], self.timer.get().get(name, 0.0)
        )


def run_cdans(data: TimeSeriesDataset, cfg: Optional[DiscoveryConfig] = None) -> DiscoveryResult:
    """Run lagged discovery, skeleton search and orientation on ``data``.

    Raises:
        InvalidInput: The config is invalid or the data is unusable.
        PhaseError: A phase failed; carries the phase name and the tests run
            before the failure.
    """
    cfg = cfg or DiscoveryConfig()
    cfg.validate()
    data.check_ready(cfg.tau_max)
    tester = CITester(data, cfg)
    runner = _PhaseRunner(tester)
    names = data.names

    with runner.phase(PHASE_LAGGED):
        lpa, lagged_log = detect_lagged_parents(data, cfg, tester)
        runner.log.extend(lagged_log)

    with runner.phase(PHASE_PARTIAL_GRAPH):
        partial = build_partial_graph(lpa, data.n_vars, cfg.tau_max)

    with runner.phase(PHASE_SKELETON):
        skeleton, sepsets, skeleton_log = discover_skeleton(partial, data, lpa, cfg, tester)
        runner.log.extend(skeleton_log)

    surrogate = data.surrogate()
    steps = cfg.kci.surrogate_bandwidth_steps
    c_width = None if steps is None else float(steps) / data.n_samples
    with runner.phase(PHASE_ORIENT):
        report = OrientationReport()
        graph = orient_lagged(skeleton, report)
        graph = orient_changing_modules(graph, report)
        graph, report = orient_c_triples(graph, sepsets, report)
        graph, report = orient_by_hsic(
            graph, data, surrogate, cfg.kci, c_width=c_width, n_workers=cfg.n_workers, report=report
        )
        finalize_report(graph, report)
        graph.validate()

    result = DiscoveryResult(
        graph=graph,
        summary=summary_from_window(graph),
        lagged_parents=lpa,
        skeleton=skeleton,
        sepsets=sepsets,
        report=report,
        test_log=list(runner.log),
        variables=names,
        surrogate=surrogate,
        timings=runner.timer.get(),
        test_counts=dict(runner.counts),
    )
    logger.info(
        "CDANs finished: %d edges, changing modules %s, %d tests",
        graph.edge_count(),
        result.changing_modules or "none",
        len(result.test_log),
    )
    return result
