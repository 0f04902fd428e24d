"""Partial graph construction and PC-stable pruning to the skeleton."""

import itertools
import logging
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from discovery.citest.tester import CITester, CITestResult
from discovery.config import DiscoveryConfig
from discovery.lagged import LaggedParentSet
from discovery.utils.workers import ordered_map
from shared.dataset import TimeSeriesDataset
from shared.errors import InternalInvariantViolation
from shared.graph import SURROGATE, EdgeState, NodeId, WindowGraph, edge_key

logger = logging.getLogger(__name__)


class SepsetStore:
    """Separating sets of removed edges, keyed by unordered node pair.

    The first set recorded for a pair wins.
    """

    def __init__(self) -> None:
        self._sets: Dict[Tuple[NodeId, NodeId], Tuple[NodeId, ...]] = {}

    def record(self, a: NodeId, b: NodeId, cond: Iterable[NodeId]) -> None:
        key = edge_key(a, b)
        if key not in self._sets:
            self._sets[key] = tuple(sorted(cond))

    def get(self, a: NodeId, b: NodeId) -> Optional[Tuple[NodeId, ...]]:
        return self._sets.get(edge_key(a, b))

    def require(self, a: NodeId, b: NodeId) -> Tuple[NodeId, ...]:
        """Like :meth:`get` but a missing entry is a bookkeeping bug."""
        key = edge_key(a, b)
        if key not in self._sets:
            raise InternalInvariantViolation(f"no separating set recorded for {a!r} - {b!r}")
        return self._sets[key]

    def __contains__(self, pair: Tuple[NodeId, NodeId]) -> bool:
        return edge_key(*pair) in self._sets

    def __len__(self) -> int:
        return len(self._sets)

    def pairs(self) -> List[Tuple[NodeId, NodeId]]:
        return sorted(self._sets, key=lambda k: (k[0].sort_key, k[1].sort_key))

    def to_dict(self, names: Sequence[str]) -> Dict[str, List[str]]:
        return {
            f"{a.label(names)}|{b.label(names)}": [n.label(names) for n in self._sets[(a, b)]]
            for a, b in self.pairs()
        }


def build_partial_graph(lpa: LaggedParentSet, n_vars: int, tau_max: int) -> WindowGraph:
    """Complete undirected graph on lag-0 nodes and C plus the lagged parent edges.

    Each lagged parent is joined to its own child only, directed forward in
    time.
    """
    graph = WindowGraph(n_vars, tau_max)
    lag0 = graph.lag0_nodes()
    for a, b in itertools.combinations(lag0, 2):
        graph.add_edge(a, b)
    for node in lag0:
        graph.add_edge(node, SURROGATE)
    for j in range(n_vars):
        child = NodeId(j, 0)
        for parent in lpa.of(j):
            graph.add_edge(parent, child, head=child)
    logger.info(
        "Partial graph: %d edges (%d lagged)", graph.edge_count(), len(graph.lagged_edges())
    )
    return graph


# ------------------------------------------------------------------
# Pruning
# ------------------------------------------------------------------


def _is_lagged(e: EdgeState) -> bool:
    return not e.v.is_surrogate and e.u.lag != e.v.lag


def _conditioning_pool(
    e: EdgeState, snapshot: WindowGraph, lpa: LaggedParentSet
) -> Tuple[NodeId, NodeId, List[NodeId]]:
    """Return (x, y, pool) for a C-edge or contemporaneous edge."""
    if e.v.is_surrogate:
        x = e.u
        pool = set(lpa.of(x.var)) | set(snapshot.lag0_neighbors(x))
        pool.discard(x)
        return x, SURROGATE, sorted(pool)
    x, y = e.u, e.v
    pool = set(snapshot.lag0_neighbors(x)) | set(snapshot.lag0_neighbors(y))
    pool |= set(lpa.of(x.var)) | set(lpa.of(y.var))
    pool.add(SURROGATE)
    pool -= {x, y}
    return x, y, sorted(pool)


def _search_sepset(
    tester: CITester, x: NodeId, y: NodeId, pool: List[NodeId], level: int, cfg: DiscoveryConfig, alpha: float
) -> Tuple[Optional[Tuple[NodeId, ...]], List[CITestResult]]:
    log: List[CITestResult] = []
    for subset in itertools.combinations(pool, level):
        result = tester.run(x, y, subset, cfg.contemp_test)
        log.append(result)
        if result.independent(alpha):
            return subset, log
    return None, log


def discover_skeleton(
    g: WindowGraph,
    data: TimeSeriesDataset,
    lpa: LaggedParentSet,
    cfg: DiscoveryConfig,
    tester: Optional[CITester] = None,
) -> Tuple[WindowGraph, SepsetStore, List[CITestResult]]:
    """Prune C-edges and contemporaneous edges level by level.

    Lagged edges are never tested. Pools are read from the graph as it was
    at the start of the level and removals are committed when the level
    ends. Every test decides at ``cfg.decision_alpha(alpha_contemp, m)``
    with m the number of C-edges and contemporaneous edges in ``g``.
    """
    graph = g.copy()
    sepsets = SepsetStore()
    log: List[CITestResult] = []
    tester = tester or CITester(data, cfg)
    family = sum(1 for e in g.edges() if not _is_lagged(e))
    alpha = cfg.decision_alpha(cfg.alpha_contemp, family)

    for level in range(cfg.max_condset + 1):
        snapshot = graph.copy()
        tasks = []
        for e in snapshot.edges():
            if _is_lagged(e):
                continue
            x, y, pool = _conditioning_pool(e, snapshot, lpa)
            if len(pool) >= level:
                tasks.append((x, y, pool))
        if not tasks:
            logger.debug("Skeleton search stops before level %d: no pool is large enough", level)
            break

        outcomes = ordered_map(
            lambda task: _search_sepset(tester, task[0], task[1], task[2], level, cfg, alpha),
            tasks,
            cfg.n_workers,
        )
        removed = 0
        for (x, y, _), (sepset, edge_log) in zip(tasks, outcomes):
            log.extend(edge_log)
            if sepset is not None:
                graph.remove_edge(x, y)
                sepsets.record(x, y, sepset)
                removed += 1
        logger.debug("Skeleton level %d: %d edges tested, %d removed", level, len(tasks), removed)

    logger.info(
        "Skeleton: %d edges remain (%d C-edges, %d contemporaneous) after %d tests",
        graph.edge_count(),
        len(graph.surrogate_edges()),
        len(graph.contemporaneous_edges()),
        len(log),
    )
    return graph, sepsets, log
