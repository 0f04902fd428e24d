"""Edge orientation for the pruned window graph.

Rules, applied in pipeline order:

1. Lagged edges point forward in time.
2. Edges between C and a changing module point away from C.
3. For C - X_i - X_j with X_j not adjacent to C, the separating set of
   (C, X_j) decides between the collider C -> X_i <- X_j and the chain
   C -> X_i -> X_j.
4. A contemporaneous edge whose endpoints are both changing modules points
   in the direction with the smaller module dependence.

Each function returns a new graph. Existing marks are never reversed and
no rule adds or removes edges.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from discovery.citest.hsic import hsic_dependence
from discovery.config import KciParams
from discovery.skeleton import SepsetStore
from discovery.utils.workers import ordered_map
from shared.constants import (
    HSIC_TIE_TOLERANCE,
    RULE_HSIC_DIRECTION,
    RULE_SURROGATE_OUT,
    RULE_TIME_ORDER,
    RULE_TRIPLE_CHAIN,
    RULE_TRIPLE_COLLIDER,
    RULE_UNORIENTED,
)
from shared.dataset import TimeSeriesDataset
from shared.errors import DegenerateInput
from shared.graph import SURROGATE, NodeId, WindowGraph, edge_key

logger = logging.getLogger(__name__)

NOTE_CONFLICT = "conflict"
NOTE_TIE = "tie"
NOTE_DEGENERATE = "degenerate"


@dataclass(frozen=True)
class OrientationRecord:
    """Rule applied to one edge. ``source``/``target`` are tail/head when directed."""

    source: NodeId
    target: NodeId
    rule: str
    forward: Optional[float] = None
    backward: Optional[float] = None


@dataclass(frozen=True)
class OrientationNote:
    u: NodeId
    v: NodeId
    kind: str
    detail: str


class OrientationReport:
    """Audit trail of orientation decisions, keyed by edge."""

    def __init__(self) -> None:
        self._records: Dict[Tuple[NodeId, NodeId], OrientationRecord] = {}
        self.notes: List[OrientationNote] = []
        self.cycles: List[List[NodeId]] = []

    def record(
        self,
        source: NodeId,
        target: NodeId,
        rule: str,
        forward: Optional[float] = None,
        backward: Optional[float] = None,
    ) -> None:
        self._records[edge_key(source, target)] = OrientationRecord(source, target, rule, forward, backward)

    def note(self, u: NodeId, v: NodeId, kind: str, detail: str) -> None:
        self.notes.append(OrientationNote(u, v, kind, detail))

    def get(self, a: NodeId, b: NodeId) -> Optional[OrientationRecord]:
        return self._records.get(edge_key(a, b))

    def records(self) -> List[OrientationRecord]:
        return [
            self._records[k]
            for k in sorted(self._records, key=lambda k: (k[0].sort_key, k[1].sort_key))
        ]

    def conflicts(self) -> List[OrientationNote]:
        return [n for n in self.notes if n.kind == NOTE_CONFLICT]

    def rule_counts(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for rec in self._records.values():
            counts[rec.rule] = counts.get(rec.rule, 0) + 1
        return dict(sorted(counts.items()))

    def to_dict(self, names: Optional[Sequence[str]] = None) -> Dict[str, Any]:
        return {
            "edges": [
                {
                    "source": r.source.label(names),
                    "target": r.target.label(names),
                    "rule": r.rule,
                    "forward": r.forward,
                    "backward": r.backward,
                }
                for r in self.records()
            ],
            "notes": [
                {"u": n.u.label(names), "v": n.v.label(names), "kind": n.kind, "detail": n.detail}
                for n in self.notes
            ],
            "cycles": [[node.label(names) for node in cycle] for cycle in self.cycles],
        }


# ------------------------------------------------------------------
# Time order and surrogate edges
# ------------------------------------------------------------------


def orient_lagged(g: WindowGraph, report: Optional[OrientationReport] = None) -> WindowGraph:
    """Direct every lagged edge from the older node to the lag-0 node."""
    out = g.copy()
    for e in out.lagged_edges():
        older, newer = (e.u, e.v) if e.u.lag > e.v.lag else (e.v, e.u)
        out.orient(older, newer)
        if report is not None:
            report.record(older, newer, RULE_TIME_ORDER)
    return out


def orient_changing_modules(g: WindowGraph, report: Optional[OrientationReport] = None) -> WindowGraph:
    """Direct every surviving C-edge away from C."""
    out = g.copy()
    for e in out.surrogate_edges():
        out.orient(SURROGATE, e.u)
        if report is not None:
            report.record(SURROGATE, e.u, RULE_SURROGATE_OUT)
    return out


# ------------------------------------------------------------------
# C-triples
# ------------------------------------------------------------------


def orient_c_triples(
    g: WindowGraph, sepsets: SepsetStore, report: Optional[OrientationReport] = None
) -> Tuple[WindowGraph, OrientationReport]:
    """Apply the collider/chain rule to every triple C - X_i - X_j.

    Qualifying triples have X_i adjacent to C and X_j not. An edge that is
    already directed keeps its mark; a triple contradicting it is logged as
    a conflict.

    Raises:
        InternalInvariantViolation: (C, X_j) has no separating set.
    """
    out = g.copy()
    report = report if report is not None else OrientationReport()
    changing = set(out.changing_modules)

    # One endpoint is adjacent to C and the other is not, so each edge gets
    # at most one proposal.
    proposals: Dict[Tuple[NodeId, NodeId], Tuple[NodeId, NodeId, str]] = {}
    for i in sorted(changing):
        xi = NodeId(i, 0)
        for xj in out.lag0_neighbors(xi):
            if xj.var in changing:
                continue
            sepset = sepsets.require(SURROGATE, xj)
            if xi in sepset:
                proposals[edge_key(xi, xj)] = (xi, xj, RULE_TRIPLE_CHAIN)
            else:
                proposals[edge_key(xi, xj)] = (xj, xi, RULE_TRIPLE_COLLIDER)

    for key in sorted(proposals, key=lambda k: (k[0].sort_key, k[1].sort_key)):
        tail, head, rule = proposals[key]
        state = out.edge(*key)
        if state.is_directed:
            if state.head != head:
                report.note(key[0], key[1], NOTE_CONFLICT, f"{rule} contradicts the existing mark")
                logger.warning("%s on %r - %r contradicts an existing mark; kept", rule, key[0], key[1])
            continue
        out.orient(tail, head)
        report.record(tail, head, rule)
    return out, report


# ------------------------------------------------------------------
# Module dependence
# ------------------------------------------------------------------


def _hsic_pair(
    data: TimeSeriesDataset, c: np.ndarray, u: NodeId, v: NodeId, params: KciParams, c_width: Optional[float]
) -> Tuple[Optional[float], Optional[float], Optional[str]]:
    x, y = data.column(u.var), data.column(v.var)
    try:
        forward = hsic_dependence(x, y, c, params, c_width=c_width)
        backward = hsic_dependence(y, x, c, params, c_width=c_width)
    except DegenerateInput as exc:
        return None, None, str(exc)
    return forward, backward, None


def orient_by_hsic(
    g: WindowGraph,
    data: TimeSeriesDataset,
    c: np.ndarray,
    params: Optional[KciParams] = None,
    *,
    c_width: Optional[float] = None,
    n_workers: int = 1,
    report: Optional[OrientationReport] = None,
) -> Tuple[WindowGraph, OrientationReport]:
    """Orient undirected edges between two changing modules by module dependence.

    The direction with the strictly smaller dependence wins; values within
    1e-9 of each other leave the edge undirected. A degenerate dependence
    estimate also leaves the edge undirected and is logged.
    """
    params = params or KciParams()
    out = g.copy()
    report = report if report is not None else OrientationReport()
    changing = set(out.changing_modules)
    pairs = [
        (e.u, e.v)
        for e in out.contemporaneous_edges()
        if not e.is_directed and e.u.var in changing and e.v.var in changing
    ]

    values = ordered_map(
        lambda pair: _hsic_pair(data, c, pair[0], pair[1], params, c_width), pairs, n_workers
    )
    for (u, v), (forward, backward, error) in zip(pairs, values):
        if error is not None:
            report.note(u, v, NOTE_DEGENERATE, error)
            logger.warning("Module dependence for %r - %r is degenerate: %s", u, v, error)
            continue
        if abs(forward - backward) <= HSIC_TIE_TOLERANCE:
            report.note(u, v, NOTE_TIE, f"forward={forward!r} backward={backward!r}")
            continue
        if forward < backward:
            out.orient(u, v)
            report.record(u, v, RULE_HSIC_DIRECTION, forward, backward)
        else:
            out.orient(v, u)
            report.record(v, u, RULE_HSIC_DIRECTION, backward, forward)
        logger.debug("Module dependence %r - %r: forward=%.6g backward=%.6g", u, v, forward, backward)
    return out, report


# ------------------------------------------------------------------
# Final checks
# ------------------------------------------------------------------


def find_directed_cycles(g: WindowGraph) -> List[List[NodeId]]:
    """Directed cycles among contemporaneous edges, each rotated to start at its smallest node."""
    digraph = nx.DiGraph()
    digraph.add_nodes_from(g.lag0_nodes())
    for e in g.contemporaneous_edges():
        if e.is_directed:
            digraph.add_edge(e.tail, e.head)
    cycles = []
    for cycle in nx.simple_cycles(digraph):
        start = cycle.index(min(cycle))
        cycles.append(cycle[start:] + cycle[:start])
    return sorted(cycles, key=lambda cyc: [n.sort_key for n in cyc])


def finalize_report(g: WindowGraph, report: OrientationReport) -> OrientationReport:
    """Record Unoriented for undirected edges and scan for directed cycles."""
    for e in g.edges():
        if not e.is_directed:
            report.record(e.u, e.v, RULE_UNORIENTED)
    report.cycles = find_directed_cycles(g)
    for cycle in report.cycles:
        logger.warning("Directed contemporaneous cycle: %s", " -> ".join(repr(n) for n in cycle))
    return report
