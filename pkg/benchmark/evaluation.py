"""Edge-level comparison of an estimated window graph against ground truth.

Every node pair is in one of four states: absent, directed one way,
directed the other way, or undirected. A pair contributes to the counts as
follows:

    truth      estimate     label         TP FP FN  SHD
    a->b       a->b         TP             1  0  0   0
    absent     present      spurious       0  1  0   1
    present    absent       missing        0  0  1   1
    a->b       b->a         reversed       0  1  1   1
    a->b       a-b          unoriented     0  0  1   1
    a-b        a->b         misoriented    0  1  1   1
"""

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from shared.constants import (
    EDGE_MISORIENTED,
    EDGE_MISSING,
    EDGE_REVERSED,
    EDGE_SPURIOUS,
    EDGE_TP,
    EDGE_UNORIENTED,
    EVAL_MODE_CONTEMPORANEOUS,
    EVAL_MODE_WINDOW,
    EVAL_MODES,
)
from shared.errors import InvalidInput, UndefinedMetric
from shared.graph import EdgeState, NodeId, WindowGraph

logger = logging.getLogger(__name__)

TSV_FIELDS = ("tp", "fp", "fn", "tpr", "fdr", "shd")

# Pair state: None (absent), "-" (undirected) or the head node.
PairState = Optional[object]
_UNDIRECTED = "-"


@dataclass(frozen=True)
class EdgeClassification:
    u: NodeId
    v: NodeId
    label: str
    truth_mark: str
    est_mark: str


@dataclass
class EvalReport:
    """Counts and per-pair labels of one comparison."""

    tp: int = 0
    fp: int = 0
    fn: int = 0
    shd: int = 0
    edges: List[EdgeClassification] = field(default_factory=list)
    mode: str = EVAL_MODE_WINDOW
    include_surrogate: bool = True

    @property
    def tpr(self) -> Optional[float]:
        """TP / (TP + FN), or None when undefined."""
        return None if self.tp + self.fn == 0 else self.tp / (self.tp + self.fn)

    @property
    def fdr(self) -> Optional[float]:
        """FP / (FP + TP), or None when undefined."""
        return None if self.fp + self.tp == 0 else self.fp / (self.fp + self.tp)

    def to_dict(self) -> Dict[str, Any]:
        """Flat JSON-ready mapping; undefined metrics become null."""
        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "tpr": self.tpr,
            "fdr": self.fdr,
            "shd": self.shd,
            "mode": self.mode,
            "include_surrogate": self.include_surrogate,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_tsv_row(self) -> str:
        return "\t".join(_format_cell(self.to_dict()[f]) for f in TSV_FIELDS)


def tsv_header(extra: Sequence[str] = ()) -> str:
    return "\t".join(list(extra) + list(TSV_FIELDS))


def _format_cell(value: Any) -> str:
    if value is None:
        return "NA"
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


def tpr(report: EvalReport) -> float:
    """Raises UndefinedMetric when TP + FN = 0."""
    if report.tp + report.fn == 0:
        raise UndefinedMetric("TPR is undefined: no true edges")
    return report.tp / (report.tp + report.fn)


def fdr(report: EvalReport) -> float:
    """Raises UndefinedMetric when FP + TP = 0."""
    if report.fp + report.tp == 0:
        raise UndefinedMetric("FDR is undefined: no estimated edges")
    return report.fp / (report.fp + report.tp)


# ------------------------------------------------------------------
# Pair states
# ------------------------------------------------------------------


def _keep(e: EdgeState, mode: str, include_surrogate: bool) -> bool:
    touches_c = e.v.is_surrogate
    if touches_c and not include_surrogate:
        return False
    if mode == EVAL_MODE_CONTEMPORANEOUS:
        return touches_c or (e.u.is_contemporaneous and e.v.is_contemporaneous)
    return True


def _states(g: WindowGraph, mode: str, include_surrogate: bool) -> Dict[Tuple[NodeId, NodeId], PairState]:
    return {
        e.key: (e.head if e.is_directed else _UNDIRECTED)
        for e in g.edges()
        if _keep(e, mode, include_surrogate)
    }


def _mark(state: PairState) -> str:
    if state is None:
        return "none"
    if state == _UNDIRECTED:
        return "undirected"
    return f"->{state!r}"


def _label(truth: PairState, est: PairState) -> str:
    if truth == est:
        return EDGE_TP
    if truth is None:
        return EDGE_SPURIOUS
    if est is None:
        return EDGE_MISSING
    if truth == _UNDIRECTED:
        return EDGE_MISORIENTED
    if est == _UNDIRECTED:
        return EDGE_UNORIENTED
    return EDGE_REVERSED


def _check_spaces(truth: WindowGraph, est: WindowGraph, mode: str) -> None:
    if mode not in EVAL_MODES:
        raise InvalidInput(f"mode must be one of {EVAL_MODES}, got {mode!r}")
    if truth.n_vars != est.n_vars:
        raise InvalidInput(f"graphs cover {truth.n_vars} and {est.n_vars} variables")


def classify_edges(
    truth: WindowGraph,
    est: WindowGraph,
    *,
    include_surrogate: bool = True,
    mode: str = EVAL_MODE_WINDOW,
) -> List[EdgeClassification]:
    """Label every pair present in either graph, in canonical pair order."""
    _check_spaces(truth, est, mode)
    t_states = _states(truth, mode, include_surrogate)
    e_states = _states(est, mode, include_surrogate)
    pairs = sorted(set(t_states) | set(e_states), key=lambda k: (k[0].sort_key, k[1].sort_key))
    out = []
    for u, v in pairs:
        t, e = t_states.get((u, v)), e_states.get((u, v))
        out.append(EdgeClassification(u, v, _label(t, e), _mark(t), _mark(e)))
    return out


def shd(
    truth: WindowGraph,
    est: WindowGraph,
    *,
    include_surrogate: bool = True,
    mode: str = EVAL_MODE_WINDOW,
) -> int:
    """Number of pairs whose states differ (one insertion, deletion or mark fix each)."""
    edges = classify_edges(truth, est, include_surrogate=include_surrogate, mode=mode)
    return sum(1 for e in edges if e.label != EDGE_TP)


def evaluate(
    truth: WindowGraph,
    est: WindowGraph,
    *,
    include_surrogate: bool = True,
    mode: str = EVAL_MODE_WINDOW,
) -> EvalReport:
    edges = classify_edges(truth, est, include_surrogate=include_surrogate, mode=mode)
    report = EvalReport(edges=edges, mode=mode, include_surrogate=include_surrogate)
    for e in edges:
        if e.label == EDGE_TP:
            report.tp += 1
            continue
        report.shd += 1
        if e.label in (EDGE_SPURIOUS, EDGE_REVERSED, EDGE_MISORIENTED):
            report.fp += 1
        if e.label in (EDGE_MISSING, EDGE_REVERSED, EDGE_UNORIENTED, EDGE_MISORIENTED):
            report.fn += 1
    logger.debug("Evaluation: tp=%d fp=%d fn=%d shd=%d", report.tp, report.fp, report.fn, report.shd)
    return report


def aggregate_reports(reports: Iterable[EvalReport]) -> Dict[str, Any]:
    """Mean TPR/FDR/SHD over several runs; undefined metrics are skipped."""
    reports = list(reports)
    if not reports:
        raise UndefinedMetric("no reports to aggregate")

    def mean(values: List[float]) -> Optional[float]:
        return math.fsum(values) / len(values) if values else None

    return {
        "runs": len(reports),
        "tp": sum(r.tp for r in reports),
        "fp": sum(r.fp for r in reports),
        "fn": sum(r.fn for r in reports),
        "tpr": mean([r.tpr for r in reports if r.tpr is not None]),
        "fdr": mean([r.fdr for r in reports if r.fdr is not None]),
        "shd": mean([float(r.shd) for r in reports]),
    }


def format_aggregate_row(aggregate: Dict[str, Any], prefix: Sequence[Any] = ()) -> str:
    cells = [str(p) for p in prefix] + [_format_cell(aggregate[f]) for f in TSV_FIELDS]
    return "\t".join(cells)
