"""Window and summary causal graphs.

A window graph lives on the nodes (variable, lag) for lags 0..tau_max plus a
single surrogate node C standing in for the time index.  Every edge touches
a lag-0 node, lagged edges point forward in time and nothing points into C.
The summary graph collapses lags into per-edge lag annotations.
"""

import logging
from dataclasses import dataclass, field
from functools import total_ordering
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from shared.constants import MARK_DIRECTED, MARK_UNDIRECTED, SURROGATE_NAME
from shared.errors import InvalidGraph

logger = logging.getLogger(__name__)


@total_ordering
@dataclass(frozen=True)
class NodeId:
    """A lagged variable node ``(var, lag)`` or the surrogate (``var is None``)."""

    var: Optional[int]
    lag: int = 0

    def __post_init__(self) -> None:
        if self.var is None:
            if self.lag != 0:
                raise InvalidGraph("the surrogate node has no lag")
        elif self.var < 0 or self.lag < 0:
            raise InvalidGraph(f"invalid node ({self.var}, {self.lag})")

    @property
    def is_surrogate(self) -> bool:
        return self.var is None

    @property
    def is_contemporaneous(self) -> bool:
        """True for lag-0 variable nodes (the surrogate is not a variable)."""
        return self.var is not None and self.lag == 0

    @property
    def sort_key(self) -> Tuple[int, int, int]:
        if self.var is None:
            return (1, 0, 0)
        return (0, self.var, self.lag)

    def __lt__(self, other: "NodeId") -> bool:
        if not isinstance(other, NodeId):
            return NotImplemented
        return self.sort_key < other.sort_key

    def shifted(self, tau: int) -> "NodeId":
        """Return the same variable ``tau`` steps further in the past."""
        if self.var is None:
            raise InvalidGraph("the surrogate node cannot be shifted in time")
        return NodeId(self.var, self.lag + tau)

    def label(self, names: Optional[Sequence[str]] = None) -> str:
        if self.var is None:
            return SURROGATE_NAME
        name = names[self.var] if names is not None else f"X{self.var + 1}"
        return name if self.lag == 0 else f"{name}@t-{self.lag}"

    def __repr__(self) -> str:
        if self.var is None:
            return "NodeId(C)"
        return f"NodeId({self.var}, lag={self.lag})"


SURROGATE = NodeId(None, 0)


def edge_key(a: NodeId, b: NodeId) -> Tuple[NodeId, NodeId]:
    """Canonical unordered-pair key."""
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class EdgeState:
    """Mark of a present edge; ``head`` is None for an undirected edge."""

    u: NodeId
    v: NodeId
    head: Optional[NodeId] = None

    @property
    def key(self) -> Tuple[NodeId, NodeId]:
        return (self.u, self.v)

    @property
    def is_directed(self) -> bool:
        return self.head is not None

    @property
    def mark(self) -> str:
        return MARK_DIRECTED if self.head is not None else MARK_UNDIRECTED

    @property
    def tail(self) -> Optional[NodeId]:
        if self.head is None:
            return None
        return self.u if self.head == self.v else self.v

    def other(self, node: NodeId) -> NodeId:
        return self.v if node == self.u else self.u


class WindowGraph:
    """Mixed graph over (variable, lag) nodes and the surrogate C."""

    def __init__(self, n_vars: int, tau_max: int) -> None:
        if n_vars < 2:
            raise InvalidGraph(f"n_vars must be >= 2, got {n_vars}")
        if tau_max < 1:
            raise InvalidGraph(f"tau_max must be >= 1, got {tau_max}")
        self.n_vars: int = n_vars
        self.tau_max: int = tau_max
        self._edges: Dict[Tuple[NodeId, NodeId], EdgeState] = {}

    # ------------------------------------------------------------------
    # Node space
    # ------------------------------------------------------------------

    def nodes(self) -> List[NodeId]:
        """All nodes in canonical order, the surrogate last."""
        out = [NodeId(v, lag) for v in range(self.n_vars) for lag in range(self.tau_max + 1)]
        out.append(SURROGATE)
        return out

    def lag0_nodes(self) -> List[NodeId]:
        return [NodeId(v, 0) for v in range(self.n_vars)]

    def same_space(self, other: "WindowGraph") -> bool:
        return self.n_vars == other.n_vars and self.tau_max == other.tau_max

    def _check_node(self, node: NodeId) -> None:
        if node.is_surrogate:
            return
        if node.var >= self.n_vars or node.lag > self.tau_max:
            raise InvalidGraph(
                f"{node!r} is outside the node space (n_vars={self.n_vars}, tau_max={self.tau_max})"
            )

    def _check_pair(self, a: NodeId, b: NodeId) -> None:
        self._check_node(a)
        self._check_node(b)
        if a == b:
            raise InvalidGraph(f"self-loop on {a!r}")
        if a.is_surrogate or b.is_surrogate:
            other = b if a.is_surrogate else a
            if not other.is_contemporaneous:
                raise InvalidGraph(f"the surrogate may only touch lag-0 nodes, not {other!r}")
            return
        if a.lag > 0 and b.lag > 0:
            raise InvalidGraph(f"edge between two lagged nodes {a!r}, {b!r}")

    @staticmethod
    def _check_direction(tail: NodeId, head: NodeId) -> None:
        if head.is_surrogate:
            raise InvalidGraph(f"edge {tail!r} -> C points into the surrogate")
        if not tail.is_surrogate and tail.lag < head.lag:
            raise InvalidGraph(f"edge {tail!r} -> {head!r} points backward in time")

    # ------------------------------------------------------------------
    # Mutation
    # ------------------------------------------------------------------

    def add_edge(self, a: NodeId, b: NodeId, head: Optional[NodeId] = None) -> None:
        """Add (or overwrite) the edge a-b, directed towards ``head`` if given."""
        self._check_pair(a, b)
        if head is not None:
            if head not in (a, b):
                raise InvalidGraph(f"{head!r} is not an endpoint of {a!r}-{b!r}")
            self._check_direction(a if head == b else b, head)
        u, v = edge_key(a, b)
        self._edges[(u, v)] = EdgeState(u, v, head)

    def remove_edge(self, a: NodeId, b: NodeId) -> None:
        key = edge_key(a, b)
        if key not in self._edges:
            raise InvalidGraph(f"no edge between {a!r} and {b!r}")
        del self._edges[key]

    def orient(self, tail: NodeId, head: NodeId) -> None:
        """Direct an existing edge as tail -> head."""
        key = edge_key(tail, head)
        if key not in self._edges:
            raise InvalidGraph(f"no edge between {tail!r} and {head!r}")
        self._check_direction(tail, head)
        self._edges[key] = EdgeState(key[0], key[1], head)

    def unorient(self, a: NodeId, b: NodeId) -> None:
        key = edge_key(a, b)
        if key not in self._edges:
            raise InvalidGraph(f"no edge between {a!r} and {b!r}")
        self._edges[key] = EdgeState(key[0], key[1], None)

    # ------------------------------------------------------------------
    # Queries
    # ------------------------------------------------------------------

    def edge(self, a: NodeId, b: NodeId) -> Optional[EdgeState]:
        return self._edges.get(edge_key(a, b))

    def adjacent(self, a: NodeId, b: NodeId) -> bool:
        return edge_key(a, b) in self._edges

    def edges(self) -> List[EdgeState]:
        """All present edges in canonical order."""
        return [self._edges[k] for k in sorted(self._edges, key=lambda k: (k[0].sort_key, k[1].sort_key))]

    def edge_count(self) -> int:
        return len(self._edges)

    def neighbors(self, node: NodeId) -> List[NodeId]:
        out = [e.other(node) for e in self._edges.values() if node in (e.u, e.v)]
        return sorted(out)

    def lag0_neighbors(self, node: NodeId) -> List[NodeId]:
        return [n for n in self.neighbors(node) if n.is_contemporaneous]

    def lagged_edges(self) -> List[EdgeState]:
        return [e for e in self.edges() if not e.u.is_surrogate and not e.v.is_surrogate and e.u.lag != e.v.lag]

    def contemporaneous_edges(self) -> List[EdgeState]:
        return [e for e in self.edges() if e.u.is_contemporaneous and e.v.is_contemporaneous]

    def surrogate_edges(self) -> List[EdgeState]:
        return [e for e in self.edges() if e.v.is_surrogate]

    @property
    def changing_modules(self) -> List[int]:
        """Variables whose lag-0 node is adjacent to the surrogate."""
        return sorted(e.u.var for e in self.surrogate_edges())

    # ------------------------------------------------------------------
    # Whole-graph helpers
    # ------------------------------------------------------------------

    def validate(self) -> None:
        """Re-check every invariant; raise InvalidGraph on the first violation."""
        for (u, v), state in self._edges.items():
            if (u, v) != edge_key(u, v) or state.key != (u, v):
                raise InvalidGraph(f"edge {u!r}-{v!r} is not stored under its canonical key")
            self._check_pair(u, v)
            if state.head is not None:
                if state.head not in (u, v):
                    raise InvalidGraph(f"head {state.head!r} is not an endpoint")
                self._check_direction(state.tail, state.head)

    def copy(self) -> "WindowGraph":
        clone = WindowGraph(self.n_vars, self.tau_max)
        clone._edges = dict(self._edges)
        return clone

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WindowGraph):
            return NotImplemented
        return self.same_space(other) and self._edges == other._edges

    def __repr__(self) -> str:
        return f"WindowGraph(n_vars={self.n_vars}, tau_max={self.tau_max}, edges={len(self._edges)})"


# ----------------------------------------------------------------------
# Summary graph
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class SummaryEdge:
    """Lag-collapsed edge; ``source``/``target`` are lag-0 nodes or C."""

    source: NodeId
    target: NodeId
    directed: bool
    lags: FrozenSet[int] = field(default_factory=frozenset)

    @property
    def mark(self) -> str:
        return MARK_DIRECTED if self.directed else MARK_UNDIRECTED


class SummaryGraph:
    """Variables plus C with edges annotated by the lags they occur at."""

    def __init__(self, n_vars: int, tau_max: int, edges: Iterable[SummaryEdge] = ()) -> None:
        self.n_vars = n_vars
        self.tau_max = tau_max
        self._edges: Dict[Tuple[NodeId, NodeId, bool], SummaryEdge] = {}
        for e in edges:
            self._add(e)

    def _add(self, e: SummaryEdge) -> None:
        if not e.lags or any(lag < 0 or lag > self.tau_max for lag in e.lags):
            raise InvalidGraph(f"bad lag annotation {sorted(e.lags)} on {e!r}")
        if e.source == e.target and (0 in e.lags):
            raise InvalidGraph(f"self edge on {e.source!r} must be lagged")
        self._edges[(e.source, e.target, e.directed)] = e

    def nodes(self) -> List[NodeId]:
        return [NodeId(v, 0) for v in range(self.n_vars)] + [SURROGATE]

    def edges(self) -> List[SummaryEdge]:
        return [
            self._edges[k]
            for k in sorted(self._edges, key=lambda k: (k[0].sort_key, k[1].sort_key, not k[2]))
        ]

    def edge(self, source: NodeId, target: NodeId, directed: bool = True) -> Optional[SummaryEdge]:
        return self._edges.get((source, target, directed))

    def lag_count(self) -> int:
        return sum(len(e.lags) for e in self._edges.values())

    def __len__(self) -> int:
        return len(self._edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SummaryGraph):
            return NotImplemented
        return (self.n_vars, self.tau_max, self._edges) == (other.n_vars, other.tau_max, other._edges)


def summary_from_window(g: WindowGraph) -> SummaryGraph:
    """Collapse a window graph into its summary graph.

    A window edge between ``X^i`` at lag tau and ``X^j`` at lag 0 adds tau
    to the summary edge i -> j.  Contemporaneous and surrogate edges land at
    lag 0.  Marks are preserved; undirected contemporaneous edges use the
    canonical endpoint order.
    """
    lags: Dict[Tuple[NodeId, NodeId, bool], set] = {}
    for e in g.edges():
        if e.is_directed:
            tail, head = e.tail, e.head
            key = (_summary_node(tail), _summary_node(head), True)
            lag = 0 if tail.is_surrogate else tail.lag - head.lag
        elif e.u.lag != e.v.lag and not e.v.is_surrogate:
            older, newer = (e.u, e.v) if e.u.lag > e.v.lag else (e.v, e.u)
            key = (_summary_node(older), _summary_node(newer), False)
            lag = older.lag - newer.lag
        else:
            key = (_summary_node(e.u), _summary_node(e.v), False)
            lag = 0
        lags.setdefault(key, set()).add(lag)
    edges = [SummaryEdge(s, t, d, frozenset(ls)) for (s, t, d), ls in lags.items()]
    return SummaryGraph(g.n_vars, g.tau_max, edges)


def _summary_node(node: NodeId) -> NodeId:
    return node if node.is_surrogate else NodeId(node.var, 0)
