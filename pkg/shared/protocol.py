"""Versioned JSON graph documents and DOT rendering.

Document layout (``schema_version`` "1")::

    {
      "schema_version": "1",
      "variables": ["X1", "X2", ...],
      "tau_max": 2,
      "nodes": [{"name": "X1", "lag": 0}, ..., {"name": "C"}],
      "edges": [{"source": {...}, "target": {...}, "mark": "directed", "lag": 1}],
      "orientation_report": {...} | null,
      "test_log": [{...}, ...] | null
    }

Directed edges are written tail first.  Undirected edges use the canonical
endpoint order.  Keys are sorted and the text ends with a newline, so the
same graph always serializes to the same bytes.
"""

import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Union

from shared.constants import (
    MARK_DIRECTED,
    MARK_UNDIRECTED,
    SCHEMA_VERSION,
    SURROGATE_NAME,
)
from shared.errors import InvalidGraph, ParseError, VersionError
from shared.graph import SURROGATE, NodeId, SummaryGraph, WindowGraph


@dataclass
class GraphDocument:
    """A window graph together with its variable names and optional audit data."""

    graph: WindowGraph
    variables: List[str]
    orientation_report: Optional[Dict[str, Any]] = None
    test_log: Optional[List[Dict[str, Any]]] = None
    schema_version: str = field(default=SCHEMA_VERSION)

    def __post_init__(self) -> None:
        if len(self.variables) != self.graph.n_vars:
            raise InvalidGraph(
                f"{len(self.variables)} variable names for a graph over {self.graph.n_vars} variables"
            )


# ----------------------------------------------------------------------
# Encoding
# ----------------------------------------------------------------------


def _encode_node(node: NodeId, names: Sequence[str]) -> Dict[str, Any]:
    if node.is_surrogate:
        return {"name": SURROGATE_NAME}
    return {"name": names[node.var], "lag": node.lag}


def document_to_dict(doc: GraphDocument) -> Dict[str, Any]:
    names = list(doc.variables)
    edges = []
    for e in doc.graph.edges():
        source, target = (e.tail, e.head) if e.is_directed else (e.u, e.v)
        lag = 0 if (source.is_surrogate or target.is_surrogate) else abs(source.lag - target.lag)
        edges.append(
            {
                "source": _encode_node(source, names),
                "target": _encode_node(target, names),
                "mark": e.mark,
                "lag": lag,
            }
        )
    return {
        "schema_version": doc.schema_version,
        "variables": names,
        "tau_max": doc.graph.tau_max,
        "nodes": [_encode_node(n, names) for n in doc.graph.nodes()],
        "edges": edges,
        "orientation_report": doc.orientation_report,
        "test_log": doc.test_log,
    }


def export_json(doc: GraphDocument) -> str:
    """Serialize a graph document to deterministic JSON text."""
    return json.dumps(document_to_dict(doc), indent=2, sort_keys=True) + "\n"


# ----------------------------------------------------------------------
# Decoding
# ----------------------------------------------------------------------


def _decode_node(raw: Any, index: Dict[str, int]) -> NodeId:
    if not isinstance(raw, dict) or "name" not in raw:
        raise ParseError(f"malformed node entry {raw!r}")
    name = raw["name"]
    if name == SURROGATE_NAME and "lag" not in raw:
        return SURROGATE
    if name not in index:
        raise ParseError(f"unknown variable {name!r}")
    lag = raw.get("lag")
    if not isinstance(lag, int) or isinstance(lag, bool):
        raise ParseError(f"node {name!r} has no integer lag")
    try:
        return NodeId(index[name], lag)
    except InvalidGraph as exc:
        raise ParseError(str(exc)) from exc


def document_from_dict(data: Any) -> GraphDocument:
    if not isinstance(data, dict):
        raise ParseError("graph document must be a JSON object")
    version = data.get("schema_version")
    if version is None:
        raise ParseError("graph document has no schema_version")
    if str(version) != SCHEMA_VERSION:
        raise VersionError(f"unsupported schema version {version!r} (expected {SCHEMA_VERSION!r})")

    variables = data.get("variables")
    tau_max = data.get("tau_max")
    edges = data.get("edges")
    if not isinstance(variables, list) or not all(isinstance(v, str) for v in variables):
        raise ParseError("'variables' must be a list of names")
    if not isinstance(tau_max, int) or isinstance(tau_max, bool):
        raise ParseError("'tau_max' must be an integer")
    if not isinstance(edges, list):
        raise ParseError("'edges' must be a list")
    if SURROGATE_NAME in variables or len(set(variables)) != len(variables):
        raise ParseError(f"variable names must be unique and differ from {SURROGATE_NAME!r}")

    index = {name: i for i, name in enumerate(variables)}
    try:
        graph = WindowGraph(len(variables), tau_max)
        for raw in edges:
            if not isinstance(raw, dict):
                raise ParseError(f"malformed edge entry {raw!r}")
            source = _decode_node(raw.get("source"), index)
            target = _decode_node(raw.get("target"), index)
            mark = raw.get("mark")
            if mark == MARK_DIRECTED:
                graph.add_edge(source, target, head=target)
            elif mark == MARK_UNDIRECTED:
                graph.add_edge(source, target)
            else:
                raise ParseError(f"unknown edge mark {mark!r}")
    except InvalidGraph as exc:
        raise ParseError(f"graph document violates graph invariants: {exc}") from exc

    report = data.get("orientation_report")
    log = data.get("test_log")
    if report is not None and not isinstance(report, dict):
        raise ParseError("'orientation_report' must be an object or null")
    if log is not None and not isinstance(log, list):
        raise ParseError("'test_log' must be a list or null")
    return GraphDocument(graph, list(variables), report, log, str(version))


def import_json(text: Union[str, bytes]) -> GraphDocument:
    """Parse JSON text produced by :func:`export_json`.

    Raises:
        VersionError: The schema version is not supported.
        ParseError: The text is not JSON or the document is malformed.
    """
    try:
        data = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return document_from_dict(data)


# ----------------------------------------------------------------------
# DOT
# ----------------------------------------------------------------------


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(
    graph: Union[WindowGraph, SummaryGraph],
    names: Optional[Sequence[str]] = None,
    title: str = "cdans",
) -> str:
    """Render a window or summary graph as a DOT digraph.

    Undirected edges carry ``dir=none``, every edge is labelled with its
    lag(s) and the surrogate is drawn as a filled box.
    """
    lines = [f"digraph {_quote(title)} {{", "  rankdir=LR;", "  node [shape=ellipse];"]
    for node in graph.nodes():
        if node.is_surrogate:
            lines.append(f"  {_quote(node.label(names))} [shape=box, style=filled, fillcolor=lightgrey];")
        else:
            lines.append(f"  {_quote(node.label(names))};")

    if isinstance(graph, SummaryGraph):
        for e in graph.edges():
            lag_label = ",".join(str(lag) for lag in sorted(e.lags))
            attrs = f'label="{lag_label}"' + ("" if e.directed else ", dir=none")
            lines.append(f"  {_quote(e.source.label(names))} -> {_quote(e.target.label(names))} [{attrs}];")
    else:
        for e in graph.edges():
            source, target = (e.tail, e.head) if e.is_directed else (e.u, e.v)
            lag = 0 if (source.is_surrogate or target.is_surrogate) else abs(source.lag - target.lag)
            attrs = f'label="{lag}"' + ("" if e.is_directed else ", dir=none")
            lines.append(f"  {_quote(source.label(names))} -> {_quote(target.label(names))} [{attrs}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
