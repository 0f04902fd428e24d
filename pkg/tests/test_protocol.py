"""Tests for graph documents (JSON) and DOT rendering."""

import json
import os
import sys
import unittest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from shared.constants import SCHEMA_VERSION
from shared.errors import ParseError, VersionError
from shared.graph import SURROGATE, NodeId, WindowGraph, summary_from_window
from shared.protocol import GraphDocument, document_to_dict, export_dot, export_json, import_json


def _sample_graph() -> WindowGraph:
    g = WindowGraph(3, 2)
    g.add_edge(NodeId(0, 1), NodeId(1, 0), head=NodeId(1, 0))
    g.add_edge(NodeId(1, 0), NodeId(2, 0))
    g.add_edge(SURROGATE, NodeId(1, 0), head=NodeId(1, 0))
    return g


class TestJsonDocument(unittest.TestCase):

    def setUp(self) -> None:
        self.doc = GraphDocument(_sample_graph(), ["A", "B", "D"], {"edges": []}, None)

    def test_reimport_gives_same_graph(self) -> None:
        back = import_json(export_json(self.doc))
        self.assertEqual(back.graph, self.doc.graph)
        self.assertEqual(back.variables, ["A", "B", "D"])
        self.assertEqual(back.orientation_report, {"edges": []})

    def test_deterministic_text(self) -> None:
        text = export_json(self.doc)
        self.assertEqual(text, export_json(GraphDocument(_sample_graph(), ["A", "B", "D"], {"edges": []})))
        self.assertTrue(text.endswith("\n"))

    def test_directed_edges_written_tail_first(self) -> None:
        data = document_to_dict(self.doc)
        self.assertEqual(data["schema_version"], SCHEMA_VERSION)
        lagged = [e for e in data["edges"] if e["lag"] == 1][0]
        self.assertEqual(lagged["source"], {"name": "A", "lag": 1})
        self.assertEqual(lagged["target"], {"name": "B", "lag": 0})
        surrogate = [e for e in data["edges"] if e["source"] == {"name": "C"}]
        self.assertEqual(len(surrogate), 1)
        self.assertEqual(len(data["nodes"]), 3 * 3 + 1)

    def test_unknown_version(self) -> None:
        data = json.loads(export_json(self.doc))
        data["schema_version"] = "99"
        with self.assertRaises(VersionError):
            import_json(json.dumps(data))

    def test_missing_version(self) -> None:
        data = json.loads(export_json(self.doc))
        del data["schema_version"]
        with self.assertRaises(ParseError):
            import_json(json.dumps(data))

    def test_invalid_json(self) -> None:
        with self.assertRaises(ParseError):
            import_json("{not json")

    def test_edge_pointing_into_surrogate(self) -> None:
        data = json.loads(export_json(self.doc))
        data["edges"] = [{"source": {"name": "A", "lag": 0}, "target": {"name": "C"}, "mark": "directed", "lag": 0}]
        with self.assertRaises(ParseError):
            import_json(json.dumps(data))

    def test_unknown_variable(self) -> None:
        data = json.loads(export_json(self.doc))
        data["edges"][0]["source"]["name"] = "Z"
        with self.assertRaises(ParseError):
            import_json(json.dumps(data))


class TestDot(unittest.TestCase):

    def test_window_graph(self) -> None:
        dot = export_dot(_sample_graph(), ["A", "B", "D"], title="t")
        self.assertTrue(dot.startswith('digraph "t" {'))
        self.assertIn('"A@t-1" -> "B" [label="1"];', dot)
        self.assertIn('"B" -> "D" [label="0", dir=none];', dot)
        self.assertIn('"C" [shape=box', dot)
        self.assertTrue(dot.endswith("}\n"))

    def test_summary_graph(self) -> None:
        dot = export_dot(summary_from_window(_sample_graph()), ["A", "B", "D"])
        self.assertIn('"A" -> "B" [label="1"];', dot)
        self.assertIn('"C" -> "B" [label="0"];', dot)


if __name__ == "__main__":
    unittest.main()
