"""Tests for window and summary graphs."""

import os
import sys
import unittest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from shared.errors import InvalidGraph
from shared.graph import SURROGATE, NodeId, SummaryEdge, SummaryGraph, WindowGraph, edge_key, summary_from_window


class TestNodeId(unittest.TestCase):

    def test_surrogate_sorts_last(self) -> None:
        nodes = [SURROGATE, NodeId(1, 0), NodeId(0, 2), NodeId(0, 0)]
        self.assertEqual(sorted(nodes), [NodeId(0, 0), NodeId(0, 2), NodeId(1, 0), SURROGATE])

    def test_surrogate_has_no_lag(self) -> None:
        with self.assertRaises(InvalidGraph):
            NodeId(None, 1)
        with self.assertRaises(InvalidGraph):
            SURROGATE.shifted(1)

    def test_negative_lag_rejected(self) -> None:
        with self.assertRaises(InvalidGraph):
            NodeId(0, -1)

    def test_shifted_and_label(self) -> None:
        self.assertEqual(NodeId(2, 1).shifted(2), NodeId(2, 3))
        self.assertEqual(NodeId(1, 2).label(["a", "b"]), "b@t-2")
        self.assertEqual(NodeId(0, 0).label(), "X1")
        self.assertEqual(SURROGATE.label(["a"]), "C")

    def test_edge_key_is_unordered(self) -> None:
        a, b = NodeId(1, 0), NodeId(0, 3)
        self.assertEqual(edge_key(a, b), edge_key(b, a))
        self.assertEqual(edge_key(a, b), (b, a))


class TestWindowGraphInvariants(unittest.TestCase):

    def setUp(self) -> None:
        self.g = WindowGraph(3, 2)

    def test_node_space(self) -> None:
        nodes = self.g.nodes()
        self.assertEqual(len(nodes), 3 * 3 + 1)
        self.assertEqual(nodes[-1], SURROGATE)

    def test_rejects_edge_between_lagged_nodes(self) -> None:
        with self.assertRaises(InvalidGraph):
            self.g.add_edge(NodeId(0, 1), NodeId(1, 2))

    def test_rejects_backward_edge(self) -> None:
        with self.assertRaises(InvalidGraph):
            self.g.add_edge(NodeId(0, 0), NodeId(1, 1), head=NodeId(1, 1))

    def test_rejects_edge_into_surrogate(self) -> None:
        with self.assertRaises(InvalidGraph):
            self.g.add_edge(NodeId(0, 0), SURROGATE, head=SURROGATE)

    def test_surrogate_touches_only_lag0(self) -> None:
        with self.assertRaises(InvalidGraph):
            self.g.add_edge(NodeId(0, 1), SURROGATE)

    def test_rejects_self_loop_and_out_of_range(self) -> None:
        with self.assertRaises(InvalidGraph):
            self.g.add_edge(NodeId(0, 0), NodeId(0, 0))
        with self.assertRaises(InvalidGraph):
            self.g.add_edge(NodeId(0, 0), NodeId(3, 0))
        with self.assertRaises(InvalidGraph):
            self.g.add_edge(NodeId(0, 0), NodeId(1, 3))

    def test_orient_and_unorient(self) -> None:
        a, b = NodeId(0, 0), NodeId(1, 0)
        self.g.add_edge(a, b)
        self.assertFalse(self.g.edge(a, b).is_directed)
        self.g.orient(b, a)
        state = self.g.edge(a, b)
        self.assertEqual(state.head, a)
        self.assertEqual(state.tail, b)
        self.g.unorient(a, b)
        self.assertIsNone(self.g.edge(a, b).head)

    def test_orient_missing_edge(self) -> None:
        with self.assertRaises(InvalidGraph):
            self.g.orient(NodeId(0, 0), NodeId(1, 0))
        with self.assertRaises(InvalidGraph):
            self.g.remove_edge(NodeId(0, 0), NodeId(1, 0))

    def test_edge_families(self) -> None:
        self.g.add_edge(NodeId(0, 0), NodeId(1, 0))
        self.g.add_edge(NodeId(0, 1), NodeId(1, 0), head=NodeId(1, 0))
        self.g.add_edge(NodeId(2, 0), SURROGATE, head=NodeId(2, 0))
        self.assertEqual(len(self.g.contemporaneous_edges()), 1)
        self.assertEqual(len(self.g.lagged_edges()), 1)
        self.assertEqual(len(self.g.surrogate_edges()), 1)
        self.assertEqual(self.g.changing_modules, [2])
        self.assertEqual(self.g.lag0_neighbors(NodeId(1, 0)), [NodeId(0, 0)])
        self.g.validate()

    def test_copy_is_independent(self) -> None:
        self.g.add_edge(NodeId(0, 0), NodeId(1, 0))
        clone = self.g.copy()
        clone.remove_edge(NodeId(0, 0), NodeId(1, 0))
        self.assertEqual(self.g.edge_count(), 1)
        self.assertNotEqual(self.g, clone)


class TestSummaryGraph(unittest.TestCase):

    def test_collapses_lags(self) -> None:
        g = WindowGraph(2, 3)
        x0, y0 = NodeId(0, 0), NodeId(1, 0)
        g.add_edge(NodeId(0, 1), y0, head=y0)
        g.add_edge(NodeId(0, 3), y0, head=y0)
        g.add_edge(NodeId(1, 2), y0, head=y0)
        g.add_edge(x0, y0)
        g.add_edge(x0, SURROGATE, head=x0)
        s = summary_from_window(g)
        self.assertEqual(s.edge(x0, y0).lags, frozenset({1, 3}))
        self.assertEqual(s.edge(y0, y0).lags, frozenset({2}))
        self.assertEqual(s.edge(x0, y0, directed=False).lags, frozenset({0}))
        self.assertEqual(s.edge(SURROGATE, x0).lags, frozenset({0}))
        self.assertEqual(len(s), 4)
        self.assertEqual(s.lag_count(), 5)

    def test_rejects_contemporaneous_self_edge(self) -> None:
        with self.assertRaises(InvalidGraph):
            SummaryGraph(2, 2, [SummaryEdge(NodeId(0, 0), NodeId(0, 0), True, frozenset({0}))])


if __name__ == "__main__":
    unittest.main()
