"""Tests for edge classification, SHD and TPR/FDR."""

import itertools
import os
import sys
import unittest

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from benchmark.evaluation import (
    EvalReport,
    aggregate_reports,
    classify_edges,
    evaluate,
    fdr,
    format_aggregate_row,
    shd,
    tpr,
    tsv_header,
)
from shared.constants import (
    EDGE_MISORIENTED,
    EDGE_MISSING,
    EDGE_REVERSED,
    EDGE_SPURIOUS,
    EDGE_TP,
    EDGE_UNORIENTED,
    EVAL_MODE_CONTEMPORANEOUS,
)
from shared.errors import InvalidGraph, InvalidInput, UndefinedMetric
from shared.graph import SURROGATE, NodeId, WindowGraph

A, B, C3 = NodeId(0, 0), NodeId(1, 0), NodeId(2, 0)


def _truth() -> WindowGraph:
    g = WindowGraph(3, 1)
    g.add_edge(A, B, head=B)
    g.add_edge(NodeId(0, 1), A, head=A)
    g.add_edge(SURROGATE, B, head=B)
    g.add_edge(B, C3)
    return g


class TestClassification(unittest.TestCase):

    def test_identical_graphs(self) -> None:
        report = evaluate(_truth(), _truth())
        self.assertEqual((report.tp, report.fp, report.fn, report.shd), (4, 0, 0, 0))
        self.assertEqual(report.tpr, 1.0)
        self.assertEqual(report.fdr, 0.0)
        self.assertTrue(all(e.label == EDGE_TP for e in report.edges))

    def test_every_label(self) -> None:
        est = WindowGraph(3, 1)
        est.add_edge(A, B, head=A)  # reversed
        est.add_edge(NodeId(0, 1), A)  # unoriented
        est.add_edge(B, C3, head=C3)  # misoriented
        est.add_edge(A, C3)  # spurious
        labels = {(e.u, e.v): e.label for e in classify_edges(_truth(), est)}
        self.assertEqual(labels[(A, B)], EDGE_REVERSED)
        self.assertEqual(labels[(A, NodeId(0, 1))], EDGE_UNORIENTED)
        self.assertEqual(labels[(B, C3)], EDGE_MISORIENTED)
        self.assertEqual(labels[(A, C3)], EDGE_SPURIOUS)
        self.assertEqual(labels[(B, SURROGATE)], EDGE_MISSING)

        report = evaluate(_truth(), est)
        self.assertEqual((report.tp, report.fp, report.fn, report.shd), (0, 3, 4, 5))

    def test_surrogate_exclusion_and_mode(self) -> None:
        est = _truth()
        est.remove_edge(SURROGATE, B)
        self.assertEqual(evaluate(_truth(), est, include_surrogate=False).shd, 0)
        contemporaneous = evaluate(_truth(), _truth(), mode=EVAL_MODE_CONTEMPORANEOUS)
        self.assertEqual(contemporaneous.tp, 3)

    def test_node_space_mismatch(self) -> None:
        with self.assertRaises(InvalidInput):
            evaluate(_truth(), WindowGraph(4, 1))
        with self.assertRaises(InvalidInput):
            evaluate(_truth(), _truth(), mode="summary")

    def test_different_tau_max_uses_union_of_pairs(self) -> None:
        est = WindowGraph(3, 3)
        est.add_edge(NodeId(0, 3), A, head=A)
        labels = {(e.u, e.v): e.label for e in classify_edges(_truth(), est)}
        self.assertEqual(labels[(A, NodeId(0, 3))], EDGE_SPURIOUS)


class TestMetrics(unittest.TestCase):

    def test_counts_from_the_reported_row(self) -> None:
        report = EvalReport(tp=5, fp=3, fn=1)
        self.assertEqual(round(tpr(report), 2), 0.83)
        self.assertEqual(round(fdr(report), 2), 0.38)

    def test_undefined(self) -> None:
        with self.assertRaises(UndefinedMetric):
            tpr(EvalReport(fp=2))
        with self.assertRaises(UndefinedMetric):
            fdr(EvalReport(fn=2))
        self.assertIsNone(EvalReport().tpr)
        self.assertEqual(EvalReport(fp=1).to_tsv_row(), "0\t1\t0\tNA\t1.0000\t0")

    def test_json(self) -> None:
        text = EvalReport(tp=1).to_json()
        self.assertIn('"tpr": 1.0', text)
        self.assertTrue(text.endswith("\n"))

    def test_aggregate(self) -> None:
        agg = aggregate_reports([EvalReport(tp=1, fn=1, shd=1), EvalReport(fp=1, shd=3)])
        self.assertEqual(agg["runs"], 2)
        self.assertEqual(agg["tpr"], 0.5)
        self.assertEqual(agg["fdr"], 0.5)
        self.assertEqual(agg["shd"], 2.0)
        self.assertEqual(format_aggregate_row(agg, [4, 2]), "4\t2\t1\t1\t1\t0.5000\t0.5000\t2.0000")
        self.assertEqual(tsv_header(["vars"]), "vars\ttp\tfp\tfn\ttpr\tfdr\tshd")
        with self.assertRaises(UndefinedMetric):
            aggregate_reports([])


def _random_graph(rng: np.random.Generator) -> WindowGraph:
    g = WindowGraph(2, 1)
    for a, b in itertools.combinations(g.nodes(), 2):
        try:
            state = rng.integers(4)
            if state == 1:
                g.add_edge(a, b)
            elif state == 2:
                g.add_edge(a, b, head=b)
            elif state == 3:
                g.add_edge(a, b, head=a)
        except InvalidGraph:
            continue
    return g


class TestShdOracle(unittest.TestCase):

    def test_matches_per_pair_edit_count(self) -> None:
        rng = np.random.default_rng(0)
        for _ in range(1000):
            truth, est = _random_graph(rng), _random_graph(rng)
            edits = 0
            for a, b in itertools.combinations(truth.nodes(), 2):
                t, e = truth.edge(a, b), est.edge(a, b)
                t_state = None if t is None else t.head or "-"
                e_state = None if e is None else e.head or "-"
                edits += t_state != e_state
            self.assertEqual(shd(truth, est), edits)


if __name__ == "__main__":
    unittest.main()
