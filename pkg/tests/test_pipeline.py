"""Tests for the end-to-end discovery pipeline.

The statistical acceptance runs (many seeds, KCI at T = 1000) are skipped
unless CDANS_RUN_BENCHMARKS=1.
"""

import os
import sys
import unittest

import networkx as nx
import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from benchmark.config import SynthSpec
from benchmark.evaluation import evaluate
from benchmark.synth import generate
from discovery.citest import kci_test, partial_correlation_test
from discovery.citest.hsic import hsic_dependence
from discovery.citest.tester import CITestResult
from discovery.config import DiscoveryConfig, KciParams
from discovery.lagged import detect_lagged_parents, relabel_parents
from discovery.pipeline import run_cdans
from discovery.skeleton import build_partial_graph, discover_skeleton
from discovery.utils.timing import PhaseTimer
from shared.constants import PHASES, TEST_PARCORR
from shared.dataset import TimeSeriesDataset
from shared.errors import InvalidInput, PhaseError
from shared.graph import SURROGATE, NodeId
from shared.protocol import export_json, import_json

RUN_BENCHMARKS = os.environ.get("CDANS_RUN_BENCHMARKS") == "1"


def _fast_config(**overrides) -> DiscoveryConfig:
    cfg = DiscoveryConfig(tau_max=2, max_condset=2, contemp_test=TEST_PARCORR)
    for key, value in overrides.items():
        setattr(cfg, key, value)
    return cfg


class TestRunCdans(unittest.TestCase):

    @classmethod
    def setUpClass(cls) -> None:
        cls.data, cls.truth = generate(SynthSpec(n_vars=4, lag=2, T=300, seed=0))
        cls.result = run_cdans(cls.data, _fast_config())

    def test_result_is_a_valid_window_graph(self) -> None:
        self.result.graph.validate()
        self.assertEqual(self.result.graph.n_vars, 4)
        self.assertEqual(self.result.variables, ("X1", "X2", "X3", "X4"))
        self.assertEqual(len(self.result.surrogate), 300)

    def test_phases_are_instrumented(self) -> None:
        self.assertEqual(set(self.result.test_counts), set(PHASES))
        self.assertEqual(sum(self.result.test_counts.values()), len(self.result.test_log))
        self.assertEqual(self.result.test_counts["partial_graph"], 0)
        self.assertEqual(set(self.result.timings), set(PHASES))

    def test_edges_only_shrink_after_partial_graph(self) -> None:
        partial = build_partial_graph(self.result.lagged_parents, 4, 2)
        for e in self.result.graph.edges():
            self.assertTrue(partial.adjacent(e.u, e.v))
        self.assertEqual(self.result.graph.edge_count(), self.result.skeleton.edge_count())

    def test_every_edge_has_a_rule(self) -> None:
        for e in self.result.graph.edges():
            self.assertIsNotNone(self.result.report.get(e.u, e.v), msg=repr(e))

    def test_changing_modules_are_named(self) -> None:
        expected = [self.data.names[i] for i in self.result.graph.changing_modules]
        self.assertEqual(self.result.changing_modules, expected)

    def test_lagged_edges_are_oriented_forward(self) -> None:
        for e in self.result.graph.lagged_edges():
            self.assertTrue(e.is_directed)
            self.assertEqual(e.head.lag, 0)

    def test_same_input_same_result(self) -> None:
        again = run_cdans(self.data, _fast_config())
        self.assertEqual(again.graph, self.result.graph)
        self.assertEqual(export_json(again.to_document()), export_json(self.result.to_document()))

    def test_document_round_trip(self) -> None:
        doc = import_json(export_json(self.result.to_document()))
        self.assertEqual(doc.graph, self.result.graph)
        self.assertEqual(len(doc.test_log), len(self.result.test_log))
        self.assertIsNone(self.result.to_document(include_log=False).test_log)

    def test_finds_the_strong_lagged_links(self) -> None:
        self.assertIn(NodeId(0, 1), self.result.lagged_parents.of(1))
        self.assertIn(NodeId(1, 2), self.result.lagged_parents.of(2))


class TestRunCdansErrors(unittest.TestCase):

    def test_invalid_config(self) -> None:
        data, _ = generate(SynthSpec(T=100))
        with self.assertRaises(InvalidInput):
            run_cdans(data, _fast_config(tau_max=0))

    def test_series_too_short(self) -> None:
        data = TimeSeriesDataset(["a", "b"], np.random.default_rng(0).normal(size=(8, 2)))
        with self.assertRaises(InvalidInput):
            run_cdans(data, _fast_config(tau_max=2))

    def test_failing_phase_is_named(self) -> None:
        rng = np.random.default_rng(1)
        x = np.zeros(200)
        noise = rng.normal(size=200)
        for t in range(1, 200):
            x[t] = 0.7 * x[t - 1] + noise[t]
        data = TimeSeriesDataset(["a", "b"], np.column_stack([x, x]))
        with self.assertRaises(PhaseError) as ctx:
            run_cdans(data, _fast_config(tau_max=1))
        self.assertEqual(ctx.exception.phase, "lagged")
        # Both level-0 tests of the first target finished before the failure.
        partial = ctx.exception.partial_log
        self.assertGreaterEqual(len(partial), 2)
        self.assertTrue(all(isinstance(r, CITestResult) for r in partial))
        self.assertEqual(partial[0].cond, ())


class TestPhaseTimer(unittest.TestCase):

    def test_phases_accumulate(self) -> None:
        timer = PhaseTimer()
        with timer.phase("lagged"):
            pass
        first = timer.get()["lagged"]
        timer.start("lagged")
        elapsed = timer.stop()
        self.assertGreaterEqual(elapsed, 0.0)
        self.assertAlmostEqual(timer.get()["lagged"], first + elapsed)
        self.assertEqual(timer.stop(), 0.0)


# ----------------------------------------------------------------------
# Statistical acceptance runs
# ----------------------------------------------------------------------


@unittest.skipUnless(RUN_BENCHMARKS, "set CDANS_RUN_BENCHMARKS=1 to run")
class TestBenchmarkAcceptance(unittest.TestCase):

    def test_four_variable_lag_two(self) -> None:
        tprs, fdrs, shds, c_hits = [], [], [], 0
        for seed in range(10):
            data, truth = generate(SynthSpec(n_vars=4, lag=2, T=1000, seed=seed))
            result = run_cdans(data, DiscoveryConfig(tau_max=2, seed=seed))
            report = evaluate(truth.graph, result.graph)
            tprs.append(report.tpr)
            fdrs.append(report.fdr if report.fdr is not None else 0.0)
            shds.append(report.shd)
            c_hits += result.graph.changing_modules == [1]
        self.assertGreaterEqual(np.mean(tprs), 0.70)
        self.assertLessEqual(np.mean(fdrs), 0.50)
        self.assertLessEqual(np.mean(shds), 6)
        self.assertGreaterEqual(c_hits, 7)

    def _larger_model(self, n_vars: int, min_tpr: float) -> None:
        tprs, c_hits = [], 0
        for seed in range(5):
            data, truth = generate(SynthSpec(n_vars=n_vars, lag=2, T=1000, seed=seed))
            result = run_cdans(data, DiscoveryConfig(tau_max=2, seed=seed))
            tprs.append(evaluate(truth.graph, result.graph).tpr)
            c_hits += {1, 4} <= set(result.graph.changing_modules)
        self.assertGreaterEqual(np.mean(tprs), min_tpr)
        self.assertGreaterEqual(c_hits, 3)

    def test_six_variable_lag_two(self) -> None:
        self._larger_model(6, 0.64)

    def test_eight_variable_lag_two(self) -> None:
        self._larger_model(8, 0.57)

    def test_white_noise_gives_empty_graph(self) -> None:
        empty = 0
        for seed in range(10):
            values = np.random.default_rng(seed).normal(size=(1000, 3))
            data = TimeSeriesDataset(["a", "b", "c"], values)
            result = run_cdans(data, DiscoveryConfig(tau_max=2, seed=seed))
            empty += len(result.summary) == 0
        self.assertGreaterEqual(empty, 8)

    def test_ci_type_one_error(self) -> None:
        rng = np.random.default_rng(2024)
        rejections = {"pcorr": 0, "kci": 0}
        for _ in range(500):
            x, y, z = rng.normal(size=(3, 200))
            rejections["pcorr"] += partial_correlation_test(x, y, z).p_value <= 0.05
            rejections["kci"] += kci_test(x, y).p_value <= 0.05
        for kind, count in rejections.items():
            self.assertGreaterEqual(count / 500, 0.02, msg=kind)
            self.assertLessEqual(count / 500, 0.09, msg=kind)

    def test_module_dependence_direction(self) -> None:
        params = KciParams(hsic_reference_points=10)
        T = 300
        t = np.arange(T)
        c = t / T
        correct, flipped = 0, 0
        for seed in range(100):
            rng = np.random.default_rng(seed)
            cause = np.sin(t / 20.0) * (1.0 + 0.5 * np.sin(t / 70.0)) + 0.5 * rng.normal(size=T)
            effect = 2.0 * cause + rng.normal(size=T)
            forward = hsic_dependence(cause, effect, c, params, c_width=20.0 / T)
            backward = hsic_dependence(effect, cause, c, params, c_width=20.0 / T)
            correct += forward < backward

            # Same construction with the roles of the two columns exchanged.
            b = np.sin(t / 20.0) * (1.0 + 0.5 * np.sin(t / 70.0)) + 0.5 * rng.normal(size=T)
            a = 2.0 * b + rng.normal(size=T)
            a_to_b = hsic_dependence(a, b, c, params, c_width=20.0 / T)
            b_to_a = hsic_dependence(b, a, c, params, c_width=20.0 / T)
            flipped += b_to_a < a_to_b
        self.assertGreaterEqual(correct, 70)
        self.assertGreaterEqual(flipped, 70)

    def test_skeleton_is_column_order_independent(self) -> None:
        data, _ = generate(SynthSpec(n_vars=4, lag=2, T=1000, seed=0))
        cfg = DiscoveryConfig(tau_max=2)
        lpa, _ = detect_lagged_parents(data, cfg)
        reference, _, _ = discover_skeleton(build_partial_graph(lpa, 4, 2), data, lpa, cfg)
        expected = nx.Graph([(e.u, e.v) for e in reference.edges()])

        rng = np.random.default_rng(7)
        for _ in range(10):
            order = [int(i) for i in rng.permutation(4)]
            permuted = data.permuted(order)
            p_lpa, _ = detect_lagged_parents(permuted, cfg)
            self.assertEqual(p_lpa.parents, relabel_parents(lpa, order).parents)
            skeleton, _, _ = discover_skeleton(build_partial_graph(p_lpa, 4, 2), permuted, p_lpa, cfg)
            back = {NodeId(k, lag): NodeId(order[k], lag) for k in range(4) for lag in range(3)}
            back[SURROGATE] = SURROGATE
            got = nx.relabel_nodes(nx.Graph([(e.u, e.v) for e in skeleton.edges()]), back)
            self.assertEqual(
                {frozenset(e) for e in got.edges()}, {frozenset(e) for e in expected.edges()}, msg=str(order)
            )


if __name__ == "__main__":
    unittest.main()
