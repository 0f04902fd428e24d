"""Tests for the command-line runner and its configuration layer."""

import io
import json
import os
import shutil
import sys
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from runner.config import RunnerConfig, load_config_file, parse_seeds
from runner.main import build_parser, cli_run
from runner.storage.output_manager import OutputManager
from shared.constants import (
    FILE_DATA,
    FILE_GRAPH_DOT,
    FILE_GRAPH_JSON,
    FILE_METRICS_JSON,
    FILE_METRICS_TSV,
    FILE_SUMMARY_DOT,
    FILE_TEST_LOG,
    FILE_TRUTH_DOT,
    FILE_TRUTH_JSON,
)
from shared.errors import InvalidInput

FAST = ["--T", "200", "--contemp-test", "pcorr", "--max-condset", "2", "--log-level", "WARNING"]


def _run(argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = cli_run(argv)
    return code, out.getvalue(), err.getvalue()


class TestRunnerConfig(unittest.TestCase):

    def setUp(self) -> None:
        self._dir = tempfile.mkdtemp()

    def tearDown(self) -> None:
        shutil.rmtree(self._dir, ignore_errors=True)

    def test_parse_seeds(self) -> None:
        self.assertEqual(parse_seeds("0-2,7"), [0, 1, 2, 7])
        self.assertEqual(parse_seeds(" 3 "), [3])
        for bad in ("", "4-1", "a"):
            with self.assertRaises(InvalidInput, msg=bad):
                parse_seeds(bad)

    def test_apply_converts_strings(self) -> None:
        config = RunnerConfig()
        config.apply({"tau-max": "3", "alpha": "0.01", "exclude_surrogate": "yes", "alpha_lagged": "none"}, "test")
        self.assertEqual(config.tau_max, 3)
        self.assertEqual(config.alpha, 0.01)
        self.assertTrue(config.exclude_surrogate)
        self.assertIsNone(config.alpha_lagged)

    def test_apply_rejects_unknown_and_bad_values(self) -> None:
        with self.assertRaises(InvalidInput):
            RunnerConfig().apply({"colour": "blue"}, "test")
        with self.assertRaises(InvalidInput):
            RunnerConfig().apply({"lag": "two"}, "test")

    def test_discovery_config(self) -> None:
        config = RunnerConfig(alpha=0.1, alpha_contemp=0.02, test="kci", null="permutation", permutations=200)
        cfg = config.discovery_config(default_tau_max=4, seed=9)
        self.assertEqual(cfg.tau_max, 4)
        self.assertEqual((cfg.alpha_lagged, cfg.alpha_contemp), (0.1, 0.02))
        self.assertEqual(cfg.lagged_test, "kci")
        self.assertEqual(cfg.kci.permutations, 200)
        self.assertEqual(cfg.seed, 9)
        self.assertEqual(cfg.correction, "bonferroni")

    def test_correction_setting(self) -> None:
        config = RunnerConfig()
        config.apply({"correction": " none "}, "test")
        self.assertEqual(config.discovery_config(default_tau_max=2, seed=0).correction, "none")
        config.apply({"correction": "holm"}, "test")
        with self.assertRaises(InvalidInput):
            config.discovery_config(default_tau_max=2, seed=0)

    def test_config_file(self) -> None:
        path = Path(self._dir) / "run.cfg"
        path.write_text("# comment\nvars = 6\n\nnoise-std = 0.5  # inline\n", encoding="utf-8")
        self.assertEqual(load_config_file(path), {"vars": "6", "noise-std": "0.5"})
        path.write_text("vars 6\n", encoding="utf-8")
        with self.assertRaises(InvalidInput):
            load_config_file(path)


class TestOutputManager(unittest.TestCase):

    def test_write_text_uses_unix_newlines(self) -> None:
        out_dir = tempfile.mkdtemp()
        try:
            manager = OutputManager(os.path.join(out_dir, "nested"))
            path = manager.write_text("a.txt", "x\ny\n")
            self.assertEqual(path.read_bytes(), b"x\ny\n")
            self.assertEqual(manager.list_outputs(), [path])
            self.assertEqual(manager.base_dir, Path(out_dir, "nested"))
        finally:
            shutil.rmtree(out_dir, ignore_errors=True)


class TestCli(unittest.TestCase):

    def setUp(self) -> None:
        self._dir = tempfile.mkdtemp()

    def tearDown(self) -> None:
        shutil.rmtree(self._dir, ignore_errors=True)

    def _out(self, name: str) -> str:
        return os.path.join(self._dir, name)

    def test_parser_requires_subcommand(self) -> None:
        with redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit):
                build_parser().parse_args([])

    def test_simulate_writes_data_and_truth(self) -> None:
        code, _, _ = _run(["simulate", "--vars", "6", "--T", "150", "--out-dir", self._out("sim"), "--log-level", "WARNING"])
        self.assertEqual(code, 0)
        for name in (FILE_DATA, FILE_TRUTH_JSON, FILE_TRUTH_DOT):
            self.assertTrue(os.path.isfile(os.path.join(self._out("sim"), name)), msg=name)
        with open(os.path.join(self._out("sim"), FILE_DATA), encoding="utf-8") as handle:
            lines = handle.read().splitlines()
        self.assertEqual(lines[0], "X1,X2,X3,X4,X5,X6")
        self.assertEqual(len(lines), 151)

    def test_written_outputs_are_logged(self) -> None:
        code, _, err = _run(["simulate", "--T", "150", "--out-dir", self._out("sim"), "--log-level", "INFO"])
        self.assertEqual(code, 0)
        self.assertIn("Output:", err)
        self.assertIn(FILE_DATA, err)
        self.assertIn(FILE_TRUTH_JSON, err)

    def test_pipeline_outputs_are_byte_identical_across_runs(self) -> None:
        outputs = []
        for run in ("a", "b"):
            code, stdout, _ = _run(["pipeline", "--seed", "3", "--out-dir", self._out(run)] + FAST)
            self.assertEqual(code, 0)
            lines = stdout.splitlines()
            self.assertEqual(lines[0], "vars\tlag\tT\tseed\ttp\tfp\tfn\ttpr\tfdr\tshd")
            self.assertTrue(lines[1].startswith("4\t2\t200\t3\t"))
            outputs.append(stdout)
        self.assertEqual(outputs[0], outputs[1])
        names = (FILE_DATA, FILE_TRUTH_JSON, FILE_TRUTH_DOT, FILE_GRAPH_JSON, FILE_GRAPH_DOT,
                 FILE_SUMMARY_DOT, FILE_TEST_LOG, FILE_METRICS_TSV, FILE_METRICS_JSON)
        for name in names:
            first = Path(self._out("a"), name).read_bytes()
            second = Path(self._out("b"), name).read_bytes()
            self.assertEqual(first, second, msg=name)

    def test_discover_then_evaluate(self) -> None:
        sim = self._out("sim")
        self.assertEqual(_run(["simulate", "--T", "200", "--out-dir", sim, "--log-level", "WARNING"])[0], 0)
        disc = self._out("disc")
        argv = ["discover", "--input", os.path.join(sim, FILE_DATA), "--out-dir", disc, "--contemp-test", "pcorr",
                "--log-level", "WARNING"]
        self.assertEqual(_run(argv)[0], 0)
        with open(os.path.join(disc, FILE_GRAPH_JSON), encoding="utf-8") as handle:
            self.assertEqual(json.load(handle)["tau_max"], 2)

        code, stdout, _ = _run([
            "evaluate",
            "--truth", os.path.join(sim, FILE_TRUTH_JSON),
            "--estimate", os.path.join(disc, FILE_GRAPH_JSON),
            "--out-dir", self._out("eval"),
            "--exclude-surrogate",
            "--log-level", "WARNING",
        ])
        self.assertEqual(code, 0)
        self.assertEqual(stdout.splitlines()[0], "tp\tfp\tfn\ttpr\tfdr\tshd")
        with open(os.path.join(self._out("eval"), FILE_METRICS_JSON), encoding="utf-8") as handle:
            self.assertFalse(json.load(handle)["include_surrogate"])

    def test_config_file_is_overridden_by_flags(self) -> None:
        cfg = Path(self._dir) / "run.cfg"
        cfg.write_text("T = 5000\nseed = 4\nlog-level = WARNING\n", encoding="utf-8")
        code, _, _ = _run(["simulate", "--config", str(cfg), "--T", "120", "--out-dir", self._out("cfg")])
        self.assertEqual(code, 0)
        lines = Path(self._out("cfg"), FILE_DATA).read_text(encoding="utf-8").splitlines()
        self.assertEqual(len(lines), 121)

    def test_missing_input_flag_is_a_usage_error(self) -> None:
        code, _, err = _run(["discover", "--out-dir", self._out("x")])
        self.assertEqual(code, 2)
        self.assertIn("--input", err)

    def test_unreadable_input_is_a_runtime_error(self) -> None:
        bad = Path(self._dir) / "bad.csv"
        bad.write_text("a,b\n1,2\n3,x\n", encoding="utf-8")
        code, _, err = _run(["discover", "--input", str(bad), "--out-dir", self._out("x"), "--log-level", "ERROR"])
        self.assertEqual(code, 1)
        self.assertIn("cdans discover: error:", err)

    def test_bad_config_value(self) -> None:
        code, _, err = _run(["pipeline", "--alpha", "1.5", "--out-dir", self._out("x")] + FAST)
        self.assertEqual(code, 1)
        self.assertIn("alpha", err)


if __name__ == "__main__":
    unittest.main()
