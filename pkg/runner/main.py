"""Command-line entry point for CDANs.

Subcommands:

    simulate   generate a benchmark dataset and its ground truth
    discover   run CDANs on a CSV file
    evaluate   compare an estimated graph document against a truth document
    pipeline   simulate, discover and evaluate in one run
    sweep      run the pipeline over a grid of models and seeds

Logs go to stderr; stdout carries only metric rows.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from benchmark.evaluation import EvalReport, aggregate_reports, evaluate, format_aggregate_row, tsv_header
from benchmark.synth import GroundTruth, generate
from discovery.pipeline import DiscoveryResult, run_cdans
from runner.config import LOG_LEVELS, RunnerConfig, load_config_file
from runner.storage.output_manager import OutputManager
from shared.constants import (
    CORRECTIONS,
    EVAL_MODE_CONTEMPORANEOUS,
    EVAL_MODES,
    NULL_GAMMA,
    NULL_PERMUTATION,
    SYNTH_LAGS,
    SYNTH_VAR_COUNTS,
    TEST_KINDS,
)
from shared.dataset import TimeSeriesDataset, load_csv
from shared.errors import CdansError
from shared.protocol import import_json

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"


class RunnerApp:
    """Wires the generator, the discovery pipeline and the evaluator to an output directory."""

    def __init__(self, config: Optional[RunnerConfig] = None) -> None:
        self.config = config or RunnerConfig()
        self.config.validate()
        self.output = OutputManager(self.config.out_dir)

    # ------------------------------------------------------------------
    # Subcommands
    # ------------------------------------------------------------------

    def simulate(self) -> GroundTruth:
        dataset, truth = generate(self.config.synth_spec())
        self.output.write_dataset(dataset)
        self.output.write_truth(truth)
        return truth

    def discover(self) -> DiscoveryResult:
        dataset = load_csv(self.config.input)
        result = self._discover(dataset, default_tau_max=2, seed=self.config.seed)
        self.output.write_discovery(result)
        return result

    def evaluate(self) -> EvalReport:
        truth = import_json(Path(self.config.truth).read_text(encoding="utf-8"))
        estimate = import_json(Path(self.config.estimate).read_text(encoding="utf-8"))
        if truth.variables != estimate.variables:
            logger.warning("Variable names differ between truth and estimate; comparing by position")
        report = self._evaluate(truth.graph, estimate.graph)
        self.output.write_metrics(report)
        sys.stdout.write(tsv_header() + "\n" + report.to_tsv_row() + "\n")
        return report

    def pipeline(self) -> EvalReport:
        spec = self.config.synth_spec()
        dataset, truth = generate(spec)
        self.output.write_dataset(dataset)
        self.output.write_truth(truth)
        result = self._discover(dataset, default_tau_max=spec.lag, seed=spec.seed)
        self.output.write_discovery(result)
        report = self._evaluate(truth.graph, result.graph)
        self.output.write_metrics(report)
        prefix = ["vars", "lag", "T", "seed"]
        sys.stdout.write(tsv_header(prefix) + "\n")
        sys.stdout.write("\t".join([str(spec.n_vars), str(spec.lag), str(spec.T), str(spec.seed), report.to_tsv_row()]) + "\n")
        return report

    def sweep(self, var_counts: Sequence[int], lags: Sequence[int]) -> List[Dict]:
        """Average metrics per (vars, lag) over the configured seed list."""
        seeds = self.config.seed_list()
        rows = []
        sys.stdout.write(tsv_header(["vars", "lag", "runs"]) + "\n")
        for n_vars in var_counts:
            for lag in lags:
                reports = []
                for seed in seeds:
                    dataset, truth = generate(self.config.synth_spec(seed=seed, n_vars=n_vars, lag=lag))
                    result = self._discover(dataset, default_tau_max=lag, seed=seed)
                    reports.append(self._evaluate(truth.graph, result.graph))
                aggregate = aggregate_reports(reports)
                rows.append({"vars": n_vars, "lag": lag, **aggregate})
                sys.stdout.write(format_aggregate_row(aggregate, [n_vars, lag, aggregate["runs"]]) + "\n")
                sys.stdout.flush()
        return rows

    # ------------------------------------------------------------------
    # Helpers
    # ------------------------------------------------------------------

    def _discover(self, dataset: TimeSeriesDataset, default_tau_max: int, seed: int) -> DiscoveryResult:
        cfg = self.config.discovery_config(default_tau_max=default_tau_max, seed=seed)
        result = run_cdans(dataset, cfg)
        for phase, seconds in result.timings.items():
            logger.info("  %-14s %4d tests  %.2fs", phase, result.test_counts.get(phase, 0), seconds)
        return result

    def _evaluate(self, truth, estimate) -> EvalReport:
        return evaluate(
            truth,
            estimate,
            include_surrogate=not self.config.exclude_surrogate,
            mode=self.config.mode,
        )


# ----------------------------------------------------------------------
# Argument parsing
# ----------------------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser) -> None:
    s = argparse.SUPPRESS
    general = parser.add_argument_group("General")
    general.add_argument("--config", default=s, help="key = value settings file (flags override it)")
    general.add_argument("--out-dir", dest="out_dir", default=s, help="directory for output files")
    general.add_argument("--seed", type=int, default=s, help="random seed")
    general.add_argument("--log-level", dest="log_level", choices=LOG_LEVELS, default=s)


def _add_synth(parser: argparse.ArgumentParser) -> None:
    s = argparse.SUPPRESS
    group = parser.add_argument_group("Synthetic data")
    group.add_argument("--vars", type=int, choices=SYNTH_VAR_COUNTS, default=s, help="number of variables")
    group.add_argument("--lag", type=int, choices=SYNTH_LAGS, default=s, help="lag of the X2->X3 link")
    group.add_argument("--T", dest="T", type=int, default=s, help="retained samples")
    group.add_argument("--noise-std", dest="noise_std", type=float, default=s)
    group.add_argument("--burn-in", dest="burn_in", type=int, default=s)


def _add_discovery(parser: argparse.ArgumentParser) -> None:
    s = argparse.SUPPRESS
    group = parser.add_argument_group("Discovery")
    group.add_argument("--alpha", type=float, default=s, help="significance level for both phases")
    group.add_argument("--alpha-lagged", dest="alpha_lagged", type=float, default=s)
    group.add_argument("--alpha-contemp", dest="alpha_contemp", type=float, default=s)
    group.add_argument(
        "--correction", choices=CORRECTIONS, default=s, help="per-phase error control on final edge decisions"
    )
    group.add_argument("--tau-max", dest="tau_max", type=int, default=s, help="maximum lag searched")
    group.add_argument("--test", choices=TEST_KINDS, default=s, help="CI test of the lagged phase")
    group.add_argument("--contemp-test", dest="contemp_test", choices=TEST_KINDS, default=s)
    group.add_argument("--max-condset", dest="max_condset", type=int, default=s)
    group.add_argument("--null", choices=(NULL_GAMMA, NULL_PERMUTATION), default=s, help="KCI null distribution")
    group.add_argument("--permutations", type=int, default=s)
    group.add_argument("--workers", type=int, default=s, help="worker threads")


def _add_evaluation(parser: argparse.ArgumentParser) -> None:
    s = argparse.SUPPRESS
    group = parser.add_argument_group("Evaluation")
    group.add_argument("--mode", choices=EVAL_MODES, default=s, help=f"{EVAL_MODE_CONTEMPORANEOUS} keeps lag-0 and C edges")
    group.add_argument("--exclude-surrogate", dest="exclude_surrogate", action="store_true", default=s)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cdans", description="Causal discovery for autocorrelated, non-stationary time series")
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="generate a benchmark dataset and ground truth")
    _add_common(simulate)
    _add_synth(simulate)

    discover = sub.add_parser("discover", help="run CDANs on a CSV file")
    _add_common(discover)
    discover.add_argument("--input", required=True, help="CSV file: header row then numeric rows")
    _add_discovery(discover)

    evaluate_cmd = sub.add_parser("evaluate", help="score an estimated graph against ground truth")
    _add_common(evaluate_cmd)
    evaluate_cmd.add_argument("--truth", required=True, help="truth graph JSON")
    evaluate_cmd.add_argument("--estimate", required=True, help="estimated graph JSON")
    _add_evaluation(evaluate_cmd)

    pipeline = sub.add_parser("pipeline", help="simulate, discover and evaluate")
    _add_common(pipeline)
    _add_synth(pipeline)
    _add_discovery(pipeline)
    _add_evaluation(pipeline)

    sweep = sub.add_parser("sweep", help="pipeline over model sizes, lags and seeds")
    _add_common(sweep)
    _add_synth(sweep)
    _add_discovery(sweep)
    _add_evaluation(sweep)
    sweep.add_argument("--seeds", default=argparse.SUPPRESS, help="seed list such as 0-9 or 1,3,5")
    return parser


def configure_logging(level: str) -> None:
    logging.basicConfig(level=getattr(logging, level.upper()), format=LOG_FORMAT, stream=sys.stderr, force=True)


def cli_run(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand and return its exit status.

    0 on success, 1 on any runtime error, 2 on a usage error.
    """
    parser = build_parser()
    try:
        args = vars(parser.parse_args(argv))
    except SystemExit as exc:
        return int(exc.code or 0)

    command = args.pop("command")
    config_path = args.pop("config", None)
    try:
        config = RunnerConfig()
        given = set(args)
        if config_path is not None:
            file_values = load_config_file(config_path)
            config.apply(file_values, str(config_path))
            given |= {key.strip().replace("-", "_") for key in file_values}
        config.apply(args, "command line")
        configure_logging(config.log_level)
        app = RunnerApp(config)

        if command == "simulate":
            app.simulate()
        elif command == "discover":
            app.discover()
        elif command == "evaluate":
            app.evaluate()
        elif command == "pipeline":
            app.pipeline()
        elif command == "sweep":
            # Without an explicit size or lag the sweep covers the whole model family.
            var_counts = [config.vars] if "vars" in given else list(SYNTH_VAR_COUNTS)
            lags = [config.lag] if "lag" in given else list(SYNTH_LAGS)
            app.sweep(var_counts, lags)
        for path in app.output.list_outputs():
            logger.info("Output: %s", path)
    except (CdansError, OSError) as exc:
        logger.error("%s failed: %s", command, exc)
        sys.stderr.write(f"cdans {command}: error: {exc}\n")
        return 1
    return 0


def main() -> None:
    sys.exit(cli_run())


if __name__ == "__main__":
    main()
