"""Output directory manager for the runner.

Owns the ``--out-dir`` layout and writes every artifact as UTF-8 text with
``\\n`` line endings so reruns produce identical bytes.
"""

import logging
from pathlib import Path
from typing import List, Tuple

from benchmark.evaluation import EvalReport, tsv_header
from benchmark.synth import GroundTruth
from discovery.citest.tester import format_test_log
from discovery.pipeline import DiscoveryResult
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
from shared.dataset import TimeSeriesDataset, dataset_to_csv
from shared.protocol import export_dot, export_json

logger = logging.getLogger(__name__)


class OutputManager:
    """Writes run artifacts into one directory."""

    def __init__(self, out_dir: str) -> None:
        self._base_dir = Path(out_dir)
        self._base_dir.mkdir(parents=True, exist_ok=True)

    @property
    def base_dir(self) -> Path:
        return self._base_dir

    def path(self, name: str) -> Path:
        return self._base_dir / name

    def list_outputs(self) -> List[Path]:
        """Return a sorted list of files in the output directory."""
        try:
            return sorted(p for p in self._base_dir.iterdir() if p.is_file())
        except OSError as exc:
            logger.error("Failed to list outputs: %s", exc)
            return []

    def write_text(self, name: str, text: str) -> Path:
        target = self.path(name)
        try:
            with open(target, "w", encoding="utf-8", newline="\n") as handle:
                handle.write(text)
        except OSError as exc:
            logger.error("Failed to write %s: %s", target, exc)
            raise
        logger.info("Wrote %s", target)
        return target

    # ------------------------------------------------------------------
    # Artifacts
    # ------------------------------------------------------------------

    def write_dataset(self, dataset: TimeSeriesDataset) -> Path:
        return self.write_text(FILE_DATA, dataset_to_csv(dataset))

    def write_truth(self, truth: GroundTruth) -> Tuple[Path, Path]:
        names = list(truth.variables)
        return (
            self.write_text(FILE_TRUTH_JSON, export_json(truth.to_document())),
            self.write_text(FILE_TRUTH_DOT, export_dot(truth.graph, names, title="truth")),
        )

    def write_discovery(self, result: DiscoveryResult) -> List[Path]:
        names = list(result.variables)
        return [
            self.write_text(FILE_GRAPH_JSON, export_json(result.to_document())),
            self.write_text(FILE_GRAPH_DOT, export_dot(result.graph, names, title="cdans")),
            self.write_text(FILE_SUMMARY_DOT, export_dot(result.summary, names, title="summary")),
            self.write_text(FILE_TEST_LOG, format_test_log(result.test_log, names)),
        ]

    def write_metrics(self, report: EvalReport) -> Tuple[Path, Path]:
        return (
            self.write_text(FILE_METRICS_TSV, tsv_header() + "\n" + report.to_tsv_row() + "\n"),
            self.write_text(FILE_METRICS_JSON, report.to_json()),
        )
