"""Synthetic non-stationary time series with known causal structure.

The model family (lag L, noise e):

    X1 = 0.6 X1[t-1] + e
    X2 = 0.8 X1[t-1] + 1.5 sin(t/50) + e
    X3 = 0.7 X2[t-L] + 0.5 X3[t-2] + e
    X4 = 0.6 X3[t] + e
    X5 = 0.8 X4[t-L] + 0.8 sin(t/20) + e      (6 and 8 variables)
    X6 = 0.7 X5[t] + e                        (6 and 8 variables)
    X7 = 0.4 X6[t-1] + e                      (8 variables)
    X8 = 0.6 X7[t] + e                        (8 variables)

The sinusoids make X2 and X5 changing modules; their phase uses the
absolute simulation index, burn-in included.

Edge counts are derived from the equations above, one edge per term with
the sinusoid counted as a C-edge: 6, 9 and 11 for 4, 6 and 8 variables.
The 10 and 12 links sometimes quoted for the larger models do not follow
from these equations, so the generator does not add edges to reach them.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from benchmark.config import SynthSpec
from shared.dataset import TimeSeriesDataset, make_names
from shared.graph import SURROGATE, NodeId, WindowGraph
from shared.protocol import GraphDocument

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Term:
    """One additive term of a structural equation.

    ``source`` None means a sinusoid ``coefficient * sin(t / period)``.
    """

    target: int
    source: Optional[int]
    lag: int
    coefficient: float
    period: Optional[float] = None

    def render(self, names: List[str]) -> str:
        if self.source is None:
            return f"{self.coefficient:g}*sin(t/{self.period:g})"
        ref = names[self.source] + ("[t]" if self.lag == 0 else f"[t-{self.lag}]")
        return f"{self.coefficient:g}*{ref}"


def model_terms(n_vars: int, lag: int) -> Tuple[Term, ...]:
    """Coefficient table of the ``n_vars``-variable model at lag ``lag``."""
    terms = [
        Term(0, 0, 1, 0.6),
        Term(1, 0, 1, 0.8),
        Term(1, None, 0, 1.5, 50.0),
        Term(2, 1, lag, 0.7),
        Term(2, 2, 2, 0.5),
        Term(3, 2, 0, 0.6),
    ]
    if n_vars >= 6:
        terms += [
            Term(4, 3, lag, 0.8),
            Term(4, None, 0, 0.8, 20.0),
            Term(5, 4, 0, 0.7),
        ]
    if n_vars >= 8:
        terms += [
            Term(6, 5, 1, 0.4),
            Term(7, 6, 0, 0.6),
        ]
    return tuple(terms)


@dataclass(frozen=True)
class GroundTruth:
    """Window graph and coefficient table of the realized generator."""

    graph: WindowGraph
    terms: Tuple[Term, ...]
    variables: Tuple[str, ...]

    @property
    def changing_modules(self) -> List[int]:
        return self.graph.changing_modules

    def equations(self) -> List[str]:
        names = list(self.variables)
        lines = []
        for j, name in enumerate(names):
            parts = [t.render(names) for t in self.terms if t.target == j]
            lines.append(f"{name}[t] = " + " + ".join(parts + ["e"]))
        return lines

    def to_document(self) -> GraphDocument:
        return GraphDocument(self.graph, list(self.variables))


def truth_graph(n_vars: int, lag: int, terms: Tuple[Term, ...]) -> WindowGraph:
    tau_max = max(t.lag for t in terms)
    graph = WindowGraph(n_vars, max(tau_max, lag))
    for t in terms:
        child = NodeId(t.target, 0)
        parent = SURROGATE if t.source is None else NodeId(t.source, t.lag)
        graph.add_edge(parent, child, head=child)
    return graph


def generate(spec: SynthSpec) -> Tuple[TimeSeriesDataset, GroundTruth]:
    """Simulate ``spec.T`` rows after ``spec.burn_in`` discarded steps."""
    spec.validate()
    terms = model_terms(spec.n_vars, spec.lag)
    rng = np.random.default_rng(spec.seed)
    total = spec.burn_in + spec.T
    noise = rng.normal(0.0, spec.noise_std, size=(total, spec.n_vars))
    x = np.zeros((total, spec.n_vars))

    by_target = [[t for t in terms if t.target == j] for j in range(spec.n_vars)]
    for step in range(total):
        # Contemporaneous sources always have a smaller index than their target.
        for j in range(spec.n_vars):
            value = noise[step, j]
            for t in by_target[j]:
                if t.source is None:
                    value += t.coefficient * np.sin(step / t.period)
                elif step - t.lag >= 0:
                    value += t.coefficient * x[step - t.lag, t.source]
            x[step, j] = value

    names = tuple(make_names(spec.n_vars))
    metadata = f"synth n_vars={spec.n_vars} lag={spec.lag} T={spec.T} seed={spec.seed}"
    dataset = TimeSeriesDataset(names, x[spec.burn_in :], metadata)
    truth = GroundTruth(truth_graph(spec.n_vars, spec.lag, terms), terms, names)
    logger.info(
        "Generated %d-variable lag-%d series: T=%d, %d true edges", spec.n_vars, spec.lag, spec.T, truth.graph.edge_count()
    )
    return dataset, truth
