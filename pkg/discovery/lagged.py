"""Lagged parent discovery: PC1 condition selection followed by MCI tests.

For every target variable j the candidate set starts as all (i, tau) with
tau in [1, tau_max]. Level 0 removes candidates that are marginally
independent of X^j_t; level l conditions each survivor on the l strongest
other survivors. Candidates are ranked by the smallest absolute statistic
they have produced so far. Removals are collected against the level's
frozen survivor list and committed when the level ends. The survivors then
face one momentary conditional independence (MCI) test conditioned on the
target's parents and on the candidate's own parents shifted by its lag.
PC1 decides at ``alpha_lagged``; MCI decides at the phase level from
``DiscoveryConfig.decision_alpha`` over all N * N * tau_max candidate links.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from discovery.citest.tester import CITester, CITestResult
from discovery.config import DiscoveryConfig
from discovery.utils.workers import ordered_map
from shared.dataset import TimeSeriesDataset
from shared.errors import InvalidInput
from shared.graph import NodeId

logger = logging.getLogger(__name__)


@dataclass
class LaggedParentSet:
    """Per-variable lagged parents, strongest first.

    ``strength`` maps (target, parent) to the absolute MCI statistic that
    produced the ordering.
    """

    n_vars: int
    tau_max: int
    parents: Dict[int, Tuple[NodeId, ...]] = field(default_factory=dict)
    strength: Dict[Tuple[int, NodeId], float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for j in range(self.n_vars):
            self.parents.setdefault(j, ())
        self.validate()

    def of(self, j: int) -> Tuple[NodeId, ...]:
        return self.parents.get(j, ())

    def total(self) -> int:
        return sum(len(p) for p in self.parents.values())

    def validate(self) -> None:
        for j, plist in self.parents.items():
            if not 0 <= j < self.n_vars:
                raise InvalidInput(f"target {j} outside 0..{self.n_vars - 1}")
            if len(set(plist)) != len(plist):
                raise InvalidInput(f"duplicate lagged parents for variable {j}")
            for p in plist:
                if p.is_surrogate or not 1 <= p.lag <= self.tau_max or p.var >= self.n_vars:
                    raise InvalidInput(f"{p!r} is not a valid lagged parent (tau_max={self.tau_max})")

    def to_dict(self, names: Sequence[str]) -> Dict[str, List[str]]:
        return {names[j]: [p.label(names) for p in self.of(j)] for j in range(self.n_vars)}


def _rank(values: Dict[NodeId, float]) -> List[NodeId]:
    """Strongest first; ties by (variable, lag)."""
    return sorted(values, key=lambda n: (-values[n], n.var, n.lag))


# ------------------------------------------------------------------
# PC1 condition selection
# ------------------------------------------------------------------


def _select_conditions(
    tester: CITester, j: int, cfg: DiscoveryConfig
) -> Tuple[List[NodeId], Dict[NodeId, float], List[CITestResult]]:
    target = NodeId(j, 0)
    candidates = [NodeId(i, tau) for i in range(tester.data.n_vars) for tau in range(1, cfg.tau_max + 1)]
    strength: Dict[NodeId, float] = {c: float("inf") for c in candidates}
    survivors = list(candidates)
    log: List[CITestResult] = []

    level = 0
    while level <= cfg.max_condset and level <= len(survivors) - 1:
        snapshot = list(survivors)
        removed = []
        for cand in snapshot:
            others = [p for p in snapshot if p != cand]
            cond = others[:level]
            result = tester.run(cand, target, cond, cfg.lagged_test)
            log.append(result)
            strength[cand] = min(strength[cand], abs(result.statistic))
            if result.independent(cfg.alpha_lagged):
                removed.append(cand)
        for cand in removed:
            del strength[cand]
        survivors = _rank(strength)
        logger.debug(
            "target %s level %d: %d removed, %d remain", target.label(tester.data.names), level, len(removed), len(survivors)
        )
        level += 1
    return survivors, strength, log


# ------------------------------------------------------------------
# MCI
# ------------------------------------------------------------------


def _mci_conditions(
    cand: NodeId, own: Sequence[NodeId], preliminary: Dict[int, List[NodeId]], max_condset: int
) -> List[NodeId]:
    cond = [p for p in own if p != cand][:max_condset]
    for p in preliminary[cand.var][:max_condset]:
        shifted = p.shifted(cand.lag)
        if shifted not in cond:
            cond.append(shifted)
    return cond


def _run_mci(
    tester: CITester, j: int, preliminary: Dict[int, List[NodeId]], cfg: DiscoveryConfig, alpha: float
) -> Tuple[Tuple[NodeId, ...], Dict[NodeId, float], List[CITestResult]]:
    target = NodeId(j, 0)
    kept: Dict[NodeId, float] = {}
    log: List[CITestResult] = []
    for cand in preliminary[j]:
        cond = _mci_conditions(cand, preliminary[j], preliminary, cfg.max_condset)
        result = tester.run(cand, target, cond, cfg.lagged_test)
        log.append(result)
        if not result.independent(alpha):
            kept[cand] = abs(result.statistic)
    return tuple(_rank(kept)), kept, log


def detect_lagged_parents(
    data: TimeSeriesDataset, cfg: DiscoveryConfig, tester: Optional[CITester] = None
) -> Tuple[LaggedParentSet, List[CITestResult]]:
    """Estimate LPA(X^j_t) for every variable.

    Returns the parent set and the full test log, PC1 tests first (per
    target in variable order) followed by the MCI tests. A caller-supplied
    ``tester`` keeps its history if a test fails midway.

    Raises:
        InvalidInput: Empty or too-short data, or an invalid config.
    """
    cfg.validate()
    if data.n_samples == 0 or data.n_vars == 0:
        raise InvalidInput("dataset is empty")
    data.check_ready(cfg.tau_max)
    tester = tester or CITester(data, cfg)
    targets = list(range(data.n_vars))

    selected = ordered_map(lambda j: _select_conditions(tester, j, cfg), targets, cfg.n_workers)
    preliminary = {j: sel[0] for j, sel in zip(targets, selected)}
    log: List[CITestResult] = [r for sel in selected for r in sel[2]]

    n_candidates = data.n_vars * data.n_vars * cfg.tau_max
    alpha = cfg.decision_alpha(cfg.alpha_lagged, n_candidates)
    mci = ordered_map(lambda j: _run_mci(tester, j, preliminary, cfg, alpha), targets, cfg.n_workers)
    parents: Dict[int, Tuple[NodeId, ...]] = {}
    strength: Dict[Tuple[int, NodeId], float] = {}
    for j, (plist, values, mci_log) in zip(targets, mci):
        parents[j] = plist
        strength.update({(j, p): v for p, v in values.items()})
        log.extend(mci_log)

    lpa = LaggedParentSet(data.n_vars, cfg.tau_max, parents, strength)
    logger.info(
        "Lagged phase: %d parents kept from %d candidates after %d tests",
        lpa.total(),
        n_candidates,
        len(log),
    )
    return lpa, log


def relabel_parents(lpa: LaggedParentSet, order: Iterable[int]) -> LaggedParentSet:
    """Express ``lpa`` in the column order of ``dataset.permuted(order)``.

    Position k of the permuted dataset holds original variable ``order[k]``.
    """
    order = list(order)
    new_index = {old: new for new, old in enumerate(order)}
    parents = {
        new_index[j]: tuple(NodeId(new_index[p.var], p.lag) for p in plist)
        for j, plist in lpa.parents.items()
    }
    strength = {(new_index[j], NodeId(new_index[p.var], p.lag)): v for (j, p), v in lpa.strength.items()}
    return LaggedParentSet(lpa.n_vars, lpa.tau_max, parents, strength)
