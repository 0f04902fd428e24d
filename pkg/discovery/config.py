"""Configuration dataclasses for a CDANs discovery run.

Follows the same pattern as the benchmark and runner configs: flat
dataclasses whose defaults come from ``shared.constants``, plus a
``validate()`` that names the offending field.
"""

from dataclasses import dataclass, field
from typing import Optional, Union

from shared.constants import (
    BANDWIDTH_MEDIAN,
    CORRECTION_NONE,
    CORRECTIONS,
    DEFAULT_ALPHA,
    DEFAULT_CORRECTION,
    DEFAULT_HSIC_MAX_SAMPLES,
    DEFAULT_HSIC_REFERENCE_POINTS,
    DEFAULT_HSIC_RIDGE,
    DEFAULT_MAX_CONDSET,
    DEFAULT_PERMUTATIONS,
    DEFAULT_RIDGE_EPSILON,
    DEFAULT_SEED,
    DEFAULT_SURROGATE_BANDWIDTH_STEPS,
    DEFAULT_TAU_MAX,
    DEFAULT_WORKERS,
    MIN_PERMUTATIONS,
    NULL_GAMMA,
    NULL_PERMUTATION,
    TEST_KCI,
    TEST_KINDS,
    TEST_PARCORR,
)
from shared.errors import InvalidInput


@dataclass
class KciParams:
    """Kernel settings shared by the KCI test and the extended-HSIC measure."""

    # --- Bandwidth ---
    bandwidth_rule: Union[str, float] = BANDWIDTH_MEDIAN  # "median" or a fixed width
    surrogate_bandwidth_steps: Optional[float] = DEFAULT_SURROGATE_BANDWIDTH_STEPS

    # --- Null distribution ---
    null_method: str = NULL_GAMMA
    permutations: int = DEFAULT_PERMUTATIONS

    # --- Regularization ---
    ridge_epsilon: float = DEFAULT_RIDGE_EPSILON  # relative to mean Gram diagonal

    # --- Extended HSIC ---
    hsic_ridge: float = DEFAULT_HSIC_RIDGE  # relative to n * mean Gram diagonal
    hsic_max_samples: int = DEFAULT_HSIC_MAX_SAMPLES
    hsic_reference_points: int = DEFAULT_HSIC_REFERENCE_POINTS

    @property
    def fixed_bandwidth(self) -> Optional[float]:
        """The fixed width, or None when the median heuristic is in use."""
        if self.bandwidth_rule == BANDWIDTH_MEDIAN:
            return None
        return float(self.bandwidth_rule)

    def validate(self) -> None:
        if self.bandwidth_rule != BANDWIDTH_MEDIAN:
            try:
                width = float(self.bandwidth_rule)
            except (TypeError, ValueError):
                raise InvalidInput(f"bandwidth_rule must be 'median' or a number, got {self.bandwidth_rule!r}")
            if width <= 0:
                raise InvalidInput(f"bandwidth_rule must be positive, got {width}")
        if self.surrogate_bandwidth_steps is not None and self.surrogate_bandwidth_steps <= 0:
            raise InvalidInput("surrogate_bandwidth_steps must be positive or None")
        if self.null_method not in (NULL_GAMMA, NULL_PERMUTATION):
            raise InvalidInput(f"null_method must be {NULL_GAMMA!r} or {NULL_PERMUTATION!r}")
        if self.null_method == NULL_PERMUTATION and self.permutations < MIN_PERMUTATIONS:
            raise InvalidInput(f"permutations must be >= {MIN_PERMUTATIONS}, got {self.permutations}")
        if self.ridge_epsilon <= 0:
            raise InvalidInput(f"ridge_epsilon must be > 0, got {self.ridge_epsilon}")
        if self.hsic_ridge <= 0:
            raise InvalidInput(f"hsic_ridge must be > 0, got {self.hsic_ridge}")
        if self.hsic_max_samples < 20:
            raise InvalidInput("hsic_max_samples must be >= 20")
        if self.hsic_reference_points < 1:
            raise InvalidInput("hsic_reference_points must be >= 1")


@dataclass
class DiscoveryConfig:
    """Configuration for one CDANs run."""

    # --- Search space ---
    tau_max: int = DEFAULT_TAU_MAX
    max_condset: int = DEFAULT_MAX_CONDSET

    # --- Significance ---
    alpha_lagged: float = DEFAULT_ALPHA
    alpha_contemp: float = DEFAULT_ALPHA
    correction: str = DEFAULT_CORRECTION  # "bonferroni" or "none"

    # --- Tests ---
    lagged_test: str = TEST_PARCORR
    contemp_test: str = TEST_KCI
    kci: KciParams = field(default_factory=KciParams)

    # --- Reproducibility / execution ---
    seed: int = DEFAULT_SEED
    n_workers: int = DEFAULT_WORKERS

    def decision_alpha(self, alpha: float, family: int) -> float:
        """Level for the final edge decisions of a phase testing ``family`` links.

        With Bonferroni the chance that any null link of the phase survives
        stays below ``alpha``.
        """
        if self.correction == CORRECTION_NONE or family <= 1:
            return alpha
        return alpha / family

    def validate(self) -> None:
        if self.tau_max < 1:
            raise InvalidInput(f"tau_max must be >= 1, got {self.tau_max}")
        if self.max_condset < 0:
            raise InvalidInput(f"max_condset must be >= 0, got {self.max_condset}")
        for name in ("alpha_lagged", "alpha_contemp"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise InvalidInput(f"{name} must lie in (0, 1), got {value}")
        for name in ("lagged_test", "contemp_test"):
            if getattr(self, name) not in TEST_KINDS:
                raise InvalidInput(f"{name} must be one of {TEST_KINDS}, got {getattr(self, name)!r}")
        if self.correction not in CORRECTIONS:
            raise InvalidInput(f"correction must be one of {CORRECTIONS}, got {self.correction!r}")
        if self.n_workers < 1:
            raise InvalidInput(f"n_workers must be >= 1, got {self.n_workers}")
        self.kci.validate()
