"""Configuration for the synthetic benchmark models."""

from dataclasses import dataclass

from shared.constants import (
    DEFAULT_BURN_IN,
    DEFAULT_NOISE_STD,
    DEFAULT_SEED,
    DEFAULT_SYNTH_T,
    MIN_SYNTH_T,
    SYNTH_LAGS,
    SYNTH_VAR_COUNTS,
)
from shared.errors import InvalidInput


@dataclass
class SynthSpec:
    """One member of the 4/6/8-variable, lag 2/4/6/8 model family."""

    # --- Model ---
    n_vars: int = 4
    lag: int = 2

    # --- Sampling ---
    T: int = DEFAULT_SYNTH_T
    burn_in: int = DEFAULT_BURN_IN
    noise_std: float = DEFAULT_NOISE_STD
    seed: int = DEFAULT_SEED

    def validate(self) -> None:
        if self.n_vars not in SYNTH_VAR_COUNTS:
            raise InvalidInput(f"n_vars must be one of {SYNTH_VAR_COUNTS}, got {self.n_vars}")
        if self.lag not in SYNTH_LAGS:
            raise InvalidInput(f"lag must be one of {SYNTH_LAGS}, got {self.lag}")
        if self.T < MIN_SYNTH_T:
            raise InvalidInput(f"T must be >= {MIN_SYNTH_T}, got {self.T}")
        if self.burn_in < self.lag:
            raise InvalidInput(f"burn_in ({self.burn_in}) must be >= lag ({self.lag})")
        if self.noise_std < 0:
            raise InvalidInput(f"noise_std must be >= 0, got {self.noise_std}")
        if self.seed < 0:
            raise InvalidInput(f"seed must be >= 0, got {self.seed}")
