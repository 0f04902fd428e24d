"""Configuration for the command-line runner.

Values come from three layers: dataclass defaults, an optional plain-text
``key = value`` file and command-line flags, later layers winning. Keys in
the file are flag names; ``-`` and ``_`` are interchangeable.
"""

import logging
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Union

from benchmark.config import SynthSpec
from discovery.config import DiscoveryConfig, KciParams
from shared.constants import (
    DEFAULT_ALPHA,
    DEFAULT_BURN_IN,
    DEFAULT_CORRECTION,
    DEFAULT_MAX_CONDSET,
    DEFAULT_NOISE_STD,
    DEFAULT_PERMUTATIONS,
    DEFAULT_SEED,
    DEFAULT_SYNTH_T,
    DEFAULT_WORKERS,
    EVAL_MODE_WINDOW,
    EVAL_MODES,
    NULL_GAMMA,
    TEST_KCI,
    TEST_PARCORR,
)
from shared.errors import InvalidInput

logger = logging.getLogger(__name__)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def _to_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


@dataclass
class RunnerConfig:
    """Every setting the CLI subcommands understand."""

    # --- Synthetic data ---
    vars: int = 4
    lag: int = 2
    T: int = DEFAULT_SYNTH_T
    seed: int = DEFAULT_SEED
    noise_std: float = DEFAULT_NOISE_STD
    burn_in: int = DEFAULT_BURN_IN
    seeds: str = "0-4"

    # --- Discovery ---
    tau_max: Optional[int] = None  # None: the model lag when simulating, else 2
    max_condset: int = DEFAULT_MAX_CONDSET
    alpha: float = DEFAULT_ALPHA
    alpha_lagged: Optional[float] = None
    alpha_contemp: Optional[float] = None
    correction: str = DEFAULT_CORRECTION
    test: str = TEST_PARCORR
    contemp_test: str = TEST_KCI
    null: str = NULL_GAMMA
    permutations: int = DEFAULT_PERMUTATIONS
    workers: int = DEFAULT_WORKERS

    # --- Evaluation ---
    mode: str = EVAL_MODE_WINDOW
    exclude_surrogate: bool = False

    # --- Files ---
    out_dir: str = "cdans_out"
    input: Optional[str] = None
    truth: Optional[str] = None
    estimate: Optional[str] = None

    # --- Logging ---
    log_level: str = "INFO"

    # ------------------------------------------------------------------
    # Layering
    # ------------------------------------------------------------------

    def apply(self, values: Mapping[str, Any], source: str) -> None:
        """Overlay ``values`` (raw strings or typed) onto this config."""
        known = {f.name for f in fields(self)}
        for raw_key, value in values.items():
            key = raw_key.strip().replace("-", "_")
            if key not in known:
                raise InvalidInput(f"unknown setting {raw_key!r} in {source}")
            if value is None:
                continue
            if isinstance(value, str):
                try:
                    value = _CONVERTERS[key](value)
                except ValueError as exc:
                    raise InvalidInput(f"bad value for {raw_key!r} in {source}: {exc}") from exc
            setattr(self, key, value)

    # ------------------------------------------------------------------
    # Derived configs
    # ------------------------------------------------------------------

    def synth_spec(self, seed: Optional[int] = None, n_vars: Optional[int] = None, lag: Optional[int] = None) -> SynthSpec:
        spec = SynthSpec(
            n_vars=self.vars if n_vars is None else n_vars,
            lag=self.lag if lag is None else lag,
            T=self.T,
            burn_in=self.burn_in,
            noise_std=self.noise_std,
            seed=self.seed if seed is None else seed,
        )
        spec.validate()
        return spec

    def discovery_config(self, default_tau_max: int = 2, seed: Optional[int] = None) -> DiscoveryConfig:
        cfg = DiscoveryConfig(
            tau_max=self.tau_max if self.tau_max is not None else default_tau_max,
            max_condset=self.max_condset,
            alpha_lagged=self.alpha if self.alpha_lagged is None else self.alpha_lagged,
            alpha_contemp=self.alpha if self.alpha_contemp is None else self.alpha_contemp,
            correction=self.correction,
            lagged_test=self.test,
            contemp_test=self.contemp_test,
            kci=KciParams(null_method=self.null, permutations=self.permutations),
            seed=self.seed if seed is None else seed,
            n_workers=self.workers,
        )
        cfg.validate()
        return cfg

    def seed_list(self) -> List[int]:
        return parse_seeds(self.seeds)

    def validate(self) -> None:
        if self.mode not in EVAL_MODES:
            raise InvalidInput(f"mode must be one of {EVAL_MODES}, got {self.mode!r}")
        if self.log_level.upper() not in LOG_LEVELS:
            raise InvalidInput(f"log_level must be one of {LOG_LEVELS}, got {self.log_level!r}")
        if self.workers < 1:
            raise InvalidInput(f"workers must be >= 1, got {self.workers}")


def _optional(convert: Callable[[str], Any]) -> Callable[[str], Any]:
    def inner(text: str) -> Any:
        return None if text.strip().lower() in ("", "none") else convert(text)

    return inner


_CONVERTERS: Dict[str, Callable[[str], Any]] = {
    "vars": int,
    "lag": int,
    "T": int,
    "seed": int,
    "noise_std": float,
    "burn_in": int,
    "seeds": str.strip,
    "tau_max": _optional(int),
    "max_condset": int,
    "alpha": float,
    "alpha_lagged": _optional(float),
    "alpha_contemp": _optional(float),
    "correction": str.strip,
    "test": str.strip,
    "contemp_test": str.strip,
    "null": str.strip,
    "permutations": int,
    "workers": int,
    "mode": str.strip,
    "exclude_surrogate": _to_bool,
    "out_dir": str.strip,
    "input": _optional(str.strip),
    "truth": _optional(str.strip),
    "estimate": _optional(str.strip),
    "log_level": str.strip,
}


def parse_seeds(text: str) -> List[int]:
    """Parse ``"0-4"``, ``"1,3,5"`` or a mix such as ``"0-2,7"``."""
    seeds: List[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            if "-" in part:
                lo, hi = (int(p) for p in part.split("-", 1))
                if hi < lo:
                    raise ValueError(f"empty range {part!r}")
                seeds.extend(range(lo, hi + 1))
            else:
                seeds.append(int(part))
    except ValueError as exc:
        raise InvalidInput(f"bad seed list {text!r}: {exc}") from exc
    if not seeds:
        raise InvalidInput(f"seed list {text!r} is empty")
    return seeds


def load_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """Read ``key = value`` lines; ``#`` starts a comment.

    Raises:
        InvalidInput: A non-blank line has no ``=``.
        OSError: The file cannot be read.
    """
    values: Dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidInput(f"{path}:{number}: expected 'key = value', got {line!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    logger.debug("Loaded %d settings from %s", len(values), path)
    return values
