"""Per-phase wall-clock timer used for the pipeline's timing report."""

import time
from contextlib import contextmanager
from typing import Dict, Iterator, Optional


class PhaseTimer:
    """Accumulates elapsed seconds per named phase."""

    def __init__(self) -> None:
        self._elapsed: Dict[str, float] = {}
        self._start_tick: Optional[float] = None
        self._current: Optional[str] = None

    def start(self, phase: str) -> None:
        if self._current is not None:
            self.stop()
        self._current = phase
        self._start_tick = time.perf_counter()

    def stop(self) -> float:
        """Close the running phase and return its elapsed seconds."""
        if self._current is None or self._start_tick is None:
            return 0.0
        elapsed = time.perf_counter() - self._start_tick
        self._elapsed[self._current] = self._elapsed.get(self._current, 0.0) + elapsed
        self._current = None
        self._start_tick = None
        return elapsed

    @contextmanager
    def phase(self, name: str) -> Iterator[None]:
        self.start(name)
        try:
            yield
        finally:
            self.stop()

    def get(self) -> Dict[str, float]:
        """Return a copy of the accumulated timings."""
        return dict(self._elapsed)
