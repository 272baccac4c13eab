from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field

from motifcloss.closs import DEFAULT_A_MAX, DEFAULT_SAMPLES
from motifcloss.graph import DEFAULT_SWAP_FACTOR
from motifcloss.significance import DEFAULT_ENSEMBLE

THREADS_ENV = "MOTIF_CLOSS_THREADS"


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    n: tuple[int, ...] = (3, 4)
    measure: str = "spectral"
    samples: int = DEFAULT_SAMPLES
    ensemble: int = DEFAULT_ENSEMBLE
    a_max: float = DEFAULT_A_MAX
    seed: int = 0
    swap_factor: int = DEFAULT_SWAP_FACTOR
    out: str | None = None
    threads: int | None = None
    format: str = "csv"
    # verify only
    trials: int = 20
    decay: float = 1.5
    gain: float = 0.25
    extra: dict = field(default_factory=dict)

    def resolved_threads(self) -> int:
        """``--threads`` first, then the environment; 0 means one per CPU."""
        t = self.threads
        if t is None:
            t = int(os.environ.get(THREADS_ENV, "1") or 1)
        if t == 0:
            t = os.cpu_count() or 1
        return max(1, t)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["n"] = list(self.n)
        # thread count never changes results, so it is left out of reports
        d.pop("threads")
        d.pop("extra")
        return d
