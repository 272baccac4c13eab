"""Monte-Carlo contraction loss of subgraph classes and its relative value
within density classes."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from motifcloss.census import SubgraphClass, enumerate_classes
from motifcloss.measures import SPECTRAL, MeasureKind, mu

DEFAULT_SAMPLES = 10_000
DEFAULT_A_MAX = 1.0
UNDEFINED_SPREAD = 1e-3
CHUNK = 2048


def class_pattern(cls: SubgraphClass) -> tuple[np.ndarray, np.ndarray]:
    """Row/column indices of the interconnection entries, ``A[t, s]`` for edge s -> t."""
    edges = cls.edges
    rows = np.array([t for _, t in edges], dtype=np.intp)
    cols = np.array([s for s, _ in edges], dtype=np.intp)
    return rows, cols


def sample_weights(cls: SubgraphClass, a_max: float, rng: np.random.Generator, size: int | None = None):
    """Random interconnection matrix (or stack of ``size``) with the class pattern.

    Nonzero entries are i.i.d. uniform on ``(0, a_max]``, placed at
    ``A[t, s]`` for each class edge s -> t in canonical node order.
    """
    if not a_max > 0:
        raise ValueError("a_max must be positive")
    rows, cols = class_pattern(cls)
    shape = (cls.m,) if size is None else (size, cls.m)
    u = 1.0 - rng.random(shape)
    A = np.zeros(shape[:-1] + (cls.n, cls.n))
    A[..., rows, cols] = a_max * u
    return A


def _chunk_rng(seed: int, cls: SubgraphClass, chunk: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(cls.n, cls.canon_bits, chunk))
    return np.random.default_rng(ss)


@dataclass(frozen=True)
class ClossStats:
    cls: SubgraphClass
    measure: str
    a_max: float
    samples: int
    mean: float
    std: float
    seed: int


def _unit_values(cls, kind, samples, seed, threads):
    bounds = [(k, min(CHUNK, samples - k * CHUNK)) for k in range(-(-samples // CHUNK))]

    def run(chunk):
        k, size = chunk
        A = sample_weights(cls, 1.0, _chunk_rng(seed, cls, k), size=size)
        return np.asarray(mu(kind, A), dtype=float)

    if threads and threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(run, bounds))
    else:
        parts = [run(b) for b in bounds]
    return np.concatenate(parts)


def mean_closs(cls: SubgraphClass, measure=SPECTRAL, samples: int = DEFAULT_SAMPLES,
               a_max: float = DEFAULT_A_MAX, seed: int = 0, threads: int = 1) -> ClossStats:
    """Mean and sample standard deviation of the measure over random weightings.

    Draws are generated in fixed chunks, each from its own stream keyed by
    (seed, class, chunk index), so results do not depend on ``threads``.
    The measure is evaluated on the unit-scale draws and rescaled by
    ``a_max`` (every measure is positively homogeneous), which makes the
    a_max dependence exact.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if not a_max > 0:
        raise ValueError("a_max must be positive")
    kind = MeasureKind.parse(measure)
    vals = _unit_values(cls, kind, samples, seed, threads)
    mean = float(np.mean(vals))
    std = float(np.std(vals, ddof=1)) if samples > 1 else 0.0
    return ClossStats(cls, kind.tag, float(a_max), samples, a_max * mean, a_max * std, seed)


@dataclass(frozen=True)
class RelativeCloss:
    cls: SubgraphClass
    r: float | None
    mu_min: float
    mu_max: float

    @property
    def defined(self) -> bool:
        return self.r is not None


def relative_closs(stats: list[ClossStats]) -> list[RelativeCloss]:
    """Min-max normalized mean within one density class.

    Undefined (``r is None``) for every member when the spread of means,
    expressed at unit weight scale, is below 1e-3.
    """
    if not stats:
        return []
    ref = stats[0]
    for s in stats:
        if s.cls.density_class != ref.cls.density_class:
            raise ValueError(f"mixed density classes {ref.cls.density_class} and {s.cls.density_class}")
        if (s.measure, s.a_max, s.samples) != (ref.measure, ref.a_max, ref.samples):
            raise ValueError("stats differ in measure, a_max or sample count")
    means = [s.mean for s in stats]
    lo, hi = min(means), max(means)
    if (hi - lo) / ref.a_max < UNDEFINED_SPREAD:
        return [RelativeCloss(s.cls, None, lo, hi) for s in stats]
    return [RelativeCloss(s.cls, (s.mean - lo) / (hi - lo), lo, hi) for s in stats]


@dataclass
class ClossTable:
    stats: list[ClossStats]
    relative: dict[SubgraphClass, RelativeCloss]

    def for_class(self, cls: SubgraphClass) -> ClossStats:
        for s in self.stats:
            if s.cls == cls:
                return s
        raise KeyError(cls)

    def minimal_classes(self) -> dict[tuple[int, int], set[SubgraphClass]]:
        """Classes attaining the smallest mean in each density class."""
        groups: dict[tuple[int, int], list[ClossStats]] = {}
        for s in self.stats:
            groups.setdefault(s.cls.density_class, []).append(s)
        return {dc: {s.cls for s in g if s.mean == min(x.mean for x in g)} for dc, g in groups.items()}

    def rows(self) -> list[ClossStats]:
        return sorted(self.stats, key=lambda s: (s.cls.n, s.cls.m, s.mean, s.cls.canon_bits))


def closs_table(n: int | tuple[int, ...] = (3, 4), measure=SPECTRAL, samples: int = DEFAULT_SAMPLES,
                a_max: float = DEFAULT_A_MAX, seed: int = 0, threads: int = 1) -> ClossTable:
    sizes = (n,) if isinstance(n, int) else tuple(n)
    classes = [c for k in sizes for c in enumerate_classes(k)]

    def run(c):
        return mean_closs(c, measure, samples, a_max, seed)

    if threads and threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            stats = list(pool.map(run, classes))
    else:
        stats = [run(c) for c in classes]
    groups: dict[tuple[int, int], list[ClossStats]] = {}
    for s in stats:
        groups.setdefault(s.cls.density_class, []).append(s)
    relative = {}
    for g in groups.values():
        for rc in relative_closs(g):
            relative[rc.cls] = rc
    return ClossTable(stats, relative)


def _fmt(x: float) -> str:
    return repr(float(x))


def closs_csv(table: ClossTable) -> str:
    """One row per class ordered by (n, m, mean); ``rank`` is 1-based within the density class."""
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["class_id", "n", "m", "measure", "a_max", "samples", "mean", "std", "r", "rank",
                "minimal", "motif_catalog_id"])
    minimal = table.minimal_classes()
    rank: dict[tuple[int, int], int] = {}
    for s in table.rows():
        dc = s.cls.density_class
        rank[dc] = rank.get(dc, 0) + 1
        rc = table.relative[s.cls]
        w.writerow([s.cls.class_id, s.cls.n, s.cls.m, s.measure, _fmt(s.a_max), s.samples,
                    _fmt(s.mean), _fmt(s.std), "undefined" if rc.r is None else _fmt(rc.r),
                    rank[dc], int(s.cls in minimal[dc]), s.cls.motif_catalog_id or ""])
    return out.getvalue()
