"""Motif significance against degree-preserving randomizations: Z-scores,
empirical P-values, uniqueness, M-factor and significance profiles."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps

from motifcloss.census import SubgraphClass, census, census_counts_adj, enumerate_classes
from motifcloss.closs import RelativeCloss
from motifcloss.graph import DEFAULT_SWAP_FACTOR, Digraph, randomized_adjacency

DEFAULT_ENSEMBLE = 1000
P_THRESHOLD = 0.01
MIN_UNIQUENESS = 4
MIN_M_FACTOR = 1.1


class DegreeSignatureError(AssertionError):
    pass


@dataclass(frozen=True)
class MotifStats:
    cls: SubgraphClass
    n_real: int
    mean_rand: float
    std_rand: float
    z: float | None
    p_value: float
    tail: str
    uniqueness: int
    m_factor: float
    p_over: float = field(repr=False, default=1.0)
    p_under: float = field(repr=False, default=1.0)

    @property
    def z_defined(self) -> bool:
        return self.z is not None

    @property
    def verdict(self) -> str:
        # recomputed from the fields every time, never cached
        if self.z is None:
            return "neither"
        if (self.z > 0 and self.p_over < P_THRESHOLD and self.uniqueness >= MIN_UNIQUENESS
                and self.m_factor >= MIN_M_FACTOR):
            return "motif"
        if self.z < 0 and self.p_under < P_THRESHOLD and self.m_factor <= 1 / MIN_M_FACTOR:
            return "anti-motif"
        return "neither"


def greedy_disjoint(occurrences, order=None) -> list[tuple[int, ...]]:
    """Pairwise node-disjoint occurrences, picked greedily in the given order."""
    used: set[int] = set()
    picked = []
    for occ in (occurrences if order is None else (occurrences[i] for i in order)):
        if used.isdisjoint(occ):
            picked.append(occ)
            used.update(occ)
    return picked


def uniqueness(occurrences) -> int:
    return len(greedy_disjoint(sorted(occurrences)))


def _check_signature(adj: np.ndarray, ref: tuple[np.ndarray, np.ndarray, np.ndarray]):
    sig = (adj.sum(axis=0), adj.sum(axis=1), (adj & adj.T).sum(axis=1))
    for got, want, name in zip(sig, ref, ("in-degree", "out-degree", "mutual count")):
        if not np.array_equal(got, want):
            raise DegreeSignatureError(f"randomization changed the {name} sequence")


def ensemble_counts(g: Digraph, sizes=(3,), ensemble_size: int = DEFAULT_ENSEMBLE, seed: int = 0,
                    swap_factor: int = DEFAULT_SWAP_FACTOR, threads: int = 1) -> dict[int, np.ndarray]:
    """Census counts of every randomization, ``{n: array (ensemble_size, n_classes)}``.

    Member k is randomized from its own stream keyed by (seed, k); each
    member is checked to keep the degree signature of g.
    """
    adj0 = g.adjacency()
    ref = (adj0.sum(axis=0), adj0.sum(axis=1), (adj0 & adj0.T).sum(axis=1))

    def member(k):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(k,)))
        adj, _ = randomized_adjacency(g, rng, swap_factor)
        _check_signature(adj, ref)
        return [census_counts_adj(adj, n) for n in sizes]

    if threads and threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            rows = list(pool.map(member, range(ensemble_size)))
    else:
        rows = [member(k) for k in range(ensemble_size)]
    out = {}
    for i, n in enumerate(sizes):
        out[n] = (np.array([r[i] for r in rows], dtype=np.int64) if rows
                  else np.zeros((0, len(enumerate_classes(n))), dtype=np.int64))
    return out


def _stats_for(cls, n_real, rand, occ) -> MotifStats:
    E = len(rand)
    mean = float(rand.mean())
    std = float(rand.std(ddof=1))
    if std > 0:
        z = (n_real - mean) / std
    elif n_real == mean:
        z = 0.0
    else:
        z = None
    p_over = (1 + int(np.sum(rand >= n_real))) / (1 + E)
    p_under = (1 + int(np.sum(rand <= n_real))) / (1 + E)
    tail = "over" if p_over <= p_under else "under"
    if mean > 0:
        mf = n_real / mean
    else:
        mf = math.inf if n_real > 0 else 0.0
    return MotifStats(cls, n_real, mean, std, z, min(p_over, p_under), tail,
                      uniqueness(occ) if occ else 0, mf, p_over, p_under)


def zscores_multi(g: Digraph, sizes=(3, 4), ensemble_size: int = DEFAULT_ENSEMBLE, seed: int = 0,
                  swap_factor: int = DEFAULT_SWAP_FACTOR, threads: int = 1,
                  cap: int | None = None) -> dict[int, list[MotifStats]]:
    """Significance of every class of each size, sharing one randomization ensemble."""
    if ensemble_size < 2:
        raise ValueError("ensemble_size must be >= 2")
    real = {n: (census(g, n) if cap is None else census(g, n, cap)) for n in sizes}
    rand = ensemble_counts(g, sizes, ensemble_size, seed, swap_factor, threads)
    out = {}
    for n in sizes:
        rows = []
        for i, cls in enumerate(enumerate_classes(n)):
            n_real = real[n].count(cls)
            col = rand[n][:, i]
            if n_real == 0 and not col.any():
                continue
            rows.append(_stats_for(cls, n_real, col, real[n].occurrences.get(cls, [])))
        out[n] = rows
    return out


def zscores(g: Digraph, n: int, ensemble_size: int = DEFAULT_ENSEMBLE, seed: int = 0,
            swap_factor: int = DEFAULT_SWAP_FACTOR, threads: int = 1) -> list[MotifStats]:
    """Per-class :class:`MotifStats` for n-node subgraphs of g; absent classes omitted.

    P-values use add-one smoothing, ``(1 + #{N_rand >= N_real}) / (1 + E)``
    for over-representation and the mirrored count for under-representation;
    the smaller tail is reported. ``std_rand`` is the sample standard
    deviation. Z is 0 when every randomization reproduces N_real exactly and
    undefined (None) when the ensemble has no spread but differs from N_real.
    """
    return zscores_multi(g, (n,), ensemble_size, seed, swap_factor, threads)[n]


@dataclass(frozen=True)
class SignificanceProfile:
    n: int
    classes: tuple[SubgraphClass, ...]
    values: np.ndarray
    all_zero: bool

    def value(self, cls: SubgraphClass) -> float:
        return float(self.values[self.classes.index(cls)])


def significance_profile(stats: list[MotifStats], n: int | None = None) -> SignificanceProfile:
    """Z vector over all n-node classes scaled to unit Euclidean length."""
    sizes = {s.cls.n for s in stats}
    if len(sizes) > 1:
        raise ValueError("stats mix subgraph sizes")
    if n is None:
        if not sizes:
            raise ValueError("cannot infer n from empty stats")
        n = sizes.pop()
    elif sizes and sizes != {n}:
        raise ValueError(f"stats are for n={sizes.pop()}, not {n}")
    classes = enumerate_classes(n)
    z = {s.cls: s.z for s in stats}
    vec = np.array([z.get(c) or 0.0 for c in classes], dtype=float)
    norm = float(np.sqrt(np.sum(vec ** 2)))
    if norm == 0:
        return SignificanceProfile(n, classes, vec, True)
    return SignificanceProfile(n, classes, vec / norm, False)


@dataclass
class ZClossJoin:
    rows: list[tuple[SubgraphClass, float, float]]
    pearson: float | None
    spearman: float | None


def zscore_vs_closs(stats: list[MotifStats], relative: dict[SubgraphClass, RelativeCloss],
                    n: int | None = None) -> ZClossJoin:
    """Pair normalized Z with relative contraction loss.

    Rows are kept for classes with both a defined Z and a defined r;
    correlations are None when fewer than two rows remain or either
    coordinate is constant.
    """
    if not stats:
        return ZClossJoin([], None, None)
    prof = significance_profile(stats, n)
    rows = []
    for s in sorted(stats, key=lambda s: s.cls):
        rc = relative.get(s.cls)
        if s.z is None or rc is None or rc.r is None:
            continue
        rows.append((s.cls, prof.value(s.cls), rc.r))
    pear = spear = None
    if len(rows) >= 2:
        x = np.array([r[1] for r in rows])
        y = np.array([r[2] for r in rows])
        if np.ptp(x) > 0 and np.ptp(y) > 0:
            pear = float(sps.pearsonr(x, y)[0])
            spear = float(sps.spearmanr(x, y)[0])
    return ZClossJoin(rows, pear, spear)


def _fmt(x) -> str:
    if x is None:
        return "undefined"
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return repr(float(x))


def motifs_csv(stats: list[MotifStats], relative: dict[SubgraphClass, RelativeCloss] | None = None) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["class_id", "n", "m", "N_real", "mean_rand", "std_rand", "Z", "Z_normalized",
                "p_value", "uniqueness", "m_factor", "verdict", "r"])
    by_n: dict[int, list[MotifStats]] = {}
    for s in stats:
        by_n.setdefault(s.cls.n, []).append(s)
    for n in sorted(by_n):
        prof = significance_profile(by_n[n], n)
        for s in sorted(by_n[n], key=lambda s: s.cls):
            rc = (relative or {}).get(s.cls)
            w.writerow([s.cls.class_id, s.cls.n, s.cls.m, s.n_real, _fmt(s.mean_rand),
                        _fmt(s.std_rand), _fmt(s.z), _fmt(prof.value(s.cls)), _fmt(s.p_value),
                        s.uniqueness, _fmt(s.m_factor), s.verdict,
                        "" if rc is None else _fmt(rc.r)])
    return out.getvalue()
