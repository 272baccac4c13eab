"""Isomorphism classes of connected 3- and 4-node digraphs and induced-subgraph census.

Bitmask encoding: for an n-node digraph the edge i -> j (i != j) sets bit
``i*(n-1) + (j if j < i else j-1)``, i.e. row-major adjacency with the
diagonal skipped, least significant bit first. The canonical form of a class
is the smallest mask over all n! node permutations.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np

from motifcloss import _kernels
from motifcloss.graph import Digraph

DEFAULT_OCCURRENCE_CAP = 10**6


def bit_position(i: int, j: int, n: int) -> int:
    return i * (n - 1) + (j if j < i else j - 1)


def mask_from_edges(edges, n: int) -> int:
    mask = 0
    for i, j in edges:
        if i == j:
            raise ValueError("self-loops have no bit")
        mask |= 1 << bit_position(i, j, n)
    return mask


def edges_from_mask(mask: int, n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(n)
            if i != j and mask >> bit_position(i, j, n) & 1]


def adjacency_from_mask(mask: int, n: int) -> np.ndarray:
    adj = np.zeros((n, n), dtype=bool)
    for i, j in edges_from_mask(mask, n):
        adj[i, j] = True
    return adj


@lru_cache(maxsize=None)
def _permutation_tables(n: int) -> np.ndarray:
    """``tab[p, b]`` is the bit that bit b moves to under permutation p."""
    perms = list(itertools.permutations(range(n)))
    tab = np.zeros((len(perms), n * (n - 1)), dtype=np.int64)
    for p, perm in enumerate(perms):
        for i in range(n):
            for j in range(n):
                if i != j:
                    tab[p, bit_position(i, j, n)] = bit_position(perm[i], perm[j], n)
    return tab


@lru_cache(maxsize=None)
def _canon_table(n: int) -> np.ndarray:
    """Canonical mask for every mask on n nodes (vectorized min over permutations)."""
    nbits = n * (n - 1)
    masks = np.arange(1 << nbits, dtype=np.int64)
    bits = (masks[:, None] >> np.arange(nbits)) & 1
    best = np.full(masks.shape, np.iinfo(np.int64).max)
    for row in _permutation_tables(n):
        permuted = (bits << row).sum(axis=1)
        np.minimum(best, permuted, out=best)
    return best


def is_weakly_connected(mask: int, n: int) -> bool:
    adj = adjacency_from_mask(mask, n)
    und = adj | adj.T
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for u in np.flatnonzero(und[v]):
            if u not in seen:
                seen.add(int(u))
                stack.append(int(u))
    return len(seen) == n


def is_acyclic(mask: int, n: int) -> bool:
    adj = adjacency_from_mask(mask, n).astype(np.int64)
    # nilpotent adjacency <=> no directed cycle
    return not np.any(np.linalg.matrix_power(adj, n))


@dataclass(frozen=True, order=True)
class SubgraphClass:
    """Canonical isomorphism class; ordering is by (n, m, canon_bits)."""

    n: int
    m: int
    canon_bits: int
    motif_catalog_id: str | None = field(default=None, compare=False)
    name: str | None = field(default=None, compare=False)

    @property
    def class_id(self) -> str:
        return format(self.canon_bits, "x")

    @property
    def density_class(self) -> tuple[int, int]:
        return (self.n, self.m)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return edges_from_mask(self.canon_bits, self.n)

    def adjacency(self) -> np.ndarray:
        return adjacency_from_mask(self.canon_bits, self.n)

    @property
    def connected(self) -> bool:
        return is_weakly_connected(self.canon_bits, self.n)

    @property
    def acyclic(self) -> bool:
        return is_acyclic(self.canon_bits, self.n)

    @property
    def label(self) -> str:
        return self.motif_catalog_id or self.name or f"{self.n}:{self.class_id}"


@lru_cache(maxsize=1)
def motif_catalog() -> dict:
    """Load the bundled catalog and key its entries by (n, canonical mask)."""
    raw = json.loads(resources.files("motifcloss").joinpath("data/motif_catalog.json").read_text())
    table = {}
    for entry in raw["motifs"] + raw["triads"]:
        n = entry["n"]
        canon = int(_canon_table(n)[mask_from_edges(entry["edges"], n)])
        if "canon_bits" in entry and int(entry["canon_bits"], 16) != canon:
            raise ValueError(f"catalog entry {entry.get('id', entry['name'])} has stale canon_bits")
        rec = table.setdefault((n, canon), {})
        if "id" in entry:
            rec["id"] = entry["id"]
            rec["motif_name"] = entry["name"]
        else:
            rec["name"] = entry["name"]
    return {"version": raw["version"], "classes": table}


def canonical_form(mask: int, n: int) -> SubgraphClass:
    if n not in (3, 4):
        raise ValueError(f"unsupported subgraph size {n}; use 3 or 4")
    if not 0 <= mask < 1 << (n * (n - 1)):
        raise ValueError(f"mask {mask:#x} out of range for n={n}")
    canon = int(_canon_table(n)[mask])
    info = motif_catalog()["classes"].get((n, canon), {})
    name = info.get("motif_name") or info.get("name")
    return SubgraphClass(n, bin(canon).count("1"), canon, info.get("id"), name)


@lru_cache(maxsize=None)
def enumerate_classes(n: int) -> tuple[SubgraphClass, ...]:
    """All weakly connected classes on n nodes, sorted by (m, canon_bits)."""
    if n not in (3, 4):
        raise ValueError(f"unsupported subgraph size {n}; use 3 or 4")
    canon = np.unique(_canon_table(n))
    out = [canonical_form(int(c), n) for c in canon if is_weakly_connected(int(c), n)]
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def class_lookup(n: int) -> np.ndarray:
    """Map every mask to the index of its class in enumerate_classes(n), -1 if disconnected."""
    index = {c.canon_bits: i for i, c in enumerate(enumerate_classes(n))}
    return np.array([index.get(int(c), -1) for c in _canon_table(n)], dtype=np.int64)


def density_classes(n: int) -> dict[tuple[int, int], list[SubgraphClass]]:
    groups: dict[tuple[int, int], list[SubgraphClass]] = {}
    for c in enumerate_classes(n):
        groups.setdefault(c.density_class, []).append(c)
    return groups


def class_by_id(n: int, ident: str) -> SubgraphClass:
    """Look up a class by catalog id (``M2``), catalog name or hex class id."""
    for c in enumerate_classes(n):
        if ident in (c.motif_catalog_id, c.name, c.class_id):
            return c
    raise KeyError(f"no {n}-node class {ident!r}")


@dataclass
class CensusResult:
    n: int
    counts: dict[SubgraphClass, int]
    occurrences: dict[SubgraphClass, list[tuple[int, ...]]]
    truncated: set[SubgraphClass] = field(default_factory=set)

    def count(self, cls: SubgraphClass) -> int:
        return self.counts.get(cls, 0)

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def census_counts(g: Digraph, n: int) -> np.ndarray:
    """Counts aligned with enumerate_classes(n); no occurrence bookkeeping."""
    classes = enumerate_classes(n)
    if g.n < n:
        return np.zeros(len(classes), dtype=np.int64)
    return _kernels.count_subgraphs(g.adjacency(), n, class_lookup(n), len(classes))


def census_counts_adj(adj: np.ndarray, n: int) -> np.ndarray:
    classes = enumerate_classes(n)
    if adj.shape[0] < n:
        return np.zeros(len(classes), dtype=np.int64)
    return _kernels.count_subgraphs(adj, n, class_lookup(n), len(classes))


def census(g: Digraph, n: int, cap: int = DEFAULT_OCCURRENCE_CAP) -> CensusResult:
    """Count every connected induced n-node subgraph of g once per node subset.

    Occurrences are kept as sorted node-index tuples, at most ``cap`` per
    class; classes that hit the cap are listed in ``truncated``.
    """
    if n not in (3, 4):
        raise ValueError(f"unsupported subgraph size {n}; use 3 or 4")
    classes = enumerate_classes(n)
    if g.n < n:
        return CensusResult(n, {}, {})
    counts, occ = _kernels.enumerate_subgraphs(g.adjacency(), n, class_lookup(n), len(classes), cap)
    result = CensusResult(n, {}, {})
    order = np.lexsort(np.sort(occ[:, :n], axis=1).T[::-1]) if len(occ) else []
    occ = occ[order] if len(occ) else occ
    for row in occ:
        cls = classes[row[n]]
        result.occurrences.setdefault(cls, []).append(tuple(sorted(int(x) for x in row[:n])))
    for i, c in enumerate(counts):
        if c:
            result.counts[classes[i]] = int(c)
            if c > cap:
                result.truncated.add(classes[i])
    return result


def census_csv(result: CensusResult) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["class_id", "n", "m", "count"])
    for cls in sorted(result.counts):
        w.writerow([cls.class_id, cls.n, cls.m, result.counts[cls]])
    return out.getvalue()
