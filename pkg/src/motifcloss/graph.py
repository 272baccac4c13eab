"""Directed graph container, edge-list I/O, induced subgraphs and the
degree-preserving null model used for motif significance."""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

import numpy as np

from motifcloss import _kernels

log = logging.getLogger(__name__)

DEFAULT_SWAP_FACTOR = 100


class EdgeListError(ValueError):
    """Malformed edge-list input; carries the 1-based line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True, eq=False)
class Digraph:
    """Simple directed graph over string-labelled nodes.

    Edges are ``(source, target)`` index pairs into ``node_labels``. The
    optional ``weights`` map must cover exactly the edge set with strictly
    positive values. Self-loops are never stored.
    """

    node_labels: tuple[str, ...]
    edges: frozenset[tuple[int, int]]
    weights: dict[tuple[int, int], float] | None = None
    # bookkeeping from ingestion / randomization, not part of identity
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        n = len(self.node_labels)
        if len(set(self.node_labels)) != n:
            raise ValueError("duplicate node labels")
        for s, t in self.edges:
            if not (0 <= s < n and 0 <= t < n):
                raise ValueError(f"edge ({s}, {t}) out of range")
            if s == t:
                raise ValueError(f"self-loop on node {self.node_labels[s]!r}")
        if self.weights is not None:
            if set(self.weights) != set(self.edges):
                raise ValueError("weights must cover exactly the edge set")
            bad = [e for e, w in self.weights.items() if not (np.isfinite(w) and w > 0)]
            if bad:
                raise ValueError(f"non-positive weight on edge {bad[0]}")

    @classmethod
    def from_edges(cls, labels: Sequence[str], edges: Iterable[tuple[int, int]],
                   weights: dict | None = None) -> "Digraph":
        return cls(tuple(labels), frozenset(edges), weights)

    @classmethod
    def from_labelled_edges(cls, pairs: Iterable[tuple[str, str]]) -> "Digraph":
        """Build from ``(source_label, target_label)`` pairs; first-appearance node order."""
        index: dict[str, int] = {}
        edges = set()
        for s, t in pairs:
            for x in (s, t):
                if x not in index:
                    index[x] = len(index)
            if s != t:
                edges.add((index[s], index[t]))
        return cls(tuple(index), frozenset(edges))

    @property
    def n(self) -> int:
        return len(self.node_labels)

    @property
    def m(self) -> int:
        return len(self.edges)

    def __eq__(self, other):
        if not isinstance(other, Digraph):
            return NotImplemented
        return (self.node_labels == other.node_labels and self.edges == other.edges
                and self.weights == other.weights)

    def __hash__(self):
        return hash((self.node_labels, self.edges))

    def __repr__(self):
        return f"Digraph(n={self.n}, m={self.m})"

    def index_of(self, label: str) -> int:
        try:
            return self.node_labels.index(label)
        except ValueError:
            raise KeyError(f"unknown node {label!r}") from None

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def labelled_edges(self) -> set[tuple[str, str]]:
        lab = self.node_labels
        return {(lab[s], lab[t]) for s, t in self.edges}

    def adjacency(self) -> np.ndarray:
        """Boolean adjacency, ``adj[s, t]`` true for an edge s -> t."""
        adj = np.zeros((self.n, self.n), dtype=bool)
        if self.edges:
            e = np.array(self.sorted_edges())
            adj[e[:, 0], e[:, 1]] = True
        return adj

    def interconnection_matrix(self) -> np.ndarray:
        """Weighted interconnection matrix with ``A[t, s] = w(s -> t)``.

        Row index is the receiving node so that ``u = A y`` feeds node t's
        input from node s's output. Unweighted edges count as 1.
        """
        A = np.zeros((self.n, self.n))
        for s, t in self.edges:
            A[t, s] = 1.0 if self.weights is None else self.weights[(s, t)]
        return A

    def degree_signature(self) -> "DegreeSignature":
        return DegreeSignature.of(self)

    def relabel(self, mapping: dict[str, str]) -> "Digraph":
        """Rename nodes; node order and edge indices are unchanged."""
        labels = tuple(mapping.get(x, x) for x in self.node_labels)
        return Digraph(labels, self.edges, self.weights)


@dataclass(frozen=True)
class DegreeSignature:
    in_degree: tuple[int, ...]
    out_degree: tuple[int, ...]
    mutual: tuple[int, ...]

    @classmethod
    def of(cls, g: Digraph) -> "DegreeSignature":
        n = g.n
        din, dout, mut = [0] * n, [0] * n, [0] * n
        for s, t in g.edges:
            dout[s] += 1
            din[t] += 1
            if (t, s) in g.edges:
                mut[s] += 1
        return cls(tuple(din), tuple(dout), tuple(mut))


def load_edge_list(text: str | TextIO) -> Digraph:
    """Parse ``source target [weight]`` lines into a :class:`Digraph`.

    ``#`` starts a comment line; blank lines are skipped. Self-loops are
    dropped and duplicate edges collapse to their first occurrence; both are
    counted in ``g.meta``. Weights are all-or-nothing: either every edge line
    carries one or none does.
    """
    if not isinstance(text, str):
        text = text.read()
    index: dict[str, int] = {}
    edges: list[tuple[int, int]] = []
    weights: dict[tuple[int, int], float] = {}
    seen = set()
    n_self = n_dup = 0
    has_weight = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        if len(tok) not in (2, 3):
            raise EdgeListError(lineno, f"expected 'source target [weight]', got {len(tok)} tokens")
        w = None
        if len(tok) == 3:
            try:
                w = float(tok[2])
            except ValueError:
                raise EdgeListError(lineno, f"non-numeric weight {tok[2]!r}") from None
            if not np.isfinite(w) or w <= 0:
                raise EdgeListError(lineno, f"weight must be positive, got {tok[2]}")
        if has_weight is None:
            has_weight = w is not None
        elif has_weight != (w is not None):
            raise EdgeListError(lineno, "mixed weighted and unweighted edge lines")
        s_lab, t_lab = tok[0], tok[1]
        for x in (s_lab, t_lab):
            if x not in index:
                index[x] = len(index)
        if s_lab == t_lab:
            n_self += 1
            continue
        e = (index[s_lab], index[t_lab])
        if e in seen:
            n_dup += 1
            continue
        seen.add(e)
        edges.append(e)
        if w is not None:
            weights[e] = w
    if n_self:
        log.warning("dropped %d self-loop(s)", n_self)
    if n_dup:
        log.warning("collapsed %d duplicate edge(s), keeping the first weight", n_dup)
    g = Digraph(tuple(index), frozenset(edges), weights if has_weight else None)
    g.meta.update(self_loops_dropped=n_self, duplicates_collapsed=n_dup)
    return g


def read_edge_list(path) -> Digraph:
    with open(path, encoding="utf-8", newline="") as fh:
        return load_edge_list(fh.read())


def dump_edge_list(g: Digraph) -> str:
    """Serialize with edges sorted by (source label, target label)."""
    lab = g.node_labels
    rows = sorted(g.edges, key=lambda e: (lab[e[0]], lab[e[1]]))
    out = io.StringIO()
    for s, t in rows:
        if g.weights is None:
            out.write(f"{lab[s]} {lab[t]}\n")
        else:
            out.write(f"{lab[s]} {lab[t]} {g.weights[(s, t)]!r}\n")
    return out.getvalue()


def induced_subgraph(g: Digraph, nodes: Sequence[str]) -> Digraph:
    """Subgraph on ``nodes`` (labels, in the given order) with every edge of g among them."""
    if len(set(nodes)) != len(nodes):
        raise ValueError("duplicate nodes in subset")
    old = [g.index_of(x) for x in nodes]
    new_of = {o: i for i, o in enumerate(old)}
    edges = {(new_of[s], new_of[t]) for s, t in g.edges if s in new_of and t in new_of}
    weights = None
    if g.weights is not None:
        weights = {(new_of[s], new_of[t]): w for (s, t), w in g.weights.items()
                   if s in new_of and t in new_of}
    return Digraph(tuple(nodes), frozenset(edges), weights)


def randomize(g: Digraph, seed, swap_factor: int = DEFAULT_SWAP_FACTOR) -> Digraph:
    """Degree-preserving randomization by directed double-edge swaps.

    Single (non-reciprocated) edges are swapped only with single edges and
    mutual pairs only with mutual pairs, so every node keeps its in-degree,
    out-degree and number of mutual partners. ``swap_factor * m`` swaps are
    attempted; swaps that would create a self-loop, a duplicate edge or a new
    reciprocation are rejected. Weights are dropped.

    The result carries ``meta['unswappable']`` when no pair of edges could be
    exchanged at all, and ``meta['accepted']`` with the number of swaps made.
    """
    if swap_factor < 1:
        raise ValueError("swap_factor must be a positive integer")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    adj, accepted = randomized_adjacency(g, rng, swap_factor)
    edges = frozenset(map(tuple, np.argwhere(adj).tolist()))
    out = Digraph(g.node_labels, edges)
    out.meta.update(unswappable=accepted is None, accepted=accepted or 0)
    return out


def randomized_adjacency(g: Digraph, rng: np.random.Generator,
                         swap_factor: int = DEFAULT_SWAP_FACTOR) -> tuple[np.ndarray, int | None]:
    """Swap kernel behind :func:`randomize`; returns (adjacency, accepted swaps).

    ``accepted`` is None when the graph has no swappable pair.
    """
    single, mutual = _split_edges(g)
    adj = g.adjacency()
    if len(single) < 2 and len(mutual) < 2:
        return adj, None
    n_attempts = swap_factor * g.m
    single_arr = np.array(single, dtype=np.int64).reshape(-1, 2)
    mutual_arr = np.array(mutual, dtype=np.int64).reshape(-1, 2)
    # Attempts are split between the two edge groups in proportion to the
    # number of edges they hold; mutual pairs count twice.
    kinds = rng.random(n_attempts) < (2 * len(mutual) / g.m)
    picks = rng.random((n_attempts, 3))
    accepted = _kernels.swap_edges(adj, single_arr, mutual_arr, kinds, picks)
    return adj, int(accepted)


def _split_edges(g: Digraph) -> tuple[list, list]:
    single, mutual = [], []
    for s, t in g.sorted_edges():
        if (t, s) in g.edges:
            if s < t:
                mutual.append((s, t))
        else:
            single.append((s, t))
    return single, mutual
