"""Reference networks with known structure."""

from __future__ import annotations

import numpy as np

from motifcloss.condensation import ModuleSpec
from motifcloss.graph import Digraph

# in/out degree profile of the three roles in a feed-forward loop
FFL_ROLES = ((0, 2), (1, 1), (2, 0))


def planted_ffl_graph(n_ffl: int = 20, n_background: int = 40, seed: int = 7,
                      background_density: float = 0.05) -> Digraph:
    """Disjoint feed-forward loops next to a sparse random background.

    FFL ``i`` occupies nodes ``f{i}a -> f{i}b -> f{i}c`` plus ``f{i}a ->
    f{i}c``. The background ``b0..`` is an Erdos-Renyi digraph without
    reciprocated edges, thinned so that the planted loops are the only
    feed-forward loops in the graph. Each FFL node is tied to the background with one
    extra edge in the direction that keeps its role (sources send, sinks
    receive, middles alternate), so degree-preserving swaps can move FFL
    edges into the background.
    """
    rng = np.random.default_rng(seed)
    labels = []
    edges = set()
    for i in range(n_ffl):
        a, b, c = (len(labels), len(labels) + 1, len(labels) + 2)
        labels += [f"f{i}a", f"f{i}b", f"f{i}c"]
        edges |= {(a, b), (b, c), (a, c)}
    offset = len(labels)
    labels += [f"b{j}" for j in range(n_background)]
    for s in range(n_background):
        for t in range(n_background):
            if s != t and rng.random() < background_density:
                if (offset + t, offset + s) not in edges:
                    edges.add((offset + s, offset + t))
    for i in range(n_ffl):
        for role in range(3):
            node = 3 * i + role
            other = offset + int(rng.integers(n_background))
            sends = role == 0 or (role == 1 and i % 2 == 0)
            e = (node, other) if sends else (other, node)
            if (e[1], e[0]) not in edges:
                edges.add(e)
    planted = {e for i in range(n_ffl)
               for e in ((3 * i, 3 * i + 1), (3 * i + 1, 3 * i + 2), (3 * i, 3 * i + 2))}
    while True:
        stray = _stray_ffl_edge(edges, planted)
        if stray is None:
            break
        edges.discard(stray)
    return Digraph(tuple(labels), frozenset(edges))


def _stray_ffl_edge(edges, planted):
    """An unplanted edge of some feed-forward loop other than the planted ones, or None."""
    out: dict[int, set[int]] = {}
    for s, t in edges:
        out.setdefault(s, set()).add(t)
    for a in sorted(out):
        for b in sorted(out[a]):
            for c in sorted(out.get(b, ())):
                if c != a and c in out[a]:
                    tri = [(a, b), (b, c), (a, c)]
                    free = [e for e in tri if e not in planted]
                    if free:
                        return max(free)
    return None


def random_module_system(rng: np.random.Generator, siso: bool = True, metric="identity",
                         max_modules: int = 5) -> tuple[list[ModuleSpec], dict]:
    """Random modules of 1-4 nodes with signed couplings between them.

    Internals are lower-triangular with an occasional weak back edge; node
    rates in [3, 5) keep every module admissible. With ``siso`` each module
    has one input and one output node, otherwise up to two of each.
    """
    N = int(rng.integers(2, max_modules + 1))
    modules = []
    for k in range(N):
        n = int(rng.integers(1, 5))
        A = np.tril(rng.uniform(0, 1.5, (n, n)) * (rng.random((n, n)) < 0.6), -1)
        if n > 1 and rng.random() < 0.3:
            A[0, n - 1] = rng.uniform(0, 0.3)
        rates = rng.uniform(3.0, 5.0, n)
        ins = int(rng.integers(1, min(n, 2) + 1)) if not siso else 1
        outs = int(rng.integers(1, min(n, 2) + 1)) if not siso else 1
        B = np.zeros((n, ins))
        B[rng.choice(n, ins, replace=False), np.arange(ins)] = 1
        C = np.zeros((outs, n))
        C[np.arange(outs), rng.choice(n, outs, replace=False)] = 1
        modules.append(ModuleSpec.build(A, rates, B, C, metric, name=f"M{k}"))
    blocks = {}
    for i in range(N):
        for j in range(N):
            if i != j and rng.random() < 0.5:
                blocks[(i, j)] = rng.uniform(-1.5, 1.5, (modules[i].B.shape[1], modules[j].C.shape[0]))
    return modules, blocks
