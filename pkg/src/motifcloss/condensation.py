"""Module condensation: contraction rates of modules, the condensed coupling
matrix, the resulting contraction verdict, and recursive motif condensation
of empirical networks."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from motifcloss.census import SubgraphClass, census
from motifcloss.closs import RelativeCloss
from motifcloss.dynamics import TestNode, fit_rate, max_step, simulate
from motifcloss.graph import DEFAULT_SWAP_FACTOR, Digraph, dump_edge_list
from motifcloss.measures import Metric, MeasureKind, induced_norm, metric_for, mu, spectral_abscissa
from motifcloss.significance import DEFAULT_ENSEMBLE, zscores_multi

log = logging.getLogger(__name__)

BIN_EDGES = (0.2, 0.4, 0.6, 0.8)
BIN_NAMES = ("low", "low-medium", "medium", "medium-high", "high")


def module_rate(node_rates, A_internal, measure="spectral") -> float:
    """Contraction rate left to a module: slowest node rate minus the internal loss."""
    rates = np.asarray(node_rates, dtype=float)
    if rates.size == 0 or np.any(rates <= 0):
        raise ValueError("node rates must be positive")
    A = np.asarray(A_internal, dtype=float).reshape(rates.size, rates.size)
    return float(rates.min() - mu(measure, A))


def _selection(M, name):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if not np.all((M == 0) | (M == 1)):
        raise ValueError(f"{name} must be a 0/1 selection matrix")
    return M


@dataclass(eq=False)
class ModuleSpec:
    """A module: internal coupling, node rates, input/output selections and metric.

    ``rate`` is ``min(node_rates) - mu(weighted_two(metric), A)``, i.e. the
    internal loss is taken in the same metric that the condensed couplings
    use, so the two stay consistent.
    """

    A: np.ndarray
    node_rates: np.ndarray
    B: np.ndarray
    C: np.ndarray
    metric: Metric
    rate: float
    name: str = ""

    @classmethod
    def build(cls, A, node_rates, B, C, metric="identity", epsilon: float = 1e-6,
              name: str = "") -> "ModuleSpec":
        """``metric`` is ``"identity"``, ``"optimal"`` (from :func:`metric_for`) or a Metric."""
        rates = np.asarray(node_rates, dtype=float).ravel()
        n = rates.size
        A = np.asarray(A, dtype=float).reshape(n, n)
        B = _selection(B, "B").reshape(n, -1)
        C = _selection(C, "C").reshape(-1, n)
        if np.any(B.sum(axis=0) > 1) or np.any(C.sum(axis=1) > 1):
            raise ValueError("each input/output must select a single node")
        if isinstance(metric, Metric):
            P = metric
        elif metric == "identity":
            P = Metric.identity(n)
        elif metric == "optimal":
            P = metric_for(A, epsilon)
        else:
            raise ValueError(f"unknown metric choice {metric!r}")
        rate = float(rates.min() - mu(MeasureKind("weighted_two", P), A))
        return cls(A, rates, B, C, P, rate, name)

    @property
    def size(self) -> int:
        return self.A.shape[0]

    @property
    def siso(self) -> bool:
        return self.B.shape[1] == 1 and self.C.shape[0] == 1


@dataclass
class CondensedSystem:
    modules: list[ModuleSpec]
    A_cond: np.ndarray
    verdict: bool
    margin: float

    @property
    def alpha(self) -> np.ndarray:
        return np.array([m.rate for m in self.modules])


def _check_admissible(modules):
    for i, m in enumerate(modules):
        if not m.rate > 0:
            raise ValueError(f"module {m.name or i} is not contracting (rate {m.rate:.6g} <= 0)")


def _coupling(modules, blocks, i, j):
    Aij = np.atleast_2d(np.asarray(blocks[(i, j)], dtype=float))
    Bi, Cj = modules[i].B, modules[j].C
    if Aij.shape != (Bi.shape[1], Cj.shape[0]):
        raise ValueError(f"block ({i}, {j}) has shape {Aij.shape}, expected "
                         f"({Bi.shape[1]}, {Cj.shape[0]})")
    return Bi @ Aij @ Cj


def _verdict(modules, A_cond):
    _check_admissible(modules)
    margin = min(m.rate for m in modules) - spectral_abscissa(A_cond)
    return CondensedSystem(list(modules), A_cond, bool(margin > 0), float(margin))


def condensed_matrix(modules: list[ModuleSpec], blocks: dict) -> CondensedSystem:
    """Condensed coupling matrix with entries ``||B_i A_ij C_j||`` from metric j to metric i.

    ``blocks`` maps module pairs ``(i, j)`` to the coupling from module j's
    outputs into module i's inputs. The system contracts when the slowest
    module rate exceeds the spectral abscissa of the condensed matrix.
    """
    N = len(modules)
    A_cond = np.zeros((N, N))
    for (i, j) in blocks:
        if i == j:
            if np.any(np.asarray(blocks[(i, j)]) != 0):
                raise ValueError(f"module {i} has a self-coupling block")
            continue
        M = _coupling(modules, blocks, i, j)
        A_cond[i, j] = induced_norm(M, modules[i].metric, modules[j].metric)
    return _verdict(modules, A_cond)


def condensed_matrix_siso(modules: list[ModuleSpec], blocks: dict) -> CondensedSystem:
    """Closed form for single-input single-output modules.

    With ``b_i``/``c_j`` the selection vectors, ``B_i A_ij C_j`` is rank one
    and its induced norm is ``|A_ij| * |P_i^{1/2} b_i| * |P_j^{-1/2} c_j|``;
    for identity metrics the gain ``gamma_ij`` is 1 whenever both selections
    are non-empty.
    """
    N = len(modules)
    A_cond = np.zeros((N, N))
    for m in modules:
        if not m.siso:
            raise ValueError("all modules must be single-input single-output")
    for (i, j), a in blocks.items():
        if i == j:
            continue
        a = float(np.asarray(a).reshape(()))
        b = modules[i].metric.sqrt() @ modules[i].B[:, 0]
        c = modules[j].metric.inv_sqrt() @ modules[j].C[0]
        A_cond[i, j] = abs(a) * np.linalg.norm(b) * np.linalg.norm(c)
    return _verdict(modules, A_cond)


def full_interconnection(modules: list[ModuleSpec], blocks: dict) -> np.ndarray:
    """Node-level coupling of the whole system: internal blocks plus ``B_i A_ij C_j``."""
    sizes = [m.size for m in modules]
    offs = np.concatenate([[0], np.cumsum(sizes)])
    A = np.zeros((offs[-1], offs[-1]))
    for i, m in enumerate(modules):
        A[offs[i]:offs[i + 1], offs[i]:offs[i + 1]] = m.A
    for (i, j) in blocks:
        if i != j:
            A[offs[i]:offs[i + 1], offs[j]:offs[j + 1]] += _coupling(modules, blocks, i, j)
    return A


@dataclass
class CondensationCheck:
    margin: float
    verdict: bool
    rates: list[float]
    horizon: float
    dt: float

    @property
    def min_rate(self) -> float:
        return min(self.rates)

    def passed(self, factor: float = 0.9) -> bool:
        return self.min_rate >= factor * self.margin


def verify_condensation(system: CondensedSystem, blocks: dict, trials: int = 5, seed: int = 0,
                        gain_fraction: float = 0.25, horizon: float | None = None,
                        window: float = 0.25) -> CondensationCheck:
    """Simulate the full node-level system and fit its trajectory convergence rate.

    Each node gets a :class:`TestNode` contracting exactly at its declared
    rate. Module metrics must be diagonal so that node-wise rates carry over
    to the module measure.
    """
    for m in system.modules:
        if not m.metric.is_diagonal:
            raise ValueError("verification needs diagonal module metrics")
    A = full_interconnection(system.modules, blocks)
    nodes = [TestNode.with_rate(r, gain_fraction) for m in system.modules for r in m.node_rates]
    if horizon is None:
        horizon = 40.0 / max(system.margin, 1e-3)
    dt = max_step(nodes, A)
    steps = int(np.ceil(horizon / dt))
    dt = horizon / steps
    rng = np.random.default_rng(seed)
    rates = []
    for _ in range(trials):
        xa, xb = rng.normal(scale=2.0, size=(2, len(nodes)))
        pair = simulate(nodes, A, xa, xb, horizon, dt)
        rates.append(fit_rate(pair, window))
    return CondensationCheck(system.margin, system.verdict, rates, horizon, dt)


# -- recursive motif condensation ------------------------------------------


@dataclass
class SignificanceConfig:
    ensemble_size: int = DEFAULT_ENSEMBLE
    swap_factor: int = DEFAULT_SWAP_FACTOR
    seed: int = 0
    threads: int = 1
    sizes: tuple[int, ...] = (3, 4)


@dataclass
class CondensationRound:
    index: int
    graph: Digraph
    motifs: list[tuple[SubgraphClass, float]]
    condensed: list[tuple[SubgraphClass, tuple[str, ...], str]]
    mapping: dict[str, str]


@dataclass
class CondensationTrace:
    rounds: list[CondensationRound] = field(default_factory=list)
    terminal: Digraph | None = None
    original: Digraph | None = None

    def __len__(self):
        return len(self.rounds)

    def composed_mapping(self) -> dict[str, str]:
        """Original node label -> node of the terminal graph."""
        out = {x: x for x in self.original.node_labels}
        for r in self.rounds:
            out = {k: r.mapping[v] for k, v in out.items()}
        return out


def _round_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=(index,)).generate_state(1)[0])


def contract(g: Digraph, groups: list[tuple[str, ...]], names: list[str]) -> tuple[Digraph, dict]:
    """Merge each node group into one node; edges are unioned and internal edges dropped."""
    mapping = {x: x for x in g.node_labels}
    for grp, name in zip(groups, names):
        for x in grp:
            mapping[x] = name
    labels = [x for x in g.node_labels if mapping[x] == x] + list(names)
    index = {x: i for i, x in enumerate(labels)}
    edges = set()
    for s, t in g.edges:
        a, b = index[mapping[g.node_labels[s]]], index[mapping[g.node_labels[t]]]
        if a != b:
            edges.add((a, b))
    return Digraph(tuple(labels), frozenset(edges)), mapping


def condense_motifs(g: Digraph, config: SignificanceConfig | None = None,
                    max_rounds: int = 50) -> CondensationTrace:
    """Repeatedly detect motifs and merge disjoint occurrences into supernodes.

    Each round re-runs significance on the current graph with a fresh
    ensemble. Occurrences of motif classes are ranked by (Z descending,
    class, sorted node labels) and taken greedily while node-disjoint; every
    selected occurrence becomes a node ``m<round>_<index>``. Stops when a
    round finds no motif or no occurrence can be selected.
    """
    config = config or SignificanceConfig()
    trace = CondensationTrace(original=g)
    current = g
    for r in range(1, max_rounds + 1):
        sizes = tuple(n for n in config.sizes if current.n >= n)
        if not sizes:
            break
        stats = zscores_multi(current, sizes, config.ensemble_size, _round_seed(config.seed, r),
                              config.swap_factor, config.threads)
        motifs = sorted(((s.cls, s.z) for n in sizes for s in stats[n] if s.verdict == "motif"),
                        key=lambda x: (-x[1], x[0]))
        if not motifs:
            break
        lab = current.node_labels
        candidates = []
        for cls, z in motifs:
            for occ in census(current, cls.n).occurrences.get(cls, []):
                candidates.append((-z, cls, tuple(sorted(lab[i] for i in occ))))
        candidates.sort()
        used: set[str] = set()
        chosen = []
        for _, cls, nodes in candidates:
            if used.isdisjoint(nodes):
                chosen.append((cls, nodes))
                used.update(nodes)
        if not chosen:
            break
        names = []
        for k in range(len(chosen)):
            name = f"m{r}_{k}"
            while name in lab:
                name += "'"
            names.append(name)
        nxt, mapping = contract(current, [nodes for _, nodes in chosen], names)
        trace.rounds.append(CondensationRound(
            r, current, motifs, [(cls, nodes, name) for (cls, nodes), name in zip(chosen, names)],
            mapping))
        log.info("round %d: %d motif classes, %d occurrences condensed, %d -> %d nodes",
                 r, len(motifs), len(chosen), current.n, nxt.n)
        current = nxt
    trace.terminal = current
    return trace


def closs_histogram(trace: CondensationTrace, relative: dict[SubgraphClass, RelativeCloss]) -> list[dict]:
    """Per round, count motif classes by relative contraction loss bin."""
    out = []
    for rd in trace.rounds:
        counts = dict.fromkeys(BIN_NAMES + ("undefined",), 0)
        for cls, _ in rd.motifs:
            rc = relative.get(cls)
            if rc is None or rc.r is None:
                counts["undefined"] += 1
            else:
                counts[BIN_NAMES[int(np.searchsorted(BIN_EDGES, rc.r, side="right"))]] += 1
        out.append(counts)
    return out


def trace_to_json(trace: CondensationTrace, relative=None, extra: dict | None = None) -> str:
    hist = closs_histogram(trace, relative) if relative is not None else None
    rounds = []
    for k, rd in enumerate(trace.rounds):
        rounds.append({
            "round": rd.index,
            "nodes": rd.graph.n,
            "edges": rd.graph.m,
            "motifs": [{"class_id": c.class_id, "n": c.n, "label": c.label, "z": z}
                       for c, z in rd.motifs],
            "condensed": [{"class_id": c.class_id, "nodes": list(nodes), "supernode": name}
                          for c, nodes, name in rd.condensed],
            "histogram": None if hist is None else hist[k],
        })
    doc = dict(extra or {})
    doc.update({
        "rounds": rounds,
        "mapping": trace.composed_mapping() if trace.original is not None else {},
        "terminal": {"nodes": trace.terminal.n, "edges": trace.terminal.m,
                     "edge_list": dump_edge_list(trace.terminal)},
    })
    return json.dumps(doc, indent=2, sort_keys=True)
