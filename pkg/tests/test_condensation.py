import numpy as np
import pytest

from motifcloss.synthetic import random_module_system
from motifcloss.census import class_by_id
from motifcloss.closs import RelativeCloss, closs_table
from motifcloss.condensation import (CondensationRound, CondensationTrace, ModuleSpec,
                                     SignificanceConfig, closs_histogram, condense_motifs,
                                     condensed_matrix, condensed_matrix_siso, contract,
                                     full_interconnection, module_rate, trace_to_json,
                                     verify_condensation)
from motifcloss.graph import Digraph, load_edge_list
from motifcloss.measures import SPECTRAL, mu
from motifcloss.reports import bundled_text, load_module_system

FFL_A = [[0, 0, 0], [1, 0, 0], [1, 1, 0]]
FFL = class_by_id(3, "M2")
CYCLE = class_by_id(3, "M5")


def test_module_rate_examples():
    assert module_rate([1, 1, 1], FFL_A) == 1.0
    cyc = np.zeros((3, 3))
    cyc[1, 0] = cyc[2, 1] = cyc[0, 2] = 1
    assert module_rate([2, 2, 2], cyc) == pytest.approx(1.0)
    assert module_rate([0.7], [[0.0]]) == 0.7
    with pytest.raises(ValueError):
        module_rate([1, 0], np.zeros((2, 2)))


@pytest.fixture(scope="module")
def fig3():
    return load_module_system(bundled_text("fig3"))


def test_fig3_condensed_matrix_is_feedback_cycle(fig3):
    modules, blocks = fig3
    system = condensed_matrix(modules, blocks)
    ring = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=float)
    assert np.array_equal(system.A_cond, ring)
    assert mu(SPECTRAL, system.A_cond) == pytest.approx(1.0)
    assert np.allclose(system.alpha, 2.0)
    assert system.verdict and system.margin == pytest.approx(1.0)
    siso = condensed_matrix_siso(modules, blocks)
    assert np.max(np.abs(siso.A_cond - system.A_cond)) <= 1e-12


def test_fig3_full_system_contracts(fig3):
    modules, blocks = fig3
    system = condensed_matrix(modules, blocks)
    check = verify_condensation(system, blocks, trials=3, seed=0)
    assert check.passed(0.9)


def test_fig3_optimal_metrics_widen_margin(fig3):
    modules, blocks = fig3
    opt = [ModuleSpec.build(m.A, m.node_rates, m.B, m.C, "optimal", 1e-3, m.name) for m in modules]
    system = condensed_matrix(opt, blocks)
    assert system.margin > condensed_matrix(modules, blocks).margin
    assert np.allclose(condensed_matrix_siso(opt, blocks).A_cond, system.A_cond, atol=1e-12)


def test_zero_blocks_give_zero_matrix(fig3):
    modules, blocks = fig3
    system = condensed_matrix(modules, {k: np.zeros_like(v) for k, v in blocks.items()})
    assert not system.A_cond.any() and system.verdict


def test_two_module_nilpotent_example():
    a = ModuleSpec.build([[0.0]], [1.0], [[1]], [[1]])
    b = ModuleSpec.build([[0.0]], [0.3], [[1]], [[1]])
    for fn in (condensed_matrix, condensed_matrix_siso):
        s = fn([a, b], {(0, 1): [[0.5]], (1, 0): [[0.0]]})
        assert np.array_equal(s.A_cond, [[0, 0.5], [0, 0]])
        assert s.verdict and s.margin == pytest.approx(0.3)


def test_errors():
    ok = ModuleSpec.build([[0.0]], [1.0], [[1]], [[1]])
    bad = ModuleSpec.build(FFL_A, [0.5, 0.5, 0.5], [[1], [0], [0]], [[0, 0, 1]], name="slow")
    bad_cycle = ModuleSpec.build([[0, 0, 2], [2, 0, 0], [0, 2, 0]], [1, 1, 1], [[1], [0], [0]],
                                 [[0, 0, 1]], name="lossy")
    with pytest.raises(ValueError, match="lossy"):
        condensed_matrix([ok, bad_cycle], {})
    # the FFL costs 1 in the identity metric but nothing in an optimal one
    with pytest.raises(ValueError, match="slow"):
        condensed_matrix([ok, bad], {})
    tuned = ModuleSpec.build(bad.A, bad.node_rates, bad.B, bad.C, "optimal", 1e-3)
    assert condensed_matrix([ok, tuned], {}).verdict
    with pytest.raises(ValueError):
        condensed_matrix([ok, ok], {(0, 1): [[1.0, 2.0]]})
    with pytest.raises(ValueError):
        condensed_matrix([ok, ok], {(0, 0): [[1.0]]})
    with pytest.raises(ValueError):
        ModuleSpec.build(FFL_A, [1, 1, 1], [[2], [0], [0]], [[0, 0, 1]])
    with pytest.raises(ValueError):
        ModuleSpec.build(FFL_A, [1, 1, 1], [[1, 1], [0, 0], [0, 0]], [[1, 1, 0]])


def test_siso_path_matches_general_on_200_systems():
    rng = np.random.default_rng(11)
    for k in range(200):
        modules, blocks = random_module_system(rng, siso=True)
        a = condensed_matrix(modules, blocks).A_cond
        b = condensed_matrix_siso(modules, blocks).A_cond
        assert np.max(np.abs(a - b)) <= 1e-12
        assert np.all(a >= 0) and not np.diag(a).any()


def test_full_interconnection_layout():
    a = ModuleSpec.build(FFL_A, [1, 1, 1], [[1], [0], [0]], [[0, 0, 1]])
    b = ModuleSpec.build([[0.0]], [1.0], [[1]], [[1]])
    A = full_interconnection([a, b], {(1, 0): [[2.0]], (0, 1): [[-1.0]]})
    assert A.shape == (4, 4)
    assert A[3, 2] == 2.0 and A[0, 3] == -1.0
    assert np.array_equal(A[:3, :3], FFL_A)


def test_full_system_contracts_on_50_random_systems():
    rng = np.random.default_rng(2024)
    done = 0
    while done < 50:
        modules, blocks = random_module_system(rng, siso=done % 2 == 0)
        system = condensed_matrix(modules, blocks)
        if not system.verdict:
            continue
        check = verify_condensation(system, blocks, trials=1, seed=done)
        assert check.min_rate >= 0.9 * system.margin
        done += 1


def test_contract_unions_edges_and_drops_internal_ones():
    g = load_edge_list("a b\nb c\na c\nc d\nd a\nx a")
    h, mapping = contract(g, [("a", "b", "c")], ["m1_0"])
    assert h.node_labels == ("d", "x", "m1_0")
    assert h.labelled_edges() == {("m1_0", "d"), ("d", "m1_0"), ("x", "m1_0")}
    assert mapping["b"] == "m1_0" and mapping["d"] == "d"


def test_no_motif_graph_has_empty_trace():
    g = load_edge_list("a b\nb c\nc d\nd a")
    trace = condense_motifs(g, SignificanceConfig(ensemble_size=50, sizes=(3, 4)))
    assert len(trace) == 0 and trace.terminal == g
    assert trace.composed_mapping() == {x: x for x in g.node_labels}


@pytest.fixture(scope="module")
def planted_trace(planted):
    return condense_motifs(planted, SignificanceConfig(ensemble_size=300, seed=0, sizes=(3,)))


def test_planted_condenses_in_one_round(planted, planted_trace):
    assert len(planted_trace) == 1
    rd = planted_trace.rounds[0]
    assert [c for c, _ in rd.motifs] == [FFL]
    assert len(rd.condensed) == 20
    assert {frozenset(nodes) for _, nodes, _ in rd.condensed} == \
           {frozenset({f"f{i}a", f"f{i}b", f"f{i}c"}) for i in range(20)}
    assert planted_trace.terminal.n == planted.n - 40
    mapping = planted_trace.composed_mapping()
    assert set(mapping) == set(planted.node_labels)
    assert set(mapping.values()) == set(planted_trace.terminal.node_labels)


def test_trace_is_deterministic(planted, planted_trace):
    again = condense_motifs(planted, SignificanceConfig(ensemble_size=300, seed=0, sizes=(3,)))
    assert trace_to_json(again) == trace_to_json(planted_trace)


def test_overlapping_occurrences_condense_once(planted):
    # an extra sink on f0a, f0b forms a second FFL sharing two nodes with the planted one
    g = Digraph.from_labelled_edges(sorted(planted.labelled_edges() | {("f0a", "x"), ("f0b", "x")}))
    trace = condense_motifs(g, SignificanceConfig(ensemble_size=300, seed=0, sizes=(3,)))
    rd = trace.rounds[0]
    groups = [set(nodes) for _, nodes, _ in rd.condensed]
    assert sum(1 for s in groups if {"f0a", "f0b"} <= s) == 1
    used = [x for s in groups for x in s]
    assert len(used) == len(set(used))
    for a, b in zip(trace.rounds, trace.rounds[1:]):
        assert b.graph.n < a.graph.n


def test_histogram_bins():
    rel = closs_table(3, samples=10_000, seed=0).relative
    g = load_edge_list("a b")
    forced = CondensationTrace([CondensationRound(1, g, [(FFL, 5.0), (CYCLE, 3.0)], [], {})], g, g)
    assert closs_histogram(forced, rel) == [{"low": 1, "low-medium": 0, "medium": 0,
                                             "medium-high": 0, "high": 1, "undefined": 0}]
    assert closs_histogram(CondensationTrace([], g, g), rel) == []
    undefined = {FFL: RelativeCloss(FFL, None, 0, 0)}
    only_ffl = CondensationTrace([CondensationRound(1, g, [(FFL, 5.0)], [], {})], g, g)
    assert closs_histogram(only_ffl, undefined)[0]["undefined"] == 1
    assert closs_histogram(only_ffl, rel)[0]["low"] == 1


def test_histogram_edges():
    g = load_edge_list("a b")
    classes = [class_by_id(3, x) for x in ("M1", "M2", "M5", "M7", "M8")]
    rel = {c: RelativeCloss(c, r, 0, 1) for c, r in zip(classes, [0.0, 0.2, 0.6, 0.8, 1.0])}
    tr = CondensationTrace([CondensationRound(1, g, [(c, 1.0) for c in classes], [], {})], g, g)
    h = closs_histogram(tr, rel)[0]
    assert h == {"low": 1, "low-medium": 1, "medium": 0, "medium-high": 1, "high": 2, "undefined": 0}


def test_trace_json(planted_trace):
    import json

    doc = json.loads(trace_to_json(planted_trace))
    assert doc["rounds"][0]["round"] == 1
    assert len(doc["rounds"][0]["condensed"]) == 20
    assert doc["terminal"]["nodes"] == 60
    assert load_edge_list(doc["terminal"]["edge_list"]).m == doc["terminal"]["edges"]
