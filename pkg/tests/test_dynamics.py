import math

import numpy as np
import pytest
import scipy.linalg

from motifcloss.dynamics import (StepSizeError, TestNode, check_bound, fit_rate, max_step,
                                 simulate)
from motifcloss.measures import Metric

FFL_A = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0]])


def test_node_rate_and_validation():
    assert TestNode(1.0, 0.3).rate == pytest.approx(0.7)
    assert TestNode.with_rate(2.0, -0.25).rate == pytest.approx(2.0)
    with pytest.raises(ValueError):
        TestNode(1.0, 1.0)


def test_single_node_exponential():
    pair = simulate([TestNode(1.0)], np.zeros((1, 1)), [1.0], [0.0], T=1.0, dt=1e-3)
    assert abs(pair.distance[-1] - math.exp(-1)) < 1e-6
    assert fit_rate(pair) == pytest.approx(1.0, abs=1e-3)


def test_rotation_preserves_euclidean_distance():
    A = np.array([[0.0, 1.0], [-1.0, 0.0]])
    nodes = [TestNode(1.0), TestNode(1.0)]
    xa, xb = np.array([1.0, -2.0]), np.array([0.5, 0.5])
    pair = simulate(nodes, A, xa, xb, T=2.0, dt=1e-3)
    d0 = np.linalg.norm(xa - xb)
    assert np.max(np.abs(pair.distance - np.exp(-pair.t) * d0)) < 1e-5
    exact = scipy.linalg.expm(2.0 * (A - np.eye(2))) @ (xa - xb)
    assert np.allclose(pair.xa[-1] - pair.xb[-1], exact, atol=1e-5)


def test_linear_matches_matrix_exponential():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(5, 5))
    nodes = [TestNode(c) for c in rng.uniform(0.5, 2.0, 5)]
    c = np.array([n.c for n in nodes])
    x0 = rng.normal(size=5)
    dt = min(1e-3, max_step(nodes, A))
    steps = int(round(1.0 / dt))
    pair = simulate(nodes, A, x0, np.zeros(5), T=steps * dt, dt=dt)
    exact = scipy.linalg.expm(steps * dt * (A - np.diag(c))) @ x0
    assert np.linalg.norm(pair.xa[-1] - exact) <= 1e-5 * np.linalg.norm(exact)


def test_fourth_order_convergence():
    nodes = [TestNode(1.0, 0.6), TestNode(1.5, -0.5), TestNode(0.8, 0.3)]
    A = np.array([[0.0, 0.8, -0.4], [0.3, 0.0, 0.9], [-0.7, 0.2, 0.0]])
    xa, xb = np.array([2.0, -1.0, 0.5]), np.zeros(3)
    ref = simulate(nodes, A, xa, xb, T=1.8, dt=0.03 / 32).xa[-1]
    e1 = np.linalg.norm(simulate(nodes, A, xa, xb, T=1.8, dt=0.03).xa[-1] - ref)
    e2 = np.linalg.norm(simulate(nodes, A, xa, xb, T=1.8, dt=0.015).xa[-1] - ref)
    assert 16 * 0.7 <= e1 / e2 <= 16 * 1.3


def test_step_guard():
    with pytest.raises(StepSizeError):
        simulate([TestNode(10.0)], np.zeros((1, 1)), [1.0], [0.0], T=1.0, dt=0.1)
    with pytest.raises(ValueError):
        simulate([TestNode(1.0)], np.zeros((1, 1)), [1.0], [0.0], T=0.001, dt=0.01)


def test_divergence_is_flagged():
    nodes = [TestNode(0.1), TestNode(0.1)]
    A = np.array([[0.0, 50.0], [50.0, 0.0]])
    pair = simulate(nodes, A, [300.0, 300.0], [0.0, 0.0], T=40.0, dt=max_step(nodes, A))
    assert pair.diverged


def test_fit_rate_examples():
    t = np.linspace(0, 5, 200)
    assert fit_rate((t, np.exp(-2 * t))) == pytest.approx(2.0, abs=1e-6)
    assert fit_rate((t, np.full_like(t, 3.0))) == pytest.approx(0.0, abs=1e-12)
    assert math.isinf(fit_rate((t, np.where(t > 4, 0.0, 1.0))))
    with pytest.raises(ValueError):
        fit_rate((t[:15], np.ones(15)), window=0.5)


def test_ffl_coupling_rate():
    nodes = [TestNode(0.5, 0.2)] * 3
    rep = check_bound(nodes, FFL_A, trials=10, seed=0)
    assert rep.delta == pytest.approx(0.3)
    assert rep.verdict == "contracting" and rep.failures == 0
    # nilpotent coupling adds a polynomial transient, so fit far out
    pair = simulate(nodes, FFL_A, [1.0, -1.0, 2.0], [0.0, 0.0, 0.0], T=399.9, dt=0.03)
    assert fit_rate(pair, window=0.5) >= 0.3 * 0.95


def test_decoupled_nodes():
    nodes = [TestNode(1.0, 0.2), TestNode(2.0, 0.5), TestNode(1.2, -0.1)]
    rep = check_bound(nodes, np.zeros((3, 3)), trials=10, seed=1, measure="two")
    assert rep.delta == pytest.approx(0.8) and rep.passed
    pair = simulate(nodes, np.zeros((3, 3)), [0.1, 0.1, 0.1], [0.0, 0.0, 0.0], T=10.0, dt=0.01)
    assert fit_rate(pair) >= 0.8 - 0.05


def test_no_guarantee_when_delta_not_positive():
    A = np.zeros((3, 3))
    A[1, 0] = A[2, 1] = A[0, 2] = 5.0
    rep = check_bound([TestNode(1.0)] * 3, A, trials=3)
    assert rep.verdict == "no guarantee" and rep.passed is None and rep.delta < 0


def test_spectral_bound_needs_metzler():
    with pytest.raises(ValueError):
        check_bound([TestNode(1.0)] * 2, np.array([[0.0, 1.0], [-1.0, 0.0]]), trials=2)
    rep = check_bound([TestNode(2.0)] * 2, np.array([[0.0, 1.0], [-1.0, 0.0]]), trials=4,
                      measure="two")
    assert rep.passed


def test_bound_in_metric_norm_on_random_metzler_networks():
    rng = np.random.default_rng(3)
    for k in range(10):
        n = int(rng.integers(2, 8))
        A = rng.uniform(0, 1, (n, n)) * (rng.random((n, n)) < 0.4)
        np.fill_diagonal(A, 0)
        rates = rng.uniform(0.5, 2.0, n)
        from motifcloss.measures import spectral_abscissa
        nodes = [TestNode.with_rate(r + spectral_abscissa(A), 0.3) for r in rates]
        rep = check_bound(nodes, A, trials=5, seed=k)
        assert rep.failures == 0 and rep.worst_ratio <= 1


def test_weighted_bound_needs_diagonal_metric():
    P = Metric(np.array([[2.0, 0.5], [0.5, 1.0]]))
    with pytest.raises(ValueError):
        check_bound([TestNode(1.0)] * 2, np.zeros((2, 2)), measure=P)


def test_trajectory_csv():
    pair = simulate([TestNode(1.0)], np.zeros((1, 1)), [1.0], [0.0], T=0.05, dt=0.01)
    lines = pair.to_csv().splitlines()
    assert lines[0] == "t,xa_0,xb_0,distance" and len(lines) == 7
    assert pair.norm == "two"
