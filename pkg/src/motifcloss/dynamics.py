"""Simulation of interconnected scalar nodes and numerical contraction checks.

Nodes follow ``dx_i/dt = -c_i x_i + d_i sin(x_i) + u_i`` with ``u = A x``.
Their Jacobian ``-c + d cos(x)`` never exceeds ``-(c - |d|)``, so each
isolated node contracts at exactly ``c - |d|``.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass

import numpy as np

from motifcloss.measures import (Metric, MeasureKind, is_metzler, metric_for, mu,
                                 spectral_abscissa)

log = logging.getLogger(__name__)

STEP_GUARD = 0.1
DEFAULT_TOL = 0.05


class StepSizeError(ValueError):
    pass


@dataclass(frozen=True)
class TestNode:
    __test__ = False  # not a pytest class

    c: float
    d: float = 0.0

    def __post_init__(self):
        if not abs(self.d) < self.c:
            raise ValueError(f"need |d| < c for a contracting node, got c={self.c}, d={self.d}")

    @property
    def rate(self) -> float:
        return self.c - abs(self.d)

    @classmethod
    def with_rate(cls, rate: float, gain_fraction: float = 0.25) -> "TestNode":
        """Node contracting at ``rate``; with a positive gain the Jacobian reaches ``-rate`` at x = 0."""
        d = gain_fraction * rate
        return cls(rate + abs(d), d)


def _node_arrays(nodes):
    c = np.array([n.c for n in nodes], dtype=float)
    d = np.array([n.d for n in nodes], dtype=float)
    return c, d


def max_step(nodes, A) -> float:
    """Largest admissible step: 0.1 / (fastest node rate + max absolute row sum of A)."""
    c, d = _node_arrays(nodes)
    scale = float(np.max(c + np.abs(d))) + float(np.abs(np.asarray(A)).sum(axis=1).max(initial=0.0))
    return STEP_GUARD / scale


def _rk4(c, d, A, X0, dt, steps, observe=None):
    """Classical RK4 on a batch of states ``X0`` with shape (batch, N)."""

    def f(X):
        return -c * X + d * np.sin(X) + X @ A.T

    X = np.array(X0, dtype=float)
    traj = None if observe else np.empty((steps + 1,) + X.shape)
    if observe:
        observe(0, X)
    else:
        traj[0] = X
    for k in range(1, steps + 1):
        k1 = f(X)
        k2 = f(X + 0.5 * dt * k1)
        k3 = f(X + 0.5 * dt * k2)
        k4 = f(X + dt * k3)
        X = X + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if observe:
            observe(k, X)
        else:
            traj[k] = X
    return traj


def _norm_fn(norm):
    """Vector norm along the last axis: a tag, a Metric, or None for Euclidean."""
    if norm is None or norm == "two":
        return lambda x: np.linalg.norm(x, axis=-1)
    if isinstance(norm, Metric):
        return norm.norm
    if norm == "one":
        return lambda x: np.abs(x).sum(axis=-1)
    if norm == "infinity":
        return lambda x: np.abs(x).max(axis=-1)
    raise ValueError(f"unknown norm {norm!r}")


@dataclass
class TrajectoryPair:
    t: np.ndarray
    xa: np.ndarray
    xb: np.ndarray
    distance: np.ndarray
    norm: str
    diverged: bool = False

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        N = self.xa.shape[1]
        w.writerow(["t"] + [f"xa_{i}" for i in range(N)] + [f"xb_{i}" for i in range(N)] + ["distance"])
        for k in range(len(self.t)):
            w.writerow([repr(float(v)) for v in (self.t[k], *self.xa[k], *self.xb[k], self.distance[k])])
        return out.getvalue()


def simulate(nodes, A, x_a, x_b, T: float, dt: float, norm=None) -> TrajectoryPair:
    """Integrate the network from two initial conditions on a common grid.

    ``norm`` selects the distance: None or ``"two"`` (Euclidean), ``"one"``,
    ``"infinity"`` or a :class:`Metric`. Raises :class:`StepSizeError` when
    ``dt`` exceeds :func:`max_step`; a non-finite state sets ``diverged``.
    """
    A = np.asarray(A, dtype=float)
    N = len(nodes)
    if A.shape != (N, N):
        raise ValueError(f"A has shape {A.shape}, expected ({N}, {N})")
    if not dt > 0 or T < dt:
        raise ValueError("need dt > 0 and T >= dt")
    guard = max_step(nodes, A)
    if dt > guard * (1 + 1e-12):
        raise StepSizeError(f"dt={dt:g} exceeds the stability guard {guard:g}")
    steps = int(round(T / dt))
    c, d = _node_arrays(nodes)
    X0 = np.stack([np.asarray(x_a, dtype=float), np.asarray(x_b, dtype=float)])
    with np.errstate(over="ignore", invalid="ignore"):
        traj = _rk4(c, d, A, X0, dt, steps)
    diverged = not np.all(np.isfinite(traj))
    if diverged:
        log.warning("trajectory became non-finite")
    with np.errstate(over="ignore", invalid="ignore"):
        dist = _norm_fn(norm)(traj[:, 0] - traj[:, 1])
    label = "metric" if isinstance(norm, Metric) else (norm or "two")
    return TrajectoryPair(np.arange(steps + 1) * dt, traj[:, 0], traj[:, 1], dist, label, diverged)


def fit_rate(pair: TrajectoryPair | tuple, window: float = 0.5) -> float:
    """Exponential decay rate from a least-squares fit of log-distance.

    Uses the trailing ``window`` fraction of the horizon. Returns ``inf``
    if the distance reaches zero inside the window.
    """
    if isinstance(pair, TrajectoryPair):
        t, dist = pair.t, pair.distance
    else:
        t, dist = (np.asarray(x, dtype=float) for x in pair)
    if not 0 < window <= 1:
        raise ValueError("window must be in (0, 1]")
    sel = t >= t[-1] - window * (t[-1] - t[0])
    if sel.sum() < 10:
        raise ValueError("fewer than 10 points in the fit window")
    y = dist[sel]
    if np.any(y <= 0):
        log.warning("distance hit zero in the fit window; rate reported as inf")
        return math.inf
    slope = np.polyfit(t[sel], np.log(y), 1)[0]
    return float(-slope)


@dataclass
class BoundReport:
    measure: str
    delta: float
    verdict: str
    trials: int
    failures: int
    worst_ratio: float | None
    tol: float
    horizon: float | None = None
    dt: float | None = None

    @property
    def passed(self) -> bool | None:
        return None if self.verdict == "no guarantee" else self.failures == 0

    def as_dict(self) -> dict:
        return {"measure": self.measure, "delta": self.delta, "verdict": self.verdict,
                "trials": self.trials, "failures": self.failures, "worst_ratio": self.worst_ratio,
                "tol": self.tol, "horizon": self.horizon, "dt": self.dt, "passed": self.passed}


def _bound_metric(kind: MeasureKind, A, min_rate, tol):
    """Predicted rate and the norm it is guaranteed in."""
    if kind.tag == "spectral":
        if not is_metzler(A):
            raise ValueError("the spectral bound needs non-negative off-diagonal couplings; "
                             "use the one, two or infinity measure for signed interconnections")
        abscissa = spectral_abscissa(A)
        delta = min_rate - abscissa
        if delta <= 0:
            return delta, None
        # diagonal metric within tol*delta/2 of the optimum keeps the envelope valid
        return delta, metric_for(A, epsilon=0.5 * tol * delta)
    if kind.tag == "weighted_two":
        if not kind.metric.is_diagonal:
            raise ValueError("node-wise bounds need a diagonal metric")
        return min_rate - mu(kind, A), kind.metric
    return min_rate - mu(kind, A), kind.tag


def check_bound(nodes, A, trials: int = 20, seed: int = 0, measure="spectral",
                tol: float = DEFAULT_TOL, T: float | None = None, dt: float | None = None,
                spread: float = 2.0) -> BoundReport:
    """Check ``|x_a(t) - x_b(t)| <= |x_a(0) - x_b(0)| exp(-delta (1 - tol) t)``.

    ``delta = min node rate - mu(measure, A)``. The distance is measured in
    the norm matching the measure; for the spectral abscissa that is the
    diagonal metric from :func:`metric_for`. When ``delta <= 0`` nothing is
    simulated and the verdict is ``"no guarantee"``: the bound is only
    sufficient.
    """
    A = np.asarray(A, dtype=float)
    kind = MeasureKind.parse(measure)
    min_rate = min(n.rate for n in nodes)
    delta, norm = _bound_metric(kind, A, min_rate, tol)
    if delta <= 0:
        return BoundReport(kind.tag, float(delta), "no guarantee", trials, 0, None, tol)
    guard = max_step(nodes, A)
    if T is None:
        T = 4.0 / delta
    if dt is None:
        dt = min(guard, T / 200)
    steps = max(int(math.ceil(T / dt)), 1)
    dt = T / steps
    if dt > guard * (1 + 1e-12):
        raise StepSizeError(f"dt={dt:g} exceeds the stability guard {guard:g}")
    rng = np.random.default_rng(seed)
    N = len(nodes)
    Xa = rng.normal(scale=spread, size=(trials, N))
    Xb = rng.normal(scale=spread, size=(trials, N))
    c, d = _node_arrays(nodes)
    norm_fn = _norm_fn(norm)
    d0 = norm_fn(Xa - Xb)
    worst = np.zeros(trials)
    decay = delta * (1 - tol)

    def observe(k, X):
        if k == 0:
            return
        dist = norm_fn(X[:trials] - X[trials:])
        ratio = dist / (d0 * math.exp(-decay * k * dt))
        np.maximum(worst, np.where(np.isfinite(ratio), ratio, np.inf), out=worst)

    with np.errstate(over="ignore", invalid="ignore"):
        _rk4(c, d, A, np.concatenate([Xa, Xb]), dt, steps, observe=observe)
    failures = int(np.sum(worst > 1 + 1e-9))
    return BoundReport(kind.tag, float(delta), "contracting", trials, failures, float(worst.max()),
                       tol, T, dt)
