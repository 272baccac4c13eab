"""Matrix measures (logarithmic norms), the spectral abscissa, contraction
metrics and metric-weighted induced norms.

All measure functions accept a single square matrix or a stack ``(..., n, n)``
and return a float or an array over the leading axes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.sparse.csgraph import connected_components

KINDS = ("one", "two", "infinity", "spectral", "weighted_two")
DEFAULT_EPSILON = 1e-6


class MetricError(ValueError):
    """Metric construction or validation failed."""


@dataclass(frozen=True, eq=False)
class Metric:
    """Symmetric positive-definite metric ``P`` defining ``|x|_P = |P^{1/2} x|_2``."""

    P: np.ndarray
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        P = np.asarray(self.P, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise MetricError("metric must be a square matrix")
        if not np.all(np.isfinite(P)):
            raise MetricError("metric has non-finite entries")
        P = (P + P.T) / 2
        w, V = np.linalg.eigh(P)
        if w[0] <= 0:
            raise MetricError(f"metric is not positive definite (min eigenvalue {w[0]:.3g})")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "_eig", (w, V))

    @classmethod
    def identity(cls, n: int) -> "Metric":
        return cls(np.eye(n))

    @property
    def n(self) -> int:
        return self.P.shape[0]

    @property
    def is_diagonal(self) -> bool:
        return not np.any(self.P - np.diag(np.diag(self.P)))

    def sqrt(self) -> np.ndarray:
        w, V = self._eig
        if self.is_diagonal:
            return np.diag(np.sqrt(np.diag(self.P)))
        return (V * np.sqrt(w)) @ V.T

    def inv_sqrt(self) -> np.ndarray:
        w, V = self._eig
        if self.is_diagonal:
            return np.diag(1 / np.sqrt(np.diag(self.P)))
        return (V / np.sqrt(w)) @ V.T

    def norm(self, x: np.ndarray) -> np.ndarray:
        """Metric norm along the last axis."""
        x = np.asarray(x, dtype=float)
        return np.sqrt(np.einsum("...i,ij,...j->...", x, self.P, x).clip(min=0))


@dataclass(frozen=True, eq=False)
class MeasureKind:
    tag: str
    metric: Metric | None = None

    def __post_init__(self):
        if self.tag not in KINDS:
            raise ValueError(f"unknown measure {self.tag!r}; expected one of {KINDS}")
        if (self.tag == "weighted_two") != (self.metric is not None):
            raise ValueError("weighted_two needs a metric, other kinds take none")

    @classmethod
    def parse(cls, kind) -> "MeasureKind":
        if isinstance(kind, MeasureKind):
            return kind
        if isinstance(kind, Metric):
            return cls("weighted_two", kind)
        return cls(str(kind))

    def __str__(self):
        return self.tag

    def __eq__(self, other):
        if not isinstance(other, MeasureKind):
            return NotImplemented
        if self.tag != other.tag:
            return False
        return self.metric is None or np.array_equal(self.metric.P, other.metric.P)

    def __hash__(self):
        return hash(self.tag)


SPECTRAL = MeasureKind("spectral")
TWO = MeasureKind("two")


def weighted_two(P) -> MeasureKind:
    return MeasureKind("weighted_two", P if isinstance(P, Metric) else Metric(P))


def _check_square(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2]:
        raise ValueError(f"expected square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def mu_one(A) -> float | np.ndarray:
    A = _check_square(A)
    diag = np.diagonal(A, axis1=-2, axis2=-1)
    col = np.abs(A).sum(axis=-2) - np.abs(diag) + diag
    return _scalar(col.max(axis=-1))


def mu_infinity(A) -> float | np.ndarray:
    A = _check_square(A)
    diag = np.diagonal(A, axis1=-2, axis2=-1)
    row = np.abs(A).sum(axis=-1) - np.abs(diag) + diag
    return _scalar(row.max(axis=-1))


def mu_two(A) -> float | np.ndarray:
    A = _check_square(A)
    sym = (A + np.swapaxes(A, -1, -2)) / 2
    return _scalar(np.linalg.eigvalsh(sym)[..., -1])


def mu_weighted_two(A, metric: Metric) -> float | np.ndarray:
    A = _check_square(A)
    if metric.n != A.shape[-1]:
        raise ValueError(f"metric dimension {metric.n} does not match matrix {A.shape[-1]}")
    return mu_two(metric.sqrt() @ A @ metric.inv_sqrt())


def strong_blocks(pattern: np.ndarray) -> list[np.ndarray]:
    """Strongly connected components of the nonzero pattern, as index arrays.

    Eigenvalues of a matrix are the union of those of its diagonal blocks
    once it is permuted to block-triangular form, so each component can be
    solved on its own; singleton components contribute their diagonal entry.
    """
    n = pattern.shape[0]
    off = pattern.copy()
    np.fill_diagonal(off, False)
    ncomp, labels = connected_components(off, directed=True, connection="strong")
    return [np.flatnonzero(labels == c) for c in range(ncomp)]


def spectral_abscissa(A) -> float | np.ndarray:
    """Largest real part of the eigenvalues.

    Solved per strongly connected block of the (stack-wide) sparsity
    pattern; acyclic interconnections therefore give their diagonal exactly,
    with no rounding from defective nilpotent blocks.
    """
    A = _check_square(A)
    pattern = np.any(A != 0, axis=tuple(range(A.ndim - 2)))
    best = None
    for idx in strong_blocks(pattern):
        if len(idx) == 1:
            val = A[..., idx[0], idx[0]]
        else:
            block = A[..., idx[:, None], idx[None, :]]
            val = np.linalg.eigvals(block).real.max(axis=-1)
        best = val if best is None else np.maximum(best, val)
    return _scalar(best)


def mu(kind, A) -> float | np.ndarray:
    """Matrix measure of ``A`` (or of each matrix in a stack) for ``kind``.

    ``kind`` is a :class:`MeasureKind`, one of the tags ``one``, ``two``,
    ``infinity``, ``spectral``, or a :class:`Metric` for ``weighted_two``.
    """
    kind = MeasureKind.parse(kind)
    if kind.tag == "one":
        return mu_one(A)
    if kind.tag == "infinity":
        return mu_infinity(A)
    if kind.tag == "two":
        return mu_two(A)
    if kind.tag == "spectral":
        return spectral_abscissa(A)
    return mu_weighted_two(A, kind.metric)


def is_metzler(A) -> bool:
    A = np.asarray(A, dtype=float)
    off = A - np.diag(np.diag(A))
    return bool(np.all(off >= 0))


def is_irreducible(A) -> bool:
    A = np.asarray(A)
    if A.shape[0] == 1:
        return True
    return len(strong_blocks(A != 0)) == 1


def _perron_metric(A: np.ndarray) -> np.ndarray:
    """Diagonal metric from the left/right Perron vectors of an irreducible Metzler matrix.

    With ``A v = r v`` and ``w^T A = r w^T``, ``D = diag(w/v)`` gives
    ``D A + A^T D - 2 r D`` symmetric Metzler with ``v`` in its kernel, hence
    negative semidefinite: the D-weighted measure equals the spectral abscissa.
    """
    n = A.shape[0]
    c = max(0.0, -np.diag(A).min())
    B = A + c * np.eye(n)
    vals, right = np.linalg.eig(B)
    k = np.argmax(vals.real)
    valsT, left = np.linalg.eig(B.T)
    kT = np.argmax(valsT.real)
    v = np.abs(right[:, k].real)
    w = np.abs(left[:, kT].real)
    if v.min() <= 0 or w.min() <= 0:
        raise MetricError("Perron vector has zero entries")
    return np.diag(w / v)


def _resolvent_metric(A: np.ndarray, s: float) -> np.ndarray:
    """Diagonal metric for any Metzler matrix with spectral abscissa below s.

    ``s I - A`` is then a nonsingular M-matrix; ``v = (sI-A)^{-1} 1`` and
    ``w = (sI-A)^{-T} 1`` are positive and ``D = diag(w/v)`` makes
    ``D(A - sI) + (A - sI)^T D`` negative definite.
    """
    n = A.shape[0]
    M = s * np.eye(n) - A
    v = np.linalg.solve(M, np.ones(n))
    w = np.linalg.solve(M.T, np.ones(n))
    if not (np.all(v > 0) and np.all(w > 0)):
        raise MetricError("resolvent vectors are not positive")
    return np.diag(w / v)


def _lyapunov_metric(A: np.ndarray, s: float) -> np.ndarray:
    n = A.shape[0]
    shifted = A - s * np.eye(n)
    P = scipy.linalg.solve_continuous_lyapunov(shifted.T, -np.eye(n))
    return P / np.abs(P).max()


def metric_for(A, epsilon: float = DEFAULT_EPSILON) -> Metric:
    """Metric ``P`` with ``mu(weighted_two(P), A) <= spectral_abscissa(A) + epsilon``.

    Metzler matrices get a diagonal metric (Perron scaling when irreducible,
    resolvent scaling otherwise); other matrices get the solution of the
    Lyapunov equation for ``A`` shifted by the target rate. The result is
    always checked against the bound and a :class:`MetricError` is raised
    if it does not hold.
    """
    A = _check_square(A)
    if A.ndim != 2:
        raise ValueError("metric_for takes a single matrix")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    n = A.shape[0]
    abscissa = spectral_abscissa(A)
    try:
        if is_metzler(A):
            if is_irreducible(A):
                P = _perron_metric(A)
            else:
                P = _resolvent_metric(A, abscissa + epsilon)
        else:
            P = _lyapunov_metric(A, abscissa + epsilon)
        metric = Metric(P, epsilon)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, MetricError) as exc:
        raise MetricError(f"metric construction failed: {exc}") from exc
    achieved = mu_weighted_two(A, metric)
    if not achieved <= abscissa + epsilon + 1e-8 * max(1.0, abs(abscissa)):
        raise MetricError(
            f"metric reaches {achieved:.6g}, above spectral abscissa {abscissa:.6g} + {epsilon:g}")
    if n == 1:
        return Metric(np.eye(1), epsilon)
    return metric


def induced_norm(M, P_out: Metric | None = None, P_in: Metric | None = None) -> float:
    """Operator norm of ``M`` from ``|.|_{P_in}`` to ``|.|_{P_out}``.

    Equal to the largest singular value of ``P_out^{1/2} M P_in^{-1/2}``;
    ``None`` means the identity metric.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise ValueError("induced_norm takes a 2-D matrix")
    rows, cols = M.shape
    if P_out is not None:
        if P_out.n != rows:
            raise ValueError(f"output metric has dimension {P_out.n}, matrix has {rows} rows")
        M = P_out.sqrt() @ M
    if P_in is not None:
        if P_in.n != cols:
            raise ValueError(f"input metric has dimension {P_in.n}, matrix has {cols} columns")
        M = M @ P_in.inv_sqrt()
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))
