"""Binary soft-margin SVC trained by sequential minimal optimization.

Accepts either a precomputed Gram matrix (the quantum-kernel path) or raw
features with an RBF kernel (the classical baseline).  Working pairs are
chosen by a first-violator scan with the second index maximizing |E1-E2|;
scan order is fixed, so fitting is deterministic.  Labels are {-1,+1}.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DimensionError, UsageError

DEFAULT_TOL = 1e-3
MAX_PASSES = 10_000


def rbf_kernel(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    sq = (
        np.sum(A * A, axis=1)[:, None]
        + np.sum(B * B, axis=1)[None, :]
        - 2.0 * A @ B.T
    )
    return np.exp(-gamma * np.maximum(sq, 0.0))


def default_gamma(X: np.ndarray) -> float:
    """1 / (n_features * feature variance), the common library default."""
    var = float(X.var())
    if var == 0.0:
        var = 1.0
    return 1.0 / (X.shape[1] * var)


@dataclass
class SvcModel:
    alphas: np.ndarray
    bias: float
    support: list[int]
    C: float
    kernel: str  # "precomputed" | "rbf"
    y: np.ndarray
    gamma: float | None = None
    X: np.ndarray | None = field(default=None, repr=False)

    def decision_row(self, k_row: np.ndarray) -> float:
        """Decision value from a row of kernel values against training samples."""
        return float(np.sum(self.alphas * self.y * k_row) + self.bias)


def _check_labels(y) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    if not set(np.unique(y)) <= {-1.0, 1.0}:
        raise UsageError("labels must be in {-1, +1}")
    return y


def dual_objective(K: np.ndarray, y: np.ndarray, alphas: np.ndarray) -> float:
    ay = alphas * y
    return float(np.sum(alphas) - 0.5 * ay @ K @ ay)


class _Smo:
    def __init__(self, K: np.ndarray, y: np.ndarray, C: float, tol: float):
        self.K = K
        self.y = y
        self.C = C
        self.tol = tol
        m = len(y)
        self.alphas = np.zeros(m)
        self.b = 0.0
        self.errors = -y.astype(np.float64)  # decision - y at alpha = 0

    def run(self, max_passes: int) -> bool:
        m = len(self.y)
        examine_all = True
        for _ in range(max_passes):
            changed = 0
            if examine_all:
                idxs = range(m)
            else:
                idxs = np.nonzero((self.alphas > 0) & (self.alphas < self.C))[0]
            for i2 in idxs:
                changed += self._examine(int(i2))
            if examine_all:
                if changed == 0:
                    return True
                examine_all = False
            elif changed == 0:
                examine_all = True
        return False

    def _examine(self, i2: int) -> int:
        y2, a2, e2 = self.y[i2], self.alphas[i2], self.errors[i2]
        r2 = e2 * y2
        if not ((r2 < -self.tol and a2 < self.C) or (r2 > self.tol and a2 > 0)):
            return 0
        order = np.argsort(-np.abs(self.errors - e2), kind="stable")
        for i1 in order:
            i1 = int(i1)
            if i1 != i2 and self._take_step(i1, i2):
                return 1
        return 0

    def _take_step(self, i1: int, i2: int) -> bool:
        K, y, C = self.K, self.y, self.C
        a1_old, a2_old = self.alphas[i1], self.alphas[i2]
        e1, e2 = self.errors[i1], self.errors[i2]
        if y[i1] != y[i2]:
            lo = max(0.0, a2_old - a1_old)
            hi = min(C, C + a2_old - a1_old)
        else:
            lo = max(0.0, a1_old + a2_old - C)
            hi = min(C, a1_old + a2_old)
        if hi - lo < 1e-12:
            return False
        eta = K[i1, i1] + K[i2, i2] - 2.0 * K[i1, i2]
        if eta <= 1e-12:
            return False
        a2 = a2_old + y[i2] * (e1 - e2) / eta
        a2 = min(max(a2, lo), hi)
        if abs(a2 - a2_old) < 1e-9 * (a2 + a2_old + 1e-9):
            return False
        a1 = a1_old + y[i1] * y[i2] * (a2_old - a2)
        d1, d2 = a1 - a1_old, a2 - a2_old
        b1 = self.b - e1 - y[i1] * d1 * K[i1, i1] - y[i2] * d2 * K[i1, i2]
        b2 = self.b - e2 - y[i1] * d1 * K[i1, i2] - y[i2] * d2 * K[i2, i2]
        if 0 < a1 < C:
            b_new = b1
        elif 0 < a2 < C:
            b_new = b2
        else:
            b_new = (b1 + b2) / 2.0
        self.errors += (
            y[i1] * d1 * K[i1] + y[i2] * d2 * K[i2] + (b_new - self.b)
        )
        self.alphas[i1], self.alphas[i2] = a1, a2
        self.b = b_new
        return True


def fit(data, y, C: float = 1.0, tol: float = DEFAULT_TOL,
        kernel: str = "precomputed", gamma: float | None = None,
        max_passes: int = MAX_PASSES) -> SvcModel:
    """Train by SMO; `data` is a Gram matrix or a feature matrix per `kernel`."""
    y = _check_labels(y)
    m = len(y)
    if m < 2:
        raise UsageError("need at least 2 samples")
    if kernel == "precomputed":
        K = np.asarray(data, dtype=np.float64)
        if K.shape != (m, m):
            raise UsageError(f"Gram matrix shape {K.shape} does not match {m} labels")
        X = None
    elif kernel == "rbf":
        X = np.atleast_2d(np.asarray(data, dtype=np.float64))
        if len(X) != m:
            raise UsageError("feature rows do not match label count")
        if gamma is None:
            gamma = default_gamma(X)
        K = rbf_kernel(X, X, gamma)
    else:
        raise UsageError(f"unknown kernel source {kernel!r}")

    if np.all(y == y[0]):
        # degenerate single-class problem: constant decision at the label
        return SvcModel(np.zeros(m), float(y[0]), [], C, kernel, y, gamma, X)

    smo = _Smo(K, y, C, tol)
    converged = smo.run(max_passes)
    support = [i for i in range(m) if smo.alphas[i] > 1e-12]
    model = SvcModel(smo.alphas, smo.b, support, C, kernel, y, gamma, X)
    if not converged:
        raise ConvergenceError(
            f"SMO did not converge within {max_passes} passes", partial=model
        )
    return model


def predict(model: SvcModel, x) -> int:
    """Sign decision in {-1, +1}; an exact 0 resolves to +1."""
    x = np.asarray(x, dtype=np.float64)
    if model.kernel == "precomputed":
        if x.shape != (len(model.y),):
            raise DimensionError(
                f"kernel row of length {x.size} does not match "
                f"{len(model.y)} training samples"
            )
        val = model.decision_row(x)
    else:
        if x.shape != (model.X.shape[1],):
            raise DimensionError(
                f"feature vector of length {x.size} does not match "
                f"{model.X.shape[1]} training features"
            )
        k_row = rbf_kernel(x[None, :], model.X, model.gamma)[0]
        val = model.decision_row(k_row)
    return 1 if val >= 0 else -1


def predict_batch(model: SvcModel, rows: np.ndarray) -> np.ndarray:
    """Vectorized predict over kernel rows (precomputed) or feature rows (rbf)."""
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    if model.kernel == "rbf":
        rows = rbf_kernel(rows, model.X, model.gamma)
    vals = rows @ (model.alphas * model.y) + model.bias
    return np.where(vals >= 0, 1, -1)
