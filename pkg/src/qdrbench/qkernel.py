"""Quantum embedding kernels: Gram matrices, target alignment, SVCLoss.

The kernel value is the squared state overlap |<phi(x_i)|phi(x_j)>|^2
(equal to tr[rho(x_i) rho(x_j)] for pure states).  Untrainable kernels use
the configured embedding directly.  Trainable kernels interleave, per
layer, an RY(theta) on every wire, a ring of CNOTs, and the configured
angle-form data rotations, and are trained by maximizing kernel-target
alignment with Adam; gradients go through every Gram entry with the
two-term parameter-shift rule on a per-iteration subsample.

Labels are {-1, +1} at this boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embeddings import ANGLE_KINDS, EmbeddingSpec, embed_batch
from .errors import ConfigurationError, DimensionError, UsageError
from .optim import Adam
from .qnn import TrainSettings
from .sim import apply_2q

# samples in each per-iteration alignment subsample (4 pair-batches of 4)
ALIGNMENT_SUBSAMPLE = 16


@dataclass(frozen=True)
class KernelConfig:
    n_qubits: int
    embedding: EmbeddingSpec
    layers: int = 1
    trainable: bool = False

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ConfigurationError("kernel needs at least 1 qubit")
        if self.layers < 1:
            raise ConfigurationError("layers must be >= 1")
        if self.trainable and self.embedding.kind not in ANGLE_KINDS:
            raise ConfigurationError(
                "trainable kernels require an angle-form embedding"
            )


@dataclass
class GramMatrix:
    entries: np.ndarray

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    def validate(self, sym_tol: float = 1e-10, diag_tol: float = 1e-10,
                 eig_tol: float = -1e-8) -> None:
        k = self.entries
        if not np.allclose(k, k.T, atol=sym_tol, rtol=0):
            raise UsageError("Gram matrix is not symmetric")
        if not np.allclose(np.diag(k), 1.0, atol=diag_tol, rtol=0):
            raise UsageError("Gram matrix diagonal is not 1")
        if np.linalg.eigvalsh(k).min() < eig_tol:
            raise UsageError("Gram matrix is not PSD within tolerance")


def param_count(config: KernelConfig) -> int:
    return config.layers * config.n_qubits if config.trainable else 0


def _apply_angle_batch(amps: np.ndarray, kind: str, angles: np.ndarray,
                       qubit: int) -> np.ndarray:
    """Single-qubit rotation with a per-sample angle on a (B, 2**n) array."""
    if kind == "AngleZ":
        bits = (np.arange(amps.shape[-1]) >> qubit) & 1
        return amps * np.exp(1j * angles[:, None] * (bits[None, :] - 0.5))
    c = np.cos(angles / 2)
    s = np.sin(angles / 2)
    u = np.empty((len(angles), 2, 2), dtype=np.complex128)
    if kind == "AngleX":
        u[:, 0, 0] = c
        u[:, 0, 1] = -1j * s
        u[:, 1, 0] = -1j * s
        u[:, 1, 1] = c
    else:  # AngleY
        u[:, 0, 0] = c
        u[:, 0, 1] = -s
        u[:, 1, 0] = s
        u[:, 1, 1] = c
    dim = amps.shape[-1]
    step = 1 << qubit
    a = amps.reshape(len(amps), dim // (2 * step), 2, step)
    return np.einsum("bij,bkjp->bkip", u, a).reshape(amps.shape)


_RY_CACHE = {}


def _ring(n: int) -> list[tuple[int, int]]:
    if n < 2:
        return []
    pairs = [(i, i + 1) for i in range(n - 1)]
    if n > 2:
        pairs.append((n - 1, 0))
    return pairs


def states(config: KernelConfig, params, X: np.ndarray) -> np.ndarray:
    """Embedded statevectors, one row per sample."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if not config.trainable:
        return embed_batch(X, config.n_qubits, config.embedding)
    params = np.asarray(params, dtype=np.float64)
    if params.shape != (param_count(config),):
        raise UsageError(
            f"kernel params of length {params.size} do not match config "
            f"requiring {param_count(config)}"
        )
    if X.shape[1] != config.n_qubits:
        raise DimensionError(
            f"{X.shape[1]} features do not fit {config.n_qubits} wires"
        )
    n = config.n_qubits
    amps = np.zeros((X.shape[0], 1 << n), dtype=np.complex128)
    amps[:, 0] = 1.0
    from .sim import apply_1q, gate_matrix

    cnot = gate_matrix("CNOT", ())
    for layer in range(config.layers):
        for q in range(n):
            ry = gate_matrix("RY", (float(params[layer * n + q]),))
            amps = apply_1q(amps, ry, q)
        for q1, q2 in _ring(n):
            amps = apply_2q(amps, cnot, q1, q2)
        for q in range(n):
            amps = _apply_angle_batch(amps, config.embedding.kind, X[:, q], q)
    return amps


def kernel_entry(config: KernelConfig, params, xi, xj) -> float:
    s = states(config, params, np.stack([np.asarray(xi, dtype=np.float64),
                                         np.asarray(xj, dtype=np.float64)]))
    return float(np.abs(np.vdot(s[0], s[1])) ** 2)


def gram(config: KernelConfig, params, X: np.ndarray) -> GramMatrix:
    X = np.atleast_2d(X)
    if len(X) < 2:
        raise UsageError("Gram matrix needs at least 2 samples")
    s = states(config, params, X)
    k = np.abs(s @ s.conj().T) ** 2
    return GramMatrix((k + k.T) / 2)


def cross_gram(config: KernelConfig, params, X_a: np.ndarray,
               X_b: np.ndarray) -> np.ndarray:
    """Rectangular kernel block k(a_i, b_j), used for test-set prediction."""
    s_a = states(config, params, X_a)
    s_b = states(config, params, X_b)
    return np.abs(s_a @ s_b.conj().T) ** 2


def _check_pm1(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    if not set(np.unique(y)) <= {-1.0, 1.0}:
        raise UsageError("labels must be in {-1, +1}")
    return y


def target_alignment(K, y) -> float:
    """Normalized Frobenius alignment between K and the label kernel y y^T."""
    k = K.entries if isinstance(K, GramMatrix) else np.asarray(K, dtype=np.float64)
    y = _check_pm1(y)
    if len(y) != k.shape[0]:
        raise UsageError("label count does not match Gram size")
    return float(y @ k @ y / (np.linalg.norm(k) * len(y)))


def svc_loss(K, y, alphas) -> float:
    """SVM dual objective sum(a) - 1/2 sum_ij a_i a_j y_i y_j K_ij."""
    k = K.entries if isinstance(K, GramMatrix) else np.asarray(K, dtype=np.float64)
    y = _check_pm1(y)
    a = np.asarray(alphas, dtype=np.float64)
    if not (len(y) == len(a) == k.shape[0]):
        raise UsageError("alphas, labels and Gram size must match")
    ay = a * y
    return float(np.sum(a) - 0.5 * ay @ k @ ay)


def _alignment_and_grad_entries(k: np.ndarray, dk: np.ndarray,
                                y: np.ndarray) -> float:
    """d(alignment)/d(theta) from the entrywise Gram derivative."""
    m = len(y)
    t = y @ k @ y
    f = np.linalg.norm(k)
    dt = y @ dk @ y
    df = np.sum(k * dk) / f
    return float((dt * f - t * df) / (f * f * m))


def train_kernel(config: KernelConfig, X: np.ndarray, y,
                 settings: TrainSettings, init=None
                 ) -> tuple[np.ndarray, list[float]]:
    """Maximize target alignment with Adam; deterministic given the seed."""
    if not config.trainable:
        raise UsageError("train_kernel requires a trainable kernel config")
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = _check_pm1(y)
    if len(X) != len(y) or len(X) < 2:
        raise UsageError("training needs >= 2 samples with matching labels")
    rng = np.random.default_rng(settings.seed)
    if init is None:
        params = rng.uniform(0.0, 2 * np.pi, size=param_count(config))
    else:
        params = np.asarray(init, dtype=np.float64).copy()
    opt = Adam(lr=settings.learning_rate)
    history = []
    m = len(X)
    sub = min(m, ALIGNMENT_SUBSAMPLE)
    for _ in range(settings.iterations):
        history.append(target_alignment(gram(config, params, X), y))
        take = rng.choice(m, size=sub, replace=False)
        xs, ys = X[take], y[take]
        ks = gram(config, params, xs).entries
        grad = np.zeros_like(params)
        for j in range(params.size):
            shifted = params.copy()
            shifted[j] += np.pi / 2
            k_plus = gram(config, shifted, xs).entries
            shifted[j] -= np.pi
            k_minus = gram(config, shifted, xs).entries
            dk = 0.5 * (k_plus - k_minus)
            grad[j] = _alignment_and_grad_entries(ks, dk, ys)
        params = opt.step(params, -grad)  # ascend alignment
    history.append(target_alignment(gram(config, params, X), y))
    return params, history
