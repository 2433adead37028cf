"""Classical-to-quantum data embeddings: angle (X/Y/Z), amplitude, IQP.

All embeddings are pure deterministic functions of (x, n_qubits, spec).
The batched entry point `embed_batch` produces a (batch, 2**n) amplitude
array and is what the models use internally; `embed` is the single-sample
wrapper returning a StateVector.

The IQP circuit is `iqp_repeats` repetitions of: H on every wire, RZ(x_i)
on wire i, and MultiRZ(x_i * x_j) on every adjacent pair (i, i+1) in a
ring (the ring is skipped for one wire and reduces to the single pair for
two wires).  Feature values are interpreted as radians and used as given;
any scaling is the data pipeline's responsibility.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DimensionError, NormalizationError

ANGLE_KINDS = ("AngleX", "AngleY", "AngleZ")
EMBEDDING_KINDS = ANGLE_KINDS + ("Amplitude", "IQP")


@dataclass(frozen=True)
class EmbeddingSpec:
    kind: str
    iqp_repeats: int = 2

    def __post_init__(self):
        if self.kind not in EMBEDDING_KINDS:
            raise ConfigurationError(f"unknown embedding kind {self.kind!r}")
        if self.kind == "IQP" and self.iqp_repeats < 1:
            raise ConfigurationError("iqp_repeats must be >= 1")


def _check_features(n_features: int, n_qubits: int, spec: EmbeddingSpec) -> None:
    if spec.kind == "Amplitude":
        if n_features > (1 << n_qubits):
            raise DimensionError(
                f"amplitude embedding of {n_features} features needs more than "
                f"{n_qubits} qubits"
            )
    elif n_features != n_qubits:
        raise DimensionError(
            f"{spec.kind} embedding requires feature count == n_qubits "
            f"({n_features} != {n_qubits})"
        )


def _angle_qubit_states(x: np.ndarray, kind: str) -> np.ndarray:
    """Per-qubit 2-vectors (batch, n, 2) for a product-state angle embedding."""
    c = np.cos(x / 2)
    s = np.sin(x / 2)
    v = np.empty(x.shape + (2,), dtype=np.complex128)
    if kind == "AngleX":
        v[..., 0] = c
        v[..., 1] = -1j * s
    elif kind == "AngleY":
        v[..., 0] = c
        v[..., 1] = s
    else:  # AngleZ on |0> only picks up a phase
        v[..., 0] = np.exp(-0.5j * x)
        v[..., 1] = 0.0
    return v


def _product_state(v: np.ndarray) -> np.ndarray:
    """Tensor product of per-qubit vectors, qubit 0 as least significant bit."""
    batch, n = v.shape[0], v.shape[1]
    amps = np.ones((batch, 1), dtype=np.complex128)
    for q in range(n - 1, -1, -1):
        amps = (amps[:, :, None] * v[:, q, None, :]).reshape(batch, -1)
    return amps


def _diag_rz(amps: np.ndarray, angles: np.ndarray, qubit: int) -> np.ndarray:
    bits = (np.arange(amps.shape[-1]) >> qubit) & 1
    return amps * np.exp(1j * angles[:, None] * (bits[None, :] - 0.5))


def _diag_multirz(amps: np.ndarray, angles: np.ndarray, q1: int, q2: int) -> np.ndarray:
    idx = np.arange(amps.shape[-1])
    z = (1 - 2 * ((idx >> q1) & 1)) * (1 - 2 * ((idx >> q2) & 1))
    return amps * np.exp(-0.5j * angles[:, None] * z[None, :])


def _hadamard_all(amps: np.ndarray, n_qubits: int) -> np.ndarray:
    from .sim import apply_1q, _H

    for q in range(n_qubits):
        amps = apply_1q(amps, _H, q)
    return amps


def _ring_pairs(n: int) -> list[tuple[int, int]]:
    if n < 2:
        return []
    pairs = [(i, i + 1) for i in range(n - 1)]
    if n > 2:
        pairs.append((n - 1, 0))
    return pairs


def embed_batch(X: np.ndarray, n_qubits: int, spec: EmbeddingSpec) -> np.ndarray:
    """Embed rows of X; returns a (len(X), 2**n_qubits) amplitude array."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    _check_features(X.shape[1], n_qubits, spec)

    if spec.kind == "Amplitude":
        dim = 1 << n_qubits
        norms = np.linalg.norm(X, axis=1)
        if np.any(norms == 0.0):
            raise NormalizationError("amplitude embedding of an all-zero vector")
        amps = np.zeros((X.shape[0], dim), dtype=np.complex128)
        amps[:, : X.shape[1]] = X / norms[:, None]
        return amps

    if spec.kind in ANGLE_KINDS:
        return _product_state(_angle_qubit_states(X, spec.kind))

    # IQP
    dim = 1 << n_qubits
    amps = np.zeros((X.shape[0], dim), dtype=np.complex128)
    amps[:, 0] = 1.0
    for _ in range(spec.iqp_repeats):
        amps = _hadamard_all(amps, n_qubits)
        for q in range(n_qubits):
            amps = _diag_rz(amps, X[:, q], q)
        for q1, q2 in _ring_pairs(n_qubits):
            amps = _diag_multirz(amps, X[:, q1] * X[:, q2], q1, q2)
    return amps


def embed(x, n_qubits: int, spec: EmbeddingSpec):
    """Embed one feature vector into a normalized StateVector."""
    from .sim import StateVector

    amps = embed_batch(np.asarray(x, dtype=np.float64)[None, :], n_qubits, spec)
    return StateVector(n_qubits, amps[0])
