"""QNN circuit assembly, forward evaluation, gradients and Adam training.

A model is a stack of two-qubit ansatz blocks tiled over the register
(`Ladder` wiring pairs (0,1),(2,3),... then (1,2),(3,4),... plus the
wrap-around pair; `OneD` omits the wrap-around), optionally followed by
pooling blocks that funnel onto qubit 0.  The prediction is P(qubit 0 = 1)
with threshold 0.5, and the loss is binary cross-entropy with
probabilities clamped to [1e-7, 1 - 1e-7].

Two gradient paths exist.  `gradient` is the parameter-shift rule (the
two-term rule for plain rotations, the four-term rule for controlled
rotations, both exact).  `gradient_adjoint` is an adjoint-mode sweep that
computes the identical values in O(blocks) statevector passes and is what
`train` uses; the test suite asserts the two agree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import ansatz, sim
from .embeddings import EmbeddingSpec, embed_batch
from .errors import ConfigurationError, UsageError
from .optim import Adam
from .sim import apply_2q, prob_one_amps

PROB_CLAMP = 1e-7

_SQRT2 = np.sqrt(2.0)
_C_PLUS = (_SQRT2 + 1) / (4 * _SQRT2)
_C_MINUS = (_SQRT2 - 1) / (4 * _SQRT2)


@dataclass(frozen=True)
class QnnConfig:
    n_qubits: int
    ansatz: str
    embedding: EmbeddingSpec
    layers: int = 2
    pooling: bool = True
    wiring: str = "Ladder"

    def __post_init__(self):
        if self.ansatz not in ansatz.ANSATZ_KINDS:
            raise ConfigurationError(f"unknown ansatz {self.ansatz!r}")
        if self.n_qubits < 2:
            raise ConfigurationError("QNN needs at least 2 qubits")
        if self.layers < 1:
            raise ConfigurationError("layers must be >= 1")
        if self.wiring not in ("Ladder", "OneD"):
            raise ConfigurationError(f"unknown wiring {self.wiring!r}")


@dataclass(frozen=True)
class TrainSettings:
    iterations: int = 200
    batch_size: int = 32
    learning_rate: float = 0.01
    optimizer: str = "Adam"
    seed: int = 0

    def __post_init__(self):
        if self.iterations < 0 or self.batch_size <= 0 or self.learning_rate <= 0:
            raise ConfigurationError("training settings must be positive")
        if self.optimizer != "Adam":
            raise ConfigurationError(f"unsupported optimizer {self.optimizer!r}")


def _is_power_of_two(n: int) -> bool:
    return n & (n - 1) == 0


def conv_pairs(n_qubits: int, wiring: str) -> list[tuple[int, int]]:
    """Wire pairs of one tiling layer."""
    pairs = [(i, i + 1) for i in range(0, n_qubits - 1, 2)]
    pairs += [(i, i + 1) for i in range(1, n_qubits - 1, 2)]
    if wiring == "Ladder" and n_qubits > 2:
        pairs.append((n_qubits - 1, 0))
    return pairs


def pooling_pairs(n_qubits: int) -> list[tuple[int, int]]:
    """(discarded, surviving) pairs; repeated stages for power-of-two widths."""
    pairs = []
    survivors = list(range(n_qubits))
    while len(survivors) > 1:
        stage = [
            (survivors[2 * k + 1], survivors[2 * k])
            for k in range(len(survivors) // 2)
        ]
        pairs.extend(stage)
        remaining = [survivors[2 * k] for k in range(len(survivors) // 2)]
        if len(survivors) % 2 == 1:
            remaining.append(survivors[-1])
        survivors = remaining
        if not _is_power_of_two(n_qubits):
            break  # single pooling stage at non-power-of-two widths
    return pairs


@dataclass(frozen=True)
class _Block:
    kind: str
    wires: tuple[int, int]
    offset: int  # position of the block's first parameter in the flat vector

    @property
    def n_params(self) -> int:
        return ansatz.PARAM_COUNTS[self.kind]


def circuit_blocks(config: QnnConfig) -> list[_Block]:
    blocks = []
    offset = 0
    p = ansatz.PARAM_COUNTS[config.ansatz]
    for _ in range(config.layers):
        for wires in conv_pairs(config.n_qubits, config.wiring):
            blocks.append(_Block(config.ansatz, wires, offset))
            offset += p
    if config.pooling:
        for wires in pooling_pairs(config.n_qubits):
            blocks.append(_Block("Pooling", wires, offset))
            offset += 2
    return blocks


def param_count(config: QnnConfig) -> int:
    blocks = circuit_blocks(config)
    return blocks[-1].offset + blocks[-1].n_params if blocks else 0


def init_params(config: QnnConfig, seed: int) -> np.ndarray:
    """Uniform [0, 2pi) initialization from the experiment seed."""
    rng = np.random.default_rng(seed)
    return rng.uniform(0.0, 2 * np.pi, size=param_count(config))


def _check_params(config: QnnConfig, params: np.ndarray) -> np.ndarray:
    params = np.asarray(params, dtype=np.float64)
    expected = param_count(config)
    if params.shape != (expected,):
        raise UsageError(
            f"parameter vector of length {params.size} does not match "
            f"config requiring {expected}"
        )
    return params


def forward_batch(config: QnnConfig, params: np.ndarray, X: np.ndarray) -> np.ndarray:
    """P(qubit 0 = 1) for every row of X."""
    params = _check_params(config, params)
    amps = embed_batch(X, config.n_qubits, config.embedding)
    for blk in circuit_blocks(config):
        u = ansatz.block_matrix(blk.kind, params[blk.offset: blk.offset + blk.n_params])
        amps = apply_2q(amps, u, blk.wires[0], blk.wires[1])
    return np.atleast_1d(prob_one_amps(amps, 0))


def forward(config: QnnConfig, params: np.ndarray, x) -> float:
    return float(forward_batch(config, params, np.atleast_2d(x))[0])


def predict(config: QnnConfig, params: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Hard labels in {0,1}; label 1 when p1 >= 0.5."""
    return (forward_batch(config, params, X) >= 0.5).astype(int)


def _clamped(p: np.ndarray) -> np.ndarray:
    return np.clip(p, PROB_CLAMP, 1.0 - PROB_CLAMP)


def bce_loss(p1: np.ndarray, y: np.ndarray) -> float:
    p = _clamped(np.asarray(p1, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64)
    return float(np.mean(-(y * np.log(p) + (1 - y) * np.log(1 - p))))


def _dloss_dp(p1: np.ndarray, y: np.ndarray) -> np.ndarray:
    """d(per-sample BCE)/d(p1); zero where the probability clamp is active."""
    p = _clamped(p1)
    g = (p - y) / (p * (1 - p))
    g[(p1 < PROB_CLAMP) | (p1 > 1.0 - PROB_CLAMP)] = 0.0
    return g


def loss(config: QnnConfig, params: np.ndarray, X: np.ndarray, y: np.ndarray) -> float:
    X = np.atleast_2d(X)
    y = np.asarray(y)
    if len(X) == 0 or len(X) != len(y):
        raise UsageError("loss needs a non-empty batch with matching labels")
    return bce_loss(forward_batch(config, params, X), y)


def gradient(config: QnnConfig, params: np.ndarray, X: np.ndarray,
             y: np.ndarray) -> np.ndarray:
    """Parameter-shift gradient of the batch loss."""
    params = _check_params(config, params)
    X = np.atleast_2d(X)
    y = np.asarray(y, dtype=np.float64)
    if len(X) == 0 or len(X) != len(y):
        raise UsageError("gradient needs a non-empty batch with matching labels")
    dldp = _dloss_dp(forward_batch(config, params, X), y) / len(X)
    grad = np.zeros_like(params)
    for blk in circuit_blocks(config):
        controlled = ansatz.CONTROLLED_PARAM_SLOTS[blk.kind]
        for slot in range(blk.n_params):
            k = blk.offset + slot

            def f(shift: float) -> np.ndarray:
                shifted = params.copy()
                shifted[k] += shift
                return forward_batch(config, shifted, X)

            if slot in controlled:
                dp = _C_PLUS * (f(np.pi / 2) - f(-np.pi / 2)) \
                    - _C_MINUS * (f(3 * np.pi / 2) - f(-3 * np.pi / 2))
            else:
                dp = 0.5 * (f(np.pi / 2) - f(-np.pi / 2))
            grad[k] = np.dot(dldp, dp)
    return grad


def prob_gradient_adjoint(config: QnnConfig, params: np.ndarray,
                          X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(p1 per sample, d(p1)/d(theta) per sample) via an adjoint sweep.

    One forward pass plus two backward passes per block, independent of the
    per-block parameter count: block-parameter derivatives are contracted
    against a 4x4 overlap matrix on the block's wire pair.
    """
    params = _check_params(config, params)
    X = np.atleast_2d(X)
    blocks = circuit_blocks(config)
    mats = []
    amps = embed_batch(X, config.n_qubits, config.embedding)
    for blk in blocks:
        u, dus = ansatz.block_matrix_and_derivs(
            blk.kind, params[blk.offset: blk.offset + blk.n_params]
        )
        mats.append((u, dus))
        amps = apply_2q(amps, u, blk.wires[0], blk.wires[1])

    p1 = np.atleast_1d(prob_one_amps(amps, 0))
    # lambda = projector(qubit0 = 1) applied to the final state
    bits = (np.arange(amps.shape[-1]) >> 0) & 1
    lam = amps * bits[None, :]
    psi = amps
    dp = np.zeros((X.shape[0], params.size))
    swap = sim._SWAP_2Q.real
    for blk, (u, dus) in zip(reversed(blocks), reversed(mats)):
        q_hi, q_lo = blk.wires
        u_dag = u.conj().T
        psi = apply_2q(psi, u_dag, q_hi, q_lo)
        # E[i, a, b] = sum_rest conj(lam_i[a]) psi_i[b] on the pair subspace
        a, b = max(blk.wires), min(blk.wires)
        lam_v = sim.pair_view(lam, a, b)
        psi_v = sim.pair_view(psi, a, b)
        env = np.einsum("xmIkJl,xmikjl->xIJij", lam_v.conj(), psi_v,
                        optimize=True)
        env = env.reshape(-1, 4, 4)
        if q_hi < q_lo:  # pair axes were built high-bit-first; reorder
            env = swap @ env @ swap
        for slot, du in enumerate(dus):
            dp[:, blk.offset + slot] = 2.0 * np.real(
                np.einsum("ab,iab->i", du, env)
            )
        lam = apply_2q(lam, u_dag, q_hi, q_lo)
    return p1, dp


def gradient_adjoint(config: QnnConfig, params: np.ndarray, X: np.ndarray,
                     y: np.ndarray) -> np.ndarray:
    """Adjoint-mode gradient of the batch loss; equals `gradient` exactly."""
    X = np.atleast_2d(X)
    y = np.asarray(y, dtype=np.float64)
    if len(X) == 0 or len(X) != len(y):
        raise UsageError("gradient needs a non-empty batch with matching labels")
    p1, dp = prob_gradient_adjoint(config, params, X)
    dldp = _dloss_dp(p1, y) / len(X)
    return dldp @ dp


def train(config: QnnConfig, settings: TrainSettings, X: np.ndarray,
          y: np.ndarray) -> tuple[np.ndarray, list[float]]:
    """Adam mini-batch training; deterministic given settings.seed."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y)
    if len(X) == 0 or len(X) != len(y):
        raise UsageError("training needs a non-empty dataset with matching labels")
    if not set(np.unique(y)) <= {0, 1}:
        raise UsageError("training labels must be in {0, 1}")
    rng = np.random.default_rng(settings.seed)
    params = rng.uniform(0.0, 2 * np.pi, size=param_count(config))
    opt = Adam(lr=settings.learning_rate)
    history = []
    n = len(X)
    batch = min(settings.batch_size, n)
    for _ in range(settings.iterations):
        take = rng.choice(n, size=batch, replace=False)
        xb, yb = X[take], y[take].astype(np.float64)
        p1, dp = prob_gradient_adjoint(config, params, xb)
        history.append(bce_loss(p1, yb))
        grad = (_dloss_dp(p1, yb) / batch) @ dp
        params = opt.step(params, grad)
    return params, history
