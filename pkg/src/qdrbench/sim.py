"""Dense statevector simulator for up to 16 qubits.

Conventions (pinned by tests):
  - amplitudes are a flat complex128 array indexed with qubit 0 as the
    least significant bit,
  - RX(t) = exp(-i t X / 2) and analogously for RY, RZ,
  - U3(t, phi, lam) is the generic single-qubit rotation in its standard
    matrix form (equal to RZ(phi) RY(t) RZ(lam) up to global phase),
  - two-qubit matrices act on the subspace index 2*bit(first wire) +
    bit(second wire); the control of a controlled gate is the first wire,
  - MultiRZ(t) on two wires is exp(-i t Z(x)Z / 2).

Gates update amplitudes in place per stride (no full-matrix build); the
dense matrix-chain path lives only in the test oracle.  All kernels accept
a batch of statevectors as an array whose *last* axis is the amplitude
axis, which the training code exploits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DimensionError, GateError

MAX_QUBITS = 16

# kind -> (param arity, wire arity)
GATE_SIGNATURES = {
    "H": (0, 1),
    "RX": (1, 1),
    "RY": (1, 1),
    "RZ": (1, 1),
    "U3": (3, 1),
    "CNOT": (0, 2),
    "CZ": (0, 2),
    "CRX": (1, 2),
    "CRZ": (1, 2),
    "MultiRZ": (1, 2),
}

_I2 = np.eye(2, dtype=np.complex128)


def _rx(t: float) -> np.ndarray:
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)


def _ry(t: float) -> np.ndarray:
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def _rz(t: float) -> np.ndarray:
    return np.array(
        [[np.exp(-0.5j * t), 0], [0, np.exp(0.5j * t)]], dtype=np.complex128
    )


def _u3(t: float, phi: float, lam: float) -> np.ndarray:
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array(
        [
            [c, -np.exp(1j * lam) * s],
            [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
        ],
        dtype=np.complex128,
    )


_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
)
_CZ = np.diag([1, 1, 1, -1]).astype(np.complex128)


def _controlled(u: np.ndarray) -> np.ndarray:
    m = np.eye(4, dtype=np.complex128)
    m[2:, 2:] = u
    return m


def _multirz(t: float) -> np.ndarray:
    e = np.exp(-0.5j * t)
    return np.diag([e, np.conj(e), np.conj(e), e]).astype(np.complex128)


def gate_matrix(kind: str, params: tuple[float, ...]) -> np.ndarray:
    """Dense 2x2 or 4x4 matrix of a gate (first wire = high subspace bit)."""
    if kind == "H":
        return _H
    if kind == "RX":
        return _rx(params[0])
    if kind == "RY":
        return _ry(params[0])
    if kind == "RZ":
        return _rz(params[0])
    if kind == "U3":
        return _u3(*params)
    if kind == "CNOT":
        return _CNOT
    if kind == "CZ":
        return _CZ
    if kind == "CRX":
        return _controlled(_rx(params[0]))
    if kind == "CRZ":
        return _controlled(_rz(params[0]))
    if kind == "MultiRZ":
        return _multirz(params[0])
    raise GateError(f"unknown gate kind {kind!r}")


@dataclass(frozen=True)
class Gate:
    kind: str
    params: tuple[float, ...] = ()
    wires: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in GATE_SIGNATURES:
            raise GateError(f"unknown gate kind {self.kind!r}")
        n_params, n_wires = GATE_SIGNATURES[self.kind]
        if len(self.params) != n_params:
            raise GateError(
                f"{self.kind} takes {n_params} parameter(s), got {len(self.params)}"
            )
        if len(self.wires) != n_wires:
            raise GateError(
                f"{self.kind} acts on {n_wires} wire(s), got {len(self.wires)}"
            )
        if len(set(self.wires)) != len(self.wires):
            raise GateError(f"duplicate wires {self.wires} for {self.kind}")

    def matrix(self) -> np.ndarray:
        return gate_matrix(self.kind, self.params)


@dataclass
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def init_zero(n_qubits: int) -> StateVector:
    """|0...0> on n_qubits wires."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ConfigurationError(
            f"qubit count must be in 1..{MAX_QUBITS}, got {n_qubits}"
        )
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n_qubits, amps)


def apply_1q(amps: np.ndarray, u: np.ndarray, qubit: int) -> np.ndarray:
    """Apply a 2x2 matrix to `qubit` of a (..., 2**n) amplitude array."""
    dim = amps.shape[-1]
    step = 1 << qubit
    shape = amps.shape[:-1] + (dim // (2 * step), 2, step)
    a = amps.reshape(shape)
    out = np.empty_like(a)
    a0 = a[..., 0, :]
    a1 = a[..., 1, :]
    out[..., 0, :] = u[0, 0] * a0 + u[0, 1] * a1
    out[..., 1, :] = u[1, 0] * a0 + u[1, 1] * a1
    return out.reshape(amps.shape)


_SWAP_2Q = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128
)


def pair_view(amps: np.ndarray, q_a: int, q_b: int) -> np.ndarray:
    """Strided view (..., M, 2, K, 2, L) exposing bits q_a > q_b as axes."""
    dim = amps.shape[-1]
    return amps.reshape(
        amps.shape[:-1]
        + (dim >> (q_a + 1), 2, 1 << (q_a - q_b - 1), 2, 1 << q_b)
    )


def apply_2q(amps: np.ndarray, u: np.ndarray, q_hi: int, q_lo: int) -> np.ndarray:
    """Apply a 4x4 matrix; subspace index is 2*bit(q_hi) + bit(q_lo)."""
    if q_hi < q_lo:
        u = _SWAP_2Q @ u @ _SWAP_2Q
        q_hi, q_lo = q_lo, q_hi
    v = pair_view(amps, q_hi, q_lo)
    u4 = u.reshape(2, 2, 2, 2)  # [i', j', i, j] with i = bit q_hi, j = bit q_lo
    out = np.einsum("IJij,...mikjl->...mIkJl", u4, v, optimize=True)
    return out.reshape(amps.shape)


def apply_gate_amps(amps: np.ndarray, gate: Gate) -> np.ndarray:
    if len(gate.wires) == 1:
        return apply_1q(amps, gate.matrix(), gate.wires[0])
    return apply_2q(amps, gate.matrix(), gate.wires[0], gate.wires[1])


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Return the state transformed by the gate's unitary."""
    for w in gate.wires:
        if not 0 <= w < state.n_qubits:
            raise GateError(
                f"wire {w} out of range for {state.n_qubits}-qubit state"
            )
    return StateVector(state.n_qubits, apply_gate_amps(state.amplitudes, gate))


def apply_circuit(state: StateVector, gates) -> StateVector:
    out = state
    for g in gates:
        out = apply_gate(out, g)
    return out


def qubit_probabilities(state: StateVector, qubit: int) -> tuple[float, float]:
    """(P(qubit=0), P(qubit=1)) from exact amplitudes."""
    if not 0 <= qubit < state.n_qubits:
        raise ConfigurationError(
            f"qubit {qubit} out of range for {state.n_qubits}-qubit state"
        )
    p1 = prob_one_amps(state.amplitudes, qubit)
    return 1.0 - p1, p1


def prob_one_amps(amps: np.ndarray, qubit: int) -> float | np.ndarray:
    """P(qubit=1) for a (..., 2**n) amplitude array."""
    dim = amps.shape[-1]
    step = 1 << qubit
    shape = amps.shape[:-1] + (dim // (2 * step), 2, step)
    a = amps.reshape(shape)
    p1 = np.sum(np.abs(a[..., 1, :]) ** 2, axis=(-2, -1))
    if p1.ndim == 0:
        return float(p1)
    return p1


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b> of two equally sized states."""
    if a.n_qubits != b.n_qubits:
        raise DimensionError(
            f"qubit count mismatch: {a.n_qubits} vs {b.n_qubits}"
        )
    return complex(np.vdot(a.amplitudes, b.amplitudes))
