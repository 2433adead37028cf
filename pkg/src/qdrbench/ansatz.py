"""Two-qubit ansatz block library.

Each block is a short fixed gate sequence on a wire pair; rotation angles
are the trainable parameters.  Within a block, wire 0 is the first wire of
the pair (the high bit of the 4-dim subspace index) and wire 1 the second.
The Pooling block is applied as (discarded, surviving): both controlled
rotations are controlled on the first wire and act on the second.

`block_matrix_and_derivs` returns the dense 4x4 block unitary together
with its analytic derivative w.r.t. every parameter, which the adjoint
gradient path consumes.
"""

from __future__ import annotations

import numpy as np

from .errors import GateError
from .sim import StateVector, apply_2q, gate_matrix

# kind -> number of trainable angles
PARAM_COUNTS = {
    "U_TTN": 2,
    "U_9": 2,
    "U_13": 6,
    "U_14": 6,
    "U_SO4": 6,
    "U_5": 10,
    "U_6": 10,
    "U_SU4": 15,
    "Pooling": 2,
}

# gate sequence per kind: (gate kind, block wires, parameter slots)
_SEQ = {
    "U_TTN": [
        ("RY", (0,), (0,)),
        ("RY", (1,), (1,)),
        ("CNOT", (0, 1), ()),
    ],
    "U_13": [
        ("RY", (0,), (0,)),
        ("RY", (1,), (1,)),
        ("CRZ", (1, 0), (2,)),
        ("RY", (0,), (3,)),
        ("RY", (1,), (4,)),
        ("CRZ", (0, 1), (5,)),
    ],
    "U_14": [
        ("RY", (0,), (0,)),
        ("RY", (1,), (1,)),
        ("CRX", (1, 0), (2,)),
        ("RY", (0,), (3,)),
        ("RY", (1,), (4,)),
        ("CRX", (0, 1), (5,)),
    ],
    "U_SO4": [
        ("RY", (0,), (0,)),
        ("RY", (1,), (1,)),
        ("CNOT", (0, 1), ()),
        ("RY", (0,), (2,)),
        ("RY", (1,), (3,)),
        ("CNOT", (0, 1), ()),
        ("RY", (0,), (4,)),
        ("RY", (1,), (5,)),
    ],
    "U_5": [
        ("RX", (0,), (0,)),
        ("RX", (1,), (1,)),
        ("RZ", (0,), (2,)),
        ("RZ", (1,), (3,)),
        ("CRZ", (1, 0), (4,)),
        ("CRZ", (0, 1), (5,)),
        ("RX", (0,), (6,)),
        ("RX", (1,), (7,)),
        ("RZ", (0,), (8,)),
        ("RZ", (1,), (9,)),
    ],
    "U_6": [
        ("RX", (0,), (0,)),
        ("RX", (1,), (1,)),
        ("RZ", (0,), (2,)),
        ("RZ", (1,), (3,)),
        ("CRX", (1, 0), (4,)),
        ("CRX", (0, 1), (5,)),
        ("RX", (0,), (6,)),
        ("RX", (1,), (7,)),
        ("RZ", (0,), (8,)),
        ("RZ", (1,), (9,)),
    ],
    "U_9": [
        ("H", (0,), ()),
        ("H", (1,), ()),
        ("CZ", (0, 1), ()),
        ("RX", (0,), (0,)),
        ("RX", (1,), (1,)),
    ],
    "U_SU4": [
        ("U3", (0,), (0, 1, 2)),
        ("U3", (1,), (3, 4, 5)),
        ("CNOT", (0, 1), ()),
        ("RY", (0,), (6,)),
        ("RZ", (1,), (7,)),
        ("CNOT", (1, 0), ()),
        ("RY", (0,), (8,)),
        ("CNOT", (0, 1), ()),
        ("U3", (0,), (9, 10, 11)),
        ("U3", (1,), (12, 13, 14)),
    ],
    "Pooling": [
        ("CRZ", (0, 1), (0,)),
        ("CRX", (0, 1), (1,)),
    ],
}

# parameter slots that belong to controlled rotations (4-term shift rule)
CONTROLLED_PARAM_SLOTS = {
    kind: frozenset(
        slot
        for gk, _, slots in seq
        if gk in ("CRX", "CRZ")
        for slot in slots
    )
    for kind, seq in _SEQ.items()
}

ANSATZ_KINDS = tuple(k for k in PARAM_COUNTS if k != "Pooling")

_I2 = np.eye(2, dtype=np.complex128)
_SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128
)


def _gate_derivative(kind: str, params: tuple[float, ...], which: int) -> np.ndarray:
    """d(matrix)/d(params[which]) for a parameterized gate."""
    if kind == "RX":
        c, s = np.cos(params[0] / 2), np.sin(params[0] / 2)
        return 0.5 * np.array([[-s, -1j * c], [-1j * c, -s]], dtype=np.complex128)
    if kind == "RY":
        c, s = np.cos(params[0] / 2), np.sin(params[0] / 2)
        return 0.5 * np.array([[-s, -c], [c, -s]], dtype=np.complex128)
    if kind == "RZ":
        e = np.exp(-0.5j * params[0])
        return np.diag([-0.5j * e, 0.5j * np.conj(e)]).astype(np.complex128)
    if kind == "U3":
        t, phi, lam = params
        c, s = np.cos(t / 2), np.sin(t / 2)
        ephi, elam, eboth = np.exp(1j * phi), np.exp(1j * lam), np.exp(1j * (phi + lam))
        if which == 0:
            return 0.5 * np.array(
                [[-s, -elam * c], [ephi * c, -eboth * s]], dtype=np.complex128
            )
        if which == 1:
            return np.array(
                [[0, 0], [1j * ephi * s, 1j * eboth * c]], dtype=np.complex128
            )
        return np.array(
            [[0, -1j * elam * s], [0, 1j * eboth * c]], dtype=np.complex128
        )
    if kind in ("CRX", "CRZ"):
        d = np.zeros((4, 4), dtype=np.complex128)
        d[2:, 2:] = _gate_derivative(kind[1:], params, 0)
        return d
    raise GateError(f"gate kind {kind!r} has no parameter derivative")


def _lift(kind: str, params: tuple[float, ...], wires: tuple[int, ...],
          deriv: int | None = None) -> np.ndarray:
    """4x4 matrix of an in-block gate (optionally its parameter derivative)."""
    if deriv is None:
        m = gate_matrix(kind, params)
    else:
        m = _gate_derivative(kind, params, deriv)
    if len(wires) == 1:
        return np.kron(m, _I2) if wires[0] == 0 else np.kron(_I2, m)
    if wires == (0, 1):
        return m
    return _SWAP @ m @ _SWAP  # gate defined with reversed pair order


def block_matrix(kind: str, params) -> np.ndarray:
    """Dense 4x4 unitary of one ansatz block."""
    _check(kind, params)
    u = np.eye(4, dtype=np.complex128)
    for gk, wires, slots in _SEQ[kind]:
        u = _lift(gk, tuple(params[s] for s in slots), wires) @ u
    return u


def block_matrix_and_derivs(kind: str, params) -> tuple[np.ndarray, list[np.ndarray]]:
    """Block unitary plus d(U)/d(theta_k) for every parameter slot."""
    _check(kind, params)
    seq = _SEQ[kind]
    mats = [
        _lift(gk, tuple(params[s] for s in slots), wires)
        for gk, wires, slots in seq
    ]
    # prefix[i] = M_{i-1} ... M_0, suffix[i] = M_{last} ... M_i
    prefix = [np.eye(4, dtype=np.complex128)]
    for m in mats:
        prefix.append(m @ prefix[-1])
    suffix = [np.eye(4, dtype=np.complex128)]
    for m in reversed(mats):
        suffix.append(suffix[-1] @ m)
    suffix.reverse()
    derivs = [np.zeros((4, 4), dtype=np.complex128) for _ in range(PARAM_COUNTS[kind])]
    for i, (gk, wires, slots) in enumerate(seq):
        for j, slot in enumerate(slots):
            dm = _lift(gk, tuple(params[s] for s in slots), wires, deriv=j)
            derivs[slot] += suffix[i + 1] @ dm @ prefix[i]
    return prefix[-1], derivs


def _check(kind: str, params) -> None:
    if kind not in _SEQ:
        raise GateError(f"unknown ansatz kind {kind!r}")
    if len(params) != PARAM_COUNTS[kind]:
        raise GateError(
            f"{kind} takes {PARAM_COUNTS[kind]} parameters, got {len(params)}"
        )


def apply_block(state: StateVector, kind: str, params, wires: tuple[int, int]) -> StateVector:
    """Apply one ansatz block to the wire pair of a state."""
    if len(wires) != 2 or wires[0] == wires[1]:
        raise GateError(f"block needs two distinct wires, got {wires}")
    for w in wires:
        if not 0 <= w < state.n_qubits:
            raise GateError(f"wire {w} out of range for {state.n_qubits}-qubit state")
    u = block_matrix(kind, params)
    return StateVector(state.n_qubits, apply_2q(state.amplitudes, u, wires[0], wires[1]))
