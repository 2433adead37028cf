"""Independent reference implementations used as test oracles.

These deliberately avoid the package's stride/index kernels: unitaries are
built as dense 2**n x 2**n matrices by Kronecker placement and circuits as
explicit matrix chains, so any indexing bug in the fast paths is caught.
"""

from __future__ import annotations

import numpy as np

from qdrbench.sim import Gate


def lift_1q(u: np.ndarray, qubit: int, n: int) -> np.ndarray:
    """Embed a 2x2 matrix acting on `qubit` (qubit 0 = least-significant bit)."""
    return np.kron(np.kron(np.eye(1 << (n - 1 - qubit)), u), np.eye(1 << qubit))


def lift_2q(u: np.ndarray, q_hi: int, q_lo: int, n: int) -> np.ndarray:
    """Embed a 4x4 matrix whose subspace index is 2*bit(q_hi) + bit(q_lo)."""
    dim = 1 << n
    full = np.zeros((dim, dim), dtype=np.complex128)
    for row in range(dim):
        r_hi = (row >> q_hi) & 1
        r_lo = (row >> q_lo) & 1
        rest = row & ~(1 << q_hi) & ~(1 << q_lo)
        for c_hi in (0, 1):
            for c_lo in (0, 1):
                col = rest | (c_hi << q_hi) | (c_lo << q_lo)
                full[row, col] = u[2 * r_hi + r_lo, 2 * c_hi + c_lo]
    return full


def circuit_unitary(gates: list[Gate], n: int) -> np.ndarray:
    """Dense unitary of a gate list (later gates multiply from the left)."""
    full = np.eye(1 << n, dtype=np.complex128)
    for g in gates:
        m = g.matrix()
        if len(g.wires) == 1:
            full = lift_1q(m, g.wires[0], n) @ full
        else:
            full = lift_2q(m, g.wires[0], g.wires[1], n) @ full
    return full


def prob_one(amps: np.ndarray, qubit: int) -> float:
    """P(qubit = 1) by explicit index masking."""
    idx = np.arange(len(amps))
    mask = (idx >> qubit) & 1 == 1
    return float(np.sum(np.abs(amps[mask]) ** 2))


def random_circuit(rng: np.random.Generator, n: int, n_gates: int) -> list[Gate]:
    """A random gate list over the full supported gate alphabet."""
    one_q = ["H", "RX", "RY", "RZ", "U3"]
    two_q = ["CNOT", "CZ", "CRX", "CRZ", "MultiRZ"]
    n_params = {"H": 0, "RX": 1, "RY": 1, "RZ": 1, "U3": 3,
                "CNOT": 0, "CZ": 0, "CRX": 1, "CRZ": 1, "MultiRZ": 1}
    gates = []
    for _ in range(n_gates):
        if n >= 2 and rng.random() < 0.5:
            kind = two_q[rng.integers(len(two_q))]
            wires = tuple(rng.choice(n, size=2, replace=False).tolist())
        else:
            kind = one_q[rng.integers(len(one_q))]
            wires = (int(rng.integers(n)),)
        params = tuple(rng.uniform(-2 * np.pi, 2 * np.pi, size=n_params[kind]))
        gates.append(Gate(kind, params, wires))
    return gates


def finite_difference(f, params: np.ndarray, eps: float = 1e-6) -> np.ndarray:
    """Central-difference gradient of a scalar function."""
    grad = np.zeros_like(params)
    for k in range(len(params)):
        up = params.copy()
        dn = params.copy()
        up[k] += eps
        dn[k] -= eps
        grad[k] = (f(up) - f(dn)) / (2 * eps)
    return grad
