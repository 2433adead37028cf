"""Two-qubit ansatz blocks: matrix chains, unitarity, analytic derivatives."""

import numpy as np
import pytest

from qdrbench.ansatz import (
    ANSATZ_KINDS,
    CONTROLLED_PARAM_SLOTS,
    PARAM_COUNTS,
    apply_block,
    block_matrix,
    block_matrix_and_derivs,
)
from qdrbench.errors import GateError
from qdrbench.sim import Gate, apply_circuit, gate_matrix, init_zero

from oracles import circuit_unitary, lift_2q, random_circuit

ALL_KINDS = list(PARAM_COUNTS)

# the same sequences expressed as plain gate lists on block wires (0=high, 1=low)
_BLOCK_GATES = {
    "U_TTN": [("RY", (0,), (0,)), ("RY", (1,), (1,)), ("CNOT", (0, 1), ())],
    "U_9": [("H", (0,), ()), ("H", (1,), ()), ("CZ", (0, 1), ()),
            ("RX", (0,), (0,)), ("RX", (1,), (1,))],
    "U_13": [("RY", (0,), (0,)), ("RY", (1,), (1,)), ("CRZ", (1, 0), (2,)),
             ("RY", (0,), (3,)), ("RY", (1,), (4,)), ("CRZ", (0, 1), (5,))],
    "U_14": [("RY", (0,), (0,)), ("RY", (1,), (1,)), ("CRX", (1, 0), (2,)),
             ("RY", (0,), (3,)), ("RY", (1,), (4,)), ("CRX", (0, 1), (5,))],
    "U_SO4": [("RY", (0,), (0,)), ("RY", (1,), (1,)), ("CNOT", (0, 1), ()),
              ("RY", (0,), (2,)), ("RY", (1,), (3,)), ("CNOT", (0, 1), ()),
              ("RY", (0,), (4,)), ("RY", (1,), (5,))],
    "U_5": [("RX", (0,), (0,)), ("RX", (1,), (1,)), ("RZ", (0,), (2,)),
            ("RZ", (1,), (3,)), ("CRZ", (1, 0), (4,)), ("CRZ", (0, 1), (5,)),
            ("RX", (0,), (6,)), ("RX", (1,), (7,)), ("RZ", (0,), (8,)),
            ("RZ", (1,), (9,))],
    "U_6": [("RX", (0,), (0,)), ("RX", (1,), (1,)), ("RZ", (0,), (2,)),
            ("RZ", (1,), (3,)), ("CRX", (1, 0), (4,)), ("CRX", (0, 1), (5,)),
            ("RX", (0,), (6,)), ("RX", (1,), (7,)), ("RZ", (0,), (8,)),
            ("RZ", (1,), (9,))],
    "U_SU4": [("U3", (0,), (0, 1, 2)), ("U3", (1,), (3, 4, 5)),
              ("CNOT", (0, 1), ()), ("RY", (0,), (6,)), ("RZ", (1,), (7,)),
              ("CNOT", (1, 0), ()), ("RY", (0,), (8,)), ("CNOT", (0, 1), ()),
              ("U3", (0,), (9, 10, 11)), ("U3", (1,), (12, 13, 14))],
    "Pooling": [("CRZ", (0, 1), (0,)), ("CRX", (0, 1), (1,))],
}


def _oracle_block(kind, params):
    """4x4 block matrix via the dense Kronecker oracle on a 2-qubit register.

    Block wire 0 is the high subspace bit, so it maps to physical qubit 1.
    """
    gates = []
    for gk, wires, slots in _BLOCK_GATES[kind]:
        mapped = tuple(1 - w for w in wires)
        gates.append(Gate(gk, tuple(float(params[s]) for s in slots), mapped))
    return circuit_unitary(gates, 2)


def test_param_counts_pinned():
    assert PARAM_COUNTS == {
        "U_TTN": 2, "U_9": 2, "U_13": 6, "U_14": 6, "U_SO4": 6,
        "U_5": 10, "U_6": 10, "U_SU4": 15, "Pooling": 2,
    }
    assert set(ANSATZ_KINDS) == set(PARAM_COUNTS) - {"Pooling"}


def test_controlled_slots_pinned():
    assert CONTROLLED_PARAM_SLOTS["U_13"] == frozenset({2, 5})
    assert CONTROLLED_PARAM_SLOTS["U_14"] == frozenset({2, 5})
    assert CONTROLLED_PARAM_SLOTS["U_5"] == frozenset({4, 5})
    assert CONTROLLED_PARAM_SLOTS["U_6"] == frozenset({4, 5})
    assert CONTROLLED_PARAM_SLOTS["Pooling"] == frozenset({0, 1})
    for kind in ("U_TTN", "U_9", "U_SO4", "U_SU4"):
        assert CONTROLLED_PARAM_SLOTS[kind] == frozenset()


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_block_matrix_matches_gate_chain(kind):
    rng = np.random.default_rng(8)
    for _ in range(5):
        params = rng.uniform(-2 * np.pi, 2 * np.pi, size=PARAM_COUNTS[kind])
        assert np.allclose(block_matrix(kind, params), _oracle_block(kind, params),
                           atol=1e-12)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_block_is_unitary(kind):
    rng = np.random.default_rng(9)
    u = block_matrix(kind, rng.uniform(-6, 6, size=PARAM_COUNTS[kind]))
    assert np.allclose(u.conj().T @ u, np.eye(4), atol=1e-12)


def test_ttn_hand_value():
    t0, t1 = 0.4, -1.2
    expected = (gate_matrix("CNOT", ())
                @ np.kron(gate_matrix("RY", (t0,)), gate_matrix("RY", (t1,))))
    assert np.allclose(block_matrix("U_TTN", [t0, t1]), expected, atol=1e-12)


def test_pooling_is_controlled_by_first_wire():
    # control |0> on the high bit leaves the low-bit subspace untouched
    u = block_matrix("Pooling", [0.7, 1.3])
    assert np.allclose(u[:2, :2], np.eye(2), atol=1e-12)
    assert np.allclose(u[:2, 2:], 0.0, atol=1e-12)
    expected = (gate_matrix("CRX", (1.3,)) @ gate_matrix("CRZ", (0.7,)))
    assert np.allclose(u, expected, atol=1e-12)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_block_derivatives_match_finite_difference(kind):
    rng = np.random.default_rng(10)
    params = rng.uniform(-np.pi, np.pi, size=PARAM_COUNTS[kind])
    u, derivs = block_matrix_and_derivs(kind, params)
    assert np.allclose(u, block_matrix(kind, params), atol=1e-12)
    eps = 1e-6
    for k in range(PARAM_COUNTS[kind]):
        up, dn = params.copy(), params.copy()
        up[k] += eps
        dn[k] -= eps
        fd = (block_matrix(kind, up) - block_matrix(kind, dn)) / (2 * eps)
        assert np.allclose(derivs[k], fd, atol=1e-7)


def test_apply_block_matches_dense_lift():
    rng = np.random.default_rng(11)
    state = apply_circuit(init_zero(3), random_circuit(rng, 3, 8))
    for wires in [(0, 1), (2, 0), (1, 2)]:
        params = rng.uniform(-np.pi, np.pi, size=15)
        out = apply_block(state, "U_SU4", params, wires)
        full = lift_2q(block_matrix("U_SU4", params), wires[0], wires[1], 3)
        assert np.allclose(out.amplitudes, full @ state.amplitudes, atol=1e-12)


def test_block_validation():
    with pytest.raises(GateError):
        block_matrix("U_77", [0.0])
    with pytest.raises(GateError):
        block_matrix("U_TTN", [0.0])  # wrong parameter count
    state = init_zero(2)
    with pytest.raises(GateError):
        apply_block(state, "U_TTN", [0.0, 0.0], (0, 0))
    with pytest.raises(GateError):
        apply_block(state, "U_TTN", [0.0, 0.0], (0, 2))
