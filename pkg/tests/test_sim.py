"""Statevector simulator vs dense matrix-chain and index-mask oracles."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdrbench.errors import ConfigurationError, DimensionError, GateError
from qdrbench.sim import (
    Gate,
    StateVector,
    apply_circuit,
    apply_gate,
    gate_matrix,
    init_zero,
    inner_product,
    prob_one_amps,
    qubit_probabilities,
)

from oracles import circuit_unitary, prob_one, random_circuit


def test_gate_matrices_are_unitary():
    rng = np.random.default_rng(0)
    for kind, n_params in [("H", 0), ("RX", 1), ("RY", 1), ("RZ", 1),
                           ("U3", 3), ("CNOT", 0), ("CZ", 0), ("CRX", 1),
                           ("CRZ", 1), ("MultiRZ", 1)]:
        for _ in range(5):
            u = gate_matrix(kind, tuple(rng.uniform(-6, 6, size=n_params)))
            assert np.allclose(u.conj().T @ u, np.eye(len(u)), atol=1e-12)


def test_rotation_convention():
    # R(theta) = exp(-i theta P / 2) for P in {X, Y, Z}
    theta = 0.731
    x = np.array([[0, 1], [1, 0]])
    y = np.array([[0, -1j], [1j, 0]])
    z = np.diag([1, -1])
    for kind, p in [("RX", x), ("RY", y), ("RZ", z)]:
        expected = np.cos(theta / 2) * np.eye(2) - 1j * np.sin(theta / 2) * p
        assert np.allclose(gate_matrix(kind, (theta,)), expected, atol=1e-12)


def test_u3_matrix():
    t, phi, lam = 0.4, 1.1, -0.7
    c, s = np.cos(t / 2), np.sin(t / 2)
    expected = np.array([
        [c, -np.exp(1j * lam) * s],
        [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
    ])
    assert np.allclose(gate_matrix("U3", (t, phi, lam)), expected, atol=1e-12)
    # RZ/RY decomposition up to global phase: U3 = e^{i(phi+lam)/2} RZ(phi) RY(t) RZ(lam)
    dec = gate_matrix("RZ", (phi,)) @ gate_matrix("RY", (t,)) @ gate_matrix("RZ", (lam,))
    dec = dec * np.exp(1j * (phi + lam) / 2)
    assert np.allclose(gate_matrix("U3", (t, phi, lam)), dec, atol=1e-12)


def test_multirz_diagonal():
    theta = 0.9
    # exp(-i theta Z(x)Z / 2): phase -theta/2 on aligned bits, +theta/2 otherwise
    u = gate_matrix("MultiRZ", (theta,))
    expected = np.diag(np.exp(-0.5j * theta * np.array([1, -1, -1, 1])))
    assert np.allclose(u, expected, atol=1e-12)


def test_cnot_control_is_first_wire():
    # |10> in (q1=1, q0=0) with control q1 -> target flips
    state = init_zero(2)
    state = apply_gate(state, Gate("RX", (np.pi,), (1,)))  # q1 -> |1>
    state = apply_gate(state, Gate("CNOT", (), (1, 0)))
    assert np.argmax(np.abs(state.amplitudes)) == 0b11


def test_qubit0_is_least_significant():
    state = apply_gate(init_zero(3), Gate("RX", (np.pi,), (0,)))
    assert np.argmax(np.abs(state.amplitudes)) == 0b001


def test_random_circuits_match_matrix_chain():
    rng = np.random.default_rng(42)
    for _ in range(30):
        n = int(rng.integers(1, 5))
        gates = random_circuit(rng, n, int(rng.integers(1, 20)))
        state = apply_circuit(init_zero(n), gates)
        expected = circuit_unitary(gates, n)[:, 0]
        assert np.allclose(state.amplitudes, expected, atol=1e-12)


def test_batched_application_matches_per_row():
    rng = np.random.default_rng(1)
    n = 3
    batch = rng.standard_normal((5, 8)) + 1j * rng.standard_normal((5, 8))
    batch /= np.linalg.norm(batch, axis=1, keepdims=True)
    gates = random_circuit(rng, n, 10)
    u = circuit_unitary(gates, n)
    out = batch
    for g in gates:
        from qdrbench.sim import apply_gate_amps
        out = apply_gate_amps(out, g)
    assert np.allclose(out, batch @ u.T, atol=1e-12)


def test_probabilities_match_mask_oracle():
    rng = np.random.default_rng(2)
    for _ in range(10):
        n = int(rng.integers(1, 5))
        state = apply_circuit(init_zero(n), random_circuit(rng, n, 12))
        for q in range(n):
            p0, p1 = qubit_probabilities(state, q)
            assert p1 == pytest.approx(prob_one(state.amplitudes, q), abs=1e-12)
            assert p0 + p1 == pytest.approx(1.0, abs=1e-12)


def test_prob_one_batched():
    rng = np.random.default_rng(3)
    batch = rng.standard_normal((4, 8)) + 1j * rng.standard_normal((4, 8))
    batch /= np.linalg.norm(batch, axis=1, keepdims=True)
    for q in range(3):
        got = prob_one_amps(batch, q)
        assert got.shape == (4,)
        for i in range(4):
            assert got[i] == pytest.approx(prob_one(batch[i], q), abs=1e-12)


def test_inner_product():
    rng = np.random.default_rng(4)
    a = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    b = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    sa = StateVector(3, a)
    sb = StateVector(3, b)
    assert inner_product(sa, sb) == pytest.approx(np.sum(a.conj() * b))
    with pytest.raises(DimensionError):
        inner_product(sa, StateVector(2, b[:4]))


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_norm_preserved(n, seed):
    rng = np.random.default_rng(seed)
    state = apply_circuit(init_zero(n), random_circuit(rng, n, 15))
    assert state.norm() == pytest.approx(1.0, abs=1e-12)


def test_gate_validation():
    with pytest.raises(GateError):
        Gate("RX", (), (0,))  # missing parameter
    with pytest.raises(GateError):
        Gate("CNOT", (), (1, 1))  # duplicate wires
    with pytest.raises(GateError):
        Gate("FOO", (), (0,))
    with pytest.raises(GateError):
        apply_gate(init_zero(2), Gate("H", (), (2,)))  # wire out of range


def test_qubit_count_limits():
    with pytest.raises(ConfigurationError):
        init_zero(0)
    with pytest.raises(ConfigurationError):
        init_zero(17)
    assert init_zero(16).amplitudes.shape == (65536,)
