"""Tests for the circuit IR."""

import math

import numpy as np
import pytest

from qinstantiate.circuit import (
    Circuit,
    Gate,
    GateKind,
    circuit_unitary,
    cnot_matrix,
    embed,
    randomize_variable_gates,
    u3_matrix,
    zyz_reparameterize,
)
from qinstantiate.exceptions import CapacityError, DimensionError, NumericError
from qinstantiate.numerics import haar_random_unitary, is_unitary


def test_u3_matrix_is_unitary():
    assert is_unitary(u3_matrix(0.3, -1.2, 2.5), tol=1e-14)


def test_u3_special_values():
    np.testing.assert_allclose(u3_matrix(0, 0, 0), np.eye(2), atol=1e-15)
    x = np.array([[0, 1], [1, 0]])
    np.testing.assert_allclose(u3_matrix(math.pi, 0, math.pi), x, atol=1e-15)


class TestGate:
    """Gate validation and helpers."""

    def test_location_must_increase(self):
        with pytest.raises(DimensionError):
            Gate((1, 0), GateKind.VARIABLE, np.eye(4))
        with pytest.raises(DimensionError):
            Gate((0, 0), GateKind.VARIABLE, np.eye(4))

    def test_matrix_size_must_match(self):
        with pytest.raises(DimensionError):
            Gate((0, 1), GateKind.VARIABLE, np.eye(2))

    def test_rejects_non_unitary(self):
        with pytest.raises(NumericError):
            Gate((0,), GateKind.VARIABLE, np.array([[1, 1], [0, 1]]))

    def test_matrix_is_read_only(self):
        gate = Gate.u3(0, 0.1, 0.2, 0.3)
        with pytest.raises(ValueError, match="read-only"):
            gate.unitary[0, 0] = 2

    def test_cx_orientation(self):
        low = Gate.cx(0, 1)
        high = Gate.cx(1, 0)
        assert low.location == high.location == (0, 1)
        assert low.kind is GateKind.FIXED
        np.testing.assert_array_equal(low.unitary, cnot_matrix(control_is_low=True))
        np.testing.assert_array_equal(high.unitary, cnot_matrix(control_is_low=False))

    def test_relabeled_keeps_matrix(self, rng):
        gate = Gate((0, 1), GateKind.VARIABLE, haar_random_unitary(4, rng))
        moved = gate.relabeled({0: 2, 1: 5})
        assert moved.location == (2, 5)
        np.testing.assert_array_equal(moved.unitary, gate.unitary)


class TestCircuitUnitary:
    """Dense circuit unitaries and the qubit ordering convention."""

    def test_cx_little_endian(self):
        # control qubit 0 (least significant bit): |q1 q0> = |01> -> |11>
        u = circuit_unitary(Circuit(2, (Gate.cx(0, 1),)))
        assert u[3, 1] == 1
        assert u[1, 3] == 1
        assert u[0, 0] == 1
        assert u[2, 2] == 1

    def test_cx_high_control(self):
        u = circuit_unitary(Circuit(2, (Gate.cx(1, 0),)))
        assert u[3, 2] == 1
        assert u[1, 1] == 1

    @pytest.mark.parametrize("location", [(0,), (2,), (0, 2), (1, 2), (0, 1, 2)])
    def test_matches_embedding(self, rng, location):
        d = 2 ** len(location)
        gate = Gate(location, GateKind.VARIABLE, haar_random_unitary(d, rng))
        np.testing.assert_allclose(
            circuit_unitary(Circuit(3, (gate,))),
            embed(gate.unitary, location, 3),
            atol=1e-12,
        )

    def test_composition_order(self, rng, random_circuit):
        circuit = random_circuit(3, 8, rng)
        expected = np.eye(8, dtype=complex)
        for gate in circuit.gates:
            expected = embed(gate.unitary, gate.location, 3) @ expected
        np.testing.assert_allclose(circuit_unitary(circuit), expected, atol=1e-12)

    def test_inverse(self, rng, random_circuit):
        circuit = random_circuit(3, 10, rng)
        product = circuit_unitary(circuit.concatenate(circuit.inverse()))
        np.testing.assert_allclose(product, np.eye(8), atol=1e-12)

    def test_empty_circuit_is_identity(self):
        np.testing.assert_array_equal(circuit_unitary(Circuit(2)), np.eye(4))

    def test_capacity_guard(self):
        with pytest.raises(CapacityError):
            circuit_unitary(Circuit(15))


class TestCircuit:
    """Circuit container behavior."""

    def test_gate_outside_register(self):
        with pytest.raises(DimensionError):
            Circuit(2, (Gate.cx(0, 2),))

    def test_counts(self, bell_qasm):
        from qinstantiate.qasm import parse_qasm

        circuit = parse_qasm(bell_qasm)
        assert len(circuit) == 5
        assert circuit.u3_count == 3
        assert circuit.cnot_count == 2
        assert circuit.t == 3
        assert circuit.max_arity() == 2

    def test_without(self, rng, random_circuit):
        circuit = random_circuit(3, 6, rng)
        reduced = circuit.without(1, 4)
        assert len(reduced) == 4
        assert reduced.gates == tuple(
            g for i, g in enumerate(circuit.gates) if i not in (1, 4)
        )

    def test_randomize_keeps_fixed_gates(self, rng):
        circuit = Circuit(2, (Gate.u3(0, 0, 0, 0), Gate.cx(0, 1)))
        randomized = randomize_variable_gates(circuit, rng)
        assert randomized.gates[1] == circuit.gates[1]
        assert not np.allclose(randomized.gates[0].unitary, np.eye(2))
        assert randomized.gates[0].location == (0,)


class TestZyz:
    """Single-qubit re-parameterization."""

    def _rebuild(self, u):
        theta, phi, lam, gamma = zyz_reparameterize(u)
        return np.exp(1j * gamma) * u3_matrix(theta, phi, lam), (theta, phi, lam, gamma)

    def test_random_unitaries(self, rng):
        for _ in range(200):
            u = haar_random_unitary(2, rng)
            rebuilt, (theta, phi, lam, gamma) = self._rebuild(u)
            np.testing.assert_allclose(rebuilt, u, atol=1e-10)
            assert 0 <= theta <= math.pi
            for angle in (phi, lam, gamma):
                assert -math.pi < angle <= math.pi

    @pytest.mark.parametrize(
        "u",
        [
            np.diag([1, 1j]),
            np.diag([np.exp(0.3j), np.exp(-1.1j)]),
            np.array([[0, 1], [1, 0]]),
            np.array([[0, -1j], [1j, 0]]),
            np.eye(2),
        ],
    )
    def test_degenerate_branches(self, u):
        rebuilt, _ = self._rebuild(np.asarray(u, dtype=complex))
        np.testing.assert_allclose(rebuilt, u, atol=1e-12)

    def test_rejects_non_unitary(self):
        with pytest.raises(NumericError):
            zyz_reparameterize(np.array([[1, 1], [0, 1]]))
        with pytest.raises(NumericError):
            zyz_reparameterize(np.eye(4))
