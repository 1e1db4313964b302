"""Tests for the OpenQASM subset reader and writer."""

import math

import numpy as np
import pytest

from qinstantiate.circuit import Circuit, Gate, GateKind, circuit_unitary, u3_matrix
from qinstantiate.exceptions import (
    QasmBoundsError,
    QasmParseError,
    UnsupportedExportError,
)
from qinstantiate.numerics import haar_random_unitary
from qinstantiate.qasm import parse_qasm, write_qasm

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[3];\n'


def _same_up_to_phase(a: np.ndarray, b: np.ndarray, atol: float = 1e-9) -> bool:
    overlap = np.vdot(a, b)
    if abs(overlap) < 1e-12:
        return False
    phase = overlap / abs(overlap)
    return bool(np.allclose(a * phase, b, atol=atol))


class TestParse:
    """Parsing valid programs."""

    def test_bell_program(self, bell_qasm):
        circuit = parse_qasm(bell_qasm)
        assert circuit.n == 2
        assert [g.label for g in circuit.gates] == ["u3", "cx", "u3", "cx", "u3"]
        assert circuit.gates[0].kind is GateKind.VARIABLE
        assert circuit.gates[1].kind is GateKind.FIXED

    def test_expressions(self, bell_qasm):
        circuit = parse_qasm(bell_qasm)
        np.testing.assert_allclose(
            circuit.gates[2].unitary,
            u3_matrix(0.25 * math.pi, -math.pi / 4, 0.15),
            atol=1e-15,
        )
        np.testing.assert_allclose(
            circuit.gates[0].unitary, u3_matrix(math.pi / 2, 0, math.pi), atol=1e-15
        )

    def test_operator_precedence(self):
        text = HEADER + "u3(1+2*3, -pi/2 + pi, 2*pi/4) q[0];\n"
        gate = parse_qasm(text).gates[0]
        np.testing.assert_allclose(
            gate.unitary, u3_matrix(7.0, math.pi / 2, math.pi / 2), atol=1e-14
        )

    def test_cx_orientation(self):
        circuit = parse_qasm(HEADER + "cx q[2],q[0];\n")
        gate = circuit.gates[0]
        assert gate.location == (0, 2)
        np.testing.assert_array_equal(gate.unitary, Gate.cx(2, 0).unitary)
        u = circuit_unitary(circuit)
        # control q2 set, target q0 flips: |100> (4) -> |101> (5)
        assert u[5, 4] == 1

    def test_empty_body(self):
        circuit = parse_qasm(HEADER)
        assert circuit.n == 3
        assert len(circuit) == 0

    def test_block_comments_and_whitespace(self):
        text = (
            "OPENQASM 2.0;\n/* header */\ninclude \"qelib1.inc\";\n"
            "qreg   q [ 2 ] ;\n\n  cx  q[0] , q[1] ;\n"
        )
        assert len(parse_qasm(text)) == 1


class TestParseErrors:
    """Diagnostics for invalid programs."""

    def test_bounds_error_has_line(self):
        text = HEADER + "u3(0,0,0) q[0];\ncx q[0],q[3];\n"
        with pytest.raises(QasmBoundsError) as excinfo:
            parse_qasm(text)
        assert excinfo.value.line == 5

    def test_unknown_gate(self):
        with pytest.raises(QasmParseError, match="unknown gate 'h'") as excinfo:
            parse_qasm(HEADER + "h q[0];\n")
        assert excinfo.value.line == 4

    @pytest.mark.parametrize(
        "body",
        [
            "u3(0,0) q[0];",
            "u3 q[0];",
            "u3(0,0,0) q[0],q[1];",
            "cx(0.1) q[0],q[1];",
            "cx q[0];",
            "cx q[1],q[1];",
            "u3(0,0,0) r[0];",
        ],
    )
    def test_malformed_statements(self, body):
        with pytest.raises(QasmParseError):
            parse_qasm(HEADER + body + "\n")

    def test_syntax_error_line(self):
        text = HEADER + "u3(0,0,0) q[0];\nu3(0,0,0 q[1];\n"
        with pytest.raises(QasmParseError) as excinfo:
            parse_qasm(text)
        assert excinfo.value.line == 5

    def test_missing_header(self):
        with pytest.raises(QasmParseError):
            parse_qasm("qreg q[1];\nu3(0,0,0) q[0];\n")

    def test_overflowing_parameter(self):
        with pytest.raises(QasmParseError, match="finite"):
            parse_qasm(HEADER + "u3(1e400,0,0) q[0];\n")

    def test_division_by_zero_in_parameter(self):
        text = HEADER + "u3(0,0,0) q[0];\nu3(pi/0,0,0) q[1];\n"
        with pytest.raises(QasmParseError, match="division by zero") as excinfo:
            parse_qasm(text)
        assert excinfo.value.line == 5

    @pytest.mark.parametrize("version", ["3.0", "2", "1.0"])
    def test_only_version_two(self, version):
        text = f"OPENQASM {version};\nqreg q[1];\nu3(0,0,0) q[0];\n"
        with pytest.raises(QasmParseError) as excinfo:
            parse_qasm(text)
        assert excinfo.value.line == 1


class TestWrite:
    """Serialization and the round-trip contract."""

    def test_variable_two_qubit_gate_is_rejected(self, rng):
        gate = Gate((0, 1), GateKind.VARIABLE, haar_random_unitary(4, rng))
        with pytest.raises(UnsupportedExportError):
            write_qasm(Circuit(2, (gate,)))

    def test_fixed_non_cnot_is_rejected(self):
        swap = np.eye(4)[[0, 2, 1, 3]]
        with pytest.raises(UnsupportedExportError):
            write_qasm(Circuit(2, (Gate((0, 1), GateKind.FIXED, swap),)))

    def test_fixed_single_qubit_gate_is_rejected(self):
        x = np.array([[0, 1], [1, 0]], dtype=complex)
        with pytest.raises(UnsupportedExportError, match="fixed"):
            write_qasm(Circuit(1, (Gate((0,), GateKind.FIXED, x),)))

    def test_refitted_single_qubit_gate_keeps_unitary(self, rng):
        u = haar_random_unitary(2, rng)
        gate = Gate((1,), GateKind.VARIABLE, u)
        written = write_qasm(Circuit(2, (gate,)))
        assert "// phase" in written
        parsed = parse_qasm(written).gates[0]
        assert parsed.location == (1,)
        assert _same_up_to_phase(parsed.unitary, u)

    def test_round_trip_corpus(self, rng, random_circuit):
        for i in range(24):
            n = 1 + i % 4
            original = random_circuit(n, 12, rng)
            first = parse_qasm(write_qasm(original))
            second = parse_qasm(write_qasm(first))
            assert first.n == second.n == n
            assert len(first) == len(second) == len(original)
            for a, b, c in zip(original.gates, first.gates, second.gates, strict=True):
                assert a.location == b.location == c.location
                assert a.kind == b.kind == c.kind
                assert _same_up_to_phase(a.unitary, b.unitary)
                assert _same_up_to_phase(b.unitary, c.unitary)
