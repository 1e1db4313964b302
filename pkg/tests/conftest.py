"""Pytest configuration and shared test fixtures.

This module provides fixtures for testing qinstantiate, including seeded
random streams, random circuit builders and small QASM sources.
"""

from collections.abc import Callable

import numpy as np
import pytest

from qinstantiate.circuit import Circuit, Gate, GateKind
from qinstantiate.numerics import haar_random_unitary
from qinstantiate.optimizer_config import OptimizerConfig


@pytest.fixture
def rng() -> np.random.Generator:
    """Provide a seeded random stream.

    Returns:
        A numpy Generator seeded with a fixed value.
    """
    return np.random.default_rng(1234)


def build_random_circuit(
    n: int,
    gates: int,
    rng: np.random.Generator,
    two_qubit_variable: bool = False,
) -> Circuit:
    """Build a random circuit of u3 and cx gates (or variable 2-qubit gates).

    Roughly a third of the gates are two-qubit; every gate gets a Haar-random
    matrix so the circuit unitary is generic.
    """
    out: list[Gate] = []
    for _ in range(gates):
        if n > 1 and rng.random() < 1 / 3:
            a, b = sorted(int(q) for q in rng.choice(n, size=2, replace=False))
            if two_qubit_variable:
                out.append(Gate((a, b), GateKind.VARIABLE, haar_random_unitary(4, rng)))
            elif rng.random() < 0.5:
                out.append(Gate.cx(a, b))
            else:
                out.append(Gate.cx(b, a))
        else:
            q = int(rng.integers(n))
            theta, phi, lam = rng.uniform(-np.pi, np.pi, size=3)
            out.append(Gate.u3(q, theta, phi, lam))
    return Circuit(n, tuple(out))


def build_ansatz(n: int, layers: int, rng: np.random.Generator) -> Circuit:
    """Build a u3/cx ladder ansatz with random u3 angles.

    A u3 layer on every qubit, then per layer a cx between neighbours
    followed by u3 gates on both qubits.
    """
    gates = [Gate.u3(q, *rng.uniform(-np.pi, np.pi, size=3)) for q in range(n)]
    for layer in range(layers):
        starts = range(layer % 2, n - 1, 2) if n > 2 else range(n - 1)
        for a in starts:
            gates.append(Gate.cx(a, a + 1))
            gates.append(Gate.u3(a, *rng.uniform(-np.pi, np.pi, size=3)))
            gates.append(Gate.u3(a + 1, *rng.uniform(-np.pi, np.pi, size=3)))
    return Circuit(n, tuple(gates))


@pytest.fixture
def random_circuit() -> Callable[..., Circuit]:
    """Provide the random u3/cx circuit builder.

    Returns:
        build_random_circuit(n, gates, rng, two_qubit_variable=False).
    """
    return build_random_circuit


@pytest.fixture
def ansatz() -> Callable[..., Circuit]:
    """Provide the u3/cx ladder ansatz builder.

    Returns:
        build_ansatz(n, layers, rng).
    """
    return build_ansatz


@pytest.fixture
def fast_config() -> OptimizerConfig:
    """Provide a configuration sized for quick unit tests.

    Returns:
        OptimizerConfig with few multistarts and a modest sweep cap.
    """
    return OptimizerConfig(
        dist_tol=1e-8, multistarts=4, multistart_batch=2, max_iter=3000, seed=7
    )


@pytest.fixture
def bell_qasm() -> str:
    """Provide a two-qubit u3/cx program.

    Returns:
        OpenQASM 2.0 source with comments and pi expressions.
    """
    return """OPENQASM 2.0;
include "qelib1.inc";
// prepare
qreg q[2];
u3(pi/2, 0, pi) q[0];
cx q[0],q[1];
u3(0.25*pi, -pi/4, 1.5e-1) q[1];  // trailing comment
cx q[1],q[0];
u3(0.1, 0.2, 0.3) q[0];
"""
