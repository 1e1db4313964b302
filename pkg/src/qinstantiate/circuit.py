"""Circuit intermediate representation.

A Circuit is an ordered tuple of gates (index 0 applied first). Each gate is
a unitary bound to a strictly increasing qubit location. The gate matrix uses
the same little-endian convention as the state tensors: location[0] is the
least significant bit of the gate's local basis index.

Gates are either fixed (never touched by optimizers, e.g. CNOT) or variable
(refit as arbitrary unitaries by the instantiation sweeps).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
import math
from typing import TYPE_CHECKING

import numpy as np

from .config import MAX_DENSE_QUBITS, UNITARY_TOL
from .exceptions import CapacityError, DimensionError, NumericError
from .numerics import full_basis, haar_random_unitary, is_unitary

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence


class GateKind(str, Enum):
    """Whether optimizers may modify a gate."""

    FIXED = "fixed"
    VARIABLE = "variable"


def u3_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    """Return the standard U3(θ, φ, λ) matrix."""
    c = math.cos(theta / 2)
    s = math.sin(theta / 2)
    return np.array(
        [
            [c, -np.exp(1j * lam) * s],
            [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
        ],
        dtype=np.complex128,
    )


def cnot_matrix(control_is_low: bool = True) -> np.ndarray:
    """Return CNOT on a sorted 2-qubit location.

    Args:
        control_is_low: True when the control is location[0] (the lower qubit
            index, least significant local bit); False when it is location[1].
    """
    perm = [0, 3, 2, 1] if control_is_low else [0, 1, 3, 2]
    return np.eye(4, dtype=np.complex128)[perm]


@dataclass(frozen=True, eq=False)
class Gate:
    """A unitary bound to a sorted qubit location.

    Attributes:
        location: Strictly increasing qubit indices.
        kind: FIXED gates are never modified by optimizers.
        unitary: 2^|location| square unitary (read-only copy).
        label: Optional source gate name ("u3", "cx").

    Gates compare by identity.
    """

    location: tuple[int, ...]
    kind: GateKind
    unitary: np.ndarray
    label: str | None = None

    def __post_init__(self) -> None:
        """Validate location and unitarity, and freeze the matrix."""
        location = tuple(int(q) for q in self.location)
        if not location:
            raise DimensionError("gate location must not be empty")
        if any(b <= a for a, b in zip(location, location[1:], strict=False)):
            raise DimensionError(f"gate location {location} is not strictly increasing")
        if location[0] < 0:
            raise DimensionError(f"negative qubit index in {location}")
        unitary = np.array(self.unitary, dtype=np.complex128)
        dim = 2 ** len(location)
        if unitary.shape != (dim, dim):
            raise DimensionError(
                f"gate on {len(location)} qubits needs a {dim}x{dim} matrix, "
                f"got {unitary.shape}"
            )
        if not np.all(np.isfinite(unitary)) or not is_unitary(unitary, UNITARY_TOL):
            raise NumericError(f"gate matrix on {location} is not unitary")
        unitary.setflags(write=False)
        object.__setattr__(self, "location", location)
        object.__setattr__(self, "unitary", unitary)

    @property
    def arity(self) -> int:
        """Number of qubits the gate acts on."""
        return len(self.location)

    @property
    def dim(self) -> int:
        """Matrix dimension 2^arity."""
        return 2**self.arity

    @property
    def is_variable(self) -> bool:
        """True for gates the optimizers refit."""
        return self.kind is GateKind.VARIABLE

    def with_unitary(self, unitary: np.ndarray) -> Gate:
        """Return a copy carrying a new matrix."""
        return replace(self, unitary=unitary)

    def inverse(self) -> Gate:
        """Return the gate implementing u†."""
        return replace(self, unitary=self.unitary.conj().T)

    def relabeled(self, mapping: dict[int, int]) -> Gate:
        """Return the gate moved to new qubit indices (order must be kept)."""
        return replace(self, location=tuple(mapping[q] for q in self.location))

    @classmethod
    def u3(cls, qubit: int, theta: float, phi: float, lam: float) -> Gate:
        """Variable single-qubit gate initialised to U3(θ, φ, λ)."""
        return cls((qubit,), GateKind.VARIABLE, u3_matrix(theta, phi, lam), "u3")

    @classmethod
    def cx(cls, control: int, target: int) -> Gate:
        """Fixed CNOT gate with the given control and target."""
        if control == target:
            raise DimensionError("cx control and target must differ")
        location = (min(control, target), max(control, target))
        return cls(location, GateKind.FIXED, cnot_matrix(control < target), "cx")


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list on n qubits.

    Attributes:
        n: Qubit count.
        gates: Gates in application order.
    """

    n: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        """Check that every gate fits in n qubits."""
        gates = tuple(self.gates)
        if self.n < 1:
            raise DimensionError("circuit needs at least one qubit")
        for gate in gates:
            if gate.location[-1] >= self.n:
                raise DimensionError(
                    f"gate location {gate.location} exceeds {self.n} qubits"
                )
        object.__setattr__(self, "gates", gates)

    def __len__(self) -> int:
        """Number of gates."""
        return len(self.gates)

    @property
    def t(self) -> int:
        """Number of variable gates."""
        return sum(1 for g in self.gates if g.is_variable)

    @property
    def dim(self) -> int:
        """Hilbert-space dimension 2^n."""
        return 2**self.n

    @property
    def u3_count(self) -> int:
        """Single-qubit gate count (every 1-qubit gate exports as u3)."""
        return sum(1 for g in self.gates if g.arity == 1)

    @property
    def cnot_count(self) -> int:
        """Two-qubit gate count."""
        return sum(1 for g in self.gates if g.arity == 2)  # noqa: PLR2004

    def with_gates(self, gates: Iterable[Gate]) -> Circuit:
        """Return a circuit on the same qubits with a new gate list."""
        return Circuit(self.n, tuple(gates))

    def with_gate(self, index: int, gate: Gate) -> Circuit:
        """Return a copy with gate `index` replaced."""
        gates = list(self.gates)
        gates[index] = gate
        return self.with_gates(gates)

    def without(self, *indices: int) -> Circuit:
        """Return a copy with the given gate indices removed."""
        drop = set(indices)
        return self.with_gates(g for i, g in enumerate(self.gates) if i not in drop)

    def concatenate(self, other: Circuit) -> Circuit:
        """Return self followed by other."""
        if other.n != self.n:
            raise DimensionError("cannot concatenate circuits of different widths")
        return self.with_gates((*self.gates, *other.gates))

    def inverse(self) -> Circuit:
        """Return the circuit implementing C†."""
        return self.with_gates(g.inverse() for g in reversed(self.gates))

    def max_arity(self) -> int:
        """Widest gate, 0 for an empty circuit."""
        return max((g.arity for g in self.gates), default=0)


def randomize_variable_gates(circuit: Circuit, rng: np.random.Generator) -> Circuit:
    """Replace every variable gate's matrix by a Haar-random unitary."""
    return circuit.with_gates(
        g.with_unitary(haar_random_unitary(g.dim, rng)) if g.is_variable else g
        for g in circuit.gates
    )


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Compute the 2^n × 2^n unitary of a circuit by brute force.

    Column j is C|j⟩, obtained by propagating the full basis through every gate.

    Raises:
        CapacityError: If n exceeds the dense guard.
    """
    from .simulator import apply_gate

    if circuit.n > MAX_DENSE_QUBITS:
        raise CapacityError(
            f"circuit_unitary limited to {MAX_DENSE_QUBITS} qubits, got {circuit.n}"
        )
    states = full_basis(circuit.n)
    for gate in circuit.gates:
        states = apply_gate(states, gate)
    return states.rows().T.copy()


def embed(matrix: np.ndarray, location: Sequence[int], n: int) -> np.ndarray:
    """Embed a gate matrix on `location` into the full 2^n space (dense)."""
    k = len(location)
    full = np.zeros((2**n, 2**n), dtype=np.complex128)
    for col in range(2**n):
        local_in = sum(((col >> q) & 1) << j for j, q in enumerate(location))
        rest = col
        for q in location:
            rest &= ~(1 << q)
        for local_out in range(2**k):
            row = rest
            for j, q in enumerate(location):
                row |= ((local_out >> j) & 1) << q
            full[row, col] = matrix[local_out, local_in]
    return full


def zyz_reparameterize(u: np.ndarray) -> tuple[float, float, float, float]:
    """Express a 2×2 unitary as e^{iγ}·U3(θ, φ, λ).

    Args:
        u: 2×2 unitary (within 1e-10).

    Returns:
        Tuple (θ, φ, λ, γ) with θ in [0, π] and the other angles in (-π, π].

    Raises:
        NumericError: If u is not a 2×2 unitary.
    """
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (2, 2) or not np.all(np.isfinite(u)) or not is_unitary(u, 1e-10):
        raise NumericError("zyz_reparameterize needs a 2x2 unitary")
    c = abs(u[0, 0])
    s = abs(u[1, 0])
    theta = 2.0 * math.atan2(s, c)
    eps = 1e-12
    if c > eps:
        gamma = float(np.angle(u[0, 0]))
        if s > eps:
            phi = float(np.angle(u[1, 0])) - gamma
            lam = float(np.angle(-u[0, 1])) - gamma
        else:
            lam = 0.0
            phi = float(np.angle(u[1, 1])) - gamma
    else:
        lam = 0.0
        gamma = float(np.angle(-u[0, 1]))
        phi = float(np.angle(u[1, 0])) - gamma
    return theta, _wrap(phi), _wrap(lam), _wrap(gamma)


def _wrap(angle: float) -> float:
    wrapped = math.remainder(angle, 2 * math.pi)
    return math.pi if wrapped == -math.pi else wrapped
