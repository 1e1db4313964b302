"""State-vector propagation, cached tensors, environments and costs.

The sampled cost over M training states |ψ_j⟩ is

    c = (1/M) Σ_j ‖U|ψ_j⟩ − C|ψ_j⟩‖²
      = 2 − (2/M) Re Σ_j ⟨ψ_j|U†C|ψ_j⟩

and it is linear in each gate: Σ_j ⟨ψ_j|U†C|ψ_j⟩ = Tr(E·u_i). The caches
hold what every sweep reuses:

- a: the conjugated target outputs conj(U|ψ_j⟩) (row-states ⟨ψ_j|U†)
- b[i]: the inputs propagated through gates 0..i-1 (b[0] = inputs)

A right accumulator is a StateSet of row-states ⟨ψ_j|U† g_{k-1}···g_{i+1}
stored without conjugation, so that contracting it with b[i] over every axis
except gate i's gives the environment E directly.

Every kernel records complex multiply-adds on an OpCounter.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .circuit import Circuit, Gate, circuit_unitary
from .config import MAX_DENSE_QUBITS, MAX_SAMPLED_QUBITS, RENORMALIZE_EVERY
from .exceptions import CacheConsistencyError, CapacityError, DimensionError
from .numerics import StateSet, full_basis

if TYPE_CHECKING:
    from collections.abc import Sequence

Target = np.ndarray | Circuit


@dataclass
class OpCounter:
    """Running totals of simulator work.

    Attributes:
        multiply_adds: Complex multiply-adds in gate applications, target
            propagation, environment contractions and overlaps.
        gate_applications: Gate (or transposed gate) tensor applications.
        environments: Environment matrices built.
        svd_updates: Local SVD updates performed.
    """

    multiply_adds: int = 0
    gate_applications: int = 0
    environments: int = 0
    svd_updates: int = 0

    def add(self, other: OpCounter) -> None:
        """Accumulate another counter into this one."""
        self.multiply_adds += other.multiply_adds
        self.gate_applications += other.gate_applications
        self.environments += other.environments
        self.svd_updates += other.svd_updates

    def to_dict(self) -> dict[str, int]:
        """Return the counters as a plain dictionary."""
        return {
            "multiply_adds": self.multiply_adds,
            "gate_applications": self.gate_applications,
            "environments": self.environments,
            "svd_updates": self.svd_updates,
        }


def _qubit_axes(n: int, location: Sequence[int]) -> tuple[int, ...]:
    """Tensor axes of `location`, most significant gate bit first."""
    return tuple(1 + (n - 1 - q) for q in reversed(location))


def _check_location(states: StateSet, location: Sequence[int]) -> None:
    if location[-1] >= states.n:
        raise DimensionError(
            f"location {tuple(location)} out of range for {states.n} qubits"
        )


def apply_matrix(
    states: StateSet,
    matrix: np.ndarray,
    location: Sequence[int],
    counter: OpCounter | None = None,
) -> StateSet:
    """Apply a 2^k × 2^k matrix on `location` to every state in the set."""
    _check_location(states, location)
    k = len(location)
    axes = _qubit_axes(states.n, location)
    tensor = matrix.reshape((2,) * (2 * k))
    contracted = tuple(range(k, 2 * k))
    product = np.tensordot(tensor, states.amplitudes, axes=(contracted, axes))
    result = np.moveaxis(product, tuple(range(k)), axes)
    if counter is not None:
        counter.multiply_adds += states.m * states.dim * 2**k
        counter.gate_applications += 1
    return StateSet(states.n, np.ascontiguousarray(result))


def apply_gate(
    states: StateSet, gate: Gate, counter: OpCounter | None = None
) -> StateSet:
    """Apply a gate to every state in the set.

    Raises:
        DimensionError: If the gate location is outside the states' qubits.
    """
    return apply_matrix(states, gate.unitary, gate.location, counter)


def absorb_gate(
    right: StateSet, gate: Gate, counter: OpCounter | None = None
) -> StateSet:
    """Fold a gate into a right accumulator: ⟨r| → ⟨r|g, i.e. r → gᵀ r."""
    return apply_matrix(right, gate.unitary.T, gate.location, counter)


def overlap(
    left: StateSet, right: StateSet, counter: OpCounter | None = None
) -> complex:
    """Return Σ_j Σ_x left[j, x]·right[j, x] (bilinear, no conjugation)."""
    if counter is not None:
        counter.multiply_adds += right.m * right.dim
    return complex(np.vdot(left.amplitudes.conj(), right.amplitudes))


def target_outputs(
    target: Target, inputs: StateSet, counter: OpCounter | None = None
) -> StateSet:
    """Return U|ψ_j⟩ for a dense target or a target circuit."""
    if isinstance(target, Circuit):
        if target.n != inputs.n:
            raise DimensionError("target circuit width does not match the inputs")
        states = inputs
        for gate in target.gates:
            states = apply_gate(states, gate, counter)
        return states
    u = np.asarray(target, dtype=np.complex128)
    if u.shape != (inputs.dim, inputs.dim):
        raise DimensionError(
            f"target shape {u.shape} does not match {inputs.n} qubits"
        )
    if counter is not None:
        counter.multiply_adds += inputs.m * inputs.dim * inputs.dim
    return StateSet.from_rows(inputs.n, inputs.rows() @ u.T)


@dataclass
class SimCaches:
    """Cached A and B tensors for one optimization run.

    Attributes:
        a: Conjugated target outputs, conj(U|ψ_j⟩).
        b: b[i] is the inputs after gates 0..i-1; len(b) = gate count + 1.
        dirty_from: First stale index of b; entries below it are valid.
        full: True when the inputs are the complete basis in index order, so
            the trace equals Tr(U†C).
        counter: Operation counter charged by cache maintenance.
    """

    a: StateSet
    b: list[StateSet]
    dirty_from: int
    full: bool = False
    counter: OpCounter = field(default_factory=OpCounter)
    applications: int = 0

    @property
    def inputs(self) -> StateSet:
        """Training inputs (b[0])."""
        return self.b[0]

    @property
    def m(self) -> int:
        """Number of training states."""
        return self.a.m

    @property
    def n(self) -> int:
        """Qubit count."""
        return self.a.n

    def invalidate_after(self, index: int) -> None:
        """Mark b entries after gate `index` stale."""
        self.dirty_from = min(self.dirty_from, index + 1)

    def is_valid(self, index: int) -> bool:
        """True when b[index] reflects the current circuit prefix."""
        return index < self.dirty_from

    def refresh(self, circuit: Circuit) -> None:
        """Rebuild stale b entries from the last valid prefix."""
        gates = circuit.gates
        if len(self.b) != len(gates) + 1:
            raise CacheConsistencyError(
                f"caches hold {len(self.b) - 1} gates, circuit has {len(gates)}"
            )
        for i in range(self.dirty_from, len(gates) + 1):
            states = apply_gate(self.b[i - 1], gates[i - 1], self.counter)
            self.applications += 1
            if self.applications % RENORMALIZE_EVERY == 0:
                states = states.renormalized()
            self.b[i] = states
        self.dirty_from = len(gates) + 1

    def trace(self, circuit: Circuit) -> complex:
        """Return Σ_j ⟨ψ_j|U†C|ψ_j⟩ for the current circuit."""
        self.refresh(circuit)
        return overlap(self.a, self.b[-1], self.counter)

    def cost_from_trace(self, trace: complex) -> float:
        """Training cost for this backend.

        Sampled caches use the state-averaged distance in [0, 4]; full-basis
        caches use the normalized Frobenius distance 1 − Re Tr(U†C)/2^n.
        """
        if self.full:
            return max(1.0 - trace.real / self.a.dim, 0.0)
        return max(2.0 - 2.0 * trace.real / self.m, 0.0)


def _check_sampled_capacity(n: int) -> None:
    if n > MAX_SAMPLED_QUBITS:
        raise CapacityError(
            f"sampled backend limited to {MAX_SAMPLED_QUBITS} qubits, got {n}"
        )


def build_caches(
    target: Target | StateSet,
    circuit: Circuit,
    inputs: StateSet,
    counter: OpCounter | None = None,
) -> SimCaches:
    """Pre-compute the A tensor and every B prefix.

    Args:
        target: Dense unitary, target circuit, or precomputed outputs U|ψ_j⟩.
        circuit: Circuit being optimized.
        inputs: Training states.
        counter: Counter to charge; a fresh one is created if omitted.

    Returns:
        Caches with all b entries valid.

    Raises:
        DimensionError: If target, circuit and inputs disagree on size.
    """
    counter = counter if counter is not None else OpCounter()
    if circuit.n != inputs.n:
        raise DimensionError(
            f"circuit has {circuit.n} qubits, inputs have {inputs.n}"
        )
    _check_sampled_capacity(inputs.n)
    if isinstance(target, StateSet):
        if target.n != inputs.n or target.m != inputs.m:
            raise DimensionError("precomputed outputs do not match the inputs")
        outputs = target
    else:
        outputs = target_outputs(target, inputs, counter)
    a = StateSet(outputs.n, outputs.amplitudes.conj())
    caches = SimCaches(
        a=a,
        b=[inputs] + [inputs] * len(circuit),
        dirty_from=1,
        full=False,
        counter=counter,
    )
    caches.refresh(circuit)
    return caches


def build_full_caches(
    target: Target, circuit: Circuit, counter: OpCounter | None = None
) -> SimCaches:
    """Caches over the complete computational basis (full-unitary backend).

    Raises:
        CapacityError: If n exceeds the dense guard.
    """
    if circuit.n > MAX_DENSE_QUBITS:
        raise CapacityError(
            f"full backend limited to {MAX_DENSE_QUBITS} qubits, got {circuit.n}"
        )
    caches = build_caches(target, circuit, full_basis(circuit.n), counter)
    caches.full = True
    return caches


@dataclass(frozen=True)
class EnvironmentMatrix:
    """Linear-form coefficient of the trace in one gate.

    Attributes:
        gate_index: Position of the gate in the circuit.
        e: d×d matrix with Σ_j ⟨ψ_j|U†C|ψ_j⟩ = Tr(e·u).
    """

    gate_index: int
    e: np.ndarray


def _contract_environment(
    prefix: StateSet,
    right: StateSet,
    location: Sequence[int],
    counter: OpCounter | None,
) -> np.ndarray:
    k = len(location)
    d = 2**k
    axes = _qubit_axes(prefix.n, location)
    front = tuple(range(k))
    b_mat = np.moveaxis(prefix.amplitudes, axes, front).reshape(d, -1)
    r_mat = np.moveaxis(right.amplitudes, axes, front).reshape(d, -1)
    if counter is not None:
        counter.multiply_adds += d * prefix.m * prefix.dim
        counter.environments += 1
    return b_mat @ r_mat.T


def right_accumulator(caches: SimCaches, circuit: Circuit, index: int) -> StateSet:
    """Contract A with gates k-1..index+1 (the suffix after gate `index`)."""
    right = caches.a
    for gate in reversed(circuit.gates[index + 1 :]):
        right = absorb_gate(right, gate, caches.counter)
    return right


def environment_sample(
    caches: SimCaches, circuit: Circuit, index: int, right_acc: StateSet
) -> EnvironmentMatrix:
    """Environment of gate `index` from b[index] and the suffix accumulator.

    Raises:
        CacheConsistencyError: If b[index] is stale.
    """
    if not caches.is_valid(index):
        raise CacheConsistencyError(
            f"b[{index}] is stale (valid entries end before {caches.dirty_from})"
        )
    gate = circuit.gates[index]
    e = _contract_environment(caches.b[index], right_acc, gate.location, caches.counter)
    return EnvironmentMatrix(index, e)


def environment_full(
    target: np.ndarray, circuit: Circuit, index: int
) -> EnvironmentMatrix:
    """Environment with Tr(e·v) = Tr(U† C[gate index → v]).

    Raises:
        CapacityError: If n exceeds the dense guard.
    """
    caches = build_full_caches(target, circuit)
    right = right_accumulator(caches, circuit, index)
    return environment_sample(caches, circuit, index, right)


def sample_cost(caches: SimCaches, circuit: Circuit) -> float:
    """State-averaged distance (1/M) Σ_j ‖U|ψ_j⟩ − C|ψ_j⟩‖², in [0, 4]."""
    trace = caches.trace(circuit)
    return max(2.0 - 2.0 * trace.real / caches.m, 0.0)


def training_cost(caches: SimCaches, circuit: Circuit) -> float:
    """Cost used for stopping: sampled distance or normalized Frobenius."""
    return caches.cost_from_trace(caches.trace(circuit))


def frobenius_cost(target: np.ndarray, circuit: Circuit) -> float:
    """Normalized distance 1 − Re Tr(U†C)/2^n, in [0, 2].

    Raises:
        CapacityError: If n exceeds the dense guard.
        DimensionError: If target and circuit sizes differ.
    """
    u = np.asarray(target, dtype=np.complex128)
    if u.shape != (circuit.dim, circuit.dim):
        raise DimensionError(
            f"target shape {u.shape} does not match {circuit.n} qubits"
        )
    c = circuit_unitary(circuit)
    return max(1.0 - np.vdot(u, c).real / circuit.dim, 0.0)
