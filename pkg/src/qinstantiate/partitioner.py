"""Greedy partitioning of a circuit into blocks on at most k qubits.

The scan keeps one open block. Walking the remaining gates left to right, a
gate joins the block when the block's qubit set stays within k and none of
the gate's qubits is blocked. Otherwise the gate is deferred and its qubits
become blocked for the rest of the scan, so later gates on those qubits are
deferred too and keep their relative order. The deferred gates seed the next
block. Emitting the blocks in creation order is therefore a legal reordering
of the original gate list.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import TYPE_CHECKING

from pydantic import BaseModel, Field, computed_field

from .circuit import Circuit, Gate
from .exceptions import DimensionError, InfeasiblePartitionError

if TYPE_CHECKING:
    from collections.abc import Sequence


@dataclass(frozen=True)
class Partition:
    """A block of gates owned by one partition.

    Attributes:
        index: Creation order of the block.
        qubits: Sorted original qubit indices the block lives on.
        gate_indices: Original indices of the gates it owns, in order.
        block: The owned gates relabeled onto qubits 0..len(qubits)-1.
    """

    index: int
    qubits: tuple[int, ...]
    gate_indices: tuple[int, ...]
    block: Circuit

    @property
    def size(self) -> int:
        """Number of qubits of the block."""
        return len(self.qubits)

    def lift(self, block: Circuit) -> list[Gate]:
        """Map a block circuit back onto the original qubits.

        Raises:
            DimensionError: If the block has a different qubit count.
        """
        if block.n != self.size:
            raise DimensionError(
                f"block on {block.n} qubits does not fit partition of {self.size}"
            )
        mapping = dict(enumerate(self.qubits))
        return [g.relabeled(mapping) for g in block.gates]


class CoverageBin(BaseModel):
    """Partitions of one qubit size."""

    size: int = Field(description="Qubits per partition")
    partitions: int = Field(description="Number of partitions of this size")
    gates: int = Field(description="Gates owned by partitions of this size")
    fraction: float = Field(description="Share of all gates owned at this size")


class CoverageReport(BaseModel):
    """Per-size histogram of how much of a circuit each block size covers."""

    k: int = Field(description="Requested maximum block size")
    total_gates: int = Field(description="Gates in the partitioned circuit")
    bins: list[CoverageBin] = Field(
        default_factory=list, description="One bin per block size, ascending"
    )

    @computed_field
    @property
    def partition_count(self) -> int:
        """Total number of partitions."""
        return sum(b.partitions for b in self.bins)

    def fraction_at_least(self, size: int) -> float:
        """Share of gates owned by partitions with at least `size` qubits."""
        return sum(b.fraction for b in self.bins if b.size >= size)


def coverage(partitions: Sequence[Partition], k: int) -> CoverageReport:
    """Build the coverage histogram for a list of partitions."""
    total = sum(len(p.gate_indices) for p in partitions)
    counts: Counter[int] = Counter()
    gates: Counter[int] = Counter()
    for p in partitions:
        counts[p.size] += 1
        gates[p.size] += len(p.gate_indices)
    bins = [
        CoverageBin(
            size=size,
            partitions=counts[size],
            gates=gates[size],
            fraction=gates[size] / total if total else 0.0,
        )
        for size in sorted(counts)
    ]
    return CoverageReport(k=k, total_gates=total, bins=bins)


def _make_partition(index: int, circuit: Circuit, owned: list[int]) -> Partition:
    qubits = tuple(sorted({q for i in owned for q in circuit.gates[i].location}))
    local = {q: j for j, q in enumerate(qubits)}
    block = Circuit(
        len(qubits), tuple(circuit.gates[i].relabeled(local) for i in owned)
    )
    return Partition(index, qubits, tuple(owned), block)


def partition(circuit: Circuit, k: int) -> tuple[list[Partition], CoverageReport]:
    """Split a circuit into blocks on at most k qubits.

    Args:
        circuit: Circuit to split.
        k: Maximum qubits per block.

    Returns:
        Tuple of (partitions in creation order, coverage report).

    Raises:
        InfeasiblePartitionError: If some gate acts on more than k qubits.
    """
    widest = circuit.max_arity()
    if k < 1 or widest > k:
        raise InfeasiblePartitionError(widest, k)

    partitions: list[Partition] = []
    remaining = list(range(len(circuit)))
    while remaining:
        block_qubits: set[int] = set()
        blocked: set[int] = set()
        owned: list[int] = []
        deferred: list[int] = []
        for i in remaining:
            qubits = set(circuit.gates[i].location)
            if not qubits & blocked and len(block_qubits | qubits) <= k:
                block_qubits |= qubits
                owned.append(i)
            else:
                deferred.append(i)
                blocked |= qubits
        partitions.append(_make_partition(len(partitions), circuit, owned))
        remaining = deferred

    return partitions, coverage(partitions, k)


def reassemble(
    n: int, partitions: Sequence[Partition], blocks: Sequence[Circuit]
) -> Circuit:
    """Concatenate blocks, lifted to the original qubits, in partition order."""
    gates: list[Gate] = []
    for part, block in zip(partitions, blocks, strict=True):
        gates.extend(part.lift(block))
    return Circuit(n, tuple(gates))
