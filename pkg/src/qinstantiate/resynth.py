"""Partition-based gate-deletion re-synthesis.

The flow splits a circuit into blocks of at most k qubits, then walks each
block left to right trying to delete one gate at a time. A deletion is kept
only if the reduced block re-instantiates to the block's original unitary
with a converged run. Fixed gates (CNOTs) stay fixed; only variable gates are
refit. Blocks are independent and processed in a thread pool, then lifted
back onto the original qubits in partition order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import time
from typing import TYPE_CHECKING

from rich.console import Console
from rich.markup import escape
from rich.progress import (
    BarColumn,
    Progress,
    SpinnerColumn,
    TaskProgressColumn,
    TextColumn,
)

from .circuit import Circuit, circuit_unitary
from .config import MAX_PARTITION_QUBITS, RESYNTH_MAX_ITER, RESYNTH_VERIFY_QUBITS
from .exceptions import CapacityError, InstantiationError
from .models import PartitionRecord, ResynthReport, TimingInfo
from .numerics import derive_seed
from .optimizer import multistart_instantiate
from .partitioner import Partition, partition, reassemble
from .simulator import frobenius_cost

if TYPE_CHECKING:
    import numpy as np

    from .optimizer_config import OptimizerConfig

console = Console(stderr=True)


@dataclass(frozen=True)
class DeletionResult:
    """Outcome of a gate-deletion pass over one block.

    Attributes:
        block: The reduced, re-instantiated block.
        deletions: Gates removed.
        distance: Normalized Frobenius distance to the original block unitary.
        trials: Deletion attempts made.
    """

    block: Circuit
    deletions: int
    distance: float
    trials: int


def _next_on_same_qubits(circuit: Circuit, index: int) -> int | None:
    """Index of the next gate on exactly the same qubits, if nothing interferes."""
    location = circuit.gates[index].location
    qubits = set(location)
    for j in range(index + 1, len(circuit)):
        other = circuit.gates[j].location
        if qubits & set(other):
            return j if other == location else None
    return None


def _reinstantiate(
    target: np.ndarray, candidate: Circuit, config: OptimizerConfig
) -> Circuit | None:
    if candidate.t == 0:
        if frobenius_cost(target, candidate) < config.dist_tol:
            return candidate
        return None
    result = multistart_instantiate(target, candidate, config, seed_with_template=True)
    return result.circuit if result.converged else None


def delete_gates_pass(
    part: Partition | Circuit,
    config: OptimizerConfig,
    repeat_until_fixpoint: bool = False,
) -> DeletionResult:
    """Delete gates from a block while it still re-instantiates to its unitary.

    Gates are tried left to right. When removing a gate alone fails, the gate
    and the next gate on exactly the same qubits are tried as a pair, which
    lets self-inverse pairs such as CNOT·CNOT disappear.

    Args:
        part: Partition (its block is used) or a bare block circuit.
        config: Instantiation settings for every trial; each trial draws its
            own seed from config.seed.
        repeat_until_fixpoint: Sweep again until a pass deletes nothing.

    Returns:
        DeletionResult with the reduced block.

    Raises:
        CapacityError: If the block is wider than the verification guard.
    """
    block = part.block if isinstance(part, Partition) else part
    if block.n > MAX_PARTITION_QUBITS:
        raise CapacityError(
            f"block on {block.n} qubits exceeds the "
            f"{MAX_PARTITION_QUBITS}-qubit guard"
        )
    target = circuit_unitary(block)
    current = block
    deletions = 0
    trials = 0

    while True:
        deleted_this_pass = 0
        i = 0
        while i < len(current):
            trials += 1
            trial_config = config.with_overrides(seed=derive_seed(config.seed, trials))
            accepted = _reinstantiate(target, current.without(i), trial_config)
            removed = 1
            if accepted is None:
                j = _next_on_same_qubits(current, i)
                if j is not None:
                    trials += 1
                    trial_config = config.with_overrides(
                        seed=derive_seed(config.seed, trials)
                    )
                    accepted = _reinstantiate(
                        target, current.without(i, j), trial_config
                    )
                    removed = 2
            if accepted is None:
                i += 1
            else:
                current = accepted
                deleted_this_pass += removed
        deletions += deleted_this_pass
        if not repeat_until_fixpoint or deleted_this_pass == 0:
            break

    return DeletionResult(
        block=current,
        deletions=deletions,
        distance=frobenius_cost(target, current),
        trials=trials,
    )


@dataclass(frozen=True)
class ResynthOutcome:
    """Optimized circuit plus the flow report."""

    circuit: Circuit
    report: ResynthReport


def _process(
    part: Partition, config: OptimizerConfig, repeat_until_fixpoint: bool
) -> tuple[Circuit, PartitionRecord]:
    before = part.block
    record = PartitionRecord(
        index=part.index,
        qubits=list(part.qubits),
        gates_before=len(before),
        gates_after=len(before),
        u3_before=before.u3_count,
        u3_after=before.u3_count,
        cnot_before=before.cnot_count,
        cnot_after=before.cnot_count,
    )
    part_config = config.with_overrides(seed=derive_seed(config.seed, part.index))
    try:
        result = delete_gates_pass(part, part_config, repeat_until_fixpoint)
    except CapacityError as e:
        return before, record.model_copy(update={"skipped": True, "error": str(e)})
    except InstantiationError as e:
        return before, record.model_copy(update={"error": str(e)})
    after = result.block
    return after, record.model_copy(
        update={
            "gates_after": len(after),
            "u3_after": after.u3_count,
            "cnot_after": after.cnot_count,
            "deletions": result.deletions,
            "distance": result.distance,
        }
    )


def resynth_flow(
    circuit: Circuit,
    k: int,
    config: OptimizerConfig,
    max_workers: int | None = None,
    repeat_until_fixpoint: bool = False,
    max_iter: int = RESYNTH_MAX_ITER,
    show_progress: bool = True,
) -> ResynthOutcome:
    """Partition a circuit and run the gate-deletion pass on every block.

    Args:
        circuit: Input circuit.
        k: Maximum block size; values above the verification guard are
            clamped with a warning.
        config: Instantiation settings; max_iter is lowered to `max_iter`.
        max_workers: Partitions processed concurrently (None: executor default).
        repeat_until_fixpoint: Repeat each block's deletion sweep.
        max_iter: Per-run sweep cap inside the flow.
        show_progress: Render a progress bar on stderr.

    Returns:
        ResynthOutcome with the reassembled circuit and its report.

    Raises:
        InfeasiblePartitionError: If a gate is wider than k.
    """
    start = time.perf_counter()
    timing = TimingInfo()
    warnings: list[str] = []
    if k > MAX_PARTITION_QUBITS:
        message = f"k={k} clamped to {MAX_PARTITION_QUBITS}"
        console.print(f"[yellow]Warning: {escape(message)}[/]")
        warnings.append(message)
        k = MAX_PARTITION_QUBITS

    capped = min(config.max_iter, max_iter)
    flow_config = config.with_overrides(
        max_iter=capped, min_iter=min(config.min_iter, capped)
    )
    partitions, coverage = partition(circuit, k)

    results: list[tuple[Circuit, PartitionRecord]] = []
    with (
        Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            TaskProgressColumn(),
            console=console,
            disable=not show_progress,
        ) as progress,
        ThreadPoolExecutor(max_workers=max_workers) as pool,
    ):
        task = progress.add_task("Deleting gates...", total=len(partitions))
        futures = [
            pool.submit(_process, p, flow_config, repeat_until_fixpoint)
            for p in partitions
        ]
        for future in futures:
            results.append(future.result())
            progress.advance(task)

    blocks = [block for block, _ in results]
    records = [record for _, record in results]
    for record in records:
        if record.error is not None:
            message = f"partition {record.index}: {record.error}"
            console.print(f"[yellow]Warning: {escape(message)}[/]")
            warnings.append(message)

    optimized = reassemble(circuit.n, partitions, blocks)
    modified = sum(1 for r in records if r.modified)
    distance = None
    if circuit.n <= RESYNTH_VERIFY_QUBITS:
        distance = frobenius_cost(circuit_unitary(circuit), optimized)

    timing.runtime_s = time.perf_counter() - start
    report = ResynthReport(
        k=k,
        u3_before=circuit.u3_count,
        u3_after=optimized.u3_count,
        cnot_before=circuit.cnot_count,
        cnot_after=optimized.cnot_count,
        partitions=records,
        coverage=coverage,
        distance=distance,
        distance_bound=modified * config.dist_tol * (1.0 + config.overtrain_ratio),
        warnings=warnings,
        timing=timing,
    )
    return ResynthOutcome(circuit=optimized, report=report)
