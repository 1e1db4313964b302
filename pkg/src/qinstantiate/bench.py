"""Re-instantiation benchmark over random partitions of a circuit corpus.

For every circuit and requested block size, a few partitions of exactly that
size are drawn. Each partition's unitary becomes the target and the partition
itself the template (with fresh random starts). Every backend runs under the
same multiply-add budget, and success is aggregated over bins of u3/2^n.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
import math
from pathlib import Path
import time
from typing import TYPE_CHECKING

import numpy as np
from rich.console import Console
from rich.progress import (
    BarColumn,
    Progress,
    SpinnerColumn,
    TaskProgressColumn,
    TextColumn,
)

from .circuit import Circuit, circuit_unitary
from .exceptions import ConfigError, EmptyCorpusError
from .models import BenchBin, BenchRow
from .numerics import derive_seed
from .optimizer import multistart_instantiate
from .optimizer_config import Backend
from .partitioner import partition
from .qasm import parse_qasm

if TYPE_CHECKING:
    from collections.abc import Sequence

    from .optimizer_config import OptimizerConfig

console = Console(stderr=True)


@dataclass(frozen=True)
class BenchCase:
    """One sampled partition."""

    circuit: str
    partition: int
    block: Circuit


def load_corpus(directory: Path) -> list[tuple[str, Circuit]]:
    """Parse every *.qasm file in a directory, sorted by name.

    Raises:
        EmptyCorpusError: If the directory holds no QASM files.
        QasmParseError: If a file does not parse.
    """
    paths = sorted(Path(directory).glob("*.qasm"))
    if not paths:
        raise EmptyCorpusError(f"no .qasm files in {directory}")
    return [(p.name, parse_qasm(p.read_text(encoding="utf-8"))) for p in paths]


def _check_sampling(sizes: Sequence[int], per_size: int) -> None:
    if not sizes or min(sizes) < 1:
        raise ConfigError("partition sizes must be positive")
    if per_size < 1:
        raise ConfigError("per_size must be at least 1")


def _check_bin_width(bin_width: float) -> None:
    if not (math.isfinite(bin_width) and bin_width > 0):
        raise ConfigError("bin_width must be a positive number")


def validate_bench_args(sizes: Sequence[int], per_size: int, bin_width: float) -> None:
    """Reject bench settings before any instantiation runs.

    Raises:
        ConfigError: On non-positive sizes, per_size or bin_width.
    """
    _check_sampling(sizes, per_size)
    _check_bin_width(bin_width)


def sample_cases(
    corpus: Sequence[tuple[str, Circuit]],
    sizes: Sequence[int],
    per_size: int,
    rng: np.random.Generator,
) -> list[BenchCase]:
    """Draw per_size partitions of each size from every circuit.

    Partitions come from the greedy partitioner with k = size; only blocks
    spanning exactly `size` qubits qualify. With fewer candidates than
    per_size the draw is with replacement.
    """
    _check_sampling(sizes, per_size)
    cases: list[BenchCase] = []
    for name, circuit in corpus:
        for size in sizes:
            if circuit.max_arity() > size:
                continue
            parts, _ = partition(circuit, size)
            candidates = [p for p in parts if p.size == size]
            if not candidates:
                console.print(f"[yellow]{name}: no {size}-qubit partitions[/]")
                continue
            replace = len(candidates) < per_size
            picks = rng.choice(len(candidates), size=per_size, replace=replace)
            cases.extend(
                BenchCase(name, candidates[i].index, candidates[i].block)
                for i in sorted(int(i) for i in picks)
            )
    return cases


def run_case(
    case: BenchCase, backend: Backend, config: OptimizerConfig, seed: int
) -> BenchRow:
    """Instantiate one partition with one backend and record the outcome."""
    block = case.block
    run_config = config.with_overrides(backend=backend, seed=seed)
    start = time.perf_counter()
    result = multistart_instantiate(circuit_unitary(block), block, run_config)
    elapsed = time.perf_counter() - start
    work = result.total_counters or result.counters
    return BenchRow(
        circuit=case.circuit,
        partition=case.partition,
        n=block.n,
        u3=block.u3_count,
        cnot=block.cnot_count,
        bin_key=block.u3_count / block.dim,
        backend=backend.value,
        success=result.converged,
        termination=result.termination.value,
        iterations=result.iterations,
        restarts=result.restarts,
        final_m=result.final_m,
        multiply_adds=work.multiply_adds,
        wall_time_s=elapsed,
    )


def run_bench(
    corpus: Sequence[tuple[str, Circuit]],
    sizes: Sequence[int],
    per_size: int,
    config: OptimizerConfig,
    backends: Sequence[Backend] = (Backend.SAMPLE, Backend.FULL),
    show_progress: bool = True,
) -> list[BenchRow]:
    """Run every sampled case with every backend.

    Args:
        corpus: Named circuits.
        sizes: Partition sizes to sample.
        per_size: Partitions per size and circuit.
        config: Base settings; config.op_budget acts as the per-run timeout.
        backends: Backends to compare.
        show_progress: Render a progress bar on stderr.

    Returns:
        One row per (case, backend), cases in sampling order.
    """
    rng = np.random.default_rng(config.seed)
    cases = sample_cases(corpus, sizes, per_size, rng)
    rows: list[BenchRow] = []
    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TaskProgressColumn(),
        console=console,
        disable=not show_progress,
    ) as progress:
        task = progress.add_task("Instantiating...", total=len(cases) * len(backends))
        for index, case in enumerate(cases):
            seed = derive_seed(config.seed, index)
            for backend in backends:
                rows.append(run_case(case, backend, config, seed))
                progress.advance(task)
    return rows


def aggregate_bins(rows: Sequence[BenchRow], bin_width: float) -> list[BenchBin]:
    """Success counts per backend over bins [i·w, (i+1)·w) of u3/2^n."""
    _check_bin_width(bin_width)
    runs: dict[tuple[str, int], int] = defaultdict(int)
    successes: dict[tuple[str, int], int] = defaultdict(int)
    for row in rows:
        key = (row.backend, math.floor(row.bin_key / bin_width))
        runs[key] += 1
        successes[key] += int(row.success)
    return [
        BenchBin(
            backend=backend,
            bin_low=i * bin_width,
            bin_high=(i + 1) * bin_width,
            runs=runs[backend, i],
            successes=successes[backend, i],
        )
        for backend, i in sorted(runs)
    ]
