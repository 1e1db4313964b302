"""Pydantic models for run reports and benchmark datasets.

Designed for:
- Stable JSON output from every CLI command
- Lossless round trips (model_validate_json(model_dump_json()))
- Determinism checks: everything that depends on the clock lives in a
  `timing` sub-object and can be excluded with deterministic_dump()
"""

from __future__ import annotations

from datetime import UTC, datetime
from typing import TYPE_CHECKING, Any

from pydantic import BaseModel, Field, computed_field

from .partitioner import CoverageReport

if TYPE_CHECKING:
    from .optimizer import InstantiationResult
    from .simulator import OpCounter


def _utc_now() -> datetime:
    """Return current UTC datetime (timezone-aware)."""
    return datetime.now(UTC)


class TimingInfo(BaseModel):
    """Clock-dependent fields, kept apart from the deterministic payload."""

    started_at: datetime = Field(
        default_factory=_utc_now, description="When the command started"
    )
    runtime_s: float = Field(default=0.0, description="Wall time in seconds")


class CounterReport(BaseModel):
    """Simulator work counters."""

    multiply_adds: int = Field(default=0, description="Complex multiply-adds")
    gate_applications: int = Field(default=0, description="Gate tensor applications")
    environments: int = Field(default=0, description="Environment matrices built")
    svd_updates: int = Field(default=0, description="Local SVD updates")

    @classmethod
    def from_counter(cls, counter: OpCounter | None) -> CounterReport:
        """Copy an OpCounter (None gives zeros)."""
        if counter is None:
            return cls()
        return cls(**counter.to_dict())


class InstantiationSummary(BaseModel):
    """Outcome of instantiate / multistart_instantiate."""

    termination: str = Field(
        description="converged, plateau, max_iter or states_exhausted"
    )
    c_train: float = Field(description="Final training cost (backend scale)")
    c_val: float = Field(description="Final validation cost")
    iterations: int = Field(description="Sweeps over all attempts")
    restarts: int = Field(description="Double-and-restart events")
    final_m: int = Field(description="Training states in the last attempt")
    states_drawn: int = Field(description="Training states drawn over all attempts")
    start_index: int = Field(description="Winning multistart index")
    starts_run: int = Field(default=1, description="Multistarts executed")
    budget_exhausted: bool = Field(
        default=False, description="True when the op budget ended the run"
    )
    frobenius_distance: float | None = Field(
        default=None,
        description="1 - Re Tr(U†C)/2^n of the result, when the target is dense",
    )
    counters: CounterReport = Field(
        default_factory=CounterReport, description="Work of the winning start"
    )
    total_counters: CounterReport = Field(
        default_factory=CounterReport, description="Work over all executed starts"
    )

    @computed_field
    @property
    def converged(self) -> bool:
        """True for termination == converged."""
        return self.termination == "converged"

    @classmethod
    def from_result(
        cls, result: InstantiationResult, frobenius_distance: float | None = None
    ) -> InstantiationSummary:
        """Summarize an InstantiationResult."""
        return cls(
            termination=result.termination.value,
            c_train=result.c_train,
            c_val=result.c_val,
            iterations=result.iterations,
            restarts=result.restarts,
            final_m=result.final_m,
            states_drawn=result.states_drawn,
            start_index=result.start_index,
            starts_run=result.starts_run,
            budget_exhausted=result.budget_exhausted,
            frobenius_distance=frobenius_distance,
            counters=CounterReport.from_counter(result.counters),
            total_counters=CounterReport.from_counter(
                result.total_counters or result.counters
            ),
        )


class PartitionRecord(BaseModel):
    """Gate-deletion outcome for one partition."""

    index: int = Field(description="Partition creation order")
    qubits: list[int] = Field(description="Original qubit indices")
    gates_before: int = Field(description="Gates owned before deletion")
    gates_after: int = Field(description="Gates after deletion")
    u3_before: int = Field(default=0, description="Single-qubit gates before")
    u3_after: int = Field(default=0, description="Single-qubit gates after")
    cnot_before: int = Field(default=0, description="Two-qubit gates before")
    cnot_after: int = Field(default=0, description="Two-qubit gates after")
    deletions: int = Field(default=0, description="Gates removed")
    distance: float | None = Field(
        default=None, description="Normalized Frobenius distance to the block target"
    )
    skipped: bool = Field(default=False, description="Partition left untouched")
    error: str | None = Field(default=None, description="Diagnostic if it failed")

    @computed_field
    @property
    def modified(self) -> bool:
        """True when at least one gate was deleted."""
        return self.deletions > 0


class ResynthReport(BaseModel):
    """Gate-deletion flow summary (#U3, #CNOT before/after, runtime)."""

    k: int = Field(description="Block size used (after clamping)")
    u3_before: int = Field(description="Single-qubit gates in the input")
    u3_after: int = Field(description="Single-qubit gates in the output")
    cnot_before: int = Field(description="Two-qubit gates in the input")
    cnot_after: int = Field(description="Two-qubit gates in the output")
    partitions: list[PartitionRecord] = Field(
        default_factory=list, description="Per-partition records in creation order"
    )
    coverage: CoverageReport = Field(description="Partition coverage histogram")
    distance: float | None = Field(
        default=None,
        description="Whole-circuit normalized Frobenius distance (small n only)",
    )
    distance_bound: float = Field(
        default=0.0,
        description="modified partitions · dist_tol · (1 + overtrain_ratio)",
    )
    warnings: list[str] = Field(default_factory=list, description="Flow warnings")
    timing: TimingInfo = Field(default_factory=TimingInfo, description="Wall time")

    @computed_field
    @property
    def deletions(self) -> int:
        """Gates removed over all partitions."""
        return sum(p.deletions for p in self.partitions)

    @computed_field
    @property
    def modified_partitions(self) -> int:
        """Partitions with at least one deletion."""
        return sum(1 for p in self.partitions if p.modified)


class RunReport(BaseModel):
    """Top-level JSON document written by `qinst instantiate` and `qinst resynth`."""

    command: str = Field(description="CLI command that produced the report")
    tool_version: str = Field(description="qinstantiate version")
    seed: int = Field(description="Root seed")
    config: dict[str, Any] = Field(description="Echo of the optimizer configuration")
    inputs: dict[str, str] = Field(default_factory=dict, description="Input paths")
    instantiation: InstantiationSummary | None = Field(
        default=None, description="Set by the instantiate command"
    )
    resynth: ResynthReport | None = Field(
        default=None, description="Set by the resynth command"
    )
    timing: TimingInfo = Field(default_factory=TimingInfo, description="Wall time")

    def deterministic_dump(self) -> dict[str, Any]:
        """Dump without clock or scheduling fields (for reproducibility checks)."""
        exclude: dict[str, Any] = {"timing": True, "config": {"multistart_batch"}}
        if self.instantiation is not None:
            exclude["instantiation"] = {"starts_run", "total_counters"}
        if self.resynth is not None:
            exclude["resynth"] = {"timing": True}
        return self.model_dump(mode="json", exclude=exclude)


class BenchRow(BaseModel):
    """One benchmark run: a partition instantiated by one backend."""

    circuit: str = Field(description="Source circuit file name")
    partition: int = Field(description="Partition index within the circuit")
    n: int = Field(description="Partition qubit count")
    u3: int = Field(description="Single-qubit gate count")
    cnot: int = Field(description="Two-qubit gate count")
    bin_key: float = Field(description="u3 / 2^n")
    backend: str = Field(description="sample or full")
    success: bool = Field(description="Run converged")
    termination: str = Field(description="Stopping reason")
    iterations: int = Field(description="Sweeps over all attempts")
    restarts: int = Field(description="Double-and-restart events")
    final_m: int = Field(description="Training states in the last attempt")
    multiply_adds: int = Field(description="Work over all executed starts")
    wall_time_s: float = Field(description="Wall time of the run")


class BenchBin(BaseModel):
    """Success rate of one backend over one u3/2^n bin."""

    backend: str = Field(description="sample or full")
    bin_low: float = Field(description="Inclusive lower edge")
    bin_high: float = Field(description="Exclusive upper edge")
    runs: int = Field(description="Runs in the bin")
    successes: int = Field(description="Converged runs")

    @computed_field
    @property
    def success_rate(self) -> float:
        """successes / runs."""
        return self.successes / self.runs if self.runs else 0.0


class BenchSummary(BaseModel):
    """Aggregate benchmark output written next to the CSV."""

    tool_version: str = Field(description="qinstantiate version")
    seed: int = Field(description="Root seed")
    sizes: list[int] = Field(description="Requested partition sizes")
    per_size: int = Field(description="Partitions sampled per size and circuit")
    op_budget: int | None = Field(default=None, description="Per-run work budget")
    bin_width: float = Field(description="Width of the u3/2^n bins")
    rows: int = Field(description="Dataset rows")
    bins: list[BenchBin] = Field(default_factory=list, description="Success per bin")
    timing: TimingInfo = Field(default_factory=TimingInfo, description="Wall time")
