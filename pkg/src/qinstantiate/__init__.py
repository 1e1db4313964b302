"""Quantum circuit instantiation.

Fits the variable gates of a circuit template to a target unitary with SVD
sweeps, using either the full unitary (O(4^n) per gate) or a small adaptive
set of training states (O(M·2^n) per gate). Also provides a partition-based
gate-deletion re-synthesis flow built on top of the instantiater.

Usage:
    from qinstantiate import OptimizerConfig, multistart_instantiate, parse_qasm

    template = parse_qasm(open("template.qasm").read())
    result = multistart_instantiate(target, template, OptimizerConfig())
    print(result.termination, result.c_train)

    # Full-unitary backend
    config = OptimizerConfig(backend="full")

    # Gate deletion in 3-qubit blocks
    from qinstantiate import resynth_flow
    outcome = resynth_flow(circuit, k=3, config=OptimizerConfig(multistarts=4))
"""

from .bench import aggregate_bins, load_corpus, run_bench, validate_bench_args
from .circuit import (
    Circuit,
    Gate,
    GateKind,
    circuit_unitary,
    cnot_matrix,
    randomize_variable_gates,
    u3_matrix,
    zyz_reparameterize,
)
from .exceptions import (
    CacheConsistencyError,
    CapacityError,
    ConfigError,
    DimensionError,
    EmptyCorpusError,
    InfeasiblePartitionError,
    InstantiationError,
    NumericError,
    QasmBoundsError,
    QasmParseError,
    UnitaryFileError,
    UnsupportedExportError,
)
from .models import (
    BenchBin,
    BenchRow,
    BenchSummary,
    CounterReport,
    InstantiationSummary,
    PartitionRecord,
    ResynthReport,
    RunReport,
    TimingInfo,
)
from .numerics import (
    StateSet,
    basis_states,
    basis_states_from_indices,
    haar_random_states,
    haar_random_unitary,
    load_unitary,
    save_unitary,
    svd,
)
from .optimizer import (
    InstantiationResult,
    Termination,
    instantiate,
    multistart_instantiate,
    svd_update,
    sweep,
    validation_check,
)
from .optimizer_config import (
    DEFAULT_OPTIMIZER_CONFIG,
    Backend,
    OptimizerConfig,
    StateDistribution,
)
from .partitioner import CoverageReport, Partition, partition, reassemble
from .qasm import parse_qasm, write_qasm
from .resynth import DeletionResult, ResynthOutcome, delete_gates_pass, resynth_flow
from .simulator import (
    EnvironmentMatrix,
    OpCounter,
    SimCaches,
    build_caches,
    build_full_caches,
    environment_full,
    environment_sample,
    frobenius_cost,
    sample_cost,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # Circuit IR
    "Circuit",
    "Gate",
    "GateKind",
    "circuit_unitary",
    "cnot_matrix",
    "randomize_variable_gates",
    "u3_matrix",
    "zyz_reparameterize",
    "parse_qasm",
    "write_qasm",
    # Numerics
    "StateSet",
    "basis_states",
    "basis_states_from_indices",
    "haar_random_states",
    "haar_random_unitary",
    "load_unitary",
    "save_unitary",
    "svd",
    # Simulator
    "EnvironmentMatrix",
    "OpCounter",
    "SimCaches",
    "build_caches",
    "build_full_caches",
    "environment_full",
    "environment_sample",
    "frobenius_cost",
    "sample_cost",
    # Optimizer
    "DEFAULT_OPTIMIZER_CONFIG",
    "Backend",
    "InstantiationResult",
    "OptimizerConfig",
    "StateDistribution",
    "Termination",
    "instantiate",
    "multistart_instantiate",
    "svd_update",
    "sweep",
    "validation_check",
    # Re-synthesis
    "CoverageReport",
    "DeletionResult",
    "Partition",
    "ResynthOutcome",
    "delete_gates_pass",
    "partition",
    "reassemble",
    "resynth_flow",
    # Benchmark
    "aggregate_bins",
    "load_corpus",
    "run_bench",
    "validate_bench_args",
    # Report models
    "BenchBin",
    "BenchRow",
    "BenchSummary",
    "CounterReport",
    "InstantiationSummary",
    "PartitionRecord",
    "ResynthReport",
    "RunReport",
    "TimingInfo",
    # Exceptions
    "CacheConsistencyError",
    "CapacityError",
    "ConfigError",
    "DimensionError",
    "EmptyCorpusError",
    "InfeasiblePartitionError",
    "InstantiationError",
    "NumericError",
    "QasmBoundsError",
    "QasmParseError",
    "UnitaryFileError",
    "UnsupportedExportError",
]
