"""Custom exceptions for qinstantiate.

Provides a hierarchy of exceptions for different error conditions:
- InstantiationError: Base exception for all package errors
- DimensionError: Shapes or qubit locations do not fit together
- NumericError: Non-finite or non-unitary input to a numeric routine
- CapacityError: Request exceeds a desk-scale guard or sampler capacity
- QasmParseError / QasmBoundsError: Problems in an OpenQASM input
- UnsupportedExportError: Circuit cannot be written as u3/cx QASM
- InfeasiblePartitionError: A gate is wider than the requested block size
- CacheConsistencyError: Simulator caches used while stale
- ConfigError: Invalid optimizer configuration
- UnitaryFileError: Malformed unitary JSON file
- EmptyCorpusError: Benchmark directory holds no circuits
"""


class InstantiationError(Exception):
    """Base exception for qinstantiate errors."""


class DimensionError(InstantiationError):
    """Matrix, state or gate dimensions are incompatible."""


class NumericError(InstantiationError):
    """Input contains non-finite values or violates a unitarity contract."""


class CapacityError(InstantiationError):
    """Request exceeds a size guard or the capacity of a sampler."""


class QasmParseError(InstantiationError):
    """Error while parsing an OpenQASM source.

    Attributes:
        line: 1-based line number of the offending statement, if known.
    """

    def __init__(self, message: str, line: int | None = None) -> None:
        """Initialize QasmParseError.

        Args:
            message: Description of what went wrong.
            line: 1-based line number of the offending statement.
        """
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class QasmBoundsError(QasmParseError):
    """Qubit index outside the declared register."""


class UnsupportedExportError(InstantiationError):
    """Circuit contains a gate that has no u3/cx representation."""


class InfeasiblePartitionError(InstantiationError):
    """A gate acts on more qubits than the requested partition size.

    Attributes:
        arity: Number of qubits of the widest gate.
        k: Requested maximum partition size.
    """

    def __init__(self, arity: int, k: int) -> None:
        """Initialize InfeasiblePartitionError.

        Args:
            arity: Number of qubits of the widest gate.
            k: Requested maximum partition size.
        """
        self.arity = arity
        self.k = k
        super().__init__(
            f"Infeasible partition: circuit has a {arity}-qubit gate but k={k}"
        )


class CacheConsistencyError(InstantiationError):
    """Simulator cache entry requested while stale."""


class ConfigError(InstantiationError, ValueError):
    """Invalid optimizer configuration value."""


class UnitaryFileError(InstantiationError):
    """Unitary JSON file is missing fields or has the wrong size."""


class EmptyCorpusError(InstantiationError):
    """Benchmark corpus directory contains no QASM files."""
