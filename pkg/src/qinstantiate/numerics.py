"""Dense complex linear algebra and random sampling primitives.

This module provides:
- svd: small-matrix SVD with the X·diag(D)·Y† convention
- haar_random_unitary: QR of a complex Gaussian with phase-fixed R diagonal
- StateSet: M states on n qubits stored as an (m, 2, ..., 2) tensor
- haar_random_states / basis_states: orthonormal training-state samplers
- load_unitary / save_unitary: the unitary JSON file format

Qubit convention is little-endian: qubit 0 is the least significant bit of a
basis index. Reshaping a length-2^n vector row-major into (2,)*n therefore
puts qubit n-1 on the first axis and qubit 0 on the last.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator
import scipy.linalg

from .config import MAX_SVD_DIM
from .exceptions import CapacityError, DimensionError, NumericError, UnitaryFileError

if TYPE_CHECKING:
    from pathlib import Path

ComplexMatrix = np.ndarray


def _require_finite(a: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(a)):
        raise NumericError(f"{what} contains non-finite entries")


def _require_square(a: np.ndarray, what: str) -> int:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:  # noqa: PLR2004
        raise DimensionError(f"{what} must be square, got shape {a.shape}")
    return a.shape[0]


def is_unitary(u: np.ndarray, tol: float = 1e-10) -> bool:
    """Check u†u = I entrywise within tol."""
    if u.ndim != 2 or u.shape[0] != u.shape[1]:  # noqa: PLR2004
        return False
    gram = u.conj().T @ u
    return bool(np.max(np.abs(gram - np.eye(u.shape[0]))) <= tol)


def svd(a: ComplexMatrix) -> tuple[ComplexMatrix, np.ndarray, ComplexMatrix]:
    """Decompose a square matrix as a = x·diag(d)·y†.

    Args:
        a: Square complex matrix of dimension at most 64.

    Returns:
        Tuple (x, d, y) with x, y unitary and d sorted non-increasing.

    Raises:
        DimensionError: If a is not square or larger than 64x64.
        NumericError: If a has non-finite entries.
    """
    a = np.asarray(a, dtype=np.complex128)
    d = _require_square(a, "svd input")
    if d > MAX_SVD_DIM:
        raise DimensionError(f"svd input dimension {d} exceeds {MAX_SVD_DIM}")
    _require_finite(a, "svd input")
    x, d_vals, yh = scipy.linalg.svd(a, lapack_driver="gesvd")
    return x, d_vals, yh.conj().T


def haar_random_unitary(d: int, rng: np.random.Generator) -> ComplexMatrix:
    """Draw a Haar-random d×d unitary.

    Args:
        d: Matrix dimension, at least 1.
        rng: Seeded random stream.

    Returns:
        A unitary matrix distributed according to the Haar measure.

    Raises:
        DimensionError: If d < 1.
    """
    if d < 1:
        raise DimensionError("unitary dimension must be at least 1")
    return _haar_columns(d, d, rng)


def _haar_columns(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    q, r = np.linalg.qr(z / np.sqrt(2.0))
    diag = np.diagonal(r)
    phases = diag / np.abs(diag)
    return q * phases[np.newaxis, :]


@dataclass(frozen=True)
class StateSet:
    """M states on n qubits.

    Attributes:
        n: Qubit count.
        amplitudes: Complex tensor of shape (m, 2, ..., 2) with n qubit axes.
    """

    n: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        """Check the tensor shape against n."""
        shape = self.amplitudes.shape
        if len(shape) != self.n + 1 or shape[1:] != (2,) * self.n:
            raise DimensionError(
                f"state tensor shape {self.amplitudes.shape} does not match "
                f"{self.n} qubits"
            )

    @property
    def m(self) -> int:
        """Number of states."""
        return self.amplitudes.shape[0]

    @property
    def dim(self) -> int:
        """Hilbert-space dimension 2^n."""
        return 2**self.n

    def rows(self) -> np.ndarray:
        """Return the states as an (m, 2^n) matrix, one state per row."""
        return self.amplitudes.reshape(self.m, self.dim)

    def gram(self) -> np.ndarray:
        """Return the m×m Gram matrix ⟨ψ_i|ψ_j⟩."""
        rows = self.rows()
        return rows.conj() @ rows.T

    def renormalized(self) -> StateSet:
        """Return a copy with every state scaled to unit norm."""
        rows = self.rows()
        norms = np.linalg.norm(rows, axis=1, keepdims=True)
        return StateSet.from_rows(self.n, rows / norms)

    @classmethod
    def from_rows(cls, n: int, rows: np.ndarray) -> StateSet:
        """Build a StateSet from an (m, 2^n) matrix of row states."""
        rows = np.asarray(rows, dtype=np.complex128)
        return cls(n=n, amplitudes=rows.reshape((rows.shape[0],) + (2,) * n))

    @classmethod
    def from_columns(cls, n: int, columns: np.ndarray) -> StateSet:
        """Build a StateSet from a (2^n, m) matrix of column states."""
        return cls.from_rows(n, np.asarray(columns).T)


def _check_capacity(n: int, m: int) -> None:
    if m < 1:
        raise CapacityError("state count must be at least 1")
    if m > 2**n:
        raise CapacityError(f"cannot draw {m} orthonormal states on {n} qubits")


def haar_random_states(n: int, m: int, rng: np.random.Generator) -> StateSet:
    """Draw m mutually orthonormal Haar-random states on n qubits.

    The states are the first m columns of a Haar-random unitary, obtained
    directly from a reduced QR so that no 2^n × 2^n matrix is formed.

    Raises:
        CapacityError: If m is not in [1, 2^n].
    """
    _check_capacity(n, m)
    return StateSet.from_columns(n, _haar_columns(2**n, m, rng))


def basis_states(n: int, m: int, rng: np.random.Generator) -> StateSet:
    """Draw m distinct computational basis states uniformly without replacement.

    Raises:
        CapacityError: If m is not in [1, 2^n].
    """
    _check_capacity(n, m)
    indices = rng.choice(2**n, size=m, replace=False)
    return basis_states_from_indices(n, indices)


def basis_states_from_indices(n: int, indices: np.ndarray | list[int]) -> StateSet:
    """Build one-hot states |i⟩ for the given basis indices."""
    indices = np.asarray(indices, dtype=np.int64)
    _check_capacity(n, len(indices))
    rows = np.zeros((len(indices), 2**n), dtype=np.complex128)
    rows[np.arange(len(indices)), indices] = 1.0
    return StateSet.from_rows(n, rows)


def full_basis(n: int) -> StateSet:
    """All 2^n computational basis states in index order."""
    return StateSet.from_rows(n, np.eye(2**n, dtype=np.complex128))


def spawn_generators(seed: int, count: int) -> list[np.random.Generator]:
    """Split a seed into independent streams, one per parallel task."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.default_rng(child) for child in children]


def derive_seed(seed: int, index: int) -> int:
    """Derive a reproducible 63-bit child seed for task `index`."""
    child = np.random.SeedSequence([seed, index])
    return int(child.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


# =============================================================================
# Unitary JSON file format
# =============================================================================


class UnitaryFile(BaseModel):
    """Unitary file: {"n": int, "re": [4^n reals], "im": [4^n reals]}.

    Entries are row-major over the little-endian basis.
    """

    n: int = Field(ge=0, description="Qubit count")
    re: list[float] = Field(description="Row-major real parts")
    im: list[float] = Field(description="Row-major imaginary parts")

    @model_validator(mode="after")
    def _check_size(self) -> UnitaryFile:
        size = 4**self.n
        if len(self.re) != size or len(self.im) != size:
            msg = f"expected {size} entries for n={self.n}"
            raise ValueError(msg)
        return self

    def to_matrix(self) -> np.ndarray:
        """Return the dense 2^n × 2^n matrix."""
        dim = 2**self.n
        data = np.asarray(self.re) + 1j * np.asarray(self.im)
        return data.reshape(dim, dim)

    @classmethod
    def from_matrix(cls, u: np.ndarray) -> UnitaryFile:
        """Wrap a dense matrix whose dimension is a power of two."""
        dim = _require_square(u, "unitary")
        n = dim.bit_length() - 1
        if 2**n != dim:
            raise DimensionError(f"unitary dimension {dim} is not a power of two")
        flat = np.asarray(u, dtype=np.complex128).reshape(-1)
        return cls(n=n, re=flat.real.tolist(), im=flat.imag.tolist())


def load_unitary(path: Path) -> np.ndarray:
    """Read a unitary JSON file.

    Raises:
        UnitaryFileError: If the file is malformed or the matrix is not unitary.
    """
    try:
        payload = UnitaryFile.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as e:
        raise UnitaryFileError(f"{path}: {e}") from e
    u = payload.to_matrix()
    if not np.all(np.isfinite(u)) or not is_unitary(u, tol=1e-8):
        raise UnitaryFileError(f"{path}: matrix is not unitary")
    return u


def save_unitary(path: Path, u: np.ndarray) -> None:
    """Write a unitary JSON file."""
    payload = UnitaryFile.from_matrix(u)
    path.write_text(payload.model_dump_json(), encoding="utf-8")
