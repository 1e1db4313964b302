"""Configuration for the instantiation optimizers.

This module provides a frozen dataclass holding every hyperparameter of the
SVD-sweep instantiation algorithms:

1. Stopping: dist_tol, diff_tol_r, plateau_window, min_iter, max_iter
2. Training set: num_training_states, overtrain_ratio, distribution
3. Update policy: beta
4. Randomization and scheduling: multistarts, seed, multistart_batch
5. Backend: sampled states or full unitary

Configs can be read from a flat TOML table whose keys are the field names,
then overridden by CLI flags through from_args().
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from enum import Enum
import tomllib
from typing import TYPE_CHECKING, Any

from . import config as defaults
from .exceptions import ConfigError

if TYPE_CHECKING:
    from pathlib import Path


class Backend(str, Enum):
    """Cost evaluation backend."""

    SAMPLE = "sample"  # M training states, O(M·2^n) per gate
    FULL = "full"  # complete basis, O(4^n) per gate


class StateDistribution(str, Enum):
    """Distribution of training input states."""

    HAAR = "haar"
    BASIS = "basis"


@dataclass(frozen=True)
class OptimizerConfig:
    """Frozen configuration for instantiation.

    Attributes:
        dist_tol: Stop when the training cost falls below this value.
        diff_tol_r: Relative improvement required per iteration to avoid
            counting towards a plateau.
        plateau_window: Consecutive non-improving iterations that end a run.
        beta: Update regularization; SVD of (1-beta)·E + beta·u†.
        num_training_states: Initial number of training states M.
        overtrain_ratio: Threshold on c_val/c_train - 1 that triggers
            double-and-restart.
        min_iter: Iterations per attempt before any stopping check.
        max_iter: Hard cap on sweeps over all attempts.
        multistarts: Independent random starts.
        seed: Root seed for all random streams.
        distribution: Training state distribution.
        backend: Sampled-state or full-unitary cost.
        multistart_batch: Starts run concurrently per batch.
        max_training_states: Optional cap on M below 2^n; reaching it on an
            overtrain check ends the run with states_exhausted.
        op_budget: Optional multiply-add budget per run (cooperative timeout).
    """

    dist_tol: float = defaults.DIST_TOL
    diff_tol_r: float = defaults.DIFF_TOL_R
    plateau_window: int = defaults.PLATEAU_WINDOW
    beta: float = defaults.BETA
    num_training_states: int = defaults.NUM_TRAINING_STATES
    overtrain_ratio: float = defaults.OVERTRAIN_RATIO
    min_iter: int = defaults.MIN_ITER
    max_iter: int = defaults.MAX_ITER
    multistarts: int = defaults.MULTISTARTS
    seed: int = defaults.SEED
    distribution: StateDistribution = StateDistribution.HAAR
    backend: Backend = Backend.SAMPLE
    multistart_batch: int = defaults.MULTISTART_BATCH
    max_training_states: int | None = None
    op_budget: int | None = None

    def __post_init__(self) -> None:
        """Coerce enum fields and validate."""
        try:
            object.__setattr__(
                self, "distribution", StateDistribution(self.distribution)
            )
            object.__setattr__(self, "backend", Backend(self.backend))
        except ValueError as e:
            raise ConfigError(str(e)) from None
        self.validate()

    def validate(self) -> None:
        """Validate configuration values.

        Raises:
            ConfigError: If configuration values are invalid.
        """
        if self.dist_tol < 0:
            raise ConfigError("dist_tol must be non-negative")
        if self.diff_tol_r < 0:
            raise ConfigError("diff_tol_r must be non-negative")
        if self.plateau_window < 1:
            raise ConfigError("plateau_window must be at least 1")
        if not 0.0 <= self.beta <= 1.0:
            raise ConfigError("beta must lie in [0, 1]")
        if self.num_training_states < 1:
            raise ConfigError("num_training_states must be at least 1")
        if self.overtrain_ratio < 0:
            raise ConfigError("overtrain_ratio must be non-negative")
        if self.min_iter < 0:
            raise ConfigError("min_iter must be non-negative")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be at least 1")
        if self.min_iter > self.max_iter:
            raise ConfigError("min_iter must not exceed max_iter")
        if self.multistarts < 1:
            raise ConfigError("multistarts must be at least 1")
        if self.multistart_batch < 1:
            raise ConfigError("multistart_batch must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.max_training_states is not None and (
            self.max_training_states < self.num_training_states
        ):
            raise ConfigError("max_training_states must be >= num_training_states")
        if self.op_budget is not None and self.op_budget < 1:
            raise ConfigError("op_budget must be positive")

    def to_dict(self) -> dict[str, Any]:
        """Convert configuration to a JSON-friendly dictionary.

        Returns:
            Dictionary representation of configuration.
        """
        data = asdict(self)
        data["distribution"] = self.distribution.value
        data["backend"] = self.backend.value
        return data

    def with_overrides(self, **overrides: Any) -> OptimizerConfig:
        """Return a copy with the non-None overrides applied."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    @classmethod
    def from_args(cls, **kwargs: Any) -> OptimizerConfig:
        """Create configuration from CLI arguments.

        Keys that are not config fields are ignored, as are None values, so the
        argparse namespace can be passed through directly.

        Returns:
            OptimizerConfig instance with specified overrides.
        """
        names = {f.name for f in fields(cls)}
        config_dict = {k: v for k, v in kwargs.items() if k in names and v is not None}
        return cls(**config_dict)

    @classmethod
    def from_file(cls, path: Path, **overrides: Any) -> OptimizerConfig:
        """Load a flat TOML table of field names, then apply overrides.

        Raises:
            ConfigError: If the file has unknown keys or invalid values.
        """
        try:
            with path.open("rb") as handle:
                data = tomllib.load(handle)
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"{path}: {e}") from None
        names = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise ConfigError(f"{path}: unknown config keys {', '.join(unknown)}")
        data.update(
            {k: v for k, v in overrides.items() if k in names and v is not None}
        )
        try:
            return cls(**data)
        except TypeError as e:
            raise ConfigError(f"{path}: {e}") from None


# Default configuration instance
DEFAULT_OPTIMIZER_CONFIG = OptimizerConfig()
