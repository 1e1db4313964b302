"""SVD-sweep instantiation with adaptive training sets and multistarts.

Each sweep walks the circuit right to left. For every variable gate it builds
the environment E from the cached prefix states and the right accumulator,
replaces the gate by the unitary maximizing Re Tr(E·u) (an SVD), and folds
the new gate into the accumulator. Fixed gates are folded unchanged.

instantiate() repeats sweeps until one of:

- converged: training cost < dist_tol and the generalization check passes
- plateau: plateau_window consecutive iterations without relative progress
- max_iter: sweep cap (or multiply-add budget) reached
- states_exhausted: overtrained with no room left to grow the training set

On overtraining (c_val/c_train - 1 > overtrain_ratio) the run doubles the
training set, keeps the current gate unitaries and restarts.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from itertools import batched
import math
import threading
from typing import TYPE_CHECKING

import numpy as np

from .circuit import Circuit, randomize_variable_gates
from .config import CONVERGED_FLOOR, DIST_TOL, MAX_DENSE_QUBITS, RENORMALIZE_EVERY
from .exceptions import CapacityError, DimensionError
from .numerics import (
    basis_states,
    haar_random_states,
    spawn_generators,
    svd,
)
from .optimizer_config import Backend, OptimizerConfig, StateDistribution
from .simulator import (
    EnvironmentMatrix,
    OpCounter,
    SimCaches,
    absorb_gate,
    build_caches,
    build_full_caches,
    environment_sample,
    overlap,
    sample_cost,
)

if TYPE_CHECKING:
    from collections.abc import Callable

    from .numerics import StateSet
    from .simulator import Target


class Termination(str, Enum):
    """Why an instantiation run stopped."""

    CONVERGED = "converged"
    PLATEAU = "plateau"
    MAX_ITER = "max_iter"
    STATES_EXHAUSTED = "states_exhausted"


@dataclass
class InstantiationResult:
    """Outcome of one instantiation run (or the winning multistart).

    Attributes:
        circuit: Instantiated circuit.
        c_train: Final training cost (backend scale).
        c_val: Final validation cost; equals c_train when validation is skipped.
        termination: Stopping reason.
        iterations: Sweeps over all attempts.
        restarts: Double-and-restart events.
        final_m: Training states in the last attempt.
        counters: Multiply-add totals for the run.
        start_index: Winning multistart index.
        states_drawn: Training states drawn over all attempts.
        budget_exhausted: True when op_budget ended the run.
        cancelled: True when a lower-index start converged first.
        starts_run: Multistarts executed before a winner was chosen.
        total_counters: Work summed over every executed start.
    """

    circuit: Circuit
    c_train: float
    c_val: float
    termination: Termination
    iterations: int
    restarts: int
    final_m: int
    counters: OpCounter = field(default_factory=OpCounter)
    start_index: int = 0
    states_drawn: int = 0
    budget_exhausted: bool = False
    cancelled: bool = False
    starts_run: int = 1
    total_counters: OpCounter | None = None

    @property
    def converged(self) -> bool:
        """True when the run reached dist_tol with a passing overtrain check."""
        return self.termination is Termination.CONVERGED


def svd_update(
    env: EnvironmentMatrix | np.ndarray,
    u_prev: np.ndarray,
    beta: float = 0.0,
    counter: OpCounter | None = None,
) -> np.ndarray:
    """Return the unitary maximizing Re Tr(M·u) for M = (1-β)E + β·u_prev†.

    With M = X·D·Y†, the maximizer is Y·X†. beta = 1 keeps u_prev.

    Raises:
        DimensionError: If E and u_prev have different shapes.
    """
    e = env.e if isinstance(env, EnvironmentMatrix) else np.asarray(env)
    if e.shape != u_prev.shape:
        raise DimensionError(
            f"environment shape {e.shape} does not match gate shape {u_prev.shape}"
        )
    if beta >= 1.0:
        return np.array(u_prev, dtype=np.complex128)
    m = (1.0 - beta) * e + beta * u_prev.conj().T if beta > 0.0 else e
    x, _, y = svd(m)
    if counter is not None:
        counter.svd_updates += 1
    return y @ x.conj().T


@dataclass(frozen=True)
class SweepOutcome:
    """Circuit and cost after one right-to-left sweep."""

    circuit: Circuit
    cost: float
    update_costs: tuple[float, ...] = ()


def sweep(
    circuit: Circuit,
    caches: SimCaches,
    beta: float = 0.0,
    counter: OpCounter | None = None,
    record_updates: bool = False,
) -> SweepOutcome:
    """Update every variable gate once, right to left.

    Args:
        circuit: Current circuit; caches must have been built for it.
        caches: Training caches; stale prefixes are rebuilt first.
        beta: Update regularization.
        counter: Counter for SVD updates (cache work is charged to the
            caches' own counter).
        record_updates: Also return the training cost after each gate update.

    Returns:
        SweepOutcome with the updated circuit and its training cost.
    """
    counter = counter if counter is not None else caches.counter
    caches.refresh(circuit)
    gates = list(circuit.gates)
    right = caches.a
    update_costs: list[float] = []
    for step, i in enumerate(range(len(gates) - 1, -1, -1), start=1):
        gate = gates[i]
        if gate.is_variable:
            env = environment_sample(caches, circuit, i, right)
            new_u = svd_update(env, gate.unitary, beta, counter)
            gate = gate.with_unitary(new_u)
            gates[i] = gate
            caches.invalidate_after(i)
            if record_updates:
                trace = complex(np.trace(env.e @ new_u))
                update_costs.append(caches.cost_from_trace(trace))
        right = absorb_gate(right, gate, caches.counter)
        if step % RENORMALIZE_EVERY == 0:
            right = right.renormalized()
    trace = overlap(right, caches.inputs, caches.counter)
    return SweepOutcome(
        circuit=circuit.with_gates(gates),
        cost=caches.cost_from_trace(trace),
        update_costs=tuple(update_costs),
    )


def generalization_error(c_train: float, c_val: float, dist_tol: float) -> float:
    """Normalized generalization error c_val/c_train - 1.

    When c_train is numerically zero the ratio is undefined: both costs below
    dist_tol count as 0, otherwise the error is infinite (always overtrained).
    """
    if c_train < CONVERGED_FLOOR:
        return 0.0 if c_val < dist_tol else math.inf
    return c_val / c_train - 1.0


def validation_check(
    caches_train: SimCaches,
    caches_val: SimCaches,
    circuit: Circuit,
    dist_tol: float = DIST_TOL,
) -> float:
    """Return c_val/c_train - 1 for the current circuit.

    An exact fit on both sets (training cost numerically zero, validation
    cost below dist_tol) counts as 0.
    """
    return generalization_error(
        sample_cost(caches_train, circuit), sample_cost(caches_val, circuit), dist_tol
    )


def _training_states(
    n: int, m: int, config: OptimizerConfig, rng: np.random.Generator
) -> StateSet:
    if config.distribution is StateDistribution.BASIS:
        return basis_states(n, m, rng)
    return haar_random_states(n, m, rng)


def _over_budget(counter: OpCounter, budget: int | None) -> bool:
    return budget is not None and counter.multiply_adds >= budget


def _check_target(target: Target, template: Circuit) -> None:
    if isinstance(target, Circuit):
        if target.n != template.n:
            raise DimensionError(
                f"target circuit has {target.n} qubits, template {template.n}"
            )
        return
    shape = np.shape(target)
    if shape != (template.dim, template.dim):
        raise DimensionError(
            f"target shape {shape} does not match a {template.n}-qubit template"
        )


def instantiate(
    target: Target,
    template: Circuit,
    config: OptimizerConfig,
    rng: np.random.Generator,
    should_stop: Callable[[], bool] | None = None,
) -> InstantiationResult:
    """Fit the template's variable gates to the target.

    The template's current unitaries are the starting point.

    Args:
        target: Dense 2^n × 2^n unitary or a circuit implementing it.
        template: Circuit structure with initial gate unitaries.
        config: Hyperparameters.
        rng: Stream for training and validation states.
        should_stop: Polled once per sweep; True cancels the run.

    Returns:
        InstantiationResult for this run.

    Raises:
        DimensionError: If target and template sizes differ.
        CapacityError: If the backend guard is exceeded.
    """
    _check_target(target, template)
    n = template.n
    full_m = 2**n
    full = config.backend is Backend.FULL
    if full and n > MAX_DENSE_QUBITS:
        raise CapacityError(f"full backend limited to {MAX_DENSE_QUBITS} qubits")
    cap = min(config.max_training_states or full_m, full_m)
    m = full_m if full else min(config.num_training_states, cap)

    counter = OpCounter()
    circuit = template
    iterations = 0
    restarts = 0
    states_drawn = 0

    while True:
        if full:
            caches = build_full_caches(target, circuit, counter)
            val_caches = None
        else:
            inputs = _training_states(n, m, config, rng)
            caches = build_caches(target, circuit, inputs, counter)
            val_caches = (
                build_caches(target, circuit, haar_random_states(n, m, rng), counter)
                if m < full_m
                else None
            )
        states_drawn += m

        attempt_iter = 0
        stale = 0
        previous: float | None = None
        restart = False
        termination: Termination | None = None
        budget_exhausted = False
        cancelled = False
        c_val: float | None = None

        while termination is None:
            outcome = sweep(circuit, caches, config.beta, counter)
            circuit = outcome.circuit
            c_train = outcome.cost
            iterations += 1
            attempt_iter += 1
            if val_caches is not None:
                val_caches.invalidate_after(0)
                c_val = sample_cost(val_caches, circuit)

            if iterations >= config.max_iter:
                limit = Termination.MAX_ITER
            elif _over_budget(counter, config.op_budget):
                limit, budget_exhausted = Termination.MAX_ITER, True
            elif should_stop is not None and should_stop():
                limit, cancelled = Termination.MAX_ITER, True
            else:
                limit = None

            if attempt_iter >= config.min_iter:
                overtrained = (
                    c_val is not None
                    and generalization_error(c_train, c_val, config.dist_tol)
                    > config.overtrain_ratio
                )
                if overtrained:
                    if m >= cap:
                        termination = Termination.STATES_EXHAUSTED
                        budget_exhausted = cancelled = False
                    elif limit is None:
                        m = min(2 * m, cap)
                        restarts += 1
                        restart = True
                        break
                elif c_train < config.dist_tol:
                    termination = Termination.CONVERGED
                    budget_exhausted = cancelled = False
                elif attempt_iter > config.min_iter and previous is not None:
                    if abs(previous) - abs(c_train) > config.diff_tol_r * abs(c_train):
                        stale = 0
                    else:
                        stale += 1
                    if stale >= config.plateau_window:
                        termination = Termination.PLATEAU
                        budget_exhausted = cancelled = False
            previous = c_train
            if termination is None:
                termination = limit

        if restart:
            continue
        return InstantiationResult(
            circuit=circuit,
            c_train=c_train,
            c_val=c_train if c_val is None else c_val,
            termination=termination,
            iterations=iterations,
            restarts=restarts,
            final_m=m,
            counters=counter,
            states_drawn=states_drawn,
            budget_exhausted=budget_exhausted,
            cancelled=cancelled,
        )


class _StartBoard:
    """Lowest converged start index seen so far, shared by parallel starts."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._best: int | None = None

    def record(self, index: int) -> None:
        with self._lock:
            if self._best is None or index < self._best:
                self._best = index

    def beaten(self, index: int) -> bool:
        with self._lock:
            return self._best is not None and self._best < index


def _pick_winner(results: list[InstantiationResult]) -> InstantiationResult:
    finished = [r for r in results if not r.cancelled]
    converged = [r for r in finished if r.converged]
    if converged:
        return min(converged, key=lambda r: r.start_index)
    return min(finished, key=lambda r: (r.c_train, r.start_index))


def multistart_instantiate(
    target: Target,
    template: Circuit,
    config: OptimizerConfig,
    seed_with_template: bool = False,
) -> InstantiationResult:
    """Run config.multistarts independent instantiations and pick a winner.

    Start i draws Haar-random initial unitaries for every variable gate and
    its training states from the i-th stream split off config.seed. Starts
    run concurrently in batches of config.multistart_batch. The winner is the
    lowest-index converged start, else the lowest c_train (ties to the lowest
    index). A start is cancelled only once a lower-index start has converged,
    so the winner does not depend on scheduling.

    Args:
        target: Dense unitary or target circuit.
        template: Circuit structure.
        config: Hyperparameters.
        seed_with_template: Start 0 keeps the template's own unitaries.

    Returns:
        The winning InstantiationResult with start_index set.
    """
    _check_target(target, template)
    rngs = spawn_generators(config.seed, config.multistarts)
    board = _StartBoard()

    def run(index: int) -> InstantiationResult:
        rng = rngs[index]
        if seed_with_template and index == 0:
            start = template
        else:
            start = randomize_variable_gates(template, rng)
        result = instantiate(
            target, start, config, rng, should_stop=lambda: board.beaten(index)
        )
        if result.converged:
            board.record(index)
        return replace(result, start_index=index)

    results: list[InstantiationResult] = []
    with ThreadPoolExecutor(max_workers=config.multistart_batch) as pool:
        for batch in batched(range(config.multistarts), config.multistart_batch):
            batch_results = list(pool.map(run, batch))
            results.extend(batch_results)
            if any(r.converged for r in batch_results):
                break

    total = OpCounter()
    for r in results:
        total.add(r.counters)
    winner = _pick_winner(results)
    return replace(winner, starts_run=len(results), total_counters=total)
