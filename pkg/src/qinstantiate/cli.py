"""Command-line interface for qinstantiate.

Commands:
1. instantiate: fit a QASM template to a target unitary (multistart)
2. resynth: partition a circuit and delete gates block by block
3. bench: re-instantiate random partitions of a corpus with both backends
4. partition-stats: coverage histograms of the partitioner for several k

Reports go to stdout (or --out) as JSON; progress and diagnostics go to
stderr. Exit codes: 0 converged (or success), 2 plateau / max_iter,
3 states_exhausted, 1 on any error.
"""

from __future__ import annotations

import argparse
from pathlib import Path
import time
from typing import TYPE_CHECKING

from pydantic import ValidationError
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from . import __version__
from .circuit import Circuit, circuit_unitary
from .config import MAX_DENSE_QUBITS, RESYNTH_MAX_ITER
from .exceptions import InstantiationError
from .models import (
    BenchSummary,
    InstantiationSummary,
    RunReport,
    TimingInfo,
)
from .numerics import load_unitary
from .optimizer import InstantiationResult, Termination, multistart_instantiate
from .optimizer_config import Backend, OptimizerConfig, StateDistribution
from .qasm import parse_qasm, write_qasm
from .report import write_json
from .simulator import frobenius_cost

if TYPE_CHECKING:
    import numpy as np

console = Console(stderr=True)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2
EXIT_STATES_EXHAUSTED = 3

_EXIT_CODES = {
    Termination.CONVERGED: EXIT_OK,
    Termination.PLATEAU: EXIT_NOT_CONVERGED,
    Termination.MAX_ITER: EXIT_NOT_CONVERGED,
    Termination.STATES_EXHAUSTED: EXIT_STATES_EXHAUSTED,
}

# CLI flag dest -> OptimizerConfig field
_CONFIG_FLAGS = {
    "dist_tol": "dist_tol",
    "diff_tol_r": "diff_tol_r",
    "plateau_window": "plateau_window",
    "beta": "beta",
    "train_states": "num_training_states",
    "overtrain_ratio": "overtrain_ratio",
    "min_iter": "min_iter",
    "max_iter": "max_iter",
    "multistarts": "multistarts",
    "seed": "seed",
    "backend": "backend",
    "state_dist": "distribution",
    "multistart_batch": "multistart_batch",
    "max_train_states": "max_training_states",
    "op_budget": "op_budget",
}


def exit_code_for(termination: Termination) -> int:
    """Map a termination reason to the process exit code."""
    return _EXIT_CODES[termination]


def _optimizer_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group("optimizer")
    group.add_argument(
        "--config", type=Path, help="TOML file with optimizer settings (flat table)"
    )
    group.add_argument("--dist-tol", type=float, help="Convergence threshold")
    group.add_argument(
        "--diff-tol-r", type=float, help="Relative improvement for plateau detection"
    )
    group.add_argument("--plateau-window", type=int, help="Plateau window length")
    group.add_argument("--beta", type=float, help="Update regularization in [0, 1]")
    group.add_argument("--train-states", type=int, help="Initial training states M")
    group.add_argument(
        "--max-train-states", type=int, help="Cap on M below 2^n (states_exhausted)"
    )
    group.add_argument(
        "--overtrain-ratio", type=float, help="Generalization error threshold"
    )
    group.add_argument("--min-iter", type=int, help="Iterations before stop checks")
    group.add_argument("--max-iter", type=int, help="Sweep cap over all attempts")
    group.add_argument("--multistarts", type=int, help="Independent random starts")
    group.add_argument("--seed", type=int, help="Root seed")
    group.add_argument(
        "--backend", choices=[b.value for b in Backend], help="Cost backend"
    )
    group.add_argument(
        "--state-dist",
        choices=[d.value for d in StateDistribution],
        help="Training state distribution",
    )
    group.add_argument(
        "--multistart-batch", type=int, help="Starts run concurrently per batch"
    )
    group.add_argument(
        "--op-budget", type=int, help="Multiply-add budget per run (timeout)"
    )
    return parent


def load_config(args: argparse.Namespace) -> OptimizerConfig:
    """Build the config: defaults < --config file < explicit flags."""
    overrides = {
        field: getattr(args, dest, None) for dest, field in _CONFIG_FLAGS.items()
    }
    if getattr(args, "config", None) is not None:
        return OptimizerConfig.from_file(args.config, **overrides)
    return OptimizerConfig.from_args(**overrides)


def _load_circuit(path: Path) -> Circuit:
    return parse_qasm(path.read_text(encoding="utf-8"))


def _load_target(path: Path) -> Circuit | np.ndarray:
    if path.suffix == ".qasm":
        return _load_circuit(path)
    return load_unitary(path)


def _write_qasm_file(circuit: Circuit, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(write_qasm(circuit), encoding="utf-8")
    console.print(f"[green]Saved circuit to: {path}[/]")


def _result_distance(target: object, result: InstantiationResult) -> float | None:
    circuit = result.circuit
    if circuit.n > MAX_DENSE_QUBITS:
        return None
    dense = circuit_unitary(target) if isinstance(target, Circuit) else target
    return frobenius_cost(dense, circuit)


def _print_summary(summary: InstantiationSummary) -> None:
    table = Table(title="Instantiation")
    table.add_column("field", style="cyan")
    table.add_column("value", justify="right")
    color = "green" if summary.converged else "yellow"
    table.add_row("termination", f"[{color}]{summary.termination}[/]")
    table.add_row("c_train", f"{summary.c_train:.3e}")
    table.add_row("c_val", f"{summary.c_val:.3e}")
    if summary.frobenius_distance is not None:
        table.add_row("frobenius", f"{summary.frobenius_distance:.3e}")
    table.add_row("iterations", str(summary.iterations))
    table.add_row("restarts", str(summary.restarts))
    table.add_row("final M", str(summary.final_m))
    table.add_row("winning start", f"{summary.start_index} of {summary.starts_run}")
    table.add_row("multiply-adds", f"{summary.total_counters.multiply_adds:,}")
    console.print(table)


def cmd_instantiate(args: argparse.Namespace) -> int:
    """Instantiate a QASM template against a target unitary or circuit."""
    start = time.perf_counter()
    timing = TimingInfo()
    config = load_config(args)
    target = _load_target(args.target)
    template = _load_circuit(args.template)

    result = multistart_instantiate(target, template, config)
    summary = InstantiationSummary.from_result(
        result, frobenius_distance=_result_distance(target, result)
    )
    timing.runtime_s = time.perf_counter() - start
    report = RunReport(
        command="instantiate",
        tool_version=__version__,
        seed=config.seed,
        config=config.to_dict(),
        inputs={"target": str(args.target), "template": str(args.template)},
        instantiation=summary,
        timing=timing,
    )
    if not args.quiet:
        _print_summary(summary)
    write_json(report, args.out)
    if args.qasm_out is not None:
        _write_qasm_file(result.circuit, args.qasm_out)
    return exit_code_for(result.termination)


def cmd_resynth(args: argparse.Namespace) -> int:
    """Run the partition + gate-deletion flow on a QASM circuit."""
    from .report import print_resynth_table
    from .resynth import resynth_flow

    start = time.perf_counter()
    timing = TimingInfo()
    config = load_config(args)
    circuit = _load_circuit(args.input)
    outcome = resynth_flow(
        circuit,
        args.k,
        config,
        max_workers=args.workers,
        repeat_until_fixpoint=args.repeat,
        max_iter=args.resynth_max_iter,
        show_progress=not args.quiet,
    )
    timing.runtime_s = time.perf_counter() - start
    report = RunReport(
        command="resynth",
        tool_version=__version__,
        seed=config.seed,
        config=config.to_dict(),
        inputs={"input": str(args.input)},
        resynth=outcome.report,
        timing=timing,
    )
    if not args.quiet:
        print_resynth_table(outcome.report)
    write_json(report, args.out)
    if args.qasm_out is not None:
        _write_qasm_file(outcome.circuit, args.qasm_out)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    """Benchmark both backends on random partitions of a QASM corpus."""
    from .bench import aggregate_bins, load_corpus, run_bench, validate_bench_args
    from .report import print_bench_table, write_bench_csv

    start = time.perf_counter()
    timing = TimingInfo()
    validate_bench_args(args.sizes, args.per_size, args.bin_width)
    config = load_config(args)
    if args.timeout is not None:
        config = config.with_overrides(op_budget=args.timeout)
    corpus = load_corpus(args.circuit_dir)
    backends = [Backend(b) for b in args.backends]
    rows = run_bench(
        corpus,
        args.sizes,
        args.per_size,
        config,
        backends=backends,
        show_progress=not args.quiet,
    )
    bins = aggregate_bins(rows, args.bin_width)
    write_bench_csv(args.csv_out, rows)
    timing.runtime_s = time.perf_counter() - start
    summary = BenchSummary(
        tool_version=__version__,
        seed=config.seed,
        sizes=list(args.sizes),
        per_size=args.per_size,
        op_budget=config.op_budget,
        bin_width=args.bin_width,
        rows=len(rows),
        bins=bins,
        timing=timing,
    )
    if not args.quiet:
        print_bench_table(bins)
    write_json(summary, args.out)
    return EXIT_OK


def cmd_partition_stats(args: argparse.Namespace) -> int:
    """Emit coverage histograms of the partitioner for each requested k."""
    from .partitioner import partition
    from .report import write_coverage_csv

    circuit = _load_circuit(args.input)
    reports = [partition(circuit, k)[1] for k in args.k_list]
    write_coverage_csv(reports, args.out)
    return EXIT_OK


def _int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated ints: {text}"
        ) from None
    if not values:
        raise argparse.ArgumentTypeError("expected at least one value")
    return values


def build_parser() -> argparse.ArgumentParser:
    """Create the argument parser with all subcommands."""
    parser = argparse.ArgumentParser(
        prog="qinst",
        description="Quantum circuit instantiation and gate-deletion re-synthesis",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Fit a template to a unitary with the sampled backend
  qinst instantiate target.json template.qasm --qasm-out fitted.qasm

  # Same with the full-unitary backend and a config file
  qinst instantiate target.json template.qasm --backend full --config opt.toml

  # Delete gates in 3-qubit blocks
  qinst resynth circuit.qasm --k 3 --qasm-out smaller.qasm

  # Compare backends on 4- and 5-qubit partitions of a corpus
  qinst bench circuits/ --sizes 4,5 --per-size 10 --timeout 100000000

  # Partition coverage for several block sizes
  qinst partition-stats circuit.qasm --k-list 2,3,4
        """,
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "-q", "--quiet", action="store_true", help="No tables or progress on stderr"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    optimizer = _optimizer_flags()

    inst = sub.add_parser(
        "instantiate", parents=[optimizer], help="Fit a template to a target"
    )
    inst.add_argument(
        "target", type=Path, help="Unitary JSON file (or a .qasm target circuit)"
    )
    inst.add_argument("template", type=Path, help="QASM template circuit")
    inst.add_argument("--out", type=Path, help="Report file (default: stdout)")
    inst.add_argument("--qasm-out", type=Path, help="Write the fitted circuit")
    inst.set_defaults(handler=cmd_instantiate)

    res = sub.add_parser("resynth", parents=[optimizer], help="Gate-deletion flow")
    res.add_argument("input", type=Path, help="QASM circuit")
    res.add_argument("--k", type=int, required=True, help="Maximum block size")
    res.add_argument("--workers", type=int, help="Partitions processed concurrently")
    res.add_argument(
        "--repeat", action="store_true", help="Repeat deletion sweeps to a fixpoint"
    )
    res.add_argument(
        "--resynth-max-iter",
        type=int,
        default=RESYNTH_MAX_ITER,
        help=f"Per-run sweep cap inside the flow (default: {RESYNTH_MAX_ITER})",
    )
    res.add_argument("--out", type=Path, help="Report file (default: stdout)")
    res.add_argument("--qasm-out", type=Path, help="Write the optimized circuit")
    res.set_defaults(handler=cmd_resynth)

    bench = sub.add_parser("bench", parents=[optimizer], help="Backend benchmark")
    bench.add_argument("circuit_dir", type=Path, help="Directory of .qasm files")
    bench.add_argument(
        "--sizes", type=_int_list, required=True, help="Partition sizes, e.g. 3,4"
    )
    bench.add_argument("--per-size", type=int, default=5, help="Partitions per size")
    bench.add_argument(
        "--timeout", type=int, help="Per-run multiply-add budget (cooperative)"
    )
    bench.add_argument(
        "--backends",
        nargs="+",
        choices=[b.value for b in Backend],
        default=[b.value for b in Backend],
        help="Backends to run (default: both)",
    )
    bench.add_argument(
        "--bin-width", type=float, default=0.5, help="Width of u3/2^n bins"
    )
    bench.add_argument(
        "--csv-out", type=Path, default=Path("bench.csv"), help="Dataset CSV path"
    )
    bench.add_argument("--out", type=Path, help="Summary JSON (default: stdout)")
    bench.set_defaults(handler=cmd_bench)

    stats = sub.add_parser("partition-stats", help="Partition coverage histograms")
    stats.add_argument("input", type=Path, help="QASM circuit")
    stats.add_argument(
        "--k-list", type=_int_list, required=True, help="Block sizes, e.g. 2,3,4"
    )
    stats.add_argument("--out", type=Path, help="CSV file (default: stdout)")
    stats.set_defaults(handler=cmd_partition_stats)

    return parser


def main(argv: list[str] | None = None) -> int:
    """Run the qinst CLI.

    Returns:
        Process exit code.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except InstantiationError as e:
        console.print(f"\n[red]Error: {escape(str(e))}[/]")
        return EXIT_ERROR
    except ValidationError as e:
        console.print(f"\n[red]Error: invalid input file: {escape(str(e))}[/]")
        return EXIT_ERROR
    except OSError as e:
        console.print(f"\n[red]Error: {escape(str(e))}[/]")
        return EXIT_ERROR
    except KeyboardInterrupt:
        console.print("\n[yellow]Interrupted by user[/]")
        return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
