"""Write reports and datasets.

This module provides export functionality for:
- RunReport / BenchSummary JSON (stdout or a file)
- bench dataset CSV (one BenchRow per line)
- partition-stats CSV (k, size, partitions, gates, fraction)
- summary tables rendered with rich on stderr
"""

from __future__ import annotations

import csv
import io
import sys
from typing import TYPE_CHECKING

from rich.console import Console
from rich.table import Table

from .models import BenchRow

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence
    from pathlib import Path

    from pydantic import BaseModel

    from .models import BenchBin, ResynthReport
    from .partitioner import CoverageReport

console = Console(stderr=True)

COVERAGE_COLUMNS = ("k", "size", "partitions", "gates", "fraction")


def write_json(model: BaseModel, path: Path | None = None) -> str:
    """Serialize a model as indented JSON to a file, or to stdout.

    Args:
        model: Report model.
        path: Output file; None writes to stdout.

    Returns:
        The JSON text.
    """
    text = model.model_dump_json(indent=2)
    if path is None:
        sys.stdout.write(text + "\n")
        sys.stdout.flush()
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + "\n", encoding="utf-8")
        console.print(f"[green]Saved report to: {path}[/]")
    return text


def write_bench_csv(path: Path, rows: Sequence[BenchRow]) -> Path:
    """Write the bench dataset with a header row."""
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = list(BenchRow.model_fields)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=columns)
        writer.writeheader()
        for row in rows:
            writer.writerow(row.model_dump(mode="json"))
    console.print(f"[green]Saved dataset to: {path} ({len(rows)} rows)[/]")
    return path


def coverage_rows(
    reports: Iterable[CoverageReport],
) -> list[dict[str, int | float]]:
    """Flatten coverage reports into CSV rows, one per (k, size)."""
    return [
        {
            "k": report.k,
            "size": b.size,
            "partitions": b.partitions,
            "gates": b.gates,
            "fraction": b.fraction,
        }
        for report in reports
        for b in report.bins
    ]


def write_coverage_csv(
    reports: Iterable[CoverageReport], path: Path | None = None
) -> str:
    """Write partition-stats rows to a file, or to stdout.

    Returns:
        The CSV text.
    """
    rows = coverage_rows(reports)
    buffer = io.StringIO()
    writer = csv.DictWriter(
        buffer, fieldnames=COVERAGE_COLUMNS, lineterminator="\n"
    )
    writer.writeheader()
    writer.writerows(rows)
    text = buffer.getvalue()
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        console.print(f"[green]Saved coverage to: {path} ({len(rows)} rows)[/]")
    return text


def print_resynth_table(report: ResynthReport) -> None:
    """Render #U3 / #CNOT before and after, plus runtime."""
    table = Table(title="Gate deletion")
    table.add_column("", style="cyan")
    table.add_column("#U3", justify="right")
    table.add_column("#CNOT", justify="right")
    table.add_row("before", str(report.u3_before), str(report.cnot_before))
    table.add_row("after", str(report.u3_after), str(report.cnot_after))
    console.print(table)
    console.print(
        f"  Partitions: {len(report.partitions)} "
        f"(modified {report.modified_partitions}), "
        f"runtime {report.timing.runtime_s:.2f}s"
    )


def print_bench_table(bins: Sequence[BenchBin]) -> None:
    """Render success rate per backend and u3/2^n bin."""
    table = Table(title="Instantiation success rate")
    table.add_column("backend", style="cyan")
    table.add_column("u3/2^n", justify="right")
    table.add_column("runs", justify="right")
    table.add_column("success", justify="right")
    for b in bins:
        table.add_row(
            b.backend,
            f"[{b.bin_low:g}, {b.bin_high:g})",
            str(b.runs),
            f"{b.success_rate:.0%}",
        )
    console.print(table)
