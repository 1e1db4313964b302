#!/usr/bin/env python3
"""
Quick-run demo for qinstantiate.

Fits a small u3/cx circuit to its own unitary with both backends, then runs
the gate-deletion flow on a circuit followed by its inverse.

Usage:
    python run.py

    # Or with UV:
    uv run python run.py
"""

from pathlib import Path

# Add src to path for development
import sys
sys.path.insert(0, str(Path(__file__).parent / "src"))

import numpy as np

from qinstantiate import (
    Backend,
    OptimizerConfig,
    circuit_unitary,
    frobenius_cost,
    multistart_instantiate,
    parse_qasm,
    resynth_flow,
)

TEMPLATE = """OPENQASM 2.0;
include "qelib1.inc";
qreg q[3];
u3(0.1, 0.2, 0.3) q[0];
u3(0.4, 0.5, 0.6) q[1];
u3(0.7, 0.8, 0.9) q[2];
cx q[0],q[1];
u3(1.0, 1.1, 1.2) q[0];
u3(1.3, 1.4, 1.5) q[1];
cx q[1],q[2];
u3(1.6, 1.7, 1.8) q[1];
u3(1.9, 2.0, 2.1) q[2];
"""


def main():
    """Run both demos with fixed seeds."""
    template = parse_qasm(TEMPLATE)
    target = circuit_unitary(template)
    config = OptimizerConfig(dist_tol=1e-8, multistarts=8, seed=1)

    print(f"{'=' * 60}")
    print("INSTANTIATION")
    print(f"{'=' * 60}")
    for backend in Backend:
        result = multistart_instantiate(
            target, template, config.with_overrides(backend=backend)
        )
        work = result.total_counters or result.counters
        print(
            f"{backend.value:>6}: {result.termination.value:<16} "
            f"frobenius={frobenius_cost(target, result.circuit):.2e} "
            f"iterations={result.iterations} final_m={result.final_m} "
            f"multiply_adds={work.multiply_adds:,}"
        )

    print(f"\n{'=' * 60}")
    print("GATE DELETION")
    print(f"{'=' * 60}")
    circuit = template.concatenate(template.inverse())
    outcome = resynth_flow(circuit, 3, config.with_overrides(multistarts=4))
    report = outcome.report
    print(f"#U3:   {report.u3_before} -> {report.u3_after}")
    print(f"#CNOT: {report.cnot_before} -> {report.cnot_after}")
    print(f"Distance: {report.distance:.2e} (bound {report.distance_bound:.2e})")
    recovered = np.allclose(circuit_unitary(outcome.circuit), np.eye(8), atol=1e-4)
    print(f"Identity recovered: {recovered}")


if __name__ == "__main__":
    main()
