"""Tests for the qinst command-line interface."""

import csv
import io
import json

import numpy as np
import pytest

from qinstantiate.circuit import Circuit, Gate, circuit_unitary
from qinstantiate.cli import (
    EXIT_ERROR,
    EXIT_NOT_CONVERGED,
    EXIT_OK,
    EXIT_STATES_EXHAUSTED,
    exit_code_for,
    main,
)
from qinstantiate.models import BenchRow, RunReport
from qinstantiate.numerics import haar_random_unitary, save_unitary
from qinstantiate.optimizer import Termination
from qinstantiate.qasm import parse_qasm, write_qasm

FAST = ["--multistarts", "4", "--multistart-batch", "2", "--dist-tol", "1e-8"]


@pytest.fixture
def bell_files(tmp_path, bell_qasm):
    """Provide a template file and a target file holding its unitary.

    Returns:
        Tuple of (target JSON path, template QASM path).
    """
    template = tmp_path / "template.qasm"
    template.write_text(bell_qasm)
    target = tmp_path / "target.json"
    save_unitary(target, circuit_unitary(parse_qasm(bell_qasm)))
    return target, template


@pytest.fixture
def redundant_qasm(tmp_path, rng):
    """Provide a 3-qubit circuit followed by its inverse.

    Returns:
        Path to the QASM file.
    """
    angles = rng.uniform(-np.pi, np.pi, size=(4, 3))
    half = Circuit(
        3,
        (
            Gate.u3(0, *angles[0]),
            Gate.u3(1, *angles[1]),
            Gate.cx(0, 1),
            Gate.u3(1, *angles[2]),
            Gate.cx(1, 2),
            Gate.u3(2, *angles[3]),
        ),
    )
    path = tmp_path / "redundant.qasm"
    path.write_text(write_qasm(half.concatenate(half.inverse())))
    return path


def _report(path):
    return RunReport.model_validate_json(path.read_text())


def test_exit_codes():
    assert exit_code_for(Termination.CONVERGED) == EXIT_OK
    assert exit_code_for(Termination.PLATEAU) == EXIT_NOT_CONVERGED
    assert exit_code_for(Termination.MAX_ITER) == EXIT_NOT_CONVERGED
    assert exit_code_for(Termination.STATES_EXHAUSTED) == EXIT_STATES_EXHAUSTED


class TestInstantiate:
    """qinst instantiate."""

    def test_self_instantiation(self, tmp_path, bell_files):
        target, template = bell_files
        out = tmp_path / "report.json"
        fitted = tmp_path / "fitted.qasm"
        code = main(
            ["-q", "instantiate", str(target), str(template), *FAST]
            + ["--out", str(out), "--qasm-out", str(fitted)]
        )
        assert code == EXIT_OK
        report = _report(out)
        assert report.command == "instantiate"
        assert report.instantiation.converged
        assert report.instantiation.c_train < 1e-8
        assert report.config["multistarts"] == 4
        circuit = parse_qasm(fitted.read_text())
        assert circuit.n == 2
        assert len(circuit) == 5

    def test_report_on_stdout(self, capsys, bell_files):
        target, template = bell_files
        assert main(["-q", "instantiate", str(target), str(template), *FAST]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["instantiation"]["termination"] == "converged"

    def test_qasm_target(self, tmp_path, bell_files):
        _, template = bell_files
        out = tmp_path / "report.json"
        code = main(
            ["-q", "instantiate", str(template), str(template), *FAST]
            + ["--out", str(out)]
        )
        assert code == EXIT_OK
        assert _report(out).instantiation.frobenius_distance < 1e-6

    def test_forced_cap(self, tmp_path, rng, bell_files):
        _, template = bell_files
        target = tmp_path / "hard.json"
        save_unitary(target, haar_random_unitary(4, rng))
        out = tmp_path / "report.json"
        code = main(
            ["-q", "instantiate", str(target), str(template), "--multistarts", "2"]
            + ["--max-iter", "1", "--min-iter", "1", "--out", str(out)]
        )
        assert code == EXIT_NOT_CONVERGED
        assert _report(out).instantiation.termination == "max_iter"

    def test_backends_agree(self, tmp_path, rng, ansatz):
        circuit = ansatz(3, 2, rng)
        template = tmp_path / "ansatz.qasm"
        template.write_text(write_qasm(circuit))
        target = tmp_path / "target.json"
        save_unitary(target, circuit_unitary(circuit))
        distances = []
        for backend in ("sample", "full"):
            out = tmp_path / f"{backend}.json"
            code = main(
                ["-q", "instantiate", str(target), str(template), *FAST]
                + ["--backend", backend, "--out", str(out)]
            )
            assert code == EXIT_OK
            distances.append(_report(out).instantiation.frobenius_distance)
        assert abs(distances[0] - distances[1]) <= 1e-8

    def test_deterministic_across_batch_sizes(self, tmp_path, bell_files):
        target, template = bell_files
        dumps = []
        for batch in ("1", "4"):
            out = tmp_path / f"run{batch}.json"
            main(
                ["-q", "instantiate", str(target), str(template), "--seed", "3"]
                + ["--multistarts", "4", "--multistart-batch", batch]
                + ["--out", str(out)]
            )
            dumps.append(json.dumps(_report(out).deterministic_dump(), sort_keys=True))
        assert dumps[0] == dumps[1]

    def test_config_file_and_flag_precedence(self, tmp_path, bell_files):
        target, template = bell_files
        config = tmp_path / "opt.toml"
        config.write_text("dist_tol = 1e-7\nmultistarts = 2\nseed = 9\n")
        out = tmp_path / "report.json"
        main(
            ["-q", "instantiate", str(target), str(template)]
            + ["--config", str(config), "--seed", "4", "--out", str(out)]
        )
        report = _report(out)
        assert report.config["dist_tol"] == 1e-7
        assert report.config["multistarts"] == 2
        assert report.seed == 4

    def test_missing_file(self, tmp_path, bell_files):
        _, template = bell_files
        missing = tmp_path / "missing.json"
        assert main(["-q", "instantiate", str(missing), str(template)]) == EXIT_ERROR

    def test_parse_error(self, tmp_path, bell_files):
        target, _ = bell_files
        bad = tmp_path / "bad.qasm"
        bad.write_text('OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[2];\nh q[0];\n')
        assert main(["-q", "instantiate", str(target), str(bad)]) == EXIT_ERROR

    def test_invalid_config_value(self, bell_files):
        target, template = bell_files
        code = main(["-q", "instantiate", str(target), str(template), "--beta", "2"])
        assert code == EXIT_ERROR


class TestResynth:
    """qinst resynth."""

    def test_double_inverse_shrinks(self, tmp_path, redundant_qasm):
        out = tmp_path / "report.json"
        smaller = tmp_path / "smaller.qasm"
        code = main(
            ["-q", "resynth", str(redundant_qasm), "--k", "3", *FAST]
            + ["--out", str(out), "--qasm-out", str(smaller)]
        )
        assert code == EXIT_OK
        summary = _report(out).resynth
        before = summary.u3_before + summary.cnot_before
        after = summary.u3_after + summary.cnot_after
        assert after < before
        assert len(parse_qasm(smaller.read_text())) == after

    def test_infeasible_k(self, redundant_qasm):
        assert main(["-q", "resynth", str(redundant_qasm), "--k", "1"]) == EXIT_ERROR

    def test_deterministic(self, tmp_path, redundant_qasm):
        dumps = []
        for batch, workers in (("1", "1"), ("4", "3")):
            out = tmp_path / f"run{batch}.json"
            main(
                ["-q", "resynth", str(redundant_qasm), "--k", "2", *FAST]
                + ["--seed", "11", "--multistart-batch", batch]
                + ["--workers", workers, "--out", str(out)]
            )
            dumps.append(json.dumps(_report(out).deterministic_dump(), sort_keys=True))
        assert dumps[0] == dumps[1]


class TestBench:
    """qinst bench."""

    def test_dataset_schema(self, tmp_path, bell_qasm):
        corpus = tmp_path / "corpus"
        corpus.mkdir()
        (corpus / "bell.qasm").write_text(bell_qasm)
        csv_out = tmp_path / "bench.csv"
        out = tmp_path / "summary.json"
        code = main(
            ["-q", "bench", str(corpus), "--sizes", "2", "--per-size", "3", *FAST]
            + ["--csv-out", str(csv_out), "--out", str(out)]
        )
        assert code == EXIT_OK
        with csv_out.open() as f:
            rows = list(csv.DictReader(f))
        assert len(rows) == 2 * 3
        assert set(rows[0]) == set(BenchRow.model_fields)
        assert {r["backend"] for r in rows} == {"sample", "full"}
        for row in rows:
            expected = int(row["u3"]) / 2 ** int(row["n"])
            assert float(row["bin_key"]) == pytest.approx(expected)
        summary = json.loads(out.read_text())
        assert summary["rows"] == 6
        assert sum(b["runs"] for b in summary["bins"]) == 6

    @pytest.mark.parametrize(
        "flags",
        [
            ["--bin-width", "0"],
            ["--bin-width", "-0.5"],
            ["--per-size", "0"],
            ["--per-size", "-1"],
            ["--sizes", "0,3"],
            ["--timeout", "0"],
        ],
    )
    def test_invalid_settings_fail_before_running(self, tmp_path, bell_qasm, flags):
        corpus = tmp_path / "corpus"
        corpus.mkdir()
        (corpus / "bell.qasm").write_text(bell_qasm)
        csv_out = tmp_path / "bench.csv"
        args = ["-q", "bench", str(corpus), "--sizes", "2", *FAST, *flags]
        code = main([*args, "--csv-out", str(csv_out)])
        assert code == EXIT_ERROR
        assert not csv_out.exists()

    def test_empty_corpus(self, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        code = main(["-q", "bench", str(empty), "--sizes", "2"])
        assert code == EXIT_ERROR


class TestPartitionStats:
    """qinst partition-stats."""

    def test_two_qubit_circuit(self, capsys, tmp_path, bell_qasm):
        path = tmp_path / "bell.qasm"
        path.write_text(bell_qasm)
        assert main(["partition-stats", str(path), "--k-list", "3"]) == EXIT_OK
        rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
        assert rows == [
            {"k": "3", "size": "2", "partitions": "1", "gates": "5", "fraction": "1.0"}
        ]

    def test_bad_parameter_expression(self, tmp_path):
        path = tmp_path / "bad.qasm"
        path.write_text(
            'OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[1];\nu3(1/0,0,0) q[0];\n'
        )
        assert main(["partition-stats", str(path), "--k-list", "2"]) == EXIT_ERROR

    def test_fractions_sum_to_one(self, tmp_path, rng, random_circuit):
        path = tmp_path / "random.qasm"
        path.write_text(write_qasm(random_circuit(6, 40, rng)))
        out = tmp_path / "coverage.csv"
        code = main(
            ["partition-stats", str(path), "--k-list", "2,3,4", "--out", str(out)]
        )
        assert code == EXIT_OK
        with out.open() as f:
            rows = list(csv.DictReader(f))
        for k in ("2", "3", "4"):
            total = sum(float(r["fraction"]) for r in rows if r["k"] == k)
            assert total == pytest.approx(1.0)
