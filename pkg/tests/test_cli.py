"""End-to-end tests of the command-line interface.

Every test drives ``main(argv)`` the way a shell would and checks exit
codes, file outputs, and stdout.
"""

import json

import numpy as np
import pytest

from fogcache import validate_placement
from fogcache.cli import SIMULATE_HEADER, SWEEP_HEADER, TRACE_HEADER, main

from conftest import ADT_OPT, H_CPL, H_CSL, LAMBDA_STAR

REFERENCE_DOC = {
    "library": {"F": 20, "alpha": 0.6},
    "cluster": {"capacities": [2.0, 3.0, 5.0]},
    "traffic": {"lambda": 4.0, "mu_e": 8.0, "mu_b": 6.0},
}


@pytest.fixture
def scenario_file(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(REFERENCE_DOC))
    return path


def _read_csv(path):
    lines = path.read_text().splitlines()
    return lines[0].split(","), [line.split(",") for line in lines[1:]]


class TestSolveCommand:
    def test_writes_the_three_outputs(self, tmp_path, scenario_file, capsys):
        out = tmp_path / "run"
        out.mkdir()
        code = main(
            ["solve", "--scenario", str(scenario_file), "--rho", "0.02", "--out", str(out)]
        )
        assert code == 0
        placement_doc = json.loads((out / "placement.json").read_text())
        matrix = np.asarray(placement_doc["matrix"])
        assert matrix.shape == (3, 20)
        report = json.loads((out / "report.json").read_text())
        assert report["solver"] == "admm"
        assert report["converged"] is True
        assert report["adt"] == pytest.approx(ADT_OPT, abs=1e-8)
        assert report["echr"] == pytest.approx(H_CPL, abs=1e-5)
        assert report["adt_report"]["overall"] == pytest.approx(report["adt"], abs=1e-12)
        header, rows = _read_csv(out / "trace.csv")
        assert tuple(header) == TRACE_HEADER
        assert [row[0] for row in rows] == [str(k) for k in range(1, len(rows) + 1)]
        summary = capsys.readouterr().out
        assert "converged" in summary

    def test_solved_placement_is_feasible(self, tmp_path, scenario_file):
        from fogcache import Scenario

        out = tmp_path / "run"
        out.mkdir()
        main(["solve", "--scenario", str(scenario_file), "--rho", "0.02", "--out", str(out)])
        scenario = Scenario.load(scenario_file)
        matrix = np.asarray(json.loads((out / "placement.json").read_text())["matrix"])
        validate_placement(matrix, scenario.library, scenario.cluster)

    def test_pgd_solver(self, tmp_path, scenario_file):
        out = tmp_path / "run"
        out.mkdir()
        code = main(
            [
                "solve",
                "--scenario", str(scenario_file),
                "--solver", "pgd",
                "--max-iter", "4000",
                "--out", str(out),
            ]
        )
        assert code == 0
        report = json.loads((out / "report.json").read_text())
        assert report["solver"] == "pgd"
        assert report["adt"] == pytest.approx(ADT_OPT, abs=1e-8)

    def test_nonconvergence_exits_one(self, tmp_path, scenario_file, capsys):
        out = tmp_path / "run"
        out.mkdir()
        code = main(
            ["solve", "--scenario", str(scenario_file), "--max-iter", "3", "--out", str(out)]
        )
        assert code == 1
        # Outputs are still written so the partial run can be inspected.
        assert (out / "placement.json").exists()

    def test_missing_scenario_exits_two(self, tmp_path):
        code = main(["solve", "--scenario", str(tmp_path / "absent.json")])
        assert code == 2

    def test_malformed_scenario_exits_two(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert main(["solve", "--scenario", str(path)]) == 2

    def test_unknown_solver_is_an_argparse_error(self, scenario_file):
        with pytest.raises(SystemExit) as exc:
            main(["solve", "--scenario", str(scenario_file), "--solver", "simplex"])
        assert exc.value.code == 2


class TestHeuristicCommand:
    def test_prints_the_summary_json(self, scenario_file, capsys):
        assert main(["heuristic", "--scenario", str(scenario_file)]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["h_csl"] == pytest.approx(H_CSL, abs=1e-14)
        assert summary["h_cpl"] == pytest.approx(H_CPL, abs=1e-14)
        assert summary["h_star"] == pytest.approx(H_CPL, abs=1e-14)
        assert summary["lambda_star"] == pytest.approx(LAMBDA_STAR, abs=1e-12)
        assert summary["regime"] == "CPL"
        assert summary["adt"] == pytest.approx(ADT_OPT, abs=1e-14)

    def test_optional_output_directory(self, tmp_path, scenario_file, capsys):
        out = tmp_path / "heur"
        out.mkdir()
        assert main(["heuristic", "--scenario", str(scenario_file), "--out", str(out)]) == 0
        placement_doc = json.loads((out / "placement.json").read_text())
        assert np.asarray(placement_doc["matrix"]).shape == (3, 20)
        report = json.loads((out / "report.json").read_text())
        assert report["regime"] == "CPL"
        assert report["adt"] == pytest.approx(ADT_OPT, abs=1e-14)
        assert report["adt_report"]["overall"] == pytest.approx(ADT_OPT, abs=1e-14)


class TestSweepCommand:
    def _write_sweep(self, tmp_path, scenario_file, parameter, values):
        path = tmp_path / "sweep.json"
        path.write_text(
            json.dumps({"parameter": parameter, "values": values, "base": scenario_file.name})
        )
        return path

    def test_default_solvers_cover_every_value(self, tmp_path, scenario_file):
        sweep = self._write_sweep(tmp_path, scenario_file, "mu_b", [5.0, 6.0, 7.0])
        out = tmp_path / "sweep.csv"
        code = main(
            ["sweep", "--scenario", str(sweep), "--rho", "0.02", "--out", str(out)]
        )
        assert code == 0
        header, rows = _read_csv(out)
        assert tuple(header) == SWEEP_HEADER
        assert len(rows) == 9  # 3 values x (admm, heuristic, csl-only)
        assert {row[1] for row in rows} == {"admm", "heuristic", "csl-only"}
        assert all(row[6] == "ok" for row in rows)

    def test_heuristic_rows_match_the_analytic_optimum(self, tmp_path, scenario_file):
        sweep = self._write_sweep(tmp_path, scenario_file, "lambda", [4.0])
        out = tmp_path / "sweep.csv"
        main(["sweep", "--scenario", str(sweep), "--solver", "heuristic", "--out", str(out)])
        _, rows = _read_csv(out)
        assert len(rows) == 1
        value, solver, echr_col, adt_col, iterations, _, status = rows[0]
        assert (value, solver, status) == ("4", "heuristic", "ok")
        assert float(echr_col) == pytest.approx(H_CPL, abs=1e-11)
        assert float(adt_col) == pytest.approx(ADT_OPT, abs=1e-11)
        assert iterations == "0"

    def test_unstable_value_marks_rows_invalid(self, tmp_path, scenario_file):
        # mu_b = 3.9 sits below lam = 4: no stable queue exists there.
        sweep = self._write_sweep(tmp_path, scenario_file, "mu_b", [3.9, 6.0])
        out = tmp_path / "sweep.csv"
        code = main(["sweep", "--scenario", str(sweep), "--solver", "heuristic", "--out", str(out)])
        assert code == 0
        _, rows = _read_csv(out)
        by_value = {row[0]: row for row in rows}
        assert by_value["3.9"][6] == "invalid"
        assert by_value["3.9"][2] == ""  # metric columns stay empty
        assert by_value["6"][6] == "ok"

    def test_comma_separated_solver_list(self, tmp_path, scenario_file):
        sweep = self._write_sweep(tmp_path, scenario_file, "mu_e", [8.0])
        out = tmp_path / "sweep.csv"
        main(
            ["sweep", "--scenario", str(sweep), "--solver", "heuristic,csl-only", "--out", str(out)]
        )
        _, rows = _read_csv(out)
        assert [row[1] for row in rows] == ["heuristic", "csl-only"]

    def test_csl_only_rows_use_the_storage_bound(self, tmp_path, scenario_file):
        sweep = self._write_sweep(tmp_path, scenario_file, "lambda", [4.0])
        out = tmp_path / "sweep.csv"
        main(["sweep", "--scenario", str(sweep), "--solver", "csl-only", "--out", str(out)])
        _, rows = _read_csv(out)
        assert float(rows[0][2]) == pytest.approx(H_CSL, abs=1e-11)

    def test_unknown_solver_exits_two(self, tmp_path, scenario_file):
        sweep = self._write_sweep(tmp_path, scenario_file, "mu_b", [6.0])
        assert main(["sweep", "--scenario", str(sweep), "--solver", "magic"]) == 2

    def test_f_sweep_requires_a_zipf_base(self, tmp_path):
        # A base with explicit popularity has no exponent to regenerate from.
        base = tmp_path / "explicit.json"
        base.write_text(
            json.dumps(
                {
                    "library": {"popularity": [0.7, 0.3]},
                    "cluster": {"capacities": [1.0]},
                    "traffic": {"lambda": 2.0, "mu_e": 9.0, "mu_b": 5.0},
                }
            )
        )
        sweep = tmp_path / "sweep.json"
        sweep.write_text(json.dumps({"parameter": "F", "values": [5, 10], "base": "explicit.json"}))
        assert main(["sweep", "--scenario", str(sweep)]) == 2

    def test_f_sweep_regenerates_the_library(self, tmp_path, scenario_file):
        sweep = self._write_sweep(tmp_path, scenario_file, "F", [10, 40])
        out = tmp_path / "sweep.csv"
        code = main(["sweep", "--scenario", str(sweep), "--solver", "heuristic", "--out", str(out)])
        assert code == 0
        _, rows = _read_csv(out)
        # More contents spread popularity thinner: the same storage captures
        # less mass, so the best download time can only get worse.
        assert float(rows[0][3]) <= float(rows[1][3])

    def test_stdout_when_no_output_path(self, tmp_path, scenario_file, capsys):
        sweep = self._write_sweep(tmp_path, scenario_file, "lambda", [4.0])
        main(["sweep", "--scenario", str(sweep), "--solver", "heuristic"])
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == ",".join(SWEEP_HEADER)
        assert len(lines) == 2


class TestSimulateCommand:
    @pytest.fixture
    def placement_file(self, tmp_path, scenario_file):
        out = tmp_path / "heur"
        out.mkdir()
        main(["heuristic", "--scenario", str(scenario_file), "--out", str(out)])
        return out / "placement.json"

    def test_csv_schema_and_accuracy(self, tmp_path, scenario_file, placement_file):
        out = tmp_path / "sim.csv"
        code = main(
            [
                "simulate",
                "--scenario", str(scenario_file),
                "--placement", str(placement_file),
                "--seed", "5",
                "--arrivals", "30000",
                "--out", str(out),
            ]
        )
        assert code == 0
        header, rows = _read_csv(out)
        assert tuple(header) == SIMULATE_HEADER
        assert [row[0] for row in rows] == ["1", "2", "3"]  # stations are 1-based
        for row in rows:
            assert float(row[1]) == pytest.approx(H_CPL, abs=1e-11)
            assert float(row[6]) == pytest.approx(ADT_OPT, abs=1e-11)
            assert float(row[7]) < 0.1  # simulated within 10% at this short run

    def test_byte_identical_reruns(self, tmp_path, scenario_file, placement_file):
        args = [
            "simulate",
            "--scenario", str(scenario_file),
            "--placement", str(placement_file),
            "--seed", "9",
            "--arrivals", "20000",
        ]
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"
        main(args + ["--out", str(first)])
        main(args + ["--out", str(second)])
        assert first.read_bytes() == second.read_bytes()

    def test_seed_changes_the_estimates(self, tmp_path, scenario_file, placement_file):
        base = [
            "simulate",
            "--scenario", str(scenario_file),
            "--placement", str(placement_file),
            "--arrivals", "20000",
        ]
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"
        main(base + ["--seed", "1", "--out", str(first)])
        main(base + ["--seed", "2", "--out", str(second)])
        assert first.read_bytes() != second.read_bytes()

    def test_placement_without_matrix_key_exits_two(self, tmp_path, scenario_file):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"rows": [[0.0]]}))
        code = main(
            ["simulate", "--scenario", str(scenario_file), "--placement", str(bad)]
        )
        assert code == 2

    def test_mismatched_placement_exits_two(self, tmp_path, scenario_file):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"matrix": [[0.5, 0.5]]}))
        code = main(
            ["simulate", "--scenario", str(scenario_file), "--placement", str(bad)]
        )
        assert code == 2


class TestParser:
    def test_no_subcommand_is_an_argparse_error(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_unknown_subcommand_is_an_argparse_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["optimize"])
        assert exc.value.code == 2
