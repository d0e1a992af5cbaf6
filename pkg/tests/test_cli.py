import json
import math

from jmatrix.cli import main


def run_json(capsys, argv):
    status = main(argv)
    out = capsys.readouterr().out
    return status, json.loads(out)


class TestMorseCommand:
    def test_levels(self, capsys):
        status, report = run_json(capsys, ["morse", "--b", "2.25", "--levels"])
        assert status == 0
        assert report["schema"] == "jmatrix/1"
        eigs = report["results"]["bound_states"]["eigenvalues"]
        assert abs(eigs[0] + 3.0625) <= 1e-10 and abs(eigs[1] + 0.5625) <= 1e-10

    def test_identity_and_tridiag(self, capsys):
        status, report = run_json(
            capsys, ["morse", "--b", "9/4", "--identity", "0", "--tridiag", "4"]
        )
        assert status == 0
        ident = report["results"]["expansion_identity"]
        assert ident["C"] == "2/3" and ident["max_residual"] == 0.0 and ident["exact"]
        assert report["results"]["tridiag"]["split_index"] == 1

    def test_half_integer_is_usage_error(self, capsys):
        assert main(["morse", "--b", "1.5", "--levels"]) == 1

    def test_csv_levels(self, capsys):
        status = main(["--out", "csv", "morse", "--b", "2.25", "--levels"])
        assert status == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 2 and float(lines[0]) < float(lines[1]) < 0


class TestLameCommand:
    def test_spectrum_trace(self, capsys):
        status, report = run_json(capsys, ["lame", "--e", "3,-1,-2", "--m", "2", "--spectrum"])
        assert status == 0
        eigs = report["results"]["even_spectrum"]["eigenvalues"]
        assert len(eigs) == 2 and abs(sum(eigs)) <= 1e-12
        assert max(report["results"]["even_spectrum"]["ode_residuals"]) <= 1e-9

    def test_residuals_exact_zero(self, capsys):
        status, report = run_json(capsys, ["lame", "--e", "3,-1,-2", "--m", "2", "--residuals", "5"])
        assert status == 0
        for row in report["results"]["tridiag_residuals"]:
            assert row["residual_coeffs"] == []

    def test_diagnostic(self, capsys):
        status, report = run_json(
            capsys, ["lame", "--e", "3,-1,-2", "--m", "3/2", "--diagnostic", "300"]
        )
        assert status == 0
        diag = report["results"]["selfadjoint_diagnostic"]
        assert diag["sign"] == -1 and diag["heuristic"] is True

    def test_bad_branch_values(self):
        assert main(["lame", "--e", "3,-1", "--m", "2", "--spectrum"]) == 1


class TestOtherCommands:
    def test_tridiag_schema(self, capsys):
        status, report = run_json(
            capsys, ["tridiag", "--A", "0,0,0,1", "--B", "0,0,1", "--C", "0,1", "--n", "4"]
        )
        assert status == 0
        res = report["results"]
        assert set(res) == {"A_n", "B_n", "C_n", "y"}
        assert res["A_n"][0] == "1" and res["y"][1] == ["0", "1"]

    def test_tridiag_q_variant(self, capsys):
        status, report = run_json(
            capsys,
            ["tridiag", "--A", "0,0,0,1", "--B", "0,0,1", "--C", "0,1", "--n", "3", "--q", "1/2"],
        )
        assert status == 0

    def test_quad_csv(self, capsys):
        status = main(["--out", "csv", "quad", "--family", "jacobi:0,0", "--n", "2"])
        assert status == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "node,weight"
        node = float(lines[1].split(",")[0])
        assert abs(abs(node) - 1 / math.sqrt(3)) <= 1e-12

    def test_families_recurrence(self, capsys):
        status, report = run_json(
            capsys, ["families", "--family", "chebyshev", "--n", "2", "--recurrence"]
        )
        assert status == 0
        rows = report["results"]["recurrence"]
        assert rows[1]["u"] == "1/2" and rows[1]["w"] == "1/2"

    def test_verify_single_suite(self, capsys):
        status = main(["verify", "--suite", "weight-ode"])
        captured = capsys.readouterr()
        assert status == 0
        assert "PASS" in captured.err
        assert json.loads(captured.out)["results"]["all_passed"] is True

    def test_unknown_suite_is_usage_error(self, capsys):
        assert main(["verify", "--suite", "nonsense"]) == 1


class TestDeterminism:
    def test_byte_identical_reports(self, capsys):
        argv = ["lame", "--e", "3,-1,-2", "--m", "2", "--spectrum"]
        main(argv)
        first = capsys.readouterr().out
        main(argv)
        second = capsys.readouterr().out
        assert first == second

    def test_tolerances_echoed(self, capsys):
        status, report = run_json(
            capsys, ["--quad-rtol", "1e-9", "morse", "--b", "2.25", "--levels"]
        )
        assert report["tolerances"]["quad_rtol"] == 1e-9
        assert report["tolerances"]["block_tol"] == 1e-12
        assert report["tolerances"]["residual_tol"] == 1e-9

    def test_env_mode_override(self, capsys, monkeypatch):
        monkeypatch.setenv("JMATRIX_MODE", "float")
        status, report = run_json(capsys, ["morse", "--b", "2.25", "--levels"])
        assert status == 0 and report["mode"] == "float"

    def test_output_file(self, tmp_path, capsys):
        path = tmp_path / "report.json"
        status = main(["--output", str(path), "morse", "--b", "2.25", "--levels"])
        assert status == 0
        assert json.loads(path.read_text())["command"] == "morse"
