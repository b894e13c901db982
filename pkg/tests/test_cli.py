"""Command-line interface: subcommands, exit codes, formats, determinism."""

import io
import json
import subprocess
import sys

import pytest

from lieinv.cli import EXIT_OK, EXIT_RECIPE, EXIT_USAGE, EXIT_VERIFY, main

SO3_DOC = "dim 3\n[1,2] = e3\n[1,3] = -e2\n[2,3] = e1\n"
HEIS_DOC = "dim 3\n[1,2] = e3\n"
BAD_DOC = "dim 3\n[1,2] = e3\n[1,3] = e2\n[2,3] = e3\n"
REAL_DOC = (
    "dim 3\n"
    "[1,3] = e1 - e2\n"
    "[2,3] = e1 + e2\n"
)


def run(argv, stdin=None):
    out, err = io.StringIO(), io.StringIO()
    old_stdin, old_stdout, old_stderr = sys.stdin, sys.stdout, sys.stderr
    if stdin is not None:
        sys.stdin = io.StringIO(stdin)
    sys.stdout, sys.stderr = out, err
    try:
        code = main(argv)
    finally:
        sys.stdin, sys.stdout, sys.stderr = old_stdin, old_stdout, old_stderr
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def heis(tmp_path):
    p = tmp_path / "heis.txt"
    p.write_text(HEIS_DOC)
    return str(p)


class TestValidate:
    def test_clean_document(self, heis):
        code, out, _ = run(["validate", heis])
        assert code == EXIT_OK
        assert out == "valid: 3-dimensional Lie algebra\n"

    def test_structure_violation(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text(BAD_DOC)
        code, out, err = run(["validate", str(p)])
        assert code == EXIT_VERIFY
        assert "jacobi" in (out + err)

    def test_malformed_document(self, tmp_path):
        p = tmp_path / "broken.txt"
        p.write_text("dim 3\n[1,2] = e1*e2\n")
        code, _, err = run(["validate", str(p)])
        assert code == EXIT_USAGE
        assert "parse error" in err

    def test_missing_file(self):
        code, _, err = run(["validate", "/nonexistent/alg.txt"])
        assert code == EXIT_USAGE
        assert "cannot read" in err

    def test_stdin_dash(self):
        code, out, _ = run(["validate", "-"], stdin=SO3_DOC)
        assert code == EXIT_OK and "valid" in out


class TestInfo:
    def test_text_report(self, heis):
        code, out, _ = run(["info", heis])
        assert code == EXIT_OK
        assert "dim: 3" in out
        assert "center dim: 1" in out
        assert "coadjoint rank: 2" in out
        assert "independent invariants: 1" in out
        assert "nilpotent: True" in out

    def test_json_report(self, heis):
        code, out, _ = run(["--format", "json", "info", heis])
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["dim"] == 3
        assert doc["coadjoint_rank"] == 2
        assert doc["num_invariants"] == 1


class TestLiftedAndInvariants:
    def test_lifted_closed_form(self, heis):
        code, out, _ = run(["lifted", heis])
        assert code == EXIT_OK
        assert "I1 = -1*x3*th2 + x1" in out
        assert "I2 = x3*th1 + x2" in out
        assert "I3 = x3" in out

    def test_invariants_pipeline_report(self, heis):
        code, out, _ = run(["invariants", heis])
        assert code == EXIT_OK
        assert "invariants found: 1 (rank 2, expected 1)" in out
        assert "  x3" in out
        assert "th2 (linear) = x1/x3" in out
        assert "verified against the coadjoint system: True" in out

    def test_irrational_spectrum_exits_needs_recipe(self, tmp_path):
        p = tmp_path / "rot.txt"
        p.write_text(REAL_DOC)
        for cmd in ("lifted", "invariants"):
            code, out, err = run([cmd, str(p)])
            assert code == EXIT_RECIPE
            assert "closed-form exponential" in (out + err)

    def test_json_invariants(self, heis):
        code, out, _ = run(["--format", "json", "invariants", heis])
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["invariants"] == ["x3"]
        assert doc["complete"] is True
        assert doc["verified"] is True


class TestVerify:
    def test_invariant_accepted(self, heis):
        code, out, _ = run(["verify", heis, "--expr", "x3"])
        assert code == EXIT_OK
        assert "annihilated by all coadjoint fields: true" in out

    def test_non_invariant_certificate(self, heis):
        code, out, _ = run(["verify", heis, "--expr", "x1"])
        assert code == EXIT_VERIFY
        assert "X_2 residual: -1*x3" in out

    def test_centrality_flag(self, heis):
        code, out, _ = run(["verify", heis, "--expr", "x3", "--central"])
        assert code == EXIT_OK
        assert "central (degree <= 6): True" in out

    def test_bad_expression_is_usage_error(self, heis):
        code, _, err = run(["verify", heis, "--expr", "x1 +"])
        assert code == EXIT_USAGE
        assert "expression error" in err


class TestFamily:
    def test_emits_reparseable_document(self):
        code, out, _ = run(["family", "t0", "--n", "3"])
        assert code == EXIT_OK
        assert "dim 3" in out
        assert "# expected invariants (1):" in out
        assert "#   [ok] x2" in out

    def test_pipes_into_invariants(self):
        code, doc, _ = run(["family", "jordan", "--blocks", "jordan,0,4"])
        assert code == EXIT_OK
        code2, out2, _ = run(["invariants", "-"], stdin=doc)
        assert code2 == EXIT_OK
        assert "invariants found: 3" in out2

    def test_run_flag_full_pipeline(self):
        code, out, _ = run(["family", "jordan", "--blocks", "jordan,0,3", "--run"])
        assert code == EXIT_OK
        assert "# elimination: complete=True count=2 rank=2" in out

    def test_series_parameters(self):
        code, out, _ = run(["family", "s1", "--n", "5", "--alpha", "1", "--beta", "0"])
        assert code == EXIT_OK
        assert "dim 6" in out
        code, out, _ = run(["family", "s3", "--n", "5", "--a", "3=1,4=2"])
        assert code == EXIT_OK
        assert "dim 6" in out and "[ok]" in out

    def test_worked_six_dimensional(self):
        code, out, _ = run(["family", "g6_38", "--run"])
        assert code == EXIT_OK
        assert "param a" in out
        assert "# elimination: complete=True count=2" in out

    def test_every_expected_line_verifies(self):
        for argv in (
            ["family", "t0", "--n", "4"],
            ["family", "jordan", "--blocks", "jordan,1,2;jordan,0,2"],
            ["family", "s2", "--n", "5"],
            ["family", "s4", "--n", "6"],
        ):
            code, out, _ = run(argv)
            assert code == EXIT_OK
            assert "[ok]" in out and "FAILS" not in out

    def test_invalid_block_spec_is_usage_error(self):
        code, _, err = run(["family", "jordan", "--blocks", "jordan,0,1"])
        assert code != EXIT_OK


class TestUsageErrors:
    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit) as exc:
            run(["frobnicate"])
        assert exc.value.code == EXIT_USAGE

    def test_missing_required_argument(self):
        with pytest.raises(SystemExit) as exc:
            run(["verify", "somefile"])
        assert exc.value.code == EXIT_USAGE


class TestDeterminismGoldens:
    def test_seeded_runs_byte_identical_in_process(self, heis):
        first = run(["--seed", "7", "--format", "json", "invariants", heis])
        second = run(["--seed", "7", "--format", "json", "invariants", heis])
        assert first == second

    def test_seeded_runs_byte_identical_subprocess(self):
        argv = [
            sys.executable,
            "-m",
            "lieinv.cli",
            "--seed",
            "11",
            "--format",
            "json",
            "invariants",
            "-",
        ]
        runs = [
            subprocess.run(argv, input=HEIS_DOC.encode(), capture_output=True)
            for _ in range(2)
        ]
        assert runs[0].returncode == 0
        assert runs[0].stdout == runs[1].stdout

    def test_family_emission_deterministic(self):
        a = run(["family", "s4", "--n", "6", "--run"])
        b = run(["family", "s4", "--n", "6", "--run"])
        assert a == b

    def test_golden_invariants_document(self, heis):
        code, out, _ = run(["--format", "json", "invariants", heis])
        assert code == EXIT_OK
        assert json.loads(out) == {
            "applied_recipes": [],
            "assumptions": ["-1*x3 != 0", "x3 != 0"],
            "complete": True,
            "dim": 3,
            "expected_count": 1,
            "frame_rank": 2,
            "invariants": ["x3"],
            "pivots": [
                {"kind": "linear", "solution": "x1/x3", "theta": 2},
                {"kind": "linear", "solution": "-1*x2/x3", "theta": 1},
            ],
            "rescaled": ["x3"],
            "residual_count": 0,
            "verified": True,
        }


class TestLatexOutput:
    def test_lifted_latex(self, heis):
        code, out, _ = run(["--latex", "lifted", heis])
        assert code == EXIT_OK
        assert "x_{3}" in out and "\\theta_{1}" in out
