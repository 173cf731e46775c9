"""Tests for the command-line interface: outputs, exit codes, determinism."""

import pytest

from zinterp.cli import main
from zinterp.formula import print_formula
from zinterp.interp import char_is


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestPellCommands:
    def test_gen_frozen_line(self, capsys):
        code, out, _ = run(capsys, "pell", "gen", "-n", "3", "-p", "5")
        assert code == 0
        assert out.splitlines()[0] == "x = 4*t^3 + 2*t, y = 4*t^2 + 4"
        assert out.splitlines()[1].startswith("#RESULT pell-gen")

    def test_gen_char_two(self, capsys):
        code, out, _ = run(capsys, "pell", "gen", "-n", "1", "-p", "2")
        assert code == 0
        assert out.splitlines()[0] == "x = 0, y = 1"

    def test_verify_accepts_generated_pair(self, capsys):
        code, out, _ = run(
            capsys, "pell", "verify",
            "-x", "4*t^3 + 2*t", "-y", "4*t^2 + 4", "-p", "5",
        )
        assert code == 0
        assert out.splitlines()[0] == "verified index=3"

    def test_verify_rejects_off_conic(self, capsys):
        code, out, _ = run(capsys, "pell", "verify", "-x", "t", "-y", "t", "-p", "5")
        assert code == 1
        assert "falsified" in out

    def test_oracle_matches_family(self, capsys):
        code, out, _ = run(capsys, "pell", "oracle", "-p", "3", "-D", "1")
        assert code == 0
        assert "solutions: 10" in out
        assert "family match: yes" in out

    def test_oracle_guard_exit(self, capsys):
        code, _, err = run(capsys, "pell", "oracle", "-p", "17", "-D", "10")
        assert code == 3
        assert "error:" in err

    def test_oracle_front_is_same_command(self, capsys):
        _, direct, _ = run(capsys, "pell", "oracle", "-p", "3", "-D", "1")
        _, fronted, _ = run(capsys, "oracle", "pell", "-p", "3", "-D", "1")
        assert direct == fronted


class TestNewtonCommands:
    def test_hull_vertices(self, capsys):
        code, out, _ = run(
            capsys, "newton", "hull",
            "--series", "{0: 1, 1: q^2, 2: q} @ p=5 Q=10",
        )
        assert code == 0
        assert out.splitlines()[0] == "vertices: (0, 0) (2, 1)"

    def test_theta_support_on_hull(self, capsys):
        code, out, _ = run(
            capsys, "newton", "theta", "-p", "5", "--n-max", "4", "--q-prec", "20",
        )
        assert code == 0
        assert "vertices: (1, 1) (2, 4) (3, 9) (4, 16)" in out

    def test_monomial_reads_off(self, capsys):
        code, out, _ = run(
            capsys, "newton", "monomial", "--series", "{3: q^0} @ p=5 Q=10",
        )
        assert code == 0
        assert "sign=1 exponent=3" in out

    def test_monomial_rejects_non_unit(self, capsys):
        code, out, _ = run(
            capsys, "newton", "monomial",
            "--series", "{0: 1, 3: q^0} @ p=5 Q=10",
        )
        assert code == 1
        assert "falsified" in out


class TestBivarCommands:
    def test_kernel_factor(self, capsys):
        code, out, _ = run(
            capsys, "bivar", "kernel", "--poly", "t^2*u - t", "-p", "5", "-D", "3",
        )
        assert code == 0
        assert out.splitlines()[0] == "t"

    def test_kernel_refuses_non_multiple(self, capsys):
        code, out, _ = run(
            capsys, "bivar", "kernel", "--poly", "t + 1", "-p", "5", "-D", "3",
        )
        assert code == 1

    def test_hyperbola_roundtrip(self, capsys):
        _, fwd, _ = run(
            capsys, "bivar", "hyperbola", "--poly", "t*u", "-p", "5", "-D", "4",
        )
        image = fwd.splitlines()[0]
        _, back, _ = run(
            capsys, "bivar", "hyperbola", "--poly", image, "-p", "5", "-D", "4",
            "--inverse",
        )
        assert back.splitlines()[0] == "t*u"


class TestBuchiCommands:
    def test_gen_valid_sequence(self, capsys):
        code, out, _ = run(
            capsys, "buchi", "gen", "-v", "t", "-r", "1", "-M", "5", "-p", "5",
        )
        assert code == 0
        assert out.splitlines()[0] == "u_1 = t^6 + t^5 + t + 1"
        assert "status=ok" in out.splitlines()[-1]

    def test_oracle_degree_zero_sweep(self, capsys):
        code, out, _ = run(capsys, "buchi", "oracle", "-d", "0")
        assert code == 0
        assert "seeds scanned: 289" in out
        assert "constant families: 17" in out
        assert "flagged=0" in out


class TestCompileCommand:
    def test_builtin_translation(self, capsys):
        code, out, _ = run(
            capsys, "compile", "--interp", "pell",
            "--sentence", "(exists (n) (= n 0))",
        )
        assert code == 0
        assert out.splitlines()[0].startswith("(exists (n.1 n.2)")

    def test_bundle_roundtrip(self, capsys, tmp_path):
        bundle = tmp_path / "bundle"
        sentence = "(exists (n) (= n 0))"
        code, _, _ = run(
            capsys, "compile", "--interp", "pell", "--export", str(bundle),
        )
        assert code == 0
        _, direct, _ = run(capsys, "compile", "--interp", "pell", "--sentence", sentence)
        _, loaded, _ = run(
            capsys, "compile", "--interp", str(bundle), "--sentence", sentence,
        )
        assert direct.splitlines()[0] == loaded.splitlines()[0]

    def test_output_file(self, capsys, tmp_path):
        out_path = tmp_path / "translated.sexp"
        code, _, _ = run(
            capsys, "compile", "--interp", "pell",
            "--sentence", "(exists (n) (= n 0))", "-o", str(out_path),
        )
        assert code == 0
        assert out_path.read_text().startswith("(exists (n.1 n.2)")

    def test_sentence_required_without_export(self, capsys):
        code, _, err = run(capsys, "compile", "--interp", "pell")
        assert code == 2
        assert "sentence" in err

    def test_missing_bundle(self, capsys):
        code, _, _ = run(
            capsys, "compile", "--interp", "/nonexistent/bundle",
            "--sentence", "(exists (n) (= n 0))",
        )
        assert code == 2


class TestCheckCommand:
    def test_char_formula_false_in_other_characteristic(self, capsys, tmp_path):
        path = tmp_path / "kappa5.sexp"
        path.write_text(print_formula(char_is(5)) + "\n")
        code, out, _ = run(capsys, "check", "--formula", str(path), "-p", "7")
        assert code == 1
        assert "falsified" in out
        code, out, _ = run(capsys, "check", "--formula", str(path), "-p", "5")
        assert code == 0
        assert "verified" in out

    def test_quantified_needs_witness(self, capsys):
        code, _, err = run(
            capsys, "check", "--formula", "(exists (x) (= x 0))", "-p", "5",
        )
        assert code == 2
        assert "witness" in err

    def test_witness_file(self, capsys, tmp_path):
        witness = tmp_path / "w.txt"
        witness.write_text("x = t^2\n# comment line\ny = [0,0,1]\n")
        code, out, _ = run(
            capsys, "check",
            "--formula", "(exists (x y) (= x y))",
            "--witness", str(witness), "-p", "5",
        )
        assert code == 0
        assert "verified" in out


class TestSynthCommand:
    def test_theta_feeds_check(self, capsys, tmp_path):
        witness = tmp_path / "w.txt"
        formula = tmp_path / "f.sexp"
        code, out, _ = run(
            capsys, "synth", "--family", "theta", "-n", "2", "-p", "17",
            "-o", str(witness), "--formula-out", str(formula),
        )
        assert code == 0
        assert "status=ok" in out
        code, out, _ = run(
            capsys, "check", "--formula", str(formula),
            "--witness", str(witness), "-p", "17",
        )
        assert code == 0

    def test_all_families_verify(self, capsys):
        invocations = (
            ("synth", "--family", "nu", "--target", "t^2 + 1", "-p", "5"),
            ("synth", "--family", "beta", "--base", "t + 1", "-r", "1", "-p", "17"),
            ("synth", "--family", "phi", "-r", "2", "-p", "5"),
            ("synth", "--family", "psi", "-k", "3", "-r", "1", "-p", "5"),
            ("synth", "--family", "theta", "-n", "-4", "-p", "17"),
        )
        for argv in invocations:
            code, out, _ = run(capsys, *argv)
            assert code == 0, argv
            assert "status=ok" in out

    def test_missing_family_argument(self, capsys):
        code, _, err = run(capsys, "synth", "--family", "nu", "-p", "5")
        assert code == 2
        assert "target" in err


class TestE2ECommand:
    def test_verifies_sum(self, capsys):
        code, out, _ = run(
            capsys, "e2e", "--sentence", "(exists (n) (= (+ 1 1) n))",
            "--witness", "n=2", "-p", "17",
        )
        assert code == 0
        assert "verified" in out
        assert out.count("#RESULT clause") == 4

    def test_sentence_from_file(self, capsys, tmp_path):
        path = tmp_path / "s.sexp"
        path.write_text("(exists (n) (and (| 1 n) (!= n 0)))\n")
        code, out, _ = run(
            capsys, "e2e", "--sentence", str(path), "--witness", "n=3", "-p", "19",
        )
        assert code == 0

    def test_wrong_witness_falsifies(self, capsys):
        code, out, _ = run(
            capsys, "e2e", "--sentence", "(exists (n) (= (+ 1 1) n))",
            "--witness", "n=3", "-p", "17",
        )
        assert code == 1
        assert "falsified" in out

    def test_missing_variable_is_usage_error(self, capsys):
        code, _, err = run(
            capsys, "e2e", "--sentence", "(exists (n) (= (+ 1 1) n))",
            "--witness", "m=2", "-p", "17",
        )
        assert code == 2

    def test_byte_identical_runs(self, capsys):
        argv = (
            "e2e", "--sentence", "(exists (n) (= (+ 1 1) n))",
            "--witness", "n=2", "-p", "17",
        )
        _, first, _ = run(capsys, *argv)
        _, second, _ = run(capsys, *argv)
        assert first == second


class TestDemoAndUsage:
    def test_demo_passes(self, capsys):
        code, out, _ = run(capsys, "demo")
        assert code == 0
        assert out.count("identical across characteristics: yes") == 2
        assert out.splitlines()[-1] == "#RESULT demo status=ok"

    def test_unknown_subcommand_usage_exit(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["nosuch"])
        assert excinfo.value.code == 2
        capsys.readouterr()
