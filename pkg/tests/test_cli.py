"""
End-to-end tests for the spinmate command line.

Each test calls cli.app.main(argv) in-process and inspects stdout,
stderr and the exit code.
"""

import argparse
import json
from pathlib import Path

import pytest

from cli.app import main
from cli.common import parse_condition, parse_init, parse_sequence, parse_spin, parse_twice_m
from spin import X, Z, Condition, Spin
from spin.spin_core import format_half
from utils.experiments import OpsTool
from conftest import STRETCHED_X_COEFFS, three_sigma

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    assert code == 0, err
    return json.loads(out)


def diagnostic(err):
    return json.loads(err.strip().splitlines()[-1])


def table_rows(text):
    """Cells of every body row of the last pipe table in `text`."""
    lines = [line for line in text.splitlines() if line.startswith("|")]
    return [[c.strip() for c in line.strip("|").split("|")] for line in lines[2:]]


# ═══════════════════════════════════════════════════════════════════
# Flag grammars
# ═══════════════════════════════════════════════════════════════════


class TestParsers:

    @pytest.mark.parametrize("text,twice_s", [("2", 4), ("4/2", 4), ("1/2", 1), ("1.5", 3), ("0", 0)])
    def test_spin(self, text, twice_s):
        assert parse_spin(text) == Spin(twice_s)

    @pytest.mark.parametrize("text", ["-1", "1/3", "0.3", "two", ""])
    def test_bad_spin(self, text):
        with pytest.raises(argparse.ArgumentTypeError):
            parse_spin(text)

    @pytest.mark.parametrize("twice_s", range(0, 12))
    def test_spectrum_round_trip(self, twice_s):
        for m in Spin(twice_s).twice_ms:
            assert parse_twice_m(format_half(m, signed=True)) == m
            assert parse_twice_m(format_half(m)) == m

    def test_sequence(self):
        axes = parse_sequence("x,0.5,1.2,z")
        assert axes[0] is X
        assert (axes[1].theta, axes[1].phi) == (0.5, 1.2)
        assert axes[2] is Z

    @pytest.mark.parametrize("text", ["", "x,0.5", "w"])
    def test_bad_sequence(self, text):
        with pytest.raises(argparse.ArgumentTypeError):
            parse_sequence(text)

    def test_init_and_condition(self):
        assert parse_init("z:+2") == (Z, 4)
        axis, m = parse_init("1.0,0.0:-1/2")
        assert (axis.theta, m) == (1.0, -1)
        assert parse_condition("0=+2") == Condition(0, 4)
        with pytest.raises(argparse.ArgumentTypeError):
            parse_condition("0:+2")
        with pytest.raises(argparse.ArgumentTypeError):
            parse_init("z")


# ═══════════════════════════════════════════════════════════════════
# ops / expand
# ═══════════════════════════════════════════════════════════════════


class TestOps:

    def test_spin_two_json(self, capsys):
        payload = run_json(capsys, "ops", "--spin", "2")
        assert set(payload["matrices"]) == {"S_x", "S_y", "S_z", "S^2"}
        s_z = payload["matrices"]["S_z"]["entries"]
        assert [s_z[i][i][0] for i in range(5)] == [2.0, 1.0, 0.0, -1.0, -2.0]

    def test_spin_half_table(self, capsys):
        code, out, _ = run(capsys, "ops", "--spin", "1/2")
        assert code == 0
        assert "S_x [hbar]" in out
        assert "S^2 [hbar^2]" in out
        assert "0.5" in out and "-0.5i" in out

    def test_golden_spin_half(self, capsys):
        payload = run_json(capsys, "ops", "--spin", "1/2")
        assert payload == json.loads((GOLDEN / "ops_spin_half.json").read_text())

    def test_negative_spin(self, capsys):
        code, out, err = run(capsys, "ops", "--spin", "-1")
        assert code == 2
        assert out == ""
        assert diagnostic(err)["error"] == "usage"

    def test_csv_not_available(self, capsys):
        code, _, err = run(capsys, "ops", "--spin", "1", "--format", "csv")
        assert code == 2
        assert "csv" in diagnostic(err)["message"]


class TestExpand:

    def test_stretched_x_over_z(self, capsys):
        payload = run_json(capsys, "expand", "--spin", "2", "--axis", "x", "--m", "2", "--basis", "z")
        amps = payload["amplitudes"]
        assert [a["twice_m"] for a in amps] == [4, 2, 0, -2, -4]
        for a, expected in zip(amps, STRETCHED_X_COEFFS):
            assert abs(a["re"] - expected) < 1e-12
            assert abs(a["im"]) < 1e-12
        assert payload["eigenstate"]["twice_m"] == 4

    def test_table_shows_exact_probability(self, capsys):
        code, out, _ = run(capsys, "expand", "--spin", "2", "--axis", "x", "--m", "2")
        assert code == 0
        rows = table_rows(out)
        assert rows[0][0] == "+2"
        assert rows[0][3] == "1/16"
        assert rows[2][3] == "3/8"

    def test_unit_amplitude(self, capsys):
        payload = run_json(capsys, "expand", "--spin", "2", "--axis", "z", "--m", "2", "--basis", "z")
        values = [complex(a["re"], a["im"]) for a in payload["amplitudes"]]
        assert values == pytest.approx([1, 0, 0, 0, 0], abs=1e-12)

    def test_negative_m(self, capsys):
        payload = run_json(capsys, "expand", "--spin", "3/2", "--axis", "z", "--m=-3/2")
        assert payload["amplitudes"][-1]["re"] == pytest.approx(1.0, abs=1e-12)

    def test_m_outside_spectrum(self, capsys):
        code, out, err = run(capsys, "expand", "--spin", "2", "--axis", "x", "--m", "3", "--basis", "z")
        assert code == 2
        assert out == ""
        assert diagnostic(err)["error"] == "validation"

    def test_large_spin_general_axis(self, capsys):
        payload = run_json(capsys, "expand", "--spin", "20", "--axis", "1.0,0.3", "--m", "20")
        total = sum(a["re"] ** 2 + a["im"] ** 2 for a in payload["amplitudes"])
        assert total == pytest.approx(1.0, abs=1e-10)

    def test_beyond_exact_bound_shows_dash(self, capsys):
        code, out, _ = run(capsys, "expand", "--spin", "16", "--axis", "x", "--m", "16")
        assert code == 0
        rows = table_rows(out)
        assert len(rows) == 33
        assert all(row[3] == "-" for row in rows)


# ═══════════════════════════════════════════════════════════════════
# simulate
# ═══════════════════════════════════════════════════════════════════


FIG_ONE = ("simulate", "--spin", "2", "--init", "z:+2", "--sequence", "x,z",
           "--condition", "0=+2", "--shots", "1000000", "--seed", "42")


class TestSimulate:

    def test_stretched_x_then_z(self, capsys):
        payload = run_json(capsys, *FIG_ONE)
        assert payload["seed"] == 42
        assert payload["shots"] == 1_000_000
        top = payload["final"][0]
        assert top["twice_m"] == 4
        assert top["expected"] == {"num": 1, "den": 16}
        n = payload["accepted"]
        assert abs(top["frequency"] - 1 / 16) < three_sigma(1 / 16, n)
        assert top["three_sigma"] == pytest.approx(three_sigma(1 / 16, n))
        assert payload["gof"]["pass"] is True

    def test_table_header_and_expected(self, capsys):
        code, out, _ = run(capsys, *FIG_ONE)
        assert code == 0
        assert out.splitlines()[0] == "# seed: 42"
        assert "1/16" in out

    def test_byte_identical(self, capsys):
        _, first, _ = run(capsys, *FIG_ONE)
        _, second, _ = run(capsys, *FIG_ONE)
        assert first == second

    def test_workers_do_not_change_output(self, capsys):
        _, serial, _ = run(capsys, *FIG_ONE)
        _, parallel, _ = run(capsys, *FIG_ONE, "--workers", "4")
        assert serial == parallel

    def test_certain_outcome(self, capsys):
        payload = run_json(capsys, "simulate", "--spin", "2", "--init", "x:+2", "--sequence", "x",
                           "--shots", "10")
        assert payload["counts"] == [{"chain": [4], "count": 10}]

    def test_default_initial_state(self, capsys):
        payload = run_json(capsys, "simulate", "--spin", "1", "--sequence", "z", "--shots", "5")
        assert payload["initial"]["twice_m"] == 2
        assert payload["counts"] == [{"chain": [2], "count": 5}]

    def test_seed_from_environment(self, capsys, monkeypatch):
        monkeypatch.setenv("SPINMATE_SEED", "7")
        payload = run_json(capsys, "simulate", "--spin", "1", "--sequence", "x", "--shots", "100")
        assert payload["seed"] == 7

    def test_flag_overrides_environment(self, capsys, monkeypatch):
        monkeypatch.setenv("SPINMATE_SEED", "7")
        payload = run_json(capsys, "simulate", "--spin", "1", "--sequence", "x", "--shots", "100", "--seed", "3")
        assert payload["seed"] == 3

    def test_default_seed(self, capsys, monkeypatch):
        monkeypatch.delenv("SPINMATE_SEED", raising=False)
        payload = run_json(capsys, "simulate", "--spin", "1", "--sequence", "x", "--shots", "100")
        assert payload["seed"] == 42

    def test_bad_environment_seed(self, capsys, monkeypatch):
        monkeypatch.setenv("SPINMATE_SEED", "abc")
        code, _, err = run(capsys, "simulate", "--spin", "1", "--sequence", "x", "--shots", "10")
        assert code == 2
        assert "SPINMATE_SEED" in diagnostic(err)["message"]

    def test_beyond_exact_bound(self, capsys):
        payload = run_json(capsys, "simulate", "--spin", "16", "--sequence", "x,z", "--shots", "1000")
        assert payload["accepted"] == 1000
        assert all("expected" not in row for row in payload["final"])
        assert payload["gof"] is None

    def test_negative_seed(self, capsys):
        code, out, err = run(capsys, "simulate", "--spin", "1", "--sequence", "x", "--shots", "10",
                             "--seed=-1")
        assert code == 2
        assert out == ""
        assert diagnostic(err)["error"] == "validation"

    def test_csv(self, capsys):
        code, out, _ = run(capsys, "simulate", "--spin", "2", "--init", "x:+2", "--sequence", "x,x",
                           "--shots", "10", "--format", "csv")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "# seed: 42"
        assert lines[-2:] == ["chain,count", "+2 +2,10"]

    @pytest.mark.parametrize("argv", [
        ("--shots", "0"),
        ("--condition", "5=+2"),
        ("--condition", "0=+3"),
        ("--workers", "0"),
    ])
    def test_invalid(self, capsys, argv):
        code, out, _ = run(capsys, "simulate", "--spin", "2", "--sequence", "x,z", *argv)
        assert code == 2
        assert out == ""

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "run.json"
        code, out, _ = run(capsys, "simulate", "--spin", "1/2", "--sequence", "x", "--shots", "1000",
                           "--format", "json", "--output", str(target))
        assert code == 0
        assert out == ""
        assert json.loads(target.read_text())["accepted"] == 1000

    def test_unwritable_output(self, capsys, tmp_path):
        code, _, err = run(capsys, "ops", "--spin", "1", "--output", str(tmp_path / "missing" / "x.txt"))
        assert code == 1
        assert diagnostic(err)["error"] == "internal"


# ═══════════════════════════════════════════════════════════════════
# paradox / falsify / commutator
# ═══════════════════════════════════════════════════════════════════


class TestParadox:

    def test_table(self, capsys):
        code, out, _ = run(capsys, "paradox", "--max-spin", "2")
        assert code == 0
        rows = table_rows(out)
        assert [r[0] for r in rows] == ["1/2", "1", "3/2", "2"]
        assert [r[3] for r in rows] == ["F", "F", "T", "T"]
        assert [r[4] for r in rows] == ["T", "T", "F", "F"]
        assert rows[-1][5] == "1/16"
        assert "2s^2 [hbar^2]" in out

    def test_golden_json(self, capsys):
        payload = run_json(capsys, "paradox", "--max-spin", "2")
        assert payload == json.loads((GOLDEN / "paradox_max_spin_2.json").read_text())

    def test_spin_half_only(self, capsys):
        payload = run_json(capsys, "paradox", "--max-spin", "1/2")
        assert len(payload) == 1
        assert payload[0]["feasible"] is True

    def test_csv(self, capsys):
        code, out, _ = run(capsys, "paradox", "--max-spin", "2", "--format", "csv")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "twice_s,s,lhs,rhs,violated,feasible,joint_probability"
        assert lines[-1] == "4,2,8,6,True,False,1/16"

    def test_zero_max_spin(self, capsys):
        code, _, _ = run(capsys, "paradox", "--max-spin", "0")
        assert code == 2


class TestFalsify:

    def test_spin_two_max_max(self, capsys):
        payload = run_json(capsys, "falsify", "--spin", "2", "--vx", "2", "--vz", "2")
        assert payload["feasible"] is False
        assert payload["required_vy_squared"] == -2.0

    def test_spin_one_max_max(self, capsys):
        payload = run_json(capsys, "falsify", "--spin", "1", "--vx", "1", "--vz", "1")
        assert payload["feasible"] is True
        assert payload["witnesses"] == [{"twice_vx": 2, "twice_vy": 0, "twice_vz": 2}]

    def test_spin_two_zeros(self, capsys):
        payload = run_json(capsys, "falsify", "--spin", "2", "--vx", "0", "--vz", "0")
        assert payload["feasible"] is False
        assert payload["required_vy_squared"] == 6.0
        assert payload["max_vy_squared"] == 4.0

    def test_table(self, capsys):
        code, out, _ = run(capsys, "falsify", "--spin", "2", "--vx", "0", "--vz", "0")
        assert code == 0
        assert "| feasible " in out
        assert "exceeds" in out

    def test_value_outside_spectrum(self, capsys):
        code, _, err = run(capsys, "falsify", "--spin", "2", "--vx", "3", "--vz", "0")
        assert code == 2
        assert diagnostic(err)["error"] == "validation"


class TestCommutator:

    @pytest.mark.parametrize("spin", ["0", "1/2"])
    def test_vanishes(self, capsys, spin):
        payload = run_json(capsys, "commutator", "--spin", spin)
        assert payload["commutator_max_abs"] == 0.0
        assert payload["nonzero"] is False

    def test_spin_two(self, capsys):
        payload = run_json(capsys, "commutator", "--spin", "2")
        assert payload["nonzero"] is True
        assert payload["commutator_max_abs"] > 0.1
        assert max(payload["sum_spectrum"]["operator_eigenvalues"]) == pytest.approx(6.0)


# ═══════════════════════════════════════════════════════════════════
# Exit codes
# ═══════════════════════════════════════════════════════════════════


class TestExitCodes:

    def test_help(self, capsys):
        code, out, _ = run(capsys, "--help")
        assert code == 0
        assert "simulate" in out

    def test_missing_subcommand(self, capsys):
        code, _, err = run(capsys)
        assert code == 2
        assert diagnostic(err)["error"] == "usage"

    def test_unknown_flag(self, capsys):
        code, _, _ = run(capsys, "ops", "--spin", "1", "--bogus")
        assert code == 2

    def test_internal_error(self, capsys, monkeypatch):
        def broken(self, spin):
            raise RuntimeError("boom")

        monkeypatch.setattr(OpsTool, "execute", broken)
        code, out, err = run(capsys, "ops", "--spin", "1")
        assert code == 1
        assert out == ""
        report = diagnostic(err)
        assert report["error"] == "internal"
        assert "boom" in report["message"]
