import csv
import io
import subprocess
import sys
from pathlib import Path

import pytest

from cfjs.cli import RESULT_COLUMNS, fmt, main, read_profile

DEMO_PROFILES = Path(__file__).resolve().parent.parent / "demos" / "profiles"


def write_profile(tmp_path, a, b, name="profile.csv"):
    path = tmp_path / name
    path.write_text(",".join(map(str, a)) + "\n" + ",".join(map(str, b)) + "\n")
    return str(path)


def summary(text):
    return dict(line.split(",", 1) for line in text.strip().splitlines())


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


class TestReadProfile:
    def test_comments_and_blank_lines(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("# header\n0.5, 0.5  # A\n\n0.25,0.75\n")
        pair = read_profile(path)
        assert list(pair.a) == [0.5, 0.5] and list(pair.b) == [0.25, 0.75]

    @pytest.mark.parametrize("text, fragment", [
        ("0.5,0.5\n", "expected 2 rows"),
        ("0.5,x\n0.5,0.5\n", "row 1 (line 1)"),
        ("0.5,0.5\n0.2,0.2\n", "row 2 (line 2)"),
        ("0.5,0.5\n\n0.2,0.3,0.5\n", "row 2 (line 3)"),
    ])
    def test_errors_name_the_row(self, tmp_path, capsys, text, fragment):
        path = tmp_path / "bad.csv"
        path.write_text(text)
        code, _, err = run(capsys, "optimal", path)
        assert code == 2
        assert fragment in err

    def test_missing_file(self, tmp_path, capsys):
        code, _, err = run(capsys, "optimal", tmp_path / "nope.csv")
        assert code == 2 and "cannot read" in err


class TestOptimal:
    def test_worked(self, capsys):
        code, out, err = run(capsys, "optimal", DEMO_PROFILES / "four_options.csv")
        assert code == 0
        rows = [list(map(float, line.split(","))) for line in out.strip().splitlines()]
        assert len(rows) == 4 and all(r[i] == 0.0 for i, r in enumerate(rows))
        s = summary(err)
        assert float(s["loss"]) < 1e-9 and float(s["min_loss"]) == 0.0
        assert s["branch"].startswith("zero-loss")

    def test_case_iv(self, tmp_path, capsys):
        out_path = tmp_path / "m.csv"
        code, out, _ = run(capsys, "optimal", DEMO_PROFILES / "case_iv_n3.csv", "--out", out_path)
        assert code == 0
        s = summary(out)
        assert float(s["min_loss"]) == pytest.approx(75 / 676, rel=1e-14)
        assert float(s["loss"]) == pytest.approx(75 / 676, rel=1e-12)
        assert s["branch"].startswith("capped")
        assert len(out_path.read_text().splitlines()) == 3

    def test_full_precision(self):
        assert fmt(1 / 3) == "0.33333333333333331"
        assert float(fmt(75 / 676)) == 75 / 676
        assert fmt(None) == "" and fmt(7) == "7"


class TestSimulate:
    def test_phom_three_option_profile(self, tmp_path, capsys):
        path = write_profile(tmp_path, [0.25, 0.35, 0.4], [0.25, 0.35, 0.4])
        code, out, _ = run(capsys, "simulate", "phom", path, "--draws", 100_000, "--seed", 1)
        assert code == 0
        s = summary(out)
        assert float(s["empirical_loss"]) < 0.01
        assert float(s["analytic_loss"]) < 1e-12
        assert float(s["max_cell_deviation"]) < 3 / 100_000**0.5
        assert float(s["usage_rate"]) == pytest.approx(float(s["usage_rate_model"]), abs=0.01)
        assert s["conflicts"] == "0"

    def test_uniform(self, tmp_path, capsys):
        path = write_profile(tmp_path, [1 / 3] * 3, [1 / 3] * 3)
        matrix = tmp_path / "emp.csv"
        code, out, _ = run(capsys, "simulate", "uniform", path, "--matrix", matrix)
        assert code == 0
        cells = [float(v) for line in matrix.read_text().splitlines() for v in line.split(",")]
        off = [c for k, c in enumerate(cells) if k % 4]
        assert all(abs(c - 1 / 6) < 0.01 for c in off)

    def test_outcomes_file(self, tmp_path, capsys):
        outcomes = tmp_path / "draws.csv"
        code, _, _ = run(capsys, "simulate", "random-order", DEMO_PROFILES / "four_options.csv",
                         "--draws", 50, "--outcomes", outcomes)
        assert code == 0
        rows = list(csv.DictReader(outcomes.open()))
        assert len(rows) == 50
        assert all(r["choice_a"] != r["choice_b"] for r in rows)

    def test_attenuation_stats(self, capsys):
        code, out, _ = run(capsys, "simulate", "attenuation", DEMO_PROFILES / "four_options.csv",
                           "--draws", 2000, "--splitter-loss")
        assert code == 0
        s = summary(out)
        assert int(s["absorbed"]) > 0 and "source_discards" in s

    def test_random_order_dead_end(self, tmp_path, capsys):
        path = write_profile(tmp_path, [0.5, 0.5], [1, 0])
        code, out, _ = run(capsys, "simulate", "random-order", path, "--draws", 4000)
        assert code == 0
        s = summary(out)
        assert float(s["failure_rate"]) == pytest.approx(0.25, abs=0.05)
        assert "analytic_loss" not in s

    def test_degenerate_exit_code(self, tmp_path, capsys):
        path = write_profile(tmp_path, [1, 0], [1, 0])
        code, _, err = run(capsys, "simulate", "attenuation", path, "--draws", 10)
        assert code == 3 and "DegenerateProduct" in err

    def test_bad_draws(self, capsys):
        code, _, _ = run(capsys, "simulate", "uniform", DEMO_PROFILES / "four_options.csv", "--draws", 0)
        assert code == 2

    def test_seed_from_environment(self, monkeypatch, capsys):
        argv = ("simulate", "uniform", DEMO_PROFILES / "four_options.csv", "--draws", 500)
        monkeypatch.setenv("CFJS_SEED", "42")
        _, env_out, _ = run(capsys, *argv)
        _, flag_out, _ = run(capsys, *argv, "--seed", 42)
        assert env_out == flag_out
        assert summary(env_out)["seed"] == "42"
        monkeypatch.setenv("CFJS_SEED", "abc")
        assert run(capsys, *argv)[0] == 2


class TestSweep:
    def test_rows_and_columns(self, tmp_path, capsys):
        out = tmp_path / "r.csv"
        code, _, _ = run(capsys, "sweep", "--n-min", 3, "--n-max", 6, "--out", out)
        assert code == 0
        rows = list(csv.DictReader(out.open()))
        assert tuple(rows[0].keys()) == RESULT_COLUMNS
        assert len(rows) == 4 * 4 * 5
        assert all(r["wall_time"] == "" and r["status"] == "ok" for r in rows)

    def test_byte_identical_and_jobs_independent(self, tmp_path, capsys):
        argv = ["sweep", "--n-min", 3, "--n-max", 5, "--cases", "i,iv,lt1", "--profiles", 3]
        outputs = []
        for k, jobs in enumerate((1, 1, 2)):
            path = tmp_path / f"r{k}.csv"
            assert run(capsys, *argv, "--jobs", jobs, "--out", path)[0] == 0
            outputs.append(path.read_bytes())
        assert outputs[0] == outputs[1] == outputs[2]

    def test_svg(self, tmp_path, capsys):
        code, out, err = run(capsys, "sweep", "--n-min", 3, "--n-max", 4, "--cases", "ii,gt1",
                             "--profiles", 3, "--svg", tmp_path / "svg", "--timing")
        assert code == 0
        names = sorted(p.name for p in (tmp_path / "svg").iterdir())
        assert names == ["sweep_ii.svg", "sweep_random-gt1.svg", "usage_random-gt1.svg"]
        assert "<svg" in (tmp_path / "svg" / "sweep_ii.svg").read_text()
        rows = list(csv.DictReader(io.StringIO(out)))
        assert all(r["wall_time"] != "" for r in rows)
        assert all(r["maape"] != "" for r in rows if r["case"] == "random-gt1")

    @pytest.mark.parametrize("argv", [
        ["--cases", "v"],
        ["--cases", ","],
        ["--n-min", 2],
        ["--n-min", 6, "--n-max", 5],
        ["--profiles", 0],
    ])
    def test_input_errors(self, capsys, argv):
        assert run(capsys, "sweep", *argv)[0] == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "cfjs", "optimal", str(DEMO_PROFILES / "case_iv_n3.csv")],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert "min_loss" in proc.stderr
