"""Subprocess tests for the ballast command-line harness.

The binary location is supplied through the BALLAST_CLI environment variable
(the CMake test target sets it); the suite is skipped when it is absent.
"""

import json
import math
import os
import subprocess

import pytest

CLI = os.environ.get("BALLAST_CLI")

pytestmark = pytest.mark.skipif(
    not CLI or not os.path.exists(CLI), reason="BALLAST_CLI does not point at the binary"
)

C4_GRAPH = "4 2\n0 1\n1 2\n2 3\n0 3\n"


def run_cli(*args, env_extra=None, expect=0):
    env = os.environ.copy()
    env.pop("BALLAST_SEED", None)  # keep the default-seed path deterministic
    if env_extra:
        env.update(env_extra)
    res = subprocess.run([CLI, *args], capture_output=True, text=True, env=env)
    assert res.returncode == expect, f"rc={res.returncode}\nstderr:\n{res.stderr}"
    return res


def csv_rows(text):
    lines = [ln for ln in text.strip().splitlines() if ln]
    header = lines[0].split(",")
    return header, [dict(zip(header, ln.split(","))) for ln in lines[1:]]


# ---------------------------------------------------------------------------
# Global behaviour
# ---------------------------------------------------------------------------


def test_version():
    res = run_cli("--version")
    assert res.stdout.strip() == "ballast 0.1.0"


def test_help_lists_subcommands():
    res = run_cli("--help")
    for sub in ("simulate", "gap-table", "potentials", "lower-bound", "graphical", "verify"):
        assert sub in res.stdout


def test_unknown_process_is_a_runtime_error():
    res = run_cli("simulate", "--process", "nope", "--n", "10", "--m", "100", expect=2)
    assert "error" in res.stderr


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


SIM_ARGS = ("simulate", "--process", "two-choice", "--n", "50", "--m", "2000",
            "--reps", "3", "--seed", "9")


def test_simulate_csv_schema():
    res = run_cli(*SIM_ARGS)
    header, rows = csv_rows(res.stdout)
    assert header == ["rep", "seed", "final_gap"]
    assert [r["rep"] for r in rows] == ["0", "1", "2"]
    assert len({r["seed"] for r in rows}) == 3  # independent per-repetition streams


def test_simulate_stdout_is_byte_identical_across_runs():
    assert run_cli(*SIM_ARGS).stdout == run_cli(*SIM_ARGS).stdout


def test_env_seed_equals_flag_seed():
    flagged = run_cli(*SIM_ARGS)
    via_env = run_cli(*SIM_ARGS[:-2], env_extra={"BALLAST_SEED": "9"})
    assert via_env.stdout == flagged.stdout


def test_simulate_json_summary():
    res = run_cli(*SIM_ARGS, "--format", "json")
    doc = json.loads(res.stdout)
    assert doc["tool"] == "ballast"
    assert doc["command"] == "simulate"
    assert doc["process"] == "two-choice"
    assert (doc["n"], doc["m"], doc["reps"], doc["seed"]) == (50, 2000, 3, 9)
    gap = doc["gap"]
    assert gap["repetitions"] == 3
    assert gap["min"] <= gap["mean"] <= gap["max"]
    assert sum(count for _, count in gap["histogram"]) == 3


def test_simulate_checkpoint_columns():
    res = run_cli("simulate", "--process", "two-choice", "--n", "50", "--m", "2000",
                  "--reps", "1", "--seed", "9", "--checkpoint-every", "1000")
    header, rows = csv_rows(res.stdout)
    assert header == ["rep", "seed", "final_gap", "gap_t1000", "gap_t2000"]
    assert rows[0]["gap_t2000"] == rows[0]["final_gap"]


def test_out_writes_csv_and_json(tmp_path):
    base = str(tmp_path / "sim")
    res = run_cli(*SIM_ARGS, "--out", base)
    csv_text = open(base + ".csv").read()
    assert csv_text == res.stdout  # simulate streams the CSV to stdout as-is
    doc = json.load(open(base + ".json"))
    assert doc["command"] == "simulate"


def test_graphical_process_from_file(tmp_path):
    path = tmp_path / "c4.graph"
    path.write_text(C4_GRAPH)
    res = run_cli("simulate", "--process", "graphical", "--graph-file", str(path),
                  "--n", "4", "--m", "100", "--reps", "2", "--seed", "3")
    header, rows = csv_rows(res.stdout)
    assert header == ["rep", "seed", "final_gap"]
    assert len(rows) == 2


# ---------------------------------------------------------------------------
# gap-table
# ---------------------------------------------------------------------------


def test_gap_table_default_rows(tmp_path):
    base = str(tmp_path / "table")
    run_cli("gap-table", "--n", "40", "--m", "2000", "--reps", "2", "--seed", "5",
            "--out", base)
    header, rows = csv_rows(open(base + ".csv").read())
    assert header == ["n", "process", "m", "reps", "mean", "min", "max", "histogram"]
    assert [r["process"] for r in rows] == [
        "one-plus-beta(0.5)", "quantile-k1", "quantile-k2", "quantile-k3",
        "quantile-k4", "two-choice",
    ]
    assert all(r["n"] == "40" and r["m"] == "2000" and r["reps"] == "2" for r in rows)
    assert all(float(r["min"]) <= float(r["mean"]) <= float(r["max"]) for r in rows)
    doc = json.load(open(base + ".json"))
    assert doc["command"] == "gap-table"
    assert len(doc["rows"]) == 6


def test_gap_table_selects_processes():
    res = run_cli("gap-table", "--n", "40", "--m", "1000", "--reps", "1", "--seed", "5",
                  "--process", "two-choice,quantile-k2", "--format", "json")
    doc = json.loads(res.stdout)
    assert [r["process"] for r in doc["rows"]] == ["two-choice", "quantile-k2"]


def test_gap_table_rejects_unknown_label():
    res = run_cli("gap-table", "--n", "40", "--m", "200", "--process", "nope", expect=2)
    assert "unknown process label" in res.stderr


# ---------------------------------------------------------------------------
# potentials
# ---------------------------------------------------------------------------


def test_potentials_series():
    res = run_cli("potentials", "--n", "50", "--m", "500", "--reps", "2",
                  "--checkpoint-every", "100", "--seed", "8")
    header, rows = csv_rows(res.stdout)
    assert header == ["rep", "t", "gap", "phi0", "gamma"]
    assert len(rows) == 2 * 5  # two repetitions, five checkpoints each
    assert [r["t"] for r in rows[:5]] == ["100", "200", "300", "400", "500"]
    for r in rows:
        assert float(r["phi0"]) <= float(r["gamma"])


# ---------------------------------------------------------------------------
# lower-bound
# ---------------------------------------------------------------------------


def test_lower_bound_row(tmp_path):
    base = str(tmp_path / "lb")
    run_cli("lower-bound", "--n", "200", "--regime", "sqrt", "--reps", "20",
            "--seed", "4", "--out", base)
    header, rows = csv_rows(open(base + ".csv").read())
    assert header == ["n", "m", "regime", "delta", "threshold", "reps", "exceed",
                      "fraction", "mean_gap"]
    (row,) = rows
    assert row["n"] == "200"
    assert int(row["m"]) == math.ceil(200 * math.sqrt(math.log(200)) / 10)
    assert row["regime"] == "sqrt"
    assert float(row["threshold"]) == pytest.approx(math.sqrt(math.log(200)) / 20, rel=1e-9)
    assert 0 <= int(row["exceed"]) <= 20
    assert float(row["fraction"]) == pytest.approx(int(row["exceed"]) / 20)


# ---------------------------------------------------------------------------
# graphical
# ---------------------------------------------------------------------------


def test_graphical_sweep(tmp_path):
    base = str(tmp_path / "sweep")
    run_cli("graphical", "--n", "16", "--degree", "2,15", "--m", "1600", "--reps", "2",
            "--seed", "6", "--out", base)
    header, rows = csv_rows(open(base + ".csv").read())
    assert header == ["n", "degree", "kind", "lambda", "m", "reps", "mean", "min", "max"]
    assert [(r["degree"], r["kind"]) for r in rows] == [("2", "cycle"), ("15", "complete")]
    assert float(rows[0]["lambda"]) == pytest.approx(1.0, abs=1e-9)  # even cycle
    assert float(rows[1]["lambda"]) == pytest.approx(1 / 15, abs=1e-9)
    assert all(r["m"] == "1600" for r in rows)


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def test_verify_passes():
    res = run_cli("verify")
    assert res.stdout.count("[PASS]") == 10
    assert "[FAIL]" not in res.stdout
    assert "verify: all checks passed" in res.stdout


def test_verify_inject_fault_fails():
    res = run_cli("verify", "--inject-fault", expect=1)
    assert "[FAIL]" in res.stdout
    assert "verify: FAILURES present" in res.stdout
