import subprocess
import sys

import pytest

from bcmlb.cli import main


def test_bounds_table(capsys):
    assert main(["bounds", "--K", "100", "--n", "128", "--d", "4", "--lam", "0.5",
                 "--delta", "1"]) == 0
    out = capsys.readouterr().out
    assert "discrete_discrepancy_bound" in out and "8.63049" in out
    assert "deviation_probability        2" in out


def test_bounds_non_ergodic(capsys):
    assert main(["bounds", "--K", "100", "--n", "16", "--d", "4", "--lam", "1.0"]) == 2
    assert "not ergodic" in capsys.readouterr().err


def test_bounds_from_random_graph(capsys):
    assert main(["bounds", "--K", "50", "--n", "16"]) == 0
    assert "lambda=" in capsys.readouterr().out


def test_sweep_cli(tmp_path, capsys):
    out = tmp_path / "r.csv"
    assert main(["sweep", "--n", "8", "--loads-per-node", "4", "--reps", "2", "--seed", "3",
                 "--mobility", "full,partial", "--iters", "2", "--out", str(out),
                 "--track-continuous", "--traces", str(tmp_path / "tr")]) == 0
    assert out.exists()
    assert len(list((tmp_path / "tr").glob("*.csv"))) == 8


def test_sweep_config_error(capsys):
    assert main(["sweep", "--n", "", "--reps", "1"]) == 2


def test_sweep_runtime_error(tmp_path):
    assert main(["sweep", "--n", "4", "--loads-per-node", "2", "--reps", "1",
                 "--out", str(tmp_path / "nope" / "r.csv")]) == 3


def test_binpack_and_timing_cli(capsys):
    assert main(["binpack", "--m", "4,8", "--bins", "2", "--reps", "10"]) == 0
    assert main(["timing", "--m", "16", "--reps", "3", "--warmup", "1"]) == 0
    assert "sort overhead" in capsys.readouterr().out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bcmlb", "bounds", "--K", "10", "--n", "4",
                           "--d", "2", "--lam", "0.2"], capture_output=True, text=True)
    assert proc.returncode == 0 and "dmax_bound" in proc.stdout


def test_bad_subcommand():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
