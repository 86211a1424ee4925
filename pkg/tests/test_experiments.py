import csv
import hashlib
import json

import numpy as np
import pytest

from bcmlb.errors import ConfigError
from bcmlb.experiments import (ExperimentConfig, child_seed, iter_runs, load_config,
                               make_instance, parse_config_text, run_binpack_bench, run_sweep,
                               run_timing)


def small(**kw):
    base = dict(n_list=(16,), loads_per_node_list=(10,), reps=2, master_seed=5,
                mobility=("full",))
    base.update(kw)
    return ExperimentConfig(**base)


def test_sweep_rows_and_determinism(tmp_path):
    out = tmp_path / "a.csv"
    result = run_sweep(small(out=str(out)))
    assert len(result.records) == 4
    runs = list(csv.DictReader(open(tmp_path / "a.runs.csv")))
    assert len(runs) == 4
    assert {r["rng"] for r in runs} == {"numpy.PCG64/SeedSequence"}
    summary = list(csv.DictReader(open(out)))
    assert [r["algorithm"] for r in summary] == ["greedy", "sorted_greedy"]
    assert summary[0]["L"] == "160" and summary[0]["reps"] == "2"
    meta = json.loads((tmp_path / "a.meta.json").read_text())
    assert meta["rng"] == "numpy.PCG64/SeedSequence"
    out2 = tmp_path / "b.csv"
    run_sweep(small(out=str(out2)))
    assert out.read_bytes() == out2.read_bytes()
    assert (tmp_path / "a.runs.csv").read_bytes() == (tmp_path / "b.runs.csv").read_bytes()


def test_default_grid_cells():
    cfg = ExperimentConfig(reps=1, max_iters=1)
    assert len(cfg.n_list) * len(cfg.loads_per_node_list) == 9


def test_empty_list_rejected():
    with pytest.raises(ConfigError):
        run_sweep(small(n_list=()))
    with pytest.raises(ConfigError):
        small(weight_lo=5, weight_hi=5).validate()
    with pytest.raises(ConfigError):
        small(algorithms=("fancy",)).validate()


def test_unwritable_output(tmp_path):
    with pytest.raises(OSError):
        run_sweep(small(out=str(tmp_path / "missing" / "x.csv")))


def digest(state, graph):
    h = hashlib.sha256()
    h.update(repr((state.weights, state.node_loads, state.mobile, graph.edges)).encode())
    return h.hexdigest()


def test_fair_comparison_inputs_identical():
    cfg = small(mobility=("full", "partial"), reps=1)
    seen = {}
    for res in iter_runs(cfg):
        key = (res.record.mobility, res.record.rep)
        seen.setdefault(key, set()).add(digest(res.mobile_state, res.instance.graph))
    assert all(len(v) == 1 for v in seen.values())
    full = make_instance(cfg, 16, 10, 0)
    assert full.state.weights == make_instance(cfg, 16, 10, 0).state.weights


def test_child_seeds_depend_only_on_key():
    a = np.random.default_rng(child_seed(1, 16, 10, 0, 0)).random(3)
    b = np.random.default_rng(child_seed(1, 16, 10, 0, 0)).random(3)
    c = np.random.default_rng(child_seed(1, 16, 10, 1, 0)).random(3)
    assert (a == b).all() and not (a == c).all()


def test_config_file(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("# grid\nn = 16, 64\nloads_per_node = 10\nalg = sorted_greedy\n"
                    "mobility = partial\niters = 3\nreps = 4\nseed = 9\ntrack_continuous = yes\n")
    cfg = load_config(path).validate()
    assert cfg.n_list == (16, 64) and cfg.k == 3 and cfg.reps == 4
    assert cfg.algorithms == ("sorted_greedy",) and cfg.track_continuous
    with pytest.raises(ConfigError):
        parse_config_text("bogus = 1")
    with pytest.raises(ConfigError):
        parse_config_text("reps = many")


def test_binpack_single_ball_identical():
    rows = run_binpack_bench([1], [2, 5], reps=20, seed=0)
    for k in (2, 5):
        g, s = [r for r in rows if r.n_bins == k]
        assert g.mean_disc == s.mean_disc


def test_binpack_csv(tmp_path):
    run_binpack_bench([8], [2], reps=5, seed=1, out=tmp_path / "b.csv")
    rows = list(csv.DictReader(open(tmp_path / "b.csv")))
    assert [r["algorithm"] for r in rows] == ["greedy", "sorted_greedy"]


def test_timing_report_structure():
    rep = run_timing(64, reps=5, warmup=1)
    assert rep.greedy_s > 0 and rep.sorted_greedy_s > 0
    assert rep.reps == 5


def test_timing_single_ball_overhead_negligible():
    rep = run_timing(1, reps=200)
    assert abs(rep.overhead_s) < 1e-4


def test_timing_sort_overhead_small():
    # two-bin problem with 2**13 balls, 100 repetitions
    rep = run_timing(2 ** 13, reps=100)
    print(f"relative sorting overhead {rep.relative_overhead:.2%}")
    assert rep.relative_overhead < 0.05


def test_timing_scaling_no_worse_than_m_log_m():
    ms = [2 ** p for p in range(10, 15)]
    t = [run_timing(m, reps=15, warmup=3).sorted_greedy_s for m in ms]
    slope = np.polyfit(np.log(ms), np.log(t), 1)[0]
    # m log m over this range has a log-log slope of about 1.1
    assert slope < 1.35
