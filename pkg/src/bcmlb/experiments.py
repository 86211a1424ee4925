"""Seeded experiment sweeps, balls-into-bins benchmarks and timings.

Seed splitting: every random stream is drawn from
``numpy.random.SeedSequence(master_seed, spawn_key=key)`` feeding a PCG64
generator, where ``key`` is ``(n, loads_per_node, rep, stream)`` for DLB
sweeps and ``(m, n_bins)`` for bin-packing benchmarks. Streams are 0 for
the graph, 1 for initial loads, 2 for mobility and 3 for first-ball coin
flips. Both algorithms and both mobility models of one instance therefore
see the same graph and initial loads, and each stream depends only on the
master seed and the cell indices.
"""
from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from . import __version__
from .binpack import greedy_place, lightest_bin_assign, sorted_greedy_place
from .errors import ConfigError
from .metrics import (RUN_COLUMNS, SUMMARY_COLUMNS, MetricsRecord, Summary, aggregate,
                      summary_row)
from .network import MatchingSchedule, NetworkGraph, color_edges, generate_connected_graph, round_matrix
from .protocol import (DEFAULT_MAX_ITERS, Algorithm, Mobility, NetworkState, RunTrace,
                       assign_mobility, random_state, run_dlb)

RNG_NAME = "numpy.PCG64/SeedSequence"
STREAM_GRAPH, STREAM_LOADS, STREAM_MOBILITY, STREAM_COIN = range(4)

DEFAULT_N = (16, 64, 128)
DEFAULT_LOADS_PER_NODE = (10, 50, 100)
EXTENDED_N = (16, 32, 64, 128)


def child_seed(master_seed: int, *key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in key))


def child_rng(master_seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(child_seed(master_seed, *key)))


@dataclass
class ExperimentConfig:
    n_list: tuple = DEFAULT_N
    loads_per_node_list: tuple = DEFAULT_LOADS_PER_NODE
    weight_lo: float = 0.0
    weight_hi: float = 100.0
    algorithms: tuple = (Algorithm.GREEDY.value, Algorithm.SORTED_GREEDY.value)
    mobility: tuple = (Mobility.FULL.value, Mobility.PARTIAL.value)
    k: int | None = None  # None: stop when a round no longer improves
    max_iters: int = DEFAULT_MAX_ITERS
    reps: int = 50
    master_seed: int = 0
    track_continuous: bool = False
    density: float = 0.0
    random_first: bool = False
    out: str | None = None

    def validate(self) -> "ExperimentConfig":
        for name in ("n_list", "loads_per_node_list", "algorithms", "mobility"):
            if not getattr(self, name):
                raise ConfigError(f"{name} must not be empty")
        if any(int(n) < 2 for n in self.n_list):
            raise ConfigError("every n must be >= 2")
        if any(int(x) < 1 for x in self.loads_per_node_list):
            raise ConfigError("loads per node must be >= 1")
        if not self.weight_lo < self.weight_hi:
            raise ConfigError(f"need weight_lo < weight_hi, got [{self.weight_lo}, {self.weight_hi}]")
        if self.weight_lo < 0:
            raise ConfigError("weights must be non-negative")
        if self.reps < 1:
            raise ConfigError("reps must be >= 1")
        if self.k is not None and self.k < 1:
            raise ConfigError("k must be >= 1")
        if self.max_iters < 1:
            raise ConfigError("max_iters must be >= 1")
        if not 0.0 <= self.density <= 1.0:
            raise ConfigError("density must lie in [0, 1]")
        try:
            self.algorithms = tuple(Algorithm.parse(a).value for a in self.algorithms)
            self.mobility = tuple(Mobility.parse(m).value for m in self.mobility)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        self.n_list = tuple(int(n) for n in self.n_list)
        self.loads_per_node_list = tuple(int(x) for x in self.loads_per_node_list)
        return self


_LIST_KEYS = {"n_list": int, "loads_per_node_list": int, "algorithms": str, "mobility": str}
_SCALAR_KEYS = {"weight_lo": float, "weight_hi": float, "max_iters": int, "reps": int,
                "master_seed": int, "density": float, "out": str}
_KEY_ALIASES = {"n": "n_list", "loads_per_node": "loads_per_node_list", "alg": "algorithms",
                "algorithm": "algorithms", "iters": "k", "seed": "master_seed"}


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def parse_config_text(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Read ``key = value`` lines; ``#`` starts a comment, lists are comma separated."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = _KEY_ALIASES.get(key.replace("-", "_"), key.replace("-", "_"))
        try:
            if key in _LIST_KEYS:
                values[key] = tuple(_LIST_KEYS[key](v.strip()) for v in value.split(",") if v.strip())
            elif key in _SCALAR_KEYS:
                values[key] = _SCALAR_KEYS[key](value)
            elif key == "k":
                values[key] = None if value.lower() in ("", "auto", "none") else int(value)
            elif key in ("track_continuous", "random_first"):
                values[key] = _parse_bool(value)
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
    return replace(base or ExperimentConfig(), **values)


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text)


@dataclass
class Instance:
    n: int
    loads_per_node: int
    rep: int
    seed_label: str
    graph: NetworkGraph
    schedule: MatchingSchedule
    lam: float
    state: NetworkState


def make_instance(cfg: ExperimentConfig, n: int, lpn: int, rep: int) -> Instance:
    ms = cfg.master_seed
    graph = generate_connected_graph(n, child_rng(ms, n, lpn, rep, STREAM_GRAPH), cfg.density)
    schedule = color_edges(graph)
    state = random_state(n, lpn, child_rng(ms, n, lpn, rep, STREAM_LOADS),
                         cfg.weight_lo, cfg.weight_hi)
    return Instance(n, lpn, rep, f"{ms}:{n}:{lpn}:{rep}", graph, schedule,
                    round_matrix(schedule, n).lam, state)


class RunResult(NamedTuple):
    instance: Instance
    record: MetricsRecord
    trace: RunTrace
    mobile_state: NetworkState  # initial state with mobility applied


def iter_runs(cfg: ExperimentConfig) -> Iterator[RunResult]:
    """Yield every run of the sweep in deterministic cell order."""
    cfg.validate()
    ms = cfg.master_seed
    for n in cfg.n_list:
        for lpn in cfg.loads_per_node_list:
            for rep in range(cfg.reps):
                inst = make_instance(cfg, n, lpn, rep)
                for mob in cfg.mobility:
                    start = assign_mobility(inst.state, child_rng(ms, n, lpn, rep, STREAM_MOBILITY), mob)
                    for alg in cfg.algorithms:
                        rng = child_rng(ms, n, lpn, rep, STREAM_COIN) if cfg.random_first else None
                        trace = run_dlb(start, inst.schedule, alg, cfg.k,
                                        track_continuous=cfg.track_continuous, rng=rng,
                                        max_iters=cfg.max_iters)
                        rec = MetricsRecord(n, lpn, alg, mob, trace.initial_discrepancy,
                                            trace.final_discrepancy, trace.total_moves,
                                            trace.edge_balancings, trace.iterations, rep,
                                            inst.seed_label)
                        yield RunResult(inst, rec, trace, start)


@dataclass
class SweepResult:
    config: ExperimentConfig
    records: list = field(default_factory=list)
    summaries: list = field(default_factory=list)

    def summary(self, n, lpn, algorithm, mobility) -> Summary:
        for s in self.summaries:
            if (s.n, s.loads_per_node, s.algorithm, s.mobility) == (n, lpn, algorithm, mobility):
                return s
        raise KeyError((n, lpn, algorithm, mobility))


def _cell_order(cfg: ExperimentConfig, rec: MetricsRecord) -> tuple:
    return (cfg.n_list.index(rec.n), cfg.loads_per_node_list.index(rec.loads_per_node),
            cfg.mobility.index(rec.mobility), cfg.algorithms.index(rec.algorithm), rec.rep)


def run_sweep(cfg: ExperimentConfig, trace_dir=None, on_run=None) -> SweepResult:
    """Run every cell of ``cfg``; write CSVs when ``cfg.out`` is set.

    ``cfg.out`` receives the per-cell summary; per-run rows go next to it
    with a ``.runs.csv`` suffix and the configuration to ``.meta.json``.
    """
    cfg.validate()
    if cfg.out is not None:
        _check_writable(cfg.out)
    result = SweepResult(cfg)
    for res in iter_runs(cfg):
        result.records.append(res.record)
        if on_run is not None:
            on_run(res)
        if trace_dir is not None:
            r = res.record
            Path(trace_dir).mkdir(parents=True, exist_ok=True)
            res.trace.write_csv(Path(trace_dir) / f"trace_n{r.n}_l{r.loads_per_node}_{r.mobility}"
                                                  f"_{r.algorithm}_rep{r.rep}.csv")
    result.records.sort(key=lambda r: _cell_order(cfg, r))
    cells: dict = {}
    for r in result.records:
        cells.setdefault((r.n, r.loads_per_node, r.mobility, r.algorithm), []).append(r)
    result.summaries = [aggregate(recs) for recs in cells.values()]
    if cfg.out is not None:
        write_sweep(result, cfg.out)
    return result


def _check_writable(path) -> None:
    parent = Path(path).resolve().parent
    if not parent.is_dir():
        raise OSError(f"output directory {parent} does not exist")


def _sibling(path, suffix: str) -> Path:
    p = Path(path)
    return p.with_name(p.stem + suffix)


def write_sweep(result: SweepResult, path) -> None:
    cfg = result.config
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for s in result.summaries:
            w.writerow(summary_row(s, cfg.master_seed))
    with open(_sibling(path, ".runs.csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RUN_COLUMNS + ("rng",))
        for r in result.records:
            row = [getattr(r, c) for c in RUN_COLUMNS] + [RNG_NAME]
            w.writerow([repr(x) if isinstance(x, float) else x for x in row])
    meta = {"config": asdict(cfg), "rng": RNG_NAME, "version": __version__}
    _sibling(path, ".meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n",
                                            encoding="utf-8")


class BinpackRow(NamedTuple):
    m: int
    n_bins: int
    algorithm: str
    mean_disc: float
    std_disc: float
    reps: int


BINPACK_COLUMNS = BinpackRow._fields


def place_discrepancy(weights: Sequence[float], n_bins: int, sort: bool) -> float:
    """Final discrepancy of Greedy (or SortedGreedy if ``sort``) on empty bins."""
    w = sorted(weights, reverse=True) if sort else list(weights)
    totals = [0.0] * n_bins
    lightest_bin_assign(w, totals)
    return max(totals) - min(totals)


def run_binpack_bench(m_list, n_bins_list, reps: int = 1000, seed: int = 0,
                      out=None) -> list[BinpackRow]:
    """Both algorithms on identical uniform[0, 1) samples for every (m, n_bins)."""
    if not m_list or not n_bins_list or reps < 1:
        raise ConfigError("m_list and n_bins_list must be non-empty and reps >= 1")
    if any(m < 1 for m in m_list) or any(k < 1 for k in n_bins_list):
        raise ConfigError("m and n_bins must be >= 1")
    rows = []
    for k in n_bins_list:
        for m in m_list:
            samples = child_rng(seed, m, k).random((reps, m))
            for alg, sort in ((Algorithm.GREEDY, False), (Algorithm.SORTED_GREEDY, True)):
                d = np.array([place_discrepancy(s.tolist(), k, sort) for s in samples])
                rows.append(BinpackRow(m, k, alg.value, float(d.mean()),
                                       float(d.std(ddof=1)) if reps > 1 else 0.0, reps))
    if out is not None:
        with open(out, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(BINPACK_COLUMNS)
            for r in rows:
                w.writerow([repr(x) if isinstance(x, float) else x for x in r])
    return rows


@dataclass
class TimingReport:
    m: int
    reps: int
    greedy_s: float
    sorted_greedy_s: float

    @property
    def overhead_s(self) -> float:
        return self.sorted_greedy_s - self.greedy_s

    @property
    def relative_overhead(self) -> float:
        """Extra SortedGreedy time as a fraction of its total runtime."""
        return self.overhead_s / self.sorted_greedy_s if self.sorted_greedy_s > 0 else 0.0


def run_timing(m: int, reps: int = 100, warmup: int = 5, seed: int = 0) -> TimingReport:
    """Mean wall-clock time of both algorithms on the two-bin problem.

    The first ``warmup`` repetitions are discarded. Each repetition times both
    algorithms on the same fresh weights.
    """
    if m < 1 or reps < 1 or warmup < 0:
        raise ConfigError("need m >= 1, reps >= 1 and warmup >= 0")
    rng = child_rng(seed, m, 2)
    times = {Algorithm.GREEDY: [], Algorithm.SORTED_GREEDY: []}
    for i in range(warmup + reps):
        w = rng.random(m).tolist()
        for alg, fn in ((Algorithm.GREEDY, greedy_place), (Algorithm.SORTED_GREEDY, sorted_greedy_place)):
            t0 = time.perf_counter()
            fn(w, 2)
            dt = time.perf_counter() - t0
            if i >= warmup:
                times[alg].append(dt)
    return TimingReport(m, reps, float(np.mean(times[Algorithm.GREEDY])),
                        float(np.mean(times[Algorithm.SORTED_GREEDY])))
