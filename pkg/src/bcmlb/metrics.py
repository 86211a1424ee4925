"""Per-run metrics, the figure of merit S and aggregation over repetitions."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import InvalidParameterError, UndefinedMeritError

# arithmetic means replace an infinite discrepancy ratio by this value
DEFAULT_RATIO_CAP = 1e12


def figure_of_merit(disc_ratio: float, alpha: float, p: float = 1.0) -> float:
    """S = p * disc_ratio / alpha."""
    if p <= 0:
        raise InvalidParameterError(f"p must be positive, got {p}")
    if alpha <= 0:
        raise UndefinedMeritError("figure of merit is undefined when no load moved")
    return p * disc_ratio / alpha


@dataclass
class MetricsRecord:
    n: int
    loads_per_node: int
    algorithm: str
    mobility: str
    initial_disc: float
    final_disc: float
    total_moves: int
    edge_balancings: int
    rounds: int = 0
    rep: int = 0
    instance_seed: str = ""

    @property
    def disc_ratio(self) -> float:
        if self.final_disc == 0:
            return math.inf
        return self.initial_disc / self.final_disc

    @property
    def avg_moves_per_edge(self) -> float:
        return self.total_moves / self.edge_balancings if self.edge_balancings else 0.0

    def merit(self, p: float = 1.0) -> float:
        """S for this run, or NaN if nothing moved."""
        try:
            return figure_of_merit(self.disc_ratio, self.total_moves, p)
        except UndefinedMeritError:
            return math.nan

    @property
    def S(self) -> float:
        return self.merit()

    @property
    def instance_key(self) -> tuple:
        return (self.n, self.loads_per_node, self.mobility, self.rep, self.instance_seed)


def relative_merit(sorted_rec, greedy_rec, p: float = 1.0) -> float:
    """S(SortedGreedy) / S(Greedy). The weight p cancels.

    Works on :class:`MetricsRecord` pairs from the same instance and on
    :class:`Summary` pairs from the same cell.
    """
    if sorted_rec.instance_key != greedy_rec.instance_key:
        raise InvalidParameterError("records do not describe the same instance")
    s_g = figure_of_merit(greedy_rec.disc_ratio, greedy_rec.total_moves, p)
    if s_g == 0:
        raise UndefinedMeritError("Greedy figure of merit is zero")
    return figure_of_merit(sorted_rec.disc_ratio, sorted_rec.total_moves, p) / s_g


AGGREGATED = ("initial_disc", "final_disc", "disc_ratio", "total_moves",
              "avg_moves_per_edge", "S", "rounds")


@dataclass
class Summary:
    """Sample mean and standard deviation (ddof=1) of each metric in a cell."""

    n: int
    loads_per_node: int
    algorithm: str
    mobility: str
    reps: int
    mean: dict = field(default_factory=dict)
    std: dict = field(default_factory=dict)
    geo_mean_disc_ratio: float = math.nan

    @property
    def disc_ratio(self) -> float:
        return self.mean["disc_ratio"]

    @property
    def total_moves(self) -> float:
        return self.mean["total_moves"]

    @property
    def instance_key(self) -> tuple:
        return (self.n, self.loads_per_node, self.mobility)


def aggregate(records, ratio_cap: float = DEFAULT_RATIO_CAP) -> Summary:
    records = list(records)
    if not records:
        raise InvalidParameterError("nothing to aggregate")
    meta = {(r.n, r.loads_per_node, r.algorithm, r.mobility) for r in records}
    if len(meta) != 1:
        raise InvalidParameterError(f"records mix cells: {sorted(meta)}")
    n, lpn, alg, mob = meta.pop()
    out = Summary(n, lpn, alg, mob, len(records))
    for name in AGGREGATED:
        if name == "S":
            vals = np.array([min(r.disc_ratio, ratio_cap) / r.total_moves if r.total_moves
                             else math.nan for r in records])
        else:
            vals = np.array([getattr(r, name) for r in records], dtype=float)
        if name == "disc_ratio":
            vals = np.minimum(vals, ratio_cap)
        elif name == "S":
            # runs without any movement have no merit
            vals = vals[~np.isnan(vals)]
            if not vals.size:
                out.mean[name] = out.std[name] = math.nan
                continue
        out.mean[name] = float(vals.mean())
        out.std[name] = float(vals.std(ddof=1)) if vals.size > 1 else 0.0
    finite = [r.disc_ratio for r in records if math.isfinite(r.disc_ratio) and r.disc_ratio > 0]
    if finite:
        out.geo_mean_disc_ratio = float(np.exp(np.mean(np.log(finite))))
    return out


RUN_COLUMNS = tuple(f.name for f in fields(MetricsRecord)) + (
    "disc_ratio", "avg_moves_per_edge", "S")

SUMMARY_COLUMNS = ("n", "L", "ratio_L_n", "algorithm", "mobility", "mean_final_disc",
                   "std_final_disc", "mean_disc_ratio", "mean_total_moves", "mean_alpha_edge",
                   "mean_S", "reps", "master_seed")


def summary_row(s: Summary, master_seed) -> list:
    return [s.n, s.n * s.loads_per_node, s.loads_per_node, s.algorithm, s.mobility,
            repr(s.mean["final_disc"]), repr(s.std["final_disc"]), repr(s.mean["disc_ratio"]),
            repr(s.mean["total_moves"]), repr(s.mean["avg_moves_per_edge"]),
            repr(s.mean["S"]), s.reps, master_seed]
