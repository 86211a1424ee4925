"""Balancing circuit model: the DLB protocol over an edge-colored schedule.

Each matched pair pools its mobile loads and redistributes them with Greedy
or SortedGreedy on top of the immobile weight each node keeps. A continuous
(divisible-load) reference process can run alongside.
"""
from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .binpack import lightest_bin_assign
from .errors import InvalidParameterError
from .network import MatchingSchedule, check_matching

DEFAULT_MAX_ITERS = 100
DEFAULT_STOP_TOL = 1e-9
GAP_RTOL = 1e-12


class Algorithm(str, enum.Enum):
    GREEDY = "greedy"
    SORTED_GREEDY = "sorted_greedy"

    @classmethod
    def parse(cls, value) -> "Algorithm":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        aliases = {"sortedgreedy": "sorted_greedy", "sg": "sorted_greedy", "g": "greedy"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise InvalidParameterError(f"unknown algorithm {value!r}") from None


class Mobility(str, enum.Enum):
    FULL = "full"
    PARTIAL = "partial"

    @classmethod
    def parse(cls, value) -> "Mobility":
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise InvalidParameterError(f"unknown mobility model {value!r}") from None


@dataclass(frozen=True)
class Load:
    id: int
    weight: float
    mobile: bool = True


@dataclass
class NetworkState:
    """Loads and their host nodes.

    Load ``i`` has weight ``weights[i]``; ``node_loads[w]`` lists the ids on
    node ``w`` in order (Greedy consumes them in that order).
    """

    weights: list[float]
    mobile: list[bool]
    node_loads: list[list[int]]

    def __post_init__(self):
        if len(self.weights) != len(self.mobile):
            raise InvalidParameterError("weights and mobility flags differ in length")
        ids = sorted(i for ids in self.node_loads for i in ids)
        if ids != list(range(len(self.weights))):
            raise InvalidParameterError("every load must sit on exactly one node")
        if any(not w >= 0 for w in self.weights):
            raise InvalidParameterError("load weights must be non-negative")

    @classmethod
    def from_node_weights(cls, node_weights: Sequence[Sequence[float]],
                          immobile: Sequence[Sequence[bool]] | None = None) -> "NetworkState":
        weights, mobile, node_loads = [], [], []
        for w_idx, ws in enumerate(node_weights):
            ids = []
            for j, x in enumerate(ws):
                ids.append(len(weights))
                weights.append(float(x))
                mobile.append(not (immobile is not None and immobile[w_idx][j]))
            node_loads.append(ids)
        return cls(weights, mobile, node_loads)

    @classmethod
    def from_loads(cls, n: int, placed: Sequence[tuple[Load, int]]) -> "NetworkState":
        """Build from (load, node) pairs; load ids must be 0..L-1."""
        size = len(placed)
        weights, mobile = [0.0] * size, [True] * size
        node_loads: list[list[int]] = [[] for _ in range(n)]
        for load, node in placed:
            if not 0 <= node < n:
                raise InvalidParameterError(f"node {node} out of range")
            if not 0 <= load.id < size:
                raise InvalidParameterError(f"load id {load.id} out of range")
            weights[load.id] = float(load.weight)
            mobile[load.id] = load.mobile
            node_loads[node].append(load.id)
        return cls(weights, mobile, node_loads)

    @property
    def n(self) -> int:
        return len(self.node_loads)

    @property
    def loads(self) -> list[Load]:
        return [Load(i, w, m) for i, (w, m) in enumerate(zip(self.weights, self.mobile))]

    @property
    def assignment(self) -> dict[int, int]:
        return {i: node for node, ids in enumerate(self.node_loads) for i in ids}

    @property
    def l_max(self) -> float:
        return max(self.weights, default=0.0)

    def node_totals(self) -> np.ndarray:
        w = self.weights
        return np.array([sum(w[i] for i in ids) for ids in self.node_loads])

    def total_weight(self) -> float:
        return float(sum(self.weights))

    def discrepancy(self) -> float:
        t = self.node_totals()
        return float(t.max() - t.min())

    def copy(self) -> "NetworkState":
        return NetworkState(list(self.weights), list(self.mobile),
                            [list(ids) for ids in self.node_loads])


def random_state(n: int, loads_per_node: int, seed=None,
                 lo: float = 0.0, hi: float = 100.0) -> NetworkState:
    """``loads_per_node`` loads per node with weights uniform on [lo, hi)."""
    if n < 1 or loads_per_node < 0:
        raise InvalidParameterError("need n >= 1 and loads_per_node >= 0")
    if not lo < hi:
        raise InvalidParameterError(f"need lo < hi, got [{lo}, {hi}]")
    rng = np.random.default_rng(seed)
    w = rng.uniform(lo, hi, size=(n, loads_per_node))
    return NetworkState.from_node_weights(w.tolist())


def assign_mobility(state: NetworkState, seed=None, mode="partial") -> NetworkState:
    """Pin a random subset of each node's loads.

    For a node with m >= 2 loads, r is drawn uniformly from 1..m-1 and r of
    its loads, chosen uniformly, become immobile. Nodes with fewer than two
    loads keep everything mobile. ``mode="full"`` makes every load mobile.
    """
    out = state.copy()
    out.mobile = [True] * len(out.weights)
    if Mobility.parse(mode) is Mobility.FULL:
        return out
    rng = np.random.default_rng(seed)
    for ids in out.node_loads:
        m = len(ids)
        if m < 2:
            continue
        r = int(rng.integers(1, m))
        for j in rng.choice(m, size=r, replace=False):
            out.mobile[ids[j]] = False
    return out


class MatchingError(NamedTuple):
    round: int
    u: int
    v: int
    e: float  # (x_u - x_v) / 2 after balancing


def balance_matching(state: NetworkState, u: int, v: int, algorithm,
                     *, rng=None, improve_only: bool = True, round_index: int = 0):
    """Balance the loads of matched nodes ``u`` and ``v`` in place.

    Mobile loads of both nodes are pooled (u's first, each in list order) and
    placed into two bins whose bases are the nodes' immobile weights. With
    ``improve_only`` set, the placement is applied only if it strictly
    narrows the pair's gap; otherwise the pair keeps its loads. ``rng`` randomizes which node
    receives the first ball when both bases are zero.

    Returns ``(state, moves, MatchingError)``.
    """
    n = state.n
    if not (0 <= u < n and 0 <= v < n):
        raise InvalidParameterError(f"unknown node in edge ({u}, {v}) for n={n}")
    if u == v:
        raise InvalidParameterError("cannot match a node with itself")
    w, mob = state.weights, state.mobile
    old_u, old_v = state.node_loads[u], state.node_loads[v]
    fixed_u = [i for i in old_u if not mob[i]]
    fixed_v = [i for i in old_v if not mob[i]]
    from_u = [i for i in old_u if mob[i]]
    pool = from_u + [i for i in old_v if mob[i]]
    if Algorithm.parse(algorithm) is Algorithm.SORTED_GREEDY:
        pool.sort(key=lambda i: -w[i])

    base_u = sum(w[i] for i in fixed_u)
    base_v = sum(w[i] for i in fixed_v)
    x_u = sum(w[i] for i in old_u)
    x_v = sum(w[i] for i in old_v)
    totals = [base_u, base_v]
    first = None
    if rng is not None and base_u == 0 and base_v == 0 and pool:
        first = int(rng.integers(2))
    sides = lightest_bin_assign([w[i] for i in pool], totals, first)

    # summation order differs between the two gaps, hence the tolerance
    if improve_only and abs(totals[0] - totals[1]) >= abs(x_u - x_v) - GAP_RTOL * (x_u + x_v):
        return state, 0, MatchingError(round_index, u, v, (x_u - x_v) / 2)

    new_u = fixed_u + [i for i, s in zip(pool, sides) if s == 0]
    new_v = fixed_v + [i for i, s in zip(pool, sides) if s == 1]
    was_u = set(from_u)
    moves = sum(1 for i, s in zip(pool, sides) if (s == 0) != (i in was_u))
    state.node_loads[u] = new_u
    state.node_loads[v] = new_v
    return state, moves, MatchingError(round_index, u, v, (totals[0] - totals[1]) / 2)


def continuous_step(xi, matching) -> np.ndarray:
    """Average the values of every matched pair; other entries are unchanged."""
    out = np.array(xi, dtype=float)
    pairs = np.asarray(list(matching), dtype=int).reshape(-1, 2)
    if pairs.size:
        check_matching(pairs.tolist(), out.size)
        avg = (out[pairs[:, 0]] + out[pairs[:, 1]]) / 2
        out[pairs[:, 0]] = avg
        out[pairs[:, 1]] = avg
    return out


def continuous_round(xi, schedule: MatchingSchedule) -> np.ndarray:
    for m in schedule.matchings:
        xi = continuous_step(xi, m)
    return xi


def deviation(x, xi) -> float:
    """Largest per-node gap between a discrete state and the continuous vector."""
    if isinstance(x, NetworkState):
        x = x.node_totals()
    x, xi = np.asarray(x, dtype=float), np.asarray(xi, dtype=float)
    if x.shape != xi.shape:
        raise InvalidParameterError(f"size mismatch {x.shape} vs {xi.shape}")
    return float(np.max(np.abs(x - xi))) if x.size else 0.0


@dataclass
class RoundRecord:
    round: int
    discrepancy: float
    moves: int
    max_abs_edge_error: float | None
    deviation: float | None
    max_total: float
    min_total: float


@dataclass
class RunTrace:
    """Per-round history of one DLB run. Round 0 is the initial state."""

    rounds: list[RoundRecord] = field(default_factory=list)
    errors: list[MatchingError] = field(default_factory=list)
    final_state: NetworkState | None = None
    edge_balancings: int = 0

    @property
    def initial_discrepancy(self) -> float:
        return self.rounds[0].discrepancy

    @property
    def final_discrepancy(self) -> float:
        return self.rounds[-1].discrepancy

    @property
    def iterations(self) -> int:
        return len(self.rounds) - 1

    @property
    def total_moves(self) -> int:
        return sum(r.moves for r in self.rounds)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(TRACE_COLUMNS)
            for r in self.rounds:
                writer.writerow([r.round, repr(r.discrepancy), r.moves,
                                 "" if r.max_abs_edge_error is None else repr(r.max_abs_edge_error),
                                 "" if r.deviation is None else repr(r.deviation)])


TRACE_COLUMNS = ("round", "discrepancy", "moves_this_round", "max_abs_edge_error",
                 "deviation_from_continuous")


def run_dlb(state: NetworkState, schedule: MatchingSchedule, algorithm, k: int | None = None,
            *, track_continuous: bool = False, rng=None, improve_only: bool = True,
            max_iters: int = DEFAULT_MAX_ITERS, stop_tol: float = DEFAULT_STOP_TOL) -> RunTrace:
    """Run the DLB protocol on a copy of ``state``.

    Every iteration visits each matching of ``schedule`` in order and
    balances each of its edges. With ``k`` given exactly ``k`` iterations run;
    otherwise iterations stop once a round improves the discrepancy by less
    than ``stop_tol`` or after ``max_iters`` rounds.
    """
    if k is not None and k < 1:
        raise InvalidParameterError(f"k must be >= 1, got {k}")
    algorithm = Algorithm.parse(algorithm)
    schedule.validate(n=state.n)
    state = state.copy()
    rng = None if rng is None else np.random.default_rng(rng)

    totals = state.node_totals()
    xi = totals.copy() if track_continuous else None
    trace = RunTrace()
    trace.rounds.append(RoundRecord(0, float(totals.max() - totals.min()), 0, None,
                                    0.0 if track_continuous else None,
                                    float(totals.max()), float(totals.min())))
    limit = k if k is not None else max_iters
    for t in range(1, limit + 1):
        moves = 0
        worst = 0.0
        for matching in schedule.matchings:
            for u, v in matching:
                _, mv, err = balance_matching(state, u, v, algorithm, rng=rng,
                                              improve_only=improve_only, round_index=t)
                moves += mv
                worst = max(worst, abs(err.e))
                trace.errors.append(err)
                trace.edge_balancings += 1
            if xi is not None:
                xi = continuous_step(xi, matching)
        totals = state.node_totals()
        disc = float(totals.max() - totals.min())
        trace.rounds.append(RoundRecord(t, disc, moves, worst,
                                        deviation(totals, xi) if xi is not None else None,
                                        float(totals.max()), float(totals.min())))
        if k is None and trace.rounds[-2].discrepancy - disc < stop_tol:
            break
    trace.final_state = state
    return trace
