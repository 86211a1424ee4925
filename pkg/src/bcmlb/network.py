"""Processor networks, edge-colored matching schedules and round matrices."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

from .errors import InvalidParameterError

Edge = tuple[int, int]

# eigenvalue magnitudes closer than this to 1 count as 1
ERGODIC_TOL = 1e-9


def _canonical(u: int, v: int) -> Edge:
    u, v = int(u), int(v)
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class NetworkGraph:
    """Undirected, connected, simple graph on vertices ``0..n-1``.

    Edges are stored sorted, each as ``(u, v)`` with ``u < v``.
    """

    n: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        if self.n < 2:
            raise InvalidParameterError(f"need at least 2 vertices, got n={self.n}")
        seen = set()
        for u, v in self.edges:
            if not (0 <= u < v < self.n):
                raise InvalidParameterError(f"bad edge ({u}, {v}) for n={self.n}")
            if (u, v) in seen:
                raise InvalidParameterError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
        object.__setattr__(self, "edges", tuple(sorted(seen)))
        if not self.is_connected():
            raise InvalidParameterError("graph is not connected")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "NetworkGraph":
        return cls(n, tuple(_canonical(u, v) for u, v in edges))

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adjacency()]

    @property
    def max_degree(self) -> int:
        return max(self.degrees())

    def is_connected(self) -> bool:
        adj = self.adjacency()
        seen = [False] * self.n
        seen[0] = True
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    queue.append(v)
        return all(seen)


def generate_connected_graph(n: int, seed=None, density: float = 0.0) -> NetworkGraph:
    """Random connected graph built by adding uniformly random absent edges.

    Edges are drawn one at a time until the graph is connected and, if
    ``density`` > 0, until at least ``density * n(n-1)/2`` edges exist.
    ``seed`` may be an int, a ``SeedSequence`` or a ``numpy.random.Generator``.
    """
    if n < 2:
        raise InvalidParameterError(f"need at least 2 vertices, got n={n}")
    if not 0.0 <= density <= 1.0:
        raise InvalidParameterError(f"density must lie in [0, 1], got {density}")
    rng = np.random.default_rng(seed)
    max_edges = n * (n - 1) // 2
    target = int(np.ceil(density * max_edges))
    components = DisjointSet(range(n))
    edges: set[Edge] = set()
    while components.n_subsets > 1 or len(edges) < target:
        u, v = rng.choice(n, size=2, replace=False)
        e = _canonical(u, v)
        if e in edges:
            continue
        edges.add(e)
        components.merge(e[0], e[1])
    return NetworkGraph(n, tuple(sorted(edges)))


@dataclass(frozen=True)
class MatchingSchedule:
    """Ordered sequence of matchings applied once per round."""

    matchings: tuple[tuple[Edge, ...], ...]

    @property
    def d(self) -> int:
        return len(self.matchings)

    def edges(self) -> Iterator[Edge]:
        """Edges in visiting order: matching by matching, canonical order inside."""
        for m in self.matchings:
            yield from m

    def validate(self, graph: NetworkGraph | None = None, n: int | None = None) -> None:
        n = graph.n if graph is not None else n
        for m in self.matchings:
            check_matching(m, n)
        if graph is not None:
            covered = set(self.edges())
            if covered != set(graph.edges):
                raise InvalidParameterError("schedule edges differ from the graph edges")


def check_matching(matching: Iterable[Sequence[int]], n: int | None = None) -> None:
    used: set[int] = set()
    for u, v in matching:
        if u == v:
            raise InvalidParameterError(f"self-loop ({u}, {v}) in matching")
        for w in (u, v):
            if n is not None and not 0 <= w < n:
                raise InvalidParameterError(f"vertex {w} out of range for n={n}")
            if w in used:
                raise InvalidParameterError(f"vertex {w} matched twice")
            used.add(w)


def color_edges(g: NetworkGraph) -> MatchingSchedule:
    """Greedy edge coloring in canonical edge order; color classes become matchings.

    Each edge gets the smallest color not yet used at either endpoint, so at
    most ``2*max_degree - 1`` colors are needed.
    """
    used: list[set[int]] = [set() for _ in range(g.n)]
    classes: list[list[Edge]] = []
    for u, v in g.edges:
        busy = used[u] | used[v]
        c = 0
        while c in busy:
            c += 1
        used[u].add(c)
        used[v].add(c)
        if c == len(classes):
            classes.append([])
        classes[c].append((u, v))
    return MatchingSchedule(tuple(tuple(sorted(m)) for m in classes))


def matching_matrix(n: int, matching: Iterable[Sequence[int]]) -> np.ndarray:
    """The n x n averaging matrix of one matching."""
    matching = [_canonical(u, v) for u, v in matching]
    check_matching(matching, n)
    m = np.eye(n)
    for u, v in matching:
        m[u, u] = m[v, v] = m[u, v] = m[v, u] = 0.5
    return m


@dataclass(frozen=True)
class RoundMatrix:
    entries: np.ndarray
    eigenvalues: np.ndarray  # sorted by real part, descending
    lam: float

    @property
    def ergodic(self) -> bool:
        return self.lam < 1.0 - ERGODIC_TOL


def spectral_lambda(eigenvalues: np.ndarray) -> float:
    """max(|lambda_2|, |lambda_n|) with eigenvalues ordered by real part."""
    ev = np.asarray(eigenvalues)
    if ev.size < 2:
        return 0.0
    ev = ev[np.argsort(-ev.real, kind="stable")]
    return float(max(abs(ev[1]), abs(ev[-1])))


def round_matrix(schedule: MatchingSchedule, n: int) -> RoundMatrix:
    """Ordered product of the schedule's matching matrices and its lambda."""
    m = np.eye(n)
    for matching in schedule.matchings:
        m = m @ matching_matrix(n, matching)
    ev = np.linalg.eigvals(m)
    ev = ev[np.argsort(-ev.real, kind="stable")]
    return RoundMatrix(m, ev, spectral_lambda(ev))


def write_edge_list(g: NetworkGraph, path) -> None:
    lines = [str(g.n)] + [f"{u} {v}" for u, v in g.edges]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_edge_list(path) -> NetworkGraph:
    rows = [ln.split() for ln in Path(path).read_text(encoding="utf-8").splitlines()]
    rows = [r for r in rows if r]
    if not rows or len(rows[0]) != 1:
        raise InvalidParameterError(f"{path}: first line must hold the vertex count")
    n = int(rows[0][0])
    edges = []
    for r in rows[1:]:
        if len(r) != 2:
            raise InvalidParameterError(f"{path}: malformed edge line {' '.join(r)!r}")
        u, v = int(r[0]), int(r[1])
        if u >= v:
            raise InvalidParameterError(f"{path}: edge {u} {v} must satisfy u < v")
        edges.append((u, v))
    return NetworkGraph(n, tuple(edges))
