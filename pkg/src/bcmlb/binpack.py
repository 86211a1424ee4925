"""Offline weighted balls-into-bins: Greedy and SortedGreedy placement.

Both algorithms throw each ball into the currently lightest bin (ties go to
the lowest bin index). SortedGreedy first sorts the balls by descending
weight. An exhaustive oracle gives the optimal discrepancy for small
instances.
"""
from __future__ import annotations

import heapq
from operator import attrgetter
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .errors import InvalidParameterError, SizeLimitError

# largest number of assignments the exhaustive oracle enumerates (2**15 for two bins)
BRUTE_FORCE_LIMIT = 1 << 15


@dataclass(frozen=True)
class Ball:
    id: int
    weight: float

    def __post_init__(self):
        if not self.weight >= 0:
            raise InvalidParameterError(f"ball {self.id} has negative weight {self.weight}")


@dataclass
class BinState:
    base: float = 0.0
    contents: list = field(default_factory=list)
    total: float = None

    def __post_init__(self):
        if self.base < 0:
            raise InvalidParameterError(f"bin base must be non-negative, got {self.base}")
        if self.total is None:
            self.total = self.base


@dataclass
class DiscrepancyTrace:
    """Discrepancy G_i after each placement, and the weight W_i placed at step i.

    ``initial`` is the discrepancy of the bins before any ball (nonzero only
    when bins have bases).
    """

    discrepancies: list[float] = field(default_factory=list)
    weights: list[float] = field(default_factory=list)
    initial: float = 0.0

    @property
    def final(self) -> float:
        return self.discrepancies[-1] if self.discrepancies else self.initial


def as_balls(balls) -> list[Ball]:
    """Accept Ball objects or bare weights (ids become list positions)."""
    return [b if isinstance(b, Ball) else Ball(i, float(b)) for i, b in enumerate(balls)]


def _as_bins(bins) -> list[BinState]:
    if isinstance(bins, int):
        bins = [BinState() for _ in range(bins)]
    out = []
    for b in bins:
        if isinstance(b, BinState):
            out.append(BinState(b.base, list(b.contents), b.total))
        else:
            out.append(BinState(float(b)))
    if not out:
        raise InvalidParameterError("at least one bin is required")
    return out


def lightest_bin_assign(weights: Sequence[float], totals: list[float],
                        first_bin: int | None = None,
                        trace: list[float] | None = None) -> list[int]:
    """Core placement loop. Mutates ``totals``; returns the bin index of each ball.

    ``first_bin`` forces the first ball into that bin. If ``trace`` is given,
    the discrepancy after every placement is appended to it.
    """
    k = len(totals)
    out = []
    start = 0
    if first_bin is not None and weights:
        totals[first_bin] += weights[0]
        out.append(first_bin)
        if trace is not None:
            trace.append(max(totals) - min(totals))
        start = 1
    if k == 2:
        a, b = totals
        for w in weights[start:]:
            if a <= b:
                a += w
                out.append(0)
            else:
                b += w
                out.append(1)
            if trace is not None:
                trace.append(abs(a - b))
        totals[0], totals[1] = a, b
        return out
    heap = [(t, i) for i, t in enumerate(totals)]
    heapq.heapify(heap)
    top = max(totals)
    for w in weights[start:]:
        t, i = heap[0]
        t += w
        heapq.heapreplace(heap, (t, i))
        totals[i] = t
        out.append(i)
        if trace is not None:
            if t > top:
                top = t
            trace.append(top - heap[0][0])
    return out


def greedy_place(balls, bins, rng=None) -> tuple[list[BinState], DiscrepancyTrace]:
    """Place balls in the given order, each into the lightest bin.

    With all-zero bases the first ball goes to bin 0, or to a uniformly
    random bin when ``rng`` is supplied. Input bins are not modified.
    """
    balls = as_balls(balls)
    bins = _as_bins(bins)
    totals = [b.total for b in bins]
    first = None
    if balls and all(t == 0 for t in totals):
        first = 0 if rng is None else int(np.random.default_rng(rng).integers(len(bins)))
    trace = DiscrepancyTrace(weights=[b.weight for b in balls],
                             initial=max(totals) - min(totals))
    sides = lightest_bin_assign(trace.weights, totals, first, trace.discrepancies)
    for ball, side in zip(balls, sides):
        bins[side].contents.append(ball.id)
    for b, t in zip(bins, totals):
        b.total = t
    return bins, trace


def sort_descending(balls: list[Ball]) -> list[Ball]:
    # stable: equal weights keep input order
    return sorted(balls, key=attrgetter("weight"), reverse=True)


def sorted_greedy_place(balls, bins, rng=None) -> tuple[list[BinState], DiscrepancyTrace]:
    """Sort balls by descending weight, then place them with :func:`greedy_place`."""
    return greedy_place(sort_descending(as_balls(balls)), bins, rng)


def discrepancy(bins) -> float:
    """Heaviest minus lightest bin total. Accepts BinStates or plain totals."""
    totals = [b.total if isinstance(b, BinState) else float(b) for b in bins]
    if not totals:
        raise InvalidParameterError("discrepancy of an empty bin list")
    return max(totals) - min(totals)


def brute_force_optimal(balls, k: int, bases: Sequence[float] | None = None) -> float:
    """Minimum discrepancy over every assignment of the balls to ``k`` bins."""
    w = np.array([b.weight for b in as_balls(balls)], dtype=float)
    if k < 1:
        raise InvalidParameterError("need at least one bin")
    base = np.zeros(k) if bases is None else np.asarray(bases, dtype=float)
    if base.shape != (k,):
        raise InvalidParameterError(f"expected {k} bases, got {base.shape}")
    m = w.size
    if k == 1 or m == 0:
        return float(base.max() - base.min())
    if k ** m > BRUTE_FORCE_LIMIT:
        raise SizeLimitError(f"{k}**{m} assignments exceed the enumeration limit {BRUTE_FORCE_LIMIT}")
    codes = np.arange(k ** m)
    digits = (codes[:, None] // k ** np.arange(m)[None, :]) % k
    totals = np.stack([((digits == j) * w).sum(axis=1) + base[j] for j in range(k)], axis=1)
    return float((totals.max(axis=1) - totals.min(axis=1)).min())


class DeltaGViolation(NamedTuple):
    step: int  # 1-based index of the ball whose placement broke the bound
    delta: float
    weight: float


def verify_delta_g(trace: DiscrepancyTrace, rtol: float = 1e-9) -> list[DeltaGViolation]:
    """Every placement must change the discrepancy by at most the placed weight."""
    out = []
    prev = trace.initial
    scale = max([abs(prev), *map(abs, trace.discrepancies), 1.0])
    for i, (g, w) in enumerate(zip(trace.discrepancies, trace.weights), start=1):
        delta = abs(g - prev)
        if delta > w + rtol * scale:
            out.append(DeltaGViolation(i, delta, w))
        prev = g
    return out


def gm_lower_bound(weights: Sequence[float]) -> float:
    """max(0, W_1 - sum of the remaining weights) for weights sorted descending."""
    w = [float(x) for x in weights]
    if not w:
        return 0.0
    if any(a < b for a, b in zip(w, w[1:])):
        raise InvalidParameterError("weights must be sorted in descending order")
    return max(0.0, w[0] - sum(w[1:]))


def write_weights(weights, path) -> None:
    Path(path).write_text("".join(f"{float(x)!r}\n" for x in weights), encoding="utf-8")


def read_weights(path) -> list[float]:
    return [float(s) for s in Path(path).read_text(encoding="utf-8").split()]
