"""Closed-form bounds for BCM balancing and weighted balls-into-bins.

Logarithms are natural. Thresholds for real-valued loads are in units of
the largest single load, l_max.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidParameterError, NonErgodicError


def _check_lambda(lam: float) -> None:
    if lam >= 1.0:
        raise NonErgodicError(f"lambda(M) = {lam} >= 1: the round matrix is not ergodic")
    if lam < 0.0:
        raise InvalidParameterError(f"lambda(M) must be non-negative, got {lam}")


def continuous_round_bound(K: float, n: float, eps: float, d: int, lam: float) -> float:
    """Rounds after which the continuous process has discrepancy at most ``eps``.

    4d / (1 - lambda) * log(K n / eps), clamped at zero when eps >= K n.
    """
    _check_lambda(lam)
    if K <= 0 or eps <= 0:
        raise InvalidParameterError("K and eps must be positive")
    if n < 1 or d < 1:
        raise InvalidParameterError("n and d must be at least 1")
    return max(0.0, 4.0 * d / (1.0 - lam) * math.log(K * n / eps))


def discrete_discrepancy_bound(n: float) -> float:
    """sqrt(12 log n) + 1."""
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}")
    return math.sqrt(12.0 * math.log(n)) + 1.0


def deviation_tail_bound(n: float, delta: float) -> tuple[float, float]:
    """(threshold, probability): P[max_w |x_w - xi_w| >= threshold] <= probability.

    threshold = sqrt(4 delta log n), probability = 2 n^(1 - delta).
    """
    if delta < 1:
        raise InvalidParameterError(f"delta must be >= 1, got {delta}")
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}")
    return math.sqrt(4.0 * delta * math.log(n)), 2.0 * n ** (1.0 - delta)


def min_weight_prob(m: int) -> float:
    """m / (m + 1), the claimed Pr[min(A) >= min(B)] for |A| = m, |B| = m + 1."""
    if m < 1:
        raise InvalidParameterError(f"m must be >= 1, got {m}")
    return m / (m + 1)


def exact_min_weight_prob(m: int) -> float:
    """Exact Pr[min(A) >= min(B)] for independent i.i.d. continuous samples.

    The overall minimum of the 2m+1 draws is equally likely to be any of
    them, and min(A) >= min(B) exactly when it falls in B.
    """
    if m < 1:
        raise InvalidParameterError(f"m must be >= 1, got {m}")
    return (m + 1) / (2 * m + 1)


def dmax_bound(l1: float) -> float:
    """Largest half-gap SortedGreedy can leave between two nodes: l1 / 2."""
    if l1 < 0:
        raise InvalidParameterError(f"l1 must be non-negative, got {l1}")
    return l1 / 2.0


@dataclass(frozen=True)
class BoundInputs:
    K: float
    n: int
    eps: float = 1.0
    d: int = 1
    lam: float = 0.5
    delta: float = 3.0
    m: int = 1
    l_max: float = 1.0

    def __post_init__(self):
        if self.K <= 0 or self.eps <= 0:
            raise InvalidParameterError("K and eps must be positive")
        if self.n < 2:
            raise InvalidParameterError(f"n must be >= 2, got {self.n}")
        if self.d < 1 or self.m < 1:
            raise InvalidParameterError("d and m must be >= 1")
        if self.delta < 1:
            raise InvalidParameterError(f"delta must be >= 1, got {self.delta}")
        _check_lambda(self.lam)


def bound_table(inp: BoundInputs) -> list[tuple[str, float]]:
    threshold, prob = deviation_tail_bound(inp.n, inp.delta)
    return [
        ("continuous_round_bound", continuous_round_bound(inp.K, inp.n, inp.eps, inp.d, inp.lam)),
        ("discrete_discrepancy_bound", discrete_discrepancy_bound(inp.n)),
        ("deviation_threshold", threshold),
        ("deviation_threshold_scaled", threshold * inp.l_max),
        ("deviation_probability", prob),
        ("min_weight_prob", min_weight_prob(inp.m)),
        ("dmax_bound", dmax_bound(inp.l_max)),
    ]
