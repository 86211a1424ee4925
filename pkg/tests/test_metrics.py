import math

import pytest

from bcmlb.errors import InvalidParameterError, UndefinedMeritError
from bcmlb.metrics import MetricsRecord, aggregate, figure_of_merit, relative_merit


def rec(alg="sorted_greedy", init=100.0, final=10.0, moves=5, rep=0, mobility="full"):
    return MetricsRecord(16, 10, alg, mobility, init, final, moves, 20, 3, rep, f"s{rep}")


def test_figure_of_merit():
    assert figure_of_merit(10, 5) == 2
    assert figure_of_merit(10, 5, p=2) == 2 * figure_of_merit(10, 5)
    assert figure_of_merit(135, 14) == pytest.approx(9.642857, abs=1e-6)
    with pytest.raises(UndefinedMeritError):
        figure_of_merit(3, 0)


def test_relative_merit():
    a = rec()
    assert relative_merit(a, rec(alg="greedy")) == 1
    s, g = rec(final=1.0, moves=40), rec(alg="greedy", final=20.0, moves=4)
    assert relative_merit(s, g, p=1) == relative_merit(s, g, p=7)
    assert relative_merit(s, g) == pytest.approx((100 / 40) / (5 / 4))
    with pytest.raises(InvalidParameterError):
        relative_merit(s, rec(alg="greedy", rep=1))


def test_record_derived_fields():
    r = rec(final=0.0)
    assert r.disc_ratio == math.inf
    assert r.avg_moves_per_edge * r.edge_balancings == r.total_moves
    assert math.isnan(rec(moves=0).S)


def test_aggregate():
    s = aggregate([rec()])
    assert s.mean["final_disc"] == 10 and s.std["final_disc"] == 0
    s = aggregate([rec(final=4.0), rec(final=6.0, rep=1)])
    assert s.mean["final_disc"] == 5
    assert s.std["final_disc"] == pytest.approx(math.sqrt(2))
    with pytest.raises(InvalidParameterError):
        aggregate([rec(), rec(alg="greedy")])
    with pytest.raises(InvalidParameterError):
        aggregate([])


def test_aggregate_caps_infinite_ratio():
    s = aggregate([rec(final=0.0), rec(final=10.0, rep=1)], ratio_cap=1000)
    assert s.mean["disc_ratio"] == pytest.approx((1000 + 10) / 2)
    assert s.geo_mean_disc_ratio == pytest.approx(10)


def test_relative_merit_on_summaries():
    s = aggregate([rec(final=1.0, moves=40)])
    g = aggregate([rec(alg="greedy", final=20.0, moves=4)])
    assert relative_merit(s, g) == pytest.approx(2.0)
