import math

import numpy as np
import pytest

from conftest import enumerate_energies, enumerate_mm, random_metric
from rieszsel import (
    CapExceeded,
    InputError,
    MetricInstance,
    SearchConfig,
    brute_force_mpd,
    brute_force_riesz,
    find_line_counterexample,
    naive_line_riesz_dp,
    riesz_energy,
)
from rieszsel.oracle import mm_values


def test_six_taxa_brute(six_taxa_metric):
    res = brute_force_riesz(six_taxa_metric, 3, 1)
    assert res.optimum == pytest.approx(3 / 11, abs=1e-12)
    assert len(res.witnesses) == 12  # any triple from three different root children
    assert res.enumerated == 20


def test_brute_matches_reference():
    rng = np.random.default_rng(2)
    for _ in range(20):
        n = int(rng.integers(2, 9))
        k = int(rng.integers(1, n + 1))
        s = float(rng.choice([0.5, 1, 2, 6]))
        d = random_metric(rng, n)
        ref = enumerate_energies(d.tolist(), k, s)
        best = min(ref.values())
        m = MetricInstance.from_matrix(d)
        res = brute_force_riesz(m, k, s)
        assert res.optimum == pytest.approx(best, rel=1e-9, abs=1e-300)
        want = tuple(sorted(c for c, e in ref.items() if math.isclose(e, best, rel_tol=1e-9)))
        assert res.witnesses == want


def test_mpd_matches_reference():
    rng = np.random.default_rng(4)
    for _ in range(20):
        n = int(rng.integers(2, 9))
        k = int(rng.integers(2, n + 1))
        d = random_metric(rng, n)
        ref = enumerate_mm(d.tolist(), k)
        m = MetricInstance.from_matrix(d)
        assert brute_force_mpd(m, k).optimum == max(ref.values())
        assert list(mm_values(m, k)) == list(ref.values())


def test_mpd_trivial_k(six_taxa_metric):
    res = brute_force_mpd(six_taxa_metric, 1)
    assert res.optimum == math.inf
    assert len(res.witnesses) == 6


def test_threads_and_prune_agree():
    rng = np.random.default_rng(8)
    m = MetricInstance.from_matrix(random_metric(rng, 11))
    a = brute_force_riesz(m, 5, 2)
    b = brute_force_riesz(m, 5, 2, threads=4)
    c = brute_force_riesz(m, 5, 2, prune=True)
    assert a.optimum == b.optimum
    assert a.witnesses == b.witnesses == c.witnesses
    assert c.optimum == pytest.approx(a.optimum, rel=1e-12)


def test_cap():
    m = MetricInstance.from_points(list(range(30)))
    with pytest.raises(CapExceeded):
        brute_force_riesz(m, 15, 1, cap=1000)
    with pytest.raises(InputError):
        brute_force_riesz(m, 31, 1)


def test_cap_env(monkeypatch):
    monkeypatch.setenv("RIESZ_CAP", "10")
    m = MetricInstance.from_points(list(range(6)))
    with pytest.raises(CapExceeded):
        brute_force_riesz(m, 3, 1)


def test_large_exponent_stays_finite():
    m = MetricInstance.from_points([0.0, 0.001, 0.002, 5.0, 10.0])
    res = brute_force_riesz(m, 3, 200)
    assert res.witnesses == ((0, 3, 4), (1, 3, 4), (2, 3, 4))


def test_naive_dp_on_fixed_line():
    # extremes are kept; the naive DP ignores the non-adjacent pair
    val, sub = naive_line_riesz_dp([0, 1, 3, 6], 3, 1)
    assert sub[0] == 0 and sub[-1] == 3
    m = MetricInstance.from_points([0, 1, 3, 6])
    assert val < riesz_energy(m, sub, 1)


def test_naive_dp_exact_for_k2():
    rng = np.random.default_rng(1)
    for _ in range(20):
        xs = np.sort(rng.random(6))
        val, sub = naive_line_riesz_dp(xs, 2, 1.0)
        m = MetricInstance.from_points(xs)
        assert val == pytest.approx(brute_force_riesz(m, 2, 1.0).optimum, rel=1e-12)


def test_counterexample_search_default():
    rep = find_line_counterexample()
    assert rep.found
    m = MetricInstance.from_points(rep.points)
    assert rep.dp_true - rep.optimum > 1e-6
    assert riesz_energy(m, rep.optimal_subset, 1.0) == pytest.approx(rep.optimum, rel=1e-12)
    assert rep.k <= 4 and len(rep.points) <= 8


def test_counterexample_none_for_k3():
    # with k = 3 both endpoints are always optimal, so the DP's undercount is constant
    rep = find_line_counterexample(SearchConfig(k_max=3, budget=300))
    assert not rep.found and rep.tried == 300


def test_mpd_objective_never_fails():
    rep = find_line_counterexample(SearchConfig(objective="mpd", budget=200, n_max=10, k_max=5))
    assert not rep.found


def test_search_config_validation():
    with pytest.raises(InputError):
        find_line_counterexample(SearchConfig(n_min=5, n_max=3))
    with pytest.raises(InputError):
        find_line_counterexample(SearchConfig(generator="spiral"))
