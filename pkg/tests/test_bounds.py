import math

import mpmath
import numpy as np
import pytest

from rieszsel import (
    DivergenceError,
    InputError,
    generate_hex_packing,
    linear_budget,
    overlap_gap,
    pointwise_budget,
    verify_budget,
    zeta_minus_one,
)
from rieszsel.bounds import per_point_sums


def test_zeta_closed_forms():
    assert abs(zeta_minus_one(3) - math.pi ** 2 / 6) < 1e-9
    assert abs(zeta_minus_one(5) - math.pi ** 4 / 90) < 1e-9


@pytest.mark.parametrize("s", [2.05, 2.5, 3.3, 4.0, 7.0, 30.0])
def test_zeta_against_mpmath(s):
    assert zeta_minus_one(s) == pytest.approx(float(mpmath.zeta(s - 1)), abs=1e-11)


@pytest.mark.parametrize("s", [2.0, 1.0, -1.0])
def test_zeta_diverges(s):
    with pytest.raises(DivergenceError):
        zeta_minus_one(s)


def test_overlap_gap():
    a, b = overlap_gap(0.5, 2)
    assert a == pytest.approx(0.75 ** -2) and b == 1.0
    for s in (1, 2, 3, 4):
        a, b = overlap_gap(0.5, s)
        assert abs(a / b - (4 / 3) ** s) < 1e-12
    with pytest.raises(InputError):
        overlap_gap(0, 2)


def test_budgets():
    assert pointwise_budget(0.5, 3) == pytest.approx(math.pi ** 2)
    assert linear_budget(0.5, 3, 10) == pytest.approx(5 * math.pi ** 2)
    with pytest.raises(InputError):
        linear_budget(0.5, 3, 1)


@pytest.mark.parametrize("layers", range(0, 6))
def test_hex_packing_geometry(layers):
    pts = generate_hex_packing(0.5, layers)
    assert len(pts) == 1 + 3 * layers * (layers + 1)
    assert np.array_equal(pts[0], [0.0, 0.0])
    if layers:
        d = np.sqrt(((pts[:, None] - pts[None]) ** 2).sum(-1))
        np.fill_diagonal(d, np.inf)
        assert d.min() == pytest.approx(1.0)


def test_hex_centre_sum_first_ring():
    pts = generate_hex_packing(0.5, 1)
    assert per_point_sums(pts, 3)[0] == pytest.approx(6.0)


def test_budget_holds_for_small_packings():
    for L in range(1, 7):
        rep = verify_budget(0.5, 3, L)
        assert rep.ok and rep.slack > 0


def test_budget_breached_for_large_packings():
    # the hexagonal lattice has more than 6i points at distance about 2ri,
    # so the per-point sum eventually passes 6 zeta(s-1)
    measured = [verify_budget(0.5, 3, L).measured for L in range(6, 11)]
    assert measured == pytest.approx([9.8076, 9.9703, 10.0949, 10.1934, 10.2733], abs=1e-4)
    assert not verify_budget(0.5, 3, 7).ok
    assert not verify_budget(0.5, 4, 8).ok


def test_budget_needs_s_above_two():
    with pytest.raises(DivergenceError):
        verify_budget(0.5, 2, 3)


def test_linear_beats_quadratic_from_k11():
    # k/2 * pi^2 <= C(k, 2) iff k >= 1 + pi^2
    wins = [k for k in range(2, 60) if linear_budget(0.5, 3, k) <= math.comb(k, 2)]
    assert wins[0] == 11 and wins == list(range(11, 60))


def test_budget_homogeneity():
    for lam in (0.3, 2.0, 7.5):
        assert pointwise_budget(lam, 3.5) == pytest.approx(lam ** -3.5 * pointwise_budget(1, 3.5))
    assert pointwise_budget(1, 3) == pytest.approx(math.pi ** 2 / 8)


def test_zeta_tends_to_one():
    vals = [zeta_minus_one(s) for s in (3, 5, 10, 20, 40)]
    assert all(a > b for a, b in zip(vals, vals[1:])) and vals[-1] - 1 < 1e-11
