import numpy as np
import pytest

from rieszsel import InputError, LineInstance, brute_force_mpd, greedy_feasible, line_mpd_dp, line_mpd_search
from rieszsel.line_mpd import line_metric, load_line, mm_value


def test_fixed_case():
    inst = LineInstance.from_values([0, 1, 3, 6])
    assert line_mpd_dp(inst, 3) == (3.0, (0, 2, 3))
    assert line_mpd_search(inst, 3)[0] == 3.0


def test_unsorted_input_maps_back():
    inst = LineInstance.from_values([6, 0, 3, 1])
    val, sub = line_mpd_dp(inst, 3)
    assert val == 3.0
    assert sorted(float(inst.values()[i]) for i in sub) == [0.0, 3.0, 6.0]
    assert mm_value(inst, sub) == 3.0


def test_greedy_threshold():
    inst = LineInstance.from_values([0, 1, 3, 6])
    ok, picks = greedy_feasible(inst, 3, 3)
    assert ok and len(picks) >= 3
    ok, _ = greedy_feasible(inst, 3, 3.5)
    assert not ok


def test_k_equals_n_and_two():
    inst = LineInstance.from_values([0, 2, 2.5, 9])
    assert line_mpd_dp(inst, 4)[0] == 0.5
    assert line_mpd_dp(inst, 2)[0] == 9.0
    assert line_mpd_search(inst, 2)[0] == 9.0


def test_rejects():
    with pytest.raises(InputError):
        LineInstance.from_values([0, 1, 1])
    with pytest.raises(InputError):
        line_mpd_dp(LineInstance.from_values([0, 1]), 3)
    with pytest.raises(InputError):
        line_mpd_dp(LineInstance.from_values([0, 1]), 1)
    with pytest.raises(InputError):
        load_line("1 2 x")


def test_loaders():
    assert load_line('{"xs": [3, 1, 2]}').n == 3
    assert load_line("3 1\n2\n").n == 3


def test_dp_search_oracle_agree():
    rng = np.random.default_rng(10)
    for _ in range(60):
        n = int(rng.integers(2, 13))
        k = int(rng.integers(2, n + 1))
        xs = rng.choice(50, size=n, replace=False).astype(float)
        inst = LineInstance.from_values(xs)
        dp, sub = line_mpd_dp(inst, k)
        srch, sub2 = line_mpd_search(inst, k)
        orc = brute_force_mpd(line_metric(inst), k).optimum
        assert dp == srch == orc
        assert mm_value(inst, sub) == dp and mm_value(inst, sub2) == dp
        assert len(sub) == len(sub2) == k
