"""Exhaustive ground-truth solvers and the naive line-DP counterexample search."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from itertools import combinations, islice
from typing import Iterator

import numpy as np

from .errors import CapExceeded, InputError
from .line_mpd import LineInstance, line_metric, line_mpd_dp
from .metric import REL_TOL, MetricInstance, check_exponent, pair_weights, riesz_energy

DEFAULT_CAP = 20_000_000
CHUNK = 1 << 15


def default_cap() -> int:
    env = os.environ.get("RIESZ_CAP")
    if env:
        try:
            return int(float(env))
        except ValueError:
            raise InputError(f"RIESZ_CAP must be an integer, got {env!r}") from None
    return DEFAULT_CAP


@dataclass(frozen=True)
class OracleResult:
    optimum: float
    witnesses: tuple  # lexicographically sorted index tuples
    enumerated: int

    def to_dict(self) -> dict:
        return {"optimum": self.optimum, "witnesses": [list(w) for w in self.witnesses],
                "enumerated": self.enumerated}


def _check(m: MetricInstance, k, cap):
    if isinstance(k, bool) or int(k) != k or not 0 <= k <= m.n:
        raise InputError(f"k must be an integer in [0, {m.n}], got {k}")
    k = int(k)
    cap = default_cap() if cap is None else cap
    count = math.comb(m.n, k)
    if count > cap:
        raise CapExceeded(count, cap)
    return k, count


def _partitions(n: int, k: int) -> list:
    """Leading-index blocks of the lexicographic k-subset order."""
    if k == 0:
        return [None]
    return list(range(n - k + 1))


def _chunks(n: int, k: int, lead) -> Iterator[np.ndarray]:
    if lead is None:
        yield np.zeros((1, 0), dtype=np.intp)
        return
    it = combinations(range(lead + 1, n), k - 1)
    while True:
        block = list(islice(it, CHUNK))
        if not block:
            return
        arr = np.empty((len(block), k), dtype=np.intp)
        arr[:, 0] = lead
        if k > 1:
            arr[:, 1:] = block
        yield arr


def iter_subset_values(m: MetricInstance, k: int, pair_values: np.ndarray, reduce: str, lead=None):
    """Yield ``(combos, values)`` blocks in lexicographic order.

    ``values`` is the sum (``reduce="sum"``) or minimum (``"min"``) of
    ``pair_values[a, b]`` over pairs of each combo.
    """
    pairs = list(combinations(range(k), 2))
    leads = _partitions(m.n, k) if lead is None else [lead]
    for ld in leads:
        for combos in _chunks(m.n, k, ld):
            if not pairs:
                vals = np.zeros(len(combos)) if reduce == "sum" else np.full(len(combos), np.inf)
            elif reduce == "sum":
                vals = np.zeros(len(combos))
                for a, b in pairs:
                    vals += pair_values[combos[:, a], combos[:, b]]
            else:
                vals = np.full(len(combos), np.inf)
                for a, b in pairs:
                    np.minimum(vals, pair_values[combos[:, a], combos[:, b]], out=vals)
            yield combos, vals


def _best_in_block(m, k, pv, reduce, lead, tol):
    """Best value and near-best combos within one leading-index block."""
    sign = 1.0 if reduce == "sum" else -1.0
    best = math.inf
    keep = []
    for combos, vals in iter_subset_values(m, k, pv, reduce, lead):
        v = sign * vals
        cur = float(v.min())
        if cur < best:
            best = cur
            keep = [(x, c) for x, c in keep if _close(x, best, tol)]
        mask = _close_arr(v, best, tol)
        keep.extend(zip(v[mask].tolist(), map(tuple, combos[mask].tolist())))
    return best, keep


def _close(x, best, tol):
    return x <= best + tol * abs(best) if math.isfinite(best) else x == best


def _close_arr(v, best, tol):
    if math.isfinite(best):
        return v <= best + tol * abs(best)
    return v == best


def _run(m, k, pv, reduce, threads, tol):
    leads = _partitions(m.n, k)
    if threads > 1 and len(leads) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda ld: _best_in_block(m, k, pv, reduce, ld, tol), leads))
    else:
        parts = [_best_in_block(m, k, pv, reduce, ld, tol) for ld in leads]
    best = min(b for b, _ in parts)
    wit = sorted(c for _, keep in parts for x, c in keep if _close(x, best, tol))
    return best, tuple(wit)


def brute_force_riesz(m: MetricInstance, k: int, s: float, *, cap: int | None = None,
                      unit: float | None = None, threads: int = 1, prune: bool = False,
                      tol: float = REL_TOL) -> OracleResult:
    """Minimum Riesz s-energy over all k-subsets, with every minimizer.

    Energies are evaluated with distances divided by ``unit`` (default: the
    minimum distance) and the optimum is converted back to original units.
    ``prune=True`` switches to a depth-first branch-and-bound that skips
    partial subsets already worse than the incumbent; it is not used as
    ground truth.
    """
    s = check_exponent(s)
    k, count = _check(m, k, cap)
    if unit is None:
        unit = m.min_distance() if m.n > 1 else 1.0
    pv = pair_weights(m, s, unit)
    if prune:
        best, wit, count = _branch_and_bound(pv, m.n, k, tol)
    else:
        best, wit = _run(m, k, pv, "sum", max(1, threads), tol)
    with np.errstate(over="ignore", under="ignore"):
        opt = float(best * np.power(np.float64(unit), -s)) if best else 0.0
    return OracleResult(opt, wit, count)


def _branch_and_bound(pv, n, k, tol):
    best = [math.inf]
    found = []
    visited = [0]

    def rec(start, chosen, energy):
        if energy > best[0] + tol * best[0]:
            return
        if len(chosen) == k:
            visited[0] += 1
            if energy < best[0]:
                best[0] = energy
            found.append((energy, tuple(chosen)))
            return
        for i in range(start, n - (k - len(chosen)) + 1):
            add = float(pv[i, chosen].sum()) if chosen else 0.0
            chosen.append(i)
            rec(i + 1, chosen, energy + add)
            chosen.pop()

    rec(0, [], 0.0)
    b = best[0]
    wit = tuple(sorted(c for e, c in found if _close(e, b, tol)))
    return b, wit, visited[0]


def brute_force_mpd(m: MetricInstance, k: int, *, cap: int | None = None, threads: int = 1,
                    tol: float = REL_TOL) -> OracleResult:
    """Maximum over k-subsets of the minimum pairwise distance, with every maximizer.

    For ``k <= 1`` the optimum is ``inf`` and every subset is a witness.
    """
    k, count = _check(m, k, cap)
    neg, wit = _run(m, k, np.asarray(m.dist), "min", max(1, threads), tol)
    return OracleResult(-neg, wit, count)


def mm_values(m: MetricInstance, k: int, cap: int | None = None) -> np.ndarray:
    """MPD of every k-subset in lexicographic order."""
    k, _ = _check(m, k, cap)
    return np.concatenate([v for _, v in iter_subset_values(m, k, np.asarray(m.dist), "min")])


# -- the naive left-right DP on the line ------------------------------------


def naive_line_riesz_dp(points, k: int, s: float):
    """Left-to-right DP that charges each new point only against its left neighbour.

    ``N[t][i] = min_j N[t-1][j] + (x_i - x_j)**-s``. This undercounts the
    energy of every subset with k >= 3 and is *not* an exact solver.
    Returns ``(value, subset)`` where ``subset`` holds indices into
    ``points`` of the selection the DP commits to.
    """
    s = check_exponent(s)
    x = np.asarray(points, dtype=float)
    n = len(x)
    if n == 0 or np.any(np.diff(x) <= 0):
        raise InputError("points must be nonempty and strictly increasing")
    if isinstance(k, bool) or int(k) != k or not 1 <= k <= n:
        raise InputError(f"k must be an integer in [1, {n}], got {k}")
    k = int(k)
    N = np.full((k + 1, n), np.inf)
    arg = np.full((k + 1, n), -1, dtype=int)
    N[1, :] = 0.0
    for t in range(2, k + 1):
        for i in range(t - 1, n):
            cand = N[t - 1, :i] + (x[i] - x[:i]) ** -s
            j = int(np.argmin(cand))
            N[t, i], arg[t, i] = cand[j], j
    i = int(np.argmin(N[k]))
    value = float(N[k, i])
    picked = []
    for t in range(k, 0, -1):
        picked.append(i)
        i = arg[t, i]
    return value, tuple(sorted(int(i) for i in picked))


@dataclass(frozen=True)
class SearchConfig:
    n_min: int = 2
    n_max: int = 8
    k_min: int = 2
    k_max: int = 4
    s: float = 1.0
    seed: int = 0
    budget: int = 100_000
    generator: str = "random"  # "random": uniform reals in [0, 1); "grid": distinct integers
    grid_size: int = 32
    objective: str = "riesz"  # "riesz" checks the naive DP, "mpd" checks line_mpd_dp

    def validate(self):
        if not 2 <= self.n_min <= self.n_max or self.n_max > 64:
            raise InputError("need 2 <= n_min <= n_max <= 64")
        if not 2 <= self.k_min <= self.k_max:
            raise InputError("need 2 <= k_min <= k_max")
        if self.k_min > self.n_max:
            raise InputError("k_min exceeds n_max")
        if self.generator not in ("random", "grid"):
            raise InputError(f"unknown generator {self.generator!r}")
        if self.generator == "grid" and self.grid_size < self.n_max:
            raise InputError("grid_size must be at least n_max")
        if self.objective not in ("riesz", "mpd"):
            raise InputError(f"unknown objective {self.objective!r}")
        if self.budget < 1:
            raise InputError("budget must be positive")
        check_exponent(self.s)


@dataclass(frozen=True)
class CounterexampleReport:
    found: bool
    tried: int
    config: SearchConfig
    points: tuple = ()
    k: int = 0
    dp_subset: tuple = ()
    dp_value: float = math.nan  # the DP's own objective value
    dp_true: float = math.nan  # true objective of the DP's subset
    optimal_subset: tuple = ()
    optimum: float = math.nan

    def to_dict(self) -> dict:
        d = asdict(self)
        d["config"] = asdict(self.config)
        for key in ("points", "dp_subset", "optimal_subset"):
            d[key] = list(d[key])
        return d


def find_line_counterexample(config: SearchConfig = SearchConfig()) -> CounterexampleReport:
    """Search random sorted line instances for a failure of a left-right DP.

    With ``objective="riesz"`` the naive DP's selection is compared, by true
    energy, with the brute-force optimum; a gap above 1e-6 is reported. With
    ``objective="mpd"`` :func:`line_mpd_dp` is compared with brute-force MPD
    (expected never to fail). Exhausting the budget is a normal outcome.
    """
    config.validate()
    rng = np.random.default_rng(config.seed)
    for tried in range(1, config.budget + 1):
        k = int(rng.integers(config.k_min, config.k_max + 1))
        n = int(rng.integers(max(config.n_min, k), config.n_max + 1))
        if k > n:
            continue
        if config.generator == "grid":
            xs = np.sort(rng.choice(config.grid_size, size=n, replace=False)).astype(float)
        else:
            xs = np.sort(rng.random(n))
            if np.any(np.diff(xs) <= 0):
                continue
        inst = LineInstance.from_values(xs)
        m = line_metric(inst)
        if config.objective == "riesz":
            dp_value, dp_sub = naive_line_riesz_dp(xs, k, config.s)
            dp_true = riesz_energy(m, dp_sub, config.s)
            oracle = brute_force_riesz(m, k, config.s)
            gap = dp_true - oracle.optimum
        else:
            dp_value, dp_sub = line_mpd_dp(inst, k)
            dp_true = dp_value
            oracle = brute_force_mpd(m, k)
            gap = oracle.optimum - dp_value
        if abs(gap) > 1e-6:
            return CounterexampleReport(
                True, tried, config, tuple(xs.tolist()), k, dp_sub, dp_value, dp_true,
                tuple(oracle.witnesses[0]), oracle.optimum,
            )
    return CounterexampleReport(False, config.budget, config)
