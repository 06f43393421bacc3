"""Exact max-min dispersion (MPD) for points on a line."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .metric import MetricInstance


@dataclass(frozen=True)
class LineInstance:
    """Sorted positions plus the permutation back to input order.

    ``xs[i]`` is the i-th smallest input value, which was input number
    ``order[i]``. Subsets returned by this module use input indices.
    """

    xs: np.ndarray
    order: np.ndarray

    @classmethod
    def from_values(cls, values) -> LineInstance:
        v = np.asarray(values, dtype=float).ravel()
        if v.size == 0:
            raise InputError("line instance needs at least one point")
        if not np.all(np.isfinite(v)):
            raise InputError("positions must be finite")
        order = np.argsort(v, kind="stable")
        xs = v[order]
        if np.any(np.diff(xs) <= 0):
            raise InputError("positions must be distinct")
        xs.setflags(write=False)
        order.setflags(write=False)
        return cls(xs, order)

    @property
    def n(self) -> int:
        return len(self.xs)

    def original(self, sorted_idx) -> tuple:
        return tuple(sorted(int(self.order[i]) for i in sorted_idx))

    def values(self) -> np.ndarray:
        """Positions in input order."""
        v = np.empty(self.n)
        v[self.order] = self.xs
        return v


def load_line(text: str) -> LineInstance:
    """``{"xs": [...]}`` JSON or one number per line."""
    if text.lstrip().startswith("{"):
        try:
            obj = json.loads(text)
            return LineInstance.from_values(obj["xs"])
        except (json.JSONDecodeError, KeyError, TypeError) as e:
            raise InputError(f"bad line JSON: {e}") from None
    try:
        vals = [float(x) for x in text.split()]
    except ValueError as e:
        raise InputError(f"bad number: {e}") from None
    return LineInstance.from_values(vals)


def _check_k(inst, k):
    if isinstance(k, bool) or int(k) != k or not 2 <= k <= inst.n:
        raise InputError(f"k must be an integer in [2, {inst.n}], got {k}")
    return int(k)


def line_mpd_dp(inst: LineInstance, k: int):
    """Bellman recurrence over the last selected point.

    ``M[t][i]`` is the best bottleneck of a t-subset whose rightmost point
    is ``x_i``: ``M[t][i] = max_{j<i} min(M[t-1][j], x_i - x_j)`` with
    ``M[1][i] = inf``. O(n^2 k). Returns ``(value, subset)``.
    """
    k = _check_k(inst, k)
    x = inst.xs
    n = inst.n
    M = np.full((k + 1, n), -np.inf)
    arg = np.full((k + 1, n), -1, dtype=int)
    M[1, :] = np.inf
    for t in range(2, k + 1):
        for i in range(t - 1, n):
            cand = np.minimum(M[t - 1, :i], x[i] - x[:i])
            j = int(np.argmax(cand))
            M[t, i], arg[t, i] = cand[j], j
    i = int(np.argmax(M[k]))
    value = float(M[k, i])
    picked = []
    for t in range(k, 0, -1):
        picked.append(i)
        i = arg[t, i]
    return value, inst.original(picked)


def greedy_feasible(inst: LineInstance, k: int, tau: float):
    """Left-to-right scan taking each point at distance >= tau from the last pick.

    Returns ``(feasible, selection)`` where ``feasible`` means at least
    ``k`` points were picked; ``selection`` holds every pick (input indices).
    """
    if not tau > 0:
        raise InputError(f"tau must be positive, got {tau}")
    picks = _greedy(inst.xs, tau)
    return len(picks) >= k, inst.original(picks)


def _greedy(x, tau):
    picks = [0]
    last = x[0]
    for i in range(1, len(x)):
        if x[i] - last >= tau:
            picks.append(i)
            last = x[i]
    return picks


def line_mpd_search(inst: LineInstance, k: int):
    """Binary search over sorted distinct pairwise differences with the greedy test.

    O(n^2 log n) time, O(n^2) memory. Returns ``(value, subset)``; the
    subset is the first ``k`` greedy picks at the optimal threshold.
    """
    k = _check_k(inst, k)
    x = inst.xs
    iu = np.triu_indices(inst.n, 1)
    cand = np.unique((x[None, :] - x[:, None])[iu])
    lo, hi = 0, len(cand) - 1  # cand[lo] is always feasible for k <= n
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if len(_greedy(x, cand[mid])) >= k:
            lo = mid
        else:
            hi = mid - 1
    tau = float(cand[lo])
    return tau, inst.original(_greedy(x, tau)[:k])


def line_metric(inst: LineInstance) -> MetricInstance:
    """Metric ``|x - y|`` on the points in *input* order."""
    v = inst.values()
    return MetricInstance.from_matrix(np.abs(v[:, None] - v[None, :]))


def mm_value(inst: LineInstance, subset) -> float:
    v = np.sort(inst.values()[list(subset)])
    return float(np.diff(v).min()) if len(v) > 1 else math.inf
