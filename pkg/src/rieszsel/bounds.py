"""Local gap and packing-based far-field energy budgets in the plane."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, InputError

ZETA_TOL = 1e-12


def _check_r(r):
    r = float(r)
    if not r > 0 or math.isinf(r):
        raise InputError(f"radius must be positive and finite, got {r}")
    return r


def _check_budget_s(s):
    s = float(s)
    if not s > 2:
        raise DivergenceError(f"far-field budget needs s > 2, got {s}")
    return s


def overlap_gap(r: float, s: float):
    """``((1.5 r)**-s, (2 r)**-s)``: least forbidden and largest admissible pair term."""
    r = _check_r(r)
    if not s > 0:
        raise InputError(f"exponent must be positive, got {s}")
    return (1.5 * r) ** -s, (2.0 * r) ** -s


def zeta_minus_one(s: float) -> float:
    """Riemann zeta at ``s - 1`` for ``s > 2``.

    Partial sum of ``i**-(s-1)`` for ``i < N`` plus the Euler-Maclaurin
    tail ``N**(1-a)/(a-1) + N**-a/2 + a N**(-a-1)/12 - a(a+1)(a+2) N**(-a-3)/720``
    with ``a = s - 1``. For ``x**-a`` the remainder is bounded by the next
    correction term; N is doubled until that bound is below 1e-12.
    """
    s = _check_budget_s(s)
    a = s - 1.0
    N = 16
    while True:
        rem = a * (a + 1) * (a + 2) * (a + 3) * (a + 4) / 30240 * N ** (-a - 5)
        if rem < ZETA_TOL:
            break
        N *= 2
    head = math.fsum(i ** -a for i in range(1, N))
    tail = (N ** (1 - a) / (a - 1) + N ** -a / 2 + a * N ** (-a - 1) / 12
            - a * (a + 1) * (a + 2) * N ** (-a - 3) / 720)
    return head + tail


def pointwise_budget(r: float, s: float) -> float:
    """``6 (2r)**-s zeta(s-1)``, the claimed cap on one disc's far-field sum."""
    r = _check_r(r)
    s = _check_budget_s(s)
    return 6.0 * (2.0 * r) ** -s * zeta_minus_one(s)


def linear_budget(r: float, s: float, k: int) -> float:
    """``k / 2`` times :func:`pointwise_budget`: a total-energy cap linear in ``k``."""
    if k < 2:
        raise InputError(f"k must be at least 2, got {k}")
    return 0.5 * k * pointwise_budget(r, s)


def generate_hex_packing(r: float, layers: int) -> np.ndarray:
    """Centres of a hexagonal packing of radius-``r`` discs, ``layers`` rings around the origin.

    Neighbouring centres are exactly ``2r`` apart in lattice coordinates;
    the point count is ``1 + 3 L (L + 1)``.
    """
    r = _check_r(r)
    if isinstance(layers, bool) or int(layers) != layers or layers < 0:
        raise InputError(f"layers must be a nonnegative integer, got {layers}")
    L = int(layers)
    pts = []
    for q in range(-L, L + 1):
        for t in range(max(-L, -q - L), min(L, -q + L) + 1):
            pts.append((q + t / 2.0, t * math.sqrt(3) / 2.0))
    pts.sort(key=lambda p: (p[0] ** 2 + p[1] ** 2, p))
    return 2.0 * r * np.array(pts)


def per_point_sums(points: np.ndarray, s: float) -> np.ndarray:
    """``sum_{q != p} |p - q|**-s`` for every row ``p``."""
    diff = points[:, None, :] - points[None, :, :]
    d = np.sqrt((diff ** 2).sum(-1))
    np.fill_diagonal(d, np.inf)
    return (d ** -s).sum(axis=1)


@dataclass(frozen=True)
class BudgetReport:
    r: float
    s: float
    layers: int
    measured: float  # max per-point sum over the packing
    bound: float
    slack: float
    total_energy: float
    total_bound: float

    @property
    def ok(self) -> bool:
        return self.measured <= self.bound and self.total_energy <= self.total_bound

    def to_dict(self) -> dict:
        return {"r": self.r, "s": self.s, "layers": self.layers, "measured": self.measured,
                "bound": self.bound, "slack": self.slack, "total_energy": self.total_energy,
                "total_bound": self.total_bound, "ok": self.ok}


def verify_budget(r: float, s: float, layers: int) -> BudgetReport:
    """Measure the hexagonal packing against the pointwise and linear budgets.

    The report's ``ok`` is False when either budget is exceeded; callers
    decide how to surface that.
    """
    s = _check_budget_s(s)
    pts = generate_hex_packing(r, layers)
    sums = per_point_sums(pts, s)
    measured = float(sums.max())
    bound = pointwise_budget(r, s)
    n = len(pts)
    total = 0.5 * math.fsum(sums.tolist())
    total_bound = linear_budget(r, s, n) if n >= 2 else 0.0
    return BudgetReport(float(r), s, int(layers), measured, bound, bound - measured, total, total_bound)
