"""Hardness-reduction constructors and the large-exponent MPD threshold.

Each constructor has a matching ``verify_*`` routine that decides both the
source problem and the constructed energy problem by exhaustive search, for
checking the reductions on small instances.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import InputError, InvariantViolation, TrivialInstance
from .metric import REL_TOL, MetricInstance, check_exponent, pair_weights
from .oracle import brute_force_mpd, brute_force_riesz, iter_subset_values, mm_values


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset  # of (u, v) with u < v

    def __post_init__(self):
        if self.n < 0:
            raise InputError("vertex count must be nonnegative")
        norm = set()
        for e in self.edges:
            u, v = (int(x) for x in e)
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InputError(f"edge ({u}, {v}) out of range for {self.n} vertices")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))

    def has_edge(self, u, v) -> bool:
        return (min(u, v), max(u, v)) in self.edges


def load_graph(text: str, n: int | None = None) -> Graph:
    """``{"n": n, "edges": [[u, v], ...]}`` JSON or an edge list of ``u v`` lines.

    For edge lists the vertex count is ``n`` if given, else the largest
    vertex index plus one. ``#`` starts a comment.
    """
    if text.lstrip().startswith("{"):
        try:
            obj = json.loads(text)
            return Graph(int(obj["n"]), frozenset(tuple(e) for e in obj["edges"]))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            if isinstance(e, InputError):
                raise
            raise InputError(f"bad graph JSON: {e}") from None
    edges = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InputError(f"line {lineno}: expected 'u v'")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise InputError(f"line {lineno}: vertices must be integers") from None
    if n is None:
        n = 1 + max((max(e) for e in edges), default=-1)
    return Graph(n, frozenset(edges))


def has_k_clique(g: Graph, k: int) -> bool:
    return any(all(g.has_edge(u, v) for u, v in combinations(c, 2)) for c in combinations(range(g.n), k))


@dataclass(frozen=True)
class PlanarInstance:
    points: np.ndarray
    delta: float
    k: int

    def __post_init__(self):
        p = np.array(self.points, dtype=float)
        if p.ndim != 2 or p.shape[1] != 2:
            raise InputError("points must be an (n, 2) array")
        if len({tuple(r) for r in p.tolist()}) != len(p):
            raise InputError("points must be distinct")
        if not self.delta > 0:
            raise InputError(f"delta must be positive, got {self.delta}")
        p.setflags(write=False)
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "delta", float(self.delta))
        object.__setattr__(self, "k", int(self.k))

    def metric(self) -> MetricInstance:
        return MetricInstance.from_points(self.points)


def load_planar(text: str) -> PlanarInstance:
    try:
        obj = json.loads(text)
        return PlanarInstance(np.asarray(obj["points"], dtype=float), float(obj["delta"]), int(obj["k"]))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        if isinstance(e, InputError):
            raise
        raise InputError(f"bad planar instance JSON: {e}") from None


@dataclass(frozen=True)
class ReductionOutput:
    instance: MetricInstance
    k: int
    s: float
    T: float
    provenance: dict

    def to_dict(self, with_instance: bool = False) -> dict:
        d = {"k": self.k, "s": self.s, "T": self.T, "provenance": dict(self.provenance)}
        if with_instance:
            d["instance"] = self.instance.to_dict()
        return d


def _binom2(k):
    return k * (k - 1) // 2


# -- k-clique -> general metric ----------------------------------------------


def clique_metric(g: Graph) -> MetricInstance:
    """Distance 2 across edges, 1 across non-edges."""
    d = np.ones((g.n, g.n))
    for u, v in g.edges:
        d[u, v] = d[v, u] = 2.0
    np.fill_diagonal(d, 0.0)
    return MetricInstance.from_matrix(d)


def clique_to_rssp(g: Graph, k: int, s: float) -> ReductionOutput:
    """Energy instance whose k-subsets reach ``T = C(k,2) 2**-s`` iff ``g`` has a k-clique."""
    s = check_exponent(s)
    if isinstance(k, bool) or int(k) != k or not 2 <= k <= g.n:
        raise InputError(f"k must be an integer in [2, {g.n}], got {k}")
    k = int(k)
    T = _binom2(k) * 2.0 ** -s
    return ReductionOutput(clique_metric(g), k, s, T, {"gap": [1.0, 2.0], "s": s, "T": T})


@dataclass(frozen=True)
class CliqueCheck:
    T: float
    min_energy: float
    clique_exists: bool
    decision: bool  # min_energy <= T
    equivalent: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def verify_clique_reduction(g: Graph, k: int, s: float, threads: int = 1) -> CliqueCheck:
    red = clique_to_rssp(g, k, s)
    # unit 1 keeps every pair weight in {1, 2**-s} exactly
    res = brute_force_riesz(red.instance, red.k, red.s, unit=1.0, threads=threads)
    clique = has_k_clique(g, red.k)
    decision = res.optimum <= red.T
    return CliqueCheck(red.T, res.optimum, clique, decision, decision == clique)


# -- geometric independent set -> planar energy ------------------------------


@dataclass(frozen=True)
class GapQuantities:
    d_min: float
    delta_max: float
    d_min_pair: tuple
    delta_max_pair: tuple


def gap_quantities(p: PlanarInstance) -> GapQuantities:
    """Smallest admissible (>= delta) and largest forbidden (< delta) distance.

    Raises :class:`TrivialInstance` if either class of pairs is empty; the
    exception carries the direct answer to the independent-set question.
    """
    d = p.metric().dist
    n = len(d)
    iu = np.triu_indices(n, 1)
    vals = d[iu]
    adm = vals >= p.delta
    if not adm.any() or adm.all():
        raise TrivialInstance(
            "no admissible pairs" if not adm.any() else "no forbidden pairs",
            _trivial_answer(p, adm),
        )
    ia = int(np.argmin(np.where(adm, vals, np.inf)))
    ib = int(np.argmax(np.where(adm, -np.inf, vals)))
    pair = lambda j: (int(iu[0][j]), int(iu[1][j]))  # noqa: E731
    return GapQuantities(float(vals[ia]), float(vals[ib]), pair(ia), pair(ib))


def _trivial_answer(p, adm) -> bool:
    n = len(p.points)
    if p.k <= 1:
        return p.k <= n
    if len(adm) == 0 or adm.all():
        return p.k <= n  # every subset is independent
    return False  # no two points may be co-selected


def choose_exponent(c: float, a: float, b: float) -> float:
    """Threshold above which ``c * b**-u < a**-u`` holds (for ``0 < a < b``)."""
    if not (c > 0 and a > 0 and b > 0):
        raise InputError("c, a, b must be positive")
    if a >= b:
        raise InputError(f"need a < b, got a={a}, b={b}")
    return math.log(c) / (math.log(b) - math.log(a))


def gis_to_rssp(p: PlanarInstance) -> ReductionOutput:
    """Integer exponent and threshold that separate independent from dependent k-subsets.

    ``s = 1 + ceil(log C(k,2) / log(D_min / delta_max))`` and
    ``T = C(k,2) D_min**-s``. ``T`` may under- or overflow for extreme gaps;
    ``provenance["log_T"]`` is always finite.
    """
    if p.k < 2:
        raise InputError("k must be at least 2")
    if p.k > len(p.points):
        raise TrivialInstance("k exceeds the number of points", False)
    gq = gap_quantities(p)
    c = _binom2(p.k)
    bound = choose_exponent(c, gq.delta_max, gq.d_min)
    s = 1 + math.ceil(bound)
    with np.errstate(over="ignore", under="ignore"):
        T = float(c * np.power(np.float64(gq.d_min), -s))
    # separation C(k,2) D_min^-s < delta_max^-s, checked in D_min units
    with np.errstate(over="ignore"):
        if not c < float(np.power(np.float64(gq.d_min / gq.delta_max), s)):
            raise InvariantViolation("exponent choice failed to separate the distance classes")
    prov = {
        "D_min": gq.d_min,
        "delta_max": gq.delta_max,
        "realizing_pairs": {"D_min": list(gq.d_min_pair), "delta_max": list(gq.delta_max_pair)},
        "exponent_bound": bound,
        "s": s,
        "T": T,
        "log_T": math.log(c) - s * math.log(gq.d_min),
    }
    return ReductionOutput(p.metric(), p.k, float(s), T, prov)


def is_independent(p: PlanarInstance, subset) -> bool:
    d = p.metric().dist
    return all(d[a, b] >= p.delta for a, b in combinations(subset, 2))


@dataclass(frozen=True)
class GisCheck:
    s: float
    T: float
    independent_exists: bool
    decision: bool  # some k-subset has energy <= T
    equivalent: bool
    max_independent_energy: float  # in units of D_min**-s; <= C(k,2) means <= T
    min_dependent_energy: float  # same units
    separated: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def verify_gis_reduction(p: PlanarInstance, threads: int = 1) -> GisCheck:
    """Decide both sides exhaustively and check the energy separation.

    Energies are evaluated with distances in units of ``D_min`` so the
    threshold becomes the integer ``C(k,2)``: a sum of ``C(k,2)`` weights
    each at most 1 then compares to it without rounding error.
    """
    red = gis_to_rssp(p)
    gq = red.provenance
    m = red.instance
    c = _binom2(red.k)
    pv = pair_weights(m, red.s, unit=gq["D_min"])
    adm = m.dist >= p.delta
    max_ind, min_dep, min_all = -math.inf, math.inf, math.inf
    for combos, energies in iter_subset_values(m, red.k, pv, "sum"):
        ok = np.ones(len(combos), dtype=bool)
        for a, b in combinations(range(red.k), 2):
            ok &= adm[combos[:, a], combos[:, b]]
        min_all = min(min_all, float(energies.min()))
        if ok.any():
            max_ind = max(max_ind, float(energies[ok].max()))
        if (~ok).any():
            min_dep = min(min_dep, float(energies[~ok].min()))
    ind_exists = max_ind > -math.inf
    decision = min_all <= c
    separated = (not ind_exists or max_ind <= c) and c < min_dep
    return GisCheck(red.s, red.T, ind_exists, decision, decision == ind_exists, max_ind, min_dep, separated)


# -- large-s threshold -------------------------------------------------------


@dataclass(frozen=True)
class LargeS:
    s0: float
    d_star: float
    r: float  # best MPD among non-optimal subsets; -inf if none
    all_optimal: bool

    def to_dict(self) -> dict:
        return {"s0": self.s0, "D_star": self.d_star, "R": self.r, "all_optimal": self.all_optimal}


def large_s_threshold(m: MetricInstance, k: int, cap: int | None = None) -> LargeS:
    """Exponent beyond which every energy minimizer is MPD-optimal.

    ``D*`` is the best MPD over k-subsets and ``R`` the best MPD among
    subsets that miss it; ``s0 = log C(k,2) / (log D* - log R)``. When every
    k-subset attains ``D*``, ``s0 = 0`` and ``all_optimal`` is set.
    """
    if isinstance(k, bool) or int(k) != k or not 2 <= k <= m.n:
        raise InputError(f"k must be an integer in [2, {m.n}], got {k}")
    mm = mm_values(m, int(k), cap)
    d_star = float(mm.max())
    below = mm[mm < d_star]
    if below.size == 0:
        return LargeS(0.0, d_star, -math.inf, True)
    r = float(below.max())
    return LargeS(choose_exponent(_binom2(int(k)), r, d_star), d_star, r, False)


@dataclass(frozen=True)
class LargeSCheck:
    s: float
    minimizers: tuple
    minimizer_mpd: tuple
    d_star: float
    all_mpd_optimal: bool


def verify_large_s(m: MetricInstance, k: int, s: float, threads: int = 1) -> LargeSCheck:
    """Check that every brute-force E_s minimizer attains MPD ``D*``.

    Energies are evaluated in units of ``D*``, which keeps MPD-optimal
    subsets' energies in [1, C(k,2)] however large ``s`` is.
    """
    d_star = brute_force_mpd(m, k).optimum
    res = brute_force_riesz(m, k, s, unit=d_star, threads=threads)
    mpds = []
    for w in res.witnesses:
        sub = m.dist[np.ix_(w, w)]
        mpds.append(float(sub[np.triu_indices(len(w), 1)].min()))
    ok = all(math.isclose(x, d_star, rel_tol=REL_TOL) for x in mpds)
    return LargeSCheck(s, res.witnesses, tuple(mpds), d_star, ok)
