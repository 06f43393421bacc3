"""Finite metric spaces, Riesz s-energy and minimum pairwise distance."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError

REL_TOL = 1e-9


def check_exponent(s) -> float:
    s = float(s)
    if not s > 0 or math.isinf(s):
        raise InputError(f"exponent s must be a positive finite real, got {s}")
    return s


@dataclass(frozen=True)
class MetricInstance:
    """A finite point set given by labels and a square distance matrix.

    The matrix is stored read-only. Metric axioms are *not* checked on
    construction; call :func:`validate_metric` for user-supplied data.
    """

    labels: tuple
    dist: np.ndarray

    def __post_init__(self):
        d = np.array(self.dist, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise InputError(f"distance matrix must be square, got shape {d.shape}")
        labels = tuple(str(x) for x in self.labels)
        if len(labels) != d.shape[0]:
            raise InputError(f"{len(labels)} labels for a {d.shape[0]}x{d.shape[0]} matrix")
        if len(set(labels)) != len(labels):
            raise InputError("labels must be distinct")
        d.setflags(write=False)
        object.__setattr__(self, "dist", d)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_matrix(cls, dist, labels=None) -> MetricInstance:
        d = np.asarray(dist, dtype=float)
        if labels is None:
            labels = [str(i) for i in range(len(d))]
        return cls(tuple(labels), d)

    @classmethod
    def from_points(cls, points, labels=None) -> MetricInstance:
        """Euclidean metric on the rows of ``points``."""
        p = np.asarray(points, dtype=float)
        if p.ndim == 1:
            p = p[:, None]
        diff = p[:, None, :] - p[None, :, :]
        return cls.from_matrix(np.sqrt((diff ** 2).sum(axis=-1)), labels)

    @property
    def n(self) -> int:
        return len(self.labels)

    def index_of(self, label) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise InputError(f"unknown label {label!r}") from None

    def min_distance(self) -> float:
        """Smallest off-diagonal distance (``inf`` for fewer than two points)."""
        if self.n < 2:
            return math.inf
        iu = np.triu_indices(self.n, 1)
        return float(self.dist[iu].min())

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "dist": self.dist.tolist()}


def as_subset(m: MetricInstance, sub: Iterable[int]) -> tuple:
    """Normalize ``sub`` to a strictly increasing tuple of valid indices."""
    idx = sorted(int(i) for i in sub)
    for i in idx:
        if not 0 <= i < m.n:
            raise InputError(f"index {i} out of range for {m.n} points")
    if len(set(idx)) != len(idx):
        raise InputError("subset indices must be distinct")
    return tuple(idx)


def riesz_energy(m: MetricInstance, sub: Iterable[int], s: float) -> float:
    """Sum of ``d(u, v)**-s`` over unordered pairs of ``sub``; 0 for |sub| <= 1."""
    s = check_exponent(s)
    idx = as_subset(m, sub)
    if len(idx) < 2:
        return 0.0
    d = m.dist[np.ix_(idx, idx)]
    iu = np.triu_indices(len(idx), 1)
    return math.fsum((d[iu] ** -s).tolist())


def mpd(m: MetricInstance, sub: Iterable[int]) -> float:
    """Minimum pairwise distance of ``sub``; ``inf`` for |sub| <= 1."""
    idx = as_subset(m, sub)
    if len(idx) < 2:
        return math.inf
    d = m.dist[np.ix_(idx, idx)]
    iu = np.triu_indices(len(idx), 1)
    return float(d[iu].min())


@dataclass(frozen=True)
class Violation:
    axiom: str  # "symmetry" | "zero-diagonal" | "positivity" | "triangle"
    witness: tuple
    detail: str

    def to_dict(self) -> dict:
        return {"axiom": self.axiom, "witness": list(self.witness), "detail": self.detail}


def validate_metric(m, tol: float = REL_TOL) -> list[Violation]:
    """Return every violated metric axiom; an empty list means ``m`` is a metric.

    Triangle witnesses are ``(i, j, k)`` with ``d[i][k] > d[i][j] + d[j][k]``,
    reported once per unordered endpoint pair (``i < k``). O(n^3).
    """
    d = m.dist if isinstance(m, MetricInstance) else np.asarray(m, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise InputError(f"distance matrix must be square, got shape {d.shape}")
    n = d.shape[0]
    out = []
    for i in range(n):
        if d[i, i] != 0:
            out.append(Violation("zero-diagonal", (i,), f"d[{i}][{i}] = {d[i, i]}"))
    for i in range(n):
        for j in range(i + 1, n):
            if not math.isclose(d[i, j], d[j, i], rel_tol=tol, abs_tol=0.0):
                out.append(Violation("symmetry", (i, j), f"d[{i}][{j}] = {d[i, j]} != d[{j}][{i}] = {d[j, i]}"))
            if not (d[i, j] > 0 and d[j, i] > 0):
                out.append(Violation("positivity", (i, j), f"d[{i}][{j}] = {d[i, j]}"))
    for j in range(n):
        via = d[:, j][:, None] + d[j, :][None, :]
        bad = d > via * (1 + tol)
        for i, k in zip(*np.nonzero(bad)):
            if i < k and i != j and k != j:
                out.append(
                    Violation(
                        "triangle",
                        (int(i), j, int(k)),
                        f"d[{i}][{k}] = {d[i, k]} > d[{i}][{j}] + d[{j}][{k}] = {via[i, k]}",
                    )
                )
    out.sort(key=lambda v: (v.axiom != "zero-diagonal", v.axiom, v.witness))
    return out


def ultrametric_violation(m: MetricInstance, tol: float = REL_TOL):
    """First triple ``(i, j, k)`` whose two largest distances differ, else ``None``."""
    d = m.dist
    for j in range(m.n):
        bound = np.maximum(d[:, j][:, None], d[j, :][None, :])
        bad = d > bound * (1 + tol)
        bad[j, :] = bad[:, j] = False
        hits = np.argwhere(bad)
        if len(hits):
            i, k = hits[0]
            return tuple(sorted((int(i), j, int(k))))
    return None


def rescale(m: MetricInstance, lam: float) -> MetricInstance:
    """Multiply every distance by ``lam``; energies scale by ``lam**-s``."""
    lam = float(lam)
    if not lam > 0 or math.isinf(lam):
        raise InputError(f"scale factor must be positive and finite, got {lam}")
    return MetricInstance(m.labels, m.dist * lam)


def pair_weights(m: MetricInstance, s: float, unit: float | None = None) -> np.ndarray:
    """Matrix of ``(d / unit)**-s`` with a zero diagonal.

    ``unit`` defaults to the minimum distance, so every weight lies in (0, 1]
    and large exponents cannot overflow.
    """
    s = check_exponent(s)
    if unit is None:
        unit = m.min_distance()
        if math.isinf(unit):
            unit = 1.0
    w = np.zeros((m.n, m.n))
    off = ~np.eye(m.n, dtype=bool)
    with np.errstate(over="ignore", under="ignore"):
        w[off] = (m.dist[off] / unit) ** -s
    return w


# -- serialization -----------------------------------------------------------


def metric_from_json(obj) -> MetricInstance:
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        dist = obj["dist"]
    except (KeyError, TypeError):
        raise InputError('metric JSON needs a "dist" matrix') from None
    labels = obj.get("labels")
    try:
        return MetricInstance.from_matrix(dist, labels)
    except (TypeError, ValueError) as e:
        if isinstance(e, InputError):
            raise
        raise InputError(f"bad distance matrix: {e}") from None


def metric_from_csv(text: str) -> MetricInstance:
    """CSV with a header row of labels followed by the matrix rows."""
    rows = [r for r in csv.reader(io.StringIO(text)) if any(c.strip() for c in r)]
    if not rows:
        raise InputError("empty CSV")
    labels = [c.strip() for c in rows[0]]
    try:
        dist = [[float(c) for c in r] for r in rows[1:]]
    except ValueError as e:
        raise InputError(f"bad CSV number: {e}") from None
    if any(len(r) != len(labels) for r in dist):
        raise InputError("CSV rows must match the header length")
    return MetricInstance.from_matrix(np.array(dist).reshape(len(dist), len(labels)), labels)


def metric_to_csv(m: MetricInstance) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(m.labels)
    for row in m.dist.tolist():
        w.writerow([repr(x) for x in row])
    return buf.getvalue()


def load_metric(text: str) -> MetricInstance:
    """Parse either the JSON or the CSV metric format."""
    if text.lstrip().startswith("{"):
        try:
            return metric_from_json(json.loads(text))
        except json.JSONDecodeError as e:
            raise InputError(f"invalid JSON: {e}") from None
    return metric_from_csv(text)


def subset_labels(m: MetricInstance, sub: Sequence[int]) -> list:
    return [m.labels[i] for i in sub]
