"""Ultrametric trees and the exact subset-selection dynamic program.

A tree is stored as an arena: node ``u`` has ``children[u]`` (empty for a
leaf), ``heights[u]`` (0 for a leaf) and ``labels[u]`` (``None`` for internal
nodes). Two leaves are at distance ``2 * height(lca)``. Leaves are indexed
by their left-to-right (depth-first) order, which is also the row order of
:func:`tree_to_metric`.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np

from .errors import InputError
from .metric import REL_TOL, MetricInstance, check_exponent, riesz_energy, ultrametric_violation


@dataclass(frozen=True)
class UltrametricTree:
    children: tuple
    heights: tuple
    labels: tuple
    root: int

    def __post_init__(self):
        n = len(self.children)
        if not (len(self.heights) == len(self.labels) == n) or not 0 <= self.root < n:
            raise InputError("inconsistent tree arena")
        seen = [False] * n
        stack = [self.root]
        while stack:
            u = stack.pop()
            if seen[u]:
                raise InputError(f"node {u} reachable twice")
            seen[u] = True
            kids = self.children[u]
            h = self.heights[u]
            if not kids:
                if self.labels[u] is None:
                    raise InputError(f"leaf {u} has no label")
                if h != 0:
                    raise InputError(f"leaf {self.labels[u]!r} has nonzero height {h}")
                continue
            if len(kids) < 2:
                raise InputError(f"internal node {u} has fewer than two children")
            if not (h > 0) or math.isinf(h):
                raise InputError(f"internal node {u} needs a positive finite height, got {h}")
            for c in kids:
                if self.heights[c] > h:
                    raise InputError(f"child height {self.heights[c]} exceeds parent height {h}")
                stack.append(c)
        if not all(seen):
            raise InputError("tree arena has unreachable nodes")
        names = [self.labels[u] for u in self.leaves]
        if len(set(names)) != len(names):
            raise InputError("leaf labels must be distinct")

    def is_leaf(self, u: int) -> bool:
        return not self.children[u]

    @cached_property
    def postorder(self) -> tuple:
        out, stack = [], [(self.root, False)]
        while stack:
            u, done = stack.pop()
            if done or not self.children[u]:
                out.append(u)
            else:
                stack.append((u, True))
                stack.extend((c, False) for c in reversed(self.children[u]))
        return tuple(out)

    @cached_property
    def leaves(self) -> tuple:
        """Leaf node ids in left-to-right order."""
        return tuple(u for u in self.postorder if not self.children[u])

    @property
    def leaf_labels(self) -> tuple:
        return tuple(self.labels[u] for u in self.leaves)

    @property
    def n_leaves(self) -> int:
        return len(self.leaves)

    @cached_property
    def leaf_ranges(self) -> dict:
        """Node id -> half-open range of leaf indices below it."""
        pos = {u: i for i, u in enumerate(self.leaves)}
        rng = {}
        for u in self.postorder:
            kids = self.children[u]
            rng[u] = (pos[u], pos[u] + 1) if not kids else (rng[kids[0]][0], rng[kids[-1]][1])
        return rng

    def internal_heights(self) -> list:
        return [h for u, h in enumerate(self.heights) if self.children[u]]


class _Builder:
    def __init__(self):
        self.children, self.heights, self.labels = [], [], []

    def leaf(self, label) -> int:
        return self._add((), 0.0, str(label))

    def node(self, kids, height) -> int:
        return self._add(tuple(kids), float(height), None)

    def _add(self, kids, h, label):
        self.children.append(kids)
        self.heights.append(h)
        self.labels.append(label)
        return len(self.children) - 1

    def build(self, root) -> UltrametricTree:
        """Freeze the nodes reachable from ``root``, renumbered in postorder."""
        ch, hs, ls = [], [], []
        new = {}
        stack = [(root, False)]
        while stack:
            u, done = stack.pop()
            kids = self.children[u]
            if kids and not done:
                stack.append((u, True))
                stack.extend((c, False) for c in reversed(kids))
                continue
            if u in new:
                raise InputError(f"node {u} reachable twice")
            ch.append(tuple(new[c] for c in kids))
            hs.append(self.heights[u])
            ls.append(self.labels[u])
            new[u] = len(ch) - 1
        return UltrametricTree(tuple(ch), tuple(hs), tuple(ls), new[root])


# -- parsing -----------------------------------------------------------------


def tree_from_dict(obj) -> UltrametricTree:
    """Build from ``{"height": h, "children": [...]}`` / ``{"leaf": name}``."""
    b = _Builder()
    # iterative postorder so deep caterpillars do not hit the recursion limit
    stack = [(obj, None)]
    built = {}
    while stack:
        o, kids_done = stack.pop()
        if not isinstance(o, dict):
            raise InputError(f"tree node must be an object, got {type(o).__name__}")
        if "leaf" in o:
            built[id(o)] = b.leaf(o["leaf"])
            continue
        if "children" not in o or "height" not in o:
            raise InputError('internal tree node needs "height" and "children"')
        kids = o["children"]
        if not isinstance(kids, list):
            raise InputError('"children" must be a list')
        if kids_done is None:
            stack.append((o, True))
            stack.extend((c, None) for c in reversed(kids))
        else:
            try:
                h = float(o["height"])
            except (TypeError, ValueError):
                raise InputError(f"bad height {o['height']!r}") from None
            built[id(o)] = b.node([built[id(c)] for c in kids], h)
    return b.build(built[id(obj)])


def tree_to_dict(t: UltrametricTree) -> dict:
    out = {}
    for u in t.postorder:
        if t.is_leaf(u):
            out[u] = {"leaf": t.labels[u]}
        else:
            out[u] = {"height": t.heights[u], "children": [out[c] for c in t.children[u]]}
    return out[t.root]


def parse_newick(text: str, tol: float = REL_TOL) -> UltrametricTree:
    """Parse Newick with branch lengths into an ultrametric tree.

    Heights are the root-to-deepest-leaf depth minus each node's depth; all
    leaves must sit at the same depth (relative tolerance ``tol``). Nodes
    with a single child are spliced out. Internal node names are ignored.
    """
    text = text.strip()
    if not text.endswith(";"):
        raise InputError("Newick string must end with ';'")
    body = text[:-1]
    # node record: [children, label, length]
    frames = [[]]
    pending = None
    i, n = 0, len(body)

    def read_name(i):
        if i < n and body[i] == "'":
            j = body.find("'", i + 1)
            if j < 0:
                raise InputError("unterminated quoted label")
            return body[i + 1:j], j + 1
        j = i
        while j < n and body[j] not in "(),:;" and not body[j].isspace():
            j += 1
        return body[i:j], j

    while i < n:
        c = body[i]
        if c.isspace():
            i += 1
        elif c == "(":
            if pending is not None:
                raise InputError(f"unexpected '(' at offset {i}")
            frames.append([])
            i += 1
        elif c == ",":
            if pending is None or len(frames) < 2:
                raise InputError(f"unexpected ',' at offset {i}")
            frames[-1].append(pending)
            pending = None
            i += 1
        elif c == ")":
            if pending is None or len(frames) < 2:
                raise InputError(f"unexpected ')' at offset {i}")
            frames[-1].append(pending)
            pending = [frames.pop(), None, None]
            i += 1
            name, i = read_name(i)  # internal label, discarded
        elif c == ":":
            if pending is None or pending[2] is not None:
                raise InputError(f"unexpected ':' at offset {i}")
            j = i + 1
            while j < n and body[j] not in "(),:;" and not body[j].isspace():
                j += 1
            try:
                pending[2] = float(body[i + 1:j])
            except ValueError:
                raise InputError(f"bad branch length {body[i + 1:j]!r}") from None
            if pending[2] < 0 or math.isnan(pending[2]):
                raise InputError(f"negative branch length {pending[2]}")
            i = j
        else:
            if pending is not None:
                raise InputError(f"unexpected label at offset {i}")
            name, i = read_name(i)
            if not name:
                raise InputError(f"empty leaf label at offset {i}")
            pending = [[], name, None]
    if len(frames) != 1 or frames[0] or pending is None:
        raise InputError("unbalanced parentheses in Newick string")
    root = pending

    # depths, splicing unary nodes on the way
    depth = {}
    order = []
    stack = [(root, 0.0, True)]
    while stack:
        node, d, is_root = stack.pop()
        if not is_root:
            if node[2] is None:
                raise InputError("every non-root branch needs a length")
            d += node[2]
        while len(node[0]) == 1:
            child = node[0][0]
            if child[2] is None:
                raise InputError("every non-root branch needs a length")
            d += child[2]
            node = child
        depth[id(node)] = d
        order.append(node)
        stack.extend((c, d, False) for c in reversed(node[0]))
    leaf_depths = [depth[id(x)] for x in order if not x[0]]
    top = max(leaf_depths)
    for ld in leaf_depths:
        if not math.isclose(ld, top, rel_tol=tol, abs_tol=tol):
            raise InputError(f"tree is not ultrametric: leaf depths {min(leaf_depths)} and {top} differ")

    b = _Builder()
    built = {}
    for node in reversed(order):
        if not node[0]:
            built[id(node)] = b.leaf(node[1])
        else:
            kids = []
            for c in node[0]:
                while len(c[0]) == 1:
                    c = c[0][0]
                kids.append(built[id(c)])
            h = top - depth[id(node)]
            if math.isclose(h, 0.0, abs_tol=tol * max(top, 1.0)):
                raise InputError("internal node at zero height (coincident leaves)")
            built[id(node)] = b.node(kids, h)
    # leaves are exactly height 0; clamp internal heights against leaf jitter
    return _clamp(b.build(built[id(root)]))


def _clamp(t: UltrametricTree) -> UltrametricTree:
    heights = list(t.heights)
    for u in t.postorder:
        if t.children[u]:
            heights[u] = max([heights[u]] + [heights[c] for c in t.children[u]])
    return UltrametricTree(t.children, tuple(heights), t.labels, t.root)


def parse_tree(text: str) -> UltrametricTree:
    """Parse the JSON tree format or Newick (detected by the first character)."""
    if text.lstrip().startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise InputError(f"invalid JSON: {e}") from None
        return tree_from_dict(obj)
    return parse_newick(text)


# -- metric conversions ------------------------------------------------------


def tree_to_metric(t: UltrametricTree) -> MetricInstance:
    """Leaf distance matrix, ``d = 2 * height(lca)``, rows in leaf order."""
    n = t.n_leaves
    d = np.zeros((n, n))
    rng = t.leaf_ranges
    for u in t.postorder:
        kids = t.children[u]
        for a in range(len(kids)):
            lo_a, hi_a = rng[kids[a]]
            for b in range(a + 1, len(kids)):
                lo_b, hi_b = rng[kids[b]]
                d[lo_a:hi_a, lo_b:hi_b] = 2.0 * t.heights[u]
                d[lo_b:hi_b, lo_a:hi_a] = 2.0 * t.heights[u]
    return MetricInstance(t.leaf_labels, d)


def build_tree_from_matrix(m: MetricInstance, tol: float = REL_TOL) -> UltrametricTree:
    """Reconstruct the tree of an ultrametric by repeatedly merging closest clusters.

    Consecutive merges at the same height are collapsed into one multiway
    node, so the result is the canonical (non-binarized) tree.
    """
    if m.n == 0:
        raise InputError("empty metric")
    w = ultrametric_violation(m, tol)
    if w is not None:
        i, j, k = w
        raise InputError(
            f"matrix is not ultrametric: triple {w} has distances "
            f"{m.dist[i, j]}, {m.dist[j, k]}, {m.dist[i, k]}",
        )
    b = _Builder()
    clusters = [(b.leaf(lab), [i]) for i, lab in enumerate(m.labels)]
    d = m.dist.copy()
    np.fill_diagonal(d, np.inf)
    active = list(range(m.n))
    # cluster distance = distance between representatives (all cross distances are equal)
    while len(active) > 1:
        sub = d[np.ix_(active, active)]
        a, c = np.unravel_index(np.argmin(sub), sub.shape)
        a, c = sorted((active[a], active[c]))
        h = d[a, c] / 2.0
        node_a, mem_a = clusters[a]
        node_c, mem_c = clusters[c]
        kids = []
        for x in (node_a, node_c):
            # absorb same-height children into a multiway node
            if b.children[x] and math.isclose(b.heights[x], h, rel_tol=tol):
                kids.extend(b.children[x])
            else:
                kids.append(x)
        new = b.node(kids, h)
        clusters[a] = (new, mem_a + mem_c)
        active.remove(c)
    return b.build(clusters[active[0]][0])


def binarize(t: UltrametricTree) -> UltrametricTree:
    """Left-comb every multiway node into binary nodes at the same height.

    Leaf order and the induced metric are unchanged.
    """
    b = _Builder()
    new = {}
    for u in t.postorder:
        if t.is_leaf(u):
            new[u] = b.leaf(t.labels[u])
            continue
        kids = [new[c] for c in t.children[u]]
        acc = b.node(kids[:2], t.heights[u])
        for c in kids[2:]:
            acc = b.node([acc, c], t.heights[u])
        new[u] = acc
    return b.build(new[t.root])


# -- dynamic program ---------------------------------------------------------


def _power(x: float, e: float) -> float:
    with np.errstate(over="ignore", under="ignore"):
        return float(np.power(np.float64(x), e))


@dataclass(frozen=True)
class EnergyTable:
    """Per-node DP tables on the binarized tree.

    ``values[u][t]`` is the minimum energy of a ``t``-subset below node
    ``u`` in *normalized* units (minimum leaf distance 1); multiply by
    ``unit_energy`` to get original units. ``splits[u][t]`` is the number of
    points taken from the left child (smallest such count among exact
    ties), or -1 for leaves and infeasible cells.
    """

    tree: UltrametricTree
    k: int
    s: float
    values: tuple
    splits: tuple
    unit_energy: float

    def value(self, u: int, t: int) -> float:
        return float(self.values[u][t]) * self.unit_energy

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["node", "t", "F", "split"])
        for u in self.tree.postorder:
            for t in range(self.k + 1):
                w.writerow([u, t, repr(self.value(u, t)), int(self.splits[u][t])])
        return buf.getvalue()


@dataclass(frozen=True)
class UltrametricSolution:
    energy: float
    subset: tuple  # leaf indices, increasing
    labels: tuple
    table: EnergyTable


def solve_ultrametric(t: UltrametricTree, k: int, s: float) -> UltrametricSolution:
    """Minimum Riesz s-energy k-subset of the leaves, in O(n k^2) time.

    The tree is binarized first. Node tables are filled in postorder with
    ``F_u(t) = min F_v(a) + F_w(t - a) + a (t - a) Delta_u**-s``. Among
    optimal subsets (relative tolerance 1e-9) the lexicographically smallest
    leaf-index set is returned.
    """
    s = check_exponent(s)
    n = t.n_leaves
    if isinstance(k, bool) or int(k) != k or not 1 <= k <= n:
        raise InputError(f"k must be an integer in [1, {n}], got {k}")
    k = int(k)
    bt = binarize(t)
    inner = bt.internal_heights()
    unit = 2.0 * min(inner) if inner else 1.0

    nodes = len(bt.children)
    values = [None] * nodes
    splits = [None] * nodes
    size = [0] * nodes
    for u in bt.postorder:
        F = np.full(k + 1, np.inf)
        sp = np.full(k + 1, -1, dtype=int)
        if bt.is_leaf(u):
            size[u] = 1
            F[:2] = 0.0
        else:
            v, w = bt.children[u]
            size[u] = size[v] + size[w]
            cross = _power(2.0 * bt.heights[u] / unit, -s)
            Fv, Fw = values[v], values[w]
            for tt in range(min(k, size[u]) + 1):
                lo, hi = max(0, tt - size[w]), min(tt, size[v])
                a = np.arange(lo, hi + 1)
                cand = Fv[a] + Fw[tt - a] + a * (tt - a) * cross
                j = int(np.argmin(cand))
                F[tt] = cand[j]
                sp[tt] = a[j]
        F.setflags(write=False)
        sp.setflags(write=False)
        values[u], splits[u] = F, sp

    unit_energy = _power(unit, -s)
    table = EnergyTable(bt, k, s, tuple(values), tuple(splits), unit_energy)
    subset = _lexmin_witness(bt, values, size, k, s, unit)
    energy = float(values[bt.root][k]) * unit_energy
    return UltrametricSolution(energy, subset, tuple(bt.leaf_labels[i] for i in subset), table)


def _lexmin_witness(bt, values, size, k, s, unit) -> tuple:
    """Lexicographically smallest optimal leaf set for (root, k)."""
    pos = {u: i for i, u in enumerate(bt.leaves)}
    memo = {}
    stack = [(bt.root, k)]
    while stack:
        u, tt = stack[-1]
        if (u, tt) in memo:
            stack.pop()
            continue
        if bt.is_leaf(u):
            memo[(u, tt)] = (pos[u],) if tt == 1 else ()
            stack.pop()
            continue
        v, w = bt.children[u]
        cross = _power(2.0 * bt.heights[u] / unit, -s)
        best = values[u][tt]
        lo, hi = max(0, tt - size[w]), min(tt, size[v])
        ties = [
            a for a in range(lo, hi + 1)
            if values[v][a] + values[w][tt - a] + a * (tt - a) * cross <= best * (1 + REL_TOL)
        ]
        missing = [st for a in ties for st in ((v, a), (w, tt - a)) if st not in memo]
        if missing:
            stack.extend(missing)
            continue
        memo[(u, tt)] = min(memo[(v, a)] + memo[(w, tt - a)] for a in ties)
        stack.pop()
    return memo[(bt.root, k)]


def cross_term_check(t: UltrametricTree, A: Iterable[int], B: Iterable[int], s: float):
    """Compare ``E(A u B)`` with ``E(A) + E(B) + |A||B| Delta_u**-s``.

    ``A`` and ``B`` are leaf-index sets lying below two different children
    of a common node ``u``. Returns ``(direct, decomposed, abs difference)``.
    """
    s = check_exponent(s)
    m = tree_to_metric(t)
    A = sorted(set(int(i) for i in A))
    B = sorted(set(int(i) for i in B))
    if set(A) & set(B):
        raise InputError("A and B must be disjoint")
    for i in A + B:
        if not 0 <= i < t.n_leaves:
            raise InputError(f"leaf index {i} out of range")
    direct = riesz_energy(m, A + B, s)
    if not A or not B:
        dec = riesz_energy(m, A, s) + riesz_energy(m, B, s)
        return direct, dec, abs(direct - dec)
    rng = t.leaf_ranges
    lo, hi = min(A + B), max(A + B) + 1
    # deepest node whose leaf range covers A u B is the LCA
    u = t.root
    while True:
        nxt = [c for c in t.children[u] if rng[c][0] <= lo and hi <= rng[c][1]]
        if not nxt:
            break
        u = nxt[0]

    def child_of(xs):
        for c in t.children[u]:
            if all(rng[c][0] <= x < rng[c][1] for x in xs):
                return c
        return None

    ca, cb = child_of(A), child_of(B)
    if ca is None or cb is None or ca == cb:
        raise InputError("A and B do not lie under sibling subtrees of a common node")
    delta = 2.0 * t.heights[u]
    dec = riesz_energy(m, A, s) + riesz_energy(m, B, s) + len(A) * len(B) * _power(delta, -s)
    return direct, dec, abs(direct - dec)


def random_binary_tree(n: int, rng: np.random.Generator, heights=None) -> UltrametricTree:
    """Random rooted binary ultrametric tree on leaves ``x0 .. x{n-1}``.

    Clusters are merged in random order; each merge height is the larger
    child height plus an Exp(1) increment, or, if ``heights`` is given, a
    value drawn from that sorted pool that is at least the child heights.
    """
    b = _Builder()
    pool = [(b.leaf(f"x{i}"), 0.0) for i in range(n)]
    while len(pool) > 1:
        i, j = sorted(rng.choice(len(pool), size=2, replace=False).tolist())
        (u, hu), (v, hv) = pool[i], pool[j]
        base = max(hu, hv)
        if heights is None:
            h = base + float(rng.exponential(1.0)) + 1e-3
        else:
            ok = [x for x in heights if x >= base and x > 0]
            if not ok:
                raise InputError("height pool exhausted")
            h = float(ok[int(rng.integers(len(ok)))])
        pool[i] = (b.node([u, v], h), h)
        pool.pop(j)
    return b.build(pool[0][0])
