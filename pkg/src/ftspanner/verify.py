"""Brute-force certification of stretch, fault tolerance, connectivity and weight."""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra, maximum_flow
from scipy.spatial.distance import cdist

from .spanner import SpannerGraph

DEFAULT_BUDGET = 1_000_000


@dataclass
class VerificationReport:
    stretch: float
    max_degree: int
    edge_count: int
    weight: float
    emst_weight: float
    weight_ratio: float
    vfts_ok: bool
    vfts_mode: str
    worst_pair: tuple[int, int] | None = None
    worst_fault_set: list[int] = field(default_factory=list)
    frame_size: int | None = None

    def to_dict(self) -> dict:
        out = asdict(self)
        out["worst_pair"] = list(self.worst_pair) if self.worst_pair else None
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), default=_json_float)


def _json_float(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    raise TypeError(type(x))


def weighted_csr(g: SpannerGraph, points: np.ndarray, keep: np.ndarray | None = None) -> csr_matrix:
    """Symmetric length-weighted adjacency, optionally restricted to ``keep``."""
    e = g.edges
    w = g.lengths(points)
    n = g.n
    if keep is not None:
        mask = keep[e[:, 0]] & keep[e[:, 1]]
        e, w = e[mask], w[mask]
    rows = np.concatenate([e[:, 0], e[:, 1]])
    cols = np.concatenate([e[:, 1], e[:, 0]])
    return csr_matrix((np.concatenate([w, w]), (rows, cols)), shape=(n, n))


def _worst(ratio: np.ndarray, rows: np.ndarray) -> tuple[float, tuple[int, int] | None]:
    if ratio.size == 0:
        return 1.0, None
    flat = int(np.argmax(ratio))
    i, j = divmod(flat, ratio.shape[1])
    return float(ratio[i, j]), (int(rows[i]), int(j))


def stretch_factor(g: SpannerGraph, points, sources: np.ndarray | None = None,
                   chunk: int = 256) -> tuple[float, tuple[int, int] | None]:
    """Largest graph-over-Euclidean distance ratio and the pair attaining it.

    Disconnected pairs give ``inf``. Ties resolve to the lexicographically
    smallest pair.
    """
    pts = np.asarray(points, dtype=np.float64)
    n = g.n
    if n < 2:
        return 1.0, None
    graph = weighted_csr(g, pts)
    src = np.arange(n) if sources is None else np.asarray(sources)
    best, witness = -math.inf, None
    for s in range(0, len(src), chunk):
        rows = src[s:s + chunk]
        dist = dijkstra(graph, directed=False, indices=rows)
        eu = cdist(pts[rows], pts)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = dist / eu
        # only i < j so the witness is an ordered pair
        ratio[np.arange(n)[None, :] <= rows[:, None]] = -math.inf
        val, pair = _worst(ratio, rows)
        if val > best:
            best, witness = val, pair
    return max(best, 1.0), witness


def floyd_warshall_stretch(g: SpannerGraph, points) -> float:
    """Stretch via dense Floyd-Warshall; an independent check for small n."""
    pts = np.asarray(points, dtype=np.float64)
    n = g.n
    if n < 2:
        return 1.0
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0.0)
    w = g.lengths(pts)
    dist[g.edges[:, 0], g.edges[:, 1]] = w
    dist[g.edges[:, 1], g.edges[:, 0]] = w
    for k in range(n):
        np.minimum(dist, dist[:, k:k + 1] + dist[k:k + 1, :], out=dist)
    eu = cdist(pts, pts)
    iu = np.triu_indices(n, 1)
    return float(max(1.0, (dist[iu] / eu[iu]).max()))


def _fault_stretch(g: SpannerGraph, pts: np.ndarray, faults) -> float:
    """Stretch of ``G - faults`` by all-pairs Dijkstra from scratch."""
    keep = np.ones(g.n, dtype=bool)
    keep[list(faults)] = False
    alive = np.flatnonzero(keep)
    if alive.size < 2:
        return 1.0
    graph = weighted_csr(g, pts, keep)[alive][:, alive]
    dist = dijkstra(graph, directed=False)
    eu = cdist(pts[alive], pts[alive])
    iu = np.triu_indices(alive.size, 1)
    return float((dist[iu] / eu[iu]).max())


class FaultStretch:
    """Stretch of ``G - F`` for many fault sets ``F``.

    Deleting vertices never shortens a path, so a source whose shortest-path
    tree avoids ``F`` keeps its distances; only the other sources are rerun.
    """

    def __init__(self, g: SpannerGraph, pts: np.ndarray):
        self.g, self.pts, self.n = g, pts, g.n
        self.graph = weighted_csr(g, pts)
        dist, pred = dijkstra(self.graph, directed=False, return_predecessors=True)
        self.eu = cdist(pts, pts)
        np.fill_diagonal(self.eu, 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            self.ratio = dist / self.eu
        np.fill_diagonal(self.ratio, 1.0)
        # uses[s, f]: f is an inner vertex of the shortest-path tree from s
        self.uses = np.zeros((self.n, self.n), dtype=bool)
        rows, cols = np.nonzero(pred >= 0)
        self.uses[rows, pred[rows, cols]] = True
        self.uses[np.arange(self.n), np.arange(self.n)] = False

    def __call__(self, faults) -> float:
        if self.n - len(faults) < 2:
            return 1.0
        f = list(faults)
        if not f:
            return float(self.ratio.max())
        keep = np.ones(self.n, dtype=bool)
        keep[f] = False
        hit = keep & self.uses[:, f].any(axis=1)
        calm = keep & ~hit
        worst = self.ratio[np.ix_(calm, keep)].max() if calm.any() else 1.0
        src = np.flatnonzero(hit)
        if src.size:
            graph = weighted_csr(self.g, self.pts, keep)
            dist = dijkstra(graph, directed=False, indices=src)
            with np.errstate(divide="ignore", invalid="ignore"):
                r = dist[:, keep] / self.eu[np.ix_(src, keep)]
            r[src[:, None] == np.flatnonzero(keep)[None, :]] = 1.0
            worst = max(worst, r.max())
        return float(max(worst, 1.0))


def fault_set_count(n: int, k: int) -> int:
    return sum(math.comb(n, j) for j in range(min(k, n) + 1))


def verify_vfts(g: SpannerGraph, points, t: float, k: int, budget: int = DEFAULT_BUDGET,
                seed: int = 0) -> tuple[bool, dict]:
    """Check the stretch bound on ``G - F`` for fault sets ``|F| <= k``.

    Enumerates all fault sets (smallest first, then lexicographically) when
    there are at most ``budget`` of them, otherwise draws ``budget`` random
    ones. The witness is the first failing set found.
    """
    pts = np.asarray(points, dtype=np.float64)
    n = g.n
    total = fault_set_count(n, k)
    if total <= budget:
        mode = "exhaustive"
        sets = itertools.chain.from_iterable(
            itertools.combinations(range(n), j) for j in range(min(k, n) + 1))
    else:
        mode = "sampled"
        rng = np.random.default_rng(seed)

        def draws():
            for _ in range(budget):
                size = int(rng.integers(0, k + 1))
                yield tuple(sorted(rng.choice(n, size=size, replace=False).tolist()))
        sets = draws()
    stretch_without = FaultStretch(g, pts)
    worst, checked = 1.0, 0
    for faults in sets:
        s = stretch_without(faults)
        checked += 1
        worst = max(worst, s)
        if not s <= t:
            return False, {"mode": mode, "fault_set": list(faults), "stretch": s,
                           "checked": checked}
    return True, {"mode": mode, "fault_set": [], "stretch": worst, "checked": checked}


def vertex_disjoint_path_count(g: SpannerGraph, u: int, v: int) -> int:
    """Internally vertex-disjoint ``u``-``v`` paths via unit vertex capacities.

    Adjacent pairs return ``n``: the edge itself survives any fault set.
    """
    if u == v:
        raise ValueError("u and v must differ")
    n = g.n
    e = g.edges
    if e.size and np.any(((e[:, 0] == u) & (e[:, 1] == v)) | ((e[:, 0] == v) & (e[:, 1] == u))):
        return n
    big = n + 1
    # node i splits into in = 2i and out = 2i + 1
    inner = np.full(n, 1, dtype=np.int32)
    inner[[u, v]] = big
    rows = [2 * np.arange(n), 2 * e[:, 0] + 1, 2 * e[:, 1] + 1]
    cols = [2 * np.arange(n) + 1, 2 * e[:, 1], 2 * e[:, 0]]
    caps = [inner, np.full(len(e), big, np.int32), np.full(len(e), big, np.int32)]
    cap = csr_matrix((np.concatenate(caps), (np.concatenate(rows), np.concatenate(cols))),
                     shape=(2 * n, 2 * n))
    cap.sum_duplicates()
    return int(maximum_flow(cap, 2 * u + 1, 2 * v).flow_value)


def min_disjoint_paths(g: SpannerGraph, pairs=None) -> tuple[int, tuple[int, int] | None]:
    """Smallest disjoint-path count over non-adjacent pairs (all by default)."""
    adj = g.edge_set()
    best, witness = g.n, None
    if pairs is None:
        pairs = itertools.combinations(range(g.n), 2)
    for a, b in pairs:
        if (min(a, b), max(a, b)) in adj:
            continue
        c = vertex_disjoint_path_count(g, a, b)
        if c < best:
            best, witness = c, (a, b)
    return best, witness


def emst_weight(points) -> float:
    """Euclidean MST length by dense Prim."""
    pts = np.asarray(points, dtype=np.float64)
    n = pts.shape[0]
    if n < 2:
        return 0.0
    done = np.zeros(n, dtype=bool)
    best = np.full(n, np.inf)
    best[0] = 0.0
    total = 0.0
    for _ in range(n):
        cand = np.where(done, np.inf, best)
        i = int(np.argmin(cand))
        total += cand[i]
        done[i] = True
        d = np.sqrt(((pts - pts[i]) ** 2).sum(axis=1))
        np.minimum(best, d, out=best)
    return float(total)


def emst_weight_kruskal(points) -> float:
    """Euclidean MST length by Kruskal with union-find."""
    pts = np.asarray(points, dtype=np.float64)
    n = pts.shape[0]
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    iu = np.triu_indices(n, 1)
    w = np.sqrt(((pts[iu[0]] - pts[iu[1]]) ** 2).sum(axis=1))
    total, used = 0.0, 0
    for idx in np.argsort(w, kind="stable"):
        a, b = find(int(iu[0][idx])), find(int(iu[1][idx]))
        if a != b:
            parent[a] = b
            total += float(w[idx])
            used += 1
            if used == n - 1:
                break
    return total


def full_report(g: SpannerGraph, points, t: float, k: int = 0,
                budget: int = DEFAULT_BUDGET) -> VerificationReport:
    pts = np.asarray(points, dtype=np.float64)
    stretch, pair = stretch_factor(g, pts)
    weight = g.weight(pts)
    emst = emst_weight(pts)
    if k == 0:
        ok, info = stretch <= t, {"mode": "exhaustive", "fault_set": []}
    else:
        ok, info = verify_vfts(g, pts, t, k, budget)
    return VerificationReport(
        stretch=stretch, max_degree=g.max_degree(), edge_count=g.edge_count,
        weight=weight, emst_weight=emst, weight_ratio=weight / emst if emst > 0 else 1.0,
        vfts_ok=bool(ok), vfts_mode=info["mode"], worst_pair=pair,
        worst_fault_set=info["fault_set"], frame_size=g.meta.get("frame_size"))
