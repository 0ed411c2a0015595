"""Empirical check of geodesic richness relative to a finite geodesic pool.

Condition 1 asks, for every far pair ``(p, q)``, for a pool geodesic passing
near ``p`` that stays as far from ``q`` as ``p`` is. Condition 2 asks, for
every target geodesic ``g`` and point ``p``, for a pool geodesic passing near
``p`` whose distance to ``g`` matches ``d(p, g)``. Residuals are reported per
record; the fitted constants are their maxima. A verdict of "rich" is sound;
"not rich" only says the pool has no witness.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .graph_spaces import GeodesicSegment, Graph, canonical_geodesic
from .metric_core import as_space

MAX_RECORDS = 10_000
MAX_POOL = 2_000


@dataclass(frozen=True)
class PairRecord:
    p: int
    q: int
    geodesic: int          # index into the pool
    r1: int                # d(p, geodesic)
    r2: int                # | d(q, geodesic) - d(p, q) |


@dataclass(frozen=True)
class PointRecord:
    target: int            # pool index of the geodesic being approached
    p: int
    geodesic: int          # pool index of the witness
    r3: int                # d(p, witness)
    r4: int                # | d(p, target) - d(witness, target) |


@dataclass
class RichnessReport:
    r0: int
    pool: list[tuple[int, int]]
    condition1: list[PairRecord]
    condition2: list[PointRecord]
    fitted: dict[str, int]
    thresholds: dict[str, float]
    rich: bool
    violations: list[dict] = field(default_factory=list)
    sampled: dict[str, bool] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "r0": self.r0,
            "pool": [list(e) for e in self.pool],
            "fitted": self.fitted,
            "thresholds": self.thresholds,
            "verdict": "rich" if self.rich else "not-rich",
            "violations": self.violations,
            "sampled": self.sampled,
            "condition1": [asdict(r) for r in self.condition1],
            "condition2": [asdict(r) for r in self.condition2],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def constants_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r0", "r1", "r2", "r3", "r4", "verdict"])
        w.writerow([self.r0, self.fitted["r1"], self.fitted["r2"], self.fitted["r3"],
                    self.fitted["r4"], "rich" if self.rich else "not-rich"])
        return buf.getvalue()


def geodesic_pool(graph: Graph, endpoints, max_pool: int | None = None,
                  seed: int = 0) -> list[GeodesicSegment]:
    """Canonical geodesics between pairs of distinct ``endpoints``.

    All pairs are used unless there are more than ``max_pool``; then a seeded
    uniform sample of that many pairs is taken.
    """
    ends = sorted(set(int(e) for e in endpoints))
    pairs = list(itertools.combinations(ends, 2))
    if max_pool is not None and len(pairs) > max_pool:
        pick, _ = _choose(len(pairs), max_pool, seed)
        pairs = [pairs[i] for i in pick]
    return [canonical_geodesic(graph, u, v) for u, v in pairs]


def _pool_distances(space, pool) -> np.ndarray:
    # [geodesic, vertex] -> distance from vertex to the geodesic
    if not pool:
        raise ValueError("empty geodesic pool")
    d = as_space(space).dist
    return np.stack([d[list(g)].min(axis=0) for g in pool])


def _choose(records: int, limit: int, seed: int):
    if records <= limit:
        return np.arange(records), False
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(records, size=limit, replace=False)), True


def check_condition1(space, pool, r0: int, max_pairs: int = MAX_RECORDS, seed: int = 0):
    """Best pool geodesic for every ordered pair at distance ``>= r0``.

    Returns ``(records, (r1, r2), sampled)``; ``r1``/``r2`` are the maxima of
    the chosen residuals.
    """
    if r0 < 1:
        raise ValueError("r0 must be >= 1 so that p != q")
    space = as_space(space)
    dpg = _pool_distances(space, pool)
    d = space.dist
    ps, qs = np.nonzero(d >= r0)
    pick, sampled = _choose(len(ps), max_pairs, seed)
    ps, qs = ps[pick], qs[pick]
    records = []
    for start in range(0, len(ps), 512):
        p, q = ps[start:start + 512], qs[start:start + 512]
        res1 = dpg[:, p]                                   # [geo, pair]
        res2 = np.abs(dpg[:, q] - d[p, q][None, :])
        score = np.maximum(res1, res2) * (2 * d.max() + 2) + res1 + res2
        best = score.argmin(axis=0)
        for k, b in enumerate(best):
            records.append(PairRecord(int(p[k]), int(q[k]), int(b),
                                      int(res1[b, k]), int(res2[b, k])))
    r1 = max((r.r1 for r in records), default=0)
    r2 = max((r.r2 for r in records), default=0)
    return records, (r1, r2), sampled


def check_condition2(space, pool, targets=None, max_records: int = MAX_RECORDS, seed: int = 0):
    """Best witness in ``pool`` for every (target geodesic, point) record.

    ``targets`` defaults to ``pool``. Returns ``(records, (r3, r4), sampled)``.
    """
    space = as_space(space)
    targets = pool if targets is None else targets
    dpg = _pool_distances(space, pool)
    dtg = _pool_distances(space, targets)
    # distance between witness w and target t: min over target points
    gap = np.stack([dpg[:, list(t)].min(axis=1) for t in targets], axis=1)   # [w, t]
    n = space.n
    pick, sampled = _choose(len(targets) * n, max_records, seed)
    ts, ps = np.divmod(pick, n)
    res3 = dpg[:, ps]                                         # [w, record]
    res4 = np.abs(dtg[ts, ps][None, :] - gap[:, ts])
    score = np.maximum(res3, res4) * (2 * space.dist.max() + 2) + res3 + res4
    best = score.argmin(axis=0)
    records = [PointRecord(int(t), int(p), int(b), int(res3[b, k]), int(res4[b, k]))
               for k, (t, p, b) in enumerate(zip(ts, ps, best))]
    r3 = max((r.r3 for r in records), default=0)
    r4 = max((r.r4 for r in records), default=0)
    return records, (r3, r4), sampled


def proxy_boundary(graph: Graph) -> list[int]:
    """Vertices of less than maximal degree (the leaves of a tree ball).

    A regular graph has no such vertices; then every vertex is returned.
    """
    deg = np.array([graph.degree(v) for v in range(graph.n)])
    low = np.nonzero(deg < deg.max())[0].tolist()
    return low or list(range(graph.n))


def default_r0(graph: Graph) -> int:
    return max(1, int(graph.dist.max()) // 4)


def check_richness(graph: Graph, endpoints=None, r0: int | None = None,
                   thresholds: dict | None = None, seed: int = 0,
                   max_records: int = MAX_RECORDS, max_pool: int = MAX_POOL) -> RichnessReport:
    """Run both conditions on the pool spanned by ``endpoints`` (default: proxy boundary).

    A pair violates condition 1 unless both residuals are strictly below
    their thresholds; a record violates condition 2 when a residual exceeds
    its threshold. Thresholds default to ``r0`` for every constant.
    """
    if endpoints is None:
        endpoints = proxy_boundary(graph)
    endpoints = sorted(set(int(e) for e in endpoints))
    if len(endpoints) < 2:
        raise ValueError("geodesic pool needs at least two endpoints")
    r0 = default_r0(graph) if r0 is None else int(r0)
    th = {k: float(r0) for k in ("r1", "r2", "r3", "r4")}
    th.update(thresholds or {})
    pool = geodesic_pool(graph, endpoints, max_pool, seed)
    c1, (r1, r2), s1 = check_condition1(graph, pool, r0, max_records, seed)
    c2, (r3, r4), s2 = check_condition2(graph, pool, None, max_records, seed)
    violations = []
    for r in c1:
        if not (r.r1 < th["r1"] and r.r2 < th["r2"]):
            violations.append({"condition": 1, **asdict(r)})
    for r in c2:
        if r.r3 > th["r3"] or r.r4 > th["r4"]:
            violations.append({"condition": 2, **asdict(r)})
    return RichnessReport(
        r0=r0,
        pool=[(g.start, g.end) for g in pool],
        condition1=c1,
        condition2=c2,
        fitted={"r1": r1, "r2": r2, "r3": r3, "r4": r4},
        thresholds=th,
        rich=not violations,
        violations=violations,
        sampled={"pool": len(pool) < len(endpoints) * (len(endpoints) - 1) // 2,
                 "condition1": s1, "condition2": s2},
    )
