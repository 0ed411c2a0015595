"""Test spaces as unit-weight graphs, canonical geodesics and projections.

Every builder returns a connected simple :class:`Graph`; its hop metric is
available as ``graph.metric``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import shortest_path

from .metric_core import FiniteMetricSpace

MAX_VERTICES = 200_000


class ConstructionError(ValueError):
    pass


@dataclass(eq=False)
class Graph:
    n: int
    edges: tuple[tuple[int, int], ...]
    name: str = ""
    neighbors: tuple[tuple[int, ...], ...] = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise ConstructionError("graph needs at least one vertex")
        seen = set()
        adj: list[list[int]] = [[] for _ in range(self.n)]
        clean = []
        for u, v in self.edges:
            u, v = int(u), int(v)
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ConstructionError(f"edge ({u}, {v}) out of range")
            if u == v:
                raise ConstructionError(f"self-loop at {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ConstructionError(f"multi-edge {key}")
            seen.add(key)
            clean.append(key)
            adj[u].append(v)
            adj[v].append(u)
        self.edges = tuple(clean)
        self.neighbors = tuple(tuple(sorted(a)) for a in adj)
        if self.n > 1 and (self.metric.dist < 0).any():
            raise ConstructionError("graph is disconnected")

    @cached_property
    def metric(self) -> FiniteMetricSpace:
        if not self.edges:
            return FiniteMetricSpace(np.zeros((self.n, self.n), dtype=np.int64))
        u, v = np.array(self.edges).T
        a = coo_matrix((np.ones(len(u)), (u, v)), shape=(self.n, self.n)).tocsr()
        d = shortest_path(a, directed=False, unweighted=True)
        d[np.isinf(d)] = -1
        return FiniteMetricSpace(d.astype(np.int64))

    @property
    def dist(self) -> np.ndarray:
        return self.metric.dist

    def degree(self, v: int) -> int:
        return len(self.neighbors[v])

    def leaves(self) -> list[int]:
        return [v for v in range(self.n) if len(self.neighbors[v]) == 1]

    def is_tree(self) -> bool:
        return len(self.edges) == self.n - 1

    def diametral_pair(self) -> tuple[int, int]:
        """Lexicographically first pair realizing the diameter."""
        d = self.dist
        flat = int(np.argmax(d))
        return divmod(flat, self.n)


@dataclass(frozen=True)
class GeodesicSegment:
    points: tuple[int, ...]

    def __post_init__(self):
        if not self.points:
            raise ValueError("empty geodesic segment")
        object.__setattr__(self, "points", tuple(int(p) for p in self.points))

    @property
    def length(self) -> int:
        return len(self.points) - 1

    @property
    def start(self) -> int:
        return self.points[0]

    @property
    def end(self) -> int:
        return self.points[-1]

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def index(self, v: int) -> int:
        return self.points.index(v)

    def is_isometric(self, space) -> bool:
        """``d(points[i], points[j]) == |i - j|`` for all i, j."""
        d = getattr(space, "dist")
        idx = np.asarray(self.points)
        steps = np.arange(len(idx))
        return bool(np.array_equal(d[np.ix_(idx, idx)], np.abs(steps[:, None] - steps[None, :])))


# ---------------------------------------------------------------- builders


def _check_size(count: int) -> None:
    if count > MAX_VERTICES:
        raise ConstructionError(f"{count} vertices exceeds the cap of {MAX_VERTICES}")


def tree_ball_size(d: int, R: int) -> int:
    return 1 + d * ((d - 1) ** R - 1) // (d - 2)


def build_tree_ball(d: int, R: int) -> Graph:
    """Ball of radius ``R`` around the root of the ``d``-regular tree.

    Vertex 0 is the root; vertices are numbered in breadth-first order so the
    leaves are exactly the vertices at depth ``R``.
    """
    if d < 3 or R < 1:
        raise ConstructionError("need d >= 3 and R >= 1")
    _check_size(tree_ball_size(d, R))
    edges = []
    frontier = [0]
    nxt = 1
    for depth in range(R):
        new = []
        for v in frontier:
            for _ in range(d if depth == 0 else d - 1):
                edges.append((v, nxt))
                new.append(nxt)
                nxt += 1
        frontier = new
    return Graph(nxt, tuple(edges), name=f"tree:d={d},R={R}")


def build_random_tree(n: int, seed: int = 0) -> Graph:
    """Random recursive tree: vertex ``k`` attaches to a uniform earlier vertex."""
    if n < 1:
        raise ConstructionError("need n >= 1")
    _check_size(n)
    rng = np.random.default_rng(seed)
    parents = [int(rng.integers(0, k)) for k in range(1, n)]
    return Graph(n, tuple((p, k) for k, p in enumerate(parents, start=1)),
                 name=f"randtree:n={n},seed={seed}")


def build_tessellation_patch(p: int, q: int, layers: int) -> Graph:
    """Vertex graph of ``layers`` concentric rings of faces of the {p,q} tiling.

    Layer 1 is a single p-gon. Each further layer adds every face that meets
    the current boundary cycle: a boundary vertex with ``f`` incident faces
    receives ``q - f`` new faces, separated by ``q - f - 1`` outward spokes,
    and consecutive spokes are joined by a new face whose remaining corners
    become the next boundary ring.
    """
    if p < 3 or q < 3 or Fraction(1, p) + Fraction(1, q) >= Fraction(1, 2):
        raise ConstructionError(f"{{{p},{q}}} is not of hyperbolic type")
    if layers < 1:
        raise ConstructionError("need layers >= 1")

    edges: set[tuple[int, int]] = set()

    def link(a, b):
        if a != b:
            edges.add((min(a, b), max(a, b)))

    boundary = list(range(p))
    faces = {v: 1 for v in boundary}
    for i in range(p):
        link(boundary[i], boundary[(i + 1) % p])
    n = p

    for _ in range(layers - 1):
        m = len(boundary)
        spokes: list[tuple[int, int]] = []   # (boundary position, outer vertex)
        for i, v in enumerate(boundary):
            k = q - faces[v]
            if k < 1:
                raise ConstructionError("boundary vertex already saturated")
            for _ in range(k - 1):
                spokes.append((i, n))
                link(v, n)
                n += 1
        if not spokes:
            raise ConstructionError("layer has no outward spokes")

        parent = {}

        def find(a):
            while parent.get(a, a) != a:
                a = parent[a]
            return a

        ring: list[int] = []
        outer_faces: dict[int, int] = {}
        s = len(spokes)
        for j in range(s):
            ia, oa = spokes[j]
            ib, ob = spokes[(j + 1) % s]
            span = (ib - ia) % m
            if s == 1:
                span = m
            extra = p - (span + 1) - 2
            ring.append(oa)
            outer_faces[oa] = outer_faces.get(oa, 0) + 1
            outer_faces[ob] = outer_faces.get(ob, 0) + 1
            if extra == -1:
                parent[find(ob)] = find(oa)
            elif extra < -1:
                raise ConstructionError("face closes before reaching the next spoke")
            else:
                chain = [oa]
                for _ in range(extra):
                    chain.append(n)
                    outer_faces[n] = 1
                    ring.append(n)
                    n += 1
                chain.append(ob)
                for a, b in zip(chain, chain[1:]):
                    link(a, b)
        # a merged corner is counted once per spoke but its shared face only once
        remap = {v: find(v) for v in outer_faces}
        new_faces: dict[int, int] = {}
        for v, f in outer_faces.items():
            r = remap[v]
            new_faces[r] = new_faces.get(r, 0) + f - (r != v)
        if any(remap[v] != v for v in remap):
            edges = {(min(remap.get(a, a), remap.get(b, b)), max(remap.get(a, a), remap.get(b, b)))
                     for a, b in edges if remap.get(a, a) != remap.get(b, b)}
        ring_clean = []
        for v in ring:
            r = remap.get(v, v)
            if not ring_clean or ring_clean[-1] != r:
                ring_clean.append(r)
        if len(ring_clean) > 1 and ring_clean[0] == ring_clean[-1]:
            ring_clean.pop()
        boundary = ring_clean
        faces = {v: new_faces[v] for v in boundary}
        _check_size(n)

    # relabel to 0..count-1 preserving creation order
    used = sorted({v for e in edges for v in e} | set(range(p)))
    index = {v: i for i, v in enumerate(used)}
    return Graph(len(used), tuple(sorted((index[a], index[b]) for a, b in edges)),
                 name=f"tess:p={p},q={q},layers={layers}")


def build_control(kind: str, size: int) -> Graph:
    """Path ``P_size``, cycle ``C_size`` or ``size x size`` grid."""
    if size < 2:
        raise ConstructionError("size must be >= 2")
    if kind == "path":
        edges = [(i, i + 1) for i in range(size - 1)]
        n = size
    elif kind == "cycle":
        if size < 3:
            raise ConstructionError("a simple cycle needs at least 3 vertices")
        edges = [(i, (i + 1) % size) for i in range(size)]
        n = size
    elif kind == "grid":
        n = size * size
        _check_size(n)
        edges = []
        for r in range(size):
            for c in range(size):
                v = r * size + c
                if c + 1 < size:
                    edges.append((v, v + 1))
                if r + 1 < size:
                    edges.append((v, v + size))
    else:
        raise ConstructionError(f"unknown control kind {kind!r}")
    return Graph(n, tuple(edges), name=f"{kind}:n={size}")


# ---------------------------------------------------------------- geodesics


def canonical_geodesic(g: Graph, u: int, v: int) -> GeodesicSegment:
    """The fixed shortest u-v path.

    Walks back from ``v``, always stepping to the lowest-index neighbour one
    hop closer to ``u``.
    """
    g.metric.check_id(u, v)
    du = g.dist[u]
    path = [v]
    cur = v
    while cur != u:
        target = du[cur] - 1
        for w in g.neighbors[cur]:
            if du[w] == target:
                cur = w
                break
        else:  # pragma: no cover - connectivity is enforced at construction
            raise ConstructionError(f"no path from {u} to {v}")
        path.append(cur)
    path.reverse()
    return GeodesicSegment(tuple(path))


def project_to_geodesic(g, x: int, sigma) -> set[int]:
    """All points of ``sigma`` nearest to ``x``."""
    pts = np.asarray(list(sigma), dtype=np.intp)
    row = g.dist[x, pts]
    return {int(v) for v in pts[row == row.min()]}


def projection_extent(g, curve: Sequence[int], sigma) -> int:
    """Spread, measured along ``sigma``, of the projections of all curve points."""
    curve = list(curve)
    if not curve:
        raise ValueError("empty curve")
    pts = np.asarray(list(sigma), dtype=np.intp)
    block = g.dist[np.ix_(np.asarray(curve, dtype=np.intp), pts)]
    hit = block == block.min(axis=1, keepdims=True)
    idx = np.nonzero(hit.any(axis=0))[0]
    return int(idx.max() - idx.min())


def path_within(graph: Graph, s: int, t: int, allowed) -> list[int] | None:
    """Shortest ``s``-``t`` path using only ``allowed`` vertices, or ``None``.

    Ties are broken toward lower vertex ids.
    """
    if s not in allowed or t not in allowed:
        return None
    dist = {t: 0}
    frontier = [t]
    while frontier and s not in dist:
        nxt = []
        for a in frontier:
            for b in graph.neighbors[a]:
                if b in allowed and b not in dist:
                    dist[b] = dist[a] + 1
                    nxt.append(b)
        frontier = nxt
    if s not in dist:
        return None
    path = [s]
    while path[-1] != t:
        cur = path[-1]
        path.append(min(b for b in graph.neighbors[cur] if dist.get(b) == dist[cur] - 1))
    return path


# ---------------------------------------------------------------- edge lists


def read_edge_list(path: str | Path) -> Graph:
    """Load ``u v`` lines (0-based). Blank lines and ``#`` comments are skipped."""
    edges = []
    top = -1
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ConstructionError(f"{path}:{lineno}: expected 'u v', got {line!r}")
        u, v = int(parts[0]), int(parts[1])
        if u < 0 or v < 0:
            raise ConstructionError(f"{path}:{lineno}: negative vertex id")
        edges.append((u, v))
        top = max(top, u, v)
    return Graph(top + 1, tuple(edges), name=str(path))


def write_edge_list(g: Graph, path: str | Path) -> None:
    Path(path).write_text("".join(f"{u} {v}\n" for u, v in g.edges))


def edge_list_text(g: Graph) -> str:
    return "".join(f"{u} {v}\n" for u, v in g.edges)


def induced_components(g: Graph, vertices: Iterable[int]) -> list[list[int]]:
    """Connected components of the subgraph induced on ``vertices``."""
    keep = set(vertices)
    seen: set[int] = set()
    comps = []
    for s in sorted(keep):
        if s in seen:
            continue
        comp = [s]
        seen.add(s)
        stack = [s]
        while stack:
            a = stack.pop()
            for b in g.neighbors[a]:
                if b in keep and b not in seen:
                    seen.add(b)
                    comp.append(b)
                    stack.append(b)
        comps.append(sorted(comp))
    return comps
