"""Exact metric substrate: hop-metric spaces, Gromov products, hyperbolicity."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering

import numpy as np

from ._kernels import four_point_max_doubled

DEFAULT_MAX_POINTS = 150


@total_ordering
@dataclass(frozen=True)
class HalfInteger:
    """An exact value ``doubled / 2``."""

    doubled: int

    @classmethod
    def from_value(cls, value) -> "HalfInteger":
        frac = Fraction(value) * 2
        if frac.denominator != 1:
            raise ValueError(f"{value!r} is not a half-integer")
        return cls(int(frac))

    def as_fraction(self) -> Fraction:
        return Fraction(self.doubled, 2)

    def __float__(self) -> float:
        return self.doubled / 2

    def __eq__(self, other):
        if isinstance(other, HalfInteger):
            return self.doubled == other.doubled
        if isinstance(other, (int, Fraction)):
            return self.as_fraction() == other
        if isinstance(other, float):
            return float(self) == other
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, HalfInteger):
            return self.doubled < other.doubled
        if isinstance(other, (int, Fraction)):
            return self.as_fraction() < other
        if isinstance(other, float):
            return float(self) < other
        return NotImplemented

    def __hash__(self):
        return hash(self.as_fraction())

    def __str__(self):
        if self.doubled % 2 == 0:
            return str(self.doubled // 2)
        return f"{self.doubled}/2"


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """Points ``0..n-1`` with an integer distance table."""

    dist: np.ndarray
    n: int = field(init=False)

    def __post_init__(self):
        d = np.asarray(self.dist)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError("distance table must be square")
        if d.size and not np.issubdtype(d.dtype, np.integer):
            if not np.all(np.equal(np.mod(d, 1), 0)):
                raise ValueError("distances must be integers")
        d = d.astype(np.int64)
        d.setflags(write=False)
        object.__setattr__(self, "dist", d)
        object.__setattr__(self, "n", d.shape[0])

    def check_id(self, *ids: int) -> None:
        for i in ids:
            if not (0 <= int(i) < self.n):
                raise IndexError(f"point id {i} out of range for {self.n} points")

    def d(self, x: int, y: int) -> int:
        return int(self.dist[x, y])

    def validate(self) -> None:
        """Raise ``ValueError`` unless the table is a metric."""
        d = self.dist
        if (d < 0).any():
            raise ValueError("negative distance")
        if not np.array_equal(d, d.T):
            raise ValueError("distance table is not symmetric")
        off = d + np.eye(self.n, dtype=d.dtype)
        if (np.diag(d) != 0).any() or (off == 0).any():
            raise ValueError("distance must vanish exactly on the diagonal")
        for y in range(self.n):
            # d(x, z) <= d(x, y) + d(y, z)
            if (d > d[:, y, None] + d[None, y, :]).any():
                raise ValueError("triangle inequality fails")

    def relabel(self, perm) -> "FiniteMetricSpace":
        """Space whose point ``i`` is point ``perm[i]`` of this one."""
        perm = np.asarray(perm)
        return FiniteMetricSpace(self.dist[np.ix_(perm, perm)])

    def distance_to_set(self, x: int, points) -> int:
        return int(self.dist[x, list(points)].min())


def as_space(obj) -> FiniteMetricSpace:
    """Accept a ``FiniteMetricSpace`` or anything with a ``metric`` attribute."""
    if isinstance(obj, FiniteMetricSpace):
        return obj
    metric = getattr(obj, "metric", None)
    if isinstance(metric, FiniteMetricSpace):
        return metric
    raise TypeError(f"cannot use {type(obj).__name__} as a metric space")


def gromov_product(space, x: int, y: int, p: int) -> HalfInteger:
    """``(x, y)_p``, exact."""
    space = as_space(space)
    space.check_id(x, y, p)
    d = space.dist
    return HalfInteger(int(d[x, p] + d[y, p] - d[x, y]))


def gromov_matrix_doubled(space, p: int) -> np.ndarray:
    """``2 (x, y)_p`` for all ``x, y`` as an integer matrix."""
    space = as_space(space)
    d = space.dist
    return d[:, p, None] + d[None, p, :] - d


def four_point_delta(space, max_points: int | None = DEFAULT_MAX_POINTS,
                     sample: int | None = None, seed: int = 0) -> HalfInteger:
    """Least delta for which every quadruple satisfies the four-point condition.

    Exhaustive by default. Spaces larger than ``max_points`` are rejected
    unless ``sample`` gives a number of random quadruples to scan instead,
    in which case the result is a lower bound. ``max_points=None`` lifts the
    guard and keeps the scan exhaustive.

    The scan uses the equivalent pair-sum form: for each unordered quadruple
    the largest of the three pair sums minus the middle one, halved.
    """
    space = as_space(space)
    n = space.n
    if n < 1:
        raise ValueError("empty space")
    if max_points is not None and n > max_points:
        if sample is None:
            raise ValueError(
                f"{n} points exceeds the exhaustive limit of {max_points}; "
                "pass sample=... or max_points=None")
        return _sampled_four_point(space.dist, sample, seed)
    if n < 4:
        # repeated points never produce a positive defect
        return HalfInteger(0)
    d = np.ascontiguousarray(space.dist, dtype=np.int32)
    return HalfInteger(int(four_point_max_doubled(d)))


def _sampled_four_point(d: np.ndarray, samples: int, seed: int) -> HalfInteger:
    rng = np.random.default_rng(seed)
    q = rng.integers(0, d.shape[0], size=(samples, 4))
    x, y, z, w = q.T
    s = np.stack([d[x, y] + d[z, w], d[x, z] + d[y, w], d[x, w] + d[y, z]])
    s.sort(axis=0)
    best = int((s[2] - s[1]).max()) if samples else 0
    return HalfInteger(best)


def four_point_delta_bruteforce(space) -> HalfInteger:
    """Literal scan of ``min{(x,y)_p, (y,z)_p} - (x,z)_p`` over ordered quadruples.

    Pure Python, for cross-checking on small spaces only.
    """
    space = as_space(space)
    d = space.dist.tolist()
    best = 0
    pts = range(space.n)
    for p, x, y, z in itertools.product(pts, repeat=4):
        xy = d[x][p] + d[y][p] - d[x][y]
        yz = d[y][p] + d[z][p] - d[y][z]
        xz = d[x][p] + d[z][p] - d[x][z]
        best = max(best, min(xy, yz) - xz)
    return HalfInteger(best)


def thin_triangle_delta(space, geodesic, exhaustive_limit: int = 40,
                        samples: int = 20000, seed: int = 0) -> int:
    """Largest ``d(p, xz U yz)`` for ``p`` on side ``xy`` over geodesic triangles.

    ``geodesic(u, v)`` must return the point sequence of a fixed u-v geodesic.
    Because only one geodesic per pair is examined, the value is a lower bound
    for the thinness constant taken over all geodesics. Triangles are
    enumerated exhaustively when ``n <= exhaustive_limit``, otherwise
    ``samples`` random ordered triples are drawn.
    """
    space = as_space(space)
    n = space.n
    d = space.dist
    cache: dict[tuple[int, int], np.ndarray] = {}

    def side(u, v):
        key = (u, v)
        if key not in cache:
            cache[key] = np.asarray(list(geodesic(u, v)), dtype=np.intp)
        return cache[key]

    if n <= exhaustive_limit:
        triples = itertools.permutations(range(n), 3)
    else:
        rng = np.random.default_rng(seed)
        triples = (tuple(t) for t in rng.integers(0, n, size=(samples, 3)).tolist())

    best = 0
    for x, y, z in triples:
        if x == y:
            continue
        base = side(x, y)
        others = np.concatenate([side(x, z), side(y, z)])
        worst = int(d[np.ix_(base, others)].min(axis=1).max())
        if worst > best:
            best = worst
    return best


def visual_distance(space, xi: int, eta: int, p: int) -> float:
    """``exp(-(xi, eta)_p)``."""
    g = gromov_product(space, xi, eta, p)
    return math.exp(-float(g))


def visual_distance_violations(space, rtol: float = 1e-12) -> list[tuple[int, int, int, int]]:
    """All ``(xi, eta, p, p')`` where changing basepoint breaks the ``e^D`` ratio bound.

    Checks ``visdist_{p'} <= e^{d(p, p')} visdist_p`` in floating point at
    relative tolerance ``rtol``.
    """
    space = as_space(space)
    d = space.dist
    n = space.n
    dd = d.astype(float)
    growth = np.exp(dd)
    bad = []
    for xi in range(n):
        # rows: eta, cols: p  -> doubled Gromov products (xi, eta)_p
        g = d[xi, None, :] + d[:, :] - d[xi, :, None]
        vis = np.exp(-g / 2.0)
        for eta in range(n):
            v = vis[eta]
            lhs = v[None, :]                      # indexed [p, p']
            rhs = growth * v[:, None]
            viol = np.argwhere(lhs > rhs * (1 + rtol))
            for p, pp in viol:
                bad.append((xi, eta, int(p), int(pp)))
    return bad
