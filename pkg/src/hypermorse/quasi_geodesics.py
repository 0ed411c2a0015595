"""Sampled quasi-geodesics: verification, Delta-length, taut replacement,
extremal and random generators, Morse / anti-Morse distances."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._kernels import delta_length_dp
from .graph_spaces import (ConstructionError, GeodesicSegment, Graph,
                           canonical_geodesic, path_within)
from .metric_core import as_space


class GenerationError(RuntimeError):
    pass


def as_rational(x) -> Fraction:
    """Exact rational from an int, Fraction, decimal string, ``"a/b"`` or float."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def _rational_json(x: Fraction):
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class QuasiGeodesic:
    params: tuple[int, ...]
    points: tuple[int, ...]
    lam: Fraction = Fraction(1)
    c: Fraction = Fraction(0)

    def __post_init__(self):
        params = tuple(int(t) for t in self.params)
        points = tuple(int(p) for p in self.points)
        if len(params) != len(points):
            raise ValueError(f"{len(params)} params but {len(points)} points")
        if not params:
            raise ValueError("empty quasi-geodesic")
        if any(b <= a for a, b in zip(params, params[1:])):
            raise ValueError("params must be strictly increasing")
        lam, c = as_rational(self.lam), as_rational(self.c)
        if lam < 1 or c < 0:
            raise ValueError("need lambda >= 1 and c >= 0")
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "c", c)

    @classmethod
    def unit(cls, points: Sequence[int], lam=1, c=0) -> "QuasiGeodesic":
        """Curve sampled at parameters ``0, 1, 2, ...``."""
        return cls(tuple(range(len(points))), tuple(points), lam, c)

    def __len__(self):
        return len(self.points)

    @property
    def interval_length(self) -> int:
        return self.params[-1] - self.params[0]

    @property
    def endpoints(self) -> tuple[int, int]:
        return self.points[0], self.points[-1]

    def classical_length(self, space) -> int:
        d = as_space(space).dist
        p = np.asarray(self.points)
        return int(d[p[:-1], p[1:]].sum())

    def with_constants(self, lam, c) -> "QuasiGeodesic":
        return QuasiGeodesic(self.params, self.points, lam, c)

    def to_dict(self) -> dict:
        return {"params": list(self.params), "points": list(self.points),
                "lambda": _rational_json(self.lam), "c": _rational_json(self.c)}

    @classmethod
    def from_dict(cls, data: dict) -> "QuasiGeodesic":
        return cls(tuple(data["params"]), tuple(data["points"]),
                   as_rational(data["lambda"]), as_rational(data["c"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "QuasiGeodesic":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class Check:
    """Outcome of a pairwise sandwich check; falsy when a pair fails."""

    ok: bool
    pair: tuple[int, int] | None = None

    def __bool__(self):
        return self.ok


def sandwich_bad_mask(gaps: np.ndarray, dists: np.ndarray, lam, c) -> np.ndarray:
    """Entries breaking ``gap / lam - c <= dist <= lam * gap + c``, exactly."""
    lam, c = as_rational(lam), as_rational(c)
    ln, ld = lam.numerator, lam.denominator
    cn, cd = c.numerator, c.denominator
    gaps = np.asarray(gaps, dtype=np.int64)
    dists = np.asarray(dists, dtype=np.int64)
    low_bad = gaps * (ld * cd) - cn * ln > dists * (ln * cd)
    high_bad = dists * (ld * cd) > gaps * (ln * cd) + cn * ld
    return low_bad | high_bad


def sandwich_violation(gaps: np.ndarray, dists: np.ndarray, lam, c) -> tuple[int, int] | None:
    """First ``(i, j)``, ``i < j`` in row-major order, failing the sandwich."""
    hits = np.argwhere(np.triu(sandwich_bad_mask(gaps, dists, lam, c), k=1))
    if len(hits) == 0:
        return None
    i, j = hits[0]
    return int(i), int(j)


def _pair_tables(space, params, points):
    d = as_space(space).dist
    t = np.asarray(params, dtype=np.int64)
    p = np.asarray(points, dtype=np.intp)
    return np.abs(t[:, None] - t[None, :]), d[np.ix_(p, p)]


def verify_quasi_geodesic(space, qg: QuasiGeodesic) -> Check:
    """Check the (lambda, c) sandwich on every pair of samples."""
    as_space(space).check_id(*qg.points)
    gaps, dists = _pair_tables(space, qg.params, qg.points)
    pair = sandwich_violation(gaps, dists, qg.lam, qg.c)
    return Check(pair is None, pair)


def fit_qi_constants(space, params, points, lam) -> Fraction:
    """Least ``c >= 0`` making the samples a ``(lam, c)`` quasi-geodesic."""
    if len(params) != len(points):
        raise ValueError("params and points differ in length")
    lam = as_rational(lam)
    if lam < 1:
        raise ValueError("lambda must be >= 1")
    gaps, dists = _pair_tables(space, params, points)
    ln, ld = lam.numerator, lam.denominator
    # gap/lam - dist  and  dist - lam*gap, each over a fixed denominator
    low = int((gaps * ld - dists * ln).max()) if gaps.size else 0
    high = int((dists * ld - gaps * ln).max()) if gaps.size else 0
    return max(Fraction(0), Fraction(low, ln), Fraction(high, ld))


# ------------------------------------------------------------- Delta-length


@dataclass(frozen=True)
class DeltaLengthResult:
    value: int
    witness: tuple[int, ...]
    degenerate: bool = False


def delta_length(space, qg, Delta: int) -> DeltaLengthResult:
    """Largest jump sum over sample subsequences from first to last sample
    whose consecutive jumps are all at least ``Delta``.

    ``qg`` may be a :class:`QuasiGeodesic` or a plain point sequence. Among
    optimal subsequences the one with the most samples is returned. When no
    admissible subsequence exists the result is ``0`` and ``degenerate``.
    """
    Delta = int(Delta)
    if Delta < 1:
        raise ValueError("Delta must be >= 1")
    points = qg.points if isinstance(qg, QuasiGeodesic) else tuple(qg)
    if len(points) < 2:
        raise ValueError("need at least two samples")
    d = as_space(space).dist
    best, prev = delta_length_dp(np.ascontiguousarray(d), np.asarray(points, dtype=np.int64), Delta)
    last = len(points) - 1
    if best[last] < 0:
        return DeltaLengthResult(0, (), True)
    chain = [last]
    while chain[-1] != 0:
        chain.append(int(prev[chain[-1]]))
    return DeltaLengthResult(int(best[last]), tuple(reversed(chain)))


def taut_replacement(graph: Graph, qg: QuasiGeodesic, Delta: int) -> QuasiGeodesic:
    """Replace ``qg`` by geodesic pieces through its Delta-length witness.

    Consecutive witness points are joined by canonical geodesics. Each piece
    keeps the parameter interval of its witness hop; its vertices get
    parameters spread linearly over that interval (or, when the piece is
    longer than the interval, one vertex per integer parameter). The result
    carries the constants ``(lam, 12 Delta + 3 c)`` and its classical length
    equals the Delta-length of ``qg``.
    """
    if Delta < qg.c:
        raise ValueError("Delta must be at least c")
    res = delta_length(graph, qg, Delta)
    if res.degenerate:
        raise ValueError("Delta-length is degenerate; nothing to replace")
    params: list[int] = [qg.params[res.witness[0]]]
    points: list[int] = [qg.points[res.witness[0]]]
    for a, b in zip(res.witness, res.witness[1:]):
        seg = canonical_geodesic(graph, qg.points[a], qg.points[b]).points
        t0, gap = qg.params[a], qg.params[b] - qg.params[a]
        ell = len(seg) - 1
        if gap >= ell:
            for k in range(1, ell + 1):
                params.append(t0 + (2 * k * gap + ell) // (2 * ell))
                points.append(seg[k])
        else:
            for j in range(1, gap + 1):
                params.append(t0 + j)
                points.append(seg[(2 * j * ell + gap) // (2 * gap)])
    return QuasiGeodesic(tuple(params), tuple(points), qg.lam, 12 * Delta + 3 * qg.c)


# ------------------------------------------------------------- constructions


def extremal_example(lam: int, c: int, tree: Graph) -> QuasiGeodesic:
    """Back-and-forth curve on a tree segment ``[a, b]`` of length ``lam^2 c / 2``.

    Parameters run over ``0 .. lam*c``; the point at parameter ``x`` sits at
    distance ``lam * min(x, lam*c - x)`` from ``a``, so both ends map to ``a``
    and the midpoint maps to ``b``.
    """
    if int(lam) != lam or int(c) != c or lam < 1 or c < 1:
        raise ConstructionError("lambda and c must be positive integers")
    lam, c = int(lam), int(c)
    if (lam * c) % 2:
        raise ConstructionError("lambda * c must be even")
    if not tree.is_tree():
        raise ConstructionError("extremal example needs a tree")
    span = lam * lam * c // 2
    u, v = tree.diametral_pair()
    line = canonical_geodesic(tree, u, v).points
    if len(line) - 1 < span:
        raise ConstructionError(f"tree diameter {len(line) - 1} is shorter than {span}")
    top = lam * c
    pts = tuple(line[lam * min(x, top - x)] for x in range(top + 1))
    return QuasiGeodesic(tuple(range(top + 1)), pts, lam, c)


def detour_quasi_geodesic(graph: Graph, sigma: GeodesicSegment, depth: int,
                          lam=1, c=0) -> QuasiGeodesic | None:
    """Follow ``sigma`` but skirt the open ball of radius ``depth`` around its midpoint.

    The curve leaves ``sigma`` at distance ``depth`` before the midpoint,
    runs along a shortest path outside the ball and rejoins ``sigma`` at
    distance ``depth`` after it. Every point of the curve is at least
    ``depth`` away from the midpoint. Returns ``None`` when ``sigma`` is too
    short or the ball separates the two exits.
    """
    pts = sigma.points
    mid = len(pts) // 2
    if depth < 1 or mid - depth < 0 or mid + depth >= len(pts):
        return None
    center = pts[mid]
    row = graph.dist[center]
    allowed = set(np.nonzero(row >= depth)[0].tolist())
    around = path_within(graph, pts[mid - depth], pts[mid + depth], allowed)
    if around is None:
        return None
    curve = list(pts[:mid - depth]) + around + list(pts[mid + depth + 1:])
    return QuasiGeodesic.unit(curve, lam, c)


def deepest_detour(graph: Graph, sigma: GeodesicSegment, lam, c) -> tuple[int, QuasiGeodesic | None]:
    """Largest depth whose detour curve is a ``(lam, c)`` quasi-geodesic."""
    best, best_qg = 0, None
    depth = 1
    while True:
        qg = detour_quasi_geodesic(graph, sigma, depth, lam, c)
        if qg is None:
            break
        if verify_quasi_geodesic(graph, qg):
            best, best_qg = depth, qg
        depth += 1
    return best, best_qg


def random_quasi_geodesic(graph: Graph, endpoints: tuple[int, int], lam, c, seed: int,
                          rate: float = 0.3, max_retries: int = 8) -> QuasiGeodesic:
    """Randomly perturbed canonical geodesic, valid for ``(lam, c)``.

    Walking along the canonical geodesic, each vertex may spawn a dwell
    (repeat the vertex), an excursion (random walk out and straight back) or a
    detour (random walk out, then a geodesic back to a later vertex). A
    perturbation is kept only if the whole resulting curve still verifies.
    Perturbation sizes are bounded by ``lam * c`` and shrink on each retry.
    """
    lam, c = as_rational(lam), as_rational(c)
    if lam < 1 or c < 0:
        raise ValueError("need lambda >= 1 and c >= 0")
    u, v = endpoints
    sigma = canonical_geodesic(graph, u, v).points
    rng = np.random.default_rng(seed)
    space = graph.metric
    reach = math.floor(lam * c)

    for attempt in range(max_retries):
        size = reach >> attempt
        prefix: list[int] = []
        i = 0
        while i < len(sigma):
            s = sigma[i]
            prefix.append(s)
            if size < 1 or i == len(sigma) - 1 or rng.random() >= rate:
                i += 1
                continue
            kind = rng.integers(3)
            h = int(rng.integers(1, size + 1))
            walk = [s]
            for _ in range(h if kind else 0):
                walk.append(int(rng.choice(graph.neighbors[walk[-1]])))
            if kind == 0:
                extra, resume = [s] * h, i + 1
            elif kind == 1:
                extra, resume = walk[1:] + walk[-2::-1], i + 1
            else:
                j = int(rng.integers(i + 1, min(len(sigma), i + 1 + size)))
                back = canonical_geodesic(graph, walk[-1], sigma[j]).points
                extra, resume = walk[1:] + list(back[1:-1]), j
            candidate = prefix + extra + list(sigma[resume:])
            if verify_quasi_geodesic(space, QuasiGeodesic.unit(candidate, lam, c)):
                prefix.extend(extra)
                i = resume
            else:
                i += 1
        qg = QuasiGeodesic.unit(prefix, lam, c)
        if verify_quasi_geodesic(space, qg):
            return qg
    raise GenerationError(f"no valid ({lam}, {c}) curve after {max_retries} attempts")


# ------------------------------------------------------------- distances


def _check_endpoints(qg: QuasiGeodesic, sigma) -> list[int]:
    pts = list(sigma)
    if not pts:
        raise ValueError("empty geodesic")
    if {pts[0], pts[-1]} != {qg.points[0], qg.points[-1]}:
        raise ValueError("geodesic does not join the curve's endpoints")
    return pts


def morse_distance(space, qg: QuasiGeodesic, sigma) -> int:
    """Farthest distance from a curve sample to the geodesic."""
    pts = _check_endpoints(qg, sigma)
    d = as_space(space).dist
    return int(d[np.ix_(np.asarray(qg.points), np.asarray(pts))].min(axis=1).max())


def anti_morse_distance(space, qg: QuasiGeodesic, sigma) -> int:
    """Farthest distance from a geodesic point to the curve."""
    pts = _check_endpoints(qg, sigma)
    d = as_space(space).dist
    return int(d[np.ix_(np.asarray(pts), np.asarray(qg.points))].min(axis=1).max())
