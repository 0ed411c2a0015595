"""Finite self-quasi-isometries and the tree-ball center shift."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .graph_spaces import ConstructionError, Graph, canonical_geodesic
from .metric_core import FiniteMetricSpace, as_space
from .quasi_geodesics import Check, as_rational, sandwich_bad_mask


@dataclass(frozen=True, eq=False)
class QuasiIsometryMap:
    space: FiniteMetricSpace
    image: Mapping[int, int]
    lam: Fraction = Fraction(1)
    c: Fraction = Fraction(0)
    domain: tuple[int, ...] = field(default=())

    def __post_init__(self):
        space = as_space(self.space)
        image = {int(k): int(v) for k, v in self.image.items()}
        domain = tuple(int(x) for x in self.domain) or tuple(sorted(image))
        missing = [x for x in domain if x not in image]
        if missing:
            raise ValueError(f"map is undefined on {missing[:5]}")
        space.check_id(*domain, *(image[x] for x in domain))
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "image", image)
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "lam", as_rational(self.lam))
        object.__setattr__(self, "c", as_rational(self.c))

    def __call__(self, x: int) -> int:
        return self.image[x]

    def arrays(self):
        dom = np.asarray(self.domain, dtype=np.intp)
        img = np.asarray([self.image[x] for x in self.domain], dtype=np.intp)
        return dom, img

    def to_dict(self) -> dict:
        return {"map": [[x, self.image[x]] for x in self.domain],
                "lambda": str(self.lam), "c": str(self.c)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, space, data: dict) -> "QuasiIsometryMap":
        pairs = [(int(a), int(b)) for a, b in data["map"]]
        return cls(as_space(space), dict(pairs), as_rational(data["lambda"]),
                   as_rational(data["c"]), tuple(a for a, _ in pairs))


def identity_map(space, domain: Iterable[int] | None = None) -> QuasiIsometryMap:
    space = as_space(space)
    dom = range(space.n) if domain is None else domain
    return QuasiIsometryMap(space, {x: x for x in dom})


def verify_quasi_isometry(m: QuasiIsometryMap, block: int = 512) -> Check:
    """Exhaustive pairwise sandwich check over the domain."""
    d = m.space.dist
    dom, img = m.arrays()
    k = len(dom)
    cols = np.arange(k)
    for start in range(0, k, block):
        rows = np.arange(start, min(k, start + block))
        bad = sandwich_bad_mask(d[np.ix_(dom[rows], dom)], d[np.ix_(img[rows], img)], m.lam, m.c)
        hits = np.argwhere(bad & (cols[None, :] > rows[:, None]))
        if len(hits):
            i, j = hits[0]
            return Check(False, (int(dom[rows[i]]), int(dom[j])))
    return Check(True)


def fit_map_constant(m: QuasiIsometryMap, lam=None) -> Fraction:
    """Least ``c`` for which the map is a ``(lam, c)`` quasi-isometry."""
    lam = m.lam if lam is None else as_rational(lam)
    d = m.space.dist
    dom, img = m.arrays()
    gaps = d[np.ix_(dom, dom)]
    dists = d[np.ix_(img, img)]
    ln, ld = lam.numerator, lam.denominator
    low = int((gaps * ld - dists * ln).max())
    high = int((dists * ld - gaps * ln).max())
    return max(Fraction(0), Fraction(low, ln), Fraction(high, ld))


def displacement(m: QuasiIsometryMap, O: int) -> int:
    return m.space.d(O, m.image[O])


def fixes_proxy_boundary(m: QuasiIsometryMap, boundary: Iterable[int], tolerance: int = 0) -> bool:
    """Every boundary point moves at most ``tolerance``."""
    boundary = list(boundary)
    missing = [b for b in boundary if b not in m.image]
    if missing:
        raise ValueError(f"boundary points {missing[:5]} are outside the domain")
    return all(m.space.d(b, m.image[b]) <= tolerance for b in boundary)


def ball_center_shift(tree_ball: Graph, O: int, lam: int, c: int) -> QuasiIsometryMap:
    """Self-map of a tree ball that moves ``O`` by ``lam * c / 2``.

    Inside the ball ``B1`` of radius ``lam * c`` about ``O`` (capped at the
    ball radius): the segment from ``O`` to the chosen image ``f(O)``
    collapses to ``f(O)``, and for every point ``a`` on the sphere bounding
    ``B1`` the path from ``a`` to its
    projection ``a'`` on that segment is stretched linearly onto the path from
    ``a`` to ``f(O)``, rounding toward ``a``. Everything outside ``B1`` is
    fixed, the sphere included.
    """
    if not tree_ball.is_tree():
        raise ConstructionError("center shift is defined on trees")
    lam, c = int(lam), int(c)
    if lam < 1 or c < 0 or (lam * c) % 2:
        raise ConstructionError("need integers lambda >= 1, c >= 0 with lambda * c even")
    d = tree_ball.dist
    radius = int(d[O].max())
    shift = lam * c // 2
    if radius <= shift:
        raise ConstructionError(f"ball radius {radius} must exceed the shift lambda * c / 2 = {shift}")
    inner = min(lam * c, radius)
    n = tree_ball.n
    image = {x: x for x in range(n)}
    if shift == 0:
        return QuasiIsometryMap(tree_ball.metric, image, lam, c)

    target = int(np.nonzero(d[O] == shift)[0].min())
    seg = canonical_geodesic(tree_ball, O, target).points
    seg_arr = np.asarray(seg)
    for a in np.nonzero(d[O] == inner)[0].tolist():
        to_seg = d[a, seg_arr]
        a_proj = seg[int(np.argmin(to_seg))]
        ell = int(to_seg.min())
        extra = int(d[a_proj, target])
        route = canonical_geodesic(tree_ball, a, target).points   # a .. a_proj .. target
        for t in range(1, ell + 1):
            x = route[t]
            image[x] = route[(t * (ell + extra)) // ell]
    for x in seg:
        image[x] = target
    return QuasiIsometryMap(tree_ball.metric, image, lam, c)
