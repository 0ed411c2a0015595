"""Sweep lambda at fixed c and write plot-ready CSV rows (lambda, measured, bound).

Two families per lambda:
  anti    deepest detour around the midpoint of a diametral geodesic of a {p,q} patch
  morse   back-and-forth extremal curve on a path
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from hypermorse.bounds import anti_morse_bound, morse_bound
from hypermorse.graph_spaces import build_control, build_tessellation_patch, canonical_geodesic
from hypermorse.metric_core import four_point_delta
from hypermorse.quasi_geodesics import deepest_detour, extremal_example, morse_distance


@dataclass
class SweepConfig:
    lams: list[int] = field(default_factory=lambda: [2, 4, 8, 16])
    c: int = 2
    p: int = 7
    q: int = 3
    layers: int = 6
    delta: str | None = "5/2"      # None: measure (slow beyond ~400 vertices)


def run(cfg: SweepConfig):
    g = build_tessellation_patch(cfg.p, cfg.q, cfg.layers)
    delta = float(four_point_delta(g, max_points=None)) if cfg.delta is None else float(Fraction(cfg.delta))
    sigma = canonical_geodesic(g, *g.diametral_pair())
    line = build_control("path", max(cfg.lams) ** 2 * cfg.c // 2 + 1)
    for lam in cfg.lams:
        depth, _ = deepest_detour(g, sigma, lam, cfg.c)
        yield {"family": "anti", "lambda": lam, "c": cfg.c, "measured": depth,
               "normalized": depth / math.log(lam), "bound": anti_morse_bound(lam, cfg.c, delta)}
        qg = extremal_example(lam, cfg.c, line)
        a = qg.points[0]
        H = morse_distance(line, qg, canonical_geodesic(line, a, a))
        yield {"family": "morse", "lambda": lam, "c": cfg.c, "measured": H,
               "normalized": H / lam ** 2, "bound": float(morse_bound(lam, cfg.c, 0))}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lams", type=int, nargs="+", default=SweepConfig().lams)
    ap.add_argument("--c", type=int, default=2)
    ap.add_argument("--layers", type=int, default=6)
    ap.add_argument("--delta", default="5/2", help="hyperbolicity constant; 'measure' to compute it")
    a = ap.parse_args(argv)
    cfg = SweepConfig(a.lams, a.c, layers=a.layers, delta=None if a.delta == "measure" else a.delta)
    w = csv.DictWriter(sys.stdout, ["family", "lambda", "c", "measured", "normalized", "bound"],
                       lineterminator="\n")
    w.writeheader()
    for row in run(cfg):
        w.writerow(row)


if __name__ == "__main__":
    main()
