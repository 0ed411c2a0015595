"""Four-point delta of {p,q} patches layer by layer, next to square-grid controls."""
from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

from hypermorse.graph_spaces import build_control, build_tessellation_patch
from hypermorse.metric_core import four_point_delta


@dataclass
class PlateauConfig:
    p: int = 7
    q: int = 3
    max_layers: int = 4
    grids: tuple[int, ...] = (4, 6, 8, 10)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=7)
    ap.add_argument("--q", type=int, default=3)
    ap.add_argument("--max-layers", type=int, default=4)
    a = ap.parse_args(argv)
    cfg = PlateauConfig(a.p, a.q, a.max_layers)
    print("space,vertices,delta,seconds")
    for L in range(1, cfg.max_layers + 1):
        g = build_tessellation_patch(cfg.p, cfg.q, L)
        t = time.perf_counter()
        delta = four_point_delta(g, max_points=None)
        print(f"{g.name},{g.n},{delta},{time.perf_counter() - t:.2f}")
    for n in cfg.grids:
        g = build_control("grid", n)
        t = time.perf_counter()
        delta = four_point_delta(g, max_points=None)
        print(f"{g.name},{g.n},{delta},{time.perf_counter() - t:.2f}")


if __name__ == "__main__":
    main()
