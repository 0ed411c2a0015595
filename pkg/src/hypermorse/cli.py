"""Command-line driver: ``hypermorse <subcommand> [options]``.

Every subcommand prints one report (JSON by default, CSV with
``--format csv``) and exits 0 when all of its checks pass, 1 when a check
fails and 2 on bad input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction

import numpy as np

from . import __version__
from .bounds import (MorseConstants, anti_morse_bound, contraction_bound, load_constants,
                     morse_bound, prop1_bound, thm3_bound)
from .graph_spaces import (ConstructionError, Graph, build_control, build_random_tree,
                           build_tessellation_patch, build_tree_ball, canonical_geodesic,
                           induced_components, path_within, projection_extent, read_edge_list)
from .metric_core import HalfInteger, four_point_delta, thin_triangle_delta
from .quasi_geodesics import (GenerationError, QuasiGeodesic, as_rational, delta_length,
                              extremal_example, morse_distance, anti_morse_distance,
                              random_quasi_geodesic, taut_replacement, verify_quasi_geodesic)
from .quasi_isometries import (ball_center_shift, displacement, fit_map_constant,
                               fixes_proxy_boundary, verify_quasi_isometry)
from .richness import check_richness

SCHEMA = "hypermorse.report/1"
EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    """Bad flags or input data; reported with exit code 2."""


# ------------------------------------------------------------------ generators

GENERATORS = {
    "tree": (("d", "R"), {}, lambda a: build_tree_ball(a["d"], a["R"])),
    "randtree": (("n",), {"seed": 0}, lambda a: build_random_tree(a["n"], a["seed"])),
    "tess": (("p", "q", "layers"), {}, lambda a: build_tessellation_patch(a["p"], a["q"], a["layers"])),
    "path": (("n",), {}, lambda a: build_control("path", a["n"])),
    "cycle": (("n",), {}, lambda a: build_control("cycle", a["n"])),
    "grid": (("n",), {}, lambda a: build_control("grid", a["n"])),
}


def parse_generator(text: str) -> tuple[str, dict[str, int]]:
    """Parse ``kind:key=val,key=val`` strictly."""
    kind, sep, rest = text.partition(":")
    if kind not in GENERATORS:
        raise InputError(f"unknown generator {kind!r}; choose from {', '.join(GENERATORS)}")
    required, optional, _ = GENERATORS[kind]
    args = dict(optional)
    given = set()
    for item in filter(None, rest.split(",")) if sep else ():
        key, eq, value = item.partition("=")
        key = key.strip()
        if not eq:
            raise InputError(f"generator option {item!r} is not key=value")
        if key not in required and key not in optional:
            raise InputError(f"unknown key {key!r} for generator {kind!r}")
        if key in given:
            raise InputError(f"duplicate key {key!r}")
        try:
            args[key] = int(value)
        except ValueError:
            raise InputError(f"{kind}:{key} needs an integer, got {value!r}") from None
        given.add(key)
    missing = [k for k in required if k not in given]
    if missing:
        raise InputError(f"generator {kind!r} is missing {', '.join(missing)}")
    return kind, args


def load_graph(args) -> Graph:
    if bool(args.gen) == bool(args.input):
        raise InputError("give exactly one of --gen or --input")
    if args.gen:
        kind, params = parse_generator(args.gen)
        return GENERATORS[kind][2](params)
    return read_edge_list(args.input)


def load_consts(args) -> MorseConstants:
    consts = load_constants(args.constants) if args.constants else MorseConstants()
    if args.a2_denominator is not None:
        consts = consts.replace(a2_exponent_denominator=args.a2_denominator)
    return consts


# ---------------------------------------------------------------------- report


def _plain(x):
    if isinstance(x, HalfInteger):
        x = x.as_fraction()
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else str(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return x


@dataclass
class Report:
    experiment: str
    space: dict
    parameters: dict
    results: dict = field(default_factory=dict)
    rows: list[dict] = field(default_factory=list)
    checks: dict[str, bool] = field(default_factory=dict)
    started: float = field(default_factory=time.perf_counter)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return _plain({
            "schema": SCHEMA,
            "version": __version__,
            "experiment": self.experiment,
            "space": self.space,
            "parameters": self.parameters,
            "results": self.results,
            "rows": self.rows,
            "checks": self.checks,
            "passed": self.passed,
            "timing": {
                "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
                "wall_clock_s": round(time.perf_counter() - self.started, 4),
            },
        })

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(self.to_dict(), indent=2) + "\n"
        rows = _plain(self.rows) or [_plain({**self.results, "passed": self.passed})]
        columns: list[str] = []
        for r in rows:
            columns += [k for k in r if k not in columns]
        buf = io.StringIO()
        w = csv.DictWriter(buf, columns, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (json.dumps(v) if isinstance(v, (list, dict)) else v) for k, v in r.items()})
        return buf.getvalue()


def describe(g: Graph) -> dict:
    return {"descriptor": g.name, "vertices": g.n, "edges": len(g.edges)}


def workers(jobs: int) -> int:
    cap = os.environ.get("HYPERMORSE_THREADS")
    limit = int(cap) if cap else (os.cpu_count() or 1)
    return max(1, min(limit, jobs))


def trial_seed(master: int, index: int) -> int:
    return int(np.random.default_rng([master, index]).integers(2**63))


def measured_delta(g: Graph, args):
    if args.hyp_delta is not None:
        return as_rational(args.hyp_delta)
    try:
        return four_point_delta(g, max_points=args.max_points).as_fraction()
    except ValueError as e:
        raise InputError(f"{e}; pass --max-points or --hyp-delta") from None


# ----------------------------------------------------------------- subcommands


def cmd_hyperbolicity(args) -> Report:
    g = load_graph(args)
    rep = Report("hyperbolicity", describe(g), {"max_points": args.max_points, "seed": args.seed})
    try:
        four = four_point_delta(g, max_points=args.max_points, sample=args.sample, seed=args.seed)
    except ValueError as e:
        raise InputError(str(e)) from None
    thin = thin_triangle_delta(g, lambda u, v: canonical_geodesic(g, u, v).points, seed=args.seed)
    rep.results = {
        "four_point_delta": four,
        "four_point_exact": args.sample is None,
        "thin_triangle_delta": thin,
        "vertices": g.n,
    }
    return rep


def _default_Delta(args) -> int:
    if args.delta_param is not None:
        return int(args.delta_param)
    return max(1, math.ceil(2 * as_rational(args.c)))


def _far_pair(g: Graph, rng, min_dist: int) -> tuple[int, int]:
    us, vs = np.nonzero(g.dist >= min_dist)
    if len(us) == 0:
        raise InputError(f"no vertex pair at distance >= {min_dist}")
    k = int(rng.integers(len(us)))
    return int(us[k]), int(vs[k])


def curve_checks(g: Graph, qg: QuasiGeodesic, Delta: int) -> dict:
    """Delta-length bounds and taut replacement for one curve."""
    lam, c = qg.lam, qg.c
    res = delta_length(g, qg, Delta)
    R = g.dist[qg.points[0], qg.points[-1]]
    out = {"Delta": Delta, "delta_length": res.value, "interval": qg.interval_length,
           "endpoint_distance": int(R)}
    checks = {"delta_length_vs_interval": res.value <= 2 * lam * qg.interval_length}
    if R >= c:
        checks["delta_length_vs_endpoints"] = res.value <= 4 * lam * lam * R
    if Delta >= c and not res.degenerate:
        taut = taut_replacement(g, qg, Delta)
        checks["taut_verifies"] = bool(verify_quasi_geodesic(g, taut))
        checks["taut_length"] = taut.classical_length(g) == res.value
        out["taut_c"] = taut.c
    return out, checks


def _morse_trial(g: Graph, args, lam, c, delta, H, Delta, index: int) -> dict:
    rng = np.random.default_rng(trial_seed(args.seed, index))
    row = {"trial": index, "lambda": lam, "c": c, "delta": delta}
    try:
        u, v = _far_pair(g, rng, max(1, Delta))
        qg = random_quasi_geodesic(g, (u, v), lam, c, seed=int(rng.integers(2**31)))
    except GenerationError as e:
        return {**row, "error": str(e), "ok": False}
    sigma = canonical_geodesic(g, u, v)
    checks = {"verifies": bool(verify_quasi_geodesic(g, qg))}
    morse = morse_distance(g, qg, sigma)
    checks["morse_within_bound"] = morse <= H
    extra, more = curve_checks(g, qg, Delta)
    checks.update(more)
    row.update({"u": u, "v": v, "samples": len(qg), "measured": morse, "bound": H,
                "anti_morse": anti_morse_distance(g, qg, sigma)})
    if lam > 1:
        row["anti_morse_bound"] = anti_morse_bound(lam, c, delta, args.consts)
    row.update(extra)
    row["checks"] = checks
    row["ok"] = all(checks.values())
    return row


def cmd_morse(args) -> Report:
    lam, c = as_rational(args.lam), as_rational(args.c)
    if lam < 1 or c < 0:
        raise InputError("need --lambda >= 1 and --c >= 0")
    if args.extremal:
        return _morse_extremal(args, lam, c)
    g = load_graph(args)
    Delta = _default_Delta(args)
    params = {"lambda": lam, "c": c, "Delta": Delta, "trials": args.trials, "seed": args.seed}
    rep = Report("morse", describe(g), params)
    if args.trials <= 0:
        return rep
    delta = measured_delta(g, args)
    H = morse_bound(lam, c, delta, args.consts)
    with ThreadPoolExecutor(workers(args.trials)) as pool:
        rows = list(pool.map(lambda i: _morse_trial(g, args, lam, c, delta, H, Delta, i),
                             range(args.trials)))
    rep.rows = rows
    rep.results = {"delta": delta, "morse_bound": H,
                   "max_measured": max((r.get("measured", 0) for r in rows), default=0),
                   "failed_trials": [r["trial"] for r in rows if not r["ok"]]}
    rep.checks = {f"trial_{r['trial']}": r["ok"] for r in rows}
    return rep


def _morse_extremal(args, lam, c) -> Report:
    if lam.denominator != 1 or c.denominator != 1 or c < 1 or (lam * c) % 2:
        raise InputError("--extremal needs integers lambda >= 1, c >= 1 with lambda * c even")
    lam, c = int(lam), int(c)
    span = lam * lam * c // 2
    g = load_graph(args) if (args.gen or args.input) else build_control("path", span + 1)
    try:
        qg = extremal_example(lam, c, g)
    except ConstructionError as e:
        raise InputError(str(e)) from None
    a = qg.points[0]
    sigma = canonical_geodesic(g, a, a)
    measured = morse_distance(g, qg, sigma)
    H = morse_bound(lam, c, 0, args.consts)
    rep = Report("morse-extremal", describe(g), {"lambda": lam, "c": c})
    rep.rows = [{"lambda": lam, "c": c, "measured": measured, "expected": span, "bound": H}]
    rep.results = {"measured": measured, "expected": span, "morse_bound": H}
    rep.checks = {"verifies": bool(verify_quasi_geodesic(g, qg)),
                  "measured_is_extremal": measured == span,
                  "within_bound": measured <= H}
    return rep


def cmd_displacement(args) -> Report:
    g = load_graph(args)
    lam, c = as_rational(args.lam), as_rational(args.c)
    if lam.denominator != 1 or c.denominator != 1:
        raise InputError("displacement needs integer --lambda and --c")
    lam, c = int(lam), int(c)
    O = args.center
    try:
        f = ball_center_shift(g, O, lam, c)
    except ConstructionError as e:
        raise InputError(str(e)) from None
    R = int(g.dist[O].max())
    moved = displacement(f, O)
    leaves = g.leaves()
    bound = prop1_bound(lam, c, R, args.consts)
    rep = Report("displacement", describe(g), {"lambda": lam, "c": c, "center": O, "radius": R})
    rep.results = {"displacement": moved, "prop1_bound": bound, "fitted_c": fit_map_constant(f)}
    consts = args.consts
    if args.richness:
        consts = consts.replace(**richness_constants(args.richness))
        rep.parameters["richness"] = {k: getattr(consts, k) for k in ("r0", "r1", "r2", "r3", "r4")}
    if lam > 1:
        rep.results["thm3_bound"] = thm3_bound(lam, c, 0, consts)
    rep.checks = {
        "verifies": bool(verify_quasi_isometry(f)),
        "boundary_fixed": fixes_proxy_boundary(f, leaves),
        "displacement_is_half_lambda_c": 2 * moved == lam * c,
        "within_prop1_bound": moved <= bound,
        "within_radius": moved <= R,
    }
    if args.richness and lam > 1:
        rep.checks["within_thm3_bound"] = moved <= rep.results["thm3_bound"]
    return rep


def richness_constants(path: str) -> dict[str, float]:
    """``r0``..``r4`` from a saved ``richness`` report."""
    try:
        with open(path) as fh:
            data = json.load(fh)
        out = {"r0": float(data["parameters"]["r0"])}
        out.update({k: float(v) for k, v in data["results"]["fitted"].items()})
    except (KeyError, TypeError, json.JSONDecodeError) as e:
        raise InputError(f"{path} is not a richness report: {e}") from None
    return out


def _endpoints(g: Graph, text: str | None) -> tuple[int, int]:
    if not text:
        return g.diametral_pair()
    try:
        u, v = (int(x) for x in text.split(","))
    except ValueError:
        raise InputError("--endpoints takes 'u,v'") from None
    if not (0 <= u < g.n and 0 <= v < g.n):
        raise InputError("endpoint out of range")
    return u, v


def cmd_contraction(args) -> Report:
    g = load_graph(args)
    u, v = _endpoints(g, args.endpoints)
    sigma = canonical_geodesic(g, u, v)
    to_sigma = g.dist[:, list(sigma)].min(axis=1)
    delta = measured_delta(g, args)
    Delta = int(args.delta_param) if args.delta_param is not None else 1
    threshold = Delta + 58 * delta
    rep = Report("contraction", describe(g), {"endpoints": [u, v], "Delta": Delta})
    curves = []
    if args.curve:
        with open(args.curve) as fh:
            qg = QuasiGeodesic.from_json(fh.read())
        curves.append((int(to_sigma[list(qg.points)].min()), list(qg.points)))
    else:
        far = int(np.argmax(to_sigma))
        top = int(to_sigma[far])
        radii = args.radii or list(range(1, top + 1))
        for r in radii:
            keep = np.nonzero(to_sigma >= r)[0].tolist()
            comp = next((c for c in induced_components(g, keep) if far in c), None)
            if comp is None:
                continue
            # a path inside the component between its extreme projections
            idx = np.argmin(g.dist[np.ix_(comp, list(sigma))], axis=1)
            a, b = comp[int(np.argmin(idx))], comp[int(np.argmax(idx))]
            curves.append((r, path_within(g, a, b, set(comp))))
    prev = None
    for r, curve in curves:
        extent = projection_extent(g, curve, sigma)
        row = {"distance": r, "samples": len(curve), "extent": extent}
        ok = True
        if delta == 0:
            ok = extent == 0
            row["bound"] = 0
        elif r >= threshold and len(curve) > 1:
            L = delta_length(g, curve, Delta).value
            row["bound"] = contraction_bound(Delta, float(delta), r, L, args.consts)
            ok = extent <= row["bound"]
        else:
            row["precondition_met"] = False
        if prev is not None and not args.curve:
            ok = ok and extent <= prev
        prev = extent
        row["ok"] = ok
        rep.rows.append(row)
    rep.results = {"delta": delta, "threshold": threshold, "curves": len(curves)}
    rep.checks = {f"distance_{r['distance']}": r["ok"] for r in rep.rows}
    return rep


def cmd_richness(args) -> Report:
    g = load_graph(args)
    endpoints = None
    if args.pool is not None:
        endpoints = [int(x) for x in args.pool.split(",") if x.strip()]
        if len(endpoints) < 2:
            raise InputError("geodesic pool needs at least two endpoints")
    try:
        rr = check_richness(g, endpoints, args.r0, seed=args.seed,
                            max_records=args.max_records, max_pool=args.max_pool)
    except ValueError as e:
        raise InputError(str(e)) from None
    rep = Report("richness", describe(g), {"r0": rr.r0, "seed": args.seed, "pool": rr.pool})
    rep.results = {"verdict": "rich" if rr.rich else "not-rich", "fitted": rr.fitted,
                   "thresholds": rr.thresholds, "sampled": rr.sampled,
                   "witnesses": rr.violations[:10], "violation_count": len(rr.violations)}
    rep.rows = [{"r0": rr.r0, **rr.fitted, "verdict": rep.results["verdict"]}]
    if args.require_rich:
        rep.checks = {"rich": rr.rich}
    return rep


def cmd_delta_length(args) -> Report:
    g = load_graph(args)
    if args.qg:
        with open(args.qg) as fh:
            qg = QuasiGeodesic.from_json(fh.read())
        args.c = qg.c
    else:
        rng = np.random.default_rng(trial_seed(args.seed, 0))
        Delta = _default_Delta(args)
        u, v = _far_pair(g, rng, Delta)
        try:
            qg = random_quasi_geodesic(g, (u, v), args.lam, args.c, seed=int(rng.integers(2**31)))
        except GenerationError as e:
            raise InputError(str(e)) from None
    Delta = _default_Delta(args)
    if Delta < 1:
        raise InputError("--delta-param must be >= 1")
    try:
        g.metric.check_id(*qg.points)
    except IndexError as e:
        raise InputError(str(e)) from None
    res = delta_length(g, qg, Delta)
    rep = Report("delta-length", describe(g), {"lambda": qg.lam, "c": qg.c, "Delta": Delta})
    out, checks = curve_checks(g, qg, Delta)
    rep.results = {**out, "witness": list(res.witness), "degenerate": res.degenerate}
    rep.checks = {"verifies": bool(verify_quasi_geodesic(g, qg)), **checks}
    return rep


# ---------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("space")
    src.add_argument("--gen", help="generator spec, e.g. tree:d=3,R=4 or tess:p=7,q=3,layers=4")
    src.add_argument("--input", help="edge-list file ('u v' per line)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--constants", help="constants file (JSON or 'name = value' lines)")
    common.add_argument("--a2-denominator", type=int, choices=(38, 28), default=None)
    common.add_argument("--max-points", type=int, default=400,
                        help="refuse exact four-point delta above this many vertices")
    common.add_argument("--hyp-delta", help="use this hyperbolicity constant instead of measuring")

    curve = argparse.ArgumentParser(add_help=False)
    curve.add_argument("--lambda", dest="lam", default="1")
    curve.add_argument("--c", default="0")
    curve.add_argument("--delta-param", type=int, default=None, help="Delta (default max(1, 2c))")

    p = argparse.ArgumentParser(prog="hypermorse", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"hypermorse {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("hyperbolicity", parents=[common], help="four-point and thin-triangle delta")
    s.add_argument("--sample", type=int, default=None, help="sampled lower bound with this many quadruples")
    s.set_defaults(func=cmd_hyperbolicity)

    s = sub.add_parser("morse", parents=[common, curve], help="random quasi-geodesics vs the Morse bound")
    s.add_argument("--trials", type=int, default=10)
    s.add_argument("--extremal", action="store_true", help="run the back-and-forth extremal curve")
    s.set_defaults(func=cmd_morse)

    s = sub.add_parser("displacement", parents=[common, curve], help="tree-ball center shift")
    s.add_argument("--center", type=int, default=0)
    s.add_argument("--richness", help="richness report supplying r0..r4 for the richness-based displacement bound")
    s.set_defaults(func=cmd_displacement)

    s = sub.add_parser("contraction", parents=[common, curve], help="projection extent of far curves")
    s.add_argument("--endpoints", help="geodesic endpoints 'u,v' (default: a diametral pair)")
    s.add_argument("--curve", help="quasi-geodesic JSON to measure instead of the ring sweep")
    s.add_argument("--radii", type=int, nargs="+", help="distances for the ring sweep")
    s.set_defaults(func=cmd_contraction)

    s = sub.add_parser("richness", parents=[common], help="geodesic richness against a pool")
    s.add_argument("--r0", type=int, default=None)
    s.add_argument("--pool", help="comma-separated pool endpoints (default: proxy boundary)")
    s.add_argument("--max-records", type=int, default=10_000)
    s.add_argument("--max-pool", type=int, default=2_000, help="sample at most this many pool geodesics")
    s.add_argument("--require-rich", action="store_true", help="exit 1 unless the verdict is rich")
    s.set_defaults(func=cmd_richness)

    s = sub.add_parser("delta-length", parents=[common, curve], help="Delta-length of a curve")
    s.add_argument("--qg", help="quasi-geodesic JSON {params, points, lambda, c}")
    s.set_defaults(func=cmd_delta_length)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.consts = load_consts(args)
        report = args.func(args)
    except (InputError, ConstructionError, ValueError, OSError) as e:
        print(f"hypermorse: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    text = report.render(args.format)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
