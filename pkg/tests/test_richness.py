import json

import pytest
from hypothesis import given, strategies as st

from hypermorse.graph_spaces import build_control, build_tessellation_patch, build_tree_ball
from hypermorse.richness import (check_condition1, check_condition2, check_richness,
                                 geodesic_pool, proxy_boundary)

import oracles
from conftest import connected_graphs

P20 = build_control("path", 20)
BALL5 = build_tree_ball(3, 5)


class TestPathGraph:
    def test_not_rich_with_witness(self):
        rep = check_richness(P20, seed=0)
        assert not rep.rich
        w = rep.violations[0]
        assert w["condition"] == 1 and w["r2"] >= rep.r0
        # condition 2 holds exactly on a line
        assert rep.fitted["r3"] == rep.fitted["r4"] == 0

    @pytest.mark.parametrize("r0", range(1, 10))
    def test_not_rich_below_half_diameter(self, r0):
        assert not check_richness(P20, r0=r0).rich


class TestTreeBall:
    def test_rich_with_frozen_constants(self):
        rep = check_richness(BALL5, seed=0)
        assert rep.rich and rep.r0 == 2
        assert rep.fitted == {"r1": 0, "r2": 1, "r3": 0, "r4": 1}

    def test_deterministic(self):
        assert check_richness(BALL5, seed=4).to_json() == check_richness(BALL5, seed=4).to_json()

    def test_constants_csv(self):
        text = check_richness(BALL5).constants_csv()
        assert text.splitlines() == ["r0,r1,r2,r3,r4,verdict", "2,0,1,0,1,rich"]


class TestConditions:
    @given(connected_graphs(min_n=3, max_n=10), st.integers(1, 3))
    def test_match_oracle(self, g, r0):
        pool = geodesic_pool(g, proxy_boundary(g))
        d = g.dist.tolist()
        geos = [list(p) for p in pool]
        recs, _, _ = check_condition1(g, pool, r0)
        assert [(r.p, r.q, r.geodesic, r.r1, r.r2) for r in recs] == oracles.richness_condition1(d, geos, r0)
        recs, _, _ = check_condition2(g, pool)
        assert [(r.target, r.p, r.geodesic, r.r3, r.r4) for r in recs] == oracles.richness_condition2(d, geos, geos)

    def test_point_on_target_is_witnessed_by_itself(self):
        g = build_tessellation_patch(7, 3, 2)
        pool = geodesic_pool(g, proxy_boundary(g))[:30]
        recs, _, _ = check_condition2(g, pool)
        for r in recs:
            if r.p in pool[r.target].points:
                assert r.r3 == r.r4 == 0

    def test_residuals_reproducible_from_witnesses(self):
        rep = check_richness(BALL5, seed=1)
        pool = geodesic_pool(BALL5, proxy_boundary(BALL5))
        d = BALL5.dist
        for r in rep.condition1[::97]:
            geo = list(pool[r.geodesic])
            assert r.r1 == d[r.p, geo].min()
            assert r.r2 == abs(d[r.q, geo].min() - d[r.p, r.q])

    @given(connected_graphs(min_n=4, max_n=12), st.data())
    def test_larger_pool_never_hurts(self, g, data):
        full = geodesic_pool(g, range(g.n))
        k = data.draw(st.integers(1, len(full)))
        sub = full[:k]
        _, (a1, a2), _ = check_condition1(g, sub, 1)
        _, (b1, b2), _ = check_condition1(g, full, 1)
        assert max(b1, b2) <= max(a1, a2)
        # condition 2 only compares when the targets are held fixed
        _, (a3, a4), _ = check_condition2(g, sub, targets=sub)
        _, (b3, b4), _ = check_condition2(g, full, targets=sub)
        assert max(b3, b4) <= max(a3, a4)

    def test_sampling_is_seeded(self):
        g = build_tessellation_patch(7, 3, 3)
        a = check_condition1(g, geodesic_pool(g, proxy_boundary(g))[:50], 2, max_pairs=500, seed=9)
        b = check_condition1(g, geodesic_pool(g, proxy_boundary(g))[:50], 2, max_pairs=500, seed=9)
        assert a[2] and a == b and len(a[0]) == 500

    def test_errors(self):
        with pytest.raises(ValueError):
            check_condition1(P20, [], 2)
        with pytest.raises(ValueError):
            check_condition2(P20, [])
        with pytest.raises(ValueError):
            check_richness(P20, endpoints=[3])
        with pytest.raises(ValueError):
            check_condition1(P20, geodesic_pool(P20, [0, 19]), 0)

    def test_proxy_boundary(self):
        assert proxy_boundary(P20) == [0, 19]
        assert proxy_boundary(BALL5) == BALL5.leaves()
        assert proxy_boundary(build_control("cycle", 5)) == [0, 1, 2, 3, 4]

    def test_report_json(self):
        data = json.loads(check_richness(P20).to_json())
        assert data["verdict"] == "not-rich" and data["violations"]
