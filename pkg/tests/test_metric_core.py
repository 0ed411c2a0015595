import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from hypermorse.graph_spaces import build_control, build_tree_ball, canonical_geodesic, project_to_geodesic
from hypermorse.metric_core import (FiniteMetricSpace, HalfInteger, four_point_delta,
                                    four_point_delta_bruteforce, gromov_product, thin_triangle_delta,
                                    visual_distance, visual_distance_violations)

import oracles
from conftest import connected_graphs, trees


def geod(g):
    return lambda u, v: canonical_geodesic(g, u, v).points


class TestHalfInteger:
    def test_ordering_and_text(self):
        assert HalfInteger(5) == Fraction(5, 2)
        assert str(HalfInteger(5)) == "5/2"
        assert str(HalfInteger(4)) == "2"
        assert HalfInteger(3) < 2 < HalfInteger(5)
        assert float(HalfInteger(1)) == 0.5

    def test_from_value(self):
        assert HalfInteger.from_value(Fraction(7, 2)).doubled == 7
        with pytest.raises(ValueError):
            HalfInteger.from_value(Fraction(1, 3))


class TestMetricSpace:
    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            FiniteMetricSpace(np.zeros((2, 3), dtype=int))

    def test_validate_catches_triangle_violation(self):
        bad = FiniteMetricSpace(np.array([[0, 1, 5], [1, 0, 1], [5, 1, 0]]))
        with pytest.raises(ValueError):
            bad.validate()

    def test_out_of_range_id(self):
        g = build_control("path", 4)
        with pytest.raises(IndexError):
            gromov_product(g, 0, 9, 1)


class TestGromovProduct:
    def test_base_point_is_an_argument(self):
        g = build_control("path", 6)
        assert gromov_product(g, 2, 5, 2) == 0

    def test_equal_points(self):
        g = build_control("path", 6)
        assert gromov_product(g, 4, 4, 1) == 3

    def test_path_hand_value(self):
        assert gromov_product(build_control("path", 4), 0, 3, 1) == 0

    def test_half_integer_value(self):
        assert gromov_product(build_control("cycle", 3), 1, 2, 0) == Fraction(1, 2)

    @given(connected_graphs())
    def test_nonnegative_and_matches_formula(self, g):
        d = oracles.bfs_distances(g.n, g.edges)
        for x, y, p in itertools.product(range(g.n), repeat=3):
            gp = gromov_product(g, x, y, p)
            assert gp >= 0
            assert gp == oracles.gromov(d, x, y, p)


class TestFourPointDelta:
    @pytest.mark.parametrize("n, expected", [(3, 0), (4, 1), (5, Fraction(1, 2)), (6, 1), (7, 1), (8, 2)])
    def test_cycles_against_frozen_oracle(self, n, expected):
        assert four_point_delta(build_control("cycle", n)) == expected

    def test_single_point(self):
        assert four_point_delta(FiniteMetricSpace(np.zeros((1, 1), dtype=int))) == 0

    def test_size_guard(self):
        g = build_control("path", 200)
        with pytest.raises(ValueError):
            four_point_delta(g)
        assert four_point_delta(g, max_points=None) == 0

    def test_sampled_is_a_lower_bound(self):
        g = build_control("grid", 6)
        exact = four_point_delta(g)
        sampled = four_point_delta(g, max_points=10, sample=2000, seed=3)
        assert sampled <= exact
        assert sampled == four_point_delta(g, max_points=10, sample=2000, seed=3)

    @given(connected_graphs(max_n=9))
    def test_kernel_matches_literal_oracle(self, g):
        d = oracles.bfs_distances(g.n, g.edges)
        expected = oracles.four_point_delta(d)
        assert four_point_delta(g) == expected
        assert four_point_delta_bruteforce(g) == expected

    @given(trees(max_n=40))
    def test_trees_are_zero(self, t):
        assert four_point_delta(t) == 0

    @given(connected_graphs(max_n=12), st.randoms(use_true_random=False))
    def test_relabel_invariance(self, g, rnd):
        perm = list(range(g.n))
        rnd.shuffle(perm)
        assert four_point_delta(g.metric.relabel(perm)) == four_point_delta(g)


class TestThinTriangles:
    def test_tree_is_zero(self):
        g = build_tree_ball(3, 3)
        assert thin_triangle_delta(g, geod(g)) == 0

    def test_triangle_graph(self):
        g = build_control("cycle", 3)
        assert thin_triangle_delta(g, geod(g)) == 0

    def test_single_edge(self):
        g = build_control("path", 2)
        assert thin_triangle_delta(g, geod(g)) == 0

    def test_cycle_value(self):
        g = build_control("cycle", 8)
        assert thin_triangle_delta(g, geod(g)) == 2

    def test_provider_errors_propagate(self):
        g = build_control("cycle", 5)

        def broken(u, v):
            raise RuntimeError("no geodesic")
        with pytest.raises(RuntimeError):
            thin_triangle_delta(g, broken)


class TestProjections:
    def test_vertex_triangles_miss_one_unit(self):
        # K3 has vertex-triangle delta 0, yet vertex 2 projects to both ends of edge 01
        g = build_control("cycle", 3)
        assert thin_triangle_delta(g, geod(g)) == 0
        assert project_to_geodesic(g, 2, canonical_geodesic(g, 0, 1)) == {0, 1}
        # and the side sum through foot 2 of vertex 0 on [1, 2] overshoots |01| by 1
        assert g.dist[0, 2] + g.dist[1, 2] - g.dist[0, 1] == 1

    @given(connected_graphs(max_n=11))
    def test_projection_spread_within_four_delta(self, g):
        delta = thin_triangle_delta(g, geod(g))
        for u, v in itertools.combinations(range(g.n), 2):
            sigma = canonical_geodesic(g, u, v)
            for x in range(g.n):
                idx = [sigma.index(p) for p in project_to_geodesic(g, x, sigma)]
                assert max(idx) - min(idx) <= 4 * delta + 1     # +1: vertices only

    @given(connected_graphs(max_n=11), st.data())
    def test_side_sum_inequality(self, g, data):
        delta = thin_triangle_delta(g, geod(g))
        d = g.dist
        a = data.draw(st.integers(0, g.n - 1))
        b = data.draw(st.integers(0, g.n - 1))
        w = data.draw(st.integers(0, g.n - 1))
        sigma = canonical_geodesic(g, b, w)
        assume(a not in sigma.points)
        for c in project_to_geodesic(g, a, sigma):
            s = d[a, c] + d[b, c]
            # one unit of slack: vertex projections sit up to 1/2 off the true foot
            assert s - 2 * delta - 1 <= d[a, b] <= s + 8 * delta


class TestVisualDistance:
    def test_same_point(self):
        g = build_control("path", 6)
        assert visual_distance(g, 4, 4, 1) == pytest.approx(math.exp(-3))

    def test_base_point(self):
        g = build_control("cycle", 6)
        assert visual_distance(g, 2, 5, 2) == 1.0

    @given(connected_graphs(max_n=14))
    def test_change_of_base_point(self, g):
        assert visual_distance_violations(g) == []

    def test_change_of_base_point_matches_pointwise(self):
        g = build_control("grid", 3)
        d = g.dist
        for xi, eta, p, q in itertools.product(range(g.n), repeat=4):
            lhs = visual_distance(g, xi, eta, q)
            rhs = math.exp(d[p, q]) * visual_distance(g, xi, eta, p)
            assert lhs <= rhs * (1 + 1e-12)
