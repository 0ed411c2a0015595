import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hypermorse.graph_spaces import (ConstructionError, Graph, build_control, build_random_tree,
                                     build_tessellation_patch, build_tree_ball, canonical_geodesic,
                                     edge_list_text, induced_components, path_within,
                                     project_to_geodesic, projection_extent, read_edge_list,
                                     tree_ball_size, write_edge_list)
from hypermorse.metric_core import four_point_delta

import oracles
from conftest import connected_graphs, trees


class TestGraph:
    def test_rejects_disconnected(self):
        with pytest.raises(ConstructionError, match="disconnected"):
            Graph(4, ((0, 1), (2, 3)))

    @pytest.mark.parametrize("edges", [((0, 0),), ((0, 1), (1, 0)), ((0, 5),)])
    def test_rejects_bad_edges(self, edges):
        with pytest.raises(ConstructionError):
            Graph(2, edges)

    @given(connected_graphs())
    def test_distances_match_bfs(self, g):
        assert g.dist.tolist() == oracles.bfs_distances(g.n, g.edges)


class TestTreeBall:
    @pytest.mark.parametrize("d, R", [(3, 1), (3, 2), (4, 3), (5, 2)])
    def test_counts(self, d, R):
        g = build_tree_ball(d, R)
        assert g.n == tree_ball_size(d, R) == oracles.tree_ball_count(d, R)
        assert g.is_tree()
        assert int(g.dist[0].max()) == R

    def test_small_values(self):
        assert build_tree_ball(3, 1).n == 4
        assert build_tree_ball(3, 2).n == 10

    def test_delta_zero(self):
        assert four_point_delta(build_tree_ball(3, 4)) == 0

    def test_size_guard(self):
        with pytest.raises(ConstructionError):
            build_tree_ball(3, 40)

    def test_random_tree_is_seeded(self):
        a, b = build_random_tree(50, seed=7), build_random_tree(50, seed=7)
        assert a.edges == b.edges and a.is_tree()


class TestTessellation:
    # vertex counts of the {7,3} patch per layer; cross-checked below by
    # girth 7 and by cycle rank = number of heptagons (1, 7, 21, 56, 147 per layer)
    HEPTAGONAL = {1: 7, 2: 35, 3: 112, 4: 315, 5: 847}
    FACES = {1: 1, 2: 8, 3: 29, 4: 85, 5: 232}

    @pytest.mark.parametrize("layers", [1, 2, 3, 4, 5])
    def test_heptagonal_counts(self, layers):
        g = build_tessellation_patch(7, 3, layers)
        assert g.n == self.HEPTAGONAL[layers]
        assert len(g.edges) - g.n + 1 == self.FACES[layers]
        assert oracles.girth(g.n, g.edges) == 7

    def test_one_layer_is_a_heptagon(self):
        g = build_tessellation_patch(7, 3, 1)
        assert all(g.degree(v) == 2 for v in range(7))

    @pytest.mark.parametrize("p, q", [(7, 3), (5, 4), (4, 5), (3, 7), (6, 4), (8, 3)])
    def test_inner_vertices_have_degree_q(self, p, q):
        # vertices of layer L-1 are completed once layer L exists
        inner = build_tessellation_patch(p, q, 2)
        outer = build_tessellation_patch(p, q, 3)
        assert all(outer.degree(v) == q for v in range(inner.n))
        assert max(outer.degree(v) for v in range(outer.n)) == q
        assert oracles.girth(outer.n, outer.edges) == p

    @pytest.mark.parametrize("p, q", [(4, 4), (3, 6), (6, 3), (2, 9)])
    def test_rejects_non_hyperbolic(self, p, q):
        with pytest.raises(ConstructionError):
            build_tessellation_patch(p, q, 2)

    def test_delta_plateau(self):
        # frozen from exhaustive scans of layers 2..5
        values = [four_point_delta(build_tessellation_patch(7, 3, L), max_points=None) for L in (2, 3, 4)]
        assert [str(v) for v in values] == ["2", "5/2", "5/2"]


class TestControls:
    def test_path_and_cycle(self):
        assert four_point_delta(build_control("path", 4)) == 0
        assert four_point_delta(build_control("cycle", 4)) == 1

    def test_grid_grows(self):
        values = [four_point_delta(build_control("grid", n)) for n in (4, 6, 8)]
        assert values[0] < values[1] < values[2]
        assert values == [3, 5, 7]

    @pytest.mark.parametrize("kind, size", [("cycle", 2), ("path", 0), ("star", 4)])
    def test_rejects(self, kind, size):
        with pytest.raises(ConstructionError):
            build_control(kind, size)


class TestGeodesics:
    def test_trivial_segment(self):
        g = build_control("cycle", 5)
        assert canonical_geodesic(g, 3, 3).points == (3,)

    def test_lowest_index_tie_break(self):
        # two shortest 0-2 paths in C4: through 1 or through 3
        assert canonical_geodesic(build_control("cycle", 4), 0, 2).points == (0, 1, 2)

    @given(connected_graphs(), st.data())
    def test_isometric_and_deterministic(self, g, data):
        u = data.draw(st.integers(0, g.n - 1))
        v = data.draw(st.integers(0, g.n - 1))
        sigma = canonical_geodesic(g, u, v)
        assert sigma.is_isometric(g)
        assert sigma.start == u and sigma.end == v and sigma.length == g.dist[u, v]
        assert canonical_geodesic(g, u, v) == sigma

    @given(connected_graphs(), st.data())
    def test_projection_nonempty_and_minimal(self, g, data):
        u, v, x = (data.draw(st.integers(0, g.n - 1)) for _ in range(3))
        sigma = canonical_geodesic(g, u, v)
        proj = project_to_geodesic(g, x, sigma)
        best = min(g.dist[x, p] for p in sigma)
        assert proj and all(g.dist[x, p] == best for p in proj)
        assert all(g.dist[x, p] > best for p in set(sigma) - proj)
        if x in sigma.points:
            assert proj == {x}

    @given(connected_graphs(), st.data())
    def test_extent_bounded_by_length(self, g, data):
        u, v = data.draw(st.integers(0, g.n - 1)), data.draw(st.integers(0, g.n - 1))
        curve = data.draw(st.lists(st.integers(0, g.n - 1), min_size=1, max_size=8))
        sigma = canonical_geodesic(g, u, v)
        assert 0 <= projection_extent(g, curve, sigma) <= sigma.length

    def test_extent_examples(self):
        g = build_tree_ball(3, 3)
        sigma = canonical_geodesic(g, *g.diametral_pair())
        assert projection_extent(g, [sigma.points[2]], sigma) == 0
        assert projection_extent(g, sigma.points, sigma) == sigma.length
        with pytest.raises(ValueError):
            projection_extent(g, [], sigma)

    @given(trees(min_n=3, max_n=40), st.data())
    def test_tree_avoiding_component_projects_to_a_point(self, t, data):
        u, v = data.draw(st.integers(0, t.n - 1)), data.draw(st.integers(0, t.n - 1))
        sigma = canonical_geodesic(t, u, v)
        rest = set(range(t.n)) - set(sigma.points)
        for comp in induced_components(t, rest):
            assert projection_extent(t, comp, sigma) == 0


class TestHelpers:
    def test_edge_list_round_trip(self, tmp_path):
        g = build_tessellation_patch(7, 3, 2)
        path = tmp_path / "g.txt"
        write_edge_list(g, path)
        assert path.read_text() == edge_list_text(g)
        h = read_edge_list(path)
        assert h.n == g.n and h.edges == g.edges

    def test_edge_list_comments_and_errors(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text("# a path\n0 1\n\n1 2  # tail\n")
        assert read_edge_list(path).edges == ((0, 1), (1, 2))
        path.write_text("0 1 2\n")
        with pytest.raises(ConstructionError):
            read_edge_list(path)
        path.write_text("0 1\n2 3\n")
        with pytest.raises(ConstructionError):
            read_edge_list(path)

    def test_path_within(self):
        g = build_control("cycle", 6)
        assert path_within(g, 0, 3, {0, 5, 4, 3}) == [0, 5, 4, 3]
        assert path_within(g, 0, 3, {0, 3}) is None

    def test_components(self):
        g = build_control("path", 6)
        assert induced_components(g, [0, 1, 3, 4, 5]) == [[0, 1], [3, 4, 5]]
