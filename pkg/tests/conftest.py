import os

from hypothesis import HealthCheck, settings, strategies as st

from hypermorse.graph_spaces import Graph

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.register_profile("thorough", max_examples=400, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def trees(draw, min_n=1, max_n=30):
    n = draw(st.integers(min_n, max_n))
    parents = [draw(st.integers(0, v - 1)) for v in range(1, n)]
    return Graph(n, tuple((p, v) for v, p in enumerate(parents, start=1)), name="tree")


@st.composite
def connected_graphs(draw, min_n=1, max_n=14, max_extra=10):
    t = draw(trees(min_n, max_n))
    n = t.n
    edges = set(t.edges)
    if n > 2:
        for _ in range(draw(st.integers(0, max_extra))):
            u, v = draw(st.integers(0, n - 1)), draw(st.integers(0, n - 1))
            if u != v:
                edges.add((min(u, v), max(u, v)))
    return Graph(n, tuple(sorted(edges)), name="graph")
