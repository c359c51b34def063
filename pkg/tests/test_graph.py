import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from labelgad.graph import AttributedGraph, degree, neighborhood, normalized_adjacency

from conftest import make_graph, random_graph


def test_degree_examples(triangle, star5):
    g = make_graph(3, [(0, 1)])
    assert degree(g, 2) == 0
    assert all(degree(triangle, i) == 2 for i in range(3))
    assert degree(star5, 0) == 5


def test_degree_out_of_range(triangle):
    with pytest.raises(IndexError):
        degree(triangle, 3)
    with pytest.raises(IndexError):
        neighborhood(triangle, -1)


def test_neighborhood_examples(path3):
    g = make_graph(2, [])
    assert neighborhood(g, 0, True).members == (0,)
    assert neighborhood(g, 0, False).members == ()
    view = neighborhood(path3, 1, True)
    assert view.members == (0, 1, 2)
    assert view.includes_self and view.center == 1


def test_dedup_and_self_loops(caplog):
    g = make_graph(3, [(0, 1), (1, 0), (0, 1), (2, 2)])
    assert g.n_edges == 1
    assert "self-loop" in caplog.text
    assert g.edges().tolist() == [[0, 1]]


def test_normalized_adjacency_examples():
    iso = normalized_adjacency(make_graph(1, []))
    assert iso.toarray().tolist() == [[1.0]]
    pair = normalized_adjacency(make_graph(2, [(0, 1)])).toarray()
    np.testing.assert_allclose(pair, np.full((2, 2), 0.5), rtol=0, atol=1e-15)
    k3 = normalized_adjacency(make_graph(3, [(0, 1), (1, 2), (0, 2)])).toarray()
    np.testing.assert_allclose(k3, np.full((3, 3), 1 / 3), rtol=0, atol=1e-15)


def test_isolated_row_is_single_self_loop():
    a = normalized_adjacency(make_graph(4, [(0, 1), (1, 2)])).toarray()
    assert a[3].tolist() == [0, 0, 0, 1.0]


@pytest.mark.parametrize("n", [2, 4, 7])
def test_row_sums_complete_graph(n):
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
    a = normalized_adjacency(make_graph(n, edges)).toarray()
    np.testing.assert_allclose(a.sum(axis=1), 1.0, rtol=0, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 25), p=st.floats(0, 1), seed=st.integers(0, 10_000))
def test_graph_invariants(n, p, seed):
    g = random_graph(n, p, seed=seed)
    A = g.adjacency.toarray()
    assert (A == A.T).all()
    assert (np.diag(A) == 0).all()
    assert A.max(initial=0) <= 1
    for i in range(n):
        nbrs = g.neighbors(i)
        assert (np.diff(nbrs) > 0).all()
        assert i not in neighborhood(g, i, False)
        assert i in neighborhood(g, i, True)
        assert len(neighborhood(g, i, True)) == degree(g, i) + 1
    a_hat = normalized_adjacency(g)
    assert np.abs((a_hat - a_hat.T).toarray()).max(initial=0) < 1e-12
    eig = np.linalg.eigvalsh(a_hat.toarray())
    assert eig.max() <= 1 + 1e-12 and eig.min() >= -1 - 1e-12


def test_row_sum_can_exceed_one():
    # hub of a 3-path: 1/3 + 2/sqrt(6); only the spectrum is bounded by 1
    a = normalized_adjacency(make_graph(3, [(0, 1), (1, 2)])).toarray()
    assert a[1].sum() == pytest.approx(1 / 3 + 2 / np.sqrt(6), abs=1e-15)
    assert a[1].sum() > 1


def test_has_edge_uses_sorted_lists(star5):
    assert star5.has_edge(0, 3) and star5.has_edge(3, 0)
    assert not star5.has_edge(1, 2)


def test_attribute_row_mismatch():
    with pytest.raises(ValueError):
        AttributedGraph.from_edges(3, [(0, 1)], np.zeros((2, 1)))


def test_immutable(triangle):
    with pytest.raises(ValueError):
        triangle.attributes[0, 0] = 1.0
