import pytest

from sldforest.core import SLDError
from sldforest.dendrogram import DendrogramState
from sldforest.oracle import gen_random_forest, uf_threshold
from sldforest.queries import cluster_report, cluster_size, flat_clustering, format_partition, threshold_query


def test_threshold_query_examples(path_state):
    assert threshold_query(path_state, 0, 3, 4.0) is False
    assert threshold_query(path_state, 0, 3, 5.0) is True
    assert threshold_query(path_state, 2, 2, -100.0) is True
    assert threshold_query(path_state, 1, 2, 1.0) is True
    assert threshold_query(path_state, 1, 2, 1.0, strict=True) is False
    with pytest.raises(SLDError):
        threshold_query(path_state, 0, 9, 1.0)


def test_cluster_size_and_report_examples(path_state):
    assert cluster_size(path_state, 1, 3.0) == 3
    assert cluster_report(path_state, 1, 3.0) == {1, 2, 3}
    assert cluster_size(path_state, 0, 4.0) == 1
    assert cluster_size(path_state, 0, 99.0) == 4
    assert cluster_report(path_state, 2, 99.0) == {0, 1, 2, 3}


def test_isolated_vertex_is_its_own_cluster():
    st = DendrogramState.build(3, [(0, 1, 1.0)])
    assert cluster_size(st, 2, 50.0) == 1
    assert cluster_report(st, 2, 50.0) == {2}
    assert threshold_query(st, 0, 2, 50.0) is False


def test_flat_clustering_examples(path_state):
    assert flat_clustering(path_state, 3.0) == [[0], [1, 2, 3]]
    assert flat_clustering(path_state, 0.0) == [[0], [1], [2], [3]]
    assert flat_clustering(path_state, 10.0) == [[0, 1, 2, 3]]
    assert format_partition(flat_clustering(path_state, 3.0)) == "{0} {1 2 3}"


@pytest.mark.parametrize("strict", [False, True])
def test_queries_match_union_find(strict):
    f = gen_random_forest(64, 50, 21)
    st = DendrogramState.build(f.n, f.edges)
    ws = sorted({e.weight for e in f.edges})
    for tau in sorted(set(ws) | {w + 0.25 for w in ws} | {w - 0.25 for w in ws})[::4]:
        parts = uf_threshold(f.n, f.edges, tau, strict)
        assert flat_clustering(st, tau, strict) == parts
        where = {v: i for i, p in enumerate(parts) for v in p}
        for u in range(f.n):
            rep = cluster_report(st, u, tau, strict)
            assert rep == set(parts[where[u]])
            assert cluster_size(st, u, tau, strict) == len(rep)
            for t in range(0, f.n, 7):
                assert threshold_query(st, u, t, tau, strict) == (t in rep)
