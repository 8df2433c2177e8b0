import pytest

from sldforest.core import ROOT, EdgeKey, SLDError
from sldforest.dendrogram import DendrogramState
from sldforest.oracle import (MAX_ROOT, MIN_ROOT, bfs_path, cartesian_recursive, chain_height, diff,
                              gen_random_forest, gen_theorem_instance, gen_update_stream, kruskal_sld,
                              linear_median, linear_pws, touched_nodes, uf_threshold)


def test_kruskal_path_fixture():
    p = kruskal_sld(4, [(0, 1, 5.0), (1, 2, 1.0), (2, 3, 3.0)])
    assert p == {EdgeKey(1, 2): EdgeKey(2, 3), EdgeKey(2, 3): EdgeKey(0, 1), EdgeKey(0, 1): ROOT}


def test_kruskal_rejects_cycle():
    with pytest.raises(SLDError) as ex:
        kruskal_sld(3, [(0, 1, 1), (1, 2, 2), (0, 2, 3)])
    assert ex.value.code == "CYCLE_DETECTED"


def test_diff_counts_added_removed_changed():
    a, b, c = EdgeKey(0, 1), EdgeKey(1, 2), EdgeKey(2, 3)
    cs = diff({a: b, b: ROOT}, {a: c, c: ROOT})
    assert len(cs) == 3
    assert cs.added == [c] and cs.removed == [b]
    assert diff({a: ROOT}, {a: ROOT}).keys() == set()


def test_theorem_instance_shape():
    f, centers = gen_theorem_instance(2, 2)
    ws = sorted(e.weight for e in f.edges)
    assert ws == [1.0, 2.0, 3.0, 4.0]
    assert len(centers) == 2
    for h, s in [(1, 2), (3, 4), (8, 3)]:
        f, centers = gen_theorem_instance(h, s)
        st = DendrogramState.build(f.n, f.edges)
        assert all(st.height(c) == h for c in centers)
    with pytest.raises(SLDError):
        gen_theorem_instance(0, 2)


@pytest.mark.parametrize("h", [1, 2, 5])
def test_theorem_insert_touches_2h_plus_1_nodes(h):
    f, (a, b, *_) = gen_theorem_instance(h, 2)
    before = kruskal_sld(f.n, f.edges)
    after = kruskal_sld(f.n, list(f.edges) + [(a, b, 0.0)])
    assert touched_nodes(before, after) == 2 * h + 1
    # the new node plus every re-pointed node except the surviving root
    assert len(diff(before, after)) == 2 * h


def test_random_generators_deterministic_and_valid():
    assert gen_random_forest(50, 30, 4) == gen_random_forest(50, 30, 4)
    f = gen_random_forest(50, 30, 4)
    assert len(f.edges) == 30
    kruskal_sld(f.n, f.edges)
    for prof in ("insert-heavy", "delete-heavy", "mixed", "batch(4)"):
        ops = gen_update_stream(f, 60, 9, prof)
        assert ops == gen_update_stream(f, 60, 9, prof)
        live = {e.key: e.weight for e in f.edges}
        for op in ops:
            items = [op[1:]] if op[0] in "+-" else op[1]
            for it in items:
                k = EdgeKey(min(it[0], it[1]), max(it[0], it[1]))
                if op[0].endswith("+"):
                    live[k] = it[2]
                else:
                    del live[k]
            kruskal_sld(f.n, [(k.lo, k.hi, w) for k, w in live.items()])
    with pytest.raises(SLDError):
        gen_random_forest(5, 5, 1)
    with pytest.raises(SLDError):
        gen_update_stream(f, 3, 1, "nonsense")


def test_cartesian_recursive_small():
    t = cartesian_recursive([3, 1, 2], MIN_ROOT)
    assert t.root == 1 and t.left[1] == 0 and t.right[1] == 2
    t = cartesian_recursive([3, 1, 2], MAX_ROOT)
    assert t.root == 0 and t.right[0] == 2 and t.left[2] == 1
    assert cartesian_recursive([], MIN_ROOT).root is None
    t = cartesian_recursive([2, 2], MIN_ROOT)
    assert t.root == 0


def test_small_references():
    assert uf_threshold(4, [(0, 1, 5.0), (1, 2, 1.0), (2, 3, 3.0)], 3.0) == [[0], [1, 2, 3]]
    assert uf_threshold(4, [(0, 1, 5.0), (1, 2, 1.0), (2, 3, 3.0)], 3.0, strict=True) == [[0], [1, 2], [3]]
    assert linear_pws([1, 3, 5], 4) == (3, 5)
    assert linear_pws([1, 3, 5], 0) == (None, 1)
    assert linear_median([1, 2, 3, 4]) == 3
    assert bfs_path(4, [(0, 1, 1), (1, 2, 1)], 0, 2) == [0, 1, 2]
    assert bfs_path(4, [(0, 1, 1)], 0, 3) is None
    assert chain_height({EdgeKey(0, 1): EdgeKey(1, 2), EdgeKey(1, 2): ROOT}) == 2
