import pytest

from sldforest.core import ROOT, EdgeKey, SLDError
from sldforest.dendrogram import DendrogramState
from sldforest.oracle import gen_random_forest

from conftest import oracle_text


def test_build_path_fixture(path_state):
    st = path_state
    assert st.parents[EdgeKey(1, 2)] == EdgeKey(2, 3)
    assert st.parents[EdgeKey(0, 1)] is ROOT
    assert st.extract_spine(EdgeKey(1, 2)) == [EdgeKey(1, 2), EdgeKey(2, 3), EdgeKey(0, 1)]
    assert st.root_of(EdgeKey(2, 3)) == EdgeKey(0, 1)
    assert st.height(0) == 3
    st.validate(deep=True)


def test_build_rejects_duplicates_and_cycles():
    with pytest.raises(SLDError) as ex:
        DendrogramState.build(3, [(0, 1, 1.0), (1, 0, 2.0)])
    assert ex.value.code == "DUPLICATE_EDGE"
    with pytest.raises(SLDError):
        DendrogramState.build(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])


def test_height_of_isolated_vertex_and_unknown_component():
    st = DendrogramState.build(3, [(0, 1, 1.0)])
    assert st.height(2) == 0
    assert st.height((0, 1)) == 1
    with pytest.raises(SLDError):
        st.height(7)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_build_matches_oracle_and_roots(seed):
    f = gen_random_forest(96, 70, seed)
    st = DendrogramState.build(f.n, f.edges)
    assert st.canonical() == oracle_text(st)
    roots = st.roots()
    assert all(st.parents[r] is ROOT for r in roots.values())
    assert len(roots) == sum(1 for p in st.parents.values() if p is ROOT)
    st.validate(deep=True)


def test_apply_parent_changes_rejects_heap_violation(path_state):
    st = path_state
    with pytest.raises(SLDError) as ex:
        st.apply_parent_changes([(EdgeKey(0, 1), EdgeKey(1, 2))])
    assert ex.value.code == "HEAP_VIOLATION"
    st.validate()


def test_apply_parent_changes_counts_effective_changes(path_state):
    st = path_state
    st.begin()
    n = st.apply_parent_changes([(EdgeKey(1, 2), EdgeKey(2, 3))])
    assert n == 0
    assert st.end() == (0, 0)


def test_validate_detects_tampering(path_state):
    st = path_state
    st.parents[EdgeKey(1, 2)] = EdgeKey(0, 1)
    with pytest.raises(SLDError):
        st.validate()
