import random

import pytest

from sldforest.cartesian import BACK, FRONT, MAX_ROOT, MIN_ROOT, CartesianState
from sldforest.core import SLDError
from sldforest.oracle import cartesian_recursive


def _check(cs):
    vals = cs.values()
    assert cs.to_tree() == cartesian_recursive(vals, cs.order)
    assert cs.in_order() == vals
    cs.st.validate()


def test_build_examples():
    cs = CartesianState.build_array([3, 1, 2])
    t = cs.to_tree()
    assert (t.root, t.left[1], t.right[1]) == (1, 0, 2)
    assert cs.in_order() == [3, 1, 2]
    e = CartesianState.build_array([])
    assert e.to_tree().root is None and e.in_order() == []


def test_sorted_input_is_right_chain():
    cs = CartesianState.build_array(list(range(10)))
    t = cs.to_tree()
    assert t.root == 0
    assert all(t.right[i] == i + 1 and t.left[i] is None for i in range(9))


@pytest.mark.parametrize("order", [MIN_ROOT, MAX_ROOT])
def test_build_random_matches_oracle(order):
    rng = random.Random(1)
    A = [rng.randrange(50) for _ in range(256)]
    _check(CartesianState.build_array(A, order))


def test_min_max_mirror():
    rng = random.Random(8)
    A = [rng.randrange(30) for _ in range(60)]
    a = CartesianState.build_array(A, MIN_ROOT).to_tree()
    b = CartesianState.build_array([-x for x in A], MAX_ROOT).to_tree()
    assert a == b


def test_leaf_insert_examples():
    cs = CartesianState.build_array([3, 1, 2])
    rep = cs.leaf_insert(BACK, 0)
    assert rep.pointer_changes == 2
    t = cs.to_tree()
    assert t.root == 3 and t.parent[1] == 3
    e = CartesianState()
    assert e.leaf_insert(FRONT, 4).pointer_changes == 1
    _check(e)


def test_leaf_delete_examples():
    cs = CartesianState.build_array([3, 1])
    assert cs.leaf_delete(1).pointer_changes <= 2
    assert cs.values() == [3]
    cs.leaf_delete(0)
    assert cs.values() == []
    _check(cs)
    cs = CartesianState.build_array([3, 1, 2])
    with pytest.raises(SLDError) as ex:
        cs.leaf_delete(1)
    assert ex.value.code == "NOT_AN_END"


def test_arbitrary_updates_examples():
    cs = CartesianState.build_array([3, 1, 2])
    cs.insert_at(1, 0)
    assert cs.values() == [3, 0, 1, 2]
    _check(cs)
    cs.delete_at(1)
    assert cs.values() == [3, 1, 2]
    _check(cs)
    front = CartesianState.build_array([3, 1, 2])
    front.insert_at(0, 7)
    ref = CartesianState.build_array([3, 1, 2])
    ref.leaf_insert(FRONT, 7)
    assert front.to_tree() == ref.to_tree()
    one = CartesianState.build_array([5])
    one.delete_at(0)
    assert one.values() == []
    with pytest.raises(SLDError):
        cs.insert_at(9, 1)
    with pytest.raises(SLDError):
        cs.delete_at(3)


def test_short_random_stream():
    rng = random.Random(4)
    cs = CartesianState.build_array([rng.randrange(10) for _ in range(20)])
    for _ in range(120):
        n = len(cs)
        r = rng.random()
        if r < 0.3:
            assert cs.leaf_insert(rng.choice([FRONT, BACK]), rng.randrange(10)).pointer_changes <= 2
        elif r < 0.5 and n:
            assert cs.leaf_delete(rng.choice([0, n - 1])).pointer_changes <= 2
        elif r < 0.75:
            cs.insert_at(rng.randrange(n + 1), rng.randrange(10))
        elif n:
            cs.delete_at(rng.randrange(n))
        _check(cs)
