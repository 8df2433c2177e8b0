import itertools
import math

import pytest

from sldforest.core import (ROOT, Edge, EdgeKey, ForestState, SLDError, UpdateReport, check_parent_map,
                            edge_key, min_incident_edge, rank_less, serialize_canonical)


def test_rank_less_weight_then_key():
    assert rank_less(Edge.of(0, 1, 1), Edge.of(2, 3, 2))
    assert rank_less(Edge.of(0, 1, 1), Edge.of(0, 2, 1))
    e = Edge.of(0, 1, 1)
    assert not rank_less(e, e)


def test_rank_less_is_total_order_on_small_set():
    es = [Edge.of(u, v, w) for u, v in itertools.combinations(range(4), 2) for w in (0.5, 1.0)]
    for a, b in itertools.product(es, es):
        if a == b:
            assert not rank_less(a, b)
        else:
            assert rank_less(a, b) != rank_less(b, a)
    for a, b, c in itertools.product(es[:8], es[:8], es[:8]):
        if rank_less(a, b) and rank_less(b, c):
            assert rank_less(a, c)


def test_edge_key_normalizes_and_rejects_loops():
    assert edge_key(3, 1) == EdgeKey(1, 3)
    with pytest.raises(SLDError):
        edge_key(2, 2)


@pytest.mark.parametrize("w", [math.inf, -math.inf, math.nan])
def test_non_finite_weights_rejected(w):
    with pytest.raises(SLDError) as ex:
        Edge.of(0, 1, w)
    assert ex.value.code == "BAD_WEIGHT"


def test_min_incident_edge_matches_scan():
    f = ForestState(5)
    for u, v, w in [(0, 1, 5), (1, 2, 1), (2, 3, 3)]:
        f.add(edge_key(u, v), w)
    assert min_incident_edge(f, 1) == Edge.of(1, 2, 1)
    assert min_incident_edge(f, 0) == Edge.of(0, 1, 5)
    assert min_incident_edge(f, 4) is None
    for v in range(5):
        inc = [e for e in f.edges() if v in e.key]
        want = min(inc, key=lambda e: e.rank, default=None)
        assert min_incident_edge(f, v) == want
    with pytest.raises(SLDError):
        min_incident_edge(f, 9)


def test_serialize_canonical_format():
    a, b = EdgeKey(0, 1), EdgeKey(1, 2)
    txt = serialize_canonical({a: b, b: ROOT}, {a: 1.0, b: 2.5})
    assert txt == "0-1 1.0 -> 1-2\n1-2 2.5 -> ROOT\n"
    assert serialize_canonical({}, {}) == ""


def test_weights_round_trip_bit_exact():
    w = 0.1 + 0.2
    line = serialize_canonical({EdgeKey(0, 1): ROOT}, {EdgeKey(0, 1): w})
    assert float(line.split()[1]) == w


def test_parent_map_heap_violation():
    a, b = EdgeKey(0, 1), EdgeKey(1, 2)
    with pytest.raises(SLDError):
        check_parent_map({a: b, b: ROOT}, {a: 3.0, b: 2.0})
    with pytest.raises(SLDError):
        check_parent_map({a: b, b: a}, {a: 1.0, b: 2.0})


def test_update_report_record_excludes_elapsed_on_request():
    r = UpdateReport(pointer_changes=3)
    assert "elapsed" not in r.to_record(include_elapsed=False)
    assert r.to_record()["pointer_changes"] == 3
