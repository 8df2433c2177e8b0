"""Threshold clustering queries over a maintained dendrogram.

Default semantics are inclusive: edges with weight <= tau are merged.  Pass
``strict=True`` to merge only edges with weight < tau.  Both are realized as a
search key in the rank order, so ties between equal weights never split.
"""
from __future__ import annotations

import math
from typing import List, Optional, Set

from .core import ROOT, EdgeKey, SLDError, check_weight
from .dendrogram import DendrogramState


def _key(tau, strict: bool) -> tuple:
    check_weight(tau)
    # every rank (w, lo, hi) with w <= tau sorts below (tau, inf, inf); with w < tau below (tau, -1, -1)
    return (tau, -1, -1) if strict else (tau, math.inf, math.inf)


def _qualifies(st: DendrogramState, k: EdgeKey, key: tuple) -> bool:
    return st.rank(k) < key


def _cluster_node(st: DendrogramState, u: int, key: tuple) -> Optional[EdgeKey]:
    """Highest node on the spine of u's minimum edge whose rank is below ``key``."""
    st.forest.check_vertex(u)
    e = st.forest.min_incident(u)
    if e is None or not _qualifies(st, e, key):
        return None
    sld = st.sld_rc
    pred, _ = sld.pws(e, sld.designated_root(e), key)
    return pred


def threshold_query(st: DendrogramState, s: int, t: int, tau, strict: bool = False) -> bool:
    """Are s and t in the same cluster once every edge at or below tau is merged?"""
    st.forest.check_vertex(s)
    st.forest.check_vertex(t)
    key = _key(tau, strict)
    if s == t:
        return True
    if not st.forest_rc.connected(s, t):
        return False
    return st.forest_rc.path_max_edge(s, t) < key


def cluster_size(st: DendrogramState, u: int, tau, strict: bool = False) -> int:
    node = _cluster_node(st, u, _key(tau, strict))
    if node is None:
        return 1
    sld = st.sld_rc
    # m edge nodes below the cluster node span m + 1 vertices
    return sld.subtree_size(sld.designated_root(node), node) + 1


def cluster_report(st: DendrogramState, u: int, tau, strict: bool = False) -> Set[int]:
    node = _cluster_node(st, u, _key(tau, strict))
    if node is None:
        return {u}
    sld = st.sld_rc
    out = {u}
    for k in sld.subtree_vertices(sld.designated_root(node), node):
        out.add(k.lo)
        out.add(k.hi)
    return out


def flat_clustering(st: DendrogramState, tau, strict: bool = False) -> List[List[int]]:
    """Partition of all vertices; clusters ordered by smallest member, members ascending."""
    key = _key(tau, strict)
    sld = st.sld_rc
    seen = [False] * st.num_vertices
    clusters = []
    for k, p in st.parents.items():
        if _qualifies(st, k, key) and (p is ROOT or not _qualifies(st, p, key)):
            members = {k.lo, k.hi}
            for x in sld.subtree_vertices(sld.designated_root(k), k):
                members.add(x.lo)
                members.add(x.hi)
            for v in members:
                seen[v] = True
            clusters.append(sorted(members))
    clusters.extend([v] for v in range(st.num_vertices) if not seen[v])
    clusters.sort(key=lambda c: c[0])
    return clusters


def format_partition(parts: List[List[int]]) -> str:
    return " ".join("{" + " ".join(map(str, c)) + "}" for c in parts)
