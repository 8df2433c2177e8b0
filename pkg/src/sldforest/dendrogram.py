"""Explicit dendrogram state: parent map plus two rake-compress mirrors.

``forest_rc`` holds the input forest (edge weights are rank keys, so path
maxima come back as ranks).  ``sld_rc`` holds the dendrogram itself: one
vertex per edge node weighted by its rank key, one edge per parent link.  The
root of every dendrogram component is the rank-maximum node, which ``sld_rc``
keeps as a cluster aggregate, so spines are a single path extraction away.
"""
from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .core import (ROOT, Edge, EdgeKey, ForestState, ParentMap, SLDError, as_edges,
                   check_parent_map, edge_key, serialize_canonical)
from .oracle import kruskal_sld
from .rc_tree import RCForest, Tally

_ABSENT = object()


class DendrogramState:
    def __init__(self, num_vertices: int):
        self.forest = ForestState(num_vertices)
        self.parents: ParentMap = {}
        self.forest_rc = RCForest(range(num_vertices))
        self.sld_rc = RCForest((), vertex_weights={})
        self._journal: Optional[Dict[EdgeKey, object]] = None

    # ------------------------------------------------------------ building

    @classmethod
    def build(cls, num_vertices: int, edges: Iterable) -> "DendrogramState":
        es = as_edges(edges)
        st = cls(num_vertices)
        seen = set()
        for e in es:
            st.forest.check_vertex(e.key.lo)
            st.forest.check_vertex(e.key.hi)
            if e.key in seen:
                raise SLDError(f"edge {e.key} listed twice", code="DUPLICATE_EDGE")
            seen.add(e.key)
        parents = kruskal_sld(num_vertices, es)
        for e in es:
            st.forest.add(e.key, e.weight)
        st.forest_rc.batch_link([(e.key.lo, e.key.hi, st.forest.rank(e.key)) for e in es])
        for e in es:
            st.sld_rc.add_vertex(e.key, st.forest.rank(e.key))
        st.sld_rc.batch_link([(k, p) for k, p in parents.items() if p is not None])
        st.parents = dict(parents)
        return st

    def add_vertex(self) -> int:
        v = self.forest.add_vertex()
        self.forest_rc.add_vertex(v)
        return v

    @property
    def num_vertices(self) -> int:
        return self.forest.num_vertices

    def rank(self, k: EdgeKey) -> tuple:
        return self.forest.rank(k)

    def canonical(self) -> str:
        return serialize_canonical(self.parents, self.forest.weight)

    def edges(self) -> List[Edge]:
        return self.forest.edges()

    # ------------------------------------------------------------ spines

    def root_of(self, k: EdgeKey) -> EdgeKey:
        if k not in self.parents:
            raise SLDError(f"no edge {k}", code="NO_SUCH_EDGE")
        return self.sld_rc.designated_root(k)

    def roots(self) -> Dict[object, EdgeKey]:
        """Representative cluster id -> ROOT node, one entry per dendrogram component."""
        out = {}
        for k in self.parents:
            out.setdefault(self.sld_rc.representative(k), self.sld_rc.designated_root(k))
        return out

    def extract_spine(self, k: EdgeKey, tally: Optional[Tally] = None) -> List[EdgeKey]:
        if k not in self.parents:
            raise SLDError(f"no edge {k}", code="NO_SUCH_EDGE")
        return self.sld_rc.extract_path(k, self.sld_rc.designated_root(k, tally), tally)

    def min_incident(self, v: int) -> Optional[EdgeKey]:
        return self.forest.min_incident(v)

    # ------------------------------------------------------------ heights

    def height(self, component) -> int:
        """Nodes on the longest root-directed chain of a component's dendrogram.

        ``component`` is an edge node or a forest vertex; an isolated vertex has
        an empty dendrogram (height 0).
        """
        if isinstance(component, tuple):
            k = EdgeKey(*component)
            if k not in self.parents:
                raise SLDError(f"no edge {k}", code="NO_SUCH_COMPONENT")
        else:
            if not (isinstance(component, int) and 0 <= component < self.num_vertices):
                raise SLDError(f"no component at {component!r}", code="NO_SUCH_COMPONENT")
            k = self.forest.min_incident(component)
            if k is None:
                return 0
        return self.sld_rc.eccentricity(self.sld_rc.designated_root(k)) + 1

    # ------------------------------------------------------------ mutation

    def begin(self) -> None:
        self._journal = {}

    def end(self) -> Tuple[int, int]:
        """Close the journal; returns (net parent-map changes, touched nodes)."""
        j = self._journal or {}
        self._journal = None
        net = 0
        touched = set()
        for k, old in j.items():
            new = self.parents.get(k, _ABSENT)
            if old is new or old == new:
                continue
            net += 1
            touched.add(k)
            for p in (old, new):
                if p is not _ABSENT and p is not None:
                    touched.add(p)
        return net, len(touched)

    def _note(self, k: EdgeKey) -> None:
        if self._journal is not None and k not in self._journal:
            self._journal[k] = self.parents.get(k, _ABSENT)

    def apply_parent_changes(self, changes: Iterable[Tuple[EdgeKey, Optional[EdgeKey]]],
                             added: Sequence[EdgeKey] = (),
                             removed: Sequence[EdgeKey] = ()) -> int:
        """Rewire parents and mirror the rewiring into ``sld_rc`` as one cut batch plus one link batch.

        Added nodes must already be in the forest (their weight is read there).
        Returns the number of assignments that actually changed.
        """
        removed = list(removed)
        rem = set(removed)
        add = set(added)
        new: Dict[EdgeKey, Optional[EdgeKey]] = {}
        for k, p in changes:
            if k in rem:
                raise SLDError(f"change targets removed node {k}", code="CYCLE")
            if k not in self.parents and k not in add:
                raise SLDError(f"no node {k}", code="NO_SUCH_EDGE")
            if k in add or self.parents[k] != p:
                new[k] = p
        for k in add:
            if k in self.parents:
                raise SLDError(f"node {k} already exists", code="DUPLICATE_EDGE")
            new.setdefault(k, ROOT)
        for k, p in new.items():
            if p is None:
                continue
            if p in rem or (p not in self.parents and p not in add):
                raise SLDError(f"{k} -> {p}: parent missing", code="DANGLING_PARENT")
            if not self._rank_any(k) < self._rank_any(p):
                raise SLDError(f"{k} -> {p} breaks heap order", code="HEAP_VIOLATION")
        for r in rem:
            if r not in self.parents:
                raise SLDError(f"no node {r}", code="NO_SUCH_EDGE")
            for c in self.sld_rc.neighbors(r):
                if self.parents.get(c) == r and c not in rem and new.get(c, r) == r:
                    raise SLDError(f"{c} would dangle under removed {r}", code="DANGLING_PARENT")
        cuts = set()
        for k, p in new.items():
            old = self.parents.get(k)
            if old is not None:
                cuts.add((k, old))
        for r in rem:
            for c in self.sld_rc.neighbors(r):
                cuts.add((c, r) if self.parents.get(c) == r else (r, c))
        self.sld_rc.batch_cut(sorted(cuts))
        for r in removed:
            self._note(r)
            self.sld_rc.remove_vertex(r)
            del self.parents[r]
        for k in added:
            self.sld_rc.add_vertex(k, self.forest.rank(k))
        links = []
        for k, p in new.items():
            self._note(k)
            self.parents[k] = p
            if p is not None:
                links.append((k, p))
        self.sld_rc.batch_link(links)
        return len(new) + len(rem)

    def _rank_any(self, k: EdgeKey) -> tuple:
        w = self.forest.weight.get(k)
        if w is not None:
            return (w, k.lo, k.hi)
        return self.sld_rc.vw[k]

    # ------------------------------------------------------------ validation

    def validate(self, deep: bool = False) -> None:
        f = self.forest
        for v in range(f.num_vertices):
            inc = sorted(f.rank(k) for k in f.weight if v in k)
            if list(f._inc[v]) != inc:
                raise SLDError(f"adjacency of {v} inconsistent", code="FOREST_INCONSISTENT")
        fr = {edge_key(a, b): w for a, b, w in self.forest_rc.edges()}
        if fr != {k: f.rank(k) for k in f.weight}:
            raise SLDError("forest_rc edges differ from the forest", code="FOREST_RC_MISMATCH")
        if set(self.parents) != set(f.weight):
            raise SLDError("parent map keys differ from forest edges", code="NODE_SET_MISMATCH")
        check_parent_map(self.parents, f.weight)
        if set(self.sld_rc.vertices()) != set(self.parents):
            raise SLDError("sld_rc vertices differ from dendrogram nodes", code="SLD_RC_MISMATCH")
        links = {frozenset((k, p)) for k, p in self.parents.items() if p is not None}
        if {frozenset((a, b)) for a, b, _ in self.sld_rc.edges()} != links:
            raise SLDError("sld_rc links differ from parent pointers", code="SLD_RC_MISMATCH")
        for k in self.parents:
            if self.sld_rc.vw[k] != f.rank(k):
                raise SLDError(f"sld_rc weight of {k} stale", code="SLD_RC_MISMATCH")
            r = self.sld_rc.designated_root(k)
            if self.parents[r] is not None:
                raise SLDError(f"designated root {r} has a parent", code="ROOT_MISMATCH")
        if self.canonical() != serialize_canonical(kruskal_sld(f.num_vertices, f.edges()), f.weight):
            raise SLDError("parent map differs from a fresh Kruskal sweep", code="ORACLE_MISMATCH")
        if deep:
            self.forest_rc.audit()
            self.sld_rc.audit()
