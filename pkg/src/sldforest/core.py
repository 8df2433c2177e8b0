"""Shared vocabulary: edge identity, the rank order, forest state and update reports."""
from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, NamedTuple, Optional, Tuple

from sortedcontainers import SortedList

ROOT = None  # parent value of a dendrogram root


class SLDError(Exception):
    """Base error; ``code`` is a stable machine-readable identifier."""

    code = "SLD_ERROR"

    def __init__(self, message: str = "", code: Optional[str] = None, **details):
        if code is not None:
            self.code = code
        self.details = details
        super().__init__(f"{self.code}: {message}" if message else self.code)


class EdgeKey(NamedTuple):
    lo: int
    hi: int

    def __str__(self) -> str:
        return f"{self.lo}-{self.hi}"


def edge_key(u: int, v: int) -> EdgeKey:
    if u == v:
        raise SLDError(f"self loop at {u}", code="SELF_LOOP")
    if u < 0 or v < 0:
        raise SLDError(f"negative vertex id in {u}-{v}", code="OUT_OF_RANGE")
    return EdgeKey(u, v) if u < v else EdgeKey(v, u)


def check_weight(w):
    """Reject non-finite numeric weights; tuples (used internally) pass through."""
    if isinstance(w, numbers.Real):
        if not math.isfinite(w):
            raise SLDError(f"non-finite weight {w!r}", code="BAD_WEIGHT")
    elif not isinstance(w, tuple):
        raise SLDError(f"unsupported weight {w!r}", code="BAD_WEIGHT")
    return w


@dataclass(frozen=True)
class Edge:
    key: EdgeKey
    weight: float

    @classmethod
    def of(cls, u: int, v: int, weight) -> "Edge":
        return cls(edge_key(u, v), check_weight(weight))

    @property
    def rank(self) -> tuple:
        return (self.weight, self.key.lo, self.key.hi)

    def __str__(self) -> str:
        return f"{self.key} {format_weight(self.weight)}"


def rank_less(a: Edge, b: Edge) -> bool:
    """Strict total order on edges: weight first, then (lo, hi)."""
    return a.rank < b.rank


def format_weight(w) -> str:
    if isinstance(w, float):
        return repr(w)
    if isinstance(w, tuple):
        return "(" + ",".join(format_weight(x) for x in w) + ")"
    return str(w)


ParentMap = Dict[EdgeKey, Optional[EdgeKey]]


def serialize_canonical(parents: ParentMap, weights: Dict[EdgeKey, object]) -> str:
    """One line per node in rank order: ``u-v w -> x-y`` or ``u-v w -> ROOT``."""
    lines = []
    for k in sorted(parents, key=lambda k: (weights[k], k.lo, k.hi)):
        p = parents[k]
        lines.append(f"{k} {format_weight(weights[k])} -> {'ROOT' if p is None else p}")
    return "\n".join(lines) + ("\n" if lines else "")


def check_parent_map(parents: ParentMap, weights: Dict[EdgeKey, object]) -> None:
    """Heap order plus termination of every root-directed walk."""
    for k, p in parents.items():
        if p is None:
            continue
        if p not in parents:
            raise SLDError(f"{k} points at missing node {p}", code="DANGLING_PARENT")
        if not (weights[k], k.lo, k.hi) < (weights[p], p.lo, p.hi):
            raise SLDError(f"{k} -> {p} breaks heap order", code="HEAP_VIOLATION")
    # heap order already forbids cycles; the walk bound below is a cheap double check
    limit = len(parents)
    for k in parents:
        steps, x = 0, k
        while parents[x] is not None:
            x = parents[x]
            steps += 1
            if steps > limit:
                raise SLDError(f"cycle through {k}", code="CYCLE")


class ForestState:
    """Vertex count, weighted edges, and a rank-ordered incidence set per vertex."""

    def __init__(self, num_vertices: int):
        self.num_vertices = num_vertices
        self.weight: Dict[EdgeKey, object] = {}
        self._inc: List[SortedList] = [SortedList() for _ in range(num_vertices)]

    def add_vertex(self) -> int:
        self._inc.append(SortedList())
        self.num_vertices += 1
        return self.num_vertices - 1

    def check_vertex(self, v: int) -> None:
        if not (isinstance(v, int) and 0 <= v < self.num_vertices):
            raise SLDError(f"vertex {v} out of range [0, {self.num_vertices})", code="OUT_OF_RANGE")

    def rank(self, k: EdgeKey) -> tuple:
        return (self.weight[k], k.lo, k.hi)

    def add(self, k: EdgeKey, w) -> None:
        self.weight[k] = w
        r = (w, k.lo, k.hi)
        self._inc[k.lo].add(r)
        self._inc[k.hi].add(r)

    def remove(self, k: EdgeKey) -> object:
        w = self.weight.pop(k)
        r = (w, k.lo, k.hi)
        self._inc[k.lo].remove(r)
        self._inc[k.hi].remove(r)
        return w

    def __contains__(self, k) -> bool:
        return k in self.weight

    def __len__(self) -> int:
        return len(self.weight)

    def edges(self) -> List[Edge]:
        return [Edge(k, w) for k, w in self.weight.items()]

    def degree(self, v: int) -> int:
        return len(self._inc[v])

    def incident(self, v: int) -> List[EdgeKey]:
        return [EdgeKey(lo, hi) for _, lo, hi in self._inc[v]]

    def min_incident(self, v: int) -> Optional[EdgeKey]:
        inc = self._inc[v]
        if not inc:
            return None
        _, lo, hi = inc[0]
        return EdgeKey(lo, hi)


def min_incident_edge(f: ForestState, v: int) -> Optional[Edge]:
    f.check_vertex(v)
    k = f.min_incident(v)
    return None if k is None else Edge(k, f.weight[k])


@dataclass
class UpdateReport:
    pointer_changes: int = 0
    pws_queries: int = 0
    median_queries: int = 0
    rc_nodes_visited: int = 0
    spine_lengths: List[int] = field(default_factory=list)
    dendrogram_height: int = 0
    elapsed: float = 0.0
    # rewirings performed by the spine merges themselves (may exceed the net diff)
    merge_changes: int = 0
    recursion_depth: int = 0
    contraction_rounds: int = 0
    max_node_visits: int = 0
    # nodes whose parent or child set changed; counts the surviving root of a merged chain
    touched_nodes: int = 0
    # (pws queries, parent changes) for each spine merge, in execution order
    merge_log: List[Tuple[int, int]] = field(default_factory=list)

    def absorb(self, other: "UpdateReport") -> None:
        self.pws_queries += other.pws_queries
        self.median_queries += other.median_queries
        self.rc_nodes_visited += other.rc_nodes_visited
        self.spine_lengths.extend(other.spine_lengths)
        self.merge_changes += other.merge_changes
        self.recursion_depth = max(self.recursion_depth, other.recursion_depth)
        self.max_node_visits = max(self.max_node_visits, other.max_node_visits)
        self.merge_log.extend(other.merge_log)

    def to_record(self, include_elapsed: bool = True) -> dict:
        rec = {
            "pointer_changes": self.pointer_changes,
            "pws_queries": self.pws_queries,
            "median_queries": self.median_queries,
            "rc_nodes_visited": self.rc_nodes_visited,
            "spine_lengths": list(self.spine_lengths),
            "dendrogram_height": self.dendrogram_height,
            "merge_changes": self.merge_changes,
            "recursion_depth": self.recursion_depth,
            "contraction_rounds": self.contraction_rounds,
            "max_node_visits": self.max_node_visits,
            "touched_nodes": self.touched_nodes,
        }
        if include_elapsed:
            rec["elapsed"] = self.elapsed
        return rec


def as_edges(items: Iterable) -> List[Edge]:
    out = []
    for it in items:
        if isinstance(it, Edge):
            out.append(it)
        else:
            u, v, w = it
            out.append(Edge.of(u, v, w))
    return out


Spine = List[EdgeKey]  # lowest rank first; last element is the component root
PairList = List[Tuple[int, int]]
