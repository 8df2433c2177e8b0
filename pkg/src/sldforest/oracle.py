"""Brute-force references and seeded instance generators.

Nothing here imports the fast paths: union-find, sorting and path scans are
written out again so that equivalence tests compare two independent programs.
All randomness goes through ``random.Random(seed)`` (Mersenne Twister), whose
output is stable across platforms and Python versions for integer seeds.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from sortedcontainers import SortedList

from .core import ROOT, Edge, EdgeKey, ParentMap, SLDError, as_edges

MIN_ROOT = "MIN_ROOT"
MAX_ROOT = "MAX_ROOT"


class _UF:
    def __init__(self, n: int):
        self.p = list(range(n))

    def find(self, x: int) -> int:
        p = self.p
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> bool:
        a, b = self.find(a), self.find(b)
        if a == b:
            return False
        self.p[a] = b
        return True


def kruskal_sld(num_vertices: int, edges: Iterable) -> ParentMap:
    """Sweep edges in rank order; each merge makes the edge the parent of both cluster tops."""
    es = sorted(as_edges(edges), key=lambda e: (e.weight, e.key.lo, e.key.hi))
    uf = _UF(num_vertices)
    top: Dict[int, EdgeKey] = {}
    parents: ParentMap = {}
    for e in es:
        a, b = uf.find(e.key.lo), uf.find(e.key.hi)
        if a == b:
            raise SLDError(f"edge {e.key} closes a cycle", code="CYCLE_DETECTED")
        for r in (a, b):
            t = top.pop(r, None)
            if t is not None:
                parents[t] = e.key
        uf.union(a, b)
        parents[e.key] = ROOT
        top[uf.find(a)] = e.key
    return parents


@dataclass
class ChangeSet:
    changed: List[Tuple[EdgeKey, Optional[EdgeKey], Optional[EdgeKey]]] = field(default_factory=list)
    added: List[EdgeKey] = field(default_factory=list)
    removed: List[EdgeKey] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.changed) + len(self.added) + len(self.removed)

    def keys(self) -> set:
        return {k for k, _, _ in self.changed} | set(self.added) | set(self.removed)


def diff(a: ParentMap, b: ParentMap) -> ChangeSet:
    cs = ChangeSet()
    for k in sorted(a):
        if k not in b:
            cs.removed.append(k)
        elif a[k] != b[k]:
            cs.changed.append((k, a[k], b[k]))
    cs.added = sorted(k for k in b if k not in a)
    return cs


def touched_nodes(a: ParentMap, b: ParentMap) -> int:
    """Nodes whose parent pointer or child set differs (added/removed nodes included)."""
    def kids(pm):
        out: Dict[EdgeKey, set] = {}
        for k, p in pm.items():
            if p is not None:
                out.setdefault(p, set()).add(k)
        return out

    ka, kb = kids(a), kids(b)
    n = 0
    for k in set(a) | set(b):
        if k not in a or k not in b or a[k] != b[k] or ka.get(k, set()) != kb.get(k, set()):
            n += 1
    return n


def chain_height(parents: ParentMap) -> int:
    """Longest root-directed chain, counted in nodes."""
    memo: Dict[EdgeKey, int] = {}
    best = 0
    for k in parents:
        path = []
        x = k
        while x is not None and x not in memo:
            path.append(x)
            x = parents[x]
        d = memo[x] if x is not None else 0
        for y in reversed(path):
            d += 1
            memo[y] = d
        best = max(best, memo[k])
    return best


# ------------------------------------------------------------------ generators

class Forest(NamedTuple):
    n: int
    edges: List[Edge]


def gen_theorem_instance(h: int, num_stars: int) -> Tuple[Forest, List[int]]:
    """Disjoint stars whose leaf weights interleave: star i gets i, s+i, 2s+i, ..."""
    if h < 1 or num_stars < 2:
        raise SLDError("need h >= 1 and at least two stars", code="INVALID_SIZES")
    edges = []
    centers = []
    for i in range(1, num_stars + 1):
        c = (i - 1) * (h + 1)
        centers.append(c)
        for j in range(h):
            edges.append(Edge.of(c, c + 1 + j, float(num_stars * j + i)))
    return Forest(num_stars * (h + 1), edges), centers


def _weight(rng: random.Random) -> float:
    # coarse grid so ties occur and exercise key tie-breaking
    return rng.randrange(0, 4000) / 4.0


def gen_random_forest(n: int, num_edges: int, seed: int) -> Forest:
    if n < 0 or num_edges < 0 or (n > 0 and num_edges > n - 1) or (n == 0 and num_edges):
        raise SLDError(f"cannot place {num_edges} forest edges on {n} vertices", code="INFEASIBLE")
    rng = random.Random(seed)
    order = list(range(n))
    rng.shuffle(order)
    tree = [(order[i], order[rng.randrange(i)]) for i in range(1, n)]
    rng.shuffle(tree)
    return Forest(n, [Edge.of(u, v, _weight(rng)) for u, v in tree[:num_edges]])


class _Conn:
    """Component labels for the generator, relabelling the smaller side on every link or cut."""

    def __init__(self, n: int, keys: Iterable[EdgeKey]):
        self.n = n
        self.label = list(range(n))
        self.members: Dict[int, set] = {v: {v} for v in range(n)}
        self.adj: List[set] = [set() for _ in range(n)]
        self.count = n
        self._fresh = n
        for k in keys:
            self.link(k.lo, k.hi)

    def link(self, u: int, v: int) -> None:
        a, b = self.label[u], self.label[v]
        if len(self.members[a]) < len(self.members[b]):
            a, b = b, a
        for x in self.members.pop(b):
            self.label[x] = a
            self.members[a].add(x)
        self.adj[u].add(v)
        self.adj[v].add(u)
        self.count -= 1

    def cut(self, u: int, v: int) -> None:
        self.adj[u].discard(v)
        self.adj[v].discard(u)
        # grow both sides in lockstep; the first to run dry is the smaller one
        seen = ({u}, {v})
        todo = ([u], [v])
        while todo[0] and todo[1]:
            for i in (0, 1):
                x = todo[i].pop()
                for y in self.adj[x]:
                    if y not in seen[i]:
                        seen[i].add(y)
                        todo[i].append(y)
        small = seen[0] if not todo[0] else seen[1]
        old = self.label[u]
        new = self._fresh
        self._fresh += 1
        self.members[old] -= small
        self.members[new] = small
        for x in small:
            self.label[x] = new
        self.count += 1

    def apart(self, u: int, v: int) -> bool:
        return self.label[u] != self.label[v]


def _pick_insert(rng, n, conn: _Conn) -> Optional[Tuple[int, int]]:
    if conn.count < 2:
        return None
    while True:
        u, v = rng.randrange(n), rng.randrange(n)
        if conn.apart(u, v):
            return u, v


def gen_update_stream(forest: Forest, ops: int, seed: int, profile: str = "mixed") -> list:
    """Valid update list: ('+',u,v,w) | ('-',u,v) | ('B+',[(u,v,w)..]) | ('B-',[(u,v)..])."""
    rng = random.Random(seed)
    n = forest.n
    live = {e.key: e.weight for e in forest.edges}
    conn = _Conn(n, live)
    order = SortedList(live)
    batch = None
    if profile.startswith("batch(") and profile.endswith(")"):
        batch = int(profile[6:-1])
        p_ins = 0.5
    else:
        p_ins = {"insert-heavy": 0.8, "delete-heavy": 0.2, "mixed": 0.5}.get(profile)
        if p_ins is None:
            raise SLDError(f"unknown profile {profile!r}", code="INFEASIBLE")
    out = []
    for _ in range(ops):
        want_ins = rng.random() < p_ins
        can_ins = conn.count > 1
        if not live and not can_ins:
            break
        if want_ins and not can_ins:
            want_ins = False
        if not want_ins and not live:
            want_ins = True
        if batch is None:
            if want_ins:
                u, v = _pick_insert(rng, n, conn)
                w = _weight(rng)
                k = EdgeKey(min(u, v), max(u, v))
                live[k] = w
                order.add(k)
                conn.link(u, v)
                out.append(("+", u, v, w))
            else:
                k = rng.choice(order)
                del live[k]
                order.remove(k)
                conn.cut(k.lo, k.hi)
                out.append(("-", k.lo, k.hi))
            continue
        if want_ins:
            group = []
            for _ in range(batch):
                pr = _pick_insert(rng, n, conn)
                if pr is None:
                    break
                u, v = pr
                w = _weight(rng)
                k = EdgeKey(min(u, v), max(u, v))
                live[k] = w
                order.add(k)
                conn.link(u, v)
                group.append((u, v, w))
            out.append(("B+", group))
        else:
            keys = list(order)
            rng.shuffle(keys)
            group = []
            for k in keys[:batch]:
                del live[k]
                order.remove(k)
                conn.cut(k.lo, k.hi)
                group.append((k.lo, k.hi))
            out.append(("B-", group))
    return out


# ----------------------------------------------------------- small references

class BinaryTree(NamedTuple):
    root: Optional[int]
    parent: List[Optional[int]]
    left: List[Optional[int]]
    right: List[Optional[int]]


def cartesian_recursive(A: Sequence, order: str = MIN_ROOT) -> BinaryTree:
    """Root at the extreme value (leftmost on ties); recurse on both sides."""
    n = len(A)
    parent: List[Optional[int]] = [None] * n
    left: List[Optional[int]] = [None] * n
    right: List[Optional[int]] = [None] * n
    if order == MIN_ROOT:
        def pick(lo, hi):
            return min(range(lo, hi), key=lambda i: (A[i], i))
    elif order == MAX_ROOT:
        def pick(lo, hi):
            return min(range(lo, hi), key=lambda i: (-A[i], i))
    else:
        raise SLDError(f"unknown order {order!r}", code="BAD_ORDER")

    def build(lo, hi, par):
        if lo >= hi:
            return None
        m = pick(lo, hi)
        parent[m] = par
        left[m] = build(lo, m, m)
        right[m] = build(m + 1, hi, m)
        return m

    import sys
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * n + 100))
    try:
        root = build(0, n, None)
    finally:
        sys.setrecursionlimit(old)
    return BinaryTree(root, parent, left, right)


def uf_threshold(num_vertices: int, edges: Iterable, tau, strict: bool = False) -> List[List[int]]:
    """Partition after merging every edge with weight <= tau (< tau if strict)."""
    uf = _UF(num_vertices)
    for e in as_edges(edges):
        if e.weight < tau or (not strict and e.weight == tau):
            uf.union(e.key.lo, e.key.hi)
    groups: Dict[int, List[int]] = {}
    for x in range(num_vertices):
        groups.setdefault(uf.find(x), []).append(x)
    return sorted(groups.values(), key=lambda g: g[0])


def linear_pws(seq: Sequence, w, key=None) -> tuple:
    key = key or (lambda x: x)
    pred = succ = None
    for x in seq:
        k = key(x)
        if k < w and (pred is None or key(pred) < k):
            pred = x
        if w < k and (succ is None or k < key(succ)):
            succ = x
    return pred, succ


def linear_median(seq: Sequence):
    if not seq:
        raise SLDError("median of an empty sequence", code="EMPTY")
    return seq[len(seq) // 2]


def bfs_path(num_vertices: int, edges: Iterable, u: int, v: int) -> Optional[List[int]]:
    adj: Dict[int, List[int]] = {}
    for e in as_edges(edges):
        adj.setdefault(e.key.lo, []).append(e.key.hi)
        adj.setdefault(e.key.hi, []).append(e.key.lo)
    prev = {u: None}
    frontier = [u]
    while frontier:
        nxt = []
        for x in frontier:
            for y in adj.get(x, ()):
                if y not in prev:
                    prev[y] = x
                    nxt.append(y)
        frontier = nxt
    if v not in prev:
        return None
    out = [v]
    while out[-1] != u:
        out.append(prev[out[-1]])
    return out[::-1]
