"""Rake-compress forest maintained by change propagation.

Contraction runs in rounds.  In round ``r`` every live vertex of degree 1 rakes
into its neighbour unless that neighbour is also a leaf that wins the priority
comparison; a degree-2 vertex compresses when it has no leaf neighbour and beats
every degree-2 neighbour on priority; a degree-0 vertex finalizes its component.
Priorities are a fixed 64-bit mix of (vertex, round), so the hierarchy is a pure
function of the current forest.  Updates re-run that rule only where a vertex's
round state changed, which keeps every update logarithmic in practice and leaves
the hierarchy identical to a from-scratch build (``audit`` checks this).

Each vertex owns exactly one cluster, the one formed when it contracts:

* ``UNARY``   rake of the vertex into its single neighbour,
* ``BINARY``  compress between two neighbours (its cluster path runs through it),
* ``NULLARY`` the last vertex of a component; the component's representative.

Base edges are ``BASE`` clusters.  Every cluster stores the interior vertex count,
cluster-path length, min/max vertex weight and max edge weight on the cluster
path, and the farthest interior vertex from each boundary.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from .core import SLDError
from .forkjoin import ForkJoin, get_pool

BASE, UNARY, BINARY, NULLARY = "BASE", "UNARY", "BINARY", "NULLARY"
_RAKE, _COMPRESS, _FINAL = "R", "C", "F"
_M64 = (1 << 64) - 1


def _splitmix(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _M64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _M64
    return x ^ (x >> 31)


def _stable_hash(v) -> int:
    if isinstance(v, tuple):
        h = 0x51ED27
        for x in v:
            h = _splitmix(h ^ _stable_hash(x))
        return h
    return _splitmix(int(v) & _M64)


def height_bound(n: int) -> float:
    """Loose sanity ceiling on hierarchy height; empirical, not a theorem."""
    return 8 * math.log2(n + 2) + 8


class Tally:
    """Visit counter; forked queries each get their own and are summed at join."""

    __slots__ = ("visits",)

    def __init__(self):
        self.visits = 0


class Cluster:
    __slots__ = ("kind", "rep", "bounds", "edges", "unary", "parent", "round",
                 "weight", "size", "plen", "vmin", "vmax", "emax", "top", "minv", "reach")

    def __init__(self, kind, rep, bounds, edges, unary, rnd, weight=None):
        self.kind = kind
        self.rep = rep
        self.bounds = bounds
        self.edges = edges
        self.unary = unary
        self.parent = None
        self.round = rnd
        self.weight = weight

    def children(self) -> list:
        if self.kind == BASE:
            return []
        return list(self.edges.values()) + list(self.unary)

    def __repr__(self) -> str:
        return f"<{self.kind} rep={self.rep!r} bounds={self.bounds!r} r={self.round}>"


class _RoundState:
    __slots__ = ("adj", "rk")

    def __init__(self, adj: dict, rk: tuple):
        self.adj = adj  # neighbour -> edge cluster (BASE or BINARY)
        self.rk = rk    # unary clusters raked in at the end of the previous round


def _mx(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a if a > b else b


def _mn(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a if a < b else b


@dataclass
class PathDecomposition:
    """Clusters (cluster, from_vertex, to_vertex) in order from ``u`` to ``v``."""

    clusters: List[Tuple[Cluster, Hashable, Hashable]]
    boundaries: List[Hashable]
    total_length: int


class RCForest:
    """Dynamic forest over hashable, mutually comparable vertex ids.

    ``vertex_weights`` enables path weight search and makes the designated root
    of each component its maximum-weight vertex; without weights the designated
    root is the smallest vertex id.
    """

    def __init__(self, vertices: Iterable = (), vertex_weights: Optional[dict] = None,
                 pool: Optional[ForkJoin] = None):
        self.vw = dict(vertex_weights) if vertex_weights is not None else None
        self.rec: Dict[Hashable, List[_RoundState]] = {}
        self.K: Dict[Hashable, Cluster] = {}
        self.base: Dict[tuple, Cluster] = {}
        self.tally = Tally()
        self._vh: Dict[Hashable, int] = {}
        self._pool = pool
        vs = list(vertices)
        for v in vs:
            if v in self.rec:
                raise SLDError(f"duplicate vertex {v!r}", code="DUPLICATE_VERTEX")
            self.rec[v] = [_RoundState({}, ())]
        if vs:
            self._propagate({v: {} for v in vs})

    # ------------------------------------------------------------------ basics

    @property
    def pool(self) -> ForkJoin:
        return self._pool or get_pool()

    @property
    def weighted(self) -> bool:
        return self.vw is not None

    def __contains__(self, v) -> bool:
        return v in self.rec

    def __len__(self) -> int:
        return len(self.rec)

    def vertices(self):
        return self.rec.keys()

    def num_edges(self) -> int:
        return len(self.base)

    def edges(self) -> List[tuple]:
        return [(c.bounds[0], c.bounds[1], c.weight) for c in self.base.values()]

    def has_edge(self, u, v) -> bool:
        return _ek(u, v) in self.base

    def edge_weight(self, u, v):
        return self._edge(u, v).weight

    def degree(self, v) -> int:
        return len(self._state0(v).adj)

    def neighbors(self, v) -> list:
        return list(self._state0(v).adj)

    def _state0(self, v) -> _RoundState:
        try:
            return self.rec[v][0]
        except KeyError:
            raise SLDError(f"unknown vertex {v!r}", code="OUT_OF_RANGE") from None

    def _check(self, v) -> None:
        if v not in self.rec:
            raise SLDError(f"unknown vertex {v!r}", code="OUT_OF_RANGE")

    def _edge(self, u, v) -> Cluster:
        c = self.base.get(_ek(u, v))
        if c is None:
            raise SLDError(f"no edge {u!r}-{v!r}", code="NO_SUCH_EDGE")
        return c

    def _prio(self, v, r: int):
        h = self._vh.get(v)
        if h is None:
            h = self._vh[v] = _stable_hash(v)
        return (_splitmix(h ^ (r * 0x9E3779B97F4A7C15 & _M64)), v)

    # --------------------------------------------------------- vertex changes

    def add_vertex(self, v, weight=None) -> None:
        if v in self.rec:
            raise SLDError(f"duplicate vertex {v!r}", code="DUPLICATE_VERTEX")
        if self.vw is not None:
            self.vw[v] = weight
        self.rec[v] = [_RoundState({}, ())]
        self._propagate({v: {}})

    def remove_vertex(self, v) -> None:
        self._check(v)
        if self.rec[v][0].adj:
            raise SLDError(f"vertex {v!r} still has edges", code="VERTEX_NOT_ISOLATED")
        del self.rec[v]
        self.K.pop(v, None)
        self._vh.pop(v, None)
        if self.vw is not None:
            self.vw.pop(v, None)

    # ------------------------------------------------------------ link / cut

    def link(self, u, v, weight=None) -> None:
        self.batch_link([(u, v, weight)])

    def cut(self, u, v) -> None:
        self.batch_cut([(u, v)])

    def batch_link(self, edges: Sequence) -> None:
        """Link a batch atomically; the result equals any sequential order."""
        norm = []
        for e in edges:
            u, v = e[0], e[1]
            w = e[2] if len(e) > 2 else None
            self._check(u)
            self._check(v)
            if u == v:
                raise SLDError(f"self loop at {u!r}", code="SELF_LOOP")
            norm.append((u, v, w))
        if not norm:
            return
        # atomic cycle check over component representatives
        reps = {}
        parent: dict = {}

        def find(x):
            while parent.get(x, x) != x:
                x = parent[x]
            return x

        bad = []
        for u, v, _ in norm:
            ru = reps.get(u)
            if ru is None:
                ru = reps[u] = self.representative(u)
            rv = reps.get(v)
            if rv is None:
                rv = reps[v] = self.representative(v)
            a, b = find(ru), find(rv)
            if a == b:
                bad.append((u, v))
            else:
                parent[a] = b
        if bad:
            raise SLDError(f"links would close a cycle: {bad}", code="ALREADY_CONNECTED", edges=bad)
        old = {}
        for u, v, w in norm:
            c = Cluster(BASE, None, (u, v), None, (), -1, w)
            c.size, c.plen, c.vmin, c.vmax, c.emax = 0, 0, None, None, w
            c.top, c.minv, c.reach = None, None, {u: -1, v: -1}
            self.base[_ek(u, v)] = c
            for a, b in ((u, v), (v, u)):
                st = self.rec[a][0]
                if a not in old:
                    old[a] = st.adj
                adj = dict(st.adj)
                adj[b] = c
                self.rec[a][0] = _RoundState(adj, st.rk)
        self._propagate(old)

    def batch_cut(self, edges: Sequence) -> None:
        keys = []
        seen = set()
        missing = []
        for e in edges:
            u, v = e[0], e[1]
            k = _ek(u, v)
            if k not in self.base or k in seen:
                missing.append((u, v))
            seen.add(k)
            keys.append(k)
        if missing:
            raise SLDError(f"no such edges: {missing}", code="NO_SUCH_EDGE", edges=missing)
        if not keys:
            return
        old = {}
        for k in keys:
            c = self.base.pop(k)
            u, v = c.bounds
            for a, b in ((u, v), (v, u)):
                st = self.rec[a][0]
                if a not in old:
                    old[a] = st.adj
                adj = dict(st.adj)
                del adj[b]
                self.rec[a][0] = _RoundState(adj, st.rk)
        self._propagate(old)

    # ----------------------------------------------------- change propagation

    def _old_decision(self, v, r: int):
        rec = self.rec[v]
        if len(rec) - 1 != r:
            return None
        k = self.K.get(v)
        if k is None or k.round != r:
            return ("?",)
        if k.kind == NULLARY:
            return (_FINAL,)
        if k.kind == UNARY:
            return (_RAKE, k.bounds[0])
        return (_COMPRESS,)

    def _decide(self, v, r: int):
        adj = self.rec[v][r].adj
        d = len(adj)
        if d == 0:
            return (_FINAL,)
        if d > 2:
            return None
        pv = self._prio(v, r)
        if d == 1:
            for u in adj:
                if len(self.rec[u][r].adj) == 1 and self._prio(u, r) < pv:
                    return None
                return (_RAKE, u)
        for u in adj:
            du = len(self.rec[u][r].adj)
            if du == 1 or (du == 2 and self._prio(u, r) < pv):
                return None
        return (_COMPRESS,)

    def _propagate(self, old0: Dict[Hashable, dict]) -> None:
        """Re-contract from round 0 wherever a vertex's round state changed.

        ``old0`` maps every vertex whose round-0 state was replaced to its
        previous adjacency (used to reach former neighbours).
        """
        A = set(old0)
        old_adj = old0
        r = 0
        tally = self.tally
        while A:
            R = set(A)
            for v in A:
                R.update(self.rec[v][r].adj)
            newdec = {}
            changed = []
            for v in R:
                nd = self._decide(v, r)
                if v in A or nd != self._old_decision(v, r):
                    newdec[v] = nd
                    changed.append(v)
            for v in changed:
                nd = newdec[v]
                if nd is not None:
                    del self.rec[v][r + 1:]
                    self.K[v] = self._build(v, r, nd)
                    tally.visits += 1
            cand = set()
            for v in changed:
                cand.add(v)
                cand.update(self.rec[v][r].adj)
                oa = old_adj.get(v)
                if oa:
                    cand.update(oa)
            nextA = set()
            next_old = {}
            for y in cand:
                rec = self.rec.get(y)
                if rec is None or len(rec) <= r:
                    continue
                if y in newdec:
                    if newdec[y] is not None:
                        continue
                elif len(rec) == r + 1:
                    continue
                st = self._next_state(y, r, newdec)
                if len(rec) > r + 1:
                    prev = rec[r + 1]
                    if prev.rk == st.rk and prev.adj == st.adj:
                        # an earlier round changed, so y's cluster must still be rebuilt
                        if y not in newdec:
                            continue
                        st = prev
                    next_old[y] = prev.adj
                    rec[r + 1] = st
                else:
                    next_old[y] = {}
                    rec.append(st)
                nextA.add(y)
            A = nextA
            old_adj = next_old
            r += 1

    def _dec_now(self, z, r, newdec):
        if z in newdec:
            return newdec[z]
        rec = self.rec[z]
        if len(rec) - 1 == r:
            return self._old_decision(z, r)
        return None

    def _next_state(self, y, r: int, newdec) -> _RoundState:
        adj = {}
        rk = []
        for z, e in self.rec[y][r].adj.items():
            dz = self._dec_now(z, r, newdec)
            if dz is None:
                adj[z] = e
            elif dz[0] == _RAKE:
                rk.append(self.K[z])
            else:
                for other in self.rec[z][r].adj:
                    if other != y:
                        adj[other] = self.K[z]
        if len(rk) > 1:
            rk.sort(key=lambda c: self._prio(c.rep, 0))
        return _RoundState(adj, tuple(rk))

    def _build(self, v, r: int, dec) -> Cluster:
        rec = self.rec[v]
        adj = rec[r].adj
        unary = []
        for s in rec[:r + 1]:
            unary.extend(s.rk)
        unary = tuple(unary)
        if dec[0] == _FINAL:
            c = Cluster(NULLARY, v, (), {}, unary, r)
        elif dec[0] == _RAKE:
            c = Cluster(UNARY, v, (dec[1],), {dec[1]: adj[dec[1]]}, unary, r)
        else:
            a, b = sorted(adj, key=lambda x: self._prio(x, 0))
            c = Cluster(BINARY, v, (a, b), {a: adj[a], b: adj[b]}, unary, r)
        self._aggregate(c)
        for ch in c.edges.values():
            ch.parent = c
        for ch in unary:
            ch.parent = c
        return c

    def _aggregate(self, c: Cluster) -> None:
        m = c.rep
        vw = self.vw
        size = 1
        top = (vw[m], m) if vw is not None else None
        minv = m
        ur = 0
        for u in c.unary:
            size += u.size
            minv = min(minv, u.minv)
            if vw is not None:
                top = max(top, u.top)
            if u.reach[m] > ur:
                ur = u.reach[m]
        edges = c.edges
        for e in edges.values():
            size += e.size
            if e.minv is not None:
                minv = min(minv, e.minv)
            if vw is not None and e.top is not None:
                top = max(top, e.top)
        c.size = size
        c.minv = minv
        c.top = top
        reach = {}
        for b, e in edges.items():
            d = ur
            for b2, e2 in edges.items():
                if b2 != b and e2.reach[m] > d:
                    d = e2.reach[m]
            far = e.plen + 1 + d
            reach[b] = far if far > e.reach[b] else e.reach[b]
        c.reach = reach
        if c.kind == BINARY:
            ea, eb = edges[c.bounds[0]], edges[c.bounds[1]]
            c.plen = ea.plen + 1 + eb.plen
            if vw is not None:
                own = (vw[m], m)
                c.vmin = _mn(_mn(ea.vmin, own), eb.vmin)
                c.vmax = _mx(_mx(ea.vmax, own), eb.vmax)
            else:
                c.vmin = c.vmax = None
            c.emax = _mx(ea.emax, eb.emax)
        else:
            c.plen = 0
            c.vmin = c.vmax = c.emax = None

    # ----------------------------------------------------------- connectivity

    def root_cluster(self, v, tally: Optional[Tally] = None) -> Cluster:
        self._check(v)
        c = self.K[v]
        n = 1
        while c.parent is not None:
            c = c.parent
            n += 1
        (tally or self.tally).visits += n
        return c

    def representative(self, v, tally: Optional[Tally] = None):
        return self.root_cluster(v, tally).rep

    def connected(self, u, v, tally: Optional[Tally] = None) -> bool:
        return self.root_cluster(u, tally) is self.root_cluster(v, tally)

    def batch_connected(self, pairs: Sequence[Tuple], tally: Optional[Tally] = None) -> List[bool]:
        """Positionally aligned answers; each distinct vertex is rooted once."""
        t = tally or self.tally
        roots = {}
        out = []
        for a, b in pairs:
            for x in (a, b):
                if x not in roots:
                    roots[x] = self.root_cluster(x, t)
            out.append(roots[a] is roots[b])
        return out

    def component_size(self, v) -> int:
        return self.root_cluster(v).size

    def designated_root(self, v, tally: Optional[Tally] = None):
        """Max-weight vertex of the component if weighted, else the smallest id."""
        rc = self.root_cluster(v, tally)
        return rc.top[1] if self.vw is not None else rc.minv

    def component_vertices(self, v) -> list:
        out: list = []
        self._collect(self.root_cluster(v), out)
        return out

    def _collect(self, c: Cluster, out: list) -> None:
        stack = [c]
        while stack:
            x = stack.pop()
            if x.kind == BASE:
                continue
            out.append(x.rep)
            stack.extend(x.edges.values())
            stack.extend(x.unary)

    # --------------------------------------------------------- path queries

    def _ancestors(self, c: Cluster) -> List[Cluster]:
        out = []
        while c is not None:
            out.append(c)
            c = c.parent
        return out

    def _path_to_rep(self, u, top: Cluster, tally: Tally) -> list:
        """Clusters from ``u`` to ``top.rep``, all strictly inside ``top``."""
        c = self.K[u]
        if c is top:
            return []
        paths = {b: [(c.edges[b], u, b)] for b in c.bounds}
        while c.parent is not top:
            p = c.parent
            tally.visits += 1
            y = p.rep
            py = paths[y]
            nxt = {}
            for b in p.bounds:
                got = paths.get(b)
                nxt[b] = got if got is not None else py + [(p.edges[b], y, b)]
            paths = nxt
            c = p
        return paths[top.rep]

    def path_decomposition(self, u, v, tally: Optional[Tally] = None) -> PathDecomposition:
        tally = tally or self.tally
        self._check(u)
        self._check(v)
        if u == v:
            return PathDecomposition([], [u], 1)
        au = self._ancestors(self.K[u])
        ids = {id(c) for c in au}
        c = self.K[v]
        while c is not None and id(c) not in ids:
            c = c.parent
            tally.visits += 1
        tally.visits += len(au)
        if c is None:
            raise SLDError(f"{u!r} and {v!r} are not connected", code="NOT_CONNECTED")
        lu = self._path_to_rep(u, c, tally)
        lv = self._path_to_rep(v, c, tally)
        items = lu + [(k, b, a) for (k, a, b) in reversed(lv)]
        bounds = [u] + [b for (_, _, b) in items]
        total = sum(k.plen for (k, _, _) in items) + len(items) + 1
        return PathDecomposition(items, bounds, total)

    def _unpack(self, c: Cluster, x, y, out: list) -> None:
        """Append the cluster-path interior of ``c`` walked from ``x`` to ``y``."""
        stack = [(c, x, y)]
        while stack:
            item = stack.pop()
            if not isinstance(item, tuple):
                out.append(item[0])
                continue
            k, a, b = item
            if k.kind == BASE:
                continue
            m = k.rep
            stack.append((k.edges[b], m, b))
            stack.append([m])
            stack.append((k.edges[a], a, m))

    def extract_path(self, u, v, tally: Optional[Tally] = None) -> list:
        dec = self.path_decomposition(u, v, tally)
        if not dec.clusters:
            return [u]

        def piece(i):
            k, a, b = dec.clusters[i]
            seg: list = []
            self._unpack(k, a, b, seg)
            seg.append(b)
            return seg

        parts = self.pool.pmap(piece, range(len(dec.clusters)))
        out = [u]
        for p in parts:
            out.extend(p)
        (tally or self.tally).visits += len(out)
        return out

    def path_max_edge(self, u, v):
        """Largest edge weight on the tree path.

        With rank keys ``(w, lo, hi)`` as weights, as the dendrogram uses, the
        value names the edge itself.
        """
        if u == v:
            raise SLDError("path of a single vertex has no edge", code="SAME_VERTEX")
        dec = self.path_decomposition(u, v)
        best = None
        for k, _, _ in dec.clusters:
            best = _mx(best, k.emax)
        return best

    def path_median(self, u, v, tally: Optional[Tally] = None):
        tally = tally or self.tally
        dec = self.path_decomposition(u, v, tally)
        t = dec.total_length // 2
        idx = 0
        if t == 0:
            return u
        idx = 1
        for (k, a, b) in dec.clusters:
            if t < idx + k.plen:
                return self._index_into(k, a, b, t - idx, tally)
            idx += k.plen
            if t == idx:
                return b
            idx += 1
        raise AssertionError("median index past path end")

    def _index_into(self, k: Cluster, a, b, t: int, tally: Tally):
        while True:
            tally.visits += 1
            ea, eb = k.edges[a], k.edges[b]
            if t < ea.plen:
                k, b = ea, k.rep
            elif t == ea.plen:
                return k.rep
            else:
                t -= ea.plen + 1
                k, a = eb, k.rep

    def first_step(self, u, v):
        """The neighbour of ``u`` on the path toward ``v``."""
        dec = self.path_decomposition(u, v)
        if not dec.clusters:
            raise SLDError("path of a single vertex has no step", code="SAME_VERTEX")
        k, a, b = dec.clusters[0]
        if k.plen == 0:
            return b
        return self._index_into(k, a, b, 0, self.tally)

    # ------------------------------------------------------ subtree queries

    def _edge_side(self, v, p, collect: Optional[list]) -> int:
        e = self._edge(v, p)
        side = {v: True, p: False}
        c = e
        cnt = 0
        while c.parent is not None:
            par = c.parent
            self.tally.visits += 1
            y = par.rep
            sy = side[y]
            if sy:
                cnt += 1
                if collect is not None:
                    collect.append(y)
                for ch in par.edges.values():
                    if ch is not c:
                        cnt += ch.size
                        if collect is not None:
                            self._collect(ch, collect)
                for ch in par.unary:
                    if ch is not c:
                        cnt += ch.size
                        if collect is not None:
                            self._collect(ch, collect)
            nxt = {}
            for b in par.bounds:
                nxt[b] = side[b] if b in c.bounds else sy
            side = nxt
            c = par
        return cnt

    def subtree_size(self, root, v) -> int:
        """Vertices in the subtree below ``v`` when the component hangs from ``root``."""
        if not self.connected(root, v):
            raise SLDError(f"{v!r} not connected to {root!r}", code="NOT_CONNECTED")
        if root == v:
            return self.component_size(v)
        return self._edge_side(v, self.first_step(v, root), None)

    def subtree_vertices(self, root, v) -> list:
        if not self.connected(root, v):
            raise SLDError(f"{v!r} not connected to {root!r}", code="NOT_CONNECTED")
        if root == v:
            return self.component_vertices(v)
        out: list = []
        self._edge_side(v, self.first_step(v, root), out)
        return out

    def side_vertices(self, v, p) -> list:
        """Vertices on ``v``'s side of the edge ``(v, p)``."""
        out: list = []
        self._edge_side(v, p, out)
        return out

    def eccentricity(self, r) -> int:
        """Largest edge distance from ``r`` to any vertex of its component."""
        self._check(r)
        c = self.K[r]
        inside = 0
        for u in c.unary:
            inside = max(inside, u.reach[r])
        dist = {}
        for b, e in c.edges.items():
            inside = max(inside, e.reach[r])
            dist[b] = e.plen + 1
        while c.parent is not None:
            p = c.parent
            self.tally.visits += 1
            y = p.rep
            dy = dist[y]
            far = 0
            for ch in p.edges.values():
                if ch is not c and ch.reach[y] > far:
                    far = ch.reach[y]
            for ch in p.unary:
                if ch is not c and ch.reach[y] > far:
                    far = ch.reach[y]
            inside = max(inside, dy + far)
            nxt = {}
            for b in p.bounds:
                nxt[b] = dist[b] if b in c.bounds else dy + p.edges[b].plen + 1
            dist = nxt
            c = p
        return inside

    # ------------------------------------------------- path weight search

    def _items(self, k: Cluster, a, b) -> list:
        m = k.rep
        return [(k.edges[a], a, m), [m], (k.edges[b], m, b)]

    def _top_items(self, dec: PathDecomposition) -> list:
        items: list = [[dec.boundaries[0]]]
        for (k, a, b) in dec.clusters:
            items.append((k, a, b))
            items.append([b])
        return items

    def pws(self, u, v, w, tally: Optional[Tally] = None) -> Tuple:
        """(max-weight path vertex with weight < w, min-weight vertex with weight > w)."""
        if self.vw is None:
            raise SLDError("path weight search needs vertex weights", code="UNWEIGHTED")
        tally = tally or self.tally
        dec = self.path_decomposition(u, v, tally)
        state = [None, None]  # pred, last weight seen
        succ = self._search(self._top_items(dec), w, state, tally)
        return state[0], succ

    def _search(self, items: list, w, state: list, tally: Tally):
        vw = self.vw
        for it in items:
            if isinstance(it, list):
                x = it[0]
                wx = vw[x]
                if state[1] is not None and not state[1] < wx:
                    raise SLDError("path weights are not increasing", code="NON_MONOTONE_PATH")
                state[1] = wx
                if wx < w:
                    state[0] = x
                elif w < wx:
                    return x
                continue
            k = it[0]
            if k.plen == 0:
                continue
            lo, hi = k.vmin, k.vmax
            if state[1] is not None and not state[1] < lo[0]:
                raise SLDError("path weights are not increasing", code="NON_MONOTONE_PATH")
            if hi[0] < w:
                state[0] = hi[1]
                state[1] = hi[0]
            elif w < lo[0]:
                return lo[1]
            else:
                tally.visits += 1
                s = self._search(self._items(k, it[1], it[2]), w, state, tally)
                if s is not None:
                    return s
        return None

    def monotone_cursor(self, u, v, tally: Optional[Tally] = None) -> "MonotonePWS":
        return MonotonePWS(self, u, v, tally or self.tally)

    def pws_monotone_batch(self, u, v, ws: Sequence, tally: Optional[Tally] = None,
                           stats: Optional[dict] = None) -> List[Tuple]:
        cur = self.monotone_cursor(u, v, tally)
        out = [cur.query(w) for w in ws]
        if stats is not None:
            stats["max_node_visits"] = cur.max_visits()
            stats["visits"] = sum(cur.visits.values())
            stats["touched"] = len(cur.visits)
        return out

    # -------------------------------------------------------------- auditing

    def height(self) -> int:
        """Levels in the hierarchy, counting base vertices/edges as level 1."""
        depth: Dict[int, int] = {}

        def h(c: Cluster) -> int:
            if c.kind == BASE:
                return 1
            got = depth.get(id(c))
            if got is None:
                got = 1 + max([h(ch) for ch in c.children()] + [1])
                depth[id(c)] = got
            return got

        roots = {id(self.root_cluster(v)): self.root_cluster(v) for v in self.rec}
        return max((h(c) for c in roots.values()), default=0)

    def clusters(self) -> List[Cluster]:
        return list(self.K.values()) + list(self.base.values())

    def dump(self) -> List[str]:
        """``level kind children... aggregates...`` per hierarchy node, ordered."""
        rows = []
        for c in self.clusters():
            verts: list = []
            if c.kind == BASE:
                lo_v = min(c.bounds)
                kids = "-"
            else:
                self._collect(c, verts)
                lo_v = min(verts)
                kids = " ".join(sorted(_label(ch) for ch in c.children())) or "-"
            aggs = f"size={c.size} plen={c.plen} vmin={c.vmin} vmax={c.vmax} emax={c.emax}"
            rows.append(((c.round + 1, lo_v, _label(c)),
                         f"{c.round + 1} {c.kind} {_label(c)} [{kids}] {aggs}"))
        rows.sort(key=lambda t: t[0])
        return [r for _, r in rows]

    def audit(self) -> None:
        """Check the hierarchy against a fresh build and brute-force aggregates."""
        fresh = RCForest(self.rec.keys(), self.vw)
        fresh.batch_link([(a, b, w) for a, b, w in self.edges()])
        for v, rec in self.rec.items():
            frec = fresh.rec[v]
            if len(rec) != len(frec):
                raise SLDError(f"round count differs at {v!r}", code="RC_MISMATCH")
            for s, fs in zip(rec, frec):
                if set(s.adj) != set(fs.adj) or len(s.rk) != len(fs.rk):
                    raise SLDError(f"round state differs at {v!r}", code="RC_MISMATCH")
            k, fk = self.K[v], fresh.K[v]
            if (k.kind, set(k.bounds), k.round) != (fk.kind, set(fk.bounds), fk.round):
                raise SLDError(f"cluster differs at {v!r}", code="RC_MISMATCH")
            if _shape(k) != _shape(fk):
                raise SLDError(f"cluster children differ at {v!r}", code="RC_MISMATCH")
        for c in self.clusters():
            for ch in c.children():
                if ch.parent is not c:
                    raise SLDError(f"stale parent pointer under {c!r}", code="RC_MISMATCH")
            if c.kind == NULLARY:
                if c.parent is not None:
                    raise SLDError(f"component root {c!r} has a parent", code="RC_MISMATCH")
            elif c.parent is None or not any(ch is c for ch in c.parent.children()):
                raise SLDError(f"{c!r} detached from the hierarchy", code="RC_MISMATCH")
        self._audit_aggregates()
        n = len(self.rec)
        if self.height() > height_bound(n):
            raise SLDError(f"height {self.height()} above bound for n={n}", code="RC_TOO_TALL")

    def _audit_aggregates(self) -> None:
        adj = defaultdict(dict)
        for a, b, w in self.edges():
            adj[a][b] = w
            adj[b][a] = w
        for c in self.clusters():
            inner: list = []
            if c.kind != BASE:
                self._collect(c, inner)
            if c.size != len(inner):
                raise SLDError(f"size aggregate wrong at {c!r}", code="RC_AGGREGATE")
            if c.kind in (BINARY, BASE):
                a, b = c.bounds
                path: list = []
                self._unpack(c, a, b, path)
                if c.plen != len(path):
                    raise SLDError(f"plen aggregate wrong at {c!r}", code="RC_AGGREGATE")
                seq = [a] + path + [b]
                emax = None
                for x, y in zip(seq, seq[1:]):
                    if y not in adj[x]:
                        raise SLDError(f"unpacked path broken at {c!r}", code="RC_AGGREGATE")
                    emax = _mx(emax, adj[x][y])
                if emax != c.emax:
                    raise SLDError(f"emax aggregate wrong at {c!r}", code="RC_AGGREGATE")
                if self.vw is not None and path:
                    ws = [(self.vw[x], x) for x in path]
                    if (min(ws), max(ws)) != (c.vmin, c.vmax):
                        raise SLDError(f"vmin/vmax wrong at {c!r}", code="RC_AGGREGATE")
            allowed = set(inner) | set(c.bounds)
            for b in c.bounds:
                dist = {b: 0}
                frontier = [b]
                while frontier:
                    nxt = []
                    for x in frontier:
                        for y in adj[x]:
                            if y in allowed and y not in dist and (x == b or x in set(inner)):
                                if x == b and c.kind == BASE:
                                    continue
                                dist[y] = dist[x] + 1
                                nxt.append(y)
                    frontier = nxt
                far = max((dist[x] for x in inner if x in dist), default=-1)
                if far != c.reach[b]:
                    raise SLDError(f"reach aggregate wrong at {c!r}", code="RC_AGGREGATE")


class MonotonePWS:
    """Resumable path weight search for strictly increasing query weights.

    The path decomposition is computed once.  Each query resumes from the
    cluster where the previous one stopped, climbs out of clusters whose whole
    range is now below the query, and descends only where the query lands, so
    every hierarchy node is entered at most once and left at most once.
    """

    def __init__(self, forest: RCForest, u, v, tally: Tally):
        if forest.vw is None:
            raise SLDError("path weight search needs vertex weights", code="UNWEIGHTED")
        self.forest = forest
        self.tally = tally
        dec = forest.path_decomposition(u, v, tally)
        self.frames = [[forest._top_items(dec), 0, None]]
        self.length = dec.total_length
        self.pred = None
        self.pending = None
        self.last = None
        self.visits: Dict[int, int] = defaultdict(int)
        self.queries = 0

    def _visit(self, k: Cluster) -> None:
        self.visits[id(k)] += 1
        self.tally.visits += 1

    def max_visits(self) -> int:
        return max(self.visits.values(), default=0)

    def query(self, w) -> Tuple:
        if self.last is not None and not self.last < w:
            raise SLDError("queries must be strictly increasing", code="NON_INCREASING_QUERIES")
        self.last = w
        self.queries += 1
        if self.pending is not None:
            self.pred, self.pending = self.pending, None
        vw = self.forest.vw
        frames = self.frames
        while frames:
            frame = frames[-1]
            items, idx, k = frame
            if idx >= len(items):
                frames.pop()
                if k is not None:
                    self._visit(k)
                if frames:
                    frames[-1][1] += 1
                continue
            it = items[idx]
            if isinstance(it, list):
                x = it[0]
                wx = vw[x]
                if wx < w:
                    self.pred = x
                elif wx == w:
                    self.pending = x
                else:
                    return self.pred, x
                frame[1] += 1
                continue
            c = it[0]
            if c.plen == 0:
                frame[1] += 1
                continue
            if c.vmax[0] < w:
                self.pred = c.vmax[1]
                frame[1] += 1
                continue
            if w < c.vmin[0]:
                return self.pred, c.vmin[1]
            self._visit(c)
            frames.append([self.forest._items(c, it[1], it[2]), 0, c])
        return self.pred, None


def _ek(u, v) -> tuple:
    return (u, v) if u < v else (v, u)


def _shape(c: Cluster) -> tuple:
    kids = sorted(_label(ch) for ch in c.children())
    return (c.kind, tuple(kids))


def _label(c: Cluster) -> str:
    if c.kind == BASE:
        a, b = sorted(c.bounds)
        return f"e({a},{b})"
    return f"{c.kind[0]}({c.rep})"
