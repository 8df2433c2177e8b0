"""Dendrogram update algorithms.

Every update is bracketed by a parent-map journal so ``pointer_changes`` is the
net difference between the maps before and after, whatever intermediate
rewiring the algorithm did.  Four interchangeable modes:

* ``seq-h``  spines by parent chasing, sequential list merge;
* ``par-h``  spines unpacked from the dendrogram's RC tree, parallel merge/filter;
* ``seq-os`` alternating path weight search with one resumable cursor per spine;
* ``par-os`` divide and conquer around path medians.

Deletion is not output-sensitive in any mode; the ``-os`` modes delete with the
matching ``-h`` strategy.
"""
from __future__ import annotations

import heapq
import time
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .core import ROOT, EdgeKey, SLDError, Spine, UpdateReport, check_weight, edge_key
from .dendrogram import DendrogramState
from .forkjoin import get_pool, par_filter, par_merge
from .rc_tree import Tally, _splitmix, _stable_hash

SEQ_H, SEQ_OS, PAR_H, PAR_OS = "seq-h", "seq-os", "par-h", "par-os"
MODES = (SEQ_H, SEQ_OS, PAR_H, PAR_OS)
_PARALLEL = (PAR_H, PAR_OS)


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise SLDError(f"unknown mode {mode!r}", code="BAD_MODE")


# ---------------------------------------------------------------- bookkeeping

class _Run:
    """Times an update, journals the parent map and collects RC visit counts."""

    def __init__(self, st: DendrogramState):
        self.st = st
        self.report = UpdateReport()
        self.t0 = time.perf_counter()
        self.v0 = self._visits()
        st.begin()

    def _visits(self) -> int:
        return self.st.forest_rc.tally.visits + self.st.sld_rc.tally.visits

    def add_visits(self, n: int) -> None:
        self.st.sld_rc.tally.visits += n

    def finish(self, height_of: Iterable) -> UpdateReport:
        rep = self.report
        rep.rc_nodes_visited = self._visits() - self.v0
        rep.pointer_changes, rep.touched_nodes = self.st.end()
        hs = [self.st.height(x) for x in height_of]
        rep.dendrogram_height = max(hs, default=0)
        rep.elapsed = time.perf_counter() - self.t0
        return rep


def _chase(st: DendrogramState, k: EdgeKey) -> Spine:
    out = [k]
    p = st.parents[k]
    while p is not None:
        out.append(p)
        p = st.parents[p]
    return out


def _spine(st: DendrogramState, k: EdgeKey, mode: str, tally: Tally) -> Spine:
    if mode in _PARALLEL:
        return st.extract_spine(k, tally)
    return _chase(st, k)


def _chain(st: DendrogramState, seq: Sequence[EdgeKey], top=ROOT) -> List[tuple]:
    """Assignments linking ``seq`` bottom-up, keeping only the ones that change."""
    out = []
    par = st.parents
    for i, k in enumerate(seq):
        p = seq[i + 1] if i + 1 < len(seq) else top
        if par.get(k, 0) != p:
            out.append((k, p))
    return out


def _merge_sorted(st: DendrogramState, a: Sequence, b: Sequence, mode: str) -> list:
    rk = st._rank_any
    if mode in _PARALLEL:
        return par_merge(a, b, key=rk)
    return list(heapq.merge(a, b, key=rk))


def _merge_many(st: DendrogramState, lists: List[Sequence], mode: str) -> list:
    """Balanced pairwise reduction of rank-sorted lists."""
    lists = [l for l in lists if l]
    if not lists:
        return []
    while len(lists) > 1:
        nxt = [_merge_sorted(st, lists[i], lists[i + 1], mode) for i in range(0, len(lists) - 1, 2)]
        if len(lists) % 2:
            nxt.append(lists[-1])
        lists = nxt
    return list(lists[0])


# ------------------------------------------------------------ spine merging

def _merge_lists(st: DendrogramState, a: Spine, b: Spine, mode: str, rep: UpdateReport) -> None:
    rep.spine_lengths.extend([len(a), len(b)])
    changes = _chain(st, _merge_sorted(st, a, b, mode))
    n = st.apply_parent_changes(changes)
    rep.merge_changes += n
    rep.merge_log.append((0, n))


def merge_spines(st: DendrogramState, a: Spine, b: Spine, mode: str = SEQ_H) -> UpdateReport:
    """Merge two root-directed spines of distinct dendrogram components into one chain."""
    _check_mode(mode)
    if not a or not b:
        raise SLDError("cannot merge an empty spine", code="EMPTY_SPINE")
    if a[-1] == b[-1] or st.sld_rc.connected(a[0], b[0]):
        raise SLDError("spines belong to the same component", code="SAME_COMPONENT")
    run = _Run(st)
    if mode == SEQ_OS:
        _merge_os(st, (a[0], a[-1]), (b[0], b[-1]), run.report)
    elif mode == PAR_OS:
        _merge_dc(st, (a[0], a[-1]), (b[0], b[-1]), run.report)
    else:
        _merge_lists(st, a, b, mode, run.report)
    return run.finish([a[0]])


def _merge_os(st: DendrogramState, sa: tuple, sb: tuple, rep: UpdateReport) -> None:
    """Alternating search: each query finds exactly one node whose parent changes.

    Starting from the lower head, ask the head's spine for its last node below
    the other spine's head; that node now points across.  Continue from the
    other spine with the first node that was skipped over.
    """
    sld = st.sld_rc
    rk = sld.vw
    segs = (sa, sb)
    cursors = [None, None]

    def cursor(i):
        if cursors[i] is None:
            cursors[i] = sld.monotone_cursor(segs[i][0], segs[i][1])
        return cursors[i]

    x = 0 if rk[sa[0]] < rk[sb[0]] else 1
    y_head = segs[1 - x][0]
    changes = []
    while y_head is not None:
        pred, succ = cursor(x).query(rk[y_head])
        changes.append((pred, y_head))
        x = 1 - x
        y_head = succ
    n = st.apply_parent_changes(changes)
    rep.pws_queries += len(changes)
    rep.merge_changes += n
    rep.merge_log.append((len(changes), n))
    for c in cursors:
        if c is not None:
            rep.spine_lengths.append(c.length)
            rep.max_node_visits = max(rep.max_node_visits, c.max_visits())


@dataclass
class _DC:
    depth: int = 0
    pws: int = 0
    medians: int = 0
    visits: int = 0
    changes: Dict[EdgeKey, object] = field(default_factory=dict)

    def absorb(self, o: "_DC") -> None:
        self.pws += o.pws
        self.medians += o.medians
        self.visits += o.visits
        self.changes.update(o.changes)


def _merge_dc(st: DendrogramState, sa: tuple, sb: tuple, rep: UpdateReport) -> None:
    """Split the designated spine at its median, locate the median among the other
    spine, cut out the untouched middle run, recurse on both halves in parallel.

    All queries run against the unmodified dendrogram RC tree (segments are
    sub-paths of the original spines); the rewiring is applied as one batch.
    """
    sld = st.sld_rc
    rk = sld.vw
    par = st.parents
    pool = get_pool()

    def rec(X, Y, above) -> _DC:
        out = _DC()
        if X is None or Y is None:
            Z = X if Y is None else Y
            if Z is not None and par[Z[1]] != above:
                out.changes[Z[1]] = above
            return out
        t = Tally()
        m = sld.path_median(X[0], X[1], t)
        yp, ys = sld.pws(Y[0], Y[1], rk[m], t)
        out.medians, out.pws = 1, 1
        if yp is None:
            xx, mid_lo = None, X[0]
        else:
            xx, mid_lo = sld.pws(X[0], X[1], rk[yp], t)
            out.pws += 1
        if ys is None:
            mid_hi, yx = X[1], None
        else:
            mid_hi, yx = sld.pws(X[0], X[1], rk[ys], t)
            out.pws += 1
        out.visits = t.visits
        top = ys if ys is not None else above
        if par[mid_hi] != top:
            out.changes[mid_hi] = top
        lo_x = (X[0], xx) if xx is not None else None
        lo_y = (Y[0], yp) if yp is not None else None
        hi_x = (yx, X[1]) if yx is not None else None
        hi_y = (ys, Y[1]) if ys is not None else None
        # the other spine is designated one level down
        left, right = pool.fork2(lambda: rec(lo_y, lo_x, mid_lo), lambda: rec(hi_y, hi_x, above))
        out.absorb(left)
        out.absorb(right)
        out.depth = 1 + max(left.depth, right.depth)
        return out

    res = rec(sa, sb, ROOT)
    n = st.apply_parent_changes(sorted(res.changes.items(), key=lambda kv: rk[kv[0]]))
    st.sld_rc.tally.visits += res.visits
    rep.pws_queries += res.pws
    rep.median_queries += res.medians
    rep.merge_changes += n
    rep.merge_log.append((res.pws, n))
    rep.recursion_depth = max(rep.recursion_depth, res.depth)


def merge_spines_dc(st: DendrogramState, a: Spine, b: Spine) -> UpdateReport:
    return merge_spines(st, a, b, PAR_OS)


def depth_bound(h: int) -> int:
    """Calibrated ceiling on divide-and-conquer merge depth for spines of length <= h."""
    import math
    return 2 * math.ceil(math.log2(h + 2)) + 2


# ------------------------------------------------------------------ insert

def _check_insert(st: DendrogramState, u: int, v: int, w) -> EdgeKey:
    st.forest.check_vertex(u)
    st.forest.check_vertex(v)
    k = edge_key(u, v)
    check_weight(w)
    if k in st.forest:
        raise SLDError(f"edge {k} already present", code="DUPLICATE_RANK_KEY")
    if st.forest_rc.connected(u, v):
        raise SLDError(f"{u} and {v} already connected", code="WOULD_CREATE_CYCLE")
    return k


def _merge(st, a_bottom, b_bottom, mode, rep, tally):
    """Merge the spines starting at two nodes of distinct dendrogram components."""
    if mode == SEQ_OS or mode == PAR_OS:
        sld = st.sld_rc
        sa = (a_bottom, sld.designated_root(a_bottom))
        sb = (b_bottom, sld.designated_root(b_bottom))
        (_merge_os if mode == SEQ_OS else _merge_dc)(st, sa, sb, rep)
    else:
        _merge_lists(st, _spine(st, a_bottom, mode, tally), _spine(st, b_bottom, mode, tally), mode, rep)


def insert(st: DendrogramState, u: int, v: int, w, mode: str = SEQ_H) -> UpdateReport:
    """Add edge (u, v, w): place its node on u's side, then merge its spine with v's side."""
    _check_mode(mode)
    k = _check_insert(st, u, v, w)
    eu, ev = st.forest.min_incident(u), st.forest.min_incident(v)
    run = _Run(st)
    st.forest.add(k, w)
    st.forest_rc.link(u, v, st.rank(k))
    st.apply_parent_changes([], added=[k])
    t = st.sld_rc.tally
    if eu is not None:
        _merge(st, eu, k, mode, run.report, t)
    if ev is not None:
        _merge(st, k, ev, mode, run.report, t)
    return run.finish([k])


def insert_output_sensitive(st: DendrogramState, u: int, v: int, w) -> UpdateReport:
    return insert(st, u, v, w, SEQ_OS)


# ------------------------------------------------------------------ delete

def _unmerge(st: DendrogramState, k: EdgeKey, gone: frozenset, mode: str) -> Tuple[dict, list, int]:
    """Relink the characteristic spines of both endpoints after ``k`` (and ``gone``) left.

    Runs against the old dendrogram and the post-cut forest.  Returns the
    assignments, the spine lengths and the RC visits spent.
    """
    t = Tally()
    out: Dict[EdgeKey, object] = {}
    lens = []
    for z in (k.lo, k.hi):
        ez = st.forest.min_incident(z)
        if ez is None:
            continue
        sp = _spine(st, ez, mode, t)
        lens.append(len(sp))
        if mode in _PARALLEL:
            flags = st.forest_rc.batch_connected([(x.lo, z) for x in sp], t)
            keep = [f and x not in gone for x, f in zip(sp, flags)]
            kept = par_filter(sp, keep)
        else:
            kept = [x for x in sp if x not in gone and st.forest_rc.connected(x.lo, z, t)]
        for i, x in enumerate(kept):
            out[x] = kept[i + 1] if i + 1 < len(kept) else ROOT
    return out, lens, t.visits


def _delete_many(st: DendrogramState, pairs: Sequence, mode: str) -> UpdateReport:
    _check_mode(mode)
    keys = []
    bad = []
    for pr in pairs:
        k = edge_key(pr[0], pr[1])
        (bad if k not in st.forest or k in keys else keys).append(k)
    if bad:
        raise SLDError(f"no such edges: {[str(b) for b in bad]}", code="NO_SUCH_EDGE", edges=bad)
    run = _Run(st)
    if not keys:
        return run.finish([])
    for k in keys:
        st.forest.remove(k)
    st.forest_rc.batch_cut([(k.lo, k.hi) for k in keys])
    gone = frozenset(keys)
    if mode in _PARALLEL:
        plans = get_pool().pmap(lambda k: _unmerge(st, k, gone, mode), keys)
    else:
        plans = [_unmerge(st, k, gone, mode) for k in keys]
    merged: Dict[EdgeKey, object] = {}
    for changes, lens, vis in plans:
        run.add_visits(vis)
        run.report.spine_lengths.extend(lens)
        for x, p in changes.items():
            if merged.setdefault(x, p) != p:
                raise SLDError(f"conflicting parents for {x}", code="CYCLE")
    n = st.apply_parent_changes(sorted(merged.items(), key=lambda kv: st.rank(kv[0])), removed=keys)
    run.report.merge_changes += n
    ends = sorted({z for k in keys for z in (k.lo, k.hi)})
    return run.finish(ends)


def delete(st: DendrogramState, u: int, v: int, mode: str = SEQ_H) -> UpdateReport:
    return _delete_many(st, [(u, v)], mode)


def batch_delete(st: DendrogramState, edges: Sequence, mode: str = PAR_H) -> UpdateReport:
    return _delete_many(st, edges, mode)


# -------------------------------------------------------------- star merge

class _Virtual:
    """Stand-in dendrogram leaf for a center vertex (ranks below every edge)."""

    __slots__ = ("x",)

    def __init__(self, x):
        self.x = x

    def __hash__(self):
        return hash(("virtual", self.x))

    def __eq__(self, o):
        return isinstance(o, _Virtual) and o.x == self.x


@dataclass
class StarMergePlan:
    """One star of the incidence forest.

    ``attach`` lists, per batch edge, the center-side vertex ``x``, the edge node,
    and ``a`` = the minimum-rank edge at ``x`` inside the center component
    before the star (None when the center is a single vertex).  Segments of the
    center's spine union are keyed by their bottom node; a center vertex's
    virtual leaf starts the lowest segment on its path.
    """

    center: object
    attach: List[Tuple[int, EdgeKey, Optional[EdgeKey]]]
    leaf_spines: Dict[EdgeKey, Spine] = field(default_factory=dict)
    center_spines: Dict[int, Spine] = field(default_factory=dict)
    branching: List[EdgeKey] = field(default_factory=list)
    groups: Dict[object, List[Spine]] = field(default_factory=dict)


def _plan_star(st: DendrogramState, plan: StarMergePlan, mode: str) -> Tuple[dict, int]:
    """Read-only: the rewiring that folds every leaf spine into the center dendrogram.

    The center spines of all attachment vertices form a tree D0.  A node where
    two of those paths meet (two D0 children, virtual leaves included) is a
    bound; bounds cut D0 into segments, each bound opening the segment above
    it.  Leaf-spine nodes below a vertex's first bound join its lowest segment,
    nodes between consecutive bounds join the segment opened by the lower one.
    Each segment, merged with its leaf-spine pieces, becomes a chain whose top
    points to the bound above it, or is the root.
    """
    t = Tally()
    rk = st._rank_any
    xs = []
    for x, e, a in plan.attach:
        plan.leaf_spines[e] = _spine(st, e, mode, t)
        if x not in plan.center_spines:
            xs.append(x)
            plan.center_spines[x] = _spine(st, a, mode, t) if a is not None else []
    kids: Dict[EdgeKey, set] = {}
    for x in xs:
        path = [_Virtual(x)] + plan.center_spines[x]
        for c, p in zip(path, path[1:]):
            kids.setdefault(p, set()).add(c)
    is_bound = {d for d, cs in kids.items() if len(cs) >= 2}
    plan.branching = sorted(is_bound, key=rk)
    bounds_on: Dict[int, List[EdgeKey]] = {}
    seg_nodes: Dict[object, Dict[EdgeKey, None]] = {}
    above: Dict[object, object] = {}
    for x in xs:
        bottom = _Virtual(x)
        seg_nodes.setdefault(bottom, {})
        bl = []
        for d in plan.center_spines[x]:
            if d in is_bound:
                above[bottom] = d
                bottom = d
                bl.append(d)
                seg_nodes.setdefault(bottom, {})
            seg_nodes[bottom][d] = None
        above.setdefault(bottom, ROOT)
        bounds_on[x] = bl
    pieces: Dict[object, List[Spine]] = {g: [] for g in seg_nodes}
    for x, e, _ in plan.attach:
        sp = plan.leaf_spines[e]
        ranks = [rk(n) for n in sp]
        lo = 0
        keys = [_Virtual(x)] + bounds_on[x]
        for j, g in enumerate(keys):
            hi = bisect_left(ranks, rk(keys[j + 1])) if j + 1 < len(keys) else len(sp)
            if hi > lo:
                pieces[g].append(sp[lo:hi])
            lo = hi
    plan.groups = pieces
    changes: Dict[EdgeKey, object] = {}
    for g, nodes in seg_nodes.items():
        seq = _merge_many(st, [list(nodes)] + pieces[g], mode)
        for k, p in _chain(st, seq, above[g]):
            changes[k] = p
    return changes, t.visits


def _check_batch_insert(st: DendrogramState, edges: Sequence) -> List[Tuple[int, int, object, EdgeKey]]:
    out = []
    seen = set()
    parent: dict = {}

    def find(x):
        while parent.get(x, x) != x:
            parent[x] = parent.get(parent[x], parent[x])
            x = parent[x]
        return x

    bad = []
    reps = {}
    for e in edges:
        u, v, w = e
        st.forest.check_vertex(u)
        st.forest.check_vertex(v)
        k = edge_key(u, v)
        check_weight(w)
        if k in st.forest or k in seen:
            raise SLDError(f"edge {k} already present", code="DUPLICATE_RANK_KEY")
        seen.add(k)
        for z in (u, v):
            if z not in reps:
                reps[z] = st.forest_rc.representative(z)
        a, b = find(reps[u]), find(reps[v])
        if a == b:
            bad.append(k)
        else:
            parent[a] = b
        out.append((u, v, w, k))
    if bad:
        raise SLDError(f"batch closes cycles at {[str(b) for b in bad]}",
                       code="WOULD_CREATE_CYCLE", edges=bad)
    return out


def _run_stars(st: DendrogramState, stars: List[Tuple[object, list]], mode: str, run: _Run) -> None:
    """Process disjoint stars: ``stars`` = [(center rep, [(x, y, w, key), ...])]."""
    pre = []
    for center, es in stars:
        for x, y, w, k in es:
            pre.append((x, y, w, k, st.forest.min_incident(x), st.forest.min_incident(y)))
    for x, y, w, k, _, _ in pre:
        st.forest.add(k, w)
    st.forest_rc.batch_link([(x, y, st.rank(k)) for x, y, w, k, _, _ in pre])
    st.apply_parent_changes([], added=[k for _, _, _, k, _, _ in pre])
    # new edge nodes join their leaf dendrograms first
    leaf = {}
    t = Tally()
    for x, y, w, k, a, f in pre:
        if f is not None:
            sp = _spine(st, f, mode, t)
            run.report.spine_lengths.append(len(sp))
            for kk, p in _chain(st, _merge_sorted(st, [k], sp, mode)):
                leaf[kk] = p
    run.add_visits(t.visits)
    if leaf:
        run.report.merge_changes += st.apply_parent_changes(sorted(leaf.items(), key=lambda kv: st.rank(kv[0])))
    plans = []
    idx = 0
    for center, es in stars:
        attach = []
        for _ in es:
            x, y, w, k, a, f = pre[idx]
            idx += 1
            attach.append((x, k, a))
        plans.append(StarMergePlan(center, attach))
    if mode in _PARALLEL:
        results = get_pool().pmap(lambda p: _plan_star(st, p, mode), plans)
    else:
        results = [_plan_star(st, p, mode) for p in plans]
    merged: Dict[EdgeKey, object] = {}
    for changes, vis in results:
        run.add_visits(vis)
        merged.update(changes)
    for p in plans:
        run.report.spine_lengths.extend(len(s) for s in p.leaf_spines.values())
    n = st.apply_parent_changes(sorted(merged.items(), key=lambda kv: st.rank(kv[0])))
    run.report.merge_changes += n


def star_merge(st: DendrogramState, edges: Sequence, mode: str = PAR_H) -> UpdateReport:
    """Insert a star of edges: all share one center component, each leaf component once."""
    _check_mode(mode)
    es = _check_batch_insert(st, edges)
    run = _Run(st)
    if es:
        reps = [(st.forest_rc.representative(u), st.forest_rc.representative(v)) for u, v, _, _ in es]
        common = set(reps[0])
        for r in reps[1:]:
            common &= set(r)
        if not common:
            st.end()
            raise SLDError("edges do not share a center component", code="NOT_A_STAR")
        center = min(common) if len(es) == 1 else common.pop()
        oriented = []
        leaves = set()
        for (u, v, w, k), (ru, rv) in zip(es, reps):
            x, y, ry = (u, v, rv) if ru == center else (v, u, ru)
            if ry in leaves:
                st.end()
                raise SLDError("two edges reach the same leaf component", code="NOT_A_STAR")
            leaves.add(ry)
            oriented.append((x, y, w, k))
        _run_stars(st, [(center, oriented)], mode, run)
    return run.finish([k for *_, k in es])


# ---------------------------------------------------------- batch insertion

def _prio(r: object, rnd: int) -> tuple:
    return (_splitmix(_stable_hash(r) ^ (rnd * 0x9E3779B97F4A7C15 & ((1 << 64) - 1))), r)


def contraction_round_bound(k: int) -> int:
    import math
    return math.ceil(4 * math.log2(k + 2))


def batch_insert(st: DendrogramState, edges: Sequence, mode: str = PAR_H) -> UpdateReport:
    """Insert a batch by contracting the incidence forest in rounds of disjoint stars.

    Components touched by the batch are incidence vertices, batch edges are
    incidence edges.  Each round, leaves rake into their neighbour and an
    independent set of degree-2 vertices compress into their lower-priority
    neighbour; every receiving vertex is a star center.  The stars are merged
    and the incidence forest is rebuilt from the new components.
    """
    _check_mode(mode)
    remaining = _check_batch_insert(st, edges)
    run = _Run(st)
    keys = [k for *_, k in remaining]
    rnd = 0
    while remaining:
        rep_of = {}
        for u, v, _, _ in remaining:
            for z in (u, v):
                if z not in rep_of:
                    rep_of[z] = st.forest_rc.representative(z)
        adj: Dict[object, list] = {}
        for i, (u, v, _, _) in enumerate(remaining):
            ru, rv = rep_of[u], rep_of[v]
            adj.setdefault(ru, []).append((rv, i))
            adj.setdefault(rv, []).append((ru, i))
        into: Dict[object, Tuple[object, int]] = {}  # contracting vertex -> (center, edge index)
        for x in sorted(adj, key=lambda r: _prio(r, rnd)):
            nb = adj[x]
            px = _prio(x, rnd)
            if len(nb) == 1:
                c, i = nb[0]
                if len(adj[c]) == 1 and _prio(c, rnd) < px:
                    continue
                into[x] = (c, i)
            elif len(nb) == 2:
                if any(len(adj[c]) == 1 or (len(adj[c]) == 2 and _prio(c, rnd) < px) for c, _ in nb):
                    continue
                into[x] = min(nb, key=lambda ci: _prio(ci[0], rnd))
        stars: Dict[object, list] = {}
        done = set()
        for x in sorted(into, key=lambda r: _prio(r, rnd)):
            c, i = into[x]
            u, v, w, k = remaining[i]
            xc, yl = (u, v) if rep_of[u] == c else (v, u)
            stars.setdefault(c, []).append((xc, yl, w, k))
            done.add(i)
        rnd += 1
        _run_stars(st, sorted(stars.items(), key=lambda kv: _prio(kv[0], rnd - 1)), mode, run)
        remaining = [e for i, e in enumerate(remaining) if i not in done]
    run.report.contraction_rounds = rnd
    return run.finish(keys)


# ---------------------------------------------------------------- dispatch

def apply_update(st: DendrogramState, op: tuple, mode: str = SEQ_H) -> UpdateReport:
    """Apply one parsed update: ('+',u,v,w) ('-',u,v) ('B+',[...]) ('B-',[...])."""
    kind = op[0]
    if kind == "+":
        return insert(st, op[1], op[2], op[3], mode)
    if kind == "-":
        return delete(st, op[1], op[2], mode)
    if kind == "B+":
        return batch_insert(st, op[1], mode)
    if kind == "B-":
        return batch_delete(st, op[1], mode)
    raise SLDError(f"unknown update kind {kind!r}", code="BAD_UPDATE")
