"""Dynamic Cartesian trees kept as the dendrogram of a path graph.

Element i of the sequence is the path edge between vertices ``verts[i]`` and
``verts[i + 1]``.  Its weight is ``(s * value, -label)``.  The sign ``s`` flips
for MIN_ROOT so the dendrogram's rank-maximum root is the minimum element.
Labels are increasing along the sequence, so on equal values the leftmost
element ranks highest and becomes the ancestor.  Labels are exact fractions
chosen between neighbours, and they are never renumbered.
"""
from __future__ import annotations

from bisect import bisect_left
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .core import ROOT, EdgeKey, SLDError, UpdateReport, check_weight, edge_key
from .dendrogram import DendrogramState
from .oracle import MAX_ROOT, MIN_ROOT, BinaryTree
from .updates import SEQ_H, _Run, delete, insert_output_sensitive

FRONT = "FRONT"
BACK = "BACK"

__all__ = ["CartesianState", "FRONT", "BACK", "MIN_ROOT", "MAX_ROOT"]


def _sum(reports: Sequence[UpdateReport]) -> UpdateReport:
    out = UpdateReport()
    for r in reports:
        out.absorb(r)
        out.pointer_changes += r.pointer_changes
        out.touched_nodes += r.touched_nodes
        out.elapsed += r.elapsed
    out.dendrogram_height = reports[-1].dendrogram_height if reports else 0
    return out


class CartesianState:
    def __init__(self, order: str = MIN_ROOT):
        if order not in (MIN_ROOT, MAX_ROOT):
            raise SLDError(f"unknown order {order!r}", code="BAD_ORDER")
        self.order = order
        self._sign = -1 if order == MIN_ROOT else 1
        self.st = DendrogramState(1)
        self._verts: List[int] = [0]
        self._values: list = []
        self._labels: List[Fraction] = []
        self._free: List[int] = []

    @classmethod
    def build_array(cls, A: Sequence, order: str = MIN_ROOT) -> "CartesianState":
        cs = cls(order)
        n = len(A)
        for x in A:
            check_weight(x)
        cs._values = list(A)
        cs._labels = [Fraction(i) for i in range(n)]
        cs._verts = list(range(n + 1))
        cs.st = DendrogramState.build(n + 1, [(i, i + 1, cs._weight(A[i], cs._labels[i])) for i in range(n)])
        return cs

    # ------------------------------------------------------------ helpers

    def __len__(self) -> int:
        return len(self._values)

    def values(self) -> list:
        return list(self._values)

    def _weight(self, value, label: Fraction) -> tuple:
        return (self._sign * value, -label)

    def _fresh(self) -> int:
        return self._free.pop() if self._free else self.st.add_vertex()

    def _key(self, i: int) -> EdgeKey:
        return edge_key(self._verts[i], self._verts[i + 1])

    def _label_between(self, i: int) -> Fraction:
        """Label for a new element placed before current position i."""
        lb = self._labels
        if not lb:
            return Fraction(0)
        if i == 0:
            return lb[0] - 1
        if i == len(lb):
            return lb[-1] + 1
        return (lb[i - 1] + lb[i]) / 2

    def _check_pos(self, pos: int, hi: int) -> None:
        if not (isinstance(pos, int) and 0 <= pos <= hi):
            raise SLDError(f"position {pos} out of range [0, {hi}]", code="OUT_OF_RANGE")

    # ------------------------------------------------------------ leaf updates

    def leaf_insert(self, end: str, value) -> UpdateReport:
        check_weight(value)
        if end not in (FRONT, BACK):
            raise SLDError(f"unknown end {end!r}", code="BAD_END")
        i = 0 if end == FRONT else len(self._values)
        lab = self._label_between(i)
        x = self._fresh()
        a = self._verts[0] if end == FRONT else self._verts[-1]
        rep = insert_output_sensitive(self.st, a, x, self._weight(value, lab))
        if end == FRONT:
            self._verts.insert(0, x)
        else:
            self._verts.append(x)
        self._values.insert(i, value)
        self._labels.insert(i, lab)
        return rep

    def leaf_delete(self, pos: int) -> UpdateReport:
        n = len(self._values)
        if n == 0 or pos not in (0, n - 1):
            raise SLDError(f"position {pos} is not an end of a length-{n} sequence", code="NOT_AN_END")
        st = self.st
        k = self._key(pos)
        child = None
        if n > 1:
            # the node has at most one child, the top of the rest of the sequence below it
            nb = self._key(1 if pos == 0 else n - 2)
            sld = st.sld_rc
            pred, _ = sld.pws(nb, sld.designated_root(nb), st.rank(k))
            if pred is not None and st.parents[pred] == k:
                child = pred
        run = _Run(st)
        run.report.pws_queries += 1 if n > 1 else 0
        up = st.parents[k]
        st.forest.remove(k)
        st.forest_rc.cut(k.lo, k.hi)
        st.apply_parent_changes([(child, up)] if child is not None else [], removed=[k])
        gone = self._verts.pop(0 if pos == 0 else n)
        self._free.append(gone)
        del self._values[pos]
        del self._labels[pos]
        return run.finish([self._verts[0]])

    # ------------------------------------------------------------ arbitrary updates

    def insert_at(self, pos: int, value) -> UpdateReport:
        n = len(self._values)
        self._check_pos(pos, n)
        if pos == 0:
            return self.leaf_insert(FRONT, value)
        if pos == n:
            return self.leaf_insert(BACK, value)
        check_weight(value)
        # split vertex u = verts[pos]: drop (u, v), add (u, u') with the new value, re-add (u', v)
        u, v = self._verts[pos], self._verts[pos + 1]
        w_old = self.st.forest.weight[edge_key(u, v)]
        lab = self._label_between(pos)
        x = self._fresh()
        reps = [delete(self.st, u, v, SEQ_H),
                insert_output_sensitive(self.st, u, x, self._weight(value, lab)),
                insert_output_sensitive(self.st, x, v, w_old)]
        self._verts.insert(pos + 1, x)
        self._values.insert(pos, value)
        self._labels.insert(pos, lab)
        return _sum(reps)

    def delete_at(self, pos: int) -> UpdateReport:
        n = len(self._values)
        self._check_pos(pos, n - 1)
        if pos == 0 or pos == n - 1:
            return self.leaf_delete(pos)
        # contract: drop (u, v) and (v, w), then join (u, w) carrying the second weight
        u, v, w = self._verts[pos], self._verts[pos + 1], self._verts[pos + 2]
        w_next = self.st.forest.weight[edge_key(v, w)]
        reps = [delete(self.st, u, v, SEQ_H),
                delete(self.st, v, w, SEQ_H),
                insert_output_sensitive(self.st, u, w, w_next)]
        del self._verts[pos + 1]
        self._free.append(v)
        del self._values[pos]
        del self._labels[pos]
        return _sum(reps)

    # ------------------------------------------------------------ export

    def _position(self, k: EdgeKey) -> int:
        lab = -self.st.forest.weight[k][1]
        return bisect_left(self._labels, lab)

    def to_tree(self) -> BinaryTree:
        n = len(self._values)
        parent: List[Optional[int]] = [None] * n
        left: List[Optional[int]] = [None] * n
        right: List[Optional[int]] = [None] * n
        root = None
        for i in range(n):
            p = self.st.parents[self._key(i)]
            if p is ROOT:
                root = i
                continue
            j = self._position(p)
            parent[i] = j
            if i < j:
                left[j] = i
            else:
                right[j] = i
        return BinaryTree(root, parent, left, right)

    def in_order(self) -> list:
        t = self.to_tree()
        out = []
        stack = []
        x = t.root
        while stack or x is not None:
            while x is not None:
                stack.append(x)
                x = t.left[x]
            x = stack.pop()
            out.append(self._values[x])
            x = t.right[x]
        return out
