"""Binary fork-join helpers plus the merge and filter primitives built on them.

Forked work runs on a shared thread pool when the parallelism hint is above 1,
otherwise inline.  A fork only goes to the pool if a worker slot is free right
now; when none is, the child runs in the caller's thread.  Nested forks
therefore cannot deadlock, and every result is combined in a fixed order so
output never depends on the schedule.
"""
from __future__ import annotations

import bisect
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Sequence, TypeVar

T = TypeVar("T")
U = TypeVar("U")

_GRAIN = 64  # below this many elements a primitive runs sequentially


class ForkJoin:
    def __init__(self, parallelism: int = 1):
        self.parallelism = max(1, int(parallelism))
        self._pool = None
        self._slots = None
        if self.parallelism > 1:
            self._pool = ThreadPoolExecutor(max_workers=self.parallelism - 1)
            self._slots = threading.BoundedSemaphore(self.parallelism - 1)

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown(wait=True)
            self._pool = None

    def _spawn(self, fn):
        if self._pool is None or not self._slots.acquire(blocking=False):
            return None

        def run():
            try:
                return fn()
            finally:
                self._slots.release()

        return self._pool.submit(run)

    def fork2(self, f: Callable[[], T], g: Callable[[], U]) -> tuple:
        fut = self._spawn(f)
        if fut is None:
            return f(), g()
        b = g()
        return fut.result(), b

    def pmap(self, fn: Callable[[T], U], items: Sequence[T]) -> List[U]:
        items = list(items)
        n = len(items)
        if n == 0:
            return []
        if n == 1 or self._pool is None:
            return [fn(x) for x in items]
        mid = n // 2
        left, right = self.fork2(lambda: self.pmap(fn, items[:mid]),
                                 lambda: self.pmap(fn, items[mid:]))
        return left + right


_default = ForkJoin(int(os.environ.get("SLDFOREST_THREADS", "1")))


def get_pool() -> ForkJoin:
    return _default


def set_parallelism(p: int) -> ForkJoin:
    """Swap the process-wide pool; returns the new one."""
    global _default
    if _default.parallelism != max(1, int(p)):
        _default.close()
        _default = ForkJoin(p)
    return _default


def par_merge(a: Sequence[T], b: Sequence[T], key: Callable = None,
              pool: ForkJoin = None) -> List[T]:
    """Stable merge of two sorted sequences by splitting around the median of ``a``."""
    pool = pool or _default
    key = key or (lambda x: x)
    ka = [key(x) for x in a]
    kb = [key(x) for x in b]
    out: List = [None] * (len(a) + len(b))

    def rec(alo, ahi, blo, bhi, olo):
        na, nb = ahi - alo, bhi - blo
        if na + nb <= _GRAIN or pool._pool is None:
            i, j, o = alo, blo, olo
            while i < ahi and j < bhi:
                if kb[j] < ka[i]:
                    out[o] = b[j]
                    j += 1
                else:
                    out[o] = a[i]
                    i += 1
                o += 1
            out[o:o + ahi - i] = a[i:ahi]
            o += ahi - i
            out[o:o + bhi - j] = b[j:bhi]
            return
        if na < nb:
            # split on b's median instead, keeping ties stable (a before b)
            mb = (blo + bhi) // 2
            ma = bisect.bisect_right(ka, kb[mb], alo, ahi)
        else:
            ma = (alo + ahi) // 2
            mb = bisect.bisect_left(kb, ka[ma], blo, bhi)
        mid = olo + (ma - alo) + (mb - blo)
        pool.fork2(lambda: rec(alo, ma, blo, mb, olo),
                   lambda: rec(ma, ahi, mb, bhi, mid))

    rec(0, len(a), 0, len(b), 0)
    return out


def par_filter(seq: Sequence[T], keep: Sequence[bool], pool: ForkJoin = None) -> List[T]:
    """Order-preserving filter: flags -> prefix offsets -> scatter."""
    pool = pool or _default
    n = len(seq)
    if n <= _GRAIN or pool._pool is None:
        return [x for x, k in zip(seq, keep) if k]
    blocks = [(i, min(n, i + _GRAIN)) for i in range(0, n, _GRAIN)]
    counts = pool.pmap(lambda blk: sum(1 for i in range(*blk) if keep[i]), blocks)
    offsets, total = [], 0
    for c in counts:
        offsets.append(total)
        total += c
    out: List = [None] * total

    def scatter(j):
        o = offsets[j]
        for i in range(*blocks[j]):
            if keep[i]:
                out[o] = seq[i]
                o += 1

    pool.pmap(scatter, range(len(blocks)))
    return out
