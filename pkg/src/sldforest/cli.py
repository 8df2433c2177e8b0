"""Command line front end.

File formats (``#`` starts a comment, blank lines are skipped):

* forest:   ``n <count>`` then ``e <u> <v> <w>`` per edge
* updates:  ``+ u v w`` | ``- u v`` | ``B+ k`` or ``B- k`` followed by k edge lines
  (``u v w`` for inserts, ``u v`` for deletes)
* queries:  ``qt s t tau`` | ``qs u tau`` | ``qr u tau`` | ``flat tau``
* cartesian ops: ``push front|back x`` | ``pop front|back`` | ``ins i x`` | ``del i``

Exit codes: 0 ok, 1 verification mismatch, 2 input error.
"""
from __future__ import annotations

import argparse
import difflib
import json
import math
import statistics
import sys
from typing import List, Optional, Sequence, TextIO, Tuple

from .core import SLDError, UpdateReport, format_weight, serialize_canonical
from .dendrogram import DendrogramState
from .forkjoin import set_parallelism
from .oracle import (MAX_ROOT, MIN_ROOT, Forest, cartesian_recursive, gen_random_forest,
                     gen_theorem_instance, gen_update_stream, kruskal_sld)
from .updates import MODES, SEQ_H, apply_update

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    def __init__(self, where: str, line: int, msg: str):
        super().__init__(f"{where}:{line}: {msg}")


# ------------------------------------------------------------------ parsing

def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        s = raw.split("#", 1)[0].split()
        if s:
            yield no, s


def _int(tok: str, where: str, no: int) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise InputError(where, no, f"expected an integer, got {tok!r}") from None
    if v < 0:
        raise InputError(where, no, f"negative id {v}")
    return v


def _num(tok: str, where: str, no: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise InputError(where, no, f"expected a number, got {tok!r}") from None
    if not math.isfinite(v):
        raise InputError(where, no, f"non-finite weight {tok!r}")
    return v


def _arity(toks, k: int, where: str, no: int) -> None:
    if len(toks) != k:
        raise InputError(where, no, f"expected {k} fields, got {len(toks)}")


def parse_forest(text: str, where: str = "<forest>") -> Forest:
    n = None
    edges = []
    for no, t in _lines(text):
        if t[0] == "n" and n is None:
            _arity(t, 2, where, no)
            n = _int(t[1], where, no)
        elif t[0] == "e" and n is not None:
            _arity(t, 4, where, no)
            u, v = _int(t[1], where, no), _int(t[2], where, no)
            if u >= n or v >= n:
                raise InputError(where, no, f"vertex out of range [0, {n})")
            if u == v:
                raise InputError(where, no, "self loop")
            edges.append((u, v, _num(t[3], where, no)))
        else:
            raise InputError(where, no, f"unexpected line starting {t[0]!r}")
    if n is None:
        raise InputError(where, 1, "missing 'n <count>' header")
    return Forest(n, edges)


def parse_updates(text: str, where: str = "<updates>") -> List[Tuple[int, tuple]]:
    """(line number, op) pairs in file order."""
    out = []
    it = iter(_lines(text))
    for no, t in it:
        kind = t[0]
        if kind == "+":
            _arity(t, 4, where, no)
            out.append((no, ("+", _int(t[1], where, no), _int(t[2], where, no), _num(t[3], where, no))))
        elif kind == "-":
            _arity(t, 3, where, no)
            out.append((no, ("-", _int(t[1], where, no), _int(t[2], where, no))))
        elif kind in ("B+", "B-"):
            _arity(t, 2, where, no)
            k = _int(t[1], where, no)
            width = 3 if kind == "B+" else 2
            group = []
            for _ in range(k):
                try:
                    no2, t2 = next(it)
                except StopIteration:
                    raise InputError(where, no, f"batch announces {k} lines, file ended early") from None
                _arity(t2, width, where, no2)
                e = (_int(t2[0], where, no2), _int(t2[1], where, no2))
                if width == 3:
                    e += (_num(t2[2], where, no2),)
                group.append(e)
            out.append((no, (kind, group)))
        else:
            raise InputError(where, no, f"unknown update {kind!r}")
    return out


def parse_queries(text: str, where: str = "<queries>") -> List[Tuple[int, tuple]]:
    spec = {"qt": ("i", "i", "f"), "qs": ("i", "f"), "qr": ("i", "f"), "flat": ("f",)}
    out = []
    for no, t in _lines(text):
        shape = spec.get(t[0])
        if shape is None:
            raise InputError(where, no, f"unknown query {t[0]!r}")
        _arity(t, len(shape) + 1, where, no)
        args = [(_int if s == "i" else _num)(x, where, no) for s, x in zip(shape, t[1:])]
        out.append((no, (t[0], *args)))
    return out


# ------------------------------------------------------------------ writers

def format_forest(f: Forest) -> str:
    out = [f"n {f.n}"]
    for e in f.edges:
        u, v, w = (e.key.lo, e.key.hi, e.weight) if hasattr(e, "key") else e
        out.append(f"e {u} {v} {format_weight(float(w))}")
    return "\n".join(out) + "\n"


def format_updates(ops: Sequence[tuple]) -> str:
    out = []
    for op in ops:
        if op[0] == "+":
            out.append(f"+ {op[1]} {op[2]} {format_weight(float(op[3]))}")
        elif op[0] == "-":
            out.append(f"- {op[1]} {op[2]}")
        else:
            out.append(f"{op[0]} {len(op[1])}")
            for e in op[1]:
                out.append(" ".join(format_weight(float(x)) if i == 2 else str(x) for i, x in enumerate(e)))
    return "\n".join(out) + ("\n" if out else "")


# ------------------------------------------------------------------ commands

def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as ex:
        raise InputError(path, 0, ex.strerror or str(ex)) from None


def _build(f: Forest, where: str) -> DendrogramState:
    try:
        return DendrogramState.build(f.n, f.edges)
    except SLDError as ex:
        raise InputError(where, 0, f"{ex.code}: {ex}") from None


def _oracle_text(st: DendrogramState) -> str:
    return serialize_canonical(kruskal_sld(st.num_vertices, st.edges()), st.forest.weight)


def _mismatch(out: TextIO, st: DendrogramState, label: str) -> bool:
    got, want = st.canonical(), _oracle_text(st)
    if got == want:
        return False
    out.write(f"verify mismatch after {label}\n")
    out.writelines(difflib.unified_diff(want.splitlines(True), got.splitlines(True), "oracle", "maintained"))
    return True


def _record(rep: UpdateReport, idx: int, kind: str, elapsed: bool) -> dict:
    rec = {"update": idx, "kind": kind}
    rec.update(rep.to_record(include_elapsed=elapsed))
    rec.pop("merge_log", None)
    return rec


def cmd_run(args, out: TextIO, err: TextIO) -> int:
    f = parse_forest(_read(args.forest), args.forest)
    ups = parse_updates(_read(args.updates), args.updates)
    st = _build(f, args.forest)
    stats = open(args.stats, "w") if args.stats else None
    try:
        if args.verify and _mismatch(err, st, "build"):
            return EXIT_MISMATCH
        for i, (no, op) in enumerate(ups):
            try:
                rep = apply_update(st, op, args.mode)
            except SLDError as ex:
                raise InputError(args.updates, no, f"{ex.code}: {ex}") from None
            if stats:
                stats.write(json.dumps(_record(rep, i, op[0], not args.no_elapsed), sort_keys=True) + "\n")
            if args.verify and _mismatch(err, st, f"{args.updates}:{no}"):
                return EXIT_MISMATCH
        if args.dump:
            out.write(st.canonical())
        return EXIT_OK
    finally:
        if stats:
            stats.close()


def answer_query(st: DendrogramState, q: tuple, strict: bool = False) -> str:
    from .queries import cluster_report, cluster_size, flat_clustering, format_partition, threshold_query
    kind = q[0]
    if kind == "qt":
        return "true" if threshold_query(st, q[1], q[2], q[3], strict) else "false"
    if kind == "qs":
        return str(cluster_size(st, q[1], q[2], strict))
    if kind == "qr":
        return " ".join(map(str, sorted(cluster_report(st, q[1], q[2], strict))))
    return format_partition(flat_clustering(st, q[1], strict))


def cmd_query(args, out: TextIO, err: TextIO) -> int:
    f = parse_forest(_read(args.forest), args.forest)
    qs = parse_queries(_read(args.queries), args.queries)
    st = _build(f, args.forest)
    for no, q in qs:
        try:
            out.write(answer_query(st, q, args.strict) + "\n")
        except SLDError as ex:
            raise InputError(args.queries, no, f"{ex.code}: {ex}") from None
    return EXIT_OK


# ------------------------------------------------------------------ bench

def _parse_spec(words: Sequence[str]) -> Tuple[str, dict]:
    if not words:
        raise InputError("<spec>", 1, "empty bench spec")
    kind, kv = words[0], {}
    for w in words[1:]:
        if "=" not in w:
            raise InputError("<spec>", 1, f"expected key=value, got {w!r}")
        k, v = w.split("=", 1)
        kv[k] = v
    allowed = {"theorem": {"h", "stars"}, "random": {"n", "m", "ops", "seed", "profile"}}
    if kind not in allowed:
        raise InputError("<spec>", 1, f"unknown generator {kind!r}")
    extra = set(kv) - allowed[kind]
    if extra:
        raise InputError("<spec>", 1, f"unknown keys {sorted(extra)}")
    for k in kv:
        if k != "profile":
            try:
                kv[k] = int(kv[k])
            except ValueError:
                raise InputError("<spec>", 1, f"{k} must be an integer") from None
    return kind, kv


def fitted_constant(visits: int, c: int, n: int) -> float:
    c = max(c, 1)
    return visits / (c * math.log2(2 + n / c))


def _bench_ops(kind: str, kv: dict):
    """(vertex count, initial edges, update list)."""
    if kind == "theorem":
        h, s = kv.get("h", 2), kv.get("stars", 2)
        fr, centers = gen_theorem_instance(h, s)
        a, b = centers[0], centers[1]
        return fr.n, fr.edges, [("+", a, b, 0.0), ("-", a, b)]
    n = kv.get("n", 256)
    fr = gen_random_forest(n, kv.get("m", n // 2), kv.get("seed", 1))
    return n, fr.edges, gen_update_stream(fr, kv.get("ops", 1000), kv.get("seed", 1), kv.get("profile", "mixed"))


def _pct(xs: List[float], p: float) -> float:
    xs = sorted(xs)
    return xs[min(len(xs) - 1, int(p * len(xs)))]


def run_bench(words: Sequence[str], mode: str, reps: int, timing: bool = True) -> dict:
    kind, kv = _parse_spec(words)
    try:
        n, edges, ops = _bench_ops(kind, kv)
    except SLDError as ex:
        raise InputError("<spec>", 1, f"{ex.code}: {ex}") from None
    per = {}
    C = 0.0
    for _ in range(reps):
        st = DendrogramState.build(n, edges)
        for op in ops:
            rep = apply_update(st, op, mode)
            per.setdefault(op[0], []).append(rep)
            if op[0] == "+":
                C = max(C, fitted_constant(rep.rc_nodes_visited, rep.pointer_changes, n))
    agg = {"spec": " ".join(words), "mode": mode, "repetitions": reps, "ops": {}}
    for k, reps_k in sorted(per.items()):
        d = {
            "count": len(reps_k),
            "mean_pointer_changes": statistics.fmean(r.pointer_changes for r in reps_k),
            "mean_pws_queries": statistics.fmean(r.pws_queries for r in reps_k),
            "mean_rc_nodes_visited": statistics.fmean(r.rc_nodes_visited for r in reps_k),
            "max_pointer_changes": max(r.pointer_changes for r in reps_k),
            "pointer_changes": [r.pointer_changes for r in reps_k] if kind == "theorem" else None,
            "touched_nodes": [r.touched_nodes for r in reps_k] if kind == "theorem" else None,
        }
        if timing:
            el = [r.elapsed for r in reps_k]
            d.update(mean_elapsed=statistics.fmean(el), p50_elapsed=_pct(el, 0.5), p95_elapsed=_pct(el, 0.95))
        agg["ops"][k] = {a: b for a, b in d.items() if b is not None}
    if per:
        agg["fitted_C"] = C
    return agg


def cmd_bench(args, out: TextIO, err: TextIO) -> int:
    agg = run_bench(args.spec, args.mode, args.reps, timing=not args.no_elapsed)
    out.write(json.dumps(agg, sort_keys=True) + "\n")
    return EXIT_OK


# ------------------------------------------------------------------ cartesian

def cmd_cartesian(args, out: TextIO, err: TextIO) -> int:
    from .cartesian import BACK, FRONT, CartesianState
    where = args.array
    A = [_num(tok, where, no) for no, t in _lines(_read(args.array)) for tok in t]
    cs = CartesianState.build_array(A, args.order)
    ops = []
    if args.ops:
        for no, t in _lines(_read(args.ops)):
            ops.append((no, t))
    stats = open(args.stats, "w") if args.stats else None
    try:
        for i, (no, t) in enumerate(ops):
            try:
                if t[0] == "push":
                    _arity(t, 3, args.ops, no)
                    end = {"front": FRONT, "back": BACK}.get(t[1])
                    if end is None:
                        raise InputError(args.ops, no, f"bad end {t[1]!r}")
                    rep = cs.leaf_insert(end, _num(t[2], args.ops, no))
                elif t[0] == "pop":
                    _arity(t, 2, args.ops, no)
                    if t[1] not in ("front", "back"):
                        raise InputError(args.ops, no, f"bad end {t[1]!r}")
                    rep = cs.leaf_delete(0 if t[1] == "front" else len(cs) - 1)
                elif t[0] == "ins":
                    _arity(t, 3, args.ops, no)
                    rep = cs.insert_at(_int(t[1], args.ops, no), _num(t[2], args.ops, no))
                elif t[0] == "del":
                    _arity(t, 2, args.ops, no)
                    rep = cs.delete_at(_int(t[1], args.ops, no))
                else:
                    raise InputError(args.ops, no, f"unknown op {t[0]!r}")
            except SLDError as ex:
                raise InputError(args.ops, no, f"{ex.code}: {ex}") from None
            if stats:
                stats.write(json.dumps(_record(rep, i, t[0], not args.no_elapsed), sort_keys=True) + "\n")
            if args.verify:
                vals = cs.values()
                if cs.to_tree() != cartesian_recursive(vals, args.order) or cs.in_order() != vals:
                    err.write(f"verify mismatch after {args.ops}:{no}\n")
                    return EXIT_MISMATCH
    finally:
        if stats:
            stats.close()
    t = cs.to_tree()
    out.write(json.dumps({"values": cs.values(), "root": t.root, "parent": t.parent}) + "\n")
    return EXIT_OK


# ------------------------------------------------------------------ gen

def cmd_gen(args, out: TextIO, err: TextIO) -> int:
    try:
        if args.what == "forest":
            out.write(format_forest(gen_random_forest(args.n, args.m, args.seed)))
        elif args.what == "theorem":
            fr, centers = gen_theorem_instance(args.h, args.stars)
            out.write(format_forest(fr))
            if args.updates:
                with open(args.updates, "w") as fh:
                    a, b = centers[0], centers[1]
                    fh.write(format_updates([("+", a, b, 0.0), ("-", a, b)]))
        else:
            f = parse_forest(_read(args.forest), args.forest)
            st = _build(f, args.forest)
            out.write(format_updates(gen_update_stream(Forest(f.n, st.edges()), args.ops, args.seed, args.profile)))
    except SLDError as ex:
        raise InputError("<gen>", 0, f"{ex.code}: {ex}") from None
    return EXIT_OK


# ------------------------------------------------------------------ main

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sldforest", description="Dynamic single-linkage dendrograms over forests.")
    p.add_argument("--threads", type=int, default=None, help="parallelism hint for library operations")
    sub = p.add_subparsers(dest="cmd", required=True)

    r = sub.add_parser("run", help="apply an update stream")
    r.add_argument("forest")
    r.add_argument("updates")
    r.add_argument("--mode", choices=MODES, default=SEQ_H)
    r.add_argument("--verify", action="store_true", help="compare with a fresh Kruskal sweep after every update")
    r.add_argument("--stats", help="write one JSON record per update here")
    r.add_argument("--dump", action="store_true", help="print the final canonical parent map")
    r.add_argument("--no-elapsed", action="store_true", help="omit timings from stats")
    r.set_defaults(fn=cmd_run)

    q = sub.add_parser("query", help="answer threshold queries")
    q.add_argument("forest")
    q.add_argument("queries")
    q.add_argument("--strict", action="store_true", help="merge only edges strictly below tau")
    q.set_defaults(fn=cmd_query)

    b = sub.add_parser("bench", help="run a generated workload and print aggregate JSON")
    b.add_argument("spec", nargs="+", help="'theorem h=64 stars=4' or 'random n=.. m=.. ops=.. seed=.. profile=..'")
    b.add_argument("--mode", choices=MODES, default=SEQ_H)
    b.add_argument("--reps", type=int, default=1)
    b.add_argument("--no-elapsed", action="store_true")
    b.set_defaults(fn=cmd_bench)

    c = sub.add_parser("cartesian", help="dynamic Cartesian tree over an array")
    c.add_argument("array", help="whitespace separated values")
    c.add_argument("ops", nargs="?")
    c.add_argument("--order", choices=(MIN_ROOT, MAX_ROOT), default=MIN_ROOT)
    c.add_argument("--verify", action="store_true")
    c.add_argument("--stats")
    c.add_argument("--no-elapsed", action="store_true")
    c.set_defaults(fn=cmd_cartesian)

    g = sub.add_parser("gen", help="write generated fixtures to stdout")
    gs = g.add_subparsers(dest="what", required=True)
    gf = gs.add_parser("forest")
    gf.add_argument("n", type=int)
    gf.add_argument("m", type=int)
    gf.add_argument("--seed", type=int, default=1)
    gt = gs.add_parser("theorem")
    gt.add_argument("h", type=int)
    gt.add_argument("--stars", type=int, default=2)
    gt.add_argument("--updates", help="also write the center-center insert/delete pair here")
    gu = gs.add_parser("updates")
    gu.add_argument("forest")
    gu.add_argument("ops", type=int)
    gu.add_argument("--seed", type=int, default=1)
    gu.add_argument("--profile", default="mixed")
    g.set_defaults(fn=cmd_gen)
    return p


def main(argv: Optional[Sequence[str]] = None, out: TextIO = None, err: TextIO = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as ex:
        return EXIT_INPUT if ex.code else EXIT_OK
    if args.threads is not None:
        if args.threads < 1:
            err.write("--threads must be at least 1\n")
            return EXIT_INPUT
        set_parallelism(args.threads)
    if getattr(args, "reps", 0) < 0:
        err.write("--reps must be non-negative\n")
        return EXIT_INPUT
    try:
        return args.fn(args, out, err)
    except InputError as ex:
        err.write(f"error: {ex}\n")
        return EXIT_INPUT


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
