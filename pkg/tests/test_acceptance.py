"""Acceptance suite: one PASS/FAIL line per criterion, printed straight to the terminal.

Run with ``pytest -v tests/test_acceptance.py`` (lines appear inline) or as a
script, ``python3 tests/test_acceptance.py``.
"""
import hashlib
import json
import math
import random
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sldforest.cartesian import BACK, FRONT, MAX_ROOT, MIN_ROOT, CartesianState  # noqa: E402
from sldforest.cli import fitted_constant, run_bench  # noqa: E402
from sldforest.core import serialize_canonical  # noqa: E402
from sldforest.dendrogram import DendrogramState  # noqa: E402
from sldforest.forkjoin import set_parallelism  # noqa: E402
from sldforest.oracle import (cartesian_recursive, gen_random_forest, gen_theorem_instance,  # noqa: E402
                              gen_update_stream, kruskal_sld, uf_threshold)
from sldforest.queries import cluster_report, cluster_size, flat_clustering, threshold_query  # noqa: E402
from sldforest.updates import (MODES, PAR_H, PAR_OS, SEQ_H, SEQ_OS, apply_update, delete,  # noqa: E402
                               depth_bound, insert, contraction_round_bound)

SEEDS = range(1, 11)
N_SOAK, OPS_SOAK = 256, 1000
_capture = None


@pytest.fixture(autouse=True)
def _grab(pytestconfig):
    global _capture
    _capture = pytestconfig.pluginmanager.getplugin("capturemanager")
    yield


def report(num, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  criterion {num:>2}: {detail}"
    if _capture is not None:
        with _capture.global_and_fixture_disabled():
            print("\n" + line, flush=True)
    else:
        print(line, flush=True)
    assert ok, line


def _oracle(st):
    return serialize_canonical(kruskal_sld(st.num_vertices, st.edges()), st.forest.weight)


def _digest(text):
    return hashlib.sha256(text.encode()).hexdigest()


# ---------------------------------------------------------------- soak runs

_soak_cache = {}


def soak(threads, check_oracle):
    """Per (mode, seed): list of (map digest, stats record) plus criterion evidence."""
    if threads in _soak_cache:
        return _soak_cache[threads]
    set_parallelism(threads)
    res = {"trace": {}, "mismatch": [], "os_identity": [], "visits": 0, "depth": [], "times": {}}
    try:
        for mode in MODES:
            t0 = time.perf_counter()
            for seed in SEEDS:
                f = gen_random_forest(N_SOAK, N_SOAK // 2, seed)
                st = DendrogramState.build(f.n, f.edges)
                trace = []
                for i, op in enumerate(gen_update_stream(f, OPS_SOAK, seed, "mixed")):
                    rep = apply_update(st, op, mode)
                    canon = st.canonical()
                    if check_oracle and canon != _oracle(st):
                        res["mismatch"].append((mode, seed, i))
                    rec = rep.to_record(include_elapsed=False)
                    trace.append((_digest(canon), json.dumps(rec, sort_keys=True)))
                    res["visits"] = max(res["visits"], rep.max_node_visits)
                    if mode == SEQ_OS and op[0] == "+":
                        res["os_identity"].extend(p == c for p, c in rep.merge_log)
                    if mode == PAR_OS and op[0] == "+":
                        res["depth"].append((rep.recursion_depth, depth_bound(rep.dendrogram_height)))
                res["trace"][(mode, seed)] = trace
            res["times"][mode] = time.perf_counter() - t0
    finally:
        set_parallelism(1)
    _soak_cache[threads] = res
    return res


# ---------------------------------------------------------------- criteria

def test_c01_oracle_soak():
    r = soak(1, True)
    slow = max(r["times"].values())
    n = len(SEEDS) * OPS_SOAK
    ok = not r["mismatch"] and slow < 120
    times = ", ".join(f"{m} {t:.0f}s" for m, t in r["times"].items())
    report(1, ok, f"{len(MODES)} modes x {n} updates equal Kruskal after every update "
                  f"(mismatches {len(r['mismatch'])}); {times}")


def test_c02_theorem_exact_counts():
    bad = []
    seen = []
    for h in (2, 8, 64):
        for stars in (2, 4):
            f, centers = gen_theorem_instance(h, stars)
            for mode in MODES:
                st = DendrogramState.build(f.n, f.edges)
                orig = st.canonical()
                a, b = centers[0], centers[1]
                ins = insert(st, a, b, 0.0, mode)
                dele = delete(st, a, b, mode)
                got = (ins.pointer_changes, dele.pointer_changes)
                seen.append((h, got, (ins.touched_nodes, dele.touched_nodes)))
                if got != (2 * h + 1, 2 * h + 1) or st.canonical() != orig:
                    bad.append((h, stars, mode, got))
    by_h = {h: f"h={h}: pointer_changes {p[0]}/{p[1]}, touched_nodes {t[0]}/{t[1]}" for h, p, t in seen}
    summary = "; ".join(by_h[h] for h in sorted(by_h))
    report(2, not bad, f"expect 2h+1 on insert and delete; {summary}; original map restored")


def test_c03_output_sensitivity_identity():
    r = soak(1, True)
    ids = r["os_identity"]
    report(3, bool(ids) and all(ids), f"seq-os: pws == pointer changes on {sum(ids)}/{len(ids)} spine merges")


def test_c04_monotone_visit_bound():
    r = soak(1, True)
    report(4, r["visits"] <= 2, f"max per-node visits across all monotone batches = {r['visits']}")


def test_c05_work_scaling():
    n = 4096
    f = gen_random_forest(n, 0, 7)
    ops = gen_update_stream(f, 16000, 7, "insert-heavy")
    st = DendrogramState.build(n, f.edges)
    C, inserts = 0.0, 0
    for op in ops:
        rep = apply_update(st, op, SEQ_OS)
        if op[0] == "+":
            inserts += 1
            C = max(C, fitted_constant(rep.rc_nodes_visited, rep.pointer_changes, n))
            if inserts == 10000:
                break
    report(5, inserts == 10000 and C <= 64, f"seq-os n={n}, {inserts} inserts: fitted C = {C:.2f} (limit 64)")


def test_c06_parallel_dc_merge():
    r = soak(1, True)
    same = all(a[0] == b[0] for s in SEEDS
               for a, b in zip(r["trace"][(PAR_OS, s)], r["trace"][(SEQ_H, s)]))
    worst = max((d - b for d, b in r["depth"]), default=0)
    deepest = max((d for d, _ in r["depth"]), default=0)
    ok = same and worst <= 0
    report(6, ok, f"par-os maps identical to seq-h: {same}; max depth {deepest}, "
                  f"max (depth - bound) = {worst} over {len(r['depth'])} inserts")


def test_c07_batch_equivalence():
    bad = []
    rounds = []
    checked = 0
    for k in (2, 8, 32):
        for seed in (1, 2):
            f = gen_random_forest(256, 120, seed)
            rng = random.Random(100 * k + seed)
            for mode in (PAR_H, SEQ_H):
                st = DendrogramState.build(f.n, f.edges)
                for op in gen_update_stream(f, 6, seed, f"batch({k})"):
                    edges = st.edges()
                    rep = apply_update(st, op, mode)
                    after = st.canonical()
                    if op[0] == "B+":
                        bound = contraction_round_bound(len(op[1]))
                        rounds.append((rep.contraction_rounds, bound))
                        if rep.contraction_rounds > bound:
                            bad.append(("rounds", k, seed, rep.contraction_rounds))
                    for _ in range(3):
                        ref = DendrogramState.build(f.n, edges)
                        items = list(op[1])
                        rng.shuffle(items)
                        for it in items:
                            (insert if op[0] == "B+" else delete)(ref, *it)
                        checked += 1
                        if ref.canonical() != after:
                            bad.append(("fold", k, seed, mode))
    mr = max(r for r, _ in rounds)
    report(7, not bad, f"{checked} permuted folds equal the batch result; max rounds {mr} "
                       f"(bound at k=32: {contraction_round_bound(32)})")


def test_c08_query_equivalence():
    bad = 0
    total = 0
    for seed in (1, 2):
        f = gen_random_forest(128, 110, seed)
        st = DendrogramState.build(f.n, f.edges)
        ws = sorted({e.weight for e in f.edges})
        grid = sorted({x for w in ws for x in (math.nextafter(w, -math.inf), w, math.nextafter(w, math.inf))})
        for tau in grid:
            parts = uf_threshold(f.n, f.edges, tau)
            where = {v: i for i, p in enumerate(parts) for v in p}
            bad += flat_clustering(st, tau) != parts
            for u in range(f.n):
                rep = cluster_report(st, u, tau)
                bad += rep != set(parts[where[u]])
                bad += cluster_size(st, u, tau) != len(parts[where[u]])
                for t in range(u, f.n):
                    bad += threshold_query(st, u, t, tau) != (where[u] == where[t])
                total += 2 + f.n - u
    report(8, bad == 0, f"{total} query answers checked against union-find, {bad} wrong")


def _cart_check(cs):
    vals = cs.values()
    return cs.to_tree() == cartesian_recursive(vals, cs.order) and cs.in_order() == vals


def test_c09_cartesian_suite():
    bad = 0
    worst = 0
    steps = 0
    for order in (MIN_ROOT, MAX_ROOT):
        for seed in (1, 2):
            rng = random.Random(seed)
            cs = CartesianState.build_array([rng.randrange(100) for _ in range(rng.randrange(200))], order)
            bad += not _cart_check(cs)
            for _ in range(500):
                n = len(cs)
                r = rng.random()
                full = n >= 256
                if r < 0.25 and not full:
                    rep = cs.leaf_insert(rng.choice([FRONT, BACK]), rng.randrange(100))
                    worst = max(worst, rep.pointer_changes)
                elif r < 0.5 and n:
                    rep = cs.leaf_delete(rng.choice([0, n - 1]))
                    worst = max(worst, rep.pointer_changes)
                elif r < 0.75 and not full:
                    cs.insert_at(rng.randrange(n + 1), rng.randrange(100))
                elif n:
                    cs.delete_at(rng.randrange(n))
                steps += 1
                bad += not _cart_check(cs)
    report(9, bad == 0 and worst <= 2, f"{steps} ops, {bad} tree mismatches, max leaf-op pointer_changes {worst}")


def test_c10_inverse_property():
    f = gen_random_forest(256, 128, 5)
    st = DendrogramState.build(f.n, f.edges)
    rng = random.Random(5)
    bad = 0
    for i in range(1000):
        mode = MODES[i % 4]
        before = st.canonical()
        if i % 2 == 0:
            while True:
                u, v = rng.randrange(f.n), rng.randrange(f.n)
                if u != v and not st.forest_rc.connected(u, v):
                    break
            insert(st, u, v, rng.randrange(4000) / 4, mode)
            delete(st, u, v, mode)
        else:
            e = rng.choice(sorted(st.forest.weight))
            w = st.forest.weight[e]
            delete(st, e.lo, e.hi, mode)
            insert(st, e.lo, e.hi, w, mode)
        bad += st.canonical() != before
    report(10, bad == 0, f"1000 insert/delete and delete/insert pairs, {bad} failed to restore")


def _bench_outputs():
    specs = [["theorem", "h=64", "stars=4"], ["random", "n=256", "m=128", "ops=300", "seed=3"],
             ["random", "n=256", "m=120", "ops=20", "seed=4", "profile=batch(8)"]]
    return [json.dumps(run_bench(s, m, 1, timing=False), sort_keys=True) for s in specs for m in MODES]


def test_c11_determinism_under_parallelism():
    base = soak(1, True)["trace"]
    diffs = 0
    for p in (4, 8):
        other = soak(p, False)["trace"]
        diffs += sum(base[k] != other[k] for k in base)
    benches = {}
    for p in (1, 4, 8):
        set_parallelism(p)
        try:
            benches[p] = _bench_outputs()
        finally:
            set_parallelism(1)
    same_bench = benches[1] == benches[4] == benches[8]
    report(11, diffs == 0 and same_bench,
           f"soak traces differing under 4/8 threads: {diffs}; bench JSON identical: {same_bench}")


if __name__ == "__main__":
    fails = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_c") and callable(fn):
            try:
                fn()
            except AssertionError:
                fails += 1
    sys.exit(1 if fails else 0)
