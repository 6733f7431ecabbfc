"""Command-line driver: generate instances, reconstruct, benchmark, run the
lower-bound lab, and verify instance files.

Exit codes: 0 success, 1 I/O or parameter errors, 2 verification failure
(reconstructed edge set differs from ground truth), 3 bound-assertion
failure. CSV rows are buffered and appended with a single write so that
concurrent invocations never interleave partial rows.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from .chordal import chordal_search_budget, reconstruct_chordal
from .errors import GraphError, InfeasibleParameters, OracleInconsistencyError
from .generators import gen_chordal, gen_kchordal, gen_tree
from .graph import Graph, max_degree, read_graph_file, write_graph_file
from .kchordal import reconstruct_kchordal
from .lowerbound import (
    LowerBoundTree,
    distance_query_as_word_query,
    lb_tree_distance,
    learn_partition,
    random_balanced_function,
    reconstruct_balanced_function,
    recover_leaf_labels,
)
from .oracles import (
    CoordinateOracle,
    DistanceOracle,
    MembershipOracle,
    WordOracle,
    word_query_via_coordinates,
)
from .tree import reconstruct_tree, tree_query_bound
from .treelength import reconstruct_treelength

BENCH_HEADER = "algo,family,n,delta,k,seed,queries,bound,ok,retries,wall_ms"
LAB_HEADER = "experiment,params,seed,queries,no_answers,success"


def _append_rows(path: str | None, header: str, rows: list[str]) -> None:
    if path is None:
        for row in rows:
            print(row)
        return
    payload = ""
    if not os.path.exists(path) or os.path.getsize(path) == 0:
        payload += header + "\n"
    payload += "".join(r + "\n" for r in rows)
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(payload)
        fh.flush()


def _sidecar_path(graph_path: str) -> str:
    return graph_path + ".cert.json"


def _generate(family: str, n: int, delta: int, k: int, seed: int):
    if family == "tree":
        return gen_tree(n, delta, seed), {"family": family, "n": n,
                                          "delta": delta, "seed": seed}
    if family == "chordal":
        g, cert = gen_chordal(n, delta, seed)
        meta = {"family": family, "n": n, "delta": delta, "seed": seed,
                "bags": [sorted(b) for b in cert.bags]}
        return g, meta
    if family in ("kchordal", "treelength"):
        g = gen_kchordal(n, delta, k, seed)
        return g, {"family": family, "n": n, "delta": delta, "k": k,
                   "seed": seed}
    raise InfeasibleParameters(f"unknown family {family!r}")


def _run_algorithm(algo: str, g: Graph, args) -> tuple:
    """Returns (result, bound-or-None); bound only where a formula applies."""
    oracle = DistanceOracle.from_graph(g, record_transcript=bool(args.transcript))
    d = max_degree(g)
    if algo == "tree":
        order = "randomized" if args.randomized else "deterministic"
        res = reconstruct_tree(oracle, g.n, order=order, seed=args.seed)
        bound = tree_query_bound(g.n, d) if order == "deterministic" else None
        return oracle, res, bound
    if algo == "chordal":
        res = reconstruct_chordal(oracle, g.n, delta=d,
                                  collect_stats=args.assert_bounds)
        return oracle, res, None
    if algo == "kchordal":
        res = reconstruct_kchordal(oracle, g.n, k=args.k, delta=d,
                                   collect_stats=args.assert_bounds)
        return oracle, res, None
    if algo == "treelength":
        res = reconstruct_treelength(oracle, g.n, k=args.k, delta=d,
                                     seed=args.seed)
        return oracle, res, None
    raise InfeasibleParameters(f"unknown algorithm {algo!r}")


def _bound_violations(algo: str, g: Graph, res, bound) -> list[str]:
    out = []
    d = max_degree(g)
    if algo == "tree" and bound is not None and res.queries > bound:
        out.append(f"total queries {res.queries} > {bound:.1f}")
    if algo == "chordal" and "per_vertex" in res.details:
        budget = chordal_search_budget(g.n, d)
        for u, used, _steps in res.details["per_vertex"]:
            if used > budget:
                out.append(f"vertex {u} used {used} > {budget:.1f}")
    if algo == "kchordal" and "per_vertex" in res.details:
        cap = math.ceil(math.log2(max(g.n, 2)))
        for u, _used, steps, _fb in res.details["per_vertex"]:
            if steps > cap:
                out.append(f"vertex {u} descended {steps} > {cap}")
    if algo == "treelength":
        for fresh, cap in res.details.get("partition_checks", []):
            if fresh > cap:
                out.append(f"partition used {fresh} > {cap}")
    return out


def _pick_auto_algo(graph_path: str) -> tuple[str, dict]:
    side = _sidecar_path(graph_path)
    if not os.path.exists(side):
        raise InfeasibleParameters("auto algo needs a sidecar certificate")
    with open(side, "r", encoding="utf-8") as fh:
        meta = json.load(fh)
    family = meta.get("family")
    if family in ("tree", "chordal", "kchordal", "treelength"):
        return family, meta
    raise InfeasibleParameters(f"sidecar has unknown family {family!r}")


def cmd_gen(args) -> int:
    g, meta = _generate(args.family or args.algo, args.n, args.delta, args.k,
                        args.seed)
    if args.out is None:
        raise GraphError("gen requires --out")
    write_graph_file(args.out, g)
    with open(_sidecar_path(args.out), "w", encoding="utf-8") as fh:
        json.dump(meta, fh)
    print(f"wrote {args.out} (n={g.n}, m={g.edge_count})")
    return 0


def cmd_reconstruct(args) -> int:
    g = read_graph_file(args.infile)
    algo = args.algo
    if algo == "auto":
        algo, meta = _pick_auto_algo(args.infile)
        if meta.get("k"):
            args.k = meta["k"]
    t0 = time.perf_counter()
    try:
        oracle, res, bound = _run_algorithm(algo, g, args)
    except OracleInconsistencyError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 2
    wall = (time.perf_counter() - t0) * 1000
    ok = res.edges == g.edges()
    if args.transcript:
        oracle.dump_transcript(args.transcript)
    row = (
        f"{algo},{args.family or ''},{g.n},{max_degree(g)},{args.k},"
        f"{args.seed},{res.queries},"
        f"{'' if bound is None else f'{bound:.1f}'},{str(ok).lower()},"
        f"{res.retries},{wall:.1f}"
    )
    _append_rows(args.out, BENCH_HEADER, [row])
    if not ok:
        print("verification failed: edge sets differ", file=sys.stderr)
        return 2
    if args.assert_bounds:
        violations = _bound_violations(algo, g, res, bound)
        if violations:
            for v in violations:
                print(f"bound violated: {v}", file=sys.stderr)
            return 3
    return 0


_FAMILY_OF_ALGO = {
    "tree": "tree",
    "chordal": "chordal",
    "kchordal": "kchordal",
    "treelength": "kchordal",
}


def _bench_trial(payload):
    algo, family, n, delta, k, seed, randomized, assert_bounds = payload
    if family == "tree":
        g = gen_tree(n, delta, seed)
    elif family == "chordal":
        g, _ = gen_chordal(n, delta, seed)
    else:
        g = gen_kchordal(n, delta, max(k, 3), seed)

    class _A:
        pass

    a = _A()
    a.k = k
    a.seed = seed
    a.randomized = randomized
    a.transcript = None
    a.assert_bounds = assert_bounds
    t0 = time.perf_counter()
    try:
        _oracle, res, bound = _run_algorithm(algo, g, a)
        ok = res.edges == g.edges()
    except OracleInconsistencyError:
        return None, False, []
    wall = (time.perf_counter() - t0) * 1000
    violations = _bound_violations(algo, g, res, bound) if assert_bounds else []
    row = (
        f"{algo},{family},{g.n},{max_degree(g)},{k},{seed},{res.queries},"
        f"{'' if bound is None else f'{bound:.1f}'},{str(ok).lower()},"
        f"{res.retries},{wall:.1f}"
    )
    return row, ok, violations


def cmd_bench(args) -> int:
    algo = args.algo
    family = args.family or _FAMILY_OF_ALGO.get(algo)
    if family is None:
        raise InfeasibleParameters(f"bench cannot infer a family for {algo!r}")
    payloads = [
        (algo, family, args.n, args.delta, args.k, args.seed + t,
         args.randomized, args.assert_bounds)
        for t in range(args.trials)
    ]
    workers = int(os.environ.get("RECON_WORKERS", "1"))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_bench_trial, payloads))
    else:
        outcomes = [_bench_trial(p) for p in payloads]
    rows = [row for row, _, _ in outcomes if row is not None]
    _append_rows(args.out, BENCH_HEADER, rows)
    if not all(ok for _, ok, _ in outcomes):
        print("verification failed on at least one trial", file=sys.stderr)
        return 2
    if args.assert_bounds and any(v for _, _, v in outcomes):
        for _, _, vs in outcomes:
            for v in vs:
                print(f"bound violated: {v}", file=sys.stderr)
        return 3
    return 0


def cmd_lab(args) -> int:
    rows = []
    experiment = args.algo
    if experiment == "lbtree":
        t = LowerBoundTree(args.c, args.delta, args.k, args.seed)
        from .graph import all_pairs_distances

        dist = all_pairs_distances(t.graph)
        formula_ok = all(
            lb_tree_distance(t, x, y) == dist[x, y]
            for x in range(t.n_nodes)
            for y in range(t.n_nodes)
        )
        rows.append(
            f"lbtree-formula,c={args.c};delta={args.delta};k={args.k},"
            f"{args.seed},{t.n_nodes * t.n_nodes},,{str(formula_ok).lower()}"
        )
        co = t.coordinate_oracle()
        wo = t.word_oracle()
        import random as _random

        rng = _random.Random(args.seed)
        replay_ok = True
        word_queries = 0
        for _ in range(args.trials or 10**4):
            x = rng.randrange(t.n_nodes)
            y = rng.randrange(t.n_nodes)
            if not (t.is_leaf(x) or t.is_leaf(y)) or x == y:
                continue
            kind, qargs, rebuild = distance_query_as_word_query(t, x, y)
            expect = (
                wo.query_type1(*qargs) if kind == 1 else wo.query_type2(*qargs)
            )
            ans, nos = word_query_via_coordinates(co, kind, *qargs)
            word_queries += 1
            if ans != expect or rebuild(ans) != dist[x, y]:
                replay_ok = False
            if nos != (1 if ans < t.k else 0):
                replay_ok = False
        replay_ok = replay_ok and co.no_count <= word_queries
        rows.append(
            f"lbtree-replay,c={args.c};delta={args.delta};k={args.k},"
            f"{args.seed},{word_queries},{co.no_count},{str(replay_ok).lower()}"
        )
        ok = formula_ok and replay_ok
    elif experiment == "balanced":
        ok = True
        for trial in range(max(args.trials, 1)):
            seed = args.seed + trial
            f = random_balanced_function(args.delta, args.k, args.c, seed)
            n = f.shape[0]
            oracle = (
                WordOracle(f, args.delta)
                if args.oracle == "word"
                else CoordinateOracle(f, args.delta)
            )
            report = reconstruct_balanced_function(oracle, n, args.delta,
                                                   args.k, args.c)
            import numpy as _np

            good = bool(_np.array_equal(report.func, f))
            ok = ok and good
            nos = "" if report.no_answers is None else report.no_answers
            rows.append(
                f"balanced-{args.oracle},n={n};delta={args.delta};k={args.k};"
                f"c={args.c},{seed},{report.queries},{nos},{str(good).lower()}"
            )
    elif experiment == "phylo":
        ok = True
        for trial in range(max(args.trials, 1)):
            seed = args.seed + trial
            t = LowerBoundTree(args.c, args.delta, args.k, seed)
            from .graph import all_pairs_distances
            import numpy as _np

            dist = all_pairs_distances(t.graph)
            leaf_ids = [t.n_internal + i for i in range(t.n_leaves)]
            leaf_dist = dist[_np.ix_(leaf_ids, leaf_ids)]
            oracle = t.distance_oracle()
            labels, used = recover_leaf_labels(t, leaf_dist, oracle)
            good = labels == {i: t.leaf_words[i] for i in range(t.n_leaves)}
            good = good and used <= args.delta**2 * t.n_leaves
            ok = ok and good
            rows.append(
                f"phylo,c={args.c};delta={args.delta};k={args.k},{seed},"
                f"{used},,{str(good).lower()}"
            )
    elif experiment == "partition":
        import random as _random

        ok = True
        for trial in range(max(args.trials, 1)):
            seed = args.seed + trial
            rng = _random.Random(seed)
            labels = [i % args.k for i in range(args.k)] + [
                rng.randrange(args.k) for _ in range(args.n - args.k)
            ]
            rng.shuffle(labels)
            oracle = MembershipOracle(labels)
            classes, used = learn_partition(oracle, args.n, args.k)
            got = {frozenset(c) for c in classes}
            want = {
                frozenset(i for i in range(args.n) if labels[i] == j)
                for j in range(args.k)
            }
            good = got == want and used <= (args.k - 1) * args.n
            ok = ok and good
            rows.append(
                f"partition,n={args.n};k={args.k},{seed},{used},,"
                f"{str(good).lower()}"
            )
    else:
        raise InfeasibleParameters(f"unknown lab experiment {experiment!r}")
    _append_rows(args.out, LAB_HEADER, rows)
    return 0 if ok else 2


def cmd_verify(args) -> int:
    g = read_graph_file(args.infile)
    side = _sidecar_path(args.infile)
    if os.path.exists(side):
        with open(side, "r", encoding="utf-8") as fh:
            meta = json.load(fh)
        family = meta.get("family")
        d = max_degree(g)
        if meta.get("delta") is not None and d > meta["delta"]:
            print(f"degree {d} exceeds declared {meta['delta']}",
                  file=sys.stderr)
            return 2
        if family == "tree" and not g.is_tree():
            print("declared tree is not a tree", file=sys.stderr)
            return 2
        if family == "chordal":
            from .decomposition import perfect_elimination_order

            if perfect_elimination_order(g) is None:
                print("declared chordal graph is not chordal", file=sys.stderr)
                return 2
        if family in ("kchordal", "treelength") and meta.get("k"):
            from .graph import is_k_chordal
            from .errors import WorkBudgetExceeded

            try:
                if not is_k_chordal(g, meta["k"], work_budget=10**7):
                    print("declared k-chordal graph fails the checker",
                          file=sys.stderr)
                    return 2
            except WorkBudgetExceeded:
                print("k-chordality check skipped: instance too large")
    print(f"ok: n={g.n}, m={g.edge_count}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="distrecon",
                                description="distance-query reconstruction")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("gen", "reconstruct", "bench", "lab", "verify"):
        q = sub.add_parser(name)
        q.add_argument("--algo", default="auto",
                       help="tree|chordal|kchordal|treelength; lab: "
                            "lbtree|balanced|phylo|partition")
        q.add_argument("--family", default=None,
                       help="instance family when it differs from --algo")
        q.add_argument("--n", type=int, default=100)
        q.add_argument("--delta", type=int, default=3)
        q.add_argument("--k", type=int, default=3)
        q.add_argument("--c", type=int, default=1)
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--trials", type=int, default=1)
        q.add_argument("--in", dest="infile", default=None)
        q.add_argument("--out", default=None)
        q.add_argument("--assert-bounds", action="store_true")
        q.add_argument("--transcript", default=None)
        q.add_argument("--randomized", action="store_true",
                       help="tree reconstruction query order")
        q.add_argument("--oracle", default="word", choices=("word", "coordinate"),
                       help="oracle flavour for the balanced lab")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen":
            return cmd_gen(args)
        if args.command == "reconstruct":
            if args.infile is None:
                raise GraphError("reconstruct requires --in")
            return cmd_reconstruct(args)
        if args.command == "bench":
            return cmd_bench(args)
        if args.command == "lab":
            return cmd_lab(args)
        if args.command == "verify":
            if args.infile is None:
                raise GraphError("verify requires --in")
            return cmd_verify(args)
        raise GraphError(f"unknown command {args.command!r}")
    except (GraphError, InfeasibleParameters, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
