"""Command line front end: run, gen, verify, bench.

Results are JSON lines, one object per solution (``size``, ``left``,
``right`` with external labels) followed by a single ``{"meta": ...}`` line.
Wall time is left out of the meta record unless ``--timing`` is given, so
repeated single-threaded runs write identical files.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import sys
import time

from .bigraph import generate_er, is_maximal_s_biplex, read_edge_list, write_edge_list
from .bounds import initial_bounds, update_bounds
from .driver import FastStats, fast_mvbp
from .errors import GraphParseError, ParameterError
from .oracle import enumerate_all_maximal
from .search import SearchConfig, SearchStats, mvbp
from .state import SearchParams, SearchState, Solution

EXIT_OK, EXIT_PARSE, EXIT_PARAMS, EXIT_TIMEOUT, EXIT_MISMATCH = 0, 2, 3, 4, 5
OOT = "OOT"


def _add_problem_args(p, algo=True):
    p.add_argument("--input", required=True)
    if algo:
        p.add_argument("--algo", choices=["mvbp", "fastmvbp", "oracle"], default="fastmvbp")
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--theta-l", type=int, default=None)
    p.add_argument("--theta-r", type=int, default=None)
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--no-decompose", action="store_true")
    p.add_argument("--no-progressive", action="store_true")
    p.add_argument("--no-reductions", action="store_true")
    p.add_argument("--allow-small-theta", action="store_true",
                   help="oracle only: accept theta below 2s+1")
    p.add_argument("--lenient", action="store_true", help="skip malformed input lines")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="biplex", description="Top-k maximal s-biplex search")
    sub = ap.add_subparsers(dest="cmd", required=True)

    r = sub.add_parser("run", help="search one graph")
    _add_problem_args(r)
    r.add_argument("--output", default="-")
    r.add_argument("--timing", action="store_true", help="include wall time in the meta record")

    g = sub.add_parser("gen", help="write a seeded ER bipartite graph")
    g.add_argument("--n-left", type=int, required=True)
    g.add_argument("--n-right", type=int, required=True)
    g.add_argument("--density", type=float, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--output", required=True)

    v = sub.add_parser("verify", help="compare an engine against the exhaustive oracle")
    _add_problem_args(v)
    v.add_argument("--results", default=None, help="re-check a result file instead of rerunning")
    v.add_argument("--engine-theta-shift", type=int, default=0,
                   help="run the engine with both thetas shifted (fault injection)")

    b = sub.add_parser("bench", help="parameter sweep, one CSV row per run")
    b.add_argument("--input", default=None, help="graph file; otherwise ER graphs are generated")
    b.add_argument("--n-left", type=int, default=1000)
    b.add_argument("--n-right", type=int, default=1000)
    b.add_argument("--density", type=float, nargs="+", default=[5.0])
    b.add_argument("--seed", type=int, nargs="+", default=[0])
    b.add_argument("--s", type=int, nargs="+", default=[1])
    b.add_argument("--k", type=int, nargs="+", default=[1])
    b.add_argument("--theta", type=int, nargs="+", default=None,
                   help="theta_l = theta_r values (default 2s+1)")
    b.add_argument("--variant", nargs="+", default=["fastmvbp"],
                   choices=["fastmvbp", "no-decompose", "no-progressive", "no-reductions", "mvbp"])
    b.add_argument("--time-limit", type=float, default=60.0)
    b.add_argument("--threads", type=int, default=1)
    b.add_argument("--output", default="-")
    return ap


# -- helpers -----------------------------------------------------------------

def _load(args):
    return read_edge_list(args.input, strict=not args.lenient)


def _thetas(args):
    lo = 2 * args.s + 1
    tl = args.theta_l if args.theta_l is not None else lo
    tr = args.theta_r if args.theta_r is not None else lo
    return tl, tr


def _engine(g, params, algo, args, stats):
    if algo == "mvbp":
        return mvbp(g, params, SearchConfig(node_reductions=not args.no_reductions), stats)
    return fast_mvbp(g, params, decomposition=not args.no_decompose,
                     progressive=not args.no_progressive, reductions=not args.no_reductions,
                     workers=args.threads, stats=stats)


def _record(g, sol: Solution) -> dict:
    return {"size": sol.size, "left": [g.label(v) for v in sol.left],
            "right": [g.label(v) for v in sol.right]}


def _open_out(path):
    return sys.stdout if path in (None, "-") else open(path, "w")


def _err(msg):
    print(f"biplex: {msg}", file=sys.stderr)


# -- subcommands ---------------------------------------------------------------

def cmd_run(args) -> int:
    try:
        g = _load(args)
    except (OSError, GraphParseError) as e:
        _err(e)
        return EXIT_PARSE
    tl, tr = _thetas(args)
    t0 = time.perf_counter()
    meta = {"algo": args.algo, "s": args.s, "k": args.k, "theta_l": tl, "theta_r": tr,
            "n_left": g.n_left, "n_right": g.n_right, "m": g.m}
    try:
        if args.algo == "oracle":
            if args.k < 1 or args.s < 0:
                raise ParameterError("k must be >= 1 and s >= 0")
            sols = enumerate_all_maximal(g, args.s, tl, tr, args.allow_small_theta)[:args.k]
            partial = False
        else:
            params = SearchParams(args.s, args.k, tl, tr, args.time_limit)
            stats = FastStats()
            pool = _engine(g, params, args.algo, args, stats)
            sols = pool.solutions()
            partial = pool.partial
            meta.update(nodes=stats.nodes, branches=stats.branches, records=stats.records,
                        subproblems=stats.subproblems, d2=stats.d2,
                        threshold_history=pool.threshold_history)
    except ParameterError as e:
        _err(e)
        return EXIT_PARAMS
    meta["partial"] = partial
    if args.timing:
        meta["seconds"] = round(time.perf_counter() - t0, 6)
    out = _open_out(args.output)
    try:
        for sol in sols:
            out.write(json.dumps(_record(g, sol)) + "\n")
        out.write(json.dumps({"meta": meta}) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_TIMEOUT if partial else EXIT_OK


def cmd_gen(args) -> int:
    try:
        g = generate_er(args.n_left, args.n_right, args.density, args.seed)
    except ParameterError as e:
        _err(e)
        return EXIT_PARAMS
    write_edge_list(g, args.output)
    return EXIT_OK


def _read_results(g, path):
    """Solutions from a result file, mapped back to internal ids."""
    lmap = {int(x): i for i, x in enumerate(g.left_labels)}
    rmap = {int(x): g.n_left + i for i, x in enumerate(g.right_labels)}
    sols = []
    with open(path) as fh:
        for line in fh:
            rec = json.loads(line)
            if "meta" in rec:
                continue
            vs = [lmap[x] for x in rec["left"]] + [rmap[x] for x in rec["right"]]
            sols.append(Solution.from_vertices(g, vs))
    return sols


def cmd_verify(args) -> int:
    try:
        g = _load(args)
    except (OSError, GraphParseError) as e:
        _err(e)
        return EXIT_PARSE
    tl, tr = _thetas(args)
    try:
        allm = enumerate_all_maximal(g, args.s, tl, tr, args.allow_small_theta)
        if args.results:
            got = _read_results(g, args.results)
        else:
            sh = args.engine_theta_shift
            params = SearchParams(args.s, args.k, tl + sh, tr + sh, args.time_limit)
            algo = "fastmvbp" if args.algo == "oracle" else args.algo
            got = _engine(g, params, algo, args, SearchStats() if algo == "mvbp" else FastStats()
                          ).solutions()
    except ParameterError as e:
        _err(e)
        return EXIT_PARAMS
    keys = {(x.left, x.right) for x in allm}
    want = [x.size for x in allm[:args.k]]
    have = [x.size for x in got]
    report = {
        "sizes_equal": have == want,
        "members_in_oracle": all((x.left, x.right) in keys for x in got),
        "all_maximal": all(is_maximal_s_biplex(g, x.vertices, args.s) for x in got),
        "bounds_sound": _root_bounds_sound(g, args.s, tl, tr, allm),
        "engine_sizes": have,
        "oracle_sizes": want,
    }
    print(json.dumps(report))
    ok = all(report[k] for k in ("sizes_equal", "members_in_oracle", "all_maximal", "bounds_sound"))
    return EXIT_OK if ok else EXIT_MISMATCH


def _root_bounds_sound(g, s, tl, tr, allm) -> bool:
    if min(tl, tr) < 2 * s + 1 or not allm:
        return True
    b = update_bounds(SearchState.root(g), initial_bounds(g, SearchParams(s, 1, tl, tr)), 0, s)
    return all(b.admits(len(x.left), len(x.right)) for x in allm)


_VARIANTS = {
    "fastmvbp": dict(),
    "no-decompose": dict(decomposition=False),
    "no-progressive": dict(progressive=False),
    "no-reductions": dict(reductions=False),
}

BENCH_FIELDS = ["n_left", "n_right", "density", "seed", "s", "k", "theta_l", "theta_r",
                "variant", "seconds", "sizes", "d2", "nodes", "branches"]


def cmd_bench(args) -> int:
    out = _open_out(args.output)
    w = csv.DictWriter(out, fieldnames=BENCH_FIELDS, lineterminator="\n")
    w.writeheader()
    graphs = {}
    try:
        if args.input:
            graphs[(None, None)] = read_edge_list(args.input)
            dens_seed = [(None, None)]
        else:
            dens_seed = list(itertools.product(args.density, args.seed))
        for (dens, seed), s, k in itertools.product(dens_seed, args.s, args.k):
            if (dens, seed) not in graphs:
                graphs = {(dens, seed): generate_er(args.n_left, args.n_right, dens, seed)}
            g = graphs[(dens, seed)]
            for th, variant in itertools.product(args.theta or [2 * s + 1], args.variant):
                params = SearchParams(s, k, th, th, args.time_limit)
                t0 = time.perf_counter()
                if variant == "mvbp":
                    stats = SearchStats()
                    pool = mvbp(g, params, SearchConfig(node_reductions=True), stats)
                else:
                    stats = FastStats()
                    pool = fast_mvbp(g, params, workers=args.threads, stats=stats,
                                     **_VARIANTS[variant])
                dt = time.perf_counter() - t0
                w.writerow({"n_left": g.n_left, "n_right": g.n_right, "density": dens,
                            "seed": seed, "s": s, "k": k, "theta_l": th, "theta_r": th,
                            "variant": variant, "seconds": OOT if pool.partial else f"{dt:.4f}",
                            "sizes": " ".join(map(str, pool.sizes())),
                            "d2": getattr(stats, "d2", ""), "nodes": stats.nodes,
                            "branches": stats.branches})
                out.flush()
    except (OSError, GraphParseError) as e:
        _err(e)
        return EXIT_PARSE
    except ParameterError as e:
        _err(e)
        return EXIT_PARAMS
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return {"run": cmd_run, "gen": cmd_gen, "verify": cmd_verify, "bench": cmd_bench}[args.cmd](args)


if __name__ == "__main__":
    sys.exit(main())
