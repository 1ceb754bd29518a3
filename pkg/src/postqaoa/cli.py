"""Command-line entry point: `postqaoa <subcommand> ...`."""
from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import bounds as B
from .experiments import (
    ExperimentConfig,
    combined_csv,
    experiment_combined,
    experiment_postselect,
    records_csv,
    records_json,
    summarize,
)
from .graphs import GraphError, format_graph, read_graph, sample_configuration_model, sample_simple_regular
from .indset import greedy_2independent, greedy_independent, pairs_distance4_set, verify_k_independent
from .ising import IsingInstance, SolverError, solve
from .postselect import PostselectError, build_couplings, improvement
from .qaoa import CUBIC_P1, QaoaParams, expect_zstring_p1, expected_cut_p1
from .ring import RingError, edge_cut_p1, pair_coefficient, ring_optimal_gain, ring_postselected_energy
from .verify import SUITES, run_suite

log = logging.getLogger("postqaoa")


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True, default=_default) + "\n")


def _default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"not serialisable: {type(o).__name__}")


def _params(args) -> QaoaParams:
    return QaoaParams.p1(args.beta, args.gamma)


def _vertices(text: str) -> list[int]:
    return [int(x) for x in text.replace(",", " ").split()]


def _load_set(args, g) -> list[int]:
    if args.vertices is not None:
        return _vertices(args.vertices)
    if args.set is not None:
        with open(args.set) as fh:
            data = json.load(fh)
        return [int(v) for v in (data["vertices"] if isinstance(data, dict) else data)]
    if args.seed is None:
        raise SystemExit("--seed is required to draw a 2-independent set")
    return list(greedy_2independent(g, args.seed, size=args.size, max_tries=args.max_tries).vertices)


# ---------------------------------------------------------------- subcommands

def cmd_gen(args):
    if args.model == "simple":
        g = sample_simple_regular(args.n, args.d, args.seed)
    else:
        g = sample_configuration_model(args.n, args.d, args.seed)
    sys.stdout.write(format_graph(g, args.format))


def cmd_indset(args):
    g = read_graph(args.graph)
    if args.kind == "pairs4":
        s = pairs_distance4_set(g)
    elif args.seed is None:
        raise SystemExit("--seed is required for randomised set construction")
    elif args.kind == "2id":
        s = greedy_2independent(g, args.seed, size=args.size, max_tries=args.max_tries)
    else:
        s = greedy_independent(g, args.seed, k=1, rule=args.rule)
    _emit({"k": s.k, "size": len(s), "ratio": len(s) / g.n, "vertices": list(s.vertices),
           "valid": verify_k_independent(g, s.vertices, s.k)})


def cmd_expect(args):
    g = read_graph(args.graph)
    p = _params(args)
    if args.zstring:
        zs = tuple(sorted(_vertices(args.zstring)))
        _emit({"zstring": zs, "expectation": expect_zstring_p1(g, p, zs)})
    else:
        cut = expected_cut_p1(g, p)
        _emit({"expected_cut": cut, "fraction": cut / g.num_edges, "edges": g.num_edges})


def cmd_couplings(args):
    g = read_graph(args.graph)
    inst = build_couplings(g, _load_set(args, g), _params(args))
    out = inst.to_json()
    out["higher_order_max"] = inst.meta.get("higher_order_max", 0.0)
    _emit(out)


def cmd_optimize(args):
    inst = IsingInstance.load(args.instance)
    if args.solver == "local" and args.seed is None:
        raise SystemExit("--seed is required for the local-search solver")
    sol = solve(inst, args.solver, seed=args.seed or 0, timeout=args.timeout)
    _emit({"value": sol.value, "total": sol.value + inst.offset, "method": sol.method,
           "spins": {str(k): v for k, v in sol.spins.items()}})


def cmd_improve(args):
    g = read_graph(args.graph)
    v0 = _load_set(args, g)
    imp = improvement(g, v0, _params(args), args.solver, seed=args.seed or 0, timeout=args.timeout)
    _emit({"baseline": imp.baseline, "gain_edges": imp.gain, "gain_fraction": imp.gain / g.num_edges,
           "postselected_cut": imp.baseline + imp.gain, "set_size": len(v0), "solver": imp.solver,
           "spins": {str(k): v for k, v in imp.spins.items()}})


def cmd_ring(args):
    p = _params(args)
    best = ring_optimal_gain(args.n, p)
    _emit({"n": args.n, "baseline": edge_cut_p1(p) * args.n, "pair_coefficient": pair_coefficient(p),
           "optimal_gain": best.value, "frustrated": best.frustrated,
           "postselected_cut": ring_postselected_energy(args.n, p, list(best.sigma))})


def cmd_bounds(args):
    w = args.which
    need = {"postselect-ub": ("alpha", "n"), "postselect-lb": ("graph",), "ring": ("n", "R"),
            "grid": ("n", "R"), "regular": ("n", "d", "R", "eps"), "ghz": ("k", "R"),
            "sharp": ("graph", "R"), "overlap": ("edges", "maxcut", "R", "eps")}[w]
    missing = [k for k in need if getattr(args, k) is None]
    if missing:
        raise SystemExit(f"--which {w} needs " + ", ".join("--" + m for m in missing))
    a = args
    if w == "postselect-ub":
        eps = a.eps or 0.0
        value = B.postselect_upper_bound_whp(a.alpha, eps, a.n)
        rep = B.BoundReport(w, value, "absolute edges", {"alpha": a.alpha, "eps": eps, "n": a.n},
                            {"expectation": B.postselect_upper_bound_expectation(a.alpha, a.n),
                             "fraction_of_edges_cubic": value / (1.5 * a.n)})
    elif w == "postselect-lb":
        rep = B.postselect_lower_bound(read_graph(a.graph))
    elif w == "ring":
        rep = B.BoundReport(w, B.bravyi_ring_bound(a.n, a.R), "absolute edges", {"n": a.n, "R": a.R})
    elif w == "grid":
        rep = B.BoundReport(w, B.bravyi_grid_bound(a.n, a.R, a.dim), "absolute edges",
                            {"n": a.n, "R": a.R, "dim": a.dim})
    elif w == "regular":
        rep = B.BoundReport(w, B.bravyi_regular_bound(a.n, a.d, a.R, a.eps), "absolute edges",
                            {"n": a.n, "d": a.d, "R": a.R, "eps": a.eps})
    elif w == "ghz":
        rep = B.ghz_grid_value(a.k, a.R)
    elif w == "sharp":
        rep = B.sharp_circuit_cut_bound(read_graph(a.graph), a.R, oriented=a.oriented)
    else:
        rep = B.BoundReport(w, B.overlap_bound(a.edges, a.maxcut, a.R, a.eps), "absolute edges",
                            {"edges": a.edges, "maxcut": a.maxcut, "R": a.R, "eps": a.eps})
    _emit(rep.to_json())


def cmd_experiment(args):
    data = {}
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
    for key in ("n", "count", "seed", "alpha_target", "solver", "workers", "max_tries", "eps", "timeout"):
        val = getattr(args, key)
        if val is not None:
            data[key] = val
    if args.timing:
        data["timing"] = True
    if "seed" not in data:
        raise SystemExit("--seed (or a config seed) is required")
    cfg = ExperimentConfig.from_dict(data)
    if args.kind == "postselect":
        recs, skipped = experiment_postselect(cfg)
        summary = summarize(r.gain_fraction for r in recs)
        if args.format == "csv":
            sys.stdout.write(records_csv(recs))
        else:
            _emit(records_json(recs, skipped, cfg))
    else:
        recs, skipped = experiment_combined(cfg)
        summary = {k: summarize(r.extra[k] for r in recs)
                   for k in ("postselect_fraction", "update_fraction", "combined_fraction")}
        if args.format == "csv":
            sys.stdout.write(combined_csv(recs))
        else:
            _emit({"config": cfg.__dict__, "skipped": [s.__dict__ for s in skipped], "summary": summary,
                   "records": [{"seed": r.seed, "alpha": r.alpha, **r.extra} for r in recs]})
    log.info("summary: %s", json.dumps(summary, default=_default))
    if any(r.gain_fraction > r.bound_fraction for r in recs):
        log.error("an instance exceeds its upper bound")
        return 1
    return 0


def cmd_verify(args):
    report = run_suite(args.suite)
    _emit(report)
    return 0 if report["passed"] else 1


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="postqaoa", description="Postselected depth-1 QAOA for MaxCut.")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def qaoa_args(sp):
        sp.add_argument("--beta", type=float, default=CUBIC_P1.beta)
        sp.add_argument("--gamma", type=float, default=CUBIC_P1.gamma)

    def set_args(sp):
        sp.add_argument("--vertices", help="comma-separated postselected vertices")
        sp.add_argument("--set", help="JSON file with a vertex list (e.g. from `indset`)")
        sp.add_argument("--seed", type=int, help="seed for drawing a greedy 2-independent set")
        sp.add_argument("--size", type=int)
        sp.add_argument("--max-tries", type=int, default=2000)

    sp = sub.add_parser("gen", help="sample a random regular graph")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--d", type=int, default=3)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--model", choices=("simple", "configuration"), default="simple")
    sp.add_argument("--format", choices=("txt", "json"), default="txt")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("indset", help="build a k-independent set")
    sp.add_argument("graph")
    sp.add_argument("--kind", choices=("2id", "independent", "pairs4"), default="2id")
    sp.add_argument("--rule", choices=("random", "min-degree"), default="random")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--size", type=int)
    sp.add_argument("--max-tries", type=int, default=1)
    sp.set_defaults(func=cmd_indset)

    sp = sub.add_parser("expect", help="depth-1 expectations by lightcone contraction")
    sp.add_argument("graph")
    sp.add_argument("--zstring", help="vertices of a Z-string; default is the expected cut")
    qaoa_args(sp)
    sp.set_defaults(func=cmd_expect)

    sp = sub.add_parser("couplings", help="Ising instance induced by postselection")
    sp.add_argument("graph")
    set_args(sp)
    qaoa_args(sp)
    sp.set_defaults(func=cmd_couplings)

    sp = sub.add_parser("optimize", help="maximise an Ising instance")
    sp.add_argument("instance")
    sp.add_argument("--solver", choices=("exact", "exhaustive", "local"), default="exact")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--timeout", type=float, default=60.0)
    sp.set_defaults(func=cmd_optimize)

    sp = sub.add_parser("improve", help="postselection gain on a graph")
    sp.add_argument("graph")
    set_args(sp)
    qaoa_args(sp)
    sp.add_argument("--solver", choices=("exact", "exhaustive", "local"), default="exact")
    sp.add_argument("--timeout", type=float, default=60.0)
    sp.set_defaults(func=cmd_improve)

    sp = sub.add_parser("ring", help="closed-form postselection on the ring")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--beta", type=float, default=-np.pi / 4)
    sp.add_argument("--gamma", type=float, default=np.pi / 4)
    sp.set_defaults(func=cmd_ring)

    sp = sub.add_parser("bounds", help="closed-form bounds")
    sp.add_argument("--which", required=True, choices=("postselect-ub", "postselect-lb", "ring", "grid",
                                                       "regular", "ghz", "sharp", "overlap"))
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--eps", type=float)
    sp.add_argument("--R", type=int)
    sp.add_argument("--d", type=int)
    sp.add_argument("--n", type=int)
    sp.add_argument("--k", type=int)
    sp.add_argument("--dim", type=int, default=2)
    sp.add_argument("--graph")
    sp.add_argument("--oriented", action="store_true")
    sp.add_argument("--edges", type=int)
    sp.add_argument("--maxcut", type=int)
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("experiment", help="seeded batch experiment")
    sp.add_argument("kind", choices=("postselect", "combined"))
    sp.add_argument("--config", help="JSON file with ExperimentConfig fields")
    sp.add_argument("--n", type=int)
    sp.add_argument("--count", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--alpha", dest="alpha_target", type=float)
    sp.add_argument("--solver", choices=("exact", "exhaustive", "local"))
    sp.add_argument("--workers", type=int)
    sp.add_argument("--max-tries", type=int)
    sp.add_argument("--eps", type=float)
    sp.add_argument("--timeout", type=float)
    sp.add_argument("--timing", action="store_true", help="fill the runtime_ms column")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.set_defaults(func=cmd_experiment)

    sp = sub.add_parser("verify", help="run a verification suite")
    sp.add_argument("suite", choices=SUITES + ("all",))
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return int(args.func(args) or 0)
    except (GraphError, PostselectError, SolverError, RingError, B.BoundError, ValueError) as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
