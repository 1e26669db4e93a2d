"""Command-line front end: ``graphlim <subcommand> ...``.

Every subcommand prints one JSON document on standard output that embeds
the run manifest (command, inputs, flags, seed, version).  Exit codes:
0 success, 2 input error, 3 capacity error, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import io
from .convergence import cauchy_diagnostic, estimate_parameter, get_parameter, BUILTIN_PARAMETERS
from .core import (WeightedGraph, complete_bipartite, complete_graph, cycle_graph, empty_graph,
                   half_graph, path_graph, quotient, star_graph)
from .cutdistance import delta_cut, delta_hat
from .cutnorm import cut_norm
from .errors import CapacityError, InputError
from .graphon import BUILTINS, AnalyticGraphon
from .homdensity import t_density
from .regularity import equitable_weak_partition, weak_regular_partition
from .sampling import (THEOREMS, concentration_experiment, induce_sample, randomize,
                       as_seed, w_random_simple, w_random_weighted)
from .convergence import uniform_attachment

EXIT_OK, EXIT_INPUT, EXIT_CAPACITY, EXIT_USAGE = 0, 2, 3, 64

FAMILIES = ("complete", "empty", "cycle", "path", "star", "complete-bipartite", "half",
            "uniform-attachment")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _clean(obj):
    """Make a result JSON-safe: numpy scalars/arrays to Python, NaN to null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return None if math.isnan(v) or math.isinf(v) else v
    return obj


def _manifest(args, inputs) -> dict:
    skip = {"command", "func", "inputs_", "seed"}
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    return {"command": args.command, "inputs": [str(p) for p in inputs],
            "flags": flags, "seed": getattr(args, "seed", 0), "version": __version__}


# ---------------------------------------------------------------------------
# subcommands


def _cmd_hom(args):
    F, G = io.load_graph(args.f), io.load_graph(args.g)
    modes = ("hom", "inj", "ind") if args.mode == "all" else (args.mode,)
    return {f"t_{m}": t_density(F, G, m) for m in modes}, [args.f, args.g]


def _cmd_cutnorm(args):
    K = io.load_graph(args.graph)
    t0 = time.perf_counter()
    r = cut_norm(K, args.method, restarts=args.restarts, seed=args.seed)
    out = {"lower": r.lower, "upper": r.upper, "S": list(r.witness.S),
           "T": list(r.witness.T), "method": r.method}
    if args.timing:
        out["elapsed_ms"] = (time.perf_counter() - t0) * 1000
    return out, [args.graph]


def _cmd_dist(args):
    G, Gp = io.load_graph(args.graph1), io.load_graph(args.graph2)
    if args.mode == "hat":
        method = "exact" if args.exact else "auto"
        r = delta_hat(G, Gp, method, seed=args.seed, budget_ms=args.budget_ms)
        witness = list(r.witness)
    else:
        r = delta_cut(G, Gp, budget_ms=args.budget_ms, seed=args.seed)
        if args.exact and r.kind != "exact":
            raise CapacityError("the overlay distance could not be certified exactly; "
                                f"best bracket [{r.lower}, {r.value}]")
        witness = r.witness.X
    return ({"value": r.value, "kind": r.kind, "lower": r.lower, "witness": witness,
             "candidate": r.candidate}, [args.graph1, args.graph2])


def _cmd_partition(args):
    G = io.load_graph(args.graph)
    if args.equitable is not None:
        cert = equitable_weak_partition(G, args.eps, args.equitable, seed=args.seed)
    else:
        cert = weak_regular_partition(G, args.eps, seed=args.seed)
    out = cert.to_dict()
    if args.quotient_out:
        io.save_graph(quotient(G, cert.partition), args.quotient_out)
        out["quotient_file"] = str(args.quotient_out)
    return out, [args.graph]


def _load_graphon_arg(args):
    if args.graphon:
        return io.load_graphon(args.graphon), [args.graphon]
    if args.builtin is None:
        raise InputError("give a graphon file or --builtin")
    return AnalyticGraphon(args.builtin, args.p), []


def _draws(args, fn):
    base = as_seed(args.seed)
    graphs = [fn(base if args.trials == 1 else base.child(t)) for t in range(args.trials)]
    if args.out:
        if args.trials != 1:
            raise InputError("--out needs --trials 1")
        io.save_graph(graphs[0], args.out)
    return {"model": args.model, "graphs": [io.graph_to_dict(H) for H in graphs]}


def _cmd_sample(args):
    G = io.load_graph(args.graph)
    if args.model == "induce":
        if args.k is None:
            raise InputError("the induce model needs --k")
        return _draws(args, lambda s: induce_sample(G, args.k, s)), [args.graph]
    return _draws(args, lambda s: randomize(G, s)), [args.graph]


def _family(args) -> WeightedGraph:
    n = args.n
    if args.family == "uniform-attachment":
        return uniform_attachment(n, args.seed)
    if args.family == "complete-bipartite":
        m = args.m if args.m is not None else n
        return complete_bipartite(n, m)
    ctor = {"complete": complete_graph, "empty": empty_graph, "cycle": cycle_graph,
            "path": path_graph, "star": star_graph, "half": half_graph}[args.family]
    return ctor(n)


def _cmd_generate(args):
    if args.n is None or args.n < 1:
        raise InputError("--n must be a positive integer")
    if args.family:
        G = _family(args)
        if args.out:
            io.save_graph(G, args.out)
        return {"family": args.family, "graphs": [io.graph_to_dict(G)]}, []
    W, inputs = _load_graphon_arg(args)
    fn = w_random_simple if args.model == "wrand-simple" else w_random_weighted
    return _draws(args, lambda s: fn(W, args.n, s)), inputs


def _parse_params(items) -> dict:
    params = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise InputError(f"--param expects key=value, got {item!r}")
        try:
            params[key] = int(value)
        except ValueError:
            try:
                params[key] = float(value)
            except ValueError:
                raise InputError(f"--param {key}: {value!r} is not a number") from None
    return params


def _cmd_verify(args):
    rep = concentration_experiment(args.theorem, _parse_params(args.param), args.trials,
                                   seed=args.seed, threads=args.threads)
    d = rep.to_dict()
    out = {"theorem": rep.theorem, "trials": rep.trials, "bound": rep.bound,
           "failure_prob": rep.failure_probability, "pass": rep.outcomes["pass"],
           "inconclusive": rep.outcomes["inconclusive"], "fail": rep.outcomes["fail"],
           "quantiles": rep.quantiles, "verdict": rep.verdict,
           "allowed_fraction": rep.allowed_fraction, "bound_vacuous": rep.bound_vacuous,
           "probability_vacuous": rep.probability_vacuous, "params": d["params"]}
    return out, []


def _cmd_converge(args):
    data = io._read_json(args.manifest)
    files = data.get("graphs") if isinstance(data, dict) else data
    if not isinstance(files, list) or not all(isinstance(f, str) for f in files):
        raise InputError(f"{args.manifest}: field 'graphs' must be a list of file paths")
    root = Path(args.manifest).parent
    graphs = [io.load_graph(root / f) for f in files]
    rep = cauchy_diagnostic(graphs, args.k, distances=not args.no_distances, seed=args.seed)
    out = rep.to_dict()
    out["files"] = files
    return out, [args.manifest]


def _cmd_estimate(args):
    G = io.load_graph(args.graph)
    f = get_parameter(args.param)
    est, spread = estimate_parameter(f, G, args.k, args.reps, seed=args.seed)
    return {"param": f.name, "estimate": est, "spread": spread}, [args.graph]


# ---------------------------------------------------------------------------
# argument grammar


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="graphlim", description="Numerics for dense graph limits.")
    p.add_argument("--version", action="version", version=f"graphlim {__version__}")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads for parallel trials (default 1)")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_, description=help_)
        sp.set_defaults(func=func)
        return sp

    sp = add("hom", _cmd_hom, "homomorphism density t(F, G)")
    sp.add_argument("--f", required=True, help="pattern graph file")
    sp.add_argument("--g", required=True, help="target graph file")
    sp.add_argument("--mode", choices=("hom", "inj", "ind", "all"), default="hom")

    sp = add("cutnorm", _cmd_cutnorm, "cut norm of a kernel with witness sets")
    sp.add_argument("graph")
    sp.add_argument("--method", choices=("exact", "heuristic", "auto"), default="auto")
    sp.add_argument("--restarts", type=int, default=32)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--timing", action="store_true",
                    help="add elapsed_ms (output is then no longer reproducible byte for byte)")

    sp = add("dist", _cmd_dist, "cut distance between two graphs")
    sp.add_argument("graph1")
    sp.add_argument("graph2")
    sp.add_argument("--mode", choices=("hat", "delta"), default="delta")
    sp.add_argument("--exact", action="store_true")
    sp.add_argument("--budget-ms", type=float, default=None)
    sp.add_argument("--seed", type=int, default=0)

    sp = add("partition", _cmd_partition, "weak regularity partition")
    sp.add_argument("graph")
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--equitable", type=int, default=None, metavar="Q")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--quotient-out", default=None, help="write the quotient graph here")

    sp = add("sample", _cmd_sample, "random samples from a graph")
    sp.add_argument("graph")
    sp.add_argument("--model", choices=("induce", "randomize"), required=True)
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--trials", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None)

    sp = add("generate", _cmd_generate, "W-random graphs and standard families")
    sp.add_argument("graphon", nargs="?", default=None, help="graphon JSON file")
    sp.add_argument("--builtin", choices=BUILTINS, default=None)
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--model", choices=("wrand-weighted", "wrand-simple"),
                    default="wrand-simple")
    sp.add_argument("--family", choices=FAMILIES, default=None)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--m", type=int, default=None, help="second side of complete-bipartite")
    sp.add_argument("--trials", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None)

    sp = add("verify", _cmd_verify, "empirical check of a concentration statement")
    sp.add_argument("--theorem", choices=THEOREMS, required=True)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--param", action="append", metavar="KEY=VALUE")
    sp.add_argument("--seed", type=int, default=0)

    sp = add("converge", _cmd_converge, "evidence table for a graph sequence")
    sp.add_argument("manifest", help='JSON {"graphs": [paths]} (relative to the manifest)')
    sp.add_argument("--k", type=int, default=3)
    sp.add_argument("--no-distances", action="store_true")
    sp.add_argument("--seed", type=int, default=0)

    sp = add("estimate", _cmd_estimate, "estimate a testable parameter from samples")
    sp.add_argument("graph")
    sp.add_argument("--param", choices=sorted(BUILTIN_PARAMETERS), required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--reps", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result, inputs = args.func(args)
    except InputError as exc:
        print(f"graphlim {args.command}: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CapacityError as exc:
        print(f"graphlim {args.command}: capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    result["manifest"] = _manifest(args, inputs)
    sys.stdout.write(json.dumps(_clean(result), sort_keys=True, indent=2) + "\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
