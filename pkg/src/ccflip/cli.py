"""Command line entry point: ``ccflip solve | compare | verify``."""
from __future__ import annotations

import argparse
import hashlib
import inspect
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from .exact import FIXED_FAMILY, SAMPLED, SearchEngine, axis_family, run_local_search
from .flip import FlipSchedule, iterated_flipping, two_round
from .generators import axis_clustering, make_rng, parse_instance
from .graph import UNIT, cost, read_graph, write_clustering
from .oracle import acn_pivot, brute_force_opt
from .precluster import preclustering, read_atoms
from .report import RunReport, format_table
from .sampled import TAU_PRESETS, SampleConfig, faster_local_search
from .verify import SUITES

ALGORITHMS = ("acn", "local_search", "two_round", "iterated_flipping", "faster_local_search",
              "brute_force", "fixed:x-slices", "fixed:y-slices", "fixed:z-slices")
COMPARE_SET = ("acn", "two_round", "iterated_flipping", "faster_local_search")
EXHAUSTIVE_MAX = 16


class UsageError(Exception):
    pass


def threads() -> int:
    try:
        return max(1, int(os.environ.get("CC_THREADS", "1")))
    except ValueError:
        return 1


def load_instance(args):
    if bool(args.gen) == bool(args.input):
        raise UsageError("give exactly one of --gen and --input")
    if args.gen:
        try:
            g, extra = parse_instance(args.gen)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        return g, extra, args.gen
    try:
        g = read_graph(args.input)
        with open(args.input, "rb") as fh:
            digest = hashlib.sha256(fh.read()).hexdigest()[:16]
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read graph {args.input}: {exc}") from exc
    return g, {}, f"file:sha256:{digest}"


def _fraction(x):
    return None if x is None else Fraction(x)


def sample_config(args) -> SampleConfig:
    tau = TAU_PRESETS[args.tau](args.eta) if args.tau in TAU_PRESETS else _fraction(args.tau)
    return SampleConfig(eta=args.eta, gamma=_fraction(args.gamma), tau=tau)


def make_precluster(g, args):
    atoms = read_atoms(args.atoms) if getattr(args, "atoms", None) else None
    return preclustering(g, Fraction(args.epsilon), atoms=atoms)


def engine_for(g, args):
    if g.n <= EXHAUSTIVE_MAX:
        return SearchEngine()
    return SearchEngine(mode=SAMPLED, sampled_config=sample_config(args), precluster=make_precluster(g, args))


def run_algorithm(alg: str, g, extra: dict, args, seed: int):
    """Returns (clustering, params dict)."""
    if alg == "acn":
        return acn_pivot(g, make_rng(seed)), {}
    if alg == "brute_force":
        return brute_force_opt(g).clustering, {}
    if alg.startswith("fixed:"):
        if "coords" not in extra:
            raise UsageError(f"{alg} needs a grid instance (--gen hamming:...)")
        axis = {"x-slices": 0, "y-slices": 1, "z-slices": 2}.get(alg.split(":", 1)[1])
        if axis is None:
            raise UsageError(f"unknown fixed family {alg!r}")
        coords = extra["coords"]
        eng = SearchEngine(mode=FIXED_FAMILY, family=axis_family(coords))
        return run_local_search(g, UNIT, axis_clustering(coords, axis), eng), {"family": "axis-slices+singletons"}
    if alg == "faster_local_search":
        cfg = sample_config(args)
        pc = make_precluster(g, args)
        res = faster_local_search(g, pc, UNIT, cfg, seed)
        return res.clustering, {"epsilon": str(pc.epsilon), "eta": cfg.eta, "tau": str(cfg.tau_value()),
                                "gamma": str(cfg.gamma_value(pc.epsilon)), "accepted": res.accepted}
    engine = engine_for(g, args)
    params = {"engine": engine.mode}
    if alg == "local_search":
        return run_local_search(g, UNIT, engine.precluster.initial_clustering() if engine.precluster else None,
                                engine, seed), params
    if alg == "two_round":
        starts = None
        if engine.precluster is not None:
            s = engine.precluster.initial_clustering()
            starts = (s, s)
        return two_round(g, engine, seed, starts).best[1], params
    if alg == "iterated_flipping":
        sch = FlipSchedule(beta=Fraction(args.beta), k=args.k, engine=engine)
        params.update(beta=str(sch.beta), k=sch.k)
        return iterated_flipping(g, sch, engine.precluster, seed).best[1], params
    raise UsageError(f"unknown algorithm {alg!r}; choose from {', '.join(ALGORITHMS)}")


def solve_one(alg, g, extra, args, seed, instance) -> tuple:
    t0 = time.perf_counter()
    c, params = run_algorithm(alg, g, extra, args, seed)
    ms = (time.perf_counter() - t0) * 1000
    total = cost(g, UNIT, c).total
    rep = RunReport(algorithm=alg, instance=instance, seed=seed, cost_doubled=int(2 * total),
                    num_clusters=c.num_clusters, runtime_ms=round(ms, 3), params=params)
    return rep, c


def cmd_solve(args) -> int:
    g, extra, instance = load_instance(args)
    rep, c = solve_one(args.alg, g, extra, args, args.seed, instance)
    text = rep.to_json(indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    if args.clustering_out:
        write_clustering(c, args.clustering_out)
    print(text)
    return 0


def cmd_compare(args) -> int:
    g, extra, instance = load_instance(args)
    cells = [(alg, args.seed + t) for alg in COMPARE_SET for t in range(args.trials)]
    with ThreadPoolExecutor(max_workers=threads()) as pool:
        reports = list(pool.map(lambda cell: solve_one(cell[0], g, extra, args, cell[1], instance)[0], cells))
    print(format_table(reports))
    if args.out:
        with open(args.out, "w") as fh:
            json.dump([r.to_dict() for r in sorted(reports, key=lambda r: (r.algorithm, r.seed))], fh, indent=2)
    return 0


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    failed = False
    for name in names:
        if name not in SUITES:
            raise UsageError(f"unknown suite {name!r}; choose from all, {', '.join(SUITES)}")
        fn = SUITES[name]
        kwargs = {}
        sig = inspect.signature(fn)
        if "trials" in sig.parameters and args.trials is not None:
            kwargs["trials"] = args.trials
        if "seed" in sig.parameters and args.seed is not None:
            kwargs["seed"] = args.seed
        res = fn(**kwargs)
        print(res.line())
        for f in res.failures[:5]:
            print(f"  witness: {f}")
        failed |= not res.ok
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ccflip", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def instance_flags(sp):
        sp.add_argument("--gen", help="instance descriptor, e.g. hamming:3,5,5:2 or planted:5,20,0.9,0.05:1")
        sp.add_argument("--input", help="graph file ('n m' header then 'u v' lines)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--epsilon", default="1/10")
        sp.add_argument("--gamma", default=None)
        sp.add_argument("--eta", type=int, default=2)
        sp.add_argument("--tau", default="6/eta", help="GenerateCluster threshold: 6/eta, 6/eta^2, 12/eta^2 or a number")
        sp.add_argument("--beta", default="1/2")
        sp.add_argument("--k", type=int, default=None)
        sp.add_argument("--atoms", default=None, help="atoms file, one atom per line")
        sp.add_argument("--out", default=None)

    sp = sub.add_parser("solve", help="run one algorithm")
    instance_flags(sp)
    sp.add_argument("--alg", required=True)
    sp.add_argument("--clustering-out", default=None)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("compare", help="run the baseline and every pipeline on one instance")
    instance_flags(sp)
    sp.add_argument("--trials", type=int, default=1, help="seeds per algorithm")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("verify", help="run invariant suites")
    sp.add_argument("--suite", default="all")
    sp.add_argument("--trials", type=int, default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"ccflip: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
