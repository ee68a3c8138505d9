"""Command-line interface.

Planning subcommands write the computed strategy in the text format and
print a one-line JSON summary {algorithm, result, runtime_ms, budget} to
stdout.  ``gen`` writes instance files, ``oracle`` prints the brute-force
optimum, ``suite`` runs a configured experiment batch.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import harness, planner, realloc
from .netmodel import (
    evaluate,
    parse_allocation,
    read_instance,
    write_instance,
    write_strategy,
)


def _summary(algorithm: str, result, runtime_ms: float, budget: float) -> None:
    print(
        json.dumps(
            {
                "algorithm": algorithm,
                "result": result,
                "runtime_ms": round(runtime_ms, 3),
                "budget": budget,
            }
        )
    )


def _strategy_path(args, inst_path: str, label: str) -> Path:
    if args.out:
        return Path(args.out)
    return Path(inst_path).with_suffix(f".{label}.strategy")


def _cmd_realloc(args) -> int:
    inst = read_instance(args.instance)
    alloc = parse_allocation(Path(args.alloc).read_text())
    strategy, loss = realloc.optimal_reallocation(inst, alloc, args.attack)
    print(f"loss {loss!r}")
    for (u, v) in sorted(strategy.t):
        print(f"t {u} {v} {strategy.t[(u, v)]!r}")
    if args.lp_bound:
        print(f"lp_bound {realloc.reallocation_lp_bound(inst, alloc, args.attack)!r}")
    return 0


def _cmd_solve_exact(args) -> int:
    inst = read_instance(args.instance)
    config = planner.PlannerConfig(pruning=not args.no_prune)
    start = time.perf_counter()
    strategy, result = planner.solve_exact(inst, config)
    runtime = (time.perf_counter() - start) * 1000.0
    write_strategy(strategy, _strategy_path(args, args.instance, "exact"))
    _summary("exact", result, runtime, inst.budget)
    return 0


def _cmd_perfect(args) -> int:
    inst = read_instance(args.instance)
    start = time.perf_counter()
    strategy = planner.perfect_defense(inst)
    runtime = (time.perf_counter() - start) * 1000.0
    if strategy is None:
        _summary("perfect", None, runtime, inst.budget)
        return 1
    write_strategy(strategy, _strategy_path(args, args.instance, "perfect"))
    _summary("perfect", evaluate(inst, strategy).defending_result, runtime, inst.budget)
    return 0


def _cmd_ba(args) -> int:
    inst = read_instance(args.instance)
    config = planner.PlannerConfig()
    epsilons = [args.epsilon] if args.epsilon is not None else list(config.epsilon_grid)
    start = time.perf_counter()
    best = None
    for eps in epsilons:
        if args.tau_grid:
            grid = tuple(eps * i / args.tau_grid for i in range(1, args.tau_grid + 1))
            strategy, result, tau = planner.ba_epsilon_tau(inst, eps, grid, config)
            label = f"ba({eps},tau={tau:.6g})"
        else:
            strategy, result = planner.ba_epsilon(inst, eps, config)
            label = f"ba({eps})"
        if best is None or result < best[0] - 1e-12:
            best = (result, label, strategy)
    runtime = (time.perf_counter() - start) * 1000.0
    result, label, strategy = best
    write_strategy(strategy, _strategy_path(args, args.instance, "ba"))
    _summary(label, result, runtime, inst.budget)
    return 0


def _cmd_greedy(args) -> int:
    inst = read_instance(args.instance)
    start = time.perf_counter()
    strategy = planner.greedy_r(inst) if args.realloc else planner.greedy(inst)
    result = evaluate(inst, strategy).defending_result
    runtime = (time.perf_counter() - start) * 1000.0
    label = "greedy-r" if args.realloc else "greedy"
    write_strategy(strategy, _strategy_path(args, args.instance, label))
    _summary(label, result, runtime, inst.budget)
    return 0


def _cmd_gen(args) -> int:
    if args.generator == "gnp":
        inst = harness.gen_gnp(
            args.n, args.p, args.seed, k=args.k,
            budget=args.budget, budget_fraction=args.budget_fraction,
        )
    elif args.generator == "powerlaw":
        inst = harness.gen_powerlaw(
            args.n, args.m_attach, args.p_tri, args.seed, k=args.k,
            budget=args.budget, budget_fraction=args.budget_fraction,
        )
    else:
        edges = []
        for line in Path(args.edges).read_text().splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                u, v = line.split()
                edges.append((int(u), int(v)))
        vc_n = args.vc_n if args.vc_n is not None else (
            max((max(u, v) for u, v in edges), default=-1) + 1
        )
        inst = harness.gen_vc_gadget(vc_n, edges, budget=args.budget or 0.0)
    write_instance(inst, args.out)
    print(f"wrote {args.out}: {inst.n} nodes, {inst.m} edges, budget {inst.budget!r}")
    return 0


def _cmd_oracle(args) -> int:
    inst = read_instance(args.instance)
    start = time.perf_counter()
    result = harness.oracle_exact(inst)
    runtime = (time.perf_counter() - start) * 1000.0
    _summary("oracle", result, runtime, inst.budget)
    return 0


def _cmd_suite(args) -> int:
    cfg = harness.parse_suite_config(Path(args.config).read_text())
    rows = harness.run_suite(cfg, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contagion-defense",
        description="Plan and evaluate network defenses against spreading attacks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("realloc", help="optimal response to one attack")
    p.add_argument("--instance", required=True)
    p.add_argument("--alloc", required=True, help="file with 'alloc <id> <r>' lines")
    p.add_argument("--attack", type=int, required=True)
    p.add_argument("--lp-bound", action="store_true", help="also print the relaxation bound")
    p.set_defaults(func=_cmd_realloc)

    p = sub.add_parser("solve-exact", help="optimal defending strategy")
    p.add_argument("--instance", required=True)
    p.add_argument("--out", help="strategy file (default <instance>.exact.strategy)")
    p.add_argument("--no-prune", action="store_true")
    p.set_defaults(func=_cmd_solve_exact)

    p = sub.add_parser("perfect", help="zero-loss strategy if one exists")
    p.add_argument("--instance", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_perfect)

    p = sub.add_parser("ba", help="bi-criteria approximation")
    p.add_argument("--instance", required=True)
    p.add_argument("--epsilon", type=float, help="single epsilon; omit to scan the grid")
    p.add_argument("--tau-grid", type=int, metavar="N",
                   help="aggressive rounding with N thresholds per epsilon")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_ba)

    p = sub.add_parser("greedy", help="greedy baseline")
    p.add_argument("--instance", required=True)
    p.add_argument("--realloc", action="store_true", help="greedy reallocation too")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_greedy)

    p = sub.add_parser("gen", help="generate an instance file")
    gsub = p.add_subparsers(dest="generator", required=True)
    g = gsub.add_parser("gnp")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=float, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--k", type=int, default=1)
    g.add_argument("--budget", type=float)
    g.add_argument("--budget-fraction", type=float, default=0.5)
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_gen)
    g = gsub.add_parser("powerlaw")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m-attach", type=int, required=True)
    g.add_argument("--p-tri", type=float, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--k", type=int, default=1)
    g.add_argument("--budget", type=float)
    g.add_argument("--budget-fraction", type=float, default=0.5)
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_gen)
    g = gsub.add_parser("vcgadget")
    g.add_argument("--edges", required=True, help="file with 'u v' lines")
    g.add_argument("--vc-n", type=int, help="vertex count (default: max id + 1)")
    g.add_argument("--budget", type=float, required=True)
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_gen)

    p = sub.add_parser("oracle", help="brute-force optimum for small instances")
    p.add_argument("--instance", required=True)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("suite", help="run a batch experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_suite)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
