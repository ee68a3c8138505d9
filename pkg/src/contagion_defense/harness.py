"""Instance generation, brute-force verification, and batch experiments.

Generators are deterministic under a fixed seed: regenerating with the same
arguments yields a byte-identical instance file.  ``oracle_exact`` verifies
the exact planner by enumerating defended-set assignments directly, using
only feasibility checks (no branch and bound).  ``run_suite`` runs a set of
algorithms over a set of instances and writes a CSV plus one strategy file
per cell.
"""

from __future__ import annotations

import csv
import dataclasses
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import networkx as nx
import numpy as np

from . import planner
from .lpkit import Status, check_feasibility
from .netmodel import (
    AllocationStrategy,
    DefendingStrategy,
    Instance,
    evaluate,
    k_neighborhood,
    read_instance,
    write_strategy,
)

ORACLE_BINARY_CAP = 24
"""oracle_exact refuses instances with more joint defended-set decisions."""


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


def _draw_node_params(rng, n, theta_range, alpha_range):
    theta = rng.integers(theta_range[0], theta_range[1] + 1, size=n).astype(float)
    alpha = rng.integers(alpha_range[0], alpha_range[1] + 1, size=n).astype(float)
    return theta, alpha


def _finish(theta, alpha, edges, k, budget, budget_fraction, directed=False):
    if budget is None:
        budget = budget_fraction * float(np.sum(theta))
    return Instance(
        tuple(theta), tuple(alpha), tuple(edges), directed=directed, k=k,
        budget=float(budget),
    )


def gen_gnp(
    n: int,
    p: float,
    seed: int,
    theta_range: tuple[int, int] = (1, 10),
    alpha_range: tuple[int, int] = (1, 10),
    weight_range: tuple[float, float] = (0.3, 1.0),
    k: int = 1,
    budget: float | None = None,
    budget_fraction: float = 0.5,
) -> Instance:
    """Random graph: every pair is an edge independently with probability p.

    Thresholds and values are uniform integers over their ranges, weights
    uniform reals.  Without an explicit budget, R = budget_fraction * sum(theta).
    """
    rng = np.random.default_rng(seed)
    theta, alpha = _draw_node_params(rng, n, theta_range, alpha_range)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                edges.append((i, j, float(rng.uniform(*weight_range))))
    return _finish(theta, alpha, edges, k, budget, budget_fraction)


def gen_powerlaw(
    n: int,
    m_attach: int,
    p_tri: int,
    seed: int,
    theta_range: tuple[int, int] = (1, 10),
    alpha_range: tuple[int, int] = (1, 10),
    weight_range: tuple[float, float] = (0.3, 1.0),
    k: int = 1,
    budget: float | None = None,
    budget_fraction: float = 0.5,
) -> Instance:
    """Heavy-tailed graph via preferential attachment with triangle closing."""
    graph = nx.powerlaw_cluster_graph(n, m_attach, p_tri, seed=seed)
    rng = np.random.default_rng(seed)
    theta, alpha = _draw_node_params(rng, n, theta_range, alpha_range)
    edges = []
    for u, v in sorted(tuple(sorted(e)) for e in graph.edges()):
        edges.append((u, v, float(rng.uniform(*weight_range))))
    return _finish(theta, alpha, edges, k, budget, budget_fraction)


def gen_vc_gadget(
    vc_n: int, vc_edges: Sequence[tuple[int, int]], budget: float
) -> Instance:
    """Edge-splitting gadget turning a vertex-cover question into defense.

    Every original edge is replaced by a zero-value splitting node wired to
    its endpoints; all thresholds are 1, all weights 0 (nothing can move),
    and k = 1.  With an integer budget R, the optimal defending result is at
    most 1 exactly when the original graph has a vertex cover of size <= R.
    """
    for u, v in vc_edges:
        if not (0 <= u < vc_n and 0 <= v < vc_n) or u == v:
            raise ValueError(f"bad vertex-cover edge ({u}, {v})")
    n = vc_n + len(vc_edges)
    theta = (1.0,) * n
    alpha = (1.0,) * vc_n + (0.0,) * len(vc_edges)
    edges = []
    for i, (u, v) in enumerate(vc_edges):
        s = vc_n + i
        edges.append((u, s, 0.0))
        edges.append((s, v, 0.0))
    return Instance(theta, alpha, tuple(edges), k=1, budget=float(budget))


# ---------------------------------------------------------------------------
# brute-force oracle
# ---------------------------------------------------------------------------


def oracle_exact(inst: Instance, max_pivots: int = 10**6) -> float:
    """Optimal defending result by enumerating defended-set assignments.

    Walks the joint space of per-scenario defended sets in increasing-loss
    order, checking each complete assignment with a feasibility solve; never
    touches branch and bound.  Zero-value nodes are never worth defending and
    are fixed undefended.  Refuses instances with more than
    ``ORACLE_BINARY_CAP`` joint decisions.
    """
    total_decisions = sum(
        len(k_neighborhood(inst, u, inst.k)) for u in range(inst.n)
    )
    if total_decisions > ORACLE_BINARY_CAP:
        raise ValueError(
            f"{total_decisions} joint decisions exceed the oracle cap "
            f"{ORACLE_BINARY_CAP}"
        )
    lp = planner.build_defense_milp(inst, inst.budget)

    per_scenario: dict[int, list[tuple[int, int]]] = {}
    for j in lp.binary_indices():
        _, u, v = lp.variables[j].name.split("_")
        per_scenario.setdefault(int(u), []).append((j, int(v)))

    all_zero = {j: 0 for j in lp.binary_indices()}
    options: list[list[tuple[float, dict[int, int]]]] = []
    for u in sorted(per_scenario):
        entries = per_scenario[u]
        positives = [(j, v) for j, v in entries if inst.alpha[v] > 0]
        total = sum(inst.alpha[v] for _, v in positives)
        subsets = []
        for mask in range(1 << len(positives)):
            assignment = {j: 0 for j, _ in entries}
            saved = 0.0
            for bit, (j, v) in enumerate(positives):
                if mask >> bit & 1:
                    assignment[j] = 1
                    saved += inst.alpha[v]
            subsets.append((total - saved, assignment))
        subsets.sort(key=lambda item: item[0])
        # a defended set infeasible on its own can never appear jointly
        keep = []
        for loss, assignment in subsets:
            trial = dict(all_zero)
            trial.update(assignment)
            feas = check_feasibility(lp, trial, max_pivots=max_pivots)
            if feas.status is not Status.INFEASIBLE:
                keep.append((loss, assignment))
        options.append(keep)

    if not options:
        return 0.0
    # leaving every node undefended is always jointly feasible
    best = max(opt[-1][0] for opt in options)
    floor = max(min(loss for loss, _ in opt) for opt in options)
    options.sort(key=lambda opt: -min(loss for loss, _ in opt))

    def walk(i: int, assignment: dict[int, int], current_max: float) -> None:
        nonlocal best
        if current_max >= best - 1e-12 or best <= floor + 1e-12:
            return
        if i == len(options):
            feas = check_feasibility(lp, assignment, max_pivots=max_pivots)
            if feas.status is not Status.INFEASIBLE:
                best = current_max
            return
        for loss, part in options[i]:
            new_max = max(current_max, loss)
            if new_max >= best - 1e-12:
                break  # losses ascend within a scenario
            merged = dict(assignment)
            merged.update(part)
            walk(i + 1, merged, new_max)

    walk(0, dict(all_zero), 0.0)
    return float(best)


def min_perfect_budget(inst: Instance, precision_factor: float = 1e-3) -> float:
    """Smallest budget admitting a zero-loss strategy, by bisection.

    Feasibility is monotone in the budget and sum(theta) always suffices, so
    plain bisection to ``precision_factor * sum(theta)`` applies.
    """
    theta_sum = float(sum(inst.theta))
    if theta_sum == 0.0:
        return 0.0
    if planner.perfect_defense(inst.with_budget(0.0)) is not None:
        return 0.0
    lo, hi = 0.0, theta_sum
    tol = precision_factor * theta_sum
    while hi - lo > tol:
        mid = (lo + hi) / 2.0
        if planner.perfect_defense(inst.with_budget(mid)) is not None:
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------------------
# experiment suite
# ---------------------------------------------------------------------------

SUITE_ALGORITHMS = ("greedy", "greedy-r", "ba", "ba-tau", "exact")


@dataclass
class SuiteConfig:
    """Settings parsed from a line-based ``key = value`` file."""

    kind: str = "gnp"
    count: int = 5
    seed: int = 1
    n: int = 20
    p: float = 0.1
    m_attach: int = 4
    p_tri: float = 0.5
    k: int = 1
    budget_fraction: float = 0.5
    epsilon: float = 0.5
    tau_points: int = 20
    algorithms: tuple[str, ...] = SUITE_ALGORITHMS
    instance_files: tuple[str, ...] = ()
    min_perfect_r: bool = False
    workers: int = 1


_INT_KEYS = {"count", "seed", "n", "m_attach", "k", "tau_points", "workers"}
_FLOAT_KEYS = {"p", "p_tri", "budget_fraction", "epsilon"}
_LIST_KEYS = {"algorithms", "instance_files"}
_BOOL_KEYS = {"min_perfect_r"}


def parse_suite_config(text: str) -> SuiteConfig:
    values: dict[str, object] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"expected 'key = value', got: {line}")
        key, _, value = (part.strip() for part in line.partition("="))
        if key in _INT_KEYS:
            values[key] = int(value)
        elif key in _FLOAT_KEYS:
            values[key] = float(value)
        elif key in _BOOL_KEYS:
            values[key] = value.lower() in ("1", "true", "yes", "on")
        elif key in _LIST_KEYS:
            values[key] = tuple(v.strip() for v in value.split(",") if v.strip())
        elif key == "kind":
            values[key] = value
        else:
            raise ValueError(f"unknown suite config key {key!r}")
    cfg = SuiteConfig(**values)
    unknown = set(cfg.algorithms) - set(SUITE_ALGORITHMS)
    if unknown:
        raise ValueError(f"unknown algorithms {sorted(unknown)}")
    return cfg


def _suite_instances(cfg: SuiteConfig) -> list[tuple[str, Instance]]:
    if cfg.instance_files:
        return [(Path(f).stem, read_instance(f)) for f in cfg.instance_files]
    out = []
    for i in range(cfg.count):
        seed = cfg.seed + i
        if cfg.kind == "gnp":
            inst = gen_gnp(
                cfg.n, cfg.p, seed, k=cfg.k, budget_fraction=cfg.budget_fraction
            )
        elif cfg.kind == "powerlaw":
            inst = gen_powerlaw(
                cfg.n, cfg.m_attach, cfg.p_tri, seed,
                k=cfg.k, budget_fraction=cfg.budget_fraction,
            )
        else:
            raise ValueError(f"unknown instance kind {cfg.kind!r}")
        out.append((f"{cfg.kind}-s{seed}-n{cfg.n}", inst))
    return out


def _algorithm_runners(
    cfg: SuiteConfig,
) -> list[tuple[str, Callable[[Instance], tuple[DefendingStrategy, float]]]]:
    planner_cfg = planner.PlannerConfig(tau_points=cfg.tau_points)

    def run_greedy(inst):
        strategy = planner.greedy(inst)
        return strategy, evaluate(inst, strategy).defending_result

    def run_greedy_r(inst):
        strategy = planner.greedy_r(inst)
        return strategy, evaluate(inst, strategy).defending_result

    def run_ba(inst):
        return planner.ba_epsilon(inst, cfg.epsilon, planner_cfg)

    def run_ba_tau(inst):
        strategy, result, _ = planner.ba_epsilon_tau(
            inst, cfg.epsilon, config=planner_cfg
        )
        return strategy, result

    def run_exact(inst):
        return planner.solve_exact(inst, planner_cfg)

    table = {
        "greedy": ("greedy", run_greedy),
        "greedy-r": ("greedy-r", run_greedy_r),
        "ba": (f"ba({cfg.epsilon})", run_ba),
        "ba-tau": (f"ba-tau({cfg.epsilon})", run_ba_tau),
        "exact": ("exact", run_exact),
    }
    return [table[name] for name in cfg.algorithms]


def run_suite(cfg: SuiteConfig, out_csv: str | Path) -> list[dict[str, object]]:
    """Run every configured algorithm on every instance; emit CSV + strategies.

    Cells run as independent tasks on a thread pool (``workers`` config key);
    results are collected and written by this thread alone.  Returns the CSV
    rows as dicts.
    """
    out_csv = Path(out_csv)
    out_csv.parent.mkdir(parents=True, exist_ok=True)
    strategy_dir = out_csv.parent / "strategies"
    instances = _suite_instances(cfg)
    runners = _algorithm_runners(cfg)
    if instances:
        strategy_dir.mkdir(exist_ok=True)

    def run_cell(name, inst, label, fn):
        start = time.perf_counter()
        strategy, result = fn(inst)
        runtime_ms = (time.perf_counter() - start) * 1000.0
        write_strategy(strategy, strategy_dir / f"{name}.{label}.strategy")
        return {
            "instance": name,
            "algorithm": label,
            "result": result,
            "runtime_ms": round(runtime_ms, 3),
            "budget": inst.budget,
        }

    rows: list[dict[str, object]] = []
    with ThreadPoolExecutor(max_workers=max(1, cfg.workers)) as pool:
        futures = [
            pool.submit(run_cell, name, inst, label, fn)
            for name, inst in instances
            for label, fn in runners
        ]
        rows = [f.result() for f in futures]

    order = {label: i for i, (label, _) in enumerate(runners)}
    rows.sort(key=lambda row: (row["instance"], order[row["algorithm"]]))
    with out_csv.open("w", newline="") as handle:
        writer = csv.DictWriter(
            handle, fieldnames=["instance", "algorithm", "result", "runtime_ms", "budget"]
        )
        writer.writeheader()
        writer.writerows(rows)

    if cfg.min_perfect_r:
        analogue = out_csv.with_name(out_csv.stem + "_min_perfect_r.csv")
        with analogue.open("w", newline="") as handle:
            writer = csv.DictWriter(
                handle, fieldnames=["instance", "weights", "min_budget"]
            )
            writer.writeheader()
            for name, inst in instances:
                writer.writerow(
                    {
                        "instance": name,
                        "weights": "given",
                        "min_budget": min_perfect_budget(inst),
                    }
                )
                writer.writerow(
                    {
                        "instance": name,
                        "weights": "zero",
                        "min_budget": min_perfect_budget(inst.with_zero_weights()),
                    }
                )
    return rows
