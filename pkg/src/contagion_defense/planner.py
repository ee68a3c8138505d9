"""Full defense planning: exact solve, pruning, perfect defense,
bi-criteria approximations and greedy baselines.

The joint program decides the allocation and one transfer plan per possible
attack at once: variables ``r_<u>`` (resources), ``x_<u>_<v>`` (binary, node
``v`` defended when ``u`` is attacked), ``t_<u>_<z>_<v>`` (transfer ``z`` to
``v`` in the scenario of an attack at ``u``; created only for receivers
inside ``N_k(u)``), and a scalar ``loss`` pushed above every scenario's
damage.  Minimizing ``loss`` yields the optimal defending result.

Because the relaxation's integrality gap is unbounded, rounding alone cannot
approximate the optimum at the same budget.  The bi-criteria route solves
the relaxation at a reduced budget ``eps * R``, rounds at a threshold, and
rescales by ``1 / eps``: ``ba_epsilon`` rounds at ``eps`` itself, which is
always feasible, while ``ba_epsilon_tau`` tries more aggressive thresholds
``tau < eps`` and keeps any whose induced feasibility check succeeds at the
full budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .lpkit import (
    GREATER,
    LESS,
    LinearProgram,
    SolverLimitError,
    Status,
    check_feasibility,
    solve_lp,
    solve_mip,
)
from .netmodel import (
    DEF_TOL,
    AllocationStrategy,
    DefendingStrategy,
    Instance,
    ReallocationStrategy,
    evaluate,
    k_neighborhood,
    loss_granularity,
    null_strategy,
)

_DEFAULT_EPSILONS = tuple(round(0.1 * i, 10) for i in range(1, 10))


@dataclass(frozen=True)
class PlannerConfig:
    """Grids, pruning switch and solver budgets shared by the planners."""

    epsilon_grid: tuple[float, ...] = _DEFAULT_EPSILONS
    tau_points: int = 20
    pruning: bool = True
    max_pivots: int = 10**6
    max_nodes: int = 10**6

    def __post_init__(self) -> None:
        for eps in self.epsilon_grid:
            if not 0.0 < eps < 1.0:
                raise ValueError(f"epsilon {eps} outside (0, 1)")
        if self.tau_points < 1:
            raise ValueError("tau grid needs at least one point")

    def tau_grid(self, epsilon: float) -> tuple[float, ...]:
        """Evenly spaced thresholds in ``(0, epsilon]``."""
        return tuple(
            epsilon * i / self.tau_points for i in range(1, self.tau_points + 1)
        )


def build_defense_milp(inst: Instance, budget: float) -> LinearProgram:
    """Joint allocation/reallocation program using ``budget`` total resource."""
    lp = LinearProgram()
    n = inst.n
    r = [lp.add_variable(f"r_{u}", 0.0, budget) for u in range(n)]
    loss_ub = 0.0
    reached_by = []
    for u in range(n):
        reached = sorted(k_neighborhood(inst, u, inst.k))
        reached_by.append(reached)
        loss_ub = max(loss_ub, sum(inst.alpha[v] for v in reached))
    loss = lp.add_variable("loss", 0.0, loss_ub)

    lp.add_constraint({r[u]: 1.0 for u in range(n)}, LESS, budget, name="budget")

    for u in range(n):
        reached = reached_by[u]
        reached_set = set(reached)
        x = {
            v: lp.add_variable(f"x_{u}_{v}", 0.0, 1.0, binary=True) for v in reached
        }
        t: dict[tuple[int, int], int] = {}
        for v in reached:
            for z, w in inst.in_adj[v]:
                t[(z, v)] = lp.add_variable(f"t_{u}_{z}_{v}", 0.0, w * budget)

        for v in reached:
            coeffs: dict[int, float] = {r[v]: 1.0, x[v]: -inst.theta[v]}
            for z, _ in inst.out_adj[v]:
                if z in reached_set:
                    coeffs[t[(v, z)]] = coeffs.get(t[(v, z)], 0.0) - 1.0
            for z, _ in inst.in_adj[v]:
                coeffs[t[(z, v)]] = coeffs.get(t[(z, v)], 0.0) + 1.0
            lp.add_constraint(coeffs, GREATER, 0.0, name=f"pow_{u}_{v}")

        for (z, v), idx in t.items():
            w = inst.slot_weight[(z, v)]
            lp.add_constraint({idx: 1.0, r[z]: -w}, LESS, 0.0, name=f"cap_{u}_{z}_{v}")

        senders = sorted({z for z, _ in t})
        for z in senders:
            coeffs = {idx: 1.0 for (s, _), idx in t.items() if s == z}
            coeffs[r[z]] = coeffs.get(r[z], 0.0) - 1.0
            lp.add_constraint(coeffs, LESS, 0.0, name=f"out_{u}_{z}")

        total = sum(inst.alpha[v] for v in reached)
        coeffs = {x[v]: inst.alpha[v] for v in reached}
        coeffs[loss] = 1.0
        lp.add_constraint(coeffs, GREATER, total, name=f"loss_{u}")

    lp.set_objective({loss: 1.0})
    return lp


def _extract_strategy(inst: Instance, lp: LinearProgram, x) -> DefendingStrategy:
    r = tuple(max(0.0, float(x[lp.index_of(f"r_{u}")])) for u in range(inst.n))
    transfers: dict[int, dict[tuple[int, int], float]] = {}
    for j, var in enumerate(lp.variables):
        if not var.name.startswith("t_"):
            continue
        value = float(x[j])
        if value > 1e-12:
            _, u, z, v = var.name.split("_")
            transfers.setdefault(int(u), {})[(int(z), int(v))] = value
    reallocs = tuple(
        ReallocationStrategy(u, transfers.get(u, {})) for u in range(inst.n)
    )
    return DefendingStrategy(AllocationStrategy(r), reallocs)


def lp_lower_bound(inst: Instance, config: PlannerConfig | None = None) -> float:
    """Optimum of the continuous relaxation: a lower bound on the result."""
    cfg = config or PlannerConfig()
    lp = build_defense_milp(inst, inst.budget)
    return float(solve_lp(lp, max_pivots=cfg.max_pivots).objective)


def prune(lp: LinearProgram, inst: Instance, lower_bound: float) -> LinearProgram:
    """Shrink a defense program using a lower bound on the optimal result.

    Drops every attack scenario whose total reachable value cannot exceed
    ``lower_bound`` (such an attack can never be the binding one), then
    removes dominated rows: a sender whose outgoing weights sum to at most 1
    needs no outflow row, and one whose weights are all exactly 1 needs no
    per-edge cap rows.  The optimum is unchanged provided ``lower_bound``
    does not exceed the true optimal result.
    """
    upper = 0.0
    scenario_value: dict[int, float] = {}
    for u in range(inst.n):
        reached = k_neighborhood(inst, u, inst.k)
        scenario_value[u] = sum(inst.alpha[v] for v in reached)
        upper = max(
            upper,
            sum(inst.alpha[v] for v in reached if inst.theta[v] > DEF_TOL),
        )
    if lower_bound > upper + 1e-9:
        raise ValueError(
            f"lower bound {lower_bound} exceeds the known optimum upper "
            f"bound {upper}; pruning with it would be unsound"
        )
    dropped = {u for u, value in scenario_value.items() if value <= lower_bound + 1e-9}

    weight_sum = [sum(w for _, w in inst.out_adj[z]) for z in range(inst.n)]
    all_ones = [
        len(inst.out_adj[z]) > 0 and all(w == 1.0 for _, w in inst.out_adj[z])
        for z in range(inst.n)
    ]

    def scenario_of(name: str) -> int | None:
        head, _, rest = name.partition("_")
        if head in ("x", "t", "pow", "cap", "out", "loss") and rest:
            return int(rest.split("_", 1)[0])
        return None

    pruned = LinearProgram()
    remap: dict[int, int] = {}
    for j, var in enumerate(lp.variables):
        u = scenario_of(var.name)
        if u is not None and u in dropped:
            continue
        remap[j] = pruned.add_variable(var.name, var.lower, var.upper, var.binary)

    for row in lp.constraints:
        u = scenario_of(row.name)
        if u is not None and u in dropped:
            continue
        parts = row.name.split("_")
        if parts[0] == "out" and weight_sum[int(parts[2])] <= 1.0 + 1e-12:
            continue
        if parts[0] == "cap":
            z = int(parts[2])
            if all_ones[z] and weight_sum[z] > 1.0 + 1e-12:
                continue
        pruned.add_constraint(
            {remap[j]: coef for j, coef in row.coeffs.items()},
            row.relation,
            row.rhs,
            name=row.name,
        )

    pruned.set_objective(
        {remap[j]: coef for j, coef in lp.objective.items()},
        lp.objective_constant,
    )
    return pruned


def _strategy_as_point(
    inst: Instance, lp: LinearProgram, strategy: DefendingStrategy
) -> tuple[float, list[float]]:
    """Encode a feasible strategy as a program point (for incumbent seeding).

    The objective covers only the scenarios present in ``lp`` so the encoding
    also works on pruned programs.
    """
    point = [0.0] * lp.num_variables
    for u, r in enumerate(strategy.allocation.r):
        point[lp.index_of(f"r_{u}")] = r
    worst = 0.0
    any_scenario = False
    for u in range(inst.n):
        if not lp.has_variable(f"x_{u}_{u}"):
            continue  # scenario pruned away
        any_scenario = True
        realloc = strategy.reallocations[u]
        power = list(strategy.allocation.r)
        for (z, v), amount in realloc.t.items():
            power[z] -= amount
            power[v] += amount
            point[lp.index_of(f"t_{u}_{z}_{v}")] = amount
        scenario_loss = 0.0
        for v in k_neighborhood(inst, u, inst.k):
            if power[v] >= inst.theta[v] - DEF_TOL:
                point[lp.index_of(f"x_{u}_{v}")] = 1.0
            else:
                scenario_loss += inst.alpha[v]
        worst = max(worst, scenario_loss)
    if any_scenario:
        point[lp.index_of("loss")] = worst
    return worst, point


def solve_exact(
    inst: Instance, config: PlannerConfig | None = None
) -> tuple[DefendingStrategy, float]:
    """Optimal defending strategy and its defending result.

    The reported result is the re-evaluated loss of the extracted strategy,
    which equals the program optimum (for pruned programs the dropped
    scenarios stay below the bound by construction).  The greedy
    reallocation strategy seeds the search as its first incumbent.
    """
    cfg = config or PlannerConfig()
    lp = build_defense_milp(inst, inst.budget)
    if cfg.pruning:
        relaxed = solve_lp(lp, max_pivots=cfg.max_pivots)
        lp = prune(lp, inst, float(relaxed.objective))
    warm = _strategy_as_point(inst, lp, greedy_r(inst))
    result = solve_mip(
        lp,
        max_nodes=cfg.max_nodes,
        max_pivots=cfg.max_pivots,
        incumbent=warm,
        objective_granularity=loss_granularity(inst),
    )
    if result.status is Status.ITER_LIMIT:
        raise SolverLimitError(result)
    strategy = _extract_strategy(inst, lp, result.x)
    return strategy, evaluate(inst, strategy).defending_result


def perfect_defense(
    inst: Instance, config: PlannerConfig | None = None
) -> DefendingStrategy | None:
    """A zero-loss strategy at the instance budget, or None if none exists.

    Zero loss forces every defended-indicator to 1, so a single feasibility
    check of the joint program with all binaries fixed decides the question
    in polynomial time.
    """
    cfg = config or PlannerConfig()
    lp = build_defense_milp(inst, inst.budget)
    assignment = {j: 1 for j in lp.binary_indices()}
    result = check_feasibility(lp, assignment, max_pivots=cfg.max_pivots)
    if result.status is Status.INFEASIBLE:
        return None
    return _extract_strategy(inst, lp, result.x)


def _scaled_strategy(
    inst: Instance, lp: LinearProgram, x, factor: float
) -> DefendingStrategy:
    """Extract a fractional solution and multiply resources/transfers by factor."""
    base = _extract_strategy(inst, lp, x)
    r = [v * factor for v in base.allocation.r]
    total = sum(r)
    if total > inst.budget > 0.0:
        # trim float dust so the scaled point stays within the full budget
        trim = inst.budget / total
        r = [v * trim for v in r]
        factor *= trim
    reallocs = tuple(
        ReallocationStrategy(
            ra.attacked, {k: v * factor for k, v in ra.t.items()}
        )
        for ra in base.reallocations
    )
    return DefendingStrategy(AllocationStrategy(tuple(r)), reallocs)


def ba_epsilon(
    inst: Instance, epsilon: float, config: PlannerConfig | None = None
) -> tuple[DefendingStrategy, float]:
    """Bi-criteria approximation: relax at budget ``epsilon * R``, scale up.

    The relaxation solution scaled by ``1 / epsilon`` is feasible at budget
    ``R`` and every node whose indicator reached ``epsilon`` is defended, so
    the result is at most ``1 / (1 - epsilon)`` times the optimum achievable
    with ``epsilon * R`` resource.
    """
    cfg = config or PlannerConfig()
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon {epsilon} outside (0, 1)")
    lp = build_defense_milp(inst, epsilon * inst.budget)
    relaxed = solve_lp(lp, max_pivots=cfg.max_pivots)
    strategy = _scaled_strategy(inst, lp, relaxed.x, 1.0 / epsilon)
    return strategy, evaluate(inst, strategy).defending_result


def ba_epsilon_tau(
    inst: Instance,
    epsilon: float,
    tau_grid: Sequence[float] | None = None,
    config: PlannerConfig | None = None,
) -> tuple[DefendingStrategy, float, float]:
    """Aggressive-rounding variant; returns (strategy, result, chosen tau).

    For each threshold ``tau`` in the grid the relaxation solution at budget
    ``epsilon * R`` is rounded at ``tau`` and the induced feasibility check
    runs at the full budget; feasible candidates compete on their evaluated
    result.  The plain scaled solution covers ``tau = epsilon`` and is always
    feasible, so the returned result never exceeds ``ba_epsilon``'s.
    """
    cfg = config or PlannerConfig()
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon {epsilon} outside (0, 1)")
    taus = tuple(tau_grid) if tau_grid is not None else cfg.tau_grid(epsilon)
    for tau in taus:
        if not 0.0 < tau <= epsilon + 1e-12:
            raise ValueError(f"tau {tau} outside (0, epsilon]")

    scaled_lp = build_defense_milp(inst, epsilon * inst.budget)
    relaxed = solve_lp(scaled_lp, max_pivots=cfg.max_pivots)
    full_lp = build_defense_milp(inst, inst.budget)

    binaries = full_lp.binary_indices()
    fractional = {
        j: float(relaxed.x[scaled_lp.index_of(full_lp.variables[j].name)])
        for j in binaries
    }

    best: tuple[float, float, DefendingStrategy] | None = None
    seen: set[tuple[int, ...]] = set()
    for tau in sorted(taus):
        if tau >= epsilon - 1e-12:
            continue  # covered by the guaranteed scaled candidate below
        assignment = {j: 1 if fractional[j] >= tau - 1e-12 else 0 for j in binaries}
        key = tuple(assignment[j] for j in binaries)
        if key in seen:
            continue
        seen.add(key)
        result = check_feasibility(full_lp, assignment, max_pivots=cfg.max_pivots)
        if result.status is Status.INFEASIBLE:
            continue
        strategy = _extract_strategy(inst, full_lp, result.x)
        value = evaluate(inst, strategy).defending_result
        if best is None or value < best[0] - 1e-12:
            best = (value, tau, strategy)

    fallback = _scaled_strategy(inst, scaled_lp, relaxed.x, 1.0 / epsilon)
    fallback_value = evaluate(inst, fallback).defending_result
    if best is None or fallback_value < best[0] - 1e-12:
        best = (fallback_value, epsilon, fallback)

    value, tau_star, strategy = best
    return strategy, value, tau_star


def _greedy_allocation(inst: Instance) -> AllocationStrategy:
    r = [0.0] * inst.n
    remaining = inst.budget
    for v in sorted(range(inst.n), key=lambda v: (-inst.alpha[v], v)):
        if remaining <= 0.0:
            break
        take = min(inst.theta[v], remaining)
        r[v] = take
        remaining -= take
    return AllocationStrategy(tuple(r))


def greedy(inst: Instance) -> DefendingStrategy:
    """Fill thresholds of the highest-value nodes first; never reallocate.

    Ties on value break toward the smaller node id; the last node funded may
    receive only part of its threshold.
    """
    return null_strategy(inst, _greedy_allocation(inst))


def greedy_r(inst: Instance) -> DefendingStrategy:
    """Greedy allocation plus a greedy transfer plan per attacked node.

    Within a scenario, reached nodes are served in decreasing value order;
    each pulls from its neighbors (largest available amount first, ties
    toward the smaller id) up to the edge caps and the senders' remaining
    stock, stopping once its threshold is met.  A node already served and
    defended is never drained back below its threshold.
    """
    alloc = _greedy_allocation(inst)
    r = alloc.r
    reallocs = []
    for u in range(inst.n):
        targets = sorted(
            k_neighborhood(inst, u, inst.k), key=lambda v: (-inst.alpha[v], v)
        )
        t: dict[tuple[int, int], float] = {}
        sent = [0.0] * inst.n
        received = [0.0] * inst.n
        defended: set[int] = set()

        def power(v: int) -> float:
            return r[v] - sent[v] + received[v]

        for v in targets:
            need = inst.theta[v] - power(v)
            if need <= DEF_TOL:
                defended.add(v)
                continue
            offers = []
            for z, w in inst.in_adj[v]:
                available = min(w * r[z] - t.get((z, v), 0.0), r[z] - sent[z])
                if z in defended:
                    available = min(available, power(z) - inst.theta[z])
                if available > 1e-12:
                    offers.append((available, z))
            offers.sort(key=lambda pair: (-pair[0], pair[1]))
            for available, z in offers:
                take = min(available, need)
                t[(z, v)] = t.get((z, v), 0.0) + take
                sent[z] += take
                received[v] += take
                need -= take
                if need <= 1e-12:
                    break
            if power(v) >= inst.theta[v] - DEF_TOL:
                defended.add(v)
        reallocs.append(ReallocationStrategy(u, t))
    return DefendingStrategy(alloc, tuple(reallocs))
