"""Optimal response to a single attack with a fixed allocation.

Given an allocation and an attacked node ``u``, find transfers minimizing the
damage over the reached set ``N_k(u)``.  The program has one binary per
reached node (1 = that node ends up defended) and one transfer variable per
slot pointing into the reached set; nodes outside ``N_k(u)`` never need
inbound resource, which shrinks the variable count from one per edge slot to
``sum_{v in N_k(u)} |N(v)|``.

Transfer caps are expressed through variable bounds (the allocation is a
constant here), so the only rows are the per-node power requirements and the
per-sender outflow caps.
"""

from __future__ import annotations

from .lpkit import (
    GREATER,
    LESS,
    LinearProgram,
    SolverLimitError,
    Status,
    solve_lp,
    solve_mip,
)
from .netmodel import (
    DEF_TOL,
    AllocationStrategy,
    Instance,
    ReallocationStrategy,
    k_neighborhood,
    loss_granularity,
)


def build_reallocation_milp(
    inst: Instance, alloc: AllocationStrategy, attacked: int
) -> LinearProgram:
    """Program whose optimum is the minimal loss of an attack at ``attacked``.

    Variables are named ``x_<v>`` (binary, node defended) and ``t_<z>_<v>``
    (transfer from ``z`` to ``v``), so solutions can be read back by name.
    """
    reached = sorted(k_neighborhood(inst, attacked, inst.k))
    reached_set = set(reached)
    lp = LinearProgram()

    x = {v: lp.add_variable(f"x_{v}", 0.0, 1.0, binary=True) for v in reached}
    t: dict[tuple[int, int], int] = {}
    for v in reached:
        for z, w in inst.in_adj[v]:
            t[(z, v)] = lp.add_variable(f"t_{z}_{v}", 0.0, w * alloc.r[z])

    for v in reached:
        coeffs: dict[int, float] = {x[v]: -inst.theta[v]}
        for z, _ in inst.out_adj[v]:
            if z in reached_set:
                coeffs[t[(v, z)]] = coeffs.get(t[(v, z)], 0.0) - 1.0
        for z, _ in inst.in_adj[v]:
            coeffs[t[(z, v)]] = coeffs.get(t[(z, v)], 0.0) + 1.0
        lp.add_constraint(coeffs, GREATER, -alloc.r[v], name=f"pow_{v}")

    senders = sorted({z for z, _ in t})
    for z in senders:
        coeffs = {idx: 1.0 for (s, _), idx in t.items() if s == z}
        lp.add_constraint(coeffs, LESS, alloc.r[z], name=f"out_{z}")

    total_value = sum(inst.alpha[v] for v in reached)
    lp.set_objective({x[v]: -inst.alpha[v] for v in reached}, constant=total_value)
    return lp


def _extract_transfers(
    lp: LinearProgram, x, attacked: int
) -> ReallocationStrategy:
    t: dict[tuple[int, int], float] = {}
    for j, var in enumerate(lp.variables):
        if not var.name.startswith("t_"):
            continue
        value = float(x[j])
        if value > 1e-12:
            _, z, v = var.name.split("_")
            t[(int(z), int(v))] = value
    return ReallocationStrategy(attacked, t)


def optimal_reallocation(
    inst: Instance,
    alloc: AllocationStrategy,
    attacked: int,
    max_nodes: int = 10**6,
) -> tuple[ReallocationStrategy, float]:
    """Minimal-loss transfers for an attack at ``attacked``.

    Exact, so potentially exponential in ``|N_k(attacked)|``.  When no slot
    into the reached set can carry anything, the answer is written down
    directly without a solve.
    """
    reached = k_neighborhood(inst, attacked, inst.k)
    movable = any(
        w * alloc.r[z] > 0.0 for v in reached for z, w in inst.in_adj[v]
    )
    if not movable:
        loss = sum(
            inst.alpha[v]
            for v in reached
            if alloc.r[v] < inst.theta[v] - DEF_TOL
        )
        return ReallocationStrategy(attacked, {}), loss

    lp = build_reallocation_milp(inst, alloc, attacked)
    result = solve_mip(
        lp, max_nodes=max_nodes, objective_granularity=loss_granularity(inst)
    )
    if result.status is Status.ITER_LIMIT:
        raise SolverLimitError(result)
    return _extract_transfers(lp, result.x, attacked), float(result.objective)


def reallocation_lp_bound(
    inst: Instance, alloc: AllocationStrategy, attacked: int
) -> float:
    """Optimum of the continuous relaxation: a lower bound on the true loss."""
    lp = build_reallocation_milp(inst, alloc, attacked)
    return float(solve_lp(lp).objective)
