"""Defense planning for networks under k-hop contagious attacks.

The defender spreads a resource budget over the nodes of a graph ahead of
time and may shift it along edges (within per-edge and per-node caps) once
the attacked node is known.  This package provides the network model and
loss semantics, an in-repo LP/MILP engine, exact and approximate planners,
and an experiment harness with generators and brute-force verification.
"""

from .netmodel import (
    DEF_TOL,
    FEAS_TOL,
    AllocationStrategy,
    DefendingStrategy,
    DefenseOutcome,
    Instance,
    ReallocationStrategy,
    ValidationError,
    defending_power,
    evaluate,
    format_instance,
    format_strategy,
    k_neighborhood,
    loss_of_attack,
    null_strategy,
    parse_instance,
    parse_strategy,
    read_instance,
    read_strategy,
    write_instance,
    write_strategy,
)
from .lpkit import (
    LinearProgram,
    NumericalError,
    SolveResult,
    SolverLimitError,
    Status,
    check_feasibility,
    export_lp,
    solve_lp,
    solve_mip,
)
from .realloc import (
    build_reallocation_milp,
    optimal_reallocation,
    reallocation_lp_bound,
)
from .planner import (
    PlannerConfig,
    ba_epsilon,
    ba_epsilon_tau,
    build_defense_milp,
    greedy,
    greedy_r,
    lp_lower_bound,
    perfect_defense,
    prune,
    solve_exact,
)
from .harness import (
    SuiteConfig,
    gen_gnp,
    gen_powerlaw,
    gen_vc_gadget,
    min_perfect_budget,
    oracle_exact,
    parse_suite_config,
    run_suite,
)

__version__ = "0.1.0"
