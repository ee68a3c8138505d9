"""Network data model, strategies, and ground-truth loss evaluation.

An :class:`Instance` couples a graph with per-node defending requirements
(``theta``), damage values (``alpha``), transfer-efficiency edge weights in
``[0, 1]``, a contagion radius ``k`` and a resource budget.  An attack at
node ``u`` spreads to every node within distance ``k`` of ``u`` and causes
damage ``alpha_v`` at each reached node ``v`` whose defending power falls
short of ``theta_v``.  Before the attack the defender fixes an allocation of
the budget; after seeing the attacked node it may shift resources along
edges, where node ``u`` can send at most ``w_uv * r_u`` over edge ``(u, v)``
and at most ``r_u`` in total.

Everything in this module is immutable after construction and safe to share
across threads.
"""

from __future__ import annotations

import dataclasses
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence

FEAS_TOL = 1e-6
"""Slack allowed when validating budget, edge caps and outflow caps."""

DEF_TOL = 1e-6
"""A node counts as defended iff its power is >= theta - DEF_TOL."""


class ValidationError(ValueError):
    """An instance or strategy violates one of its invariants."""


@dataclass(frozen=True, eq=False)
class Instance:
    """A defense problem: graph, requirements, values, radius and budget.

    ``edges`` holds ``(u, v, w)`` triples.  In undirected mode each edge
    provides both ordered transfer slots ``u->v`` and ``v->u`` with the same
    weight, and the attack spreads both ways.  In directed mode transfers and
    spreading both follow the edge direction.
    """

    theta: tuple[float, ...]
    alpha: tuple[float, ...]
    edges: tuple[tuple[int, int, float], ...]
    directed: bool = False
    k: int = 1
    budget: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta", tuple(float(t) for t in self.theta))
        object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))
        object.__setattr__(
            self, "edges", tuple((int(u), int(v), float(w)) for u, v, w in self.edges)
        )
        n = len(self.theta)
        if len(self.alpha) != n:
            raise ValidationError("theta and alpha must have the same length")
        if not isinstance(self.k, int) or self.k < 0:
            raise ValidationError("contagion radius k must be a nonnegative integer")
        if not math.isfinite(self.budget) or self.budget < 0:
            raise ValidationError("budget must be a nonnegative real")
        for t in self.theta:
            if not math.isfinite(t) or t < 0:
                raise ValidationError("all thresholds must be nonnegative reals")
        for a in self.alpha:
            if not math.isfinite(a) or a < 0:
                raise ValidationError("all values must be nonnegative reals")
        seen: set[tuple[int, int]] = set()
        for u, v, w in self.edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValidationError(f"edge ({u}, {v}) references unknown node")
            if u == v:
                raise ValidationError(f"self-loop at node {u}")
            if not (0.0 <= w <= 1.0):
                raise ValidationError(f"edge ({u}, {v}) weight {w} outside [0, 1]")
            key = (u, v) if self.directed else (min(u, v), max(u, v))
            if key in seen:
                raise ValidationError(f"duplicate edge ({u}, {v})")
            seen.add(key)

    @classmethod
    def from_records(
        cls,
        nodes: Iterable[tuple[int, float, float]],
        edges: Iterable[tuple[int, int, float]],
        directed: bool = False,
        k: int = 1,
        budget: float = 0.0,
    ) -> "Instance":
        """Build from ``(id, theta, alpha)`` records with dense ids in [0, n)."""
        recs = sorted(nodes)
        ids = [r[0] for r in recs]
        if ids != list(range(len(recs))):
            raise ValidationError("node ids must be dense in [0, n)")
        theta = tuple(r[1] for r in recs)
        alpha = tuple(r[2] for r in recs)
        return cls(theta, alpha, tuple(edges), directed=directed, k=k, budget=budget)

    @property
    def n(self) -> int:
        return len(self.theta)

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def out_adj(self) -> tuple[tuple[tuple[int, float], ...], ...]:
        """Per node, sorted ``(neighbor, weight)`` pairs for outgoing slots."""
        adj: list[list[tuple[int, float]]] = [[] for _ in range(self.n)]
        for u, v, w in self.edges:
            adj[u].append((v, w))
            if not self.directed:
                adj[v].append((u, w))
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def in_adj(self) -> tuple[tuple[tuple[int, float], ...], ...]:
        """Per node, sorted ``(neighbor, weight)`` pairs for incoming slots."""
        if not self.directed:
            return self.out_adj
        adj: list[list[tuple[int, float]]] = [[] for _ in range(self.n)]
        for u, v, w in self.edges:
            adj[v].append((u, w))
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def slot_weight(self) -> Mapping[tuple[int, int], float]:
        """Weight of each ordered transfer slot ``(sender, receiver)``."""
        slots: dict[tuple[int, int], float] = {}
        for u, v, w in self.edges:
            slots[(u, v)] = w
            if not self.directed:
                slots[(v, u)] = w
        return slots

    def with_budget(self, budget: float) -> "Instance":
        return dataclasses.replace(self, budget=float(budget))

    def with_zero_weights(self) -> "Instance":
        """Copy with every edge weight set to 0 (transfers disabled)."""
        return dataclasses.replace(
            self, edges=tuple((u, v, 0.0) for u, v, _ in self.edges)
        )


@dataclass(frozen=True)
class AllocationStrategy:
    """Pre-attack assignment ``r`` of the budget across nodes."""

    r: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "r", tuple(float(v) for v in self.r))

    @property
    def total(self) -> float:
        return sum(self.r)


@dataclass(frozen=True)
class ReallocationStrategy:
    """Post-attack transfer plan for one attacked node.

    ``t`` maps ordered neighbor pairs ``(sender, receiver)`` to nonnegative
    transfer amounts; only existing transfer slots may appear.
    """

    attacked: int
    t: Mapping[tuple[int, int], float]

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "t",
            {(int(u), int(v)): float(a) for (u, v), a in dict(self.t).items()},
        )


@dataclass(frozen=True)
class DefendingStrategy:
    """A full defense: one allocation plus one reallocation per attack node."""

    allocation: AllocationStrategy
    reallocations: tuple[ReallocationStrategy, ...]


@dataclass(frozen=True)
class DefenseOutcome:
    """Loss per attacked node and the defending result (their maximum)."""

    loss: tuple[float, ...]
    defending_result: float


def null_strategy(inst: Instance, alloc: AllocationStrategy) -> DefendingStrategy:
    """Defense that never moves resources."""
    reallocs = tuple(ReallocationStrategy(u, {}) for u in range(inst.n))
    return DefendingStrategy(alloc, reallocs)


def loss_granularity(inst: Instance) -> float | None:
    """Spacing of attainable loss values, or None when none is known.

    Every attainable loss is a subset sum of node values, so integral values
    make every loss an integer.
    """
    if all(float(a).is_integer() for a in inst.alpha):
        return 1.0
    return None


def k_neighborhood(inst: Instance, u: int, k: int) -> set[int]:
    """Nodes within directed distance ``k`` of ``u`` (``k``-hop ball).

    Distance follows the spread direction: out-edges in directed mode, both
    ways otherwise.  ``k = 0`` gives ``{u}``.
    """
    if not (0 <= u < inst.n):
        raise ValueError(f"unknown node id {u}")
    if k < 0:
        raise ValueError("k must be nonnegative")
    reached = {u}
    frontier = deque([(u, 0)])
    while frontier:
        node, dist = frontier.popleft()
        if dist == k:
            continue
        for nbr, _ in inst.out_adj[node]:
            if nbr not in reached:
                reached.add(nbr)
                frontier.append((nbr, dist + 1))
    return reached


def _powers(
    inst: Instance, alloc: AllocationStrategy, realloc: ReallocationStrategy
) -> list[float]:
    p = list(alloc.r)
    for (u, v), amount in realloc.t.items():
        p[u] -= amount
        p[v] += amount
    return p


def defending_power(
    inst: Instance,
    alloc: AllocationStrategy,
    realloc: ReallocationStrategy,
    v: int,
) -> float:
    """Resource node ``v`` owns after the transfers: r_v - outbound + inbound."""
    if not (0 <= v < inst.n):
        raise ValueError(f"unknown node id {v}")
    return _powers(inst, alloc, realloc)[v]


def loss_of_attack(
    inst: Instance,
    alloc: AllocationStrategy,
    realloc: ReallocationStrategy,
    u: int,
) -> float:
    """Total damage when ``u`` is attacked and ``realloc`` is deployed.

    Sums ``alpha_v`` over reached nodes whose power stays below
    ``theta_v - DEF_TOL``.
    """
    if realloc.attacked != u:
        raise ValueError(
            f"reallocation targets attack at {realloc.attacked}, not {u}"
        )
    p = _powers(inst, alloc, realloc)
    return sum(
        inst.alpha[v]
        for v in k_neighborhood(inst, u, inst.k)
        if p[v] < inst.theta[v] - DEF_TOL
    )


def validate_allocation(inst: Instance, alloc: AllocationStrategy) -> None:
    if len(alloc.r) != inst.n:
        raise ValidationError(f"allocation covers {len(alloc.r)} of {inst.n} nodes")
    problems = [f"r_{u} = {r} is negative" for u, r in enumerate(alloc.r) if r < 0]
    if alloc.total > inst.budget + FEAS_TOL:
        problems.append(f"total allocation {alloc.total} exceeds budget {inst.budget}")
    if problems:
        raise ValidationError("; ".join(problems))


def validate_reallocation(
    inst: Instance, alloc: AllocationStrategy, realloc: ReallocationStrategy
) -> None:
    if not (0 <= realloc.attacked < inst.n):
        raise ValidationError(f"unknown attacked node {realloc.attacked}")
    problems: list[str] = []
    outflow = [0.0] * inst.n
    for (u, v), amount in realloc.t.items():
        w = inst.slot_weight.get((u, v))
        if w is None:
            problems.append(f"t({u},{v}) uses a nonexistent transfer slot")
            continue
        if amount < 0:
            problems.append(f"t({u},{v}) = {amount} is negative")
        cap = w * alloc.r[u]
        if amount > cap + FEAS_TOL:
            problems.append(f"t({u},{v}) = {amount} exceeds edge cap {cap}")
        outflow[u] += amount
    for u, total in enumerate(outflow):
        if total > alloc.r[u] + FEAS_TOL:
            problems.append(
                f"node {u} sends {total} but only owns {alloc.r[u]}"
            )
    if problems:
        raise ValidationError("; ".join(problems))


def validate_strategy(inst: Instance, strategy: DefendingStrategy) -> None:
    validate_allocation(inst, strategy.allocation)
    if len(strategy.reallocations) != inst.n:
        raise ValidationError(
            f"strategy holds {len(strategy.reallocations)} reallocations, "
            f"expected one per node ({inst.n})"
        )
    for u, realloc in enumerate(strategy.reallocations):
        if realloc.attacked != u:
            raise ValidationError(
                f"reallocation at position {u} targets node {realloc.attacked}"
            )
        validate_reallocation(inst, strategy.allocation, realloc)


def evaluate(inst: Instance, strategy: DefendingStrategy) -> DefenseOutcome:
    """Loss under every possible attack and the defending result (max loss)."""
    validate_strategy(inst, strategy)
    loss = tuple(
        loss_of_attack(inst, strategy.allocation, strategy.reallocations[u], u)
        for u in range(inst.n)
    )
    return DefenseOutcome(loss, max(loss) if loss else 0.0)


# ---------------------------------------------------------------------------
# Text serialization.  Instance files:
#
#     dca <directed|undirected> <n> <m> <k> <R>
#     node <id> <theta> <alpha>      (n lines)
#     edge <u> <v> <w>               (m lines)
#
# Strategy files: ``alloc <id> <r>`` lines, then per attack node a block
# ``realloc <attacked>`` followed by ``t <u> <v> <amount>`` lines.  '#'
# starts a comment.  Floats are written with repr() and therefore
# round-trip exactly.
# ---------------------------------------------------------------------------


def _content_lines(text: str) -> list[list[str]]:
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())
    return rows


def format_instance(inst: Instance) -> str:
    mode = "directed" if inst.directed else "undirected"
    lines = [f"dca {mode} {inst.n} {inst.m} {inst.k} {inst.budget!r}"]
    for u in range(inst.n):
        lines.append(f"node {u} {inst.theta[u]!r} {inst.alpha[u]!r}")
    for u, v, w in inst.edges:
        lines.append(f"edge {u} {v} {w!r}")
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> Instance:
    rows = _content_lines(text)
    if not rows or rows[0][0] != "dca":
        raise ValidationError("instance file must start with a 'dca' header line")
    header = rows[0]
    if len(header) != 6 or header[1] not in ("directed", "undirected"):
        raise ValidationError(f"malformed header: {' '.join(header)}")
    directed = header[1] == "directed"
    n, m = int(header[2]), int(header[3])
    k, budget = int(header[4]), float(header[5])
    nodes: list[tuple[int, float, float]] = []
    edges: list[tuple[int, int, float]] = []
    for row in rows[1:]:
        if row[0] == "node" and len(row) == 4:
            nodes.append((int(row[1]), float(row[2]), float(row[3])))
        elif row[0] == "edge" and len(row) == 4:
            edges.append((int(row[1]), int(row[2]), float(row[3])))
        else:
            raise ValidationError(f"unrecognized line: {' '.join(row)}")
    if len(nodes) != n:
        raise ValidationError(f"header promises {n} nodes, found {len(nodes)}")
    if len(edges) != m:
        raise ValidationError(f"header promises {m} edges, found {len(edges)}")
    return Instance.from_records(nodes, edges, directed=directed, k=k, budget=budget)


def format_strategy(strategy: DefendingStrategy) -> str:
    lines = []
    for u, r in enumerate(strategy.allocation.r):
        lines.append(f"alloc {u} {r!r}")
    for realloc in strategy.reallocations:
        lines.append(f"realloc {realloc.attacked}")
        for (u, v) in sorted(realloc.t):
            lines.append(f"t {u} {v} {realloc.t[(u, v)]!r}")
    return "\n".join(lines) + "\n"


def parse_strategy(text: str) -> DefendingStrategy:
    rows = _content_lines(text)
    r: dict[int, float] = {}
    blocks: dict[int, dict[tuple[int, int], float]] = {}
    current: dict[tuple[int, int], float] | None = None
    for row in rows:
        if row[0] == "alloc" and len(row) == 3:
            r[int(row[1])] = float(row[2])
        elif row[0] == "realloc" and len(row) == 2:
            attacked = int(row[1])
            if attacked in blocks:
                raise ValidationError(f"duplicate realloc block for node {attacked}")
            current = {}
            blocks[attacked] = current
        elif row[0] == "t" and len(row) == 4:
            if current is None:
                raise ValidationError("'t' line before any 'realloc' block")
            current[(int(row[1]), int(row[2]))] = float(row[3])
        else:
            raise ValidationError(f"unrecognized line: {' '.join(row)}")
    if sorted(r) != list(range(len(r))):
        raise ValidationError("alloc lines must cover dense node ids")
    n = len(r)
    if sorted(blocks) != list(range(n)):
        raise ValidationError("strategy needs exactly one realloc block per node")
    alloc = AllocationStrategy(tuple(r[u] for u in range(n)))
    reallocs = tuple(ReallocationStrategy(u, blocks[u]) for u in range(n))
    return DefendingStrategy(alloc, reallocs)


def parse_allocation(text: str) -> AllocationStrategy:
    """Read just the ``alloc`` lines of a strategy (or allocation) file."""
    r: dict[int, float] = {}
    for row in _content_lines(text):
        if row[0] == "alloc" and len(row) == 3:
            r[int(row[1])] = float(row[2])
        elif row[0] in ("realloc", "t"):
            break
        else:
            raise ValidationError(f"unrecognized line: {' '.join(row)}")
    if sorted(r) != list(range(len(r))):
        raise ValidationError("alloc lines must cover dense node ids")
    return AllocationStrategy(tuple(r[u] for u in range(len(r))))


def read_instance(path: str | Path) -> Instance:
    return parse_instance(Path(path).read_text())


def write_instance(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(format_instance(inst))


def read_strategy(path: str | Path) -> DefendingStrategy:
    return parse_strategy(Path(path).read_text())


def write_strategy(strategy: DefendingStrategy, path: str | Path) -> None:
    Path(path).write_text(format_strategy(strategy))
