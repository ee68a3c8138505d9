"""Self-contained LP and binary-MIP engine.

The linear-programming core is a bounded-variable primal simplex run in two
phases.  Phase 1 starts from the slack basis, adds one artificial column per
violated row, and minimizes the total artificial value; a strictly positive
phase-1 optimum certifies infeasibility.  Phase 2 optimizes the real
objective.  Nonbasic variables rest at either bound, so variable bounds never
become explicit rows.

Numerical choices, all dense because target problems stay at desk scale
(a few thousand variables at most):

* explicit basis inverse, updated by elementary row operations each pivot
  and rebuilt from scratch every ``REFACTOR_EVERY`` pivots;
* Dantzig pricing with a permanent switch to Bland's rule after
  ``10 * (rows + cols)`` consecutive degenerate pivots, which guarantees
  termination without perturbation;
* among ratio-test ties the row with the largest pivot magnitude wins.

Binary variables are handled by best-bound branch and bound: nodes are kept
in a heap keyed by their parent relaxation objective (depth-first
tie-break), branching picks the most fractional binary.  Exceeding the node
limit returns the incumbent with an explicit bound gap instead of a silent
wrong answer.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

FEAS_TOL = 1e-6
INT_TOL = 1e-6
REFACTOR_EVERY = 100
_COST_TOL = 1e-9
_PIVOT_TOL = 1e-9
_STEP_TOL = 1e-9

LESS, GREATER, EQUAL = "<=", ">=", "="
_RELATIONS = (LESS, GREATER, EQUAL)

# nonbasic rest states
_AT_LOWER, _AT_UPPER, _FREE, _BASIC = 0, 1, 2, 3


class Status(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITER_LIMIT = "iter_limit"


class NumericalError(ArithmeticError):
    """The solver could not certify its answer numerically."""


class SolverLimitError(RuntimeError):
    """A search budget ran out; carries the partial result and its gap."""

    def __init__(self, result: "SolveResult"):
        gap = result.gap if result.gap is not None else math.inf
        super().__init__(f"solver limit reached, bound gap {gap}")
        self.result = result


@dataclass
class Variable:
    name: str
    lower: float
    upper: float
    binary: bool = False


@dataclass
class Constraint:
    coeffs: dict[int, float]
    relation: str
    rhs: float
    name: str


@dataclass
class SolveResult:
    """Outcome of a solve.

    ``objective`` is +inf for infeasible and -inf for unbounded problems.
    For MIP solves ``gap`` is the absolute distance between the incumbent and
    the best remaining bound (0.0 once optimality is proven).
    """

    status: Status
    objective: float
    x: np.ndarray | None
    gap: float | None = None
    pivots: int = 0
    nodes: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL

    def value(self, index: int) -> float:
        if self.x is None:
            raise ValueError(f"no solution available ({self.status.value})")
        return float(self.x[index])


@dataclass
class _Std:
    """Equality-form arrays: columns are [structural | one slack per row]."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    nstruct: int


class LinearProgram:
    """Minimization program over bounded variables with sparse rows."""

    def __init__(self) -> None:
        self.variables: list[Variable] = []
        self.constraints: list[Constraint] = []
        self.objective: dict[int, float] = {}
        self.objective_constant: float = 0.0
        self._names: dict[str, int] = {}
        self._std: _Std | None = None

    # -- construction ------------------------------------------------------

    def add_variable(
        self,
        name: str | None = None,
        lower: float = 0.0,
        upper: float = math.inf,
        binary: bool = False,
    ) -> int:
        index = len(self.variables)
        if name is None:
            name = f"v{index}"
        if name in self._names:
            raise ValueError(f"duplicate variable name {name!r}")
        if math.isnan(lower) or math.isnan(upper) or lower > upper:
            raise ValueError(f"invalid bounds [{lower}, {upper}] for {name!r}")
        if binary and not (0.0 <= lower and upper <= 1.0):
            raise ValueError(f"binary variable {name!r} needs bounds within [0, 1]")
        self.variables.append(Variable(name, float(lower), float(upper), binary))
        self._names[name] = index
        self._std = None
        return index

    def add_constraint(
        self,
        coeffs: Mapping[int, float],
        relation: str,
        rhs: float,
        name: str | None = None,
    ) -> int:
        if relation not in _RELATIONS:
            raise ValueError(f"relation must be one of {_RELATIONS}, got {relation!r}")
        if not math.isfinite(rhs):
            raise ValueError("right-hand side must be finite")
        clean: dict[int, float] = {}
        for j, coef in coeffs.items():
            if not (0 <= j < len(self.variables)):
                raise ValueError(f"constraint references unknown variable {j}")
            if not math.isfinite(coef):
                raise ValueError("constraint coefficients must be finite")
            if coef != 0.0:
                clean[int(j)] = float(coef)
        index = len(self.constraints)
        self.constraints.append(
            Constraint(clean, relation, float(rhs), name or f"c{index}")
        )
        self._std = None
        return index

    def set_objective(self, coeffs: Mapping[int, float], constant: float = 0.0) -> None:
        for j, coef in coeffs.items():
            if not (0 <= j < len(self.variables)):
                raise ValueError(f"objective references unknown variable {j}")
            if not math.isfinite(coef):
                raise ValueError("objective coefficients must be finite")
        self.objective = {int(j): float(c) for j, c in coeffs.items() if c != 0.0}
        self.objective_constant = float(constant)
        self._std = None

    # -- introspection -----------------------------------------------------

    @property
    def num_variables(self) -> int:
        return len(self.variables)

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)

    def index_of(self, name: str) -> int:
        return self._names[name]

    def has_variable(self, name: str) -> bool:
        return name in self._names

    def binary_indices(self) -> list[int]:
        return [j for j, v in enumerate(self.variables) if v.binary]

    # -- standardization ---------------------------------------------------

    def _standardized(self) -> _Std:
        if self._std is not None:
            return self._std
        n, m = len(self.variables), len(self.constraints)
        A = np.zeros((m, n + m))
        b = np.empty(m)
        lo = np.empty(n + m)
        hi = np.empty(n + m)
        c = np.zeros(n + m)
        for j, var in enumerate(self.variables):
            lo[j], hi[j] = var.lower, var.upper
        for j, coef in self.objective.items():
            c[j] = coef
        for i, row in enumerate(self.constraints):
            for j, coef in row.coeffs.items():
                A[i, j] = coef
            A[i, n + i] = 1.0
            b[i] = row.rhs
            if row.relation == LESS:
                lo[n + i], hi[n + i] = 0.0, math.inf
            elif row.relation == GREATER:
                lo[n + i], hi[n + i] = -math.inf, 0.0
            else:
                lo[n + i], hi[n + i] = 0.0, 0.0
        self._std = _Std(A, b, c, lo, hi, n)
        return self._std


class _Simplex:
    """One solve's private workspace over the standardized arrays."""

    def __init__(
        self,
        std: _Std,
        lo: np.ndarray,
        hi: np.ndarray,
        max_pivots: int,
    ) -> None:
        self.b = std.b
        self.m = std.A.shape[0]
        self.nreal = std.A.shape[1]
        self.max_pivots = max_pivots
        self.pivots = 0
        self.degen_run = 0
        self.bland = False

        # start every variable at its finite bound nearest zero
        x = np.where(np.isfinite(lo), lo, np.where(np.isfinite(hi), hi, 0.0))
        pos = np.where(
            np.isfinite(lo), _AT_LOWER, np.where(np.isfinite(hi), _AT_UPPER, _FREE)
        )
        resid = self.b - std.A @ x

        basis = np.empty(self.m, dtype=int)
        art_rows = []
        for i in range(self.m):
            s = std.nstruct + i
            if lo[s] - FEAS_TOL <= resid[i] <= hi[s] + FEAS_TOL:
                basis[i] = s
                x[s] = resid[i]
            else:
                art_rows.append(i)

        nart = len(art_rows)
        if nart:
            # slack bounds always contain 0, so a violated row leaves its
            # slack at 0 and the artificial absorbs the whole residual
            art = np.zeros((self.m, nart))
            for col, i in enumerate(art_rows):
                art[i, col] = 1.0 if resid[i] >= 0 else -1.0
                basis[i] = self.nreal + col
            self.A = np.hstack([std.A, art])
            self.lo = np.concatenate([lo, np.zeros(nart)])
            self.hi = np.concatenate([hi, np.full(nart, math.inf)])
            x = np.concatenate([x, np.abs(resid[art_rows])])
            pos = np.concatenate([pos, np.full(nart, _AT_LOWER)])
        else:
            self.A = std.A
            self.lo = lo
            self.hi = hi

        self.ncols = self.A.shape[1]
        self.x = x.astype(float)
        self.pos = pos.astype(int)
        self.basis = basis
        self.pos[basis] = _BASIC
        self.fixed = self.lo == self.hi
        self.degen_limit = 10 * (self.m + self.ncols)
        self._trow = np.empty(self.m)
        # the starting basis is one slack or artificial per row, i.e. a
        # +-1 diagonal matrix, so its inverse needs no factorization
        signs = np.array([self.A[i, self.basis[i]] for i in range(self.m)])
        self.B_inv = np.diag(signs)
        self.since_refactor = 0
        self._recompute_xb()

    # -- basis maintenance ---------------------------------------------------

    def _refactor(self) -> None:
        try:
            self.B_inv = np.linalg.inv(self.A[:, self.basis])
        except np.linalg.LinAlgError as exc:  # pragma: no cover - defensive
            raise NumericalError("singular basis") from exc
        self.since_refactor = 0
        self._recompute_xb()

    def _recompute_xb(self) -> None:
        xn = self.x.copy()
        xn[self.basis] = 0.0
        self.xB = self.B_inv @ (self.b - self.A @ xn)

    def _sync(self) -> None:
        self.x[self.basis] = self.xB

    # -- core loop -----------------------------------------------------------

    def optimize(self, c: np.ndarray) -> Status:
        """Run the simplex for cost vector ``c`` from the current basis."""
        m = self.m
        lo, hi, pos, A = self.lo, self.hi, self.pos, self.A
        lo_b = lo[self.basis].copy()
        hi_b = hi[self.basis].copy()
        cB = c[self.basis].copy()
        entermask = np.where(self.fixed, 0.0, 1.0)
        while True:
            if self.pivots >= self.max_pivots:
                self._sync()
                return Status.ITER_LIMIT
            y = cB @ self.B_inv
            d = c - y @ A
            # improvement available in the feasible direction of each state
            viol = np.where(pos == _AT_LOWER, -d, np.where(pos == _AT_UPPER, d, np.abs(d)))
            viol *= entermask
            viol[self.basis] = 0.0
            if self.bland:
                eligible = viol > _COST_TOL
                if not eligible.any():
                    self._sync()
                    return Status.OPTIMAL
                j = int(np.argmax(eligible))
            else:
                j = int(np.argmax(viol))
                if viol[j] <= _COST_TOL:
                    self._sync()
                    return Status.OPTIMAL

            sigma = 1.0 if (pos[j] == _AT_LOWER or d[j] < 0) else -1.0
            w = self.B_inv @ A[:, j]
            delta = sigma * w

            t_row = self._trow
            t_row.fill(math.inf)
            down = delta > _PIVOT_TOL
            up = delta < -_PIVOT_TOL
            if down.any():
                t_row[down] = (self.xB[down] - lo_b[down]) / delta[down]
            if up.any():
                t_row[up] = (hi_b[up] - self.xB[up]) / (-delta[up])

            t_bound = hi[j] - lo[j]  # inf for free or one-sided vars
            t_min_row = max(float(t_row.min()), 0.0) if m else math.inf
            step = min(t_min_row, t_bound)
            if not math.isfinite(step):
                self._sync()
                return Status.UNBOUNDED

            if t_bound <= t_min_row + 1e-12:
                # entering variable runs to its opposite bound, basis unchanged
                self.xB -= t_bound * delta
                self.x[j] = hi[j] if sigma > 0 else lo[j]
                pos[j] = _AT_UPPER if sigma > 0 else _AT_LOWER
                self._account(t_bound)
                continue

            ties = np.flatnonzero(t_row <= step + 1e-12)
            if self.bland:
                r = int(ties[np.argmin(self.basis[ties])])
            else:
                r = int(ties[np.argmax(np.abs(delta[ties]))])

            if abs(w[r]) < _PIVOT_TOL:  # pragma: no cover - defensive
                raise NumericalError("vanishing pivot element")

            entering_value = self.x[j] + sigma * step
            leaving = self.basis[r]
            self.x[leaving] = lo[leaving] if delta[r] > 0 else hi[leaving]
            pos[leaving] = _AT_LOWER if delta[r] > 0 else _AT_UPPER
            self.xB -= step * delta
            self.xB[r] = entering_value
            self.basis[r] = j
            pos[j] = _BASIC
            lo_b[r], hi_b[r], cB[r] = lo[j], hi[j], c[j]

            pivot_row = self.B_inv[r] / w[r]
            self.B_inv -= w[:, None] * pivot_row
            self.B_inv[r] = pivot_row

            self._account(step)
            self.since_refactor += 1
            if self.since_refactor >= REFACTOR_EVERY:
                self._sync()
                self._refactor()

    def _account(self, step: float) -> None:
        self.pivots += 1
        if step <= _STEP_TOL:
            self.degen_run += 1
            if self.degen_run > self.degen_limit:
                self.bland = True
        else:
            self.degen_run = 0

    # -- phase handling --------------------------------------------------------

    def run(self, c_real: np.ndarray, phase1_only: bool = False) -> Status:
        nart = self.ncols - self.nreal
        if nart:
            c1 = np.zeros(self.ncols)
            c1[self.nreal :] = 1.0
            status = self.optimize(c1)
            if status is not Status.OPTIMAL:
                if status is Status.UNBOUNDED:  # pragma: no cover - impossible
                    raise NumericalError("phase 1 reported unbounded")
                return status
            self._sync()
            if float(self.x[self.nreal :].sum()) > FEAS_TOL:
                return Status.INFEASIBLE
            self._drive_out_artificials()
            # pin artificials at zero for the remaining work
            self.lo[self.nreal :] = 0.0
            self.hi[self.nreal :] = 0.0
            self.fixed[self.nreal :] = True
            self.x[self.nreal :] = np.clip(self.x[self.nreal :], 0.0, None)
        if phase1_only:
            self._finalize()
            return Status.OPTIMAL
        c = np.zeros(self.ncols)
        c[: len(c_real)] = c_real
        status = self.optimize(c)
        if status is Status.OPTIMAL:
            self._finalize()
        return status

    def _drive_out_artificials(self) -> None:
        for r in range(self.m):
            if self.basis[r] < self.nreal:
                continue
            row = self.B_inv[r] @ self.A[:, : self.nreal]
            candidates = np.flatnonzero(
                (np.abs(row) > 1e-7)
                & (self.pos[: self.nreal] != _BASIC)
                & ~self.fixed[: self.nreal]
            )
            if candidates.size == 0:
                continue  # redundant row, artificial stays basic pinned at 0
            j = int(candidates[np.argmax(np.abs(row[candidates]))])
            w = self.B_inv @ self.A[:, j]
            leaving = self.basis[r]
            self.x[leaving] = 0.0
            self.pos[leaving] = _AT_LOWER
            self.basis[r] = j
            self.xB[r] = self.x[j]
            self.pos[j] = _BASIC
            pivot_row = self.B_inv[r] / w[r]
            self.B_inv -= np.outer(w, pivot_row)
            self.B_inv[r] = pivot_row

    def _finalize(self) -> None:
        # a fresh residual solve against the maintained inverse is enough;
        # callers re-verify the point against the original rows
        self._recompute_xb()
        self._sync()

    def solution(self) -> np.ndarray:
        return self.x[: self.nreal]

    def reduced_costs(self, c_real: np.ndarray) -> np.ndarray:
        """Final reduced costs of the real columns for cost vector ``c_real``."""
        c = np.zeros(self.ncols)
        c[: len(c_real)] = c_real
        d = c - (c[self.basis] @ self.B_inv) @ self.A
        return d[: self.nreal]


def _solve_arrays(
    std: _Std,
    lo: np.ndarray,
    hi: np.ndarray,
    max_pivots: int,
    phase1_only: bool = False,
    want_costs: bool = False,
) -> tuple[Status, np.ndarray | None, int, np.ndarray | None]:
    sx = _Simplex(std, lo, hi, max_pivots)
    status = sx.run(std.c, phase1_only=phase1_only)
    x = sx.solution() if status in (Status.OPTIMAL, Status.ITER_LIMIT) else None
    costs = (
        sx.reduced_costs(std.c)
        if want_costs and status is Status.OPTIMAL
        else None
    )
    return status, x, sx.pivots, costs


def _verify(lp: LinearProgram, x: np.ndarray) -> None:
    for row in lp.constraints:
        activity = sum(coef * x[j] for j, coef in row.coeffs.items())
        slack = FEAS_TOL * (1.0 + abs(row.rhs))
        ok = (
            activity <= row.rhs + slack
            if row.relation == LESS
            else activity >= row.rhs - slack
            if row.relation == GREATER
            else abs(activity - row.rhs) <= slack
        )
        if not ok:
            raise NumericalError(
                f"constraint {row.name} violated: activity {activity} vs "
                f"{row.relation} {row.rhs}"
            )


def _objective_at(lp: LinearProgram, x: np.ndarray) -> float:
    return sum(coef * float(x[j]) for j, coef in lp.objective.items()) + (
        lp.objective_constant
    )


def solve_lp(lp: LinearProgram, max_pivots: int = 10**6) -> SolveResult:
    """Solve the continuous relaxation (binary flags read as [0, 1] bounds)."""
    std = lp._standardized()
    status, x, pivots = _solve_arrays(std, std.lo.copy(), std.hi.copy(), max_pivots)
    if status is Status.OPTIMAL:
        xs = np.array(x[: lp.num_variables])
        _verify(lp, xs)
        return SolveResult(status, _objective_at(lp, xs), xs, pivots=pivots)
    if status is Status.INFEASIBLE:
        return SolveResult(status, math.inf, None, pivots=pivots)
    if status is Status.UNBOUNDED:
        return SolveResult(status, -math.inf, None, pivots=pivots)
    return SolveResult(status, math.nan, None, pivots=pivots)


def check_feasibility(
    lp: LinearProgram, fixed: Mapping[int, float], max_pivots: int = 10**6
) -> SolveResult:
    """Fix every binary variable as given and look for any feasible point.

    Runs phase 1 only.  ``fixed`` must assign a 0/1 value to each binary
    variable; continuous variables stay free within their bounds.
    """
    binaries = set(lp.binary_indices())
    missing = binaries.difference(fixed)
    if missing:
        raise ValueError(f"assignment misses binary variables {sorted(missing)}")
    extra = set(fixed).difference(binaries)
    if extra:
        raise ValueError(f"assignment fixes non-binary variables {sorted(extra)}")
    std = lp._standardized()
    lo, hi = std.lo.copy(), std.hi.copy()
    for j, value in fixed.items():
        v = float(value)
        if abs(v - round(v)) > INT_TOL or not (0.0 <= v <= 1.0):
            raise ValueError(f"binary variable {j} fixed to non-binary value {value}")
        lo[j] = hi[j] = round(v)
    status, x, pivots = _solve_arrays(std, lo, hi, max_pivots, phase1_only=True)
    if status is Status.OPTIMAL:
        xs = np.array(x[: lp.num_variables])
        _verify(lp, xs)
        return SolveResult(status, _objective_at(lp, xs), xs, pivots=pivots)
    if status is Status.INFEASIBLE:
        return SolveResult(status, math.inf, None, pivots=pivots)
    return SolveResult(status, math.nan, None, pivots=pivots)


def solve_mip(
    lp: LinearProgram,
    max_nodes: int = 10**6,
    max_pivots: int = 10**6,
    incumbent: tuple[float, Sequence[float]] | None = None,
    objective_granularity: float | None = None,
) -> SolveResult:
    """Globally minimize over the binary variables by branch and bound.

    ``incumbent`` may supply a known feasible point as ``(objective, x)``;
    it seeds the bound pruning and is returned if nothing beats it.

    ``objective_granularity`` asserts that the optimal objective of every
    subproblem is an integer multiple of the given value, allowing
    relaxation bounds to be rounded up to the next multiple before pruning.
    Passing it for a program without that property is unsound.
    """
    binaries = lp.binary_indices()
    if not binaries:
        result = solve_lp(lp, max_pivots=max_pivots)
        if result.optimal:
            result.gap = 0.0
        return result

    std = lp._standardized()
    nvars = lp.num_variables
    grain = objective_granularity

    def sharpen(bound: float) -> float:
        if grain is None or not math.isfinite(bound):
            return bound
        return math.ceil(bound / grain - 1e-9) * grain

    def relax(fixes: dict[int, int]) -> tuple[Status, float, np.ndarray | None]:
        lo, hi = std.lo.copy(), std.hi.copy()
        for j, v in fixes.items():
            lo[j] = hi[j] = float(v)
        status, x, _ = _solve_arrays(std, lo, hi, max_pivots)
        if status is not Status.OPTIMAL:
            return status, math.inf, None
        xs = np.array(x[:nvars])
        return status, _objective_at(lp, xs), xs

    best_obj = math.inf
    best_x: np.ndarray | None = None
    if incumbent is not None:
        best_obj = float(incumbent[0])
        best_x = np.asarray(incumbent[1], dtype=float)
        if best_x.shape != (nvars,):
            raise ValueError("incumbent point has the wrong dimension")
    nodes = 0
    counter = itertools.count()
    heap: list[tuple[float, int, int, dict[int, int]]] = [
        (-math.inf, 0, next(counter), {})
    ]

    def limit_result() -> SolveResult:
        remaining = min((entry[0] for entry in heap), default=best_obj)
        bound = min(remaining, best_obj)
        gap = best_obj - bound if best_x is not None else math.inf
        return SolveResult(
            Status.ITER_LIMIT, best_obj, best_x, gap=max(gap, 0.0), nodes=nodes
        )

    while heap:
        bound, negdepth, _, fixes = heapq.heappop(heap)
        if sharpen(bound) >= best_obj - 1e-9:
            break  # best-bound order: nothing left can improve
        if nodes >= max_nodes:
            return limit_result()
        nodes += 1
        status, obj, x = relax(fixes)
        if status is Status.ITER_LIMIT:
            return limit_result()
        if status is Status.INFEASIBLE:
            continue
        depth = -negdepth + 1
        if status is Status.UNBOUNDED:
            # no bound from this relaxation; the continuous ray only proves
            # the MIP unbounded once some integer completion is feasible
            unfixed = [j for j in binaries if j not in fixes]
            if not unfixed:
                return SolveResult(Status.UNBOUNDED, -math.inf, None, nodes=nodes)
            for value in (1, 0):
                child = dict(fixes)
                child[unfixed[0]] = value
                heapq.heappush(heap, (-math.inf, -depth, next(counter), child))
            continue
        if sharpen(obj) >= best_obj - 1e-9:
            continue
        fractional = [j for j in binaries if abs(x[j] - round(x[j])) > INT_TOL]
        if not fractional:
            best_obj, best_x = obj, x
            continue
        branch = min(fractional, key=lambda j: (abs(x[j] - 0.5), j))
        for value in (1, 0):
            child = dict(fixes)
            child[branch] = value
            heapq.heappush(heap, (obj, -depth, next(counter), child))

    if best_x is None:
        return SolveResult(Status.INFEASIBLE, math.inf, None, nodes=nodes)
    return SolveResult(Status.OPTIMAL, best_obj, best_x, gap=0.0, nodes=nodes)


def export_lp(lp: LinearProgram) -> str:
    """Render the program in the industry LP text format (export only).

    The objective constant is not representable in the format and is noted
    as a comment line.
    """

    def term(coef: float, name: str, first: bool) -> str:
        if first:
            sign = "-" if coef < 0 else ""
            return f" {sign}{abs(coef)!r} {name}"
        sign = "-" if coef < 0 else "+"
        return f" {sign} {abs(coef)!r} {name}"

    lines = ["\\ exported linear program"]
    if lp.objective_constant:
        lines.append(f"\\ objective constant: {lp.objective_constant!r}")
    lines.append("Minimize")
    if lp.objective:
        parts = []
        for pos, (j, coef) in enumerate(sorted(lp.objective.items())):
            parts.append(term(coef, lp.variables[j].name, pos == 0))
        lines.append(" obj:" + "".join(parts))
    else:
        lines.append(f" obj: 0 {lp.variables[0].name}" if lp.variables else " obj:")
    lines.append("Subject To")
    for row in lp.constraints:
        parts = []
        for pos, (j, coef) in enumerate(sorted(row.coeffs.items())):
            parts.append(term(coef, lp.variables[j].name, pos == 0))
        rel = row.relation if row.relation != EQUAL else "="
        lines.append(f" {row.name}:" + "".join(parts) + f" {rel} {row.rhs!r}")
    lines.append("Bounds")
    for var in lp.variables:
        lo, hi = var.lower, var.upper
        if lo == 0.0 and hi == math.inf:
            continue
        if lo == -math.inf and hi == math.inf:
            lines.append(f" {var.name} free")
        elif hi == math.inf:
            lines.append(f" {var.name} >= {lo!r}")
        elif lo == -math.inf:
            lines.append(f" {var.name} <= {hi!r}")
        else:
            lines.append(f" {lo!r} <= {var.name} <= {hi!r}")
    binaries = lp.binary_indices()
    if binaries:
        lines.append("Binary")
        for j in binaries:
            lines.append(f" {lp.variables[j].name}")
    lines.append("End")
    return "\n".join(lines) + "\n"
