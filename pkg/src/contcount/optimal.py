"""Exact optimal-welfare computation for every game at desk scale.

These values are the denominators of all competitive ratios, so each solver is
exact within its size budget and refuses (``SizeError``) beyond it rather than
silently approximating. Resource sharing reduces to a maximum-weight matching
between players and per-resource value copies; the other games are enumerated
exhaustively (with a bipartite closed form for cut games, whose optimum then
cuts every edge).

Every ``OptResult`` witness re-evaluates to the reported value exactly: the
solvers compute values through the same public evaluators the tests use.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import SizeError
from .games import (
    CostSharingInstance,
    CutInstance,
    ResourceSharingInstance,
    SchedulingInstance,
)

MATCHING_CELL_BUDGET = 8 * 10 ** 6
BRUTE_FORCE_BUDGET = 10 ** 7
COVER_BUDGET = 10 ** 6


@dataclass
class OptResult:
    value: float
    witness: object
    method: str


# ---------------------------------------------------------------------------
# assignment evaluators (shared by solvers, engines' checks, and tests)


def resource_assignment_value(inst: ResourceSharingInstance, assignment) -> float:
    """Welfare of a unit-demand assignment: each resource's first cnt copies."""
    counts = np.zeros(inst.m, dtype=int)
    for r in assignment:
        counts[r] += 1
    vals = [inst.curves[r].value_at(j) for r in range(inst.m) for j in range(counts[r])]
    return math.fsum(vals)


def future_assignment_value(inst: ResourceSharingInstance, assignment) -> float:
    """Future-dependent welfare: cnt_r players each worth the cnt_r-th copy value."""
    counts = np.zeros(inst.m, dtype=int)
    for r in assignment:
        counts[r] += 1
    vals = [inst.curves[r].value_at(counts[r] - 1)
            for r in range(inst.m) for _ in range(counts[r])]
    return math.fsum(vals)


def scheduling_makespan(inst: SchedulingInstance, assignment) -> float:
    loads = np.zeros(inst.m)
    for k, q in enumerate(assignment):
        loads[q] += inst.costs[k, q]
    return float(loads.max())


def cut_social_welfare(inst: CutInstance, colors) -> float:
    return 2.0 * sum(1 for u, v in inst.edges if colors[u] != colors[v])


def cost_sharing_total(inst: CostSharingInstance, chosen_sets) -> float:
    return math.fsum(inst.set_costs[s] for s in sorted(set(chosen_sets)))


# ---------------------------------------------------------------------------
# solvers


def opt_resource_sharing(inst: ResourceSharingInstance) -> OptResult:
    """Maximum-weight matching between players and n copies of each resource
    (copy k of resource r weighs v_r(k)), restricted to the action sets."""
    n, m = inst.n, inst.m
    if n * m * n > MATCHING_CELL_BUDGET:
        raise SizeError(f"matching with {n * m * n} cells exceeds the exact-mode budget")
    weights = np.empty((n, m * n))
    for r in range(m):
        for k in range(n):
            weights[:, r * n + k] = inst.curves[r].value_at(k)
    forbidden = -(1.0 + float(np.abs(weights).sum()))
    mask = np.full((n, m * n), True)
    for i, acts in enumerate(inst.action_sets):
        for r in acts:
            mask[i, r * n:(r + 1) * n] = False
    weights[mask] = forbidden
    rows, cols = linear_sum_assignment(weights, maximize=True)
    assignment = [0] * n
    for i, col in zip(rows, cols):
        # an all-allowed perfect matching always exists (n copies per resource),
        # so the maximizer never takes a forbidden cell
        assert not mask[i, col], "assignment solver took a forbidden edge"
        assignment[i] = int(col // n)
    return OptResult(resource_assignment_value(inst, assignment), assignment, "matching")


def opt_scheduling(inst: SchedulingInstance, budget: int = BRUTE_FORCE_BUDGET) -> OptResult:
    """Exact minimum makespan by exhaustive assignment (m^n states)."""
    n, m = inst.n, inst.m
    if m ** n > budget:
        raise SizeError(
            f"{m}^{n} assignments exceed the brute-force budget; "
            "use scheduling_lower_bound for large instances")
    best, best_assign = math.inf, None
    for assign in itertools.product(range(m), repeat=n):
        span = scheduling_makespan(inst, assign)
        if span < best:
            best, best_assign = span, list(assign)
    return OptResult(best, best_assign, "brute-force")


def scheduling_lower_bound(inst: SchedulingInstance) -> float:
    """sum_k t*_k / m, a valid lower bound on the optimal makespan."""
    return float(inst.t_star.sum()) / inst.m


def _two_coloring(inst: CutInstance):
    """BFS 2-coloring; None if the graph is not bipartite."""
    colors = [-1] * inst.n
    for root in range(inst.n):
        if colors[root] >= 0:
            continue
        colors[root] = 0
        queue = [root]
        while queue:
            u = queue.pop()
            for v in inst.neighbors(u):
                if colors[v] < 0:
                    colors[v] = 1 - colors[u]
                    queue.append(v)
                elif colors[v] == colors[u]:
                    return None
    return colors


def opt_cut(inst: CutInstance, budget: int = BRUTE_FORCE_BUDGET) -> OptResult:
    """Exact maximum of 2 * cut size. Bipartite graphs (cycles of even length,
    complete bipartite, ...) use the closed form 2|E| with the 2-coloring as
    witness; everything else is enumerated over colorings."""
    coloring = _two_coloring(inst)
    if coloring is not None:
        return OptResult(2.0 * len(inst.edges), coloring, "closed-form")
    if 2 ** max(inst.n - 1, 0) > budget:
        raise SizeError(f"2^{inst.n} colorings exceed the brute-force budget")
    best, best_colors = -1.0, None
    for bits in range(2 ** max(inst.n - 1, 0)):
        colors = [0] + [(bits >> i) & 1 for i in range(inst.n - 1)]
        sw = cut_social_welfare(inst, colors)
        if sw > best:
            best, best_colors = sw, colors
    return OptResult(best, best_colors, "brute-force")


def opt_cost_sharing(inst: CostSharingInstance, budget: int = COVER_BUDGET) -> OptResult:
    """Exact minimum total cost over set families covering all players; each
    player is then assigned her cheapest allowed chosen set."""
    n, m = inst.n, inst.m
    if 2 ** m > budget:
        raise SizeError(f"2^{m} set families exceed the brute-force budget")
    player_masks = [sum(1 << s for s in acts) for acts in inst.allowed]
    best, best_family = math.inf, None
    for family in range(1, 2 ** m):
        if any(mask & family == 0 for mask in player_masks):
            continue
        cost = math.fsum(inst.set_costs[s] for s in range(m) if family >> s & 1)
        if cost < best:
            best, best_family = cost, family
    sets = [s for s in range(m) if best_family >> s & 1]
    assignment = []
    for acts in inst.allowed:
        options = [s for s in acts if s in sets]
        assignment.append(min(options, key=lambda s: (inst.set_costs[s], s)))
    # drop sets nobody uses; covering families never need them
    used = sorted(set(assignment))
    return OptResult(cost_sharing_total(inst, assignment), (used, assignment), "brute-force")


def opt_future_dependent(inst: ResourceSharingInstance,
                         budget: int = BRUTE_FORCE_BUDGET) -> OptResult:
    """Exact maximum future-dependent welfare over all restricted assignments."""
    states = 1
    for acts in inst.action_sets:
        states *= len(acts)
        if states > budget:
            raise SizeError("future-dependent assignment space exceeds the brute-force budget")
    best, best_assign = -math.inf, None
    for assign in itertools.product(*inst.action_sets):
        value = future_assignment_value(inst, assign)
        if value > best:
            best, best_assign = value, list(assign)
    return OptResult(best, best_assign, "brute-force")


__all__ = [
    "OptResult",
    "resource_assignment_value",
    "future_assignment_value",
    "scheduling_makespan",
    "cut_social_welfare",
    "cost_sharing_total",
    "opt_resource_sharing",
    "opt_scheduling",
    "scheduling_lower_bound",
    "opt_cut",
    "opt_cost_sharing",
    "opt_future_dependent",
    "BRUTE_FORCE_BUDGET",
]
