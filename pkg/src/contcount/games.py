"""Sequential game definitions and play engines.

One engine per game class steps players in arrival order, shows each player
the current release of a counter mechanism, applies a strategy, feeds the
chosen action back into the counter, and records a :class:`PlayTrace` with
realized utilities (from true counts) and perceived utilities (from displayed
counts).

Conventions shared by all engines:

* Displayed counts are real-valued; value-curve lookups floor them and clamp
  into the curve's index range (``ValueCurve.value_at``).
* Greedy ties break toward the lowest resource/machine/set/color index, so
  runs are deterministic.
* Realized social welfare is the sum of realized utilities (``math.fsum``, so
  bookkeeping identities hold exactly); perceived social welfare is the same
  sum over perceived utilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .counters import CounterMechanism
from .errors import ParameterError, ValidationError

_MONOTONE_TOL = 1e-12


class ValueCurve:
    """Nonincreasing, nonnegative resource values; entry k is the value to the
    (k+1)-st chooser. Lookups beyond the last entry extend by the last value."""

    def __init__(self, values):
        vals = np.asarray(values, dtype=float)
        if vals.ndim != 1 or vals.size == 0:
            raise ParameterError("value curve needs at least one entry")
        if np.any(vals < 0):
            raise ParameterError("value curve entries must be nonnegative")
        if np.any(np.diff(vals) > _MONOTONE_TOL):
            raise ParameterError("value curve must be nonincreasing")
        self.values = vals

    def __len__(self) -> int:
        return int(self.values.size)

    def value_at(self, k) -> float:
        """Value at (possibly fractional, possibly out-of-range) count k."""
        idx = int(math.floor(max(0.0, float(k))))
        if idx >= self.values.size:
            idx = self.values.size - 1
        return float(self.values[idx])

    def __repr__(self) -> str:
        head = ", ".join(f"{v:.4g}" for v in self.values[:4])
        tail = ", ..." if len(self) > 4 else ""
        return f"ValueCurve([{head}{tail}])"


@dataclass
class ResourceSharingInstance:
    """Unit-demand resource sharing: player i picks one resource from action_sets[i]."""

    curves: list
    action_sets: list

    def __post_init__(self):
        if not self.action_sets:
            raise ParameterError("need at least one player")
        for i, acts in enumerate(self.action_sets):
            if not acts:
                raise ParameterError(f"player {i} has an empty action set")
            for r in acts:
                if not 0 <= r < len(self.curves):
                    raise ParameterError(f"player {i} references unknown resource {r}")

    @property
    def n(self) -> int:
        return len(self.action_sets)

    @property
    def m(self) -> int:
        return len(self.curves)


@dataclass
class CutInstance:
    """Simple undirected graph; players are nodes, colors are red=0 / blue=1."""

    n_nodes: int
    edges: list

    def __post_init__(self):
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise ParameterError(f"self-loop at node {u}")
            if not (0 <= u < self.n_nodes and 0 <= v < self.n_nodes):
                raise ParameterError(f"edge ({u}, {v}) out of range")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ParameterError(f"duplicate edge {key}")
            seen.add(key)
        self.edges = sorted(seen)
        self._neighbors = [[] for _ in range(self.n_nodes)]
        for u, v in self.edges:
            self._neighbors[u].append(v)
            self._neighbors[v].append(u)

    def neighbors(self, u: int) -> list:
        return self._neighbors[u]

    @property
    def n(self) -> int:
        return self.n_nodes

    @property
    def max_degree(self) -> int:
        return max((len(nb) for nb in self._neighbors), default=0)


@dataclass
class SchedulingInstance:
    """Unrelated machine scheduling: costs[k, q] is job k's size on machine q."""

    costs: np.ndarray

    def __post_init__(self):
        self.costs = np.asarray(self.costs, dtype=float)
        if self.costs.ndim != 2 or self.costs.size == 0:
            raise ParameterError("cost matrix must be 2-D and nonempty")
        if np.any(self.costs < 0):
            raise ParameterError("job sizes must be nonnegative")

    @property
    def n(self) -> int:
        return self.costs.shape[0]

    @property
    def m(self) -> int:
        return self.costs.shape[1]

    @property
    def t_star(self) -> np.ndarray:
        """Per-job minimum size over machines."""
        return self.costs.min(axis=1)

    @property
    def q_star(self) -> np.ndarray:
        """Machine achieving each job's minimum size."""
        return self.costs.argmin(axis=1)


@dataclass
class CostSharingInstance:
    """Set costs shared equally among the players who pick each set."""

    set_costs: np.ndarray
    allowed: list

    def __post_init__(self):
        self.set_costs = np.asarray(self.set_costs, dtype=float)
        if np.any(self.set_costs <= 0):
            raise ParameterError("set costs must be positive")
        for i, sets in enumerate(self.allowed):
            if not sets:
                raise ParameterError(f"player {i} is adjacent to no set")
            for s in sets:
                if not 0 <= s < self.set_costs.size:
                    raise ParameterError(f"player {i} references unknown set {s}")

    @property
    def n(self) -> int:
        return len(self.allowed)

    @property
    def m(self) -> int:
        return int(self.set_costs.size)


@dataclass
class PlayerRecord:
    player: int
    action: int
    displayed: np.ndarray
    true_before: np.ndarray
    realized: float
    perceived: float


@dataclass
class PlayTrace:
    """Full record of one sequential play."""

    game: str
    records: list
    final_usage: np.ndarray
    social_welfare: float
    perceived_welfare: float
    metrics: dict = field(default_factory=dict)

    @property
    def actions(self) -> list:
        return [rec.action for rec in self.records]

    def displayed_matrix(self) -> np.ndarray:
        return np.array([rec.displayed for rec in self.records])

    def true_matrix(self) -> np.ndarray:
        return np.array([rec.true_before for rec in self.records])


def _check_mechanism(mech: CounterMechanism, dim: int, horizon: int, bound: float = 1.0):
    if mech.dim != dim:
        raise ValidationError(f"counter dimension {mech.dim} != required {dim}")
    if mech.horizon < horizon:
        raise ValidationError(f"counter horizon {mech.horizon} < {horizon} players")
    if mech.update_bound + 1e-9 < bound:
        raise ValidationError(
            f"counter update bound {mech.update_bound} cannot carry updates of l1 norm {bound}")
    if mech.t != 0:
        raise ValidationError("counter has already consumed updates")


def play_resource_sharing(inst: ResourceSharingInstance, mech: CounterMechanism,
                          strategy) -> PlayTrace:
    """Future-independent play: player i's realized value is v_r at the true
    number of earlier choosers of her resource."""
    _check_mechanism(mech, inst.m, inst.n)
    strategy.start("resource", inst)
    true = np.zeros(inst.m)
    records = []
    for i in range(inst.n):
        displayed = mech.current
        r = strategy.choose_resource(i, inst.action_sets[i], displayed, inst.curves)
        if r not in inst.action_sets[i]:
            raise ValidationError(f"strategy chose resource {r} outside A_{i}")
        realized = inst.curves[r].value_at(true[r])
        perceived = inst.curves[r].value_at(displayed[r])
        records.append(PlayerRecord(i, r, displayed, true.copy(), realized, perceived))
        action = np.zeros(inst.m)
        action[r] = 1.0
        mech.update(action)
        true[r] += 1.0
    return PlayTrace(
        game="resource",
        records=records,
        final_usage=true,
        social_welfare=math.fsum(rec.realized for rec in records),
        perceived_welfare=math.fsum(rec.perceived for rec in records),
    )


def play_resource_sharing_fractional(inst: ResourceSharingInstance,
                                     mech: CounterMechanism, strategy,
                                     splits: int) -> PlayTrace:
    """Discretized continuous investments.

    Each player splits her unit budget into ``splits`` increments of
    1/splits; every increment is placed by the strategy at the player's
    displayed counts plus her own running allocation, and utilities are
    Riemann sums of curve values over the invested range. ``splits=1``
    reduces to unit-demand play. The counter sees one combined fractional
    update per player (still inside the simplex).
    """
    if splits < 1:
        raise ParameterError(f"splits must be >= 1, got {splits}")
    _check_mechanism(mech, inst.m, inst.n)
    strategy.start("resource", inst)
    step = 1.0 / splits
    true = np.zeros(inst.m)
    records = []
    for i in range(inst.n):
        displayed = mech.current
        alloc = np.zeros(inst.m)
        realized_parts = []
        perceived_parts = []
        for _ in range(splits):
            r = strategy.choose_resource(i, inst.action_sets[i],
                                         displayed + alloc, inst.curves)
            if r not in inst.action_sets[i]:
                raise ValidationError(f"strategy chose resource {r} outside A_{i}")
            realized_parts.append(step * inst.curves[r].value_at(true[r] + alloc[r]))
            perceived_parts.append(step * inst.curves[r].value_at(displayed[r] + alloc[r]))
            alloc[r] += step
        realized = math.fsum(realized_parts)
        perceived = math.fsum(perceived_parts)
        dominant = int(np.argmax(alloc))
        rec = PlayerRecord(i, dominant, displayed, true.copy(), realized, perceived)
        records.append(rec)
        mech.update(alloc)
        true += alloc
    trace = PlayTrace(
        game="resource-frac",
        records=records,
        final_usage=true,
        social_welfare=math.fsum(rec.realized for rec in records),
        perceived_welfare=math.fsum(rec.perceived for rec in records),
        metrics={"splits": splits},
    )
    return trace


def play_future_dependent(inst: ResourceSharingInstance, mech: CounterMechanism,
                          strategy) -> PlayTrace:
    """Future-dependent play: every player on a resource with final usage w
    gets the value of its w-th chooser; utilities are recomputed at game end."""
    _check_mechanism(mech, inst.m, inst.n)
    strategy.start("future", inst)
    true = np.zeros(inst.m)
    picks = []
    records = []
    for i in range(inst.n):
        displayed = mech.current
        r = strategy.choose_future(i, inst.action_sets[i], displayed, inst.curves)
        if r not in inst.action_sets[i]:
            raise ValidationError(f"strategy chose resource {r} outside A_{i}")
        perceived = inst.curves[r].value_at(displayed[r])
        records.append(PlayerRecord(i, r, displayed, true.copy(), 0.0, perceived))
        picks.append(r)
        action = np.zeros(inst.m)
        action[r] = 1.0
        mech.update(action)
        true[r] += 1.0
    for rec, r in zip(records, picks):
        rec.realized = inst.curves[r].value_at(true[r] - 1.0)
    return PlayTrace(
        game="future",
        records=records,
        final_usage=true,
        social_welfare=math.fsum(rec.realized for rec in records),
        perceived_welfare=math.fsum(rec.perceived for rec in records),
    )


def play_cut(inst: CutInstance, mech: CounterMechanism, strategy) -> PlayTrace:
    """Sequential max-cut coloring; utility is the number of oppositely colored
    neighbors at game end, so the social welfare is twice the cut size.

    The counter carries two coordinates per node (red and blue counts of that
    node's neighborhood); a player's action feeds her color coordinate of every
    incident node, so updates have l1 norm up to the maximum degree.
    """
    n = inst.n
    _check_mechanism(mech, 2 * n, n, float(max(inst.max_degree, 1)))
    strategy.start("cut", inst)
    colors = [-1] * n
    records = []
    for i in range(n):
        displayed = mech.current[2 * i: 2 * i + 2]
        uncolored = sum(1 for j in inst.neighbors(i) if colors[j] < 0)
        c = strategy.choose_color(i, displayed, uncolored)
        if c not in (0, 1):
            raise ValidationError(f"color must be 0 (red) or 1 (blue), got {c}")
        true_before = np.array([
            float(sum(1 for j in inst.neighbors(i) if colors[j] == 0)),
            float(sum(1 for j in inst.neighbors(i) if colors[j] == 1)),
        ])
        perceived = float(displayed[1 - c])
        colors[i] = c
        records.append(PlayerRecord(i, c, np.asarray(displayed, dtype=float),
                                    true_before, 0.0, perceived))
        action = np.zeros(2 * n)
        for j in inst.neighbors(i):
            action[2 * j + c] += 1.0
        mech.update(action)
    for i in range(n):
        records[i].realized = float(sum(1 for j in inst.neighbors(i)
                                        if colors[j] != colors[i]))
    cut_edges = sum(1 for u, v in inst.edges if colors[u] != colors[v])
    usage = np.zeros(2)
    usage[0] = colors.count(0)
    usage[1] = colors.count(1)
    return PlayTrace(
        game="cut",
        records=records,
        final_usage=usage,
        social_welfare=math.fsum(rec.realized for rec in records),
        perceived_welfare=math.fsum(rec.perceived for rec in records),
        metrics={"cut_edges": cut_edges, "colors": colors},
    )


def play_scheduling(inst: SchedulingInstance, mech: CounterMechanism, strategy) -> PlayTrace:
    """Sequential load balancing; utility is the negative final load of the
    chosen machine and the reported metric is the makespan. Load updates carry
    job sizes, so the counter's update bound must cover the largest size."""
    bound = float(inst.costs.max()) if inst.costs.size else 1.0
    _check_mechanism(mech, inst.m, inst.n, max(bound, 1e-12))
    strategy.start("scheduling", inst)
    loads = np.zeros(inst.m)
    records = []
    picks = []
    for k in range(inst.n):
        displayed = mech.current
        q = strategy.choose_machine(k, displayed, inst.costs[k])
        if not 0 <= q < inst.m:
            raise ValidationError(f"machine index {q} out of range")
        perceived = -(float(displayed[q]) + float(inst.costs[k, q]))
        records.append(PlayerRecord(k, q, displayed, loads.copy(), 0.0, perceived))
        picks.append(q)
        action = np.zeros(inst.m)
        action[q] = inst.costs[k, q]
        mech.update(action)
        loads[q] += inst.costs[k, q]
    for rec, q in zip(records, picks):
        rec.realized = -float(loads[q])
    return PlayTrace(
        game="scheduling",
        records=records,
        final_usage=loads,
        social_welfare=math.fsum(rec.realized for rec in records),
        perceived_welfare=math.fsum(rec.perceived for rec in records),
        metrics={"makespan": float(loads.max()) if inst.m else 0.0},
    )


def play_cost_sharing(inst: CostSharingInstance, mech: CounterMechanism, strategy) -> PlayTrace:
    """Sequential fair cost sharing (cost minimization).

    A greedy player picks the allowed set minimizing cost/(displayed count + 1)
    (counting herself); each player's realized cost is recomputed at game end
    as cost/(final true count). The reported total cost sums the distinct
    chosen sets' costs; lower is better.
    """
    _check_mechanism(mech, inst.m, inst.n)
    strategy.start("costshare", inst)
    counts = np.zeros(inst.m)
    records = []
    picks = []
    for i in range(inst.n):
        displayed = mech.current
        s = strategy.choose_set(i, inst.allowed[i], displayed, inst.set_costs)
        if s not in inst.allowed[i]:
            raise ValidationError(f"strategy chose set {s} outside player {i}'s adjacency")
        perceived = float(inst.set_costs[s]) / (max(float(displayed[s]), 0.0) + 1.0)
        records.append(PlayerRecord(i, s, displayed, counts.copy(), 0.0, perceived))
        picks.append(s)
        action = np.zeros(inst.m)
        action[s] = 1.0
        mech.update(action)
        counts[s] += 1.0
    for rec, s in zip(records, picks):
        rec.realized = float(inst.set_costs[s]) / float(counts[s])
    total_cost = math.fsum(inst.set_costs[s] for s in sorted(set(picks)))
    return PlayTrace(
        game="costshare",
        records=records,
        final_usage=counts,
        social_welfare=math.fsum(rec.realized for rec in records),
        perceived_welfare=math.fsum(rec.perceived for rec in records),
        metrics={"total_cost": total_cost},
    )


def verify_trace(trace: PlayTrace, inst) -> None:
    """Assert the trace's bookkeeping identities against its instance.

    Resource sharing and future-dependent welfare recomputed from final usages
    must equal the recorded per-player sum exactly (same value multiset under
    fsum); cut welfare must equal twice the cut size; cost-sharing per-player
    costs must sum to the distinct-set total within float tolerance.
    """
    if trace.game == "resource":
        vals = [inst.curves[r].value_at(j)
                for r in range(inst.m) for j in range(int(trace.final_usage[r]))]
        if math.fsum(vals) != trace.social_welfare:
            raise ValidationError("resource-sharing welfare does not match final usages")
    elif trace.game == "future":
        vals = [inst.curves[r].value_at(trace.final_usage[r] - 1.0)
                for r in range(inst.m) for _ in range(int(trace.final_usage[r]))]
        if math.fsum(vals) != trace.social_welfare:
            raise ValidationError("future-dependent welfare does not match final usages")
    elif trace.game == "resource-frac":
        if int(round(float(trace.final_usage.sum()))) != len(trace.records):
            raise ValidationError("fractional allocations do not sum to the player count")
    elif trace.game == "cut":
        if trace.social_welfare != 2.0 * trace.metrics["cut_edges"]:
            raise ValidationError("cut welfare != 2 * cut edges")
    elif trace.game == "scheduling":
        if abs(-min(rec.realized for rec in trace.records) - trace.metrics["makespan"]) > 1e-9:
            raise ValidationError("makespan does not match the worst realized load")
    elif trace.game == "costshare":
        if abs(trace.social_welfare - trace.metrics["total_cost"]) > 1e-9:
            raise ValidationError("per-player costs do not sum to the set-cost total")


def shallow_check(curve: ValueCurve, w: float, l: int) -> bool:
    """True iff v(x) >= (sum_{t=0..x} v(t)) / (w*x) for every 1 <= x <= l."""
    if w < 1.0:
        raise ParameterError(f"shallowness factor w must be >= 1, got {w}")
    if l < 1:
        raise ParameterError(f"l must be >= 1, got {l}")
    for x in range(1, l + 1):
        total = math.fsum(curve.value_at(t) for t in range(x + 1))
        if curve.value_at(x) < total / (w * x) - 1e-12:
            return False
    return True


def curve_smoothness(curve: ValueCurve, alpha: float, beta: float):
    """Direct-scan smoothness factors (psi, phi) of a curve for an (alpha, beta) envelope.

    psi is the smallest factor with psi * v(x) >= v(max(0, x/alpha^2 - 2 beta/alpha));
    phi the smallest with v(x) <= phi * v(ceil(alpha^2 x + 2 alpha beta)), both
    over all integer x in the curve's index range (lookups beyond the end
    extend by the last value). A ratio against a zero value yields math.inf.
    """
    if alpha < 1.0 or beta < 0.0:
        raise ParameterError("need alpha >= 1 and beta >= 0")
    psi = 1.0
    phi = 1.0
    for x in range(len(curve)):
        v_x = curve.value_at(x)
        v_low = curve.value_at(max(0.0, x / alpha ** 2 - 2.0 * beta / alpha))
        v_up = curve.value_at(math.ceil(alpha ** 2 * x + 2.0 * alpha * beta))
        if v_x > 0:
            psi = max(psi, v_low / v_x)
            phi = max(phi, v_x / v_up) if v_up > 0 else math.inf
        elif v_low > 0:
            psi = math.inf
    return psi, phi


__all__ = [
    "ValueCurve",
    "ResourceSharingInstance",
    "CutInstance",
    "SchedulingInstance",
    "CostSharingInstance",
    "PlayerRecord",
    "PlayTrace",
    "play_resource_sharing",
    "play_resource_sharing_fractional",
    "play_future_dependent",
    "play_cut",
    "play_scheduling",
    "play_cost_sharing",
    "verify_trace",
    "shallow_check",
    "curve_smoothness",
]
