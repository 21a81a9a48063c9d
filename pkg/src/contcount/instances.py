"""Built-in game instances: named worst-case constructions, random generators,
and the plain-text instance file formats.

Named constructions are addressable as ``paper:<name>`` from the CLI and the
experiment harness; each realizes one of the closed-form bad (or good) cases
the scenario registry checks against.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ParameterError, ValidationError
from .games import (
    CostSharingInstance,
    CutInstance,
    ResourceSharingInstance,
    SchedulingInstance,
    ValueCurve,
)
from .noise import RandomSource


def harmonic_number(n: int) -> float:
    return math.fsum(1.0 / i for i in range(1, n + 1))


# ---------------------------------------------------------------------------
# named constructions


def illustrative_shared_vs_private(n: int = 100, eps: float = 0.01) -> ResourceSharingInstance:
    """One public resource worth 1/(k+1) to its (k+1)-st chooser versus a
    private resource worth 1 - eps for each player. Blind greedy piles onto
    the public resource for harmonic welfare H_n; the all-private assignment
    is worth n(1-eps)."""
    public = ValueCurve([1.0 / (k + 1) for k in range(n)])
    curves = [public] + [ValueCurve([1.0 - eps] * n) for _ in range(n)]
    action_sets = [[0, i + 1] for i in range(n)]
    return ResourceSharingInstance(curves, action_sets)


def twin_temptation(n: int = 10, high: float = 100.0) -> ResourceSharingInstance:
    """Each player has a private resource worth `high` to its first chooser
    (0 afterwards) plus a shared flat resource worth 1. Fearing a twin already
    took the private jackpot, choosing the shared resource is undominated."""
    curves = [ValueCurve([high] + [0.0] * (n - 1) if n > 1 else [high]) for _ in range(n)]
    curves.append(ValueCurve([1.0] * n))
    action_sets = [[i, n] for i in range(n)]
    return ResourceSharingInstance(curves, action_sets)


def slow_decay_temptation(n: int = 25) -> ResourceSharingInstance:
    """Per-player resources decaying as n/(k+1) plus one shared resource
    decaying as 1/(k+1); every action set contains all resources."""
    curves = [ValueCurve([n / (k + 1) for k in range(n)]) for _ in range(n)]
    curves.append(ValueCurve([1.0 / (k + 1) for k in range(n)]))
    action_sets = [list(range(n + 1)) for _ in range(n)]
    return ResourceSharingInstance(curves, action_sets)


def fragile_first_mover(rho: float = 0.05) -> ResourceSharingInstance:
    """Two players: resource 0 is worth 1 to its first chooser and 0 after,
    resource 1 is worth rho flat. Player 0 can only take resource 1; player 1
    has both options."""
    curves = [ValueCurve([1.0, 0.0]), ValueCurve([rho, rho])]
    return ResourceSharingInstance(curves, [[1], [0, 1]])


def cut_cycle(n: int = 20) -> CutInstance:
    """Even cycle with 2n nodes; the optimum cuts every edge (welfare 4n)."""
    nodes = 2 * n
    edges = [(i, (i + 1) % nodes) for i in range(nodes)]
    return CutInstance(nodes, edges)


def scheduling_2x2() -> SchedulingInstance:
    """Two jobs, two machines, sizes ((0, 1), (1, 0)); the optimum has makespan 0."""
    return SchedulingInstance(np.array([[0.0, 1.0], [1.0, 0.0]]))


def costshare_public_private(n: int = 10, eps: float = 0.1) -> CostSharingInstance:
    """A public set of cost 1+eps adjacent to everyone plus one private set of
    cost 1 per player; exact counts drive everyone private (total cost n)."""
    costs = [1.0 + eps] + [1.0] * n
    allowed = [[0, i + 1] for i in range(n)]
    return CostSharingInstance(np.array(costs), allowed)


def future_step(w: float = 5.0, eps: float = 0.1) -> ResourceSharingInstance:
    """Future-dependent two-player step instance: resource 0 is worth w to a
    lone user but 1/2 once shared, resource 1 is worth w - eps flat. Greedy
    traps both players on resource 0 for welfare 1 versus 2w - eps."""
    curves = [ValueCurve([w, 0.5]), ValueCurve([w - eps, w - eps])]
    return ResourceSharingInstance(curves, [[0, 1], [0]])


def market_curve(total_value: float, horizon: int) -> ValueCurve:
    """Market-sharing curve: a market of total value c pays c/x to each of x users."""
    return ValueCurve([total_value / (j + 1) for j in range(horizon)])


def market_log_loss(n: int = 16, eps: float = 0.01) -> ResourceSharingInstance:
    """Market sharing where player i may serve market 0 (total value 1) or its
    own market i of total value (n-i+1)(1-eps)/i. Believing later players only
    care about market i makes serving market 0 undominated for everyone,
    collapsing welfare to 1."""
    curves = [market_curve(1.0, n)]
    for i in range(1, n + 1):
        curves.append(market_curve((n - i + 1) * (1.0 - eps) / i, n))
    action_sets = [[0, i + 1] for i in range(n)]
    return ResourceSharingInstance(curves, action_sets)


def market_undom_benchmark(n: int, eps: float) -> float:
    """Total value of the all-private assignment in market_log_loss."""
    return math.fsum((n - i + 1) * (1.0 - eps) / i for i in range(1, n + 1))


def market_undom_exact_opt(n: int, eps: float) -> float:
    """Exact optimum of market_log_loss: drop the cheapest private market in
    favor of the shared one when its total value 1 is larger."""
    values = [(n - i + 1) * (1.0 - eps) / i for i in range(1, n + 1)]
    smallest = min(values)
    if 1.0 > smallest:
        return math.fsum(values) - smallest + 1.0
    return math.fsum(values)


PAPER_INSTANCES = {
    "sec1.1": ("resource", illustrative_shared_vs_private),
    "noinfo": ("resource", twin_temptation),
    "noinfospecial": ("resource", slow_decay_temptation),
    "lb-undom": ("resource", fragile_first_mover),
    "cut-cycle": ("cut", cut_cycle),
    "sched2x2": ("scheduling", scheduling_2x2),
    "costshare-public-private": ("costshare", costshare_public_private),
    "future-lb": ("future", future_step),
    "marketundom": ("future", market_log_loss),
}


# ---------------------------------------------------------------------------
# random instance generators (fuzz + harness trials)


def _random_curve(rng: RandomSource, horizon: int) -> ValueCurve:
    kind = int(rng.integers(0, 3))
    v0 = 0.5 + 1.5 * rng.uniform()
    if kind == 0:
        p = 0.5 + 1.5 * rng.uniform()
        vals = [v0 / (k + 1) ** p for k in range(horizon)]
    elif kind == 1:
        q = 0.5 + 0.45 * rng.uniform()
        vals = [v0 * q ** k for k in range(horizon)]
    else:
        step = int(rng.integers(1, max(2, horizon)))
        vals = [v0 if k < step else v0 * 0.25 for k in range(horizon)]
    return ValueCurve(vals)


def random_resource_sharing(rng: RandomSource, n_max: int = 50,
                            m_max: int = 10) -> ResourceSharingInstance:
    n = int(rng.integers(2, n_max + 1))
    m = int(rng.integers(2, m_max + 1))
    curves = [_random_curve(rng, n) for _ in range(m)]
    action_sets = []
    for _ in range(n):
        size = int(rng.integers(1, m + 1))
        acts = sorted(rng.generator.choice(m, size=size, replace=False).tolist())
        action_sets.append(acts)
    return ResourceSharingInstance(curves, action_sets)


def random_market_sharing(rng: RandomSource, n_max: int = 30, m_max: int = 6,
                          value_lo: float = 1.0, value_hi: float = 4.0) -> ResourceSharingInstance:
    n = int(rng.integers(4, n_max + 1))
    m = int(rng.integers(2, m_max + 1))
    curves = [market_curve(value_lo + (value_hi - value_lo) * rng.uniform(), n)
              for _ in range(m)]
    action_sets = []
    for _ in range(n):
        size = int(rng.integers(1, m + 1))
        action_sets.append(sorted(rng.generator.choice(m, size=size, replace=False).tolist()))
    return ResourceSharingInstance(curves, action_sets)


def random_cut(rng: RandomSource, n_max: int = 30, p: float = 0.3) -> CutInstance:
    n = int(rng.integers(3, n_max + 1))
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.uniform() < p]
    if not edges:
        edges = [(0, 1)]
    return CutInstance(n, edges)


def random_scheduling(rng: RandomSource, n_max: int = 8, m_max: int = 4,
                      cost_hi: float = 10.0) -> SchedulingInstance:
    n = int(rng.integers(2, n_max + 1))
    m = int(rng.integers(2, m_max + 1))
    return SchedulingInstance(cost_hi * rng.generator.random((n, m)))


def random_cost_sharing(rng: RandomSource, n_max: int = 8, m_max: int = 8) -> CostSharingInstance:
    n = int(rng.integers(2, n_max + 1))
    m = int(rng.integers(2, m_max + 1))
    costs = 0.5 + 4.5 * rng.generator.random(m)
    allowed = []
    for _ in range(n):
        size = int(rng.integers(1, m + 1))
        allowed.append(sorted(rng.generator.choice(m, size=size, replace=False).tolist()))
    return CostSharingInstance(costs, allowed)


def random_future(rng: RandomSource, n_max: int = 5, m_max: int = 3) -> ResourceSharingInstance:
    n = int(rng.integers(2, n_max + 1))
    m = int(rng.integers(2, m_max + 1))
    curves = [_random_curve(rng, n) for _ in range(m)]
    action_sets = []
    for _ in range(n):
        size = int(rng.integers(1, m + 1))
        action_sets.append(sorted(rng.generator.choice(m, size=size, replace=False).tolist()))
    return ResourceSharingInstance(curves, action_sets)


RANDOM_GENERATORS = {
    "resource": random_resource_sharing,
    "market": random_market_sharing,
    "cut": random_cut,
    "scheduling": random_scheduling,
    "costshare": random_cost_sharing,
    "future": random_future,
}


# ---------------------------------------------------------------------------
# plain-text instance files


def _data_lines(text: str) -> list:
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    return lines


def parse_resource_sharing(text: str) -> ResourceSharingInstance:
    """Header 'n m', then m curve lines (n values each), then n action-set lines."""
    lines = _data_lines(text)
    try:
        n, m = (int(x) for x in lines[0].split())
        curves = [ValueCurve([float(v) for v in lines[1 + r].split()]) for r in range(m)]
        action_sets = [[int(v) for v in lines[1 + m + i].split()] for i in range(n)]
    except (IndexError, ValueError) as exc:
        raise ValidationError(f"malformed resource-sharing instance: {exc}") from exc
    return ResourceSharingInstance(curves, action_sets)


def parse_cut(text: str) -> CutInstance:
    """Header 'n', then one 'u v' line per edge."""
    lines = _data_lines(text)
    try:
        n = int(lines[0])
        edges = [tuple(int(v) for v in line.split()) for line in lines[1:]]
    except (IndexError, ValueError) as exc:
        raise ValidationError(f"malformed cut instance: {exc}") from exc
    return CutInstance(n, edges)


def parse_scheduling(text: str) -> SchedulingInstance:
    """Header 'n m', then n rows of m job sizes."""
    lines = _data_lines(text)
    try:
        n, m = (int(x) for x in lines[0].split())
        costs = np.array([[float(v) for v in lines[1 + k].split()] for k in range(n)])
        if costs.shape != (n, m):
            raise ValueError(f"expected a {n}x{m} size matrix")
    except (IndexError, ValueError) as exc:
        raise ValidationError(f"malformed scheduling instance: {exc}") from exc
    return SchedulingInstance(costs)


def parse_cost_sharing(text: str) -> CostSharingInstance:
    """Header 'n m', then one line of m set costs, then n adjacency lines."""
    lines = _data_lines(text)
    try:
        n, m = (int(x) for x in lines[0].split())
        costs = np.array([float(v) for v in lines[1].split()])
        if costs.size != m:
            raise ValueError(f"expected {m} set costs")
        allowed = [[int(v) for v in lines[2 + i].split()] for i in range(n)]
    except (IndexError, ValueError) as exc:
        raise ValidationError(f"malformed cost-sharing instance: {exc}") from exc
    return CostSharingInstance(costs, allowed)


_PARSERS = {
    "resource": parse_resource_sharing,
    "future": parse_resource_sharing,
    "market": parse_resource_sharing,
    "cut": parse_cut,
    "scheduling": parse_scheduling,
    "costshare": parse_cost_sharing,
}


def load_instance(game: str, path: str):
    if game not in _PARSERS:
        raise ParameterError(f"unknown game '{game}'")
    with open(path, "r", encoding="utf-8") as fh:
        return _PARSERS[game](fh.read())


def resolve_instance(game: str, spec, rng: RandomSource | None = None, **params):
    """Resolve an instance reference: an instance object, 'paper:<name>',
    'random:<game>' (needs rng), or a file path."""
    if not isinstance(spec, str):
        return spec
    if spec.startswith("paper:"):
        name = spec.split(":", 1)[1]
        if name not in PAPER_INSTANCES:
            raise ParameterError(f"unknown named instance '{name}' "
                                 f"(have: {', '.join(sorted(PAPER_INSTANCES))})")
        expected_game, builder = PAPER_INSTANCES[name]
        # resource-sharing-shaped instances drive any of the three engines
        shared_shape = {"resource", "future", "market"}
        allowed = shared_shape if expected_game in shared_shape else {expected_game}
        if game not in allowed:
            raise ParameterError(f"instance '{name}' belongs to game '{expected_game}', not '{game}'")
        return builder(**params)
    if spec.startswith("random:"):
        kind = spec.split(":", 1)[1]
        if rng is None:
            raise ParameterError("random instances need a RandomSource")
        if kind not in RANDOM_GENERATORS:
            raise ParameterError(f"unknown random generator '{kind}'")
        return RANDOM_GENERATORS[kind](rng, **params)
    return load_instance(game, spec)


def parse_stream(text: str, m: int) -> np.ndarray:
    """Stream replay format: one line per step, m whitespace-separated decimals,
    '#' comments."""
    rows = []
    for line in _data_lines(text):
        vals = [float(v) for v in line.split()]
        if len(vals) != m:
            raise ValidationError(f"stream line has {len(vals)} values, expected {m}")
        rows.append(vals)
    return np.array(rows) if rows else np.zeros((0, m))


def load_stream(path: str, m: int) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_stream(fh.read(), m)


__all__ = [
    "harmonic_number",
    "illustrative_shared_vs_private",
    "twin_temptation",
    "slow_decay_temptation",
    "fragile_first_mover",
    "cut_cycle",
    "scheduling_2x2",
    "costshare_public_private",
    "future_step",
    "market_curve",
    "market_log_loss",
    "market_undom_benchmark",
    "market_undom_exact_opt",
    "PAPER_INSTANCES",
    "RANDOM_GENERATORS",
    "random_resource_sharing",
    "random_market_sharing",
    "random_cut",
    "random_scheduling",
    "random_cost_sharing",
    "random_future",
    "load_instance",
    "resolve_instance",
    "parse_stream",
    "load_stream",
]
