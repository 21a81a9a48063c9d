"""Player decision rules.

``Greedy`` maximizes utility (or minimizes cost) against the displayed counter
values, the natural play when counters are exact. ``is_undominated`` tests an
action against the interval belief set induced by a worst-case (alpha, beta, 0)
envelope: an action is dominated only if some alternative beats it under every
consistent state. Scripted strategies realize the registered adversarial
constructions behind the lower-bound scenarios; each asserts its own
undominatedness where the construction claims it.

Strategies are stateless decision functions (scripted ones bind an instance at
game start for validation only) and can be shared freely across trials.
"""

from __future__ import annotations

import math

from .counters import AccuracyEnvelope
from .errors import ParameterError, UnknownScenarioError, ValidationError
from .games import CutInstance, ResourceSharingInstance, SchedulingInstance


def greedy_choose(action_set, displayed, curves) -> int:
    """Utility-maximizing resource under displayed counts; ties break to the
    lowest index."""
    if not action_set:
        raise ValidationError("empty action set")
    best_r = None
    best_v = -math.inf
    for r in sorted(action_set):
        v = curves[r].value_at(displayed[r])
        if v > best_v:
            best_r, best_v = r, v
    return best_r


def belief_range(displayed: float, envelope: AccuracyEnvelope):
    """Consistent true-count interval for one displayed value,
    [max(0, y/alpha - beta), alpha*y + beta]."""
    lo = max(0.0, displayed / envelope.alpha - envelope.beta)
    hi = envelope.alpha * displayed + envelope.beta
    return lo, max(lo, hi)


def is_undominated(action: int, action_set, displayed, envelope: AccuracyEnvelope,
                   curves) -> bool:
    """True iff no alternative's worst-case value strictly exceeds this
    action's best-case value over the belief ranges. Requires gamma = 0: the
    interval beliefs are only sound when the envelope holds surely."""
    if envelope.gamma != 0.0:
        raise ParameterError("undominatedness needs a zero-failure envelope (gamma = 0)")
    if action not in action_set:
        raise ValidationError(f"action {action} not in the action set")
    lo_own, _ = belief_range(float(displayed[action]), envelope)
    best_case = curves[action].value_at(lo_own)
    for r in action_set:
        if r == action:
            continue
        _, hi_alt = belief_range(float(displayed[r]), envelope)
        worst_case_alt = curves[r].value_at(hi_alt)
        if worst_case_alt > best_case:
            return False
    return True


class Strategy:
    """Decision-rule interface; engines call the method matching their game."""

    kind = "base"

    def start(self, game: str, instance) -> None:
        """Called once before play; scripted strategies validate the instance here."""

    def choose_resource(self, player, action_set, displayed, curves) -> int:
        raise NotImplementedError

    def choose_future(self, player, action_set, displayed, curves) -> int:
        raise NotImplementedError

    def choose_color(self, player, displayed, uncolored_neighbors) -> int:
        raise NotImplementedError

    def choose_machine(self, player, displayed_loads, costs_row) -> int:
        raise NotImplementedError

    def choose_set(self, player, allowed, displayed_counts, set_costs) -> int:
        raise NotImplementedError


class Greedy(Strategy):
    """Greedy against displayed counts in every game; ties to the lowest index."""

    kind = "greedy"

    def choose_resource(self, player, action_set, displayed, curves) -> int:
        return greedy_choose(action_set, displayed, curves)

    def choose_future(self, player, action_set, displayed, curves) -> int:
        # the displayed count plus the player herself is the usage she expects
        # to share, which is exactly the floored-display curve lookup
        return greedy_choose(action_set, displayed, curves)

    def choose_color(self, player, displayed, uncolored_neighbors) -> int:
        return 0 if displayed[0] <= displayed[1] else 1

    def choose_machine(self, player, displayed_loads, costs_row) -> int:
        best_q, best_c = 0, math.inf
        for q in range(len(costs_row)):
            c = float(displayed_loads[q]) + float(costs_row[q])
            if c < best_c:
                best_q, best_c = q, c
        return best_q

    def choose_set(self, player, allowed, displayed_counts, set_costs) -> int:
        best_s, best_c = None, math.inf
        for s in sorted(allowed):
            c = float(set_costs[s]) / (max(float(displayed_counts[s]), 0.0) + 1.0)
            if c < best_c:
                best_s, best_c = s, c
        return best_s


class BeliefGreedy(Greedy):
    """Greedy against belief-adjusted counts: displayed values are shifted by a
    fixed offset (a crude consistent belief) before the greedy rule applies."""

    kind = "belief-greedy"

    def __init__(self, offset: float):
        self.offset = float(offset)

    def _adjust(self, displayed):
        return [float(y) + self.offset for y in displayed]

    def choose_resource(self, player, action_set, displayed, curves) -> int:
        return super().choose_resource(player, action_set, self._adjust(displayed), curves)

    def choose_future(self, player, action_set, displayed, curves) -> int:
        return super().choose_future(player, action_set, self._adjust(displayed), curves)

    def choose_machine(self, player, displayed_loads, costs_row) -> int:
        return super().choose_machine(player, self._adjust(displayed_loads), costs_row)

    def choose_set(self, player, allowed, displayed_counts, set_costs) -> int:
        return super().choose_set(player, allowed, self._adjust(displayed_counts), set_costs)


class _Script(Strategy):
    kind = "scripted"
    name = "?"
    game = "?"

    def start(self, game: str, instance) -> None:
        if game != self.game:
            raise ParameterError(f"script '{self.name}' plays the {self.game} game, not {game}")
        self.check(instance)
        self.instance = instance

    def check(self, instance) -> None:
        raise NotImplementedError


class FearATwin(_Script):
    """All players pick the shared flat resource, each under the consistent
    belief that a twin already burned her private jackpot. Undominated with
    empty counters (any belief is consistent)."""

    name = "fear-a-twin"
    game = "resource"

    def check(self, instance) -> None:
        if not isinstance(instance, ResourceSharingInstance):
            raise ParameterError("fear-a-twin needs a resource-sharing instance")
        n, m = instance.n, instance.m
        if m != n + 1 or any(instance.action_sets[i] != [i, n] for i in range(n)):
            raise ParameterError(
                "fear-a-twin expects one private resource per player plus a shared last resource")

    def choose_resource(self, player, action_set, displayed, curves) -> int:
        shared = self.instance.m - 1
        vacuous = AccuracyEnvelope(1.0, float(self.instance.n), 0.0)
        assert is_undominated(shared, action_set, displayed, vacuous, curves), \
            "shared pick unexpectedly dominated"
        return shared


class FlatResourceTemptation(_Script):
    """All players pick the shared slowly decaying resource; since every
    private value can have fallen to the shared level, the pick is undominated
    under empty counters."""

    name = "flat-resource-temptation"
    game = "resource"

    def check(self, instance) -> None:
        if not isinstance(instance, ResourceSharingInstance):
            raise ParameterError("flat-resource-temptation needs a resource-sharing instance")
        if instance.m != instance.n + 1:
            raise ParameterError("expected one resource per player plus a shared last resource")

    def choose_resource(self, player, action_set, displayed, curves) -> int:
        shared = self.instance.m - 1
        vacuous = AccuracyEnvelope(1.0, float(self.instance.n), 0.0)
        assert is_undominated(shared, action_set, displayed, vacuous, curves), \
            "shared pick unexpectedly dominated"
        return shared


class AllBlueCycle(_Script):
    """On a cycle, every node plays blue while blue remains undominated (an
    uncolored neighbor may still turn red); the last node, boxed in by blue
    neighbors, is forced to red. Requires exact displayed counts."""

    name = "all-blue-cycle"
    game = "cut"

    def check(self, instance) -> None:
        if not isinstance(instance, CutInstance):
            raise ParameterError("all-blue-cycle needs a cut instance")
        n = instance.n
        if n < 4 or n % 2 != 0:
            raise ParameterError("all-blue-cycle expects an even cycle with >= 4 nodes")
        expected = sorted((i, (i + 1) % n) if i < (i + 1) % n else ((i + 1) % n, i)
                          for i in range(n))
        if instance.edges != expected:
            raise ParameterError("all-blue-cycle expects exactly the cycle's edges")

    def choose_color(self, player, displayed, uncolored_neighbors) -> int:
        # blue is dominated only when red beats it in every completion:
        # blue's ceiling (red neighbors + uncolored) below red's floor
        red_count, blue_count = float(displayed[0]), float(displayed[1])
        blue_dominated = blue_count > red_count + uncolored_neighbors
        return 0 if blue_dominated else 1


class PessimisticScheduler(_Script):
    """First player parks her free job on the expensive machine, undominated
    because a heavy second job may grab the free one; everyone after is greedy."""

    name = "pessimistic-scheduler"
    game = "scheduling"

    def __init__(self):
        self._greedy = Greedy()

    def check(self, instance) -> None:
        if not isinstance(instance, SchedulingInstance):
            raise ParameterError("pessimistic-scheduler needs a scheduling instance")
        if instance.n < 2 or instance.m < 2 or instance.costs[0, 0] != 0.0:
            raise ParameterError(
                "pessimistic-scheduler expects player 0 to have a free first machine")

    def choose_machine(self, player, displayed_loads, costs_row) -> int:
        if player == 0:
            return 1
        return self._greedy.choose_machine(player, displayed_loads, costs_row)


class PrivateSetBeliefs(_Script):
    """Market sharing: player i believes everyone after her cares only about
    her own market, making the shared market strictly better; all pile onto it."""

    name = "private-set-beliefs"
    game = "future"

    def check(self, instance) -> None:
        if not isinstance(instance, ResourceSharingInstance):
            raise ParameterError("private-set-beliefs needs a market-sharing instance")
        n = instance.n
        if instance.m != n + 1 or any(instance.action_sets[i] != [0, i + 1] for i in range(n)):
            raise ParameterError(
                "private-set-beliefs expects shared market 0 plus one private market per player")

    def choose_future(self, player, action_set, displayed, curves) -> int:
        n = self.instance.n
        own = player + 1
        c_shared = curves[0].values[0]
        c_own = curves[own].values[0]
        u_shared = c_shared / (player + 1)          # earlier players all shared market 0
        u_own = c_own / (n - player)                # believed late rush onto her market
        assert u_shared > u_own, "shared market not strictly better under the scripted belief"
        return 0


_SCRIPTS = {
    cls.name: cls
    for cls in (FearATwin, FlatResourceTemptation, AllBlueCycle,
                PessimisticScheduler, PrivateSetBeliefs)
}


def scripted(name: str) -> Strategy:
    """Instantiate a registered scripted strategy by name."""
    if name not in _SCRIPTS:
        raise UnknownScenarioError(
            f"unknown scripted strategy '{name}' (have: {', '.join(sorted(_SCRIPTS))})")
    return _SCRIPTS[name]()


def scripted_names() -> list:
    return sorted(_SCRIPTS)


def make_strategy(spec: str) -> Strategy:
    """Parse a CLI strategy spec: 'greedy', 'scripted:<name>', or 'belief:<offset>'."""
    if spec == "greedy":
        return Greedy()
    if spec.startswith("scripted:"):
        return scripted(spec.split(":", 1)[1])
    if spec.startswith("belief:"):
        return BeliefGreedy(float(spec.split(":", 1)[1]))
    raise ParameterError(f"unknown strategy spec '{spec}'")


__all__ = [
    "greedy_choose",
    "belief_range",
    "is_undominated",
    "Strategy",
    "Greedy",
    "BeliefGreedy",
    "scripted",
    "scripted_names",
    "make_strategy",
]
