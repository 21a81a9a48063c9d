"""Private and baseline counter-vector mechanisms behind one streaming interface.

A mechanism observes one update vector per time step (entries nonnegative,
l1 norm at most the declared update bound, 1.0 for simplex updates) and
releases one estimate vector per time step. Each mechanism carries a declared
accuracy envelope (alpha, beta, gamma): with probability at least 1 - gamma,
at every step every released coordinate y lies in
[x/alpha - beta, alpha*x + beta] where x is the true prefix sum.

Mechanisms:

* ``TreeSum``       -- binary-tree counter; each estimate is the true prefix sum
                       plus the noise of at most ceil(log2 n)+1 dyadic nodes.
* ``FTSum``         -- two-phase counter: a flag phase that pays privacy budget
                       only at geometrically spaced threshold crossings (sparse
                       vector technique), then a handoff to an embedded TreeSum.
* ``PerfectCounter`` / ``EmptyCounter`` -- exact and all-zero baselines.

Wrappers reshape releases while updating the declared envelope:
``wrap_underestimator`` (never exceeds the true count), ``wrap_monotone``
(integral, unit steps), ``wrap_zero_failure`` (clamps into the envelope using
the true count, trading the failure mass gamma into the privacy delta).

All logarithms here are base 2, matching the binary-tree depth.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, StateError, ValidationError
from .noise import RandomSource, laplace

logger = logging.getLogger(__name__)

_L1_TOL = 1e-9


@dataclass(frozen=True)
class PrivacyBudget:
    """(epsilon, delta) differential-privacy budget; epsilon may be math.inf."""

    epsilon: float
    delta: float = 0.0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ParameterError(f"epsilon must be positive, got {self.epsilon}")
        if not 0.0 <= self.delta < 1.0:
            raise ParameterError(f"delta must lie in [0, 1), got {self.delta}")


@dataclass(frozen=True)
class AccuracyEnvelope:
    """(alpha, beta, gamma) accuracy contract: y in [x/alpha - beta, alpha x + beta]."""

    alpha: float
    beta: float
    gamma: float = 0.0

    def __post_init__(self):
        if not self.alpha >= 1.0:
            raise ParameterError(f"alpha must be >= 1, got {self.alpha}")
        if not self.beta >= 0.0:
            raise ParameterError(f"beta must be nonnegative, got {self.beta}")
        if not 0.0 <= self.gamma < 1.0:
            raise ParameterError(f"gamma must lie in [0, 1), got {self.gamma}")

    def lower(self, x):
        return np.asarray(x, dtype=float) / self.alpha - self.beta

    def upper(self, x):
        return self.alpha * np.asarray(x, dtype=float) + self.beta

    def contains(self, x, y, tol: float = 1e-12) -> bool:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return bool(np.all(y >= self.lower(x) - tol) and np.all(y <= self.upper(x) + tol))


def validate_update(a, dim: int, bound: float = 1.0) -> np.ndarray:
    """Check membership in the (bound-scaled) simplex and return a float array."""
    arr = np.asarray(a, dtype=float)
    if arr.shape != (dim,):
        raise ValidationError(f"update must have shape ({dim},), got {arr.shape}")
    if np.any(arr < 0):
        raise ValidationError("update entries must be nonnegative")
    if np.any(arr > bound + _L1_TOL):
        raise ValidationError(f"update entries must be <= {bound}")
    if float(arr.sum()) > bound + _L1_TOL:
        raise ValidationError(f"update l1 norm {arr.sum():.6g} exceeds bound {bound}")
    return arr


def tree_levels(n: int) -> int:
    """Number of dyadic levels, ceil(log2 n) + 1 (a single node for n = 1)."""
    return 1 if n <= 1 else math.ceil(math.log2(n)) + 1


def covering_blocks(t: int, levels: int):
    """Dyadic blocks partitioning [1, t], highest level first.

    Returns (level, index) pairs; block (l, j) covers steps
    [j*2^l + 1, (j+1)*2^l]. There are popcount(t) <= levels blocks.
    """
    blocks = []
    pos = 0
    for level in range(levels - 1, -1, -1):
        if t & (1 << level):
            blocks.append((level, pos >> level))
            pos += 1 << level
    return blocks


def treesum_error_bound(n: int, m: int, eps: float, gamma: float, c_tree: float = 4.0) -> float:
    """Declared all-steps additive error bound for TreeSum.

    c_tree * log2(n) * log2(n*m/gamma) / eps, holding with probability at
    least 1 - gamma over all n*m estimates. c_tree is implementation-chosen
    (default 4.0), not theory-given; it empirically dominates the observed
    tail at the acceptance-test parameters.
    """
    if eps == math.inf:
        return 0.0
    return c_tree * max(1.0, math.log2(n)) * math.log2(n * m / gamma) / eps


class CounterMechanism:
    """Streaming counter base: validates updates, tracks true sums, releases estimates.

    States are single-owner and mutated sequentially; the stream is inherently
    ordered. ``current`` is the most recent release (zeros before any update).
    """

    def __init__(self, n: int, m: int, budget: PrivacyBudget,
                 envelope: AccuracyEnvelope, update_bound: float = 1.0):
        if n < 1:
            raise ParameterError(f"horizon n must be >= 1, got {n}")
        if m < 1:
            raise ParameterError(f"dimension m must be >= 1, got {m}")
        if update_bound <= 0:
            raise ParameterError(f"update bound must be positive, got {update_bound}")
        self.horizon = int(n)
        self.dim = int(m)
        self.budget = budget
        self.envelope = envelope
        self.update_bound = float(update_bound)
        self._t = 0
        self._true = np.zeros(self.dim)
        self._current = np.zeros(self.dim)

    @property
    def t(self) -> int:
        return self._t

    @property
    def true_sums(self) -> np.ndarray:
        """True prefix sums after the last update (diagnostics / wrappers)."""
        return self._true.copy()

    @property
    def current(self) -> np.ndarray:
        """Most recent released estimate (zeros before the first update)."""
        return self._current.copy()

    @property
    def is_underestimator(self) -> bool:
        return False

    def update(self, a) -> np.ndarray:
        """Feed one update vector; returns this step's released estimate."""
        if self._t >= self.horizon:
            raise StateError(f"update past horizon n={self.horizon}")
        a = validate_update(a, self.dim, self.update_bound)
        self._t += 1
        self._true += a
        self._current = np.asarray(self._step(a), dtype=float)
        return self._current.copy()

    def _step(self, a: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class TreeSum(CounterMechanism):
    """Binary-tree counter over a vector stream.

    One shared budget serves all m coordinates because the l1 sensitivity of
    each partial sum is 1 (updates live in the simplex); per-node noise has
    scale update_bound * levels / epsilon with levels = ceil(log2 n) + 1.
    Node noises are drawn eagerly at construction, level 0 upward, so a fresh
    source with the same (seed, stream_id) reproduces them exactly.
    """

    def __init__(self, n: int, m: int, budget, rng: RandomSource, *,
                 gamma: float = 0.1, c_tree: float = 4.0, update_bound: float = 1.0):
        if n < 1 or m < 1:
            raise ParameterError(f"need n >= 1 and m >= 1, got n={n}, m={m}")
        if not isinstance(budget, PrivacyBudget):
            budget = PrivacyBudget(float(budget))
        if not 0.0 < gamma < 1.0:
            raise ParameterError(f"gamma must lie in (0, 1), got {gamma}")
        beta = treesum_error_bound(n, m, budget.epsilon, gamma, c_tree)
        env_gamma = 0.0 if budget.epsilon == math.inf else gamma
        super().__init__(n, m, budget, AccuracyEnvelope(1.0, beta, env_gamma), update_bound)
        self.gamma = gamma
        self.c_tree = c_tree
        self.rng = rng
        self.levels = tree_levels(self.horizon)
        scale = 0.0 if budget.epsilon == math.inf else update_bound * self.levels / budget.epsilon
        self.node_scale = scale
        if update_bound != 1.0:
            logger.info("TreeSum noise scaled by update bound B=%.6g", update_bound)
        self._noise = []
        for level in range(self.levels):
            blocks = -(-self.horizon // (1 << level))  # ceil division
            self._noise.append(laplace(scale, rng, size=(blocks, self.dim)))

    def node_noise(self, level: int, index: int) -> np.ndarray:
        """Noise vector of dyadic node (level, index)."""
        return self._noise[level][index].copy()

    def _cover_noise(self, t: int) -> np.ndarray:
        s = np.zeros(self.dim)
        for level, idx in covering_blocks(t, self.levels):
            s += self._noise[level][idx]
        return s

    def _step(self, a: np.ndarray) -> np.ndarray:
        return self._true + self._cover_noise(self._t)


def ftsum_flag_count(n: int, m: int, eps: float, alpha: float, gamma: float,
                     c_tree: float) -> int:
    """Phase-switch flag count k = ceil(log_alpha(alpha/(alpha-1) * c_tree * log2(nm/gamma)/eps)).

    Clamped to k >= 1 for degenerate parameters (tiny n or infinite eps).
    """
    if eps == math.inf:
        raw = 0
    else:
        arg = alpha / (alpha - 1.0) * c_tree * math.log2(n * m / gamma) / eps
        raw = math.ceil(math.log(arg, alpha)) if arg > 1.0 else 0
    if raw < 1:
        logger.warning("FTSum flag count k=%d clamped to 1 (degenerate parameters)", raw)
        return 1
    return raw


def ftsum_phase_one_bound(n: int, m: int, k: int, eps_prime: float, gamma: float) -> float:
    """Documented phase-one additive error constant E1.

    Union bound over the at most m*(n + k + 2) Laplace(2/eps') draws of phase
    one: all stay within b = (2/eps') * ln(2*m*(n+k+2)/gamma) with probability
    at least 1 - gamma/2, so a flag fires within 2b of its threshold and the
    step estimate is off by at most 2b + log2(n).
    """
    if eps_prime == math.inf:
        return max(1.0, math.log2(n))
    draws = m * (n + k + 2)
    b = (2.0 / eps_prime) * math.log(2.0 * draws / gamma)
    return 2.0 * b + max(1.0, math.log2(n))


class FTSum(CounterMechanism):
    """Two-phase flag/tree counter with constant multiplicative error alpha.

    Per coordinate, phase one compares the noisy true sum against a noisy
    threshold log2(n) * alpha^flag; each exceedance raises the flag, redraws
    the threshold one geometric step up (fresh noise per comparison --
    sparse-vector hygiene), and the release steps to log2(n) * alpha^(flag-1)
    (0 while no flag is up). Once flag > k the coordinate permanently releases
    the embedded TreeSum, which is fed every update from t = 1 with budget
    eps/2. The per-comparison budget eps' = eps/(4m(k+1)) makes the ledger
    2m(k+1)*eps' + eps/2 close exactly at eps.
    """

    def __init__(self, n: int, m: int, eps: float, alpha: float, gamma: float,
                 c_tree: float, rng: RandomSource, *, update_bound: float = 1.0):
        if n < 1 or m < 1:
            raise ParameterError(f"need n >= 1 and m >= 1, got n={n}, m={m}")
        if not alpha > 1.0:
            raise ParameterError(f"alpha must be > 1, got {alpha}")
        if not 0.0 < gamma < 1.0:
            raise ParameterError(f"gamma must lie in (0, 1), got {gamma}")
        if not c_tree > 0:
            raise ParameterError(f"c_tree must be positive, got {c_tree}")
        budget = PrivacyBudget(eps)
        k = ftsum_flag_count(n, m, eps, alpha, gamma, c_tree)
        eps_prime = eps / (4.0 * m * (k + 1))
        if eps != math.inf:
            spent = 2.0 * m * (k + 1) * eps_prime + eps / 2.0
            assert spent <= eps * (1.0 + 1e-12), "FTSum budget ledger exceeds eps"
        beta = (ftsum_phase_one_bound(n, m, k, eps_prime, gamma)
                + treesum_error_bound(n, m, eps / 2.0, gamma / 2.0, c_tree))
        env_gamma = 0.0 if eps == math.inf else gamma
        super().__init__(n, m, budget, AccuracyEnvelope(alpha, beta, env_gamma), update_bound)
        self.alpha = alpha
        self.gamma = gamma
        self.c_tree = c_tree
        self.k = k
        self.eps_prime = eps_prime
        self.log_n = math.log2(n) if n > 1 else 0.0
        self.rng = rng
        self._flag_rng = rng.substream(0)
        self.tree = TreeSum(n, m, PrivacyBudget(eps / 2.0 if eps != math.inf else math.inf),
                            rng.substream(1), gamma=gamma, c_tree=c_tree,
                            update_bound=update_bound)
        self._cmp_scale = (0.0 if eps == math.inf
                           else 2.0 * update_bound / eps_prime)
        self.flags = np.zeros(m, dtype=int)
        self._acc = np.zeros(m)
        self.taus = np.array([self.log_n + laplace(self._cmp_scale, self._flag_rng)
                              for _ in range(m)])

    def in_phase_one(self) -> np.ndarray:
        """Boolean mask of coordinates still in the flag phase."""
        return self.flags <= self.k

    def _phase_one_value(self, flag: int) -> float:
        return 0.0 if flag == 0 else self.log_n * self.alpha ** (flag - 1)

    def _step(self, a: np.ndarray) -> np.ndarray:
        tree_y = self.tree.update(a)
        y = np.empty(self.dim)
        for r in range(self.dim):
            if self.flags[r] <= self.k:
                self._acc[r] += a[r]
                noisy = self._acc[r] + laplace(self._cmp_scale, self._flag_rng)
                if noisy > self.taus[r]:
                    self.flags[r] += 1
                    self.taus[r] = (self.log_n * self.alpha ** self.flags[r]
                                    + laplace(self._cmp_scale, self._flag_rng))
                y[r] = self._phase_one_value(int(self.flags[r]))
            else:
                y[r] = tree_y[r]
        return y


class PerfectCounter(CounterMechanism):
    """Releases exact prefix sums; envelope (1, 0, 0), a valid underestimator."""

    def __init__(self, n: int, m: int, update_bound: float = 1.0):
        super().__init__(n, m, PrivacyBudget(math.inf),
                         AccuracyEnvelope(1.0, 0.0, 0.0), update_bound)

    @property
    def is_underestimator(self) -> bool:
        return True

    def _step(self, a: np.ndarray) -> np.ndarray:
        return self._true.copy()


class EmptyCounter(CounterMechanism):
    """Releases the all-zero vector at every step; envelope (1, n*B, 0)."""

    def __init__(self, n: int, m: int, update_bound: float = 1.0):
        super().__init__(n, m, PrivacyBudget(math.inf),
                         AccuracyEnvelope(1.0, float(n) * update_bound, 0.0), update_bound)

    @property
    def is_underestimator(self) -> bool:
        return True

    def _step(self, a: np.ndarray) -> np.ndarray:
        return np.zeros(self.dim)


def perfect_counter(n: int, m: int, update_bound: float = 1.0) -> PerfectCounter:
    return PerfectCounter(n, m, update_bound)


def empty_counter(n: int, m: int, update_bound: float = 1.0) -> EmptyCounter:
    return EmptyCounter(n, m, update_bound)


class _Wrapper(CounterMechanism):
    """Base for wrappers: feeds the inner mechanism, transforms its releases."""

    def __init__(self, inner: CounterMechanism, envelope: AccuracyEnvelope,
                 budget: PrivacyBudget | None = None):
        super().__init__(inner.horizon, inner.dim, budget or inner.budget,
                         envelope, inner.update_bound)
        if inner.t != 0:
            raise StateError("wrappers must be applied before any update")
        self.inner = inner
        self._current = self._transform(inner.current)

    def _transform(self, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _step(self, a: np.ndarray) -> np.ndarray:
        return self._transform(self.inner.update(a))


class UnderestimatorWrapper(_Wrapper):
    """Shift y' = (y - beta)/alpha: envelope (alpha, beta, 0) becomes an
    (alpha^2, 2 beta/alpha, 0) underestimator (y' <= true count always)."""

    def __init__(self, inner: CounterMechanism):
        env = inner.envelope
        if env.gamma != 0.0:
            raise ParameterError(
                "underestimator wrapper needs a zero-failure (gamma = 0) envelope; "
                "apply wrap_zero_failure first")
        self._shift_alpha = env.alpha
        self._shift_beta = env.beta
        super().__init__(inner, AccuracyEnvelope(env.alpha ** 2, 2.0 * env.beta / env.alpha, 0.0))

    @property
    def is_underestimator(self) -> bool:
        return True

    def shift(self, y):
        """The release transform, exposed for grid checks."""
        return (np.asarray(y, dtype=float) - self._shift_beta) / self._shift_alpha

    def _transform(self, y: np.ndarray) -> np.ndarray:
        return self.shift(y)


class MonotoneWrapper(_Wrapper):
    """Nearest monotone integer sequence: starts at 0 and increments a
    coordinate by exactly 1 iff the wrapped noisy value exceeds the current
    reported value by more than 1/2. Envelope beta grows by 1."""

    def __init__(self, inner: CounterMechanism):
        env = inner.envelope
        self._reported = np.zeros(inner.dim)
        # underestimation survives for integer true counts: reported stays
        # within 1/2 above the inner value, which never exceeds the count
        self._under = inner.is_underestimator
        super().__init__(inner, AccuracyEnvelope(env.alpha, env.beta + 1.0, env.gamma))

    @property
    def is_underestimator(self) -> bool:
        return self._under

    def _transform(self, y: np.ndarray) -> np.ndarray:
        self._reported += (y > self._reported + 0.5).astype(float)
        return self._reported.copy()


class ZeroFailureWrapper(_Wrapper):
    """Clamp each release into the envelope using the true count, making the
    accuracy guarantee hold with probability 1; the privacy delta absorbs the
    inner failure mass gamma."""

    def __init__(self, inner: CounterMechanism, envelope: AccuracyEnvelope | None = None):
        env = envelope or inner.envelope
        target = AccuracyEnvelope(env.alpha, env.beta, 0.0)
        budget = PrivacyBudget(inner.budget.epsilon,
                               min(inner.budget.delta + inner.envelope.gamma, 1.0 - 1e-15))
        super().__init__(inner, target, budget)

    def _transform(self, y: np.ndarray) -> np.ndarray:
        x = self._true if self.t > 0 else np.zeros(self.dim)
        return np.clip(y, self.envelope.lower(x), self.envelope.upper(x))


def wrap_underestimator(mech: CounterMechanism) -> UnderestimatorWrapper:
    return UnderestimatorWrapper(mech)


def wrap_monotone(mech: CounterMechanism) -> MonotoneWrapper:
    return MonotoneWrapper(mech)


def wrap_zero_failure(mech: CounterMechanism,
                      envelope: AccuracyEnvelope | None = None) -> ZeroFailureWrapper:
    """Clamp into ``envelope`` (default: the mechanism's declared one).

    Passing a tighter target envelope is allowed: clamping enforces it
    deterministically, which is how experiments realize counters with chosen
    small (alpha, beta) instead of the loose analytic constants.
    """
    return ZeroFailureWrapper(mech, envelope)


def envelope_check(true_xs, released_ys, env: AccuracyEnvelope, tol: float = 1e-12):
    """Check a whole trace against an envelope.

    Returns (ok, violations) where violations is a boolean (steps, m) mask of
    out-of-envelope entries.
    """
    xs = np.atleast_2d(np.asarray(true_xs, dtype=float))
    ys = np.atleast_2d(np.asarray(released_ys, dtype=float))
    if xs.shape != ys.shape:
        raise ValidationError(f"trace shapes differ: {xs.shape} vs {ys.shape}")
    bad = (ys < env.lower(xs) - tol) | (ys > env.upper(xs) + tol)
    return not bool(bad.any()), bad


__all__ = [
    "PrivacyBudget",
    "AccuracyEnvelope",
    "validate_update",
    "tree_levels",
    "covering_blocks",
    "treesum_error_bound",
    "ftsum_flag_count",
    "ftsum_phase_one_bound",
    "CounterMechanism",
    "TreeSum",
    "FTSum",
    "PerfectCounter",
    "EmptyCounter",
    "perfect_counter",
    "empty_counter",
    "UnderestimatorWrapper",
    "MonotoneWrapper",
    "ZeroFailureWrapper",
    "wrap_underestimator",
    "wrap_monotone",
    "wrap_zero_failure",
    "envelope_check",
]
