"""Outcome probabilities and expected gains of one gambling round.

A round ends in one of three ways. Bob finds the particle in box B (he wins
``r_gain``), or he finds it absent and his verification exposes a mismatch
with the committed state (he wins ``r_gain``), or the verification passes and
Alice wins one coin.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .rng import RandomStream

SIMPLEX_TOL = 1e-12
P2_CROSSCHECK_TOL = 1e-10


@dataclass(frozen=True)
class GameConfig:
    gamma: float
    r_gain: float = 1.0

    def __post_init__(self):
        gamma, r = float(self.gamma), float(self.r_gain)
        if not 0.0 < gamma <= 1.0:
            raise DomainError(f"gamma must lie in (0, 1], got {gamma!r}")
        if not (r > 0.0 and math.isfinite(r)):
            raise DomainError(f"r_gain must be a positive finite number, got {r!r}")
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "r_gain", r)


@dataclass(frozen=True)
class Strategy:
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = float(getattr(self, name))
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {v!r}")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class OutcomeProbs:
    p1: float
    p2: float
    p3: float

    def __post_init__(self):
        ps = (self.p1, self.p2, self.p3)
        if any(not 0.0 <= p <= 1.0 for p in ps):
            raise DomainError(f"probabilities out of [0, 1]: {ps}")
        if abs(math.fsum(ps) - 1.0) > SIMPLEX_TOL:
            raise DomainError(f"probabilities do not sum to 1: {ps}")


class RoundOutcome(enum.Enum):
    FOUND_IN_B = "found_in_b"
    VERIFIED_MISMATCH = "verified_mismatch"
    VERIFIED_MATCH = "verified_match"

    @property
    def bob_wins(self) -> bool:
        return self is not RoundOutcome.VERIFIED_MATCH


def _p2_expanded(alpha, beta, gamma, denom):
    root = math.sqrt(gamma * alpha * (1.0 - alpha) * (1.0 - gamma))
    return beta * (gamma + alpha - 2.0 * gamma * alpha - 2.0 * root) / denom


def outcome_probs(strategy: Strategy, config: GameConfig) -> OutcomeProbs:
    """(P(found in B), P(verified mismatch), P(verified match)).

    The mismatch probability is computed three ways: as the remainder
    1 - p1 - p3, from the expanded closed form, and as the perfect square
    beta*(sqrt(gamma(1-alpha)) - sqrt(alpha(1-gamma)))^2 / denom. The last one
    is returned because it is non-negative and exactly zero when alpha == gamma.
    """
    a, b = strategy.alpha, strategy.beta
    g = config.gamma
    denom = 1.0 - g + b * g
    if denom == 0.0:
        if a == 1.0:
            return OutcomeProbs(1.0, 0.0, 0.0)
        raise DomainError(
            f"verification branch undefined at gamma={g!r}, beta={b!r} with alpha={a!r} < 1"
        )
    p1 = a * (1.0 - b)
    p3 = min(1.0, (math.sqrt((1.0 - a) * (1.0 - g)) + b * math.sqrt(g * a)) ** 2 / denom)
    p2 = b * (math.sqrt(g * (1.0 - a)) - math.sqrt(a * (1.0 - g))) ** 2 / denom

    remainder = 1.0 - p1 - p3
    expanded = _p2_expanded(a, b, g, denom)
    if abs(p2 - remainder) > P2_CROSSCHECK_TOL or abs(p2 - expanded) > P2_CROSSCHECK_TOL:
        raise ArithmeticError(
            f"mismatch probability routes disagree at alpha={a!r}, beta={b!r}, gamma={g!r}: "
            f"{p2!r}, {remainder!r}, {expanded!r}"
        )
    return OutcomeProbs(p1, p2, p3)


def gain_bob(probs: OutcomeProbs, config: GameConfig) -> float:
    r = config.r_gain
    return r * (probs.p1 + probs.p2) - probs.p3


def gain_alice(probs: OutcomeProbs, config: GameConfig) -> float:
    return -gain_bob(probs, config)


def gb_surface_value(strategy: Strategy, config: GameConfig) -> float:
    """Bob's expected gain per round for the given strategy pair."""
    return gain_bob(outcome_probs(strategy, config), config)


def printed_gain_bob(strategy: Strategy, config: GameConfig) -> float:
    """Closed-form gain in its as-printed form, sign error included.

    Diagnostic only. The square-root cross term carries the wrong sign, so
    this disagrees with :func:`gb_surface_value` whenever alpha, beta and
    gamma are all strictly inside (0, 1). At the fair anchor
    (alpha, beta, gamma, R) = (1/3, 1/4, 8/9, 1) it gives 8/9 instead of 0.
    """
    a, b = strategy.alpha, strategy.beta
    g, r = config.gamma, config.r_gain
    denom = 1.0 - g + b * g
    root = math.sqrt(g * a * (1.0 - a) * (1.0 - g))
    return (
        r * (a - g * a + b * g)
        - (1.0 - a) * (1.0 - g)
        - (1.0 + r) * (b * b * g * a - 2.0 * b * root)
    ) / denom


def gain_grid(alpha, beta, gamma: float, r_gain: float) -> np.ndarray:
    """Vectorized Bob gain over broadcast arrays of alpha and beta.

    Cells where the verification branch is undefined come back as NaN.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    denom = 1.0 - gamma + beta * gamma
    with np.errstate(divide="ignore", invalid="ignore"):
        p3 = (np.sqrt((1.0 - alpha) * (1.0 - gamma)) + beta * np.sqrt(gamma * alpha)) ** 2 / denom
    p3 = np.minimum(p3, 1.0)
    gb = r_gain - (1.0 + r_gain) * p3
    degenerate = denom == 0.0
    if np.any(degenerate):
        alpha_b = np.broadcast_to(alpha, gb.shape)
        gb = np.where(degenerate & (alpha_b == 1.0), r_gain, np.where(degenerate, np.nan, gb))
    return gb


def printed_gain_grid(alpha, beta, gamma: float, r_gain: float) -> np.ndarray:
    """Vectorized :func:`printed_gain_bob`; only for regression diagnostics."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    denom = 1.0 - gamma + beta * gamma
    root = np.sqrt(gamma * alpha * (1.0 - alpha) * (1.0 - gamma))
    with np.errstate(divide="ignore", invalid="ignore"):
        return (
            r_gain * (alpha - gamma * alpha + beta * gamma)
            - (1.0 - alpha) * (1.0 - gamma)
            - (1.0 + r_gain) * (beta * beta * gamma * alpha - 2.0 * beta * root)
        ) / denom


def _cumulative(probs: OutcomeProbs) -> tuple[float, float]:
    return probs.p1, probs.p1 + probs.p2


def sample_outcome(strategy: Strategy, config: GameConfig, rng) -> RoundOutcome:
    """Draw one round outcome from a single uniform."""
    c1, c2 = _cumulative(outcome_probs(strategy, config))
    u = rng.random()
    if u < c1:
        return RoundOutcome.FOUND_IN_B
    if u < c2:
        return RoundOutcome.VERIFIED_MISMATCH
    return RoundOutcome.VERIFIED_MATCH


@dataclass(frozen=True)
class MonteCarloSummary:
    n: int
    counts: tuple[int, int, int]
    mean: float
    stderr: float

    @property
    def frequencies(self) -> tuple[float, float, float]:
        return tuple(c / self.n for c in self.counts)


def monte_carlo(strategy: Strategy, config: GameConfig, n: int, seed: int) -> MonteCarloSummary:
    """Sample ``n`` rounds from stream ``seed``.

    Draws are identical to ``n`` successive :func:`sample_outcome` calls on
    ``RandomStream(seed)``, done in one vectorized batch.
    """
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    c1, c2 = _cumulative(outcome_probs(strategy, config))
    u = RandomStream(seed).random_array(n)
    n1 = int(np.count_nonzero(u < c1))
    n2 = int(np.count_nonzero(u < c2)) - n1
    n3 = n - n1 - n2

    r = config.r_gain
    wins = n1 + n2
    frac = wins / n
    mean = r * frac - n3 / n
    if n == 1:
        stderr = 0.0
    else:
        # Two-valued sample (+r, -1): unbiased variance from the win fraction.
        var = n / (n - 1) * frac * (1.0 - frac) * (r + 1.0) ** 2
        stderr = math.sqrt(var / n)
    return MonteCarloSummary(n, (n1, n2, n3), mean, stderr)


def monte_carlo_gain(strategy: Strategy, config: GameConfig, n: int, seed: int) -> tuple[float, float]:
    """(mean, stderr) of Bob's per-round settlement over ``n`` sampled rounds."""
    s = monte_carlo(strategy, config, n, seed)
    return s.mean, s.stderr
