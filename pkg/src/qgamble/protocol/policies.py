"""Alice and Bob policies, plus the compact spec strings the CLI accepts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from ..equilibrium import nash_point
from ..errors import DomainError
from ..io import parse_number
from ..payoff import GameConfig, RoundOutcome
from ..qstate import check_probability


@dataclass(frozen=True)
class FixedAlpha:
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_probability("alpha", self.alpha))


@dataclass(frozen=True)
class NashAlice:
    pass


@dataclass(frozen=True)
class SpotCheck:
    """With probability q prepare exactly the committed state; otherwise use alpha_otherwise.

    A mismatch claim on a spot-check round is a provable lie. It costs Bob
    ``penalty`` coins, and ends the session when ``abort_on_lie`` is set.
    """

    q: float
    alpha_otherwise: float
    penalty: float = 1.0
    abort_on_lie: bool = False

    def __post_init__(self):
        object.__setattr__(self, "q", check_probability("q", self.q))
        object.__setattr__(self, "alpha_otherwise", check_probability("alpha", self.alpha_otherwise))
        if not float(self.penalty) >= 0.0:
            raise DomainError(f"penalty must be non-negative, got {self.penalty!r}")
        object.__setattr__(self, "penalty", float(self.penalty))


@dataclass(frozen=True)
class FixedBeta:
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "beta", check_probability("beta", self.beta))


@dataclass(frozen=True)
class NashBob:
    pass


@dataclass(frozen=True)
class Liar:
    """Splits with ``beta`` and claims a mismatch on every round where box B is empty."""

    beta: float

    def __post_init__(self):
        object.__setattr__(self, "beta", check_probability("beta", self.beta))


AlicePolicy = Union[FixedAlpha, NashAlice, SpotCheck]
BobPolicy = Union[FixedBeta, NashBob, Liar]


def alice_choice(policy: AlicePolicy, config: GameConfig, rng) -> tuple[float, bool]:
    """(alpha, spot_check) for the next round. Only SpotCheck consumes a draw."""
    if isinstance(policy, FixedAlpha):
        return policy.alpha, False
    if isinstance(policy, NashAlice):
        return nash_point(config).alpha_star, False
    if isinstance(policy, SpotCheck):
        if rng.random() < policy.q:
            return config.gamma, True
        return policy.alpha_otherwise, False
    raise TypeError(f"unknown Alice policy {policy!r}")


def bob_beta(policy: BobPolicy, config: GameConfig) -> float:
    if isinstance(policy, (FixedBeta, Liar)):
        return policy.beta
    if isinstance(policy, NashBob):
        return nash_point(config).beta_star
    raise TypeError(f"unknown Bob policy {policy!r}")


def bob_claim(policy: BobPolicy, outcome: RoundOutcome) -> RoundOutcome:
    """What Bob reports given what physically happened."""
    if isinstance(policy, Liar) and outcome is not RoundOutcome.FOUND_IN_B:
        return RoundOutcome.VERIFIED_MISMATCH
    return outcome


def penalty_of(policy: AlicePolicy) -> float:
    return policy.penalty if isinstance(policy, SpotCheck) else 1.0


def _split_spec(spec: str) -> tuple[str, str]:
    name, _, rest = spec.strip().partition(":")
    return name.strip().lower(), rest.strip()


def parse_alice(spec: str) -> AlicePolicy:
    """``nash``, ``fixed:0.3`` or ``spotcheck:q=0.1,alpha=0.333,penalty=1[,abort=1]``."""
    name, rest = _split_spec(spec)
    try:
        if name == "nash" and not rest:
            return NashAlice()
        if name == "fixed":
            return FixedAlpha(parse_number(rest))
        if name == "spotcheck":
            fields = dict(kv.split("=", 1) for kv in rest.split(",") if kv)
            fields = {k.strip(): v.strip() for k, v in fields.items()}
            unknown = set(fields) - {"q", "alpha", "penalty", "abort"}
            if unknown or "q" not in fields or "alpha" not in fields:
                raise DomainError(f"spotcheck needs q= and alpha=, got {sorted(fields)}")
            return SpotCheck(
                q=parse_number(fields["q"]),
                alpha_otherwise=parse_number(fields["alpha"]),
                penalty=parse_number(fields.get("penalty", "1")),
                abort_on_lie=fields.get("abort", "0").lower() in ("1", "true", "yes"),
            )
    except ValueError as exc:
        raise DomainError(f"bad Alice policy {spec!r}: {exc}") from None
    raise DomainError(f"bad Alice policy {spec!r}")


def parse_bob(spec: str) -> BobPolicy:
    """``nash``, ``fixed:0.25`` or ``liar:0.25``."""
    name, rest = _split_spec(spec)
    try:
        if name == "nash" and not rest:
            return NashBob()
        if name == "fixed":
            return FixedBeta(parse_number(rest))
        if name == "liar":
            return Liar(parse_number(rest))
    except ValueError as exc:
        raise DomainError(f"bad Bob policy {spec!r}: {exc}") from None
    raise DomainError(f"bad Bob policy {spec!r}")
