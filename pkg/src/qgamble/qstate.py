"""Pure-state engine over the three-box basis {A, B, B'}.

A particle is stored in box A, box B, or (after Bob splits box B) box B'.
States are normalized complex amplitude triples. Every random choice is taken
from an injected stream with a ``random()`` method returning a uniform float on
[0, 1), so runs are reproducible.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .errors import DomainError

NORM_TOL = 1e-12
RENORM_TOL = 1e-9
# Probabilities this close to 0 or 1 are snapped so that certain events stay certain.
SNAP_TOL = 1e-12


class Uniform(Protocol):
    def random(self) -> float: ...


class BasisLabel(enum.Enum):
    BOX_A = 0
    BOX_B = 1
    BOX_B_PRIME = 2


@dataclass(frozen=True)
class PureState:
    """Normalized amplitudes over (A, B, B').

    Construction renormalizes silently when the squared norm is within 1e-9
    of one and raises :class:`DomainError` beyond that.
    """

    amp_a: complex
    amp_b: complex
    amp_bprime: complex

    def __post_init__(self):
        a, b, bp = complex(self.amp_a), complex(self.amp_b), complex(self.amp_bprime)
        norm2 = a.real * a.real + a.imag * a.imag + b.real * b.real + b.imag * b.imag + bp.real * bp.real + bp.imag * bp.imag
        # NaN/inf amplitudes fail this comparison too.
        if not abs(norm2 - 1.0) <= RENORM_TOL:
            raise DomainError(f"state is not normalized: squared norm {norm2!r} for {(a, b, bp)}")
        if abs(norm2 - 1.0) > NORM_TOL:
            scale = 1.0 / math.sqrt(norm2)
            a, b, bp = a * scale, b * scale, bp * scale
        setter = object.__setattr__
        setter(self, "amp_a", a)
        setter(self, "amp_b", b)
        setter(self, "amp_bprime", bp)

    @classmethod
    def normalized(cls, a: complex, b: complex, bprime: complex) -> PureState:
        """Build a state from an unnormalized nonzero vector."""
        norm = math.sqrt(abs(a) ** 2 + abs(b) ** 2 + abs(bprime) ** 2)
        if norm == 0.0:
            raise DomainError("cannot normalize the zero vector")
        return cls(a / norm, b / norm, bprime / norm)

    @classmethod
    def from_array(cls, amps) -> PureState:
        a, b, bp = (complex(z) for z in amps)
        return cls(a, b, bp)

    def as_array(self) -> np.ndarray:
        return np.array([self.amp_a, self.amp_b, self.amp_bprime], dtype=complex)

    def amplitude(self, label: BasisLabel) -> complex:
        return (self.amp_a, self.amp_b, self.amp_bprime)[label.value]

    def norm2(self) -> float:
        return abs(self.amp_a) ** 2 + abs(self.amp_b) ** 2 + abs(self.amp_bprime) ** 2

    def to_floats(self) -> tuple[float, ...]:
        """(re, im) per amplitude, in basis order A, B, B'."""
        return tuple(
            x for z in (self.amp_a, self.amp_b, self.amp_bprime) for x in (z.real, z.imag)
        )

    def serialize(self) -> str:
        return ",".join(format(x, ".17g") for x in self.to_floats())

    @classmethod
    def deserialize(cls, text: str) -> PureState:
        parts = [float(x) for x in text.split(",")]
        if len(parts) != 6:
            raise DomainError(f"expected 6 floats, got {len(parts)}")
        return cls(complex(parts[0], parts[1]), complex(parts[2], parts[3]), complex(parts[4], parts[5]))


@dataclass(frozen=True)
class MeasureOutcome:
    found: bool
    post_state: PureState


def check_probability(name: str, value: float, *, open_low: bool = False) -> float:
    value = float(value)
    if math.isnan(value) or value > 1.0 or value < 0.0 or (open_low and value == 0.0):
        interval = "(0, 1]" if open_low else "[0, 1]"
        raise DomainError(f"{name} must lie in {interval}, got {value!r}")
    return value


def _snap(p: float) -> float:
    if p < SNAP_TOL:
        return 0.0
    if p > 1.0 - SNAP_TOL:
        return 1.0
    return p


def prepare_alice(alpha: float) -> PureState:
    """sqrt(1-alpha)|a> + sqrt(alpha)|b>."""
    alpha = check_probability("alpha", alpha)
    return PureState(math.sqrt(1.0 - alpha), math.sqrt(alpha), 0.0)


def committed_state(gamma: float) -> PureState:
    """The publicly agreed state sqrt(1-gamma)|a> + sqrt(gamma)|b>."""
    gamma = check_probability("gamma", gamma, open_low=True)
    return PureState(math.sqrt(1.0 - gamma), math.sqrt(gamma), 0.0)


def split_b(state: PureState, beta: float) -> PureState:
    """Move a fraction beta of box B's weight into the new box B'."""
    beta = check_probability("beta", beta)
    b = state.amp_b
    return PureState.normalized(
        state.amp_a,
        math.sqrt(1.0 - beta) * b,
        state.amp_bprime + math.sqrt(beta) * b,
    )


def prob_in_b(state: PureState) -> float:
    return abs(state.amp_b) ** 2


def collapse_b(state: PureState, found: bool) -> PureState:
    """Renormalized projection onto |b> (found) or onto span{|a>, |b'>} (not found)."""
    if found:
        b = state.amp_b
        if b == 0:
            raise DomainError("cannot collapse onto box B: amplitude is zero")
        return PureState(0.0, b / abs(b), 0.0)
    return PureState.normalized(state.amp_a, 0.0, state.amp_bprime)


def measure_b(state: PureState, rng: Uniform) -> MeasureOutcome:
    """Open box B. Consumes exactly one uniform draw."""
    found = rng.random() < _snap(prob_in_b(state))
    return MeasureOutcome(found, collapse_b(state, found))


def reduced_committed(gamma: float, beta: float) -> PureState:
    """The committed state after splitting and a no-find collapse."""
    gamma = check_probability("gamma", gamma, open_low=True)
    beta = check_probability("beta", beta)
    denom = 1.0 - gamma + beta * gamma
    if denom == 0.0:
        raise DomainError(f"reduced committed state undefined at gamma={gamma!r}, beta={beta!r}")
    return PureState(math.sqrt((1.0 - gamma) / denom), 0.0, math.sqrt(beta * gamma / denom))


def overlap(s1: PureState, s2: PureState) -> complex:
    """<s1|s2>, conjugate-linear in the first argument."""
    return (
        s1.amp_a.conjugate() * s2.amp_a
        + s1.amp_b.conjugate() * s2.amp_b
        + s1.amp_bprime.conjugate() * s2.amp_bprime
    )


def mismatch_probability(post_state: PureState, gamma: float, beta: float) -> float:
    if abs(post_state.amp_b) > NORM_TOL:
        raise DomainError("verification needs a post-collapse state with empty box B")
    target = reduced_committed(gamma, beta)
    return 1.0 - _snap(abs(overlap(target, post_state)) ** 2)


def verify_mismatch(post_state: PureState, gamma: float, beta: float, rng: Uniform) -> bool:
    """Project onto the reduced committed state.

    Returns True when the projection fails, i.e. Alice provably deviated.
    Consumes exactly one uniform draw.
    """
    p_mismatch = mismatch_probability(post_state, gamma, beta)
    return rng.random() < p_mismatch
