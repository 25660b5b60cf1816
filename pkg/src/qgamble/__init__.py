"""Two-party quantum gambling: state simulation, payoffs, equilibrium and protocol sessions."""

from .equilibrium import (
    NashPoint,
    SaddleReport,
    SurfaceTable,
    best_response_alpha,
    best_response_beta,
    delta_of,
    gamma_for,
    nash_point,
    stationarity_check,
    surface,
    verify_saddle,
)
from .errors import DomainError, FrameError, ProtocolViolation, TransportError, UnsupportedVersion
from .payoff import (
    GameConfig,
    OutcomeProbs,
    RoundOutcome,
    Strategy,
    gain_alice,
    gain_bob,
    gb_surface_value,
    monte_carlo_gain,
    outcome_probs,
    printed_gain_bob,
    sample_outcome,
)
from .rng import RandomStream, derive_stream

__version__ = "0.1.0"
