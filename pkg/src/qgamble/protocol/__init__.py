from .policies import (
    AlicePolicy,
    BobPolicy,
    FixedAlpha,
    FixedBeta,
    Liar,
    NashAlice,
    NashBob,
    SpotCheck,
    parse_alice,
    parse_bob,
)
from .session import (
    Ledger,
    RoundRecord,
    alice_endpoint,
    bob_endpoint,
    round_messages,
    run_round,
    run_session,
    run_session_over_transport,
)
from .wire import Message, MessageKind, accepts_round, decode_message, encode_message

__all__ = [
    "AlicePolicy",
    "BobPolicy",
    "FixedAlpha",
    "FixedBeta",
    "Ledger",
    "Liar",
    "Message",
    "MessageKind",
    "NashAlice",
    "NashBob",
    "RoundRecord",
    "SpotCheck",
    "accepts_round",
    "alice_endpoint",
    "bob_endpoint",
    "decode_message",
    "encode_message",
    "parse_alice",
    "parse_bob",
    "round_messages",
    "run_round",
    "run_session",
    "run_session_over_transport",
]
