"""Multi-round gambling sessions.

A classical program cannot hand two distrusting agents private quantum boxes,
so a physics referee stands in for nature: it owns the state, applies Alice's
preparation and Bob's split, and answers the two measurements. It is not a
trusted party of the protocol, and outcome truth goes only to the ledger,
never to the Alice agent.

One master seed drives one stream, consumed in a fixed order each round:
Alice's spot-check coin (SpotCheck policy only), the box-B measurement, then
the verification projection when box B was empty.

Over a transport, each endpoint runs an identical replica of the referee from
the shared seed and both policies. The replica is deterministic, so it plays
the role of shared physics without the state ever crossing the wire; the
messages carry only what the agents say. Alice's endpoint certifies found-in-B
claims against its replica and keeps the ledger.
"""

from __future__ import annotations

import hashlib
import io
import math
import threading
from dataclasses import dataclass, field

import numpy as np

from ..errors import FrameError, ProtocolViolation, TransportError
from ..io import fmt_bool, fmt_float, write_csv
from ..payoff import GameConfig, RoundOutcome
from ..qstate import measure_b, prepare_alice, split_b, verify_mismatch
from ..rng import RandomStream
from .policies import (
    AlicePolicy,
    BobPolicy,
    SpotCheck,
    alice_choice,
    bob_beta,
    bob_claim,
    penalty_of,
)
from .wire import Message, MessageKind

LEDGER_HEADER = ("round", "alpha", "beta", "spot_check", "outcome", "claim", "lie_detected", "settlement_bob")


@dataclass(frozen=True)
class RoundRecord:
    round: int
    alpha_used: float
    beta_used: float
    spot_check: bool
    outcome: RoundOutcome
    bob_claim: RoundOutcome
    lie_detected: bool
    settlement_bob: float
    rng_cursor: int


@dataclass
class Ledger:
    config: GameConfig
    seed: int
    records: list[RoundRecord] = field(default_factory=list)
    aborted: bool = False
    abort_reason: str | None = None
    transport_failed: bool = False
    transcript: list[Message] = field(default_factory=list, compare=False, repr=False)

    @property
    def bob_total(self) -> float:
        return math.fsum(r.settlement_bob for r in self.records)

    @property
    def alice_total(self) -> float:
        return -self.bob_total

    @property
    def mean_gain(self) -> float:
        return self.bob_total / len(self.records) if self.records else float("nan")

    @property
    def stderr(self) -> float:
        n = len(self.records)
        if n < 2:
            return 0.0 if n == 1 else float("nan")
        s = np.fromiter((r.settlement_bob for r in self.records), dtype=float, count=n)
        return float(np.std(s, ddof=1) / math.sqrt(n))

    def to_csv(self) -> str:
        buf = io.StringIO()
        rows = (
            (
                str(r.round),
                fmt_float(r.alpha_used),
                fmt_float(r.beta_used),
                fmt_bool(r.spot_check),
                r.outcome.value,
                r.bob_claim.value,
                fmt_bool(r.lie_detected),
                fmt_float(r.settlement_bob),
            )
            for r in self.records
        )
        write_csv(buf, LEDGER_HEADER, rows)
        return buf.getvalue()

    def summary(self) -> dict:
        out = {
            "rounds": len(self.records),
            "bob_total": self.bob_total,
            "mean_gain": self.mean_gain if self.records else None,
            "stderr": self.stderr if self.records else None,
            "aborted": self.aborted,
        }
        if self.aborted:
            out["abort_reason"] = self.abort_reason
        return out


@dataclass(frozen=True)
class _Physics:
    alpha: float
    beta: float
    spot_check: bool
    outcome: RoundOutcome
    rng_cursor: int


def _play_physics(config: GameConfig, a_policy: AlicePolicy, b_policy: BobPolicy, rng) -> _Physics:
    alpha, spot = alice_choice(a_policy, config, rng)
    beta = bob_beta(b_policy, config)
    state = split_b(prepare_alice(alpha), beta)
    m = measure_b(state, rng)
    if m.found:
        outcome = RoundOutcome.FOUND_IN_B
    elif verify_mismatch(m.post_state, config.gamma, beta, rng):
        outcome = RoundOutcome.VERIFIED_MISMATCH
    else:
        outcome = RoundOutcome.VERIFIED_MATCH
    return _Physics(alpha, beta, spot, outcome, getattr(rng, "draws", 0))


def _settle(config: GameConfig, a_policy: AlicePolicy, rnd: int, phys: _Physics, claim: RoundOutcome) -> RoundRecord:
    found = phys.outcome is RoundOutcome.FOUND_IN_B
    if (claim is RoundOutcome.FOUND_IN_B) != found:
        raise ProtocolViolation(
            f"round {rnd}: Bob claimed {claim.value} but the referee measured {phys.outcome.value}"
        )
    lie = phys.spot_check and claim is RoundOutcome.VERIFIED_MISMATCH
    if lie:
        settlement = 0.0 - penalty_of(a_policy)
    elif claim.bob_wins:
        settlement = config.r_gain
    else:
        settlement = -1.0
    return RoundRecord(
        round=rnd,
        alpha_used=phys.alpha,
        beta_used=phys.beta,
        spot_check=phys.spot_check,
        outcome=phys.outcome,
        bob_claim=claim,
        lie_detected=lie,
        settlement_bob=settlement,
        rng_cursor=phys.rng_cursor,
    )


def _ends_session(a_policy: AlicePolicy, record: RoundRecord) -> bool:
    return record.lie_detected and isinstance(a_policy, SpotCheck) and a_policy.abort_on_lie


def run_round(config: GameConfig, a_policy: AlicePolicy, b_policy: BobPolicy, round: int, rng) -> RoundRecord:
    """Play one round through the state-vector engine and settle it."""
    phys = _play_physics(config, a_policy, b_policy, rng)
    return _settle(config, a_policy, round, phys, bob_claim(b_policy, phys.outcome))


def run_session(config: GameConfig, a_policy: AlicePolicy, b_policy: BobPolicy, n_rounds: int, seed: int) -> Ledger:
    if n_rounds < 1:
        raise ValueError(f"n_rounds must be at least 1, got {n_rounds}")
    rng = RandomStream(seed)
    ledger = Ledger(config, seed)
    for k in range(n_rounds):
        try:
            record = run_round(config, a_policy, b_policy, k, rng)
        except ProtocolViolation as exc:
            ledger.aborted, ledger.abort_reason = True, str(exc)
            break
        ledger.records.append(record)
        if _ends_session(a_policy, record):
            ledger.aborted, ledger.abort_reason = True, f"round {k}: lie detected"
            break
    return ledger


def seed_commitment(seed: int) -> str:
    return hashlib.sha256(f"qgamble-seed:{seed}".encode()).hexdigest()


def _agree(config: GameConfig, rnd: int, n_rounds: int, seed: int) -> Message:
    return Message(
        rnd,
        MessageKind.AGREE,
        {"gamma": config.gamma, "r": config.r_gain, "n_rounds": n_rounds, "seed_commitment": seed_commitment(seed)},
    )


def round_messages(record: RoundRecord, config: GameConfig, n_rounds: int, seed: int, aborts: bool = False) -> list[Message]:
    """The wire transcript a settled round produces."""
    k = record.round
    ref = {"state_ref": f"r{k}"}
    msgs = [_agree(config, k, n_rounds, seed), Message(k, MessageKind.BOX_B, dict(ref))]
    if record.bob_claim is RoundOutcome.FOUND_IN_B:
        msgs.append(Message(k, MessageKind.FOUND_CLAIM, {"found": True}))
    else:
        msgs += [
            Message(k, MessageKind.REQUEST_A, {}),
            Message(k, MessageKind.BOX_A, dict(ref)),
            Message(k, MessageKind.VERIFY_CLAIM, {"mismatch": record.bob_claim is RoundOutcome.VERIFIED_MISMATCH}),
        ]
    if aborts:
        msgs.append(Message(k, MessageKind.ABORT, {"reason": f"round {k}: lie detected"}))
    else:
        msgs.append(Message(k, MessageKind.SETTLE, {"bob_delta": record.settlement_bob}))
    return msgs


class _Log:
    """Wraps a channel and keeps every message that passes through it."""

    def __init__(self, channel, transcript: list[Message]):
        self.channel = channel
        self.transcript = transcript

    def send(self, msg: Message) -> None:
        self.channel.send(msg)
        self.transcript.append(msg)

    def recv(self, rnd: int, *kinds: MessageKind) -> Message:
        msg = self.channel.recv()
        self.transcript.append(msg)
        if msg.kind is MessageKind.ABORT:
            raise _PeerAbort(msg.payload["reason"])
        if msg.round != rnd or msg.kind not in kinds:
            expected = "|".join(k.value for k in kinds)
            raise ProtocolViolation(f"round {rnd}: expected {expected}, got {msg.kind.value} for round {msg.round}")
        return msg


class _PeerAbort(Exception):
    pass


def alice_endpoint(channel, config: GameConfig, a_policy: AlicePolicy, b_policy: BobPolicy, n_rounds: int, seed: int) -> Ledger:
    """Host side: Alice's agent plus the certifying referee replica. Returns the ledger."""
    rng = RandomStream(seed)
    ledger = Ledger(config, seed)
    log = _Log(channel, ledger.transcript)
    for k in range(n_rounds):
        try:
            phys = _play_physics(config, a_policy, b_policy, rng)
            ref = {"state_ref": f"r{k}"}
            log.send(_agree(config, k, n_rounds, seed))
            log.send(Message(k, MessageKind.BOX_B, dict(ref)))
            msg = log.recv(k, MessageKind.FOUND_CLAIM, MessageKind.REQUEST_A)
            if msg.kind is MessageKind.FOUND_CLAIM:
                if not msg.payload["found"]:
                    raise ProtocolViolation(f"round {k}: found_claim with found=false; expected request_a")
                claim = RoundOutcome.FOUND_IN_B
            else:
                log.send(Message(k, MessageKind.BOX_A, dict(ref)))
                msg = log.recv(k, MessageKind.VERIFY_CLAIM)
                claim = RoundOutcome.VERIFIED_MISMATCH if msg.payload["mismatch"] else RoundOutcome.VERIFIED_MATCH
            record = _settle(config, a_policy, k, phys, claim)
            if _ends_session(a_policy, record):
                reason = f"round {k}: lie detected"
                log.send(Message(k, MessageKind.ABORT, {"reason": reason}))
                ledger.records.append(record)
                ledger.aborted, ledger.abort_reason = True, reason
                break
            log.send(Message(k, MessageKind.SETTLE, {"bob_delta": record.settlement_bob}))
            ledger.records.append(record)
        except ProtocolViolation as exc:
            _try_send(log, Message(k, MessageKind.ABORT, {"reason": str(exc)}))
            ledger.aborted, ledger.abort_reason = True, str(exc)
            break
        except _PeerAbort as exc:
            ledger.aborted, ledger.abort_reason = True, f"round {k}: peer aborted: {exc}"
            break
        except (TransportError, FrameError) as exc:
            ledger.aborted, ledger.abort_reason = True, f"round {k}: transport failure: {exc}"
            ledger.transport_failed = True
            break
    return ledger


def bob_endpoint(channel, config: GameConfig, a_policy: AlicePolicy, b_policy: BobPolicy, n_rounds: int, seed: int) -> int:
    """Remote side: Bob's agent with its own referee replica.

    Returns the number of rounds that were settled.
    """
    rng = RandomStream(seed)
    transcript: list[Message] = []
    log = _Log(channel, transcript)
    settled = 0
    for k in range(n_rounds):
        try:
            agree = log.recv(k, MessageKind.AGREE)
            if agree.payload != _agree(config, k, n_rounds, seed).payload:
                raise ProtocolViolation(f"round {k}: session terms differ: {agree.payload}")
            log.recv(k, MessageKind.BOX_B)
            phys = _play_physics(config, a_policy, b_policy, rng)
            claim = bob_claim(b_policy, phys.outcome)
            if claim is RoundOutcome.FOUND_IN_B:
                log.send(Message(k, MessageKind.FOUND_CLAIM, {"found": True}))
            else:
                log.send(Message(k, MessageKind.REQUEST_A, {}))
                log.recv(k, MessageKind.BOX_A)
                log.send(Message(k, MessageKind.VERIFY_CLAIM, {"mismatch": claim is RoundOutcome.VERIFIED_MISMATCH}))
            log.recv(k, MessageKind.SETTLE)
            settled += 1
        except ProtocolViolation as exc:
            _try_send(log, Message(k, MessageKind.ABORT, {"reason": str(exc)}))
            break
        except (_PeerAbort, TransportError, FrameError):
            break
    return settled


def _try_send(log: _Log, msg: Message) -> None:
    try:
        log.send(msg)
    except TransportError:
        pass


def run_session_over_transport(
    config: GameConfig,
    a_policy: AlicePolicy,
    b_policy: BobPolicy,
    n_rounds: int,
    seed: int,
    transport=None,
    timeout: float = 10.0,
) -> Ledger:
    """Run a session with Alice and Bob talking over a duplex byte stream.

    ``transport`` is a pair of connected sockets (Alice's end, Bob's end); a
    fresh socketpair is used when omitted. Bob's endpoint runs on a worker
    thread. The ledger matches :func:`run_session` for the same seed.
    """
    from .transport import LineChannel, loopback_pair

    if n_rounds < 1:
        raise ValueError(f"n_rounds must be at least 1, got {n_rounds}")
    if transport is None:
        alice_ch, bob_ch = loopback_pair(timeout)
    else:
        alice_sock, bob_sock = transport
        alice_ch, bob_ch = LineChannel(alice_sock, timeout), LineChannel(bob_sock, timeout)

    def bob_side():
        try:
            bob_endpoint(bob_ch, config, a_policy, b_policy, n_rounds, seed)
        finally:
            bob_ch.close()

    worker = threading.Thread(target=bob_side, name="bob-endpoint", daemon=True)
    worker.start()
    try:
        ledger = alice_endpoint(alice_ch, config, a_policy, b_policy, n_rounds, seed)
    finally:
        alice_ch.close()
        worker.join(timeout)
    return ledger
