"""Newline-delimited JSON framing for protocol messages.

One message per line::

    {"v":1,"round":3,"kind":"box_b","payload":{"state_ref":"r3"}}

Decoding never crashes on hostile input: every problem surfaces as a
:class:`FrameError` carrying the byte offset where it was detected.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

from ..errors import FrameError, UnsupportedVersion

VERSION = 1
_U64_MAX = (1 << 64) - 1


class MessageKind(enum.Enum):
    AGREE = "agree"
    BOX_B = "box_b"
    FOUND_CLAIM = "found_claim"
    REQUEST_A = "request_a"
    BOX_A = "box_a"
    VERIFY_CLAIM = "verify_claim"
    SETTLE = "settle"
    ABORT = "abort"


_NUMBER = "number"
PAYLOAD_FIELDS: dict[MessageKind, dict[str, object]] = {
    MessageKind.AGREE: {"gamma": _NUMBER, "r": _NUMBER, "n_rounds": int, "seed_commitment": str},
    MessageKind.BOX_B: {"state_ref": str},
    MessageKind.FOUND_CLAIM: {"found": bool},
    MessageKind.REQUEST_A: {},
    MessageKind.BOX_A: {"state_ref": str},
    MessageKind.VERIFY_CLAIM: {"mismatch": bool},
    MessageKind.SETTLE: {"bob_delta": _NUMBER},
    MessageKind.ABORT: {"reason": str},
}


@dataclass(frozen=True)
class Message:
    round: int
    kind: MessageKind
    payload: dict = field(default_factory=dict)
    version: int = VERSION


def _type_ok(value, expected) -> bool:
    if expected is _NUMBER:
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if expected is int:
        return isinstance(value, int) and not isinstance(value, bool)
    return isinstance(value, expected)


def encode_message(msg: Message) -> bytes:
    obj = {"v": msg.version, "round": msg.round, "kind": msg.kind.value, "payload": msg.payload}
    return (json.dumps(obj, separators=(",", ":"), allow_nan=False) + "\n").encode("utf-8")


def _offset_of(text: str, key: str) -> int:
    i = text.find(f'"{key}"')
    return len(text[: max(i, 0)].encode("utf-8"))


def decode_message(frame: bytes) -> Message:
    if not frame.endswith(b"\n"):
        raise FrameError("truncated frame: missing LF terminator", len(frame))
    body = frame[:-1]
    nl = body.find(b"\n")
    if nl >= 0:
        raise FrameError("more than one line in frame", nl)
    try:
        text = body.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FrameError("invalid UTF-8", exc.start) from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FrameError(f"malformed JSON: {exc.msg}", len(text[: exc.pos].encode("utf-8"))) from None
    if not isinstance(obj, dict):
        raise FrameError("frame is not a JSON object", 0)

    keys = set(obj)
    if keys != {"v", "round", "kind", "payload"}:
        raise FrameError(f"frame keys {sorted(keys)} != ['kind', 'payload', 'round', 'v']", 0)
    version = obj["v"]
    if not _type_ok(version, int):
        raise FrameError("version is not an integer", _offset_of(text, "v"))
    if version != VERSION:
        raise UnsupportedVersion(f"unsupported protocol version {version}", _offset_of(text, "v"))
    rnd = obj["round"]
    if not _type_ok(rnd, int) or not 0 <= rnd <= _U64_MAX:
        raise FrameError("round is not an unsigned 64-bit integer", _offset_of(text, "round"))
    try:
        kind = MessageKind(obj["kind"])
    except (ValueError, TypeError):
        raise FrameError(f"unknown message kind {obj['kind']!r}", _offset_of(text, "kind")) from None

    payload = obj["payload"]
    where = _offset_of(text, "payload")
    if not isinstance(payload, dict):
        raise FrameError("payload is not an object", where)
    spec = PAYLOAD_FIELDS[kind]
    if set(payload) != set(spec):
        raise FrameError(f"{kind.value} payload needs fields {sorted(spec)}, got {sorted(payload)}", where)
    for name, expected in spec.items():
        if not _type_ok(payload[name], expected):
            raise FrameError(f"{kind.value}.{name} has the wrong type", where)
    return Message(round=rnd, kind=kind, payload=payload, version=version)


# Per-round grammar:
#   agree box_b ( found_claim settle | request_a box_a verify_claim (settle | abort) )
# An abort may also cut a round short after any prefix (protocol violation, transport trouble).
_K = MessageKind
_TRANSITIONS = {
    None: {_K.AGREE},
    _K.AGREE: {_K.BOX_B},
    _K.BOX_B: {_K.FOUND_CLAIM, _K.REQUEST_A},
    _K.FOUND_CLAIM: {_K.SETTLE},
    _K.REQUEST_A: {_K.BOX_A},
    _K.BOX_A: {_K.VERIFY_CLAIM},
    _K.VERIFY_CLAIM: {_K.SETTLE, _K.ABORT},
}
_FINAL = {_K.SETTLE, _K.ABORT}


def accepts_round(kinds) -> bool:
    """True if ``kinds`` is one complete round of the message grammar."""
    prev = None
    for i, kind in enumerate(kinds):
        if prev in _FINAL:
            return False
        if kind not in _TRANSITIONS.get(prev, set()) and not (kind is _K.ABORT and i > 0):
            return False
        prev = kind
    return prev in _FINAL
