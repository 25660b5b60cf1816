"""Exception types shared across the package."""


class DomainError(ValueError):
    """A parameter lies outside the domain where the operation is defined."""


class ProtocolViolation(RuntimeError):
    """An agent sent a claim that is inconsistent with the physics or the round grammar."""


class FrameError(ValueError):
    """A wire frame could not be decoded.

    ``offset`` is the byte offset into the frame where decoding failed.
    """

    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class UnsupportedVersion(FrameError):
    pass


class TransportError(RuntimeError):
    """The byte stream failed (closed, timed out) before the session finished."""
