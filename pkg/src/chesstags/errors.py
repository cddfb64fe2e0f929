"""Exception hierarchy shared across the package."""


class ChessTagsError(Exception):
    """Base class for all package errors."""


class InvalidPosition(ChessTagsError):
    """A board state violates a structural invariant."""


class IllegalMove(ChessTagsError):
    """A move is not legal in the position it was applied to."""


class UnparseableSan(ChessTagsError):
    """SAN text that does not match the SAN grammar."""


class AmbiguousMove(ChessTagsError):
    """SAN that matches more than one legal move."""


class JsonSyntax(ChessTagsError):
    """Malformed JSONL input; message carries the line number."""


class PgnSyntax(ChessTagsError):
    """Malformed PGN input; carries position and reason."""

    def __init__(self, reason: str, line: int | None = None):
        self.reason = reason
        self.line = line
        loc = f" (line {line})" if line is not None else ""
        super().__init__(f"{reason}{loc}")


class InconsistentState(ChessTagsError):
    """Board does not match the replayed game record."""


class EngineSpawnFailure(ChessTagsError):
    """Engine executable or transcript could not be opened."""


class HandshakeTimeout(ChessTagsError):
    """UCI handshake did not complete in time."""


class ProtocolViolation(ChessTagsError):
    """Engine traffic deviated from the UCI protocol or transcript."""


class EngineCrashed(ChessTagsError):
    """Engine process or transcript ended mid-search."""


class SearchTimeout(ChessTagsError):
    """Engine search did not finish in time."""


class UnparseableInfo(ChessTagsError):
    """An engine info/bestmove line could not be parsed."""


class BackendUnreachable(ChessTagsError):
    """Generation or score backend could not be reached."""


class BackendTimeout(ChessTagsError):
    """Backend did not answer in time."""


class MalformedResponse(ChessTagsError):
    """Backend response did not follow the wire contract."""


class NonFiniteScore(ChessTagsError):
    """Score backend returned a NaN or infinite log-probability."""


class LengthMismatch(ChessTagsError):
    """Prediction and gold sequences have different lengths."""
