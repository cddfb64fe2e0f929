"""UCI engine adapter: sessions, win probabilities, move-quality classes.

Works against a real engine binary over stdio or against a scripted
transcript file (fake-engine mode) so tests and CI need no engine.
Transcript format: lines starting with "> " are the commands the adapter
is expected to send, lines starting with "< " are the engine's scripted
replies; blank lines and "#" comments are ignored.
"""

from __future__ import annotations

import math
import queue
import subprocess
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from .core import BoardState, MoveRecord, apply_move, format_san, legal_moves
from .errors import (
    EngineCrashed,
    EngineSpawnFailure,
    HandshakeTimeout,
    ProtocolViolation,
    SearchTimeout,
    UnparseableInfo,
)
from .tags import (
    CommentaryType,
    LengthTag,
    MoveQuality,
    SuggestedLine,
    TagSet,
)

__all__ = [
    "EngineConfig",
    "EngineEval",
    "EngineSession",
    "QualityThresholds",
    "RawScore",
    "TagRequest",
    "open_session",
    "score_to_winprob",
    "classify_delta",
    "derive_tags",
    "DEFAULT_THRESHOLDS",
    "DEFAULT_LOGISTIC_SCALE",
]

DEFAULT_LOGISTIC_SCALE = 0.004  # per centipawn


@dataclass(frozen=True)
class EngineConfig:
    executable: str | None = None
    transcript: str | Path | None = None
    nodes: int | None = 10000
    depth: int | None = None
    multipv: int = 1
    winprob_source: str = "cp-logistic"  # or "engine-wdl"
    logistic_scale: float = DEFAULT_LOGISTIC_SCALE
    handshake_timeout: float = 10.0
    search_timeout: float = 120.0

    def __post_init__(self):
        if (self.executable is None) == (self.transcript is None):
            raise ValueError("exactly one of executable/transcript required")
        if self.multipv < 1:
            raise ValueError("multipv must be >= 1")
        budget = self.nodes if self.nodes is not None else self.depth
        if budget is None or budget <= 0:
            raise ValueError("search budget must be positive")


@dataclass(frozen=True)
class RawScore:
    kind: str  # "cp" | "mate" | "wdl"
    cp: int | None = None
    mate: int | None = None
    wdl: tuple[int, int, int] | None = None


@dataclass(frozen=True)
class EngineEval:
    best_move: MoveRecord
    win_prob: float
    pvs: tuple[tuple[tuple[str, ...], float], ...]  # (SAN line, win prob)


@dataclass(frozen=True)
class QualityThresholds:
    """Ordered (upper bound, class) breakpoints over the win-probability
    drop; anything above the last bound falls in ``final``."""

    breakpoints: tuple[tuple[float, MoveQuality], ...] = (
        (0.02, MoveQuality.EXCELLENT),
        (0.05, MoveQuality.GOOD),
        (0.10, MoveQuality.INACCURACY),
        (0.20, MoveQuality.MISTAKE),
    )
    final: MoveQuality = MoveQuality.BLUNDER

    def __post_init__(self):
        bounds = [b for b, _ in self.breakpoints]
        if bounds != sorted(bounds) or len(set(bounds)) != len(bounds):
            raise ValueError("breakpoints must be strictly increasing")
        order = list(MoveQuality)
        classes = [cls for _, cls in self.breakpoints] + [self.final]
        ranks = [order.index(cls) for cls in classes]
        if ranks != sorted(ranks):
            raise ValueError("classes must get worse as the drop grows")

    def classify(self, delta: float) -> MoveQuality:
        for bound, cls in self.breakpoints:
            if delta <= bound:
                return cls
        return self.final


DEFAULT_THRESHOLDS = QualityThresholds()


def score_to_winprob(score: RawScore, config: EngineConfig | None = None) -> float:
    """Win probability for the side to move, in [0, 1]."""
    scale = config.logistic_scale if config else DEFAULT_LOGISTIC_SCALE
    if score.kind == "mate":
        return 1.0 if score.mate > 0 else 0.0
    if score.kind == "wdl":
        w, d, _ = score.wdl
        return (w + 0.5 * d) / 1000.0
    return 1.0 / (1.0 + math.exp(-scale * score.cp))


def classify_delta(
    p_best: float, p_played: float, thresholds: QualityThresholds = DEFAULT_THRESHOLDS
) -> tuple[MoveQuality, float]:
    """Win-probability drop and its class; search-noise negatives clamp to 0."""
    if not (0.0 <= p_best <= 1.0 and 0.0 <= p_played <= 1.0):
        raise ValueError("probabilities must lie in [0, 1]")
    delta = max(0.0, p_best - p_played)
    return thresholds.classify(delta), delta


# -- transports --------------------------------------------------------------


class _ProcessTransport:
    def __init__(self, executable: str):
        try:
            self._proc = subprocess.Popen(
                [executable],
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise EngineSpawnFailure(f"cannot start {executable!r}: {exc}") from exc
        self._lines: queue.Queue[str | None] = queue.Queue()
        self._reader = threading.Thread(target=self._pump, daemon=True)
        self._reader.start()

    def _pump(self):
        for line in self._proc.stdout:
            self._lines.put(line.rstrip("\n"))
        self._lines.put(None)

    def send(self, command: str) -> None:
        if self._proc.poll() is not None:
            raise EngineCrashed("engine process has exited")
        self._proc.stdin.write(command + "\n")
        self._proc.stdin.flush()

    def readline(self, timeout: float) -> str | None:
        try:
            return self._lines.get(timeout=timeout)
        except queue.Empty:
            return "__timeout__"

    def close(self):
        try:
            self._proc.stdin.close()
        except OSError:
            pass
        self._proc.wait(timeout=5)


class _TranscriptTransport:
    """Replays a scripted exchange.  Sent commands must match the next
    expected line; replies are returned until the next expectation."""

    def __init__(self, path: str | Path):
        try:
            raw = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise EngineSpawnFailure(f"cannot read transcript {path!r}: {exc}") from exc
        self.events: list[tuple[str, str]] = []
        for line in raw.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("> "):
                self.events.append(("expect", line[2:]))
            elif line.startswith("< "):
                self.events.append(("reply", line[2:]))
            else:
                raise EngineSpawnFailure(f"bad transcript line: {line!r}")
        self.cursor = 0

    def send(self, command: str) -> None:
        # Skip unread replies: a real engine keeps talking whether or not
        # we listen, and "quit"/"stop" may arrive early.
        while self.cursor < len(self.events) and self.events[self.cursor][0] == "reply":
            self.cursor += 1
        if self.cursor >= len(self.events):
            if command == "quit":
                return
            raise ProtocolViolation(f"transcript exhausted; sent {command!r}")
        kind, expected = self.events[self.cursor]
        if expected != command:
            raise ProtocolViolation(f"sent {command!r}, transcript expects {expected!r}")
        self.cursor += 1

    def readline(self, timeout: float) -> str | None:
        if self.cursor < len(self.events) and self.events[self.cursor][0] == "reply":
            line = self.events[self.cursor][1]
            self.cursor += 1
            return line
        return "__timeout__"  # nothing scripted: behaves like a silent engine

    def close(self):
        pass


# -- session -----------------------------------------------------------------


class EngineSession:
    """One engine process (or transcript); commands never interleave."""

    def __init__(self, config: EngineConfig):
        self.config = config
        self.id_lines: list[str] = []
        self._lock = threading.Lock()
        if config.transcript is not None:
            self._transport = _TranscriptTransport(config.transcript)
        else:
            self._transport = _ProcessTransport(config.executable)
        self._handshake()

    def _read(self, timeout: float) -> str | None:
        line = self._transport.readline(timeout)
        if line == "__timeout__":
            return None
        return line

    def _handshake(self):
        timeout = self.config.handshake_timeout
        self._transport.send("uci")
        deadline = time.monotonic() + timeout
        while True:
            line = self._read(max(0.0, deadline - time.monotonic()) or 0.001)
            if line is None:
                raise HandshakeTimeout("no 'uciok' from engine")
            if line.startswith("id "):
                self.id_lines.append(line)
            if line.strip() == "uciok":
                break
        self._transport.send(f"setoption name MultiPV value {self.config.multipv}")
        self._transport.send("ucinewgame")
        self._transport.send("isready")
        deadline = time.monotonic() + timeout
        while True:
            line = self._read(max(0.0, deadline - time.monotonic()) or 0.001)
            if line is None:
                raise HandshakeTimeout("no 'readyok' from engine")
            if line.strip() == "readyok":
                break

    def evaluate(
        self,
        board: BoardState,
        multipv: int | None = None,
        nodes: int | None = None,
        depth: int | None = None,
    ) -> EngineEval:
        """Search ``board`` and convert the engine's report to win
        probabilities (always from the side to move's perspective)."""
        with self._lock:
            return self._evaluate(board, multipv, nodes, depth)

    def _evaluate(self, board, multipv, nodes, depth) -> EngineEval:
        config = self.config
        self._transport.send(f"position fen {board.to_fen()}")
        nodes = nodes if nodes is not None else config.nodes
        depth = depth if depth is not None else config.depth
        if nodes is not None:
            self._transport.send(f"go nodes {nodes}")
        else:
            self._transport.send(f"go depth {depth}")

        infos: dict[int, tuple[RawScore, list[str]]] = {}
        bestmove_uci: str | None = None
        deadline = time.monotonic() + config.search_timeout
        while True:
            line = self._read(max(0.0, deadline - time.monotonic()) or 0.001)
            if line is None:
                raise SearchTimeout("engine did not report a bestmove")
            if line.startswith("info "):
                parsed = _parse_info(line)
                if parsed is not None:
                    pv_index, score, pv = parsed
                    infos[pv_index] = (score, pv)
            elif line.startswith("bestmove"):
                parts = line.split()
                if len(parts) < 2:
                    raise UnparseableInfo(f"bad bestmove line: {line!r}")
                bestmove_uci = parts[1]
                break
        if not infos:
            raise UnparseableInfo("no scored info lines before bestmove")

        pvs = []
        for index in sorted(infos):
            score, pv_ucis = infos[index]
            prob = score_to_winprob(score, config)
            pvs.append((tuple(_ucis_to_san(board, pv_ucis)), prob))
        pvs.sort(key=lambda item: item[1], reverse=True)
        best_move = _uci_to_move(board, bestmove_uci)
        return EngineEval(best_move=best_move, win_prob=pvs[0][1], pvs=tuple(pvs))

    def close(self):
        try:
            self._transport.send("quit")
        except (ProtocolViolation, EngineCrashed):
            pass
        self._transport.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def open_session(config: EngineConfig) -> EngineSession:
    return EngineSession(config)


def _parse_info(line: str) -> tuple[int, RawScore, list[str]] | None:
    tokens = line.split()
    if "score" not in tokens:
        return None
    multipv = 1
    if "multipv" in tokens:
        multipv = int(tokens[tokens.index("multipv") + 1])
    idx = tokens.index("score")
    try:
        kind = tokens[idx + 1]
        if kind == "cp":
            score = RawScore(kind="cp", cp=int(tokens[idx + 2]))
        elif kind == "mate":
            score = RawScore(kind="mate", mate=int(tokens[idx + 2]))
        elif kind == "wdl":
            score = RawScore(
                kind="wdl",
                wdl=(int(tokens[idx + 2]), int(tokens[idx + 3]), int(tokens[idx + 4])),
            )
        else:
            raise UnparseableInfo(f"unknown score kind {kind!r} in {line!r}")
    except (IndexError, ValueError) as exc:
        raise UnparseableInfo(f"bad score in {line!r}") from exc
    pv: list[str] = []
    if "pv" in tokens:
        pv = tokens[tokens.index("pv") + 1 :]
    return multipv, score, pv


def _uci_to_move(board: BoardState, uci: str) -> MoveRecord:
    from .core.board import PieceKind, Square

    try:
        from_sq = Square.parse(uci[0:2])
        to_sq = Square.parse(uci[2:4])
        promo = PieceKind(uci[4].upper()) if len(uci) > 4 else None
    except (ValueError, IndexError) as exc:
        raise UnparseableInfo(f"bad UCI move {uci!r}") from exc
    for move in legal_moves(board):
        if move.from_sq == from_sq and move.to_sq == to_sq and move.promotion == promo:
            return move
    raise UnparseableInfo(f"engine move {uci!r} is not legal in {board.to_fen()}")


def _ucis_to_san(board: BoardState, ucis: list[str]) -> list[str]:
    sans = []
    for uci in ucis:
        move = _uci_to_move(board, uci)
        sans.append(format_san(board, move))
        board = apply_move(board, move)
    return sans


# -- tag derivation ----------------------------------------------------------


@dataclass(frozen=True)
class TagRequest:
    commentary_type: CommentaryType = CommentaryType.MOVE_DESCRIPTION
    want_suggestion: bool = True
    length: LengthTag | None = None
    thresholds: QualityThresholds = DEFAULT_THRESHOLDS


def derive_tags(
    session: EngineSession,
    board: BoardState,
    move: MoveRecord,
    request: TagRequest = TagRequest(),
) -> TagSet:
    """Engine-derived control tags for playing ``move`` on ``board``.

    Entity tags are always absent; length defaults to medium.
    """
    if move not in legal_moves(board):
        from .errors import IllegalMove

        raise IllegalMove(f"{move.uci} not legal in {board.to_fen()}")
    before = session.evaluate(board)
    p_best = before.win_prob
    after_board = apply_move(board, move)
    after = session.evaluate(after_board)
    # the engine scores for the new side to move; flip to the mover's view
    p_played = 1.0 - after.win_prob
    quality, _ = classify_delta(p_best, p_played, request.thresholds)

    suggested = None
    if request.want_suggestion and before.best_move != move:
        line = before.pvs[0][0] if before.pvs and before.pvs[0][0] else (
            format_san(board, before.best_move),
        )
        suggested = (SuggestedLine(sans=tuple(line), anchor=board),)

    tags = TagSet(
        commentary_type=request.commentary_type,
        move_quality=quality,
        suggested=suggested,
        pronouns=(),
        proper_nouns=(),
        length=request.length or LengthTag.MEDIUM,
    )
    assert not tags.pronouns and not tags.proper_nouns
    return tags
