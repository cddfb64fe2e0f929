"""Inference path: engine-derived tags, backend (or template) generation,
and grounding checks on the produced text."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import requests

from .core import (
    BoardState,
    Color,
    GameRecord,
    MoveRecord,
    PieceKind,
    Square,
    apply_move,
    format_san,
    parse_san,
    replay,
)
from .engine import EngineSession, TagRequest, derive_tags
from .errors import (
    BackendTimeout,
    BackendUnreachable,
    ChessTagsError,
    MalformedResponse,
)
from .representation import InputText, RepresentationConfig, assemble_input, render_game_state
from .tags import CommentaryType, LengthTag, MoveQuality, TagSet

__all__ = [
    "InferenceRequest",
    "GroundingReport",
    "Violation",
    "UrlBackend",
    "build_inference_request",
    "generate",
    "generate_checked",
    "realize_template",
    "ground_check",
    "score_continuations",
]

SUPPORTED_TEMPLATE_TYPES = (
    CommentaryType.MOVE_DESCRIPTION,
    CommentaryType.MOVE_QUALITY,
    CommentaryType.MOVE_COMPARISON,
)


@dataclass(frozen=True)
class InferenceRequest:
    board: BoardState
    move: MoveRecord
    commentary_type: CommentaryType
    length: LengthTag = LengthTag.MEDIUM
    backend: str = "template"  # "template" or a URL


@dataclass(frozen=True)
class Violation:
    span: tuple[int, int]
    kind: str  # "illegal-SAN" | "nonexistent-piece"
    detail: str


@dataclass(frozen=True)
class GroundingReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class UrlBackend:
    url: str
    max_tokens: int = 64
    timeout: float = 30.0


def build_inference_request(
    session: EngineSession,
    board: BoardState,
    move: MoveRecord,
    commentary_type: CommentaryType = CommentaryType.MOVE_DESCRIPTION,
    length: LengthTag | None = None,
    history: GameRecord | None = None,
) -> tuple[InputText, TagSet]:
    """Fully-conditioned input plus the engine-derived tags for one move.

    Entity tag families never appear; length defaults to medium.
    """
    record = history if history is not None else _record_for(board)
    tags = derive_tags(
        session,
        board,
        move,
        TagRequest(commentary_type=commentary_type, length=length),
    )
    config = RepresentationConfig.fully()
    segments = render_game_state(record, board, config)
    input_text = assemble_input(segments, move, tags, config, board=board)
    return input_text, tags


def _record_for(board: BoardState) -> GameRecord:
    """A history-less record anchored at ``board`` via a FEN header."""
    return GameRecord(headers=(("FEN", board.to_fen()),))


def generate(backend: UrlBackend, input_text: InputText | str) -> str:
    """POST the wire-contract request; the payload is never mutated, so
    retries are safe."""
    text = input_text.text if isinstance(input_text, InputText) else input_text
    try:
        response = requests.post(
            backend.url,
            json={"input": text, "max_tokens": backend.max_tokens},
            timeout=backend.timeout,
        )
    except requests.Timeout as exc:
        raise BackendTimeout(str(exc)) from exc
    except requests.RequestException as exc:
        raise BackendUnreachable(str(exc)) from exc
    try:
        payload = response.json()
    except ValueError as exc:
        raise MalformedResponse(f"non-JSON response: {exc}") from exc
    if not isinstance(payload, dict) or "text" not in payload:
        raise MalformedResponse(f"response missing 'text': {payload!r}")
    return str(payload["text"])


def score_continuations(backend: UrlBackend, prompt: str, continuations: list[str]) -> list[float]:
    """Score-endpoint contract: one log-probability per continuation."""
    try:
        response = requests.post(
            backend.url,
            json={"prompt": prompt, "continuations": list(continuations)},
            timeout=backend.timeout,
        )
    except requests.Timeout as exc:
        raise BackendTimeout(str(exc)) from exc
    except requests.RequestException as exc:
        raise BackendUnreachable(str(exc)) from exc
    try:
        payload = response.json()
    except ValueError as exc:
        raise MalformedResponse(f"non-JSON response: {exc}") from exc
    if not isinstance(payload, dict) or "logprobs" not in payload:
        raise MalformedResponse(f"response missing 'logprobs': {payload!r}")
    logprobs = payload["logprobs"]
    if len(logprobs) != len(continuations):
        raise MalformedResponse("logprob count does not match continuations")
    return [float(x) for x in logprobs]


# -- template realizer -------------------------------------------------------

_QUALITY_PHRASES = {
    MoveQuality.EXCELLENT: ("!!", "An excellent move."),
    MoveQuality.GOOD: ("!", "A strong move."),
    MoveQuality.INACCURACY: ("!?", "An inaccuracy."),
    MoveQuality.MISTAKE: ("?", "A mistake."),
    MoveQuality.BLUNDER: ("??", "A blunder."),
}

_PIECE_NAMES = {
    PieceKind.PAWN: "pawn",
    PieceKind.KNIGHT: "knight",
    PieceKind.BISHOP: "bishop",
    PieceKind.ROOK: "rook",
    PieceKind.QUEEN: "queen",
    PieceKind.KING: "king",
}


def realize_template(tags: TagSet, board: BoardState, move: MoveRecord) -> str:
    """Deterministic model-free commentary; its output always passes
    ground_check because every SAN it emits comes from a legal line."""
    ctype = tags.commentary_type or CommentaryType.MOVE_DESCRIPTION
    if ctype not in SUPPORTED_TEMPLATE_TYPES:
        return f"No template commentary is available for the {ctype.value} category."

    move_san = move.san or format_san(board, move)
    suggestion = _differing_suggestion(tags, move)
    if ctype is CommentaryType.MOVE_QUALITY:
        marker, phrase = _QUALITY_PHRASES[tags.move_quality or MoveQuality.GOOD]
        parts = [f"{marker} {phrase}"]
        if tags.length is not LengthTag.SHORT and suggestion:
            parts.append(f"Better was {suggestion}.")
        if tags.length is LengthTag.LONG:
            parts.append(_description_sentence(board, move))
        return " ".join(parts)
    if ctype is CommentaryType.MOVE_COMPARISON:
        if suggestion:
            text = f"Better was {suggestion}."
            if tags.length is LengthTag.LONG:
                text += f" The move played was {move_san}."
            return text
        return f"{move_san} was the engine's own choice here."
    parts = [_description_sentence(board, move)]
    if tags.length is LengthTag.LONG and suggestion:
        parts.append(f"Better was {suggestion}.")
    return " ".join(parts)


def _differing_suggestion(tags: TagSet, move: MoveRecord) -> str | None:
    if not tags.suggested:
        return None
    line = tags.suggested[0]
    played = move.san.rstrip("!?+#") if move.san else None
    if line.sans and played and line.sans[0].rstrip("+#") == played:
        return None
    return " ".join(line.sans)


def _description_sentence(board: BoardState, move: MoveRecord) -> str:
    color = "White" if move.moving.color is Color.WHITE else "Black"
    if move.castle_k:
        return f"{color} castles kingside."
    if move.castle_q:
        return f"{color} castles queenside."
    piece = _PIECE_NAMES[move.moving.kind]
    if move.en_passant:
        return f"{color} captures en passant with the {piece}."
    if move.capture is not None:
        victim = _PIECE_NAMES[move.capture.kind]
        return f"{color} captures the {victim} on {move.to_sq.name} with the {piece}."
    return f"{color} moves the {piece} to {move.to_sq.name}."


# -- grounding checks --------------------------------------------------------

_SAN_SHAPE_RE = re.compile(
    r"^(O-O(-O)?|[KQRBN][a-h]?[1-8]?x?[a-h][1-8]|[a-h]x[a-h][1-8](=[QRBN])?"
    r"|[a-h][1-8](=[QRBN])?)[+#]?[!?]*$"
)
_SQUARE_ONLY_RE = re.compile(r"^[a-h][1-8]$")
_LOCATION_PREPOSITIONS = frozenset({"on", "at", "to", "from", "square", "via"})
_PIECE_CLAIM_RE = re.compile(
    r"\b(?:(white|black)\s+)?(pawn|knight|bishop|rook|queen|king)s?\s+(?:on|at)\s+([a-h][1-8])\b",
    re.IGNORECASE,
)


def ground_check(text: str, board: BoardState) -> GroundingReport:
    """Check SAN tokens for (sequential) legality from ``board`` and
    piece-location claims against the placement."""
    violations: list[Violation] = []

    # SAN runs
    tokens = [(m.group(), m.start()) for m in re.finditer(r"\S+", text)]
    runs: list[list[tuple[str, int]]] = []
    current: list[tuple[str, int]] = []
    previous = ""
    for raw, start in tokens:
        stripped = raw.strip(".,;:()\"'")
        offset = start + raw.index(stripped) if stripped and stripped in raw else start
        is_san = bool(stripped) and _SAN_SHAPE_RE.match(stripped) is not None
        if is_san and _SQUARE_ONLY_RE.match(stripped) and previous in _LOCATION_PREPOSITIONS:
            is_san = False  # location mention, not a pawn push
        if is_san:
            current.append((stripped, offset))
        else:
            if current:
                runs.append(current)
            current = []
        previous = stripped.lower()
    if current:
        runs.append(current)

    for run in runs:
        position = board
        for san, offset in run:
            try:
                move = parse_san(position, san)
            except ChessTagsError as exc:
                violations.append(
                    Violation(
                        span=(offset, offset + len(san)),
                        kind="illegal-SAN",
                        detail=str(exc),
                    )
                )
                position = board  # restart the chain at the anchor
                continue
            position = apply_move(position, move)

    # piece-location claims
    for match in _PIECE_CLAIM_RE.finditer(text):
        color_word, piece_word, square_name = match.groups()
        square = Square.parse(square_name)
        piece = board.piece_at(square)
        kind = {v: k for k, v in _PIECE_NAMES.items()}[piece_word.lower()]
        wanted_color = (
            None
            if color_word is None
            else Color.WHITE
            if color_word.lower() == "white"
            else Color.BLACK
        )
        ok = (
            piece is not None
            and piece.kind is kind
            and (wanted_color is None or piece.color is wanted_color)
        )
        if not ok:
            violations.append(
                Violation(
                    span=(match.start(), match.end()),
                    kind="nonexistent-piece",
                    detail=f"no {piece_word.lower()} on {square_name}",
                )
            )
    return GroundingReport(violations=tuple(violations))


def generate_checked(
    backend: UrlBackend,
    input_text: InputText,
    board: BoardState,
    max_retries: int = 0,
) -> tuple[str, GroundingReport]:
    """Generate and ground-check; optionally re-query on violations.
    Violations are reported, never auto-corrected."""
    text = generate(backend, input_text)
    report = ground_check(text, board)
    attempts = 0
    while not report.ok and attempts < max_retries:
        text = generate(backend, input_text)
        report = ground_check(text, board)
        attempts += 1
    return text, report
