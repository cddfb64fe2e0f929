"""Textual input assembly for the commentary generator.

Builds the move/game-state/tag token sequence in a fixed, machine-
recoverable layout (see docs/format.md).  Segment sentinels are "[PGN]",
"[PIECES]", "[ATTACKS]", "[MOVE]"; the scheme is versioned with a
leading "[v1]" token so alternative layouts can coexist.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .core import (
    BoardState,
    Color,
    GameRecord,
    MoveRecord,
    PieceKind,
    attack_relations,
    format_san,
    render_pgn,
    replay,
)
from .errors import InconsistentState
from .tags import LengthTag, TagSet

__all__ = [
    "Ablation",
    "RepresentationConfig",
    "InputText",
    "render_game_state",
    "render_tags",
    "assemble_input",
    "split_input",
    "SCHEME_VERSION",
]

SCHEME_VERSION = "v1"
UNCONDITIONED_TOKEN = "[Unconditioned]"

SEGMENT_ORDER = ("PGN", "PIECES", "ATTACKS", "MOVE", "TAGS")
_SENTINELS = {name: f"[{name}]" for name in ("PGN", "PIECES", "ATTACKS", "MOVE")}

# Piece listing order within a color: king first, then by decreasing value.
_KIND_ORDER = (
    PieceKind.KING,
    PieceKind.QUEEN,
    PieceKind.ROOK,
    PieceKind.BISHOP,
    PieceKind.KNIGHT,
    PieceKind.PAWN,
)

TAG_FAMILY_ORDER = (
    "Commentary Type",
    "Move Quality",
    "Suggested Move",
    "Pronoun",
    "Proper Noun",
    "Length",
)


class Ablation(enum.Enum):
    UNCONDITIONED = "unconditioned"
    MOVE_ONLY = "move"
    GAME_STATE = "game-state"
    WITH_TAGS = "tags"
    FULLY = "fully"


@dataclass(frozen=True)
class RepresentationConfig:
    ablation: Ablation = Ablation.FULLY
    pgn: bool = True
    pieces: bool = True
    attacks: bool = True
    tag_families: tuple[str, ...] = TAG_FAMILY_ORDER
    scheme: str = SCHEME_VERSION

    def __post_init__(self):
        if self.ablation is Ablation.FULLY:
            if not (self.pgn and self.pieces and self.attacks):
                raise ValueError("fully-conditioned input needs all game-state segments")
            if tuple(self.tag_families) != TAG_FAMILY_ORDER:
                raise ValueError("fully-conditioned input needs all five tag families")
        unknown = set(self.tag_families) - set(TAG_FAMILY_ORDER)
        if unknown:
            raise ValueError(f"unknown tag families: {sorted(unknown)}")

    @property
    def wants_game_state(self) -> bool:
        return self.ablation in (Ablation.GAME_STATE, Ablation.WITH_TAGS, Ablation.FULLY)

    @property
    def wants_tags(self) -> bool:
        return self.ablation in (Ablation.WITH_TAGS, Ablation.FULLY)

    @classmethod
    def unconditioned(cls) -> "RepresentationConfig":
        return cls(ablation=Ablation.UNCONDITIONED)

    @classmethod
    def move_only(cls) -> "RepresentationConfig":
        return cls(ablation=Ablation.MOVE_ONLY)

    @classmethod
    def game_state(cls, pgn=True, pieces=True, attacks=True) -> "RepresentationConfig":
        return cls(ablation=Ablation.GAME_STATE, pgn=pgn, pieces=pieces, attacks=attacks)

    @classmethod
    def with_tags(cls, tag_families=TAG_FAMILY_ORDER) -> "RepresentationConfig":
        return cls(ablation=Ablation.WITH_TAGS, tag_families=tuple(tag_families))

    @classmethod
    def fully(cls) -> "RepresentationConfig":
        return cls(ablation=Ablation.FULLY)


@dataclass(frozen=True)
class InputText:
    text: str
    segment_spans: tuple[tuple[str, int, int], ...] = ()

    def segment(self, name: str) -> str | None:
        for seg, start, end in self.segment_spans:
            if seg == name:
                return self.text[start:end]
        return None


def _pgn_segment(record: GameRecord) -> str:
    body = render_pgn(
        GameRecord(headers=(), plies=record.plies, result="*")
    ).strip()
    return body[:-1].strip() if body.endswith("*") else body


def piece_token(color: Color, kind: PieceKind, square) -> str:
    return f"{color.value} {kind.value}_{square.name}"


def render_game_state(
    record: GameRecord, board: BoardState, config: RepresentationConfig
) -> list[tuple[str, str]]:
    """Enabled (segment name, text) pairs in fixed order.

    ``board`` must equal the position reached by replaying ``record``.
    """
    if replay(record) != board:
        raise InconsistentState("board does not match the replayed record")

    segments: list[tuple[str, str]] = []
    if config.pgn:
        segments.append(("PGN", _pgn_segment(record)))
    if config.pieces:
        tokens = []
        for color in (Color.WHITE, Color.BLACK):
            for kind in _KIND_ORDER:
                for piece, sq in board.pieces(color):
                    if piece.kind is kind:
                        tokens.append(piece_token(color, kind, sq))
        segments.append(("PIECES", " ".join(tokens)))
    if config.attacks:
        tokens = []
        for rel in attack_relations(board):
            attacker, a_sq = rel.attacker
            target, t_sq = rel.target
            tokens.append(
                f"{attacker.color.value} {attacker.kind.value}_{a_sq.name}$"
                f"{target.kind.value}_{t_sq.name}"
            )
        segments.append(("ATTACKS", " ".join(tokens)))
    return segments


def render_tags(tags: TagSet, families: tuple[str, ...] = TAG_FAMILY_ORDER) -> str:
    """Tag tokens in fixed family order; absent tags are omitted."""
    enabled = set(families)
    parts: list[str] = []
    if "Commentary Type" in enabled and tags.commentary_type is not None:
        parts.append(f"[Commentary Type] {tags.commentary_type.value}")
    if "Move Quality" in enabled and tags.move_quality is not None:
        parts.append(f"[Move Quality] {tags.move_quality.value}")
    if "Suggested Move" in enabled and tags.suggested:
        for line in tags.suggested:
            parts.append(f"[Suggested Move] {' '.join(line.sans)}")
    if "Pronoun" in enabled:
        for form in tags.pronouns:
            parts.append(f"[Pronoun] {form}")
    if "Proper Noun" in enabled:
        for form in tags.proper_nouns:
            parts.append(f"[Proper Noun] {form}")
    if "Length" in enabled and tags.length is not None:
        parts.append(f"[{tags.length.value}]")
    return " ".join(parts)


def assemble_input(
    segments: list[tuple[str, str]],
    move: MoveRecord | None,
    tags: TagSet | None,
    config: RepresentationConfig,
    board: BoardState | None = None,
) -> InputText:
    """Compose the final input string per the configured ablation."""
    if config.ablation is Ablation.UNCONDITIONED:
        return InputText(text=UNCONDITIONED_TOKEN)

    move_text = ""
    if move is not None:
        move_text = move.san or (format_san(board, move) if board is not None else move.uci)

    if config.ablation is Ablation.MOVE_ONLY:
        return InputText(
            text=move_text, segment_spans=(("MOVE", 0, len(move_text)),)
        )

    chunks: list[str] = []
    length = 0
    spans: list[tuple[str, int, int]] = []

    def add(token: str) -> tuple[int, int]:
        nonlocal length
        if not token:
            return length, length
        if chunks:
            length += 1  # joining space
        start = length
        chunks.append(token)
        length += len(token)
        return start, length

    add(f"[{config.scheme}]")
    for name, content in segments:
        add(_SENTINELS[name])
        spans.append((name, *add(content)))
    add(_SENTINELS["MOVE"])
    spans.append(("MOVE", *add(move_text)))
    if config.wants_tags and tags is not None:
        tag_text = render_tags(tags, config.tag_families)
        if tag_text:
            spans.append(("TAGS", *add(tag_text)))

    return InputText(text=" ".join(chunks), segment_spans=tuple(spans))


def split_input(text: str) -> dict[str, str]:
    """Recover segment contents from an assembled input (round-trip aid)."""
    if text == UNCONDITIONED_TOKEN:
        return {}
    if not text.startswith(f"[{SCHEME_VERSION}]"):
        return {"MOVE": text}
    rest = text[len(f"[{SCHEME_VERSION}]") :].strip()
    result: dict[str, str] = {}
    positions = []
    for name, sentinel in _SENTINELS.items():
        idx = rest.find(sentinel)
        if idx != -1:
            positions.append((idx, name, sentinel))
    positions.sort()
    for i, (idx, name, sentinel) in enumerate(positions):
        start = idx + len(sentinel)
        end = positions[i + 1][0] if i + 1 < len(positions) else len(rest)
        content = rest[start:end].strip()
        if name == "MOVE":
            # tags (if any) trail the move token
            move_parts = content.split(" ", 1)
            result["MOVE"] = move_parts[0] if move_parts[0] else ""
            if len(move_parts) > 1 and move_parts[1].strip():
                result["TAGS"] = move_parts[1].strip()
            elif content.startswith("["):
                result["MOVE"] = ""
                result["TAGS"] = content
        else:
            result[name] = content
    return result
