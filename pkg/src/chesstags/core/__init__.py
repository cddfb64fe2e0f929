"""Chess rules kernel: positions, moves, SAN/PGN, attack relations."""

from .board import (
    AttackRelation,
    BoardState,
    Color,
    MoveRecord,
    Piece,
    PieceKind,
    Square,
    SQUARES,
    apply_move,
    attack_relations,
    is_attacked,
    is_check,
    legal_moves,
    perft,
)
from .pgn import GameRecord, parse_pgn, render_pgn, replay
from .san import format_san, parse_san

__all__ = [
    "AttackRelation",
    "BoardState",
    "Color",
    "GameRecord",
    "MoveRecord",
    "Piece",
    "PieceKind",
    "Square",
    "SQUARES",
    "apply_move",
    "attack_relations",
    "format_san",
    "is_attacked",
    "is_check",
    "legal_moves",
    "parse_pgn",
    "parse_san",
    "perft",
    "render_pgn",
    "replay",
]
