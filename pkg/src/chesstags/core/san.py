"""Standard algebraic notation: parsing and minimal-disambiguation output.

Trailing annotation glyphs (``!!``, ``!``, ``!?``, ``?``, ``??``) and
check/mate suffixes are accepted on input; the original text is kept on
the returned record's ``san`` field.
"""

from __future__ import annotations

import re
from dataclasses import replace

from ..errors import AmbiguousMove, IllegalMove, UnparseableSan
from .board import (
    BoardState,
    MoveRecord,
    PieceKind,
    Square,
    _apply_unchecked,
    is_check,
    legal_moves,
)

__all__ = ["parse_san", "format_san", "ANNOTATION_SUFFIXES"]

ANNOTATION_SUFFIXES = ("!!", "!?", "??", "!", "?")

_SAN_RE = re.compile(
    r"^(?P<piece>[KQRBN])?"
    r"(?P<from_file>[a-h])?(?P<from_rank>[1-8])?"
    r"(?P<capture>x)?"
    r"(?P<target>[a-h][1-8])"
    r"(?:=(?P<promotion>[QRBN]))?$"
)
_CASTLE_RE = re.compile(r"^(?P<queenside>O-O-O|0-0-0)$|^(?P<kingside>O-O|0-0)$")


def _strip_suffixes(text: str) -> tuple[str, bool, bool]:
    """Remove annotation and check/mate glyphs; report which were seen."""
    stripped = text.strip()
    for marker in ANNOTATION_SUFFIXES:
        if stripped.endswith(marker):
            stripped = stripped[: -len(marker)]
            break
    check = stripped.endswith("+")
    mate = stripped.endswith("#")
    if check or mate:
        stripped = stripped[:-1]
    return stripped, check, mate


def _with_status(board: BoardState, move: MoveRecord) -> tuple[bool, bool]:
    after = _apply_unchecked(board, move)
    if not is_check(after):
        return False, False
    return True, not legal_moves(after)


def parse_san(board: BoardState, text: str) -> MoveRecord:
    """Resolve SAN ``text`` against the legal moves of ``board``."""
    core, _, _ = _strip_suffixes(text)
    if not core:
        raise UnparseableSan(f"empty SAN: {text!r}")

    castle = _CASTLE_RE.match(core)
    if castle:
        wanted = "castle_q" if castle.group("queenside") else "castle_k"
        for move in legal_moves(board):
            if getattr(move, wanted):
                return _finish(board, move, text)
        raise IllegalMove(f"{text!r}: castling not legal here")

    match = _SAN_RE.match(core)
    if not match:
        raise UnparseableSan(f"not SAN: {text!r}")
    kind = PieceKind(match.group("piece")) if match.group("piece") else PieceKind.PAWN
    target = Square.parse(match.group("target"))
    promotion = PieceKind(match.group("promotion")) if match.group("promotion") else None
    from_file = match.group("from_file")
    from_rank = match.group("from_rank")
    # A bare pawn capture like "exd5" needs the file; a bare "e4" must not
    # be read as a piece move with a from-square.
    candidates = [
        m
        for m in legal_moves(board)
        if m.moving.kind is kind
        and m.to_sq == target
        and m.promotion is promotion
        and (from_file is None or m.from_sq.file == "abcdefgh".index(from_file))
        and (from_rank is None or m.from_sq.rank == int(from_rank) - 1)
        and not (m.castle_k or m.castle_q)
    ]
    if not candidates:
        raise IllegalMove(f"{text!r} has no legal interpretation in {board.to_fen()}")
    if len(candidates) > 1:
        raise AmbiguousMove(f"{text!r} matches {len(candidates)} moves; add disambiguation")
    return _finish(board, candidates[0], text)


def _finish(board: BoardState, move: MoveRecord, original: str) -> MoveRecord:
    check, mate = _with_status(board, move)
    return replace(move, san=original.strip(), check=check, mate=mate)


def format_san(board: BoardState, move: MoveRecord) -> str:
    """Minimal SAN for ``move``, with "+"/"#" appended when applicable."""
    legal = legal_moves(board)
    if move not in legal:
        raise IllegalMove(f"{move.uci} is not legal in {board.to_fen()}")
    check, mate = _with_status(board, move)
    suffix = "#" if mate else "+" if check else ""

    if move.castle_k:
        return "O-O" + suffix
    if move.castle_q:
        return "O-O-O" + suffix

    if move.moving.kind is PieceKind.PAWN:
        text = ""
        if move.capture is not None:
            text = "abcdefgh"[move.from_sq.file] + "x"
        text += move.to_sq.name
        if move.promotion is not None:
            text += "=" + move.promotion.value
        return text + suffix

    rivals = [
        m
        for m in legal
        if m.moving == move.moving and m.to_sq == move.to_sq and m.from_sq != move.from_sq
    ]
    disambig = ""
    if rivals:
        same_file = any(m.from_sq.file == move.from_sq.file for m in rivals)
        same_rank = any(m.from_sq.rank == move.from_sq.rank for m in rivals)
        if not same_file:
            disambig = "abcdefgh"[move.from_sq.file]
        elif not same_rank:
            disambig = str(move.from_sq.rank + 1)
        else:
            disambig = move.from_sq.name
    capture = "x" if move.capture is not None else ""
    return f"{move.moving.kind.value}{disambig}{capture}{move.to_sq.name}{suffix}"
