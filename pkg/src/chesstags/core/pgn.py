"""PGN import/export for single games.

Comments ``{...}`` are attached to the ply they follow (those are the
commentary candidates); variations and NAGs are skipped but kept as raw
text so nothing is silently lost.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..errors import IllegalMove, PgnSyntax
from .board import BoardState, MoveRecord
from .san import format_san, parse_san

__all__ = ["GameRecord", "parse_pgn", "render_pgn", "replay"]

RESULTS = ("1-0", "0-1", "1/2-1/2", "*")

_HEADER_RE = re.compile(r'^\[(?P<key>\w+)\s+"(?P<value>.*)"\]\s*$')
_MOVE_NUMBER_RE = re.compile(r"^\d+\.*$")
_NAG_RE = re.compile(r"^\$\d+$")


@dataclass(frozen=True)
class GameRecord:
    headers: tuple[tuple[str, str], ...] = ()
    plies: tuple[MoveRecord, ...] = ()
    result: str = "*"
    comments: tuple[tuple[int, str], ...] = ()  # (ply index, text) pairs
    skipped: tuple[str, ...] = ()  # raw NAGs and variations

    def header(self, key: str) -> str | None:
        for k, v in self.headers:
            if k == key:
                return v
        return None

    def comment_for(self, ply_index: int) -> str | None:
        for idx, text in self.comments:
            if idx == ply_index:
                return text
        return None


def _initial_board(headers) -> BoardState:
    for key, value in headers:
        if key == "FEN":
            return BoardState.from_fen(value)
    return BoardState.initial()


def replay(record: GameRecord) -> BoardState:
    """Position after playing every ply of ``record``."""
    from .board import apply_move

    board = _initial_board(record.headers)
    for move in record.plies:
        board = apply_move(board, move)
    return board


def _tokenize_movetext(text: str, line_offset: int):
    """Yield (token, kind) where kind is move/comment/variation/nag/result."""
    i = 0
    line = line_offset
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            i += 1
        elif ch.isspace():
            i += 1
        elif ch == "{":
            end = text.find("}", i)
            if end == -1:
                raise PgnSyntax("unterminated comment", line)
            line += text.count("\n", i, end)
            yield text[i + 1 : end].strip(), "comment", line
            i = end + 1
        elif ch == "(":
            depth = 0
            start = i
            while i < len(text):
                if text[i] == "(":
                    depth += 1
                elif text[i] == ")":
                    depth -= 1
                    if depth == 0:
                        break
                elif text[i] == "\n":
                    line += 1
                i += 1
            if depth != 0:
                raise PgnSyntax("unterminated variation", line)
            yield text[start : i + 1], "variation", line
            i += 1
        elif ch == "}" or ch == ")":
            raise PgnSyntax(f"unexpected {ch!r} in movetext", line)
        else:
            j = i
            while j < len(text) and not text[j].isspace() and text[j] not in "{}()":
                j += 1
            token = text[i:j]
            if token in RESULTS:
                kind = "result"
            elif _NAG_RE.match(token):
                kind = "nag"
            elif _MOVE_NUMBER_RE.match(token):
                kind = "number"
            else:
                kind = "move"
            yield token, kind, line
            i = j


def parse_pgn(text: str) -> GameRecord:
    """Parse one game: ordered headers, then movetext."""
    lines = text.splitlines()
    headers: list[tuple[str, str]] = []
    body_start = 0
    for idx, raw in enumerate(lines):
        stripped = raw.strip()
        if not stripped:
            body_start = idx + 1
            continue
        match = _HEADER_RE.match(stripped)
        if match:
            headers.append((match.group("key"), match.group("value")))
            body_start = idx + 1
        elif stripped.startswith("["):
            raise PgnSyntax(f"malformed header: {stripped!r}", idx + 1)
        else:
            body_start = idx
            break

    movetext = "\n".join(lines[body_start:])
    board = _initial_board(headers)
    plies: list[MoveRecord] = []
    comments: list[tuple[int, str]] = []
    skipped: list[str] = []
    result = "*"
    for token, kind, line in _tokenize_movetext(movetext, body_start + 1):
        if kind == "number":
            continue
        if kind == "result":
            result = token
            break
        if kind == "comment":
            if plies:
                comments.append((len(plies) - 1, token))
            continue
        if kind in ("nag", "variation"):
            skipped.append(token)
            continue
        try:
            move = parse_san(board, token)
        except IllegalMove as exc:
            raise IllegalMove(f"ply {len(plies) + 1}: {exc}") from exc
        except Exception as exc:
            raise PgnSyntax(f"bad movetext token {token!r}: {exc}", line) from exc
        from .board import _apply_unchecked

        board = _apply_unchecked(board, move)
        plies.append(move)

    for key, value in headers:
        if key == "Result" and value in RESULTS and result == "*":
            result = value
    return GameRecord(
        headers=tuple(headers),
        plies=tuple(plies),
        result=result,
        comments=tuple(comments),
        skipped=tuple(skipped),
    )


def render_pgn(record: GameRecord) -> str:
    """Export format: headers, then numbered SAN movetext with comments."""
    out = [f'[{key} "{value}"]' for key, value in record.headers]
    if out:
        out.append("")
    board = _initial_board(record.headers)
    comment_map = dict(record.comments)
    parts: list[str] = []
    from .board import Color, _apply_unchecked

    for idx, move in enumerate(record.plies):
        if board.side_to_move is Color.WHITE:
            parts.append(f"{board.fullmove_number}.")
        elif idx == 0:
            parts.append(f"{board.fullmove_number}...")
        parts.append(format_san(board, move))
        if idx in comment_map:
            parts.append("{" + comment_map[idx] + "}")
        board = _apply_unchecked(board, move)
    parts.append(record.result)
    out.append(" ".join(parts))
    return "\n".join(out) + "\n"
