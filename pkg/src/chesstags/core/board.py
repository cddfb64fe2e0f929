"""Board representation, FEN I/O, move generation and attack relations.

The board is an immutable 64-entry mailbox indexed ``rank * 8 + file``
(a1 = 0, h1 = 7, a8 = 56).  All operations return new values; nothing
here mutates shared state.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from functools import lru_cache

from ..errors import IllegalMove, InvalidPosition

__all__ = [
    "Color",
    "PieceKind",
    "Piece",
    "Square",
    "MoveRecord",
    "BoardState",
    "AttackRelation",
    "SQUARES",
    "is_attacked",
    "is_check",
    "legal_moves",
    "apply_move",
    "attack_relations",
    "perft",
]


class Color(enum.Enum):
    WHITE = "White"
    BLACK = "Black"

    @property
    def opposite(self) -> "Color":
        return Color.BLACK if self is Color.WHITE else Color.WHITE


class PieceKind(enum.Enum):
    PAWN = "P"
    KNIGHT = "N"
    BISHOP = "B"
    ROOK = "R"
    QUEEN = "Q"
    KING = "K"


@dataclass(frozen=True)
class Piece:
    color: Color
    kind: PieceKind

    @property
    def fen_letter(self) -> str:
        letter = self.kind.value
        return letter if self.color is Color.WHITE else letter.lower()

    @classmethod
    def from_fen_letter(cls, letter: str) -> "Piece":
        color = Color.WHITE if letter.isupper() else Color.BLACK
        return cls(color, PieceKind(letter.upper()))


@dataclass(frozen=True, order=True)
class Square:
    """A board square; ordering is file-major (a1, a2, ... b1, ...)."""

    file: int
    rank: int

    def __post_init__(self):
        if not (0 <= self.file <= 7 and 0 <= self.rank <= 7):
            raise ValueError(f"square off board: file={self.file} rank={self.rank}")

    @property
    def index(self) -> int:
        return self.rank * 8 + self.file

    @property
    def name(self) -> str:
        return "abcdefgh"[self.file] + str(self.rank + 1)

    @classmethod
    def parse(cls, text: str) -> "Square":
        if len(text) != 2 or text[0] not in "abcdefgh" or text[1] not in "12345678":
            raise ValueError(f"not a square: {text!r}")
        return cls("abcdefgh".index(text[0]), int(text[1]) - 1)

    def __str__(self) -> str:
        return self.name


SQUARES = tuple(Square(f, r) for r in range(8) for f in range(8))
FILE_MAJOR_SQUARES = tuple(sorted(SQUARES))


@dataclass(frozen=True)
class MoveRecord:
    """One ply.  ``san`` and the check/mate flags are presentation data
    filled in by the SAN layer; they do not take part in equality."""

    from_sq: Square
    to_sq: Square
    moving: Piece
    capture: Piece | None = None
    promotion: PieceKind | None = None
    castle_k: bool = False
    castle_q: bool = False
    en_passant: bool = False
    san: str = field(default="", compare=False)
    check: bool = field(default=False, compare=False)
    mate: bool = field(default=False, compare=False)

    @property
    def uci(self) -> str:
        promo = self.promotion.value.lower() if self.promotion else ""
        return f"{self.from_sq}{self.to_sq}{promo}"


@dataclass(frozen=True)
class AttackRelation:
    attacker: tuple[Piece, Square]
    target: tuple[Piece, Square]


INITIAL_FEN = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1"

_KNIGHT_OFFSETS = ((1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2))
_KING_OFFSETS = ((1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1))
_BISHOP_DIRS = ((1, 1), (1, -1), (-1, 1), (-1, -1))
_ROOK_DIRS = ((1, 0), (-1, 0), (0, 1), (0, -1))


@dataclass(frozen=True)
class BoardState:
    placement: tuple[Piece | None, ...]
    side_to_move: Color = Color.WHITE
    castling: frozenset[str] = frozenset()
    en_passant: Square | None = None
    halfmove_clock: int = 0
    fullmove_number: int = 1

    def piece_at(self, sq: Square) -> Piece | None:
        return self.placement[sq.index]

    def pieces(self, color: Color | None = None):
        """Yield (piece, square) pairs, file-major square order."""
        for sq in FILE_MAJOR_SQUARES:
            piece = self.placement[sq.index]
            if piece is not None and (color is None or piece.color is color):
                yield piece, sq

    def king_square(self, color: Color) -> Square:
        for piece, sq in self.pieces(color):
            if piece.kind is PieceKind.KING:
                return sq
        raise InvalidPosition(f"no {color.value} king on the board")

    # -- FEN ----------------------------------------------------------------

    @classmethod
    def initial(cls) -> "BoardState":
        return cls.from_fen(INITIAL_FEN)

    @classmethod
    def from_fen(cls, fen: str) -> "BoardState":
        fields = fen.split()
        if len(fields) != 6:
            raise InvalidPosition(f"FEN needs 6 fields, got {len(fields)}: {fen!r}")
        placement_text, stm, castling, ep, halfmove, fullmove = fields
        ranks = placement_text.split("/")
        if len(ranks) != 8:
            raise InvalidPosition(f"FEN placement needs 8 ranks: {placement_text!r}")
        board: list[Piece | None] = [None] * 64
        for rank_idx, rank_text in enumerate(ranks):
            rank = 7 - rank_idx
            file = 0
            for ch in rank_text:
                if ch.isdigit():
                    file += int(ch)
                elif ch in "pnbrqkPNBRQK":
                    if file > 7:
                        raise InvalidPosition(f"rank overflow in FEN: {rank_text!r}")
                    board[rank * 8 + file] = Piece.from_fen_letter(ch)
                    file += 1
                else:
                    raise InvalidPosition(f"bad FEN character {ch!r}")
            if file != 8:
                raise InvalidPosition(f"rank {rank_text!r} does not span 8 files")
        if stm not in ("w", "b"):
            raise InvalidPosition(f"bad side to move {stm!r}")
        if castling != "-" and (set(castling) - set("KQkq") or len(set(castling)) != len(castling)):
            raise InvalidPosition(f"bad castling field {castling!r}")
        state = cls(
            placement=tuple(board),
            side_to_move=Color.WHITE if stm == "w" else Color.BLACK,
            castling=frozenset() if castling == "-" else frozenset(castling),
            en_passant=None if ep == "-" else Square.parse(ep),
            halfmove_clock=int(halfmove),
            fullmove_number=int(fullmove),
        )
        state.validate()
        return state

    def to_fen(self) -> str:
        rows = []
        for rank in range(7, -1, -1):
            row = ""
            empty = 0
            for file in range(8):
                piece = self.placement[rank * 8 + file]
                if piece is None:
                    empty += 1
                else:
                    if empty:
                        row += str(empty)
                        empty = 0
                    row += piece.fen_letter
            if empty:
                row += str(empty)
            rows.append(row)
        castling = "".join(c for c in "KQkq" if c in self.castling) or "-"
        ep = self.en_passant.name if self.en_passant else "-"
        stm = "w" if self.side_to_move is Color.WHITE else "b"
        return f"{'/'.join(rows)} {stm} {castling} {ep} {self.halfmove_clock} {self.fullmove_number}"

    def validate(self) -> None:
        for color in Color:
            kings = sum(
                1 for p, _ in self.pieces(color) if p.kind is PieceKind.KING
            )
            if kings != 1:
                raise InvalidPosition(f"{color.value} has {kings} kings")
        for piece, sq in self.pieces():
            if piece.kind is PieceKind.PAWN and sq.rank in (0, 7):
                raise InvalidPosition(f"pawn on back rank at {sq}")
        if self.en_passant is not None and self.en_passant.rank not in (2, 5):
            raise InvalidPosition(f"en-passant square {self.en_passant} not on rank 3/6")
        if self.halfmove_clock < 0 or self.fullmove_number < 1:
            raise InvalidPosition("negative move counters")
        other = self.side_to_move.opposite
        if is_attacked(self, self.king_square(other), self.side_to_move):
            raise InvalidPosition("side not to move is in check")


# -- attack and move generation --------------------------------------------


def _on_board(file: int, rank: int) -> bool:
    return 0 <= file <= 7 and 0 <= rank <= 7


def is_attacked(board: BoardState, target: Square, by: Color) -> bool:
    """True if any piece of ``by`` pseudo-legally attacks ``target``."""
    tf, tr = target.file, target.rank
    placement = board.placement
    pawn_dir = 1 if by is Color.WHITE else -1
    for df in (-1, 1):
        f, r = tf + df, tr - pawn_dir
        if _on_board(f, r):
            piece = placement[r * 8 + f]
            if piece == Piece(by, PieceKind.PAWN):
                return True
    for offsets, kind in ((_KNIGHT_OFFSETS, PieceKind.KNIGHT), (_KING_OFFSETS, PieceKind.KING)):
        for df, dr in offsets:
            f, r = tf + df, tr + dr
            if _on_board(f, r) and placement[r * 8 + f] == Piece(by, kind):
                return True
    for dirs, kinds in (
        (_BISHOP_DIRS, (PieceKind.BISHOP, PieceKind.QUEEN)),
        (_ROOK_DIRS, (PieceKind.ROOK, PieceKind.QUEEN)),
    ):
        for df, dr in dirs:
            f, r = tf + df, tr + dr
            while _on_board(f, r):
                piece = placement[r * 8 + f]
                if piece is not None:
                    if piece.color is by and piece.kind in kinds:
                        return True
                    break
                f, r = f + df, r + dr
    return False


def is_check(board: BoardState) -> bool:
    return is_attacked(board, board.king_square(board.side_to_move), board.side_to_move.opposite)


def _pseudo_moves(board: BoardState) -> list[MoveRecord]:
    color = board.side_to_move
    moves: list[MoveRecord] = []
    for piece, sq in board.pieces(color):
        kind = piece.kind
        f, r = sq.file, sq.rank
        if kind is PieceKind.PAWN:
            moves.extend(_pawn_moves(board, piece, sq))
        elif kind is PieceKind.KNIGHT or kind is PieceKind.KING:
            offsets = _KNIGHT_OFFSETS if kind is PieceKind.KNIGHT else _KING_OFFSETS
            for df, dr in offsets:
                nf, nr = f + df, r + dr
                if not _on_board(nf, nr):
                    continue
                occupant = board.placement[nr * 8 + nf]
                if occupant is not None and occupant.color is color:
                    continue
                moves.append(MoveRecord(sq, Square(nf, nr), piece, capture=occupant))
        else:
            dirs = (
                _BISHOP_DIRS
                if kind is PieceKind.BISHOP
                else _ROOK_DIRS
                if kind is PieceKind.ROOK
                else _BISHOP_DIRS + _ROOK_DIRS
            )
            for df, dr in dirs:
                nf, nr = f + df, r + dr
                while _on_board(nf, nr):
                    occupant = board.placement[nr * 8 + nf]
                    if occupant is None:
                        moves.append(MoveRecord(sq, Square(nf, nr), piece))
                    else:
                        if occupant.color is not color:
                            moves.append(MoveRecord(sq, Square(nf, nr), piece, capture=occupant))
                        break
                    nf, nr = nf + df, nr + dr
    moves.extend(_castle_moves(board))
    return moves


def _pawn_moves(board: BoardState, piece: Piece, sq: Square) -> list[MoveRecord]:
    color = piece.color
    direction = 1 if color is Color.WHITE else -1
    start_rank = 1 if color is Color.WHITE else 6
    promo_rank = 7 if color is Color.WHITE else 0
    moves: list[MoveRecord] = []

    def emit(to_sq: Square, capture: Piece | None, en_passant: bool = False):
        if to_sq.rank == promo_rank:
            for promo in (PieceKind.QUEEN, PieceKind.ROOK, PieceKind.BISHOP, PieceKind.KNIGHT):
                moves.append(MoveRecord(sq, to_sq, piece, capture=capture, promotion=promo))
        else:
            moves.append(MoveRecord(sq, to_sq, piece, capture=capture, en_passant=en_passant))

    one = Square(sq.file, sq.rank + direction)
    if board.piece_at(one) is None:
        emit(one, None)
        if sq.rank == start_rank:
            two = Square(sq.file, sq.rank + 2 * direction)
            if board.piece_at(two) is None:
                emit(two, None)
    for df in (-1, 1):
        nf, nr = sq.file + df, sq.rank + direction
        if not _on_board(nf, nr):
            continue
        to_sq = Square(nf, nr)
        occupant = board.piece_at(to_sq)
        if occupant is not None and occupant.color is not color:
            emit(to_sq, occupant)
        elif board.en_passant == to_sq:
            victim = board.piece_at(Square(nf, sq.rank))
            emit(to_sq, victim, en_passant=True)
    return moves


def _castle_moves(board: BoardState) -> list[MoveRecord]:
    color = board.side_to_move
    rank = 0 if color is Color.WHITE else 7
    king = Piece(color, PieceKind.KING)
    if board.piece_at(Square(4, rank)) != king:
        return []
    enemy = color.opposite
    if is_attacked(board, Square(4, rank), enemy):
        return []
    moves = []
    kingside = "K" if color is Color.WHITE else "k"
    queenside = "Q" if color is Color.WHITE else "q"
    rook = Piece(color, PieceKind.ROOK)
    if (
        kingside in board.castling
        and board.piece_at(Square(7, rank)) == rook
        and board.piece_at(Square(5, rank)) is None
        and board.piece_at(Square(6, rank)) is None
        and not is_attacked(board, Square(5, rank), enemy)
        and not is_attacked(board, Square(6, rank), enemy)
    ):
        moves.append(MoveRecord(Square(4, rank), Square(6, rank), king, castle_k=True))
    if (
        queenside in board.castling
        and board.piece_at(Square(0, rank)) == rook
        and board.piece_at(Square(1, rank)) is None
        and board.piece_at(Square(2, rank)) is None
        and board.piece_at(Square(3, rank)) is None
        and not is_attacked(board, Square(3, rank), enemy)
        and not is_attacked(board, Square(2, rank), enemy)
    ):
        moves.append(MoveRecord(Square(4, rank), Square(2, rank), king, castle_q=True))
    return moves


@lru_cache(maxsize=8192)
def _legal_moves_cached(board: BoardState) -> tuple[MoveRecord, ...]:
    mover = board.side_to_move
    result = []
    for move in _pseudo_moves(board):
        after = _apply_unchecked(board, move)
        if not is_attacked(after, after.king_square(mover), mover.opposite):
            result.append(move)
    return tuple(result)


def legal_moves(board: BoardState) -> list[MoveRecord]:
    """All legal moves, in a deterministic (from-square file-major) order."""
    return list(_legal_moves_cached(board))


def _apply_unchecked(board: BoardState, move: MoveRecord) -> BoardState:
    placement = list(board.placement)
    color = move.moving.color
    placement[move.from_sq.index] = None
    if move.en_passant:
        placement[Square(move.to_sq.file, move.from_sq.rank).index] = None
    placed = move.moving if move.promotion is None else Piece(color, move.promotion)
    placement[move.to_sq.index] = placed
    rank = 0 if color is Color.WHITE else 7
    if move.castle_k:
        placement[Square(7, rank).index] = None
        placement[Square(5, rank).index] = Piece(color, PieceKind.ROOK)
    elif move.castle_q:
        placement[Square(0, rank).index] = None
        placement[Square(3, rank).index] = Piece(color, PieceKind.ROOK)

    castling = set(board.castling)
    if move.moving.kind is PieceKind.KING:
        castling -= {"K", "Q"} if color is Color.WHITE else {"k", "q"}
    rook_homes = {
        Square(0, 0): "Q", Square(7, 0): "K", Square(0, 7): "q", Square(7, 7): "k",
    }
    for sq in (move.from_sq, move.to_sq):
        right = rook_homes.get(sq)
        if right:
            castling.discard(right)

    en_passant = None
    if move.moving.kind is PieceKind.PAWN and abs(move.to_sq.rank - move.from_sq.rank) == 2:
        en_passant = Square(move.from_sq.file, (move.from_sq.rank + move.to_sq.rank) // 2)

    halfmove = 0 if (move.moving.kind is PieceKind.PAWN or move.capture) else board.halfmove_clock + 1
    fullmove = board.fullmove_number + (1 if color is Color.BLACK else 0)
    return replace(
        board,
        placement=tuple(placement),
        side_to_move=color.opposite,
        castling=frozenset(castling),
        en_passant=en_passant,
        halfmove_clock=halfmove,
        fullmove_number=fullmove,
    )


def apply_move(board: BoardState, move: MoveRecord) -> BoardState:
    if move not in legal_moves(board):
        raise IllegalMove(f"{move.uci} is not legal in {board.to_fen()}")
    return _apply_unchecked(board, move)


def perft(board: BoardState, depth: int) -> int:
    if depth == 0:
        return 1
    moves = legal_moves(board)
    if depth == 1:
        return len(moves)
    return sum(perft(_apply_unchecked(board, m), depth - 1) for m in moves)


# -- attack relations -------------------------------------------------------


def _pseudo_captures_square(board: BoardState, piece: Piece, from_sq: Square, target: Square) -> bool:
    """Could ``piece`` on ``from_sq`` capture on ``target``, ignoring check?"""
    df, dr = target.file - from_sq.file, target.rank - from_sq.rank
    kind = piece.kind
    if kind is PieceKind.PAWN:
        forward = 1 if piece.color is Color.WHITE else -1
        return dr == forward and abs(df) == 1
    if kind is PieceKind.KNIGHT:
        return (abs(df), abs(dr)) in ((1, 2), (2, 1))
    if kind is PieceKind.KING:
        return max(abs(df), abs(dr)) == 1
    if kind is PieceKind.BISHOP and abs(df) != abs(dr):
        return False
    if kind is PieceKind.ROOK and df != 0 and dr != 0:
        return False
    if kind is PieceKind.QUEEN and df != 0 and dr != 0 and abs(df) != abs(dr):
        return False
    step_f = (df > 0) - (df < 0)
    step_r = (dr > 0) - (dr < 0)
    f, r = from_sq.file + step_f, from_sq.rank + step_r
    while (f, r) != (target.file, target.rank):
        if board.placement[r * 8 + f] is not None:
            return False
        f, r = f + step_f, r + step_r
    return True


def attack_relations(board: BoardState, strict_legality: bool = False) -> list[AttackRelation]:
    """All (attacker, target) pairs where the attacker has a pseudo-legal
    capture of the target square; pins still count unless
    ``strict_legality`` is set.  Order: attacker square, then target
    square, file-major."""
    relations = []
    for attacker, a_sq in board.pieces():
        for target, t_sq in board.pieces(attacker.color.opposite):
            if not _pseudo_captures_square(board, attacker, a_sq, t_sq):
                continue
            if strict_legality:
                probe = board if board.side_to_move is attacker.color else replace(
                    board, side_to_move=attacker.color, en_passant=None
                )
                move = MoveRecord(a_sq, t_sq, attacker, capture=target)
                candidates = [
                    m for m in legal_moves(probe)
                    if m.from_sq == a_sq and m.to_sq == t_sq
                ]
                if not candidates:
                    continue
                del move
            relations.append(AttackRelation(attacker=(attacker, a_sq), target=(target, t_sq)))
    relations.sort(key=lambda rel: (rel.attacker[1], rel.target[1]))
    return relations
