"""Board representation, legal move generation, SAN resolution and game replay.

Squares are integers ``0..63`` with ``a1 = 0``, ``h1 = 7`` and ``h8 = 63``,
so ``file = sq % 8`` and ``rank = sq // 8``.  Every occupied square may carry
an arbitrary *tag* next to its piece; tags travel with the piece through
:func:`apply_move`, which is how the cipher moves plaintext characters
around the board.
"""

from __future__ import annotations

import enum
import functools
import re
from typing import Any, Dict, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Set, Tuple

FILE_NAMES = "abcdefgh"
RANK_NAMES = "12345678"


class ChessError(ValueError):
    """Base class for rule and notation errors."""


class IllegalMove(ChessError):
    pass


class SanError(ChessError):
    pass


class MalformedSan(SanError):
    pass


class IllegalSan(SanError):
    pass


class AmbiguousSan(SanError):
    pass


class InvalidFen(ChessError):
    pass


class ReplayError(ChessError):
    """A recorded move could not be applied.  ``ply`` is 1-based."""

    def __init__(self, ply: int, san: str, cause: Exception) -> None:
        super().__init__(f"ply {ply} ({san!r}): {cause}")
        self.ply = ply
        self.san = san
        self.cause = cause


# --- squares -----------------------------------------------------------------

def square(file: int, rank: int) -> int:
    if not (0 <= file < 8 and 0 <= rank < 8):
        raise ValueError(f"square out of range: file={file}, rank={rank}")
    return rank * 8 + file


def square_file(sq: int) -> int:
    return sq & 7


def square_rank(sq: int) -> int:
    return sq >> 3


def square_name(sq: int) -> str:
    return FILE_NAMES[sq & 7] + RANK_NAMES[sq >> 3]


def parse_square(name: str) -> int:
    if len(name) != 2 or name[0] not in FILE_NAMES or name[1] not in RANK_NAMES:
        raise ValueError(f"invalid square name: {name!r}")
    return FILE_NAMES.index(name[0]) + 8 * RANK_NAMES.index(name[1])


SQUARE_NAMES = [square_name(sq) for sq in range(64)]


# --- pieces ------------------------------------------------------------------

class Color(enum.IntEnum):
    WHITE = 0
    BLACK = 1

    @property
    def other(self) -> "Color":
        return _OTHER[self]


class Kind(enum.IntEnum):
    PAWN = 1
    KNIGHT = 2
    BISHOP = 3
    ROOK = 4
    QUEEN = 5
    KING = 6

    @property
    def symbol(self) -> str:
        return " pnbrqk"[self]


WHITE, BLACK = Color.WHITE, Color.BLACK
PAWN, KNIGHT, BISHOP, ROOK, QUEEN, KING = Kind


class Piece(NamedTuple):
    color: Color
    kind: Kind

    def symbol(self) -> str:
        s = self.kind.symbol
        return s.upper() if self.color == WHITE else s

    @classmethod
    def from_symbol(cls, symbol: str) -> "Piece":
        kind = Kind(" pnbrqk".index(symbol.lower()))
        return PIECES[WHITE if symbol.isupper() else BLACK][kind]


PIECES = [[None] + [Piece(c, k) for k in Kind] for c in Color]


class MoveFlag(enum.Enum):
    NORMAL = "normal"
    CAPTURE = "capture"
    EN_PASSANT = "en-passant"
    CASTLE_KINGSIDE = "castle-kingside"
    CASTLE_QUEENSIDE = "castle-queenside"
    DOUBLE_PAWN_PUSH = "double-pawn-push"


class Move(NamedTuple):
    from_square: int
    to_square: int
    promotion: Optional[Kind] = None
    flag: MoveFlag = MoveFlag.NORMAL

    def uci(self) -> str:
        promo = self.promotion.symbol if self.promotion else ""
        return SQUARE_NAMES[self.from_square] + SQUARE_NAMES[self.to_square] + promo

    @property
    def is_capture(self) -> bool:
        return self.flag in (MoveFlag.CAPTURE, MoveFlag.EN_PASSANT)

    @property
    def captured_square(self) -> Optional[int]:
        """Square the captured piece stood on; differs from ``to_square`` for en passant."""
        if self.flag is MoveFlag.EN_PASSANT:
            return square(square_file(self.to_square), square_rank(self.from_square))
        if self.flag is MoveFlag.CAPTURE:
            return self.to_square
        return None


class Captured(NamedTuple):
    piece: Piece
    square: int
    tag: Any


# --- precomputed geometry ----------------------------------------------------

def _step_targets(deltas: Sequence[Tuple[int, int]]) -> List[List[int]]:
    table = []
    for sq in range(64):
        f, r = sq & 7, sq >> 3
        table.append([(r + dr) * 8 + f + df for df, dr in deltas
                      if 0 <= f + df < 8 and 0 <= r + dr < 8])
    return table


KNIGHT_TARGETS = _step_targets([(1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2)])
KING_TARGETS = _step_targets([(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)])

ROOK_DIRS = [(1, 0), (-1, 0), (0, 1), (0, -1)]
BISHOP_DIRS = [(1, 1), (1, -1), (-1, 1), (-1, -1)]


def _rays(dirs: Sequence[Tuple[int, int]]) -> List[List[List[int]]]:
    table = []
    for sq in range(64):
        f, r = sq & 7, sq >> 3
        per_dir = []
        for df, dr in dirs:
            ray = []
            nf, nr = f + df, r + dr
            while 0 <= nf < 8 and 0 <= nr < 8:
                ray.append(nr * 8 + nf)
                nf += df
                nr += dr
            per_dir.append(ray)
        table.append(per_dir)
    return table


ROOK_RAYS = _rays(ROOK_DIRS)
BISHOP_RAYS = _rays(BISHOP_DIRS)

# PAWN_ATTACKERS[c][sq]: squares from which a pawn of color c attacks sq.
PAWN_ATTACKERS = [_step_targets([(-1, -1), (1, -1)]), _step_targets([(-1, 1), (1, 1)])]
# PAWN_CAPTURES[c][sq]: squares a pawn of color c on sq attacks.
PAWN_CAPTURES = [_step_targets([(-1, 1), (1, 1)]), _step_targets([(-1, -1), (1, -1)])]

PROMOTION_KINDS = (QUEEN, ROOK, BISHOP, KNIGHT)

_OTHER = (BLACK, WHITE)

# Castling rights index: 0 = White O-O, 1 = White O-O-O, 2 = Black O-O, 3 = Black O-O-O.
_RIGHTS_LOST_AT = {0: (1, 0, 1, 1), 7: (0, 1, 1, 1), 4: (0, 0, 1, 1),
                   56: (1, 1, 1, 0), 63: (1, 1, 0, 1), 60: (1, 1, 0, 0)}
_RIGHTS_LOST_AT = {sq: tuple(bool(x) for x in mask) for sq, mask in _RIGHTS_LOST_AT.items()}

STARTING_FEN = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1"


# --- board -------------------------------------------------------------------

class Board:
    """Immutable chess position with optional per-piece tags.

    Use :meth:`apply` (or :func:`apply_move`) to obtain successor positions.
    ``released`` holds the :class:`Captured` record of the capture that
    produced this position, if any.
    """

    __slots__ = ("_squares", "_tags", "turn", "castling", "ep_square",
                 "halfmove_clock", "fullmove_number", "ply", "_kings", "released")

    def __init__(self, squares: List[Optional[Piece]], tags: List[Any], turn: Color,
                 castling: Tuple[bool, bool, bool, bool], ep_square: Optional[int],
                 halfmove_clock: int = 0, fullmove_number: int = 1, ply: int = 0,
                 released: Optional[Captured] = None,
                 kings: Optional[Tuple[int, int]] = None) -> None:
        self._squares = squares
        self._tags = tags
        self.turn = turn
        self.castling = castling
        self.ep_square = ep_square
        self.halfmove_clock = halfmove_clock
        self.fullmove_number = fullmove_number
        self.ply = ply
        self.released = released
        if kings is None:
            found = [-1, -1]
            for sq, p in enumerate(squares):
                if p is not None and p.kind == KING:
                    found[p.color] = sq
            kings = (found[0], found[1])
        self._kings = kings

    # construction

    @classmethod
    def initial(cls, tags: Optional[Mapping[int, Any]] = None) -> "Board":
        return cls.from_fen(STARTING_FEN, tags)

    @classmethod
    def from_fen(cls, fen: str, tags: Optional[Mapping[int, Any]] = None) -> "Board":
        parts = fen.split()
        if len(parts) == 4:
            parts += ["0", "1"]
        if len(parts) != 6:
            raise InvalidFen(f"expected 6 fields: {fen!r}")
        placement, turn, castling, ep, half, full = parts
        rows = placement.split("/")
        if len(rows) != 8:
            raise InvalidFen(f"expected 8 ranks: {fen!r}")
        squares: List[Optional[Piece]] = [None] * 64
        for i, row in enumerate(rows):
            rank = 7 - i
            f = 0
            for ch in row:
                if ch.isdigit():
                    f += int(ch)
                elif ch.lower() in "pnbrqk":
                    if f > 7:
                        raise InvalidFen(f"rank overflow: {row!r}")
                    squares[rank * 8 + f] = Piece.from_symbol(ch)
                    f += 1
                else:
                    raise InvalidFen(f"bad placement character {ch!r}")
            if f != 8:
                raise InvalidFen(f"rank {rank + 1} has {f} files")
        if turn not in ("w", "b"):
            raise InvalidFen(f"bad side to move {turn!r}")
        if castling != "-" and (not castling or set(castling) - set("KQkq")):
            raise InvalidFen(f"bad castling field {castling!r}")
        rights = tuple(ch in castling for ch in "KQkq")
        ep_square = None if ep == "-" else parse_square(ep)
        try:
            halfmove, fullmove = int(half), int(full)
        except ValueError:
            raise InvalidFen(f"bad move counters in {fen!r}") from None
        tag_list: List[Any] = [None] * 64
        for sq, tag in (tags or {}).items():
            if squares[sq] is None:
                raise ValueError(f"tag on empty square {square_name(sq)}")
            tag_list[sq] = tag
        side = WHITE if turn == "w" else BLACK
        board = cls(squares, tag_list, side, rights, ep_square, halfmove, fullmove,
                    2 * (fullmove - 1) + (side == BLACK))
        board.validate()
        return board

    def validate(self) -> None:
        """Raise :class:`InvalidFen` unless the basic position invariants hold."""
        counts = [0, 0]
        kings = [0, 0]
        for sq, p in enumerate(self._squares):
            if p is None:
                continue
            counts[p.color] += 1
            if p.kind == KING:
                kings[p.color] += 1
            elif p.kind == PAWN and (sq >> 3) in (0, 7):
                raise InvalidFen(f"pawn on back rank at {square_name(sq)}")
        if kings != [1, 1]:
            raise InvalidFen("each side needs exactly one king")
        if max(counts) > 16:
            raise InvalidFen("more than 16 pieces for one side")
        if self.ep_square is not None and (self.ep_square >> 3) not in (2, 5):
            raise InvalidFen("en passant target must be on rank 3 or 6")
        if self.is_attacked(self._kings[self.turn.other], self.turn):
            raise InvalidFen("side not to move is in check")

    # queries

    def piece_at(self, sq: int) -> Optional[Piece]:
        return self._squares[sq]

    def tag_at(self, sq: int) -> Any:
        return self._tags[sq]

    def king(self, color: Color) -> int:
        return self._kings[color]

    def occupied(self) -> Iterator[Tuple[int, Piece, Any]]:
        """Yield ``(square, piece, tag)`` in ascending square order."""
        for sq, p in enumerate(self._squares):
            if p is not None:
                yield sq, p, self._tags[sq]

    @property
    def placement(self) -> Dict[int, Tuple[Piece, Any]]:
        return {sq: (p, t) for sq, p, t in self.occupied()}

    def piece_count(self, color: Optional[Color] = None) -> int:
        return sum(1 for p in self._squares if p is not None and (color is None or p.color == color))

    def is_attacked(self, sq: int, by: Color) -> bool:
        sqs = self._squares
        for t in KNIGHT_TARGETS[sq]:
            p = sqs[t]
            if p is not None and p.kind == KNIGHT and p.color == by:
                return True
        for t in PAWN_ATTACKERS[by][sq]:
            p = sqs[t]
            if p is not None and p.kind == PAWN and p.color == by:
                return True
        for ray in ROOK_RAYS[sq]:
            for t in ray:
                p = sqs[t]
                if p is not None:
                    if p.color == by and (p.kind == ROOK or p.kind == QUEEN):
                        return True
                    break
        for ray in BISHOP_RAYS[sq]:
            for t in ray:
                p = sqs[t]
                if p is not None:
                    if p.color == by and (p.kind == BISHOP or p.kind == QUEEN):
                        return True
                    break
        for t in KING_TARGETS[sq]:
            p = sqs[t]
            if p is not None and p.kind == KING and p.color == by:
                return True
        return False

    def is_check(self) -> bool:
        return self.is_attacked(self._kings[self.turn], self.turn.other)

    # move generation

    def _classify(self, frm: int, to: int, promotion: Optional[Kind] = None) -> Move:
        piece = self._squares[frm]
        target = self._squares[to]
        if piece.kind == KING and abs(to - frm) == 2:
            flag = MoveFlag.CASTLE_KINGSIDE if to > frm else MoveFlag.CASTLE_QUEENSIDE
        elif piece.kind == PAWN and to == self.ep_square and target is None and (to - frm) % 8:
            flag = MoveFlag.EN_PASSANT
        elif target is not None:
            flag = MoveFlag.CAPTURE
        elif piece.kind == PAWN and abs(to - frm) == 16:
            flag = MoveFlag.DOUBLE_PAWN_PUSH
        else:
            flag = MoveFlag.NORMAL
        return Move(frm, to, promotion, flag)

    def _pawn_moves(self, frm: int, out: List[Move]) -> None:
        sqs = self._squares
        color = self.turn
        step = 8 if color == WHITE else -8
        last_rank = 7 if color == WHITE else 0
        start_rank = 1 if color == WHITE else 6
        targets = []
        one = frm + step
        if sqs[one] is None:
            targets.append(one)
            two = one + step
            if (frm >> 3) == start_rank and sqs[two] is None:
                targets.append(two)
        for t in PAWN_CAPTURES[color][frm]:
            p = sqs[t]
            if (p is not None and p.color != color) or t == self.ep_square:
                targets.append(t)
        for t in targets:
            if (t >> 3) == last_rank:
                for kind in PROMOTION_KINDS:
                    out.append(self._classify(frm, t, kind))
            else:
                out.append(self._classify(frm, t))

    def _piece_moves(self, frm: int, out: List[Move]) -> None:
        sqs = self._squares
        piece = sqs[frm]
        color = piece.color
        kind = piece.kind
        if kind == PAWN:
            self._pawn_moves(frm, out)
            return
        if kind == KNIGHT or kind == KING:
            for t in (KNIGHT_TARGETS if kind == KNIGHT else KING_TARGETS)[frm]:
                p = sqs[t]
                if p is None or p.color != color:
                    out.append(self._classify(frm, t))
            if kind == KING:
                self._castling_moves(frm, out)
            return
        rays = []
        if kind != BISHOP:
            rays += ROOK_RAYS[frm]
        if kind != ROOK:
            rays += BISHOP_RAYS[frm]
        for ray in rays:
            for t in ray:
                p = sqs[t]
                if p is None:
                    out.append(self._classify(frm, t))
                else:
                    if p.color != color:
                        out.append(self._classify(frm, t))
                    break

    def _castling_moves(self, king_sq: int, out: List[Move]) -> None:
        color = self.turn
        home = 4 if color == WHITE else 60
        if king_sq != home:
            return
        sqs = self._squares
        enemy = color.other
        rook = PIECES[color][ROOK]
        kingside, queenside = self.castling[2 * color], self.castling[2 * color + 1]
        if kingside and sqs[home + 3] == rook and sqs[home + 1] is None and sqs[home + 2] is None:
            if not any(self.is_attacked(s, enemy) for s in (home, home + 1, home + 2)):
                out.append(Move(home, home + 2, None, MoveFlag.CASTLE_KINGSIDE))
        if (queenside and sqs[home - 4] == rook and sqs[home - 1] is None
                and sqs[home - 2] is None and sqs[home - 3] is None):
            if not any(self.is_attacked(s, enemy) for s in (home, home - 1, home - 2)):
                out.append(Move(home, home - 2, None, MoveFlag.CASTLE_QUEENSIDE))

    def pseudo_legal_moves(self) -> List[Move]:
        out: List[Move] = []
        color = self.turn
        for sq, p in enumerate(self._squares):
            if p is not None and p.color == color:
                self._piece_moves(sq, out)
        return out

    def _is_safe(self, move: Move) -> bool:
        after = self._after(move)
        return not after.is_attacked(after._kings[self.turn], _OTHER[self.turn])

    def generate_legal_moves(self) -> List[Move]:
        return [m for m in self.pseudo_legal_moves() if self._is_safe(m)]

    def legal_moves(self) -> Set[Move]:
        return set(self.generate_legal_moves())

    def has_legal_move(self) -> bool:
        return any(self._is_safe(m) for m in self.pseudo_legal_moves())

    def is_legal(self, move: Move) -> bool:
        piece = self._squares[move.from_square]
        if piece is None or piece.color != self.turn:
            return False
        candidates: List[Move] = []
        self._piece_moves(move.from_square, candidates)
        return move in candidates and self._is_safe(move)

    def is_checkmate(self) -> bool:
        return self.is_check() and not self.has_legal_move()

    def is_stalemate(self) -> bool:
        return not self.is_check() and not self.has_legal_move()

    # move application

    def _after(self, move: Move) -> "Board":
        sqs = self._squares[:]
        tags = self._tags[:]
        frm, to = move.from_square, move.to_square
        piece = sqs[frm]
        tag = tags[frm]
        color = piece.color
        released = None
        flag = move.flag
        if flag is MoveFlag.CAPTURE:
            cap_sq = to
        elif flag is MoveFlag.EN_PASSANT:
            cap_sq = (frm & 0x38) | (to & 7)
        else:
            cap_sq = None
        if cap_sq is not None:
            released = Captured(sqs[cap_sq], cap_sq, tags[cap_sq])
            sqs[cap_sq] = None
            tags[cap_sq] = None
        sqs[frm] = None
        tags[frm] = None
        sqs[to] = PIECES[color][move.promotion] if move.promotion else piece
        tags[to] = tag
        if flag is MoveFlag.CASTLE_KINGSIDE or flag is MoveFlag.CASTLE_QUEENSIDE:
            if flag is MoveFlag.CASTLE_KINGSIDE:
                rook_from, rook_to = frm + 3, frm + 1
            else:
                rook_from, rook_to = frm - 4, frm - 1
            sqs[rook_to], tags[rook_to] = sqs[rook_from], tags[rook_from]
            sqs[rook_from] = tags[rook_from] = None
        rights = self.castling
        for sq in (frm, to):
            lost = _RIGHTS_LOST_AT.get(sq)
            if lost is not None:
                rights = tuple(a and b for a, b in zip(rights, lost))
        ep = (frm + to) // 2 if flag is MoveFlag.DOUBLE_PAWN_PUSH else None
        halfmove = 0 if piece.kind == PAWN or released is not None else self.halfmove_clock + 1
        fullmove = self.fullmove_number + (color == BLACK)
        kings = self._kings
        if piece.kind == KING:
            kings = (to, kings[1]) if color == WHITE else (kings[0], to)
        return Board(sqs, tags, _OTHER[color], rights, ep, halfmove, fullmove, self.ply + 1,
                     released, kings)

    def apply(self, move: Move) -> "Board":
        if not self.is_legal(move):
            raise IllegalMove(f"illegal move {move.uci()} in {self.fen()}")
        return self._after(move)

    # SAN

    def parse_san(self, san: str) -> Move:
        return self._resolve_san(san)[0]

    def _resolve_san(self, san: str) -> Tuple[Move, "Board"]:
        """Return the move for ``san`` and the position after it."""
        lexed = _lex_san(san)
        if lexed is None:
            raise MalformedSan(f"not a SAN move: {san!r}")
        flag, kind, to, from_file, from_rank, promo, capture = lexed
        color = self.turn
        enemy = _OTHER[color]
        if flag is not None:
            out: List[Move] = []
            self._castling_moves(self._kings[color], out)
            for move in out:
                if move.flag is flag:
                    after = self._after(move)
                    if not after.is_attacked(after._kings[color], enemy):
                        return move, after
            raise IllegalSan(f"{san!r} is not legal here")

        target = self._squares[to]
        if target is not None and target.color == color:
            raise IllegalSan(f"{san!r}: {SQUARE_NAMES[to]} holds an own piece")
        if kind == PAWN:
            if ((to >> 3) == (7 if color == WHITE else 0)) != (promo is not None):
                raise IllegalSan(f"{san!r}: promotion piece required exactly on the last rank")
            if (capture or (from_file is not None and from_file != (to & 7))) and target is None \
                    and to != self.ep_square:
                raise IllegalSan(f"{san!r}: nothing to capture on {SQUARE_NAMES[to]}")

        found: Optional[Tuple[Move, Board]] = None
        for frm in self._san_origins(kind, to, from_file, capture):
            if from_file is not None and (frm & 7) != from_file:
                continue
            if from_rank is not None and (frm >> 3) != from_rank:
                continue
            move = self._classify(frm, to, promo)
            if capture and not move.is_capture:
                continue
            after = self._after(move)
            if after.is_attacked(after._kings[color], enemy):
                continue
            if found is not None:
                raise AmbiguousSan(f"{san!r} matches {found[0].uci()} and {move.uci()}")
            found = (move, after)
        if found is None:
            raise IllegalSan(f"{san!r} is not legal here")
        return found

    def _san_origins(self, kind: Kind, to: int, from_file: Optional[int], capture: bool) -> List[int]:
        sqs = self._squares
        color = self.turn
        own = PIECES[color][kind]
        if kind == PAWN:
            step = 8 if color == WHITE else -8
            if capture or (from_file is not None and from_file != (to & 7)):
                return [sq for sq in PAWN_ATTACKERS[color][to] if sqs[sq] == own]
            if sqs[to] is not None:
                return []
            one = to - step
            if 0 <= one < 64 and sqs[one] == own:
                return [one]
            two = one - step
            if 0 <= two < 64 and sqs[one] is None and sqs[two] == own:
                return [two]
            return []
        if kind == KNIGHT:
            return [sq for sq in KNIGHT_TARGETS[to] if sqs[sq] == own]
        if kind == KING:
            return [sq for sq in KING_TARGETS[to] if sqs[sq] == own]
        rays = []
        if kind != BISHOP:
            rays += ROOK_RAYS[to]
        if kind != ROOK:
            rays += BISHOP_RAYS[to]
        found = []
        for ray in rays:
            for sq in ray:
                p = sqs[sq]
                if p is not None:
                    if p == own:
                        found.append(sq)
                    break
        return found

    # FEN

    def board_fen(self) -> str:
        rows = []
        for rank in range(7, -1, -1):
            row, empty = "", 0
            for f in range(8):
                p = self._squares[rank * 8 + f]
                if p is None:
                    empty += 1
                else:
                    if empty:
                        row += str(empty)
                        empty = 0
                    row += p.symbol()
            rows.append(row + (str(empty) if empty else ""))
        return "/".join(rows)

    def fen(self) -> str:
        rights = "".join(ch for ch, ok in zip("KQkq", self.castling) if ok) or "-"
        ep = SQUARE_NAMES[self.ep_square] if self.ep_square is not None else "-"
        return (f"{self.board_fen()} {'w' if self.turn == WHITE else 'b'} {rights} {ep} "
                f"{self.halfmove_clock} {self.fullmove_number}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Board):
            return NotImplemented
        return (self._squares == other._squares and self._tags == other._tags
                and self.turn == other.turn and self.castling == other.castling
                and self.ep_square == other.ep_square and self.ply == other.ply
                and self.halfmove_clock == other.halfmove_clock)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Board({self.fen()!r})"

    def __str__(self) -> str:
        lines = []
        for rank in range(7, -1, -1):
            lines.append(" ".join(
                (p.symbol() if p else ".") for p in self._squares[rank * 8:rank * 8 + 8]))
        return "\n".join(lines)


@functools.lru_cache(maxsize=8192)
def _lex_san(san: str) -> Optional[tuple]:
    """Split a SAN token into (castle flag, kind, to, from file, from rank, promotion, capture)."""
    m = SAN_REGEX.match(san.strip().rstrip("!?"))
    if m is None:
        return None
    castle = m.group("castle")
    if castle:
        flag = MoveFlag.CASTLE_QUEENSIDE if castle.count("-") == 2 else MoveFlag.CASTLE_KINGSIDE
        return flag, KING, None, None, None, None, False
    letter, ff, fr, promo, capture = m.group("piece", "ff", "fr", "promo", "x")
    kind = Kind(" PNBRQK".index(letter)) if letter else PAWN
    promotion = Kind(" PNBRQK".index(promo)) if promo else None
    if promotion is not None and kind != PAWN:
        return None
    return (None, kind, parse_square(m.group("to")), FILE_NAMES.index(ff) if ff else None,
            RANK_NAMES.index(fr) if fr else None, promotion, bool(capture))


SAN_REGEX = re.compile(
    r"^(?:(?P<castle>O-O-O|O-O|0-0-0|0-0)"
    r"|(?P<piece>[NBRQK])?(?P<ff>[a-h])?(?P<fr>[1-8])?(?P<x>x)?(?P<to>[a-h][1-8])(?:=?(?P<promo>[NBRQ]))?)"
    r"(?P<check>[+#])?$")


# --- functional surface ------------------------------------------------------

def initial_board(tags: Optional[Mapping[int, Any]] = None) -> Board:
    return Board.initial(tags)


def legal_moves(board: Board) -> Set[Move]:
    return board.legal_moves()


def parse_san(board: Board, san: str) -> Move:
    return board.parse_san(san)


def apply_move(board: Board, move: Move) -> Board:
    """Return the position after ``move``; a capture is reported on ``.released``."""
    return board.apply(move)


def is_checkmate(board: Board) -> bool:
    return board.is_checkmate()


class TraceEntry(NamedTuple):
    ply: int
    move: Move
    captured: Optional[Captured]


class Replay(NamedTuple):
    final: Board
    trace: List[TraceEntry]

    @property
    def captures(self) -> List[TraceEntry]:
        return [e for e in self.trace if e.captured is not None]


def replay_moves(sans: Sequence[str], start: Optional[Board] = None) -> Replay:
    board = start if start is not None else Board.initial()
    trace: List[TraceEntry] = []
    for i, san in enumerate(sans, 1):
        try:
            move, board = board._resolve_san(san)
            if san.rstrip("!?").endswith("#") and not board.is_checkmate():
                raise IllegalSan(f"{san!r} claims mate but the position is not checkmate")
        except ChessError as exc:
            raise ReplayError(i, san, exc) from exc
        trace.append(TraceEntry(i, move, board.released))
    return Replay(board, trace)


def replay_game(record: Any, start: Optional[Board] = None) -> Replay:
    """Replay a :class:`~chesscrypt.pgn.GameRecord` (anything with ``.moves``)."""
    return replay_moves(record.moves, start)
