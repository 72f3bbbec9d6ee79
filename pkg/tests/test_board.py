import pytest
from hypothesis import given, settings, strategies as st

from chesscrypt.board import (BLACK, KING, KNIGHT, PAWN, QUEEN, ROOK, WHITE, AmbiguousSan, Board,
                              IllegalMove, IllegalSan, InvalidFen, MalformedSan, Move, MoveFlag,
                              ReplayError, apply_move, initial_board, is_checkmate, legal_moves,
                              parse_san, parse_square, replay_game, replay_moves, square, square_name)
from chesscrypt.games import EMPTY_GAME, FOOLS_MATE, REMARK_GAME
from chesscrypt.pgn import GameRecord

sq = parse_square


# Published perft node counts (chessprogramming.org "Perft Results").
PERFT = [
    ("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1", [20, 400, 8902]),
    ("r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1", [48, 2039]),
    ("8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 0 1", [14, 191, 2812]),
    ("r3k2r/Pppp1ppp/1b3nbN/nP6/BBP1P3/q4N2/Pp1P2PP/R2Q1RK1 w kq - 0 1", [6, 264, 9467]),
    ("rnbq1k1r/pp1Pbppp/2p5/8/2B5/8/PPP1NnPP/RNBQK2R w KQ - 1 8", [44, 1486]),
]


def perft(board, depth):
    moves = board.generate_legal_moves()
    if depth == 1:
        return len(moves)
    return sum(perft(board.apply(m), depth - 1) for m in moves)


@pytest.mark.parametrize("fen,counts", PERFT)
def test_perft(fen, counts):
    board = Board.from_fen(fen)
    assert [perft(board, d) for d in range(1, len(counts) + 1)] == counts


@pytest.mark.parametrize("name", ["a1", "e4", "h8", "d5"])
def test_square_round_trip(name):
    s = parse_square(name)
    assert square_name(s) == name
    assert 0 <= s < 64


def test_square_coordinates():
    assert parse_square("e4") == square(4, 3)
    with pytest.raises(ValueError):
        square(8, 0)
    with pytest.raises(ValueError):
        parse_square("i1")


def test_initial_board():
    b = initial_board()
    assert b.piece_at(sq("e1")).kind == KING and b.piece_at(sq("e1")).color == WHITE
    assert b.piece_at(sq("e8")).kind == KING and b.piece_at(sq("e8")).color == BLACK
    assert b.piece_count() == 32
    assert b.piece_count(WHITE) == b.piece_count(BLACK) == 16
    assert b.ep_square is None
    assert b.turn == WHITE and b.castling == (True, True, True, True) and b.ply == 0
    assert b.fen() == "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1"


def test_initial_legal_moves():
    moves = legal_moves(initial_board())
    assert len(moves) == 20
    assert sum(1 for m in moves if initial_board().piece_at(m.from_square).kind == KNIGHT) == 4


def test_fools_mate_queen_ray():
    board = replay_moves(["f3", "e5", "g4"]).final
    # d8-h4 diagonal: e7 vacated by the e-pawn, f6 and g5 empty
    assert Move(sq("d8"), sq("h4")) in legal_moves(board)
    after = replay_moves(["f3", "e5", "g4", "Qh4#"]).final
    assert is_checkmate(after)
    assert legal_moves(after) == set()


def test_parse_san_basic():
    b = initial_board()
    assert parse_san(b, "Nf3") == Move(sq("g1"), sq("f3"))
    assert parse_san(b, "e4") == Move(sq("e2"), sq("e4"), None, MoveFlag.DOUBLE_PAWN_PUSH)
    assert parse_san(b, "Nf3!?") == Move(sq("g1"), sq("f3"))
    with pytest.raises(IllegalSan):
        parse_san(b, "Ke2")
    with pytest.raises(IllegalSan):
        parse_san(b, "Nd4")
    for bad in ("Zf3", "e9", "", "Qe2=Q", "N"):
        with pytest.raises(MalformedSan):
            parse_san(b, bad)


def test_parse_san_disambiguation():
    board = Board.from_fen("4k3/8/8/8/8/8/4K3/R6R w - - 0 1")
    with pytest.raises(AmbiguousSan):
        board.parse_san("Rd1")
    assert board.parse_san("Rad1") == Move(sq("a1"), sq("d1"))
    assert board.parse_san("Rhd1") == Move(sq("h1"), sq("d1"))
    board = Board.from_fen("4k3/8/8/1N6/8/8/8/1N2K3 w - - 0 1")
    with pytest.raises(AmbiguousSan):
        board.parse_san("Nc3")
    assert board.parse_san("N1c3") == Move(sq("b1"), sq("c3"))
    assert board.parse_san("N5c3") == Move(sq("b5"), sq("c3"))


def test_pinned_piece_not_a_candidate():
    # the c3 knight is pinned by the b4 bishop, so Ne2 is unambiguous
    board = Board.from_fen("4k3/8/8/8/1b6/2N5/8/4K1N1 w - - 0 1")
    assert board.parse_san("Ne2") == Move(sq("g1"), sq("e2"))


def test_remark_promotion():
    replay = replay_moves(REMARK_GAME.moves[:44])
    board = replay.final
    assert board.turn == WHITE and board.fullmove_number == 23
    move = board.parse_san("gxh8=Q")
    assert move == Move(sq("g7"), sq("h8"), QUEEN, MoveFlag.CAPTURE)


def test_castling_moves_rook_with_tags():
    board = Board.from_fen("r3k2r/8/8/8/8/8/8/R3K2R w KQkq - 0 1", {sq("e1"): "K", sq("h1"): "R"})
    after = apply_move(board, board.parse_san("O-O"))
    assert after.piece_at(sq("g1")).kind == KING and after.piece_at(sq("f1")).kind == ROOK
    assert after.tag_at(sq("g1")) == "K" and after.tag_at(sq("f1")) == "R"
    assert after.piece_at(sq("e1")) is None and after.piece_at(sq("h1")) is None
    assert after.castling == (False, False, True, True)
    long_ = apply_move(after, after.parse_san("O-O-O"))
    assert long_.piece_at(sq("c8")).kind == KING and long_.piece_at(sq("d8")).kind == ROOK


def test_castling_through_check_refused():
    board = Board.from_fen("4k3/8/8/8/8/8/5r2/R3K2R w KQ - 0 1")
    # f2 rook attacks f1: kingside transit square; queenside is fine
    with pytest.raises(IllegalSan):
        board.parse_san("O-O")
    assert board.parse_san("O-O-O").flag is MoveFlag.CASTLE_QUEENSIDE


def test_en_passant_removes_pawn_from_its_square():
    board = Board.from_fen("4k3/8/8/3pP3/8/8/8/4K3 w - d6 0 1", {sq("d5"): "victim", sq("e5"): "hunter"})
    move = board.parse_san("exd6")
    assert move.flag is MoveFlag.EN_PASSANT and move.captured_square == sq("d5")
    after = apply_move(board, move)
    assert after.piece_at(sq("d5")) is None
    assert after.piece_at(sq("d6")).kind == PAWN and after.tag_at(sq("d6")) == "hunter"
    assert after.released.square == sq("d5") and after.released.tag == "victim"
    assert after.piece_count() == board.piece_count() - 1


def test_en_passant_exposing_king_is_illegal():
    board = Board.from_fen("8/8/8/K2pP2r/8/8/8/7k w - d6 0 1")
    with pytest.raises(IllegalSan):
        board.parse_san("exd6")


def test_promotion_keeps_tag():
    board = Board.from_fen("4k3/1P6/8/8/8/8/8/4K3 w - - 0 1", {sq("b7"): 42})
    after = apply_move(board, board.parse_san("b8=N"))
    assert after.piece_at(sq("b8")).kind == KNIGHT and after.tag_at(sq("b8")) == 42
    with pytest.raises(IllegalSan):
        board.parse_san("b8")


def test_apply_move_rejects_illegal():
    with pytest.raises(IllegalMove):
        apply_move(initial_board(), Move(sq("e1"), sq("e2")))
    with pytest.raises(IllegalMove):
        apply_move(initial_board(), Move(sq("e7"), sq("e5")))


def test_apply_move_is_pure():
    b = initial_board()
    fen = b.fen()
    b.apply(b.parse_san("e4"))
    assert b.fen() == fen


def test_invalid_fen():
    for fen in ["8/8/8/8/8/8/8/8 w - - 0 1", "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR x KQkq - 0 1",
                "P3k3/8/8/8/8/8/8/4K3 w - - 0 1", "4k3/8/8/8/8/8/8/4K3 w - e4 0 1"]:
        with pytest.raises(InvalidFen):
            Board.from_fen(fen)


def test_replay_empty_game():
    replay = replay_game(EMPTY_GAME)
    assert replay.final == initial_board()
    assert replay.trace == []


def test_replay_fools_mate():
    replay = replay_game(FOOLS_MATE)
    assert len(replay.trace) == 4
    assert replay.captures == []
    assert is_checkmate(replay.final)


def test_replay_remark_game():
    replay = replay_game(REMARK_GAME)
    assert len(replay.trace) == 63
    assert is_checkmate(replay.final)
    assert len(replay.captures) == sum("x" in san for san in REMARK_GAME.moves) == 14
    assert replay.final.fen() == "r7/1p5Q/pkb1p3/4P3/1B1Q4/6P1/P4P2/RN2KB1R b KQ - 4 32"


def test_replay_error_carries_ply():
    with pytest.raises(ReplayError) as info:
        replay_game(GameRecord((), ("e4", "e5", "Ke3"), "*"))
    assert info.value.ply == 3 and isinstance(info.value.cause, IllegalSan)


def test_false_mate_claim_rejected():
    with pytest.raises(ReplayError):
        replay_moves(["e4", "e5", "Qh5#"])


def test_replay_is_deterministic():
    assert replay_game(REMARK_GAME) == replay_game(REMARK_GAME)


# --- random playouts ---------------------------------------------------------

@st.composite
def playouts(draw, max_plies=80):
    tags = {s: f"t{s}" for s in list(range(16)) + list(range(48, 64))}
    board = Board.initial(tags)
    boards = [board]
    choices = draw(st.lists(st.integers(0, 10 ** 6), max_size=max_plies))
    for c in choices:
        moves = sorted(board.generate_legal_moves(), key=lambda m: m.uci())
        if not moves:
            break
        board = board.apply(moves[c % len(moves)])
        boards.append(board)
    return boards


@settings(max_examples=60, deadline=None)
@given(playouts())
def test_playout_invariants(boards):
    released = []
    all_tags = sorted(boards[0].tag_at(s) for s, _, _ in boards[0].occupied())
    for b in boards:
        if b.released is not None:
            released.append(b.released.tag)
        kings = [p for _, p, _ in b.occupied() if p.kind == KING]
        assert sorted(p.color for p in kings) == [WHITE, BLACK]
        assert b.piece_count() + len(released) == 32
        assert sorted([t for _, _, t in b.occupied()] + released) == all_tags
        assert all(not (p.kind == PAWN and (s >> 3) in (0, 7)) for s, p, _ in b.occupied())
        if b.ep_square is not None:
            assert (b.ep_square >> 3) in (2, 5)
        assert b.piece_count(WHITE) <= 16 and b.piece_count(BLACK) <= 16


@settings(max_examples=30, deadline=None)
@given(playouts())
def test_fen_round_trip(boards):
    for b in boards[::7]:
        assert Board.from_fen(b.fen()).fen() == b.fen()


chess = pytest.importorskip("chess")


@settings(max_examples=40, deadline=None)
@given(playouts(max_plies=120))
def test_legal_moves_match_python_chess(boards):
    for b in boards[::5]:
        ref = chess.Board(b.fen())
        assert {m.uci() for m in b.legal_moves()} == {m.uci() for m in ref.legal_moves}
        assert b.is_checkmate() == ref.is_checkmate()
        for m in ref.legal_moves:
            # SAN from an independent generator resolves to the same move here
            assert b.parse_san(ref.san(m)).uci() == m.uci()
