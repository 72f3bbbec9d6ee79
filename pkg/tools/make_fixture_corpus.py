#!/usr/bin/env python3
"""Generate the synthetic Lichess-style fixture corpus used by the test suite.

SAN is produced by python-chess rather than by this package, so replaying the
corpus is an independent check of the SAN resolver.  The move policy is a
cheap heuristic (mate-in-one, captures, castling, development) so that games
look vaguely human, not a model of real play.

    python tools/make_fixture_corpus.py --games 1200 --seed 2024 > tests/data/fixture_corpus.pgn
"""

import argparse
import random
import string
import sys

import chess

VALUES = {chess.PAWN: 1, chess.KNIGHT: 3, chess.BISHOP: 3, chess.ROOK: 5, chess.QUEEN: 9, chess.KING: 0}
TIME_CONTROLS = ["60+0", "120+1", "180+0", "180+2", "300+0", "300+3", "600+0", "600+5", "900+10"]


def choose(board, rng):
    moves = list(board.legal_moves)
    weights = []
    for m in moves:
        w = 1.0
        if board.is_castling(m):
            w += 25
        if board.is_capture(m):
            victim = board.piece_at(m.to_square)
            w += 4 + 3 * (VALUES[victim.piece_type] if victim else 1)
        if m.promotion == chess.QUEEN:
            w += 30
        piece = board.piece_at(m.from_square)
        if piece.piece_type in (chess.KNIGHT, chess.BISHOP) and chess.square_rank(m.from_square) in (0, 7):
            w += 3
        if piece.piece_type == chess.KING and not board.is_castling(m) and board.fullmove_number < 25:
            w *= 0.2
        if board.is_attacked_by(not board.turn, m.to_square) and piece.piece_type != chess.PAWN:
            w *= 0.3
        weights.append(w)
    for m in moves:
        board.push(m)
        mate = board.is_checkmate()
        board.pop()
        if mate and rng.random() < 0.9:
            return m
    return rng.choices(moves, weights)[0]


def clock(seconds):
    return f"{seconds // 3600}:{seconds // 60 % 60:02d}:{seconds % 60:02d}"


def make_game(rng, index):
    board = chess.Board()
    target = int(rng.gauss(86, 30))
    target = max(12, min(target, 220))
    sans = []
    sideline = None
    while not board.is_game_over() and len(sans) < target:
        move = choose(board, rng)
        if len(sans) == 4:
            alternatives = [m for m in board.legal_moves if m != move]
            if alternatives:
                sideline = board.san(rng.choice(alternatives))
        sans.append(board.san(move))
        board.push(move)
    if board.is_checkmate():
        result = "0-1" if board.turn == chess.WHITE else "1-0"
        termination = "Normal"
    elif board.is_game_over():
        result, termination = "1/2-1/2", "Normal"
    else:
        result = rng.choices(["1-0", "0-1", "1/2-1/2"], [47, 42, 11])[0]
        termination = rng.choice(["Normal", "Time forfeit"])
    tc = rng.choice(TIME_CONTROLS)
    base, inc = (int(x) for x in tc.split("+"))
    speed = "Bullet" if base < 180 else "Blitz" if base < 480 else "Rapid"
    white_elo = rng.randint(2150, 2950)
    black_elo = max(1500, white_elo + rng.randint(-250, 250))
    site = "".join(rng.choice(string.ascii_letters + string.digits) for _ in range(8))
    tags = [
        ("Event", f"Rated {speed} game"),
        ("Site", f"https://lichess.org/{site}"),
        ("Date", "2024.10.??"),
        ("White", f"player{rng.randint(1, 5000)}"),
        ("Black", f"player{rng.randint(1, 5000)}"),
        ("Result", result),
        ("UTCDate", f"2024.10.{rng.randint(1, 31):02d}"),
        ("WhiteElo", str(white_elo)),
        ("BlackElo", str(black_elo)),
        ("TimeControl", tc),
        ("Termination", termination),
    ]
    style = index % 5
    parts = []
    clocks = [base, base]
    for i, san in enumerate(sans):
        if i % 2 == 0:
            parts.append(f"{i // 2 + 1}.")
        elif style == 1:
            parts.append(f"{i // 2 + 1}...")
        parts.append(san)
        if style == 1:
            clocks[i % 2] = max(0, clocks[i % 2] - rng.randint(0, 12) + inc)
            parts.append(f"{{ [%clk {clock(clocks[i % 2])}] }}")
        elif style == 2 and rng.random() < 0.05:
            parts.append(f"${rng.choice([1, 2, 4, 6])}")
        elif style == 3 and i == 4 and sideline:
            parts.append(f"( 3. {sideline} {{ sideline }} )")
        elif style == 4 and i == 3:
            parts.append("{ multi-line\ncomment }")
    parts.append(result)
    movetext = " ".join(parts)
    if style == 3:
        # wrap at 80 columns like older exports
        lines, line = [], ""
        for word in movetext.split(" "):
            if line and len(line) + 1 + len(word) > 80:
                lines.append(line)
                line = word
            else:
                line = f"{line} {word}" if line else word
        lines.append(line)
        movetext = "\n".join(lines)
    head = "\n".join(f'[{k} "{v}"]' for k, v in tags)
    return f"{head}\n\n{movetext}\n\n"


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--games", type=int, default=1200)
    p.add_argument("--seed", type=int, default=2024)
    args = p.parse_args()
    rng = random.Random(args.seed)
    for i in range(args.games):
        sys.stdout.write(make_game(rng, i))


if __name__ == "__main__":
    main()
