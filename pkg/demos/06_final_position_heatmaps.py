"""
Where pieces end up
===================

Replay a PGN corpus to the final positions and count each piece per square.
The bundled test corpus stands in for a Lichess export here.
"""

from pathlib import Path

from chesscrypt.board import BLACK, SQUARE_NAMES, WHITE, Kind
from chesscrypt.corpus import analyze_paths, render_text, summarize
from chesscrypt.pgn import GameFilter

corpus = Path(__file__).resolve().parent.parent / "tests" / "data" / "fixture_corpus.pgn"
acc, stats = analyze_paths([corpus], GameFilter(min_avg_rating=2500, exclude_bullet=True))
print(f"{stats.read} games read, {acc.games} kept")

summary = summarize(acc)
print(f"mean length {summary.mean_plies:.1f} plies, white wins {summary.white_win:.0%}")
print(render_text(acc, WHITE, Kind.KING))
print(render_text(acc, BLACK, Kind.PAWN))

for p in summary.pieces:
    print(f"{p.label:13s} most often on {SQUARE_NAMES[p.max_square]} ({p.max_share:.2f}%), "
          f"entropy {p.entropy_bits:.2f} bits")
