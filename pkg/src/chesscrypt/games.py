"""Short reference games used by the demonstrations and tests."""

from __future__ import annotations

from .pgn import GameRecord, parse_pgn_string

# Example game of the original Chessography proposal; glyphs as published.
REMARK_GAME_PGN = """\
[Event "Chessography example"]
[Result "1-0"]

1. b4 e6 2. c3 f5 3. g3 g6 4. Nf3 Bd6?! 5. h4 Nf6 6. Nd4?! a6 7. e3 Bf8 8. Qf3? Nd5?
9. Nc2 Nc6 10. e4 Ne5 11. Qe2 fxe4 12. d4?? c5?? 13. dxe5 cxb4 14. cxb4?! Rb8?
15. Bg5?! Qc7 16. h5?? Ra8?? 17. hxg6 Be7?! 18. g7 Bxb4+?? 19. Nxb4 h6 20. Bxh6?! d6?!
21. Qh5+ Ke7 22. Qg5+ Kf7 23. gxh8=Q Nxb4 24. Qh7+ Ke8 25. Qh5+ Kd8 26. Bg5+ Qe7
27. Bxe7+ Kd7 28. Bxd6+ Kc6 29. Bxb4 Bd7 30. Qxe4+ Kb6 31. Qhh7 Bc6 32. Qd4# 1-0
"""

FOOLS_MATE_PGN = '[Event "Fool\'s mate"]\n[Result "0-1"]\n\n1. f3 e5 2. g4 Qh4# 0-1\n'

SCHOLARS_MATE_PGN = '[Event "Scholar\'s mate"]\n[Result "1-0"]\n\n1. e4 e5 2. Qh5 Nc6 3. Bc4 Nf6 4. Qxf7# 1-0\n'

LEGALS_MATE_PGN = ('[Event "Legal\'s mate"]\n[Result "1-0"]\n\n'
                   '1. e4 e5 2. Nf3 d6 3. Bc4 Bg4 4. Nc3 g6 5. Nxe5 Bxd1 6. Bxf7+ Ke7 7. Nd5# 1-0\n')

EMPTY_GAME = GameRecord((), (), "*")


def _one(text: str) -> GameRecord:
    (record,) = parse_pgn_string(text)
    return record


REMARK_GAME = _one(REMARK_GAME_PGN)
FOOLS_MATE = _one(FOOLS_MATE_PGN)
SCHOLARS_MATE = _one(SCHOLARS_MATE_PGN)
LEGALS_MATE = _one(LEGALS_MATE_PGN)

WEAK_GAMES = {"fools-mate": FOOLS_MATE, "scholars-mate": SCHOLARS_MATE, "legals-mate": LEGALS_MATE}
