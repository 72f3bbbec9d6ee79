"""
Short games permute almost nothing
==================================

If most pieces end the game where they started, the permutation step leaves
most of the mixed codes in place.
"""

from chesscrypt.cryptanalysis import weak_game_score
from chesscrypt.games import EMPTY_GAME, REMARK_GAME, WEAK_GAMES

games = {"empty": EMPTY_GAME, **WEAK_GAMES, "remark": REMARK_GAME}
for name, record in games.items():
    score = weak_game_score(record)
    print(f"{name:14s} {score.plies:3d} plies  {score.fraction_on_origin * 32}/32 on their own square")
