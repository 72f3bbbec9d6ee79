"""
Encrypting a block with a chess game
====================================

A 32-character block sits on the 32 starting squares, one code per piece,
and the pieces carry their codes through the moves of a game.
"""

import random

from chesscrypt.cipher import decrypt_block, encrypt_block, game_permutation, serialize
from chesscrypt.games import REMARK_GAME

rng = random.Random(1)
key = [rng.randrange(256) for _ in range(32)]
text = "Meet me at the old mill at nine."

ct = encrypt_block(text, key, REMARK_GAME)
print(serialize(ct))

# Captured pieces leave the board; their codes go to the capture log.
perm = game_permutation(REMARK_GAME)
print(sum(c is not None for c in perm.captured_at), "codes were captured")

# With the same key and game the plaintext comes back exactly.
print(repr(decrypt_block(ct, key, REMARK_GAME)))
