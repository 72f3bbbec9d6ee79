"""
Key recovery from one known block
=================================

The game permutation is public once the game is known, so a single
(plaintext, ciphertext) pair lines every code up with its mixed value.
"""

import random

from chesscrypt.cipher import OTP64_ALPHABET, Variant, encrypt_block
from chesscrypt.cryptanalysis import known_plaintext_attack
from chesscrypt.games import REMARK_GAME

rng = random.Random(5)
for variant in (Variant.OTP64, Variant.REPAIRED):
    key = [rng.randrange(len(variant.key_range)) for _ in range(32)]
    chars = OTP64_ALPHABET.chars if variant is Variant.OTP64 else "abcdefghij KLMNOP"
    text = "".join(rng.choice(chars) for _ in range(32))
    ct = encrypt_block(text, key, REMARK_GAME, variant)
    report = known_plaintext_attack(text, ct, REMARK_GAME)
    print(variant.value, "coverage", report.coverage, "mean candidates", round(report.mean_candidates(), 2))

    # Only the pieces still on the board: captured positions stay open.
    partial = known_plaintext_attack(text, ct, REMARK_GAME, use_capture_log=False)
    print("   survivors only:", len(partial.recovered), "of 32 positions observed")

# For the additive variant the key is fixed only modulo 71, so each entry has
# three or four candidates in 0..255.
print(sorted(report.recovered[1]))
