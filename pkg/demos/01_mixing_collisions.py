"""
Why XOR-then-mod-71 cannot be decrypted
=======================================

The published mixing step reduces ``code XOR key`` modulo 71.  Because the
XOR can exceed 70, two different plaintext codes may land on the same value.
"""

from chesscrypt.cipher import Variant, key_mix, key_preimages
from chesscrypt.cryptanalysis import ambiguity_rate, find_collisions

# The worked example: codes 9 and 64 under the key value 62.
print(key_mix(9, 62, Variant.FAITHFUL), key_mix(64, 62, Variant.FAITHFUL))
print("preimages of 55 under 62:", key_preimages(55, 62, Variant.FAITHFUL))

# Every collision for key 62
for w in find_collisions([62]):
    print(f"  {w.x1:2d} and {w.x2:2d} -> {w.mixed}")

# Over all 256 key values almost every key has some collision.
stats = ambiguity_rate()
print(f"{len(find_collisions())} colliding pairs in total")
print(f"ambiguous (code, key) pairs: {stats.ambiguous_pairs} ~ {float(stats.ambiguous_pairs):.1%}")
print(f"keys with at least one collision: {stats.colliding_keys}")

# The additive variant is a bijection for every key.
assert all(sorted(key_mix(x, k, Variant.REPAIRED) for x in range(1, 72)) == list(range(1, 72))
           for k in range(256))
