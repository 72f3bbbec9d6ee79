"""Attacks on the reconstructed cipher.

Everything here is exhaustive or seeded, so results are reproducible and can
be compared against independent brute-force enumerations.
"""

from __future__ import annotations

import csv
import io
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Sequence

import numpy as np
from scipy import stats

from .board import SQUARE_NAMES, replay_game
from .cipher import (BLOCK_SIZE, START_SQUARES, Ciphertext, CipherError, Variant, alphabet_for,
                     game_permutation, key_mix, pad_block, recover_mixed)
from .pgn import GameRecord

FAITHFUL_CODES = range(1, 72)
FULL_KEY_RANGE = range(0, 256)


class PairMismatch(CipherError):
    pass


# --- collisions --------------------------------------------------------------

class CollisionWitness(NamedTuple):
    key: int
    x1: int
    x2: int
    mixed: int


def _faithful_buckets(key: int) -> Dict[int, List[int]]:
    buckets: Dict[int, List[int]] = defaultdict(list)
    for x in FAITHFUL_CODES:
        buckets[(x ^ key) % 71].append(x)
    return buckets


def find_collisions(keys: Iterable[int] = FULL_KEY_RANGE) -> List[CollisionWitness]:
    """All pairs ``x1 < x2`` in 1..71 that the faithful mixing merges, per key."""
    out = []
    for key in sorted(set(keys)):
        if key not in FULL_KEY_RANGE:
            raise ValueError(f"key {key} outside 0..255")
        for mixed, xs in _faithful_buckets(key).items():
            for i, x1 in enumerate(xs):
                for x2 in xs[i + 1:]:
                    out.append(CollisionWitness(key, x1, x2, mixed))
    out.sort(key=lambda w: (w.key, w.x1, w.x2))
    return out


@dataclass(frozen=True)
class AmbiguityStats:
    ambiguous_pairs: Fraction
    colliding_keys: Fraction
    pairs: int
    keys: int


def ambiguity_rate(keys: Iterable[int] = FULL_KEY_RANGE) -> AmbiguityStats:
    """Share of (code, key) pairs whose mixed value has several preimages,
    and share of keys with at least one collision."""
    keys = sorted(set(keys))
    ambiguous = 0
    colliding = 0
    for key in keys:
        sizes = [len(xs) for xs in _faithful_buckets(key).values()]
        n = sum(s for s in sizes if s > 1)
        ambiguous += n
        colliding += n > 0
    total = len(keys) * len(FAITHFUL_CODES)
    return AmbiguityStats(Fraction(ambiguous, total), Fraction(colliding, len(keys)), total, len(keys))


# --- known plaintext ---------------------------------------------------------

@dataclass
class KeyRecoveryReport:
    """Key candidates per 1-based block position.

    Positions the attacker could not observe are absent from ``recovered``.
    """

    recovered: Dict[int, FrozenSet[int]]
    variant: Variant

    @property
    def coverage(self) -> Fraction:
        return Fraction(sum(1 for c in self.recovered.values() if len(c) == 1), BLOCK_SIZE)

    def exact(self) -> Dict[int, int]:
        return {pos: next(iter(c)) for pos, c in self.recovered.items() if len(c) == 1}

    def mean_candidates(self) -> float:
        """Average candidate-set size, counting unobserved positions as the full key range."""
        full = len(self.variant.key_range)
        return sum(len(self.recovered.get(p, ())) or full for p in range(1, BLOCK_SIZE + 1)) / BLOCK_SIZE

    def combine(self, other: "KeyRecoveryReport") -> "KeyRecoveryReport":
        """Intersect with a report from another block under the same key."""
        merged = dict(self.recovered)
        for pos, cands in other.recovered.items():
            merged[pos] = merged[pos] & cands if pos in merged else cands
            if not merged[pos]:
                raise PairMismatch(f"position {pos}: blocks disagree on the key")
        return KeyRecoveryReport(merged, self.variant)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["position", "square", "candidates", "exact"])
        for pos in range(1, BLOCK_SIZE + 1):
            cands = sorted(self.recovered.get(pos, ()))
            w.writerow([pos, SQUARE_NAMES[START_SQUARES[pos - 1]], " ".join(map(str, cands)),
                        cands[0] if len(cands) == 1 else ""])
        return buf.getvalue()


def key_candidates(code: int, mixed: int, variant: Variant) -> FrozenSet[int]:
    return frozenset(k for k in variant.key_range if key_mix(code, k, variant) == mixed)


def known_plaintext_attack(plaintext: str, ct: Ciphertext, game: GameRecord,
                           variant: Optional[Variant] = None,
                           use_capture_log: bool = True) -> KeyRecoveryReport:
    """Recover Key 1 candidates from one known (plaintext, ciphertext) block.

    With ``use_capture_log=False`` only codes still on the final board are
    used, which is the minimum an attacker always has.
    """
    variant = variant or ct.variant
    alphabet = alphabet_for(variant)
    codes = [alphabet.encode(c) for c in pad_block(plaintext)]
    mixed = recover_mixed(ct, game)
    perm = game_permutation(game)
    recovered: Dict[int, FrozenSet[int]] = {}
    for i in range(BLOCK_SIZE):
        if not use_capture_log and perm.final_square[i] is None:
            continue
        if mixed[i] not in variant.output_range:
            raise PairMismatch(f"position {i + 1}: value {mixed[i]} impossible for {variant.value}")
        cands = key_candidates(codes[i], mixed[i], variant)
        if not cands:
            raise PairMismatch(f"position {i + 1}: no key maps {codes[i]} to {mixed[i]}")
        recovered[i + 1] = cands
    return KeyRecoveryReport(recovered, variant)


# --- uniformity --------------------------------------------------------------

@dataclass
class UniformityReport:
    variant: Variant
    trials: int
    seed: int
    chi2: np.ndarray
    dof: int
    critical: float
    confidence: float = 0.999

    @property
    def all_below(self) -> bool:
        return bool(np.all(self.chi2 < self.critical))

    @property
    def all_above(self) -> bool:
        return bool(np.all(self.chi2 > self.critical))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["position", "chi2", "dof", "critical", "below_critical"])
        for pos, value in enumerate(self.chi2, 1):
            w.writerow([pos, f"{value:.4f}", self.dof, f"{self.critical:.4f}", int(value < self.critical)])
        return buf.getvalue()


DEFAULT_UNIFORMITY_TEXT = "Attack at dawn. Hold the bridge"


def chi_square_uniform(counts: np.ndarray) -> np.ndarray:
    """Pearson statistic of each row of ``counts`` against the uniform law."""
    counts = np.asarray(counts, dtype=float)
    expected = counts.sum(axis=-1, keepdims=True) / counts.shape[-1]
    return ((counts - expected) ** 2 / expected).sum(axis=-1)


def uniformity_evidence(variant: Variant, trials: int = 100_000, seed: int = 0,
                        plaintext: str = DEFAULT_UNIFORMITY_TEXT,
                        confidence: float = 0.999) -> UniformityReport:
    """Encrypt one fixed block under ``trials`` fresh uniform keys and test
    each position's mixed-code distribution for uniformity."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    alphabet = alphabet_for(variant)
    codes = np.array([alphabet.encode(c) for c in pad_block(plaintext)], dtype=np.int64)
    rng = np.random.default_rng(seed)
    keys = rng.integers(0, len(variant.key_range), size=(trials, BLOCK_SIZE), dtype=np.int64)
    if variant is Variant.FAITHFUL:
        mixed = (codes ^ keys) % 71
    elif variant is Variant.REPAIRED:
        mixed = (codes - 1 + keys) % 71 + 1
    else:
        mixed = codes ^ keys
    out = variant.output_range
    counts = np.stack([np.bincount(mixed[:, p] - out.start, minlength=len(out)) for p in range(BLOCK_SIZE)])
    dof = len(out) - 1
    return UniformityReport(variant, trials, seed, chi_square_uniform(counts), dof,
                            float(stats.chi2.ppf(confidence, dof)), confidence)


# --- weak games --------------------------------------------------------------

class WeakGameScore(NamedTuple):
    fraction_on_origin: Fraction
    plies: int


def weak_game_score(record: GameRecord) -> WeakGameScore:
    """Share of the 32 starting pieces that end the game on their own starting square."""
    from .board import Board

    start = Board.initial({sq: sq for sq in START_SQUARES})
    final = replay_game(record, start).final
    home = sum(1 for sq, _piece, origin in final.occupied() if origin == sq)
    return WeakGameScore(Fraction(home, BLOCK_SIZE), len(record.moves))


def witnesses_csv(witnesses: Sequence[CollisionWitness]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "x1", "x2", "mixed"])
    w.writerows(witnesses)
    return buf.getvalue()
