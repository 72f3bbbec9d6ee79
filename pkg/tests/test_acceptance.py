"""Acceptance criteria, one test per criterion.

Every test records a ``[PASS]``/``[FAIL]``/``[SKIP]`` line that is repeated in
the terminal summary under "acceptance criteria".
"""

import itertools
import os
import random
import time
from fractions import Fraction

import pytest

from chesscrypt.board import BLACK, WHITE, Kind, is_checkmate, parse_square, replay_game
from chesscrypt.cipher import (DEFAULT_ALPHABET, DEFAULT_CHARS, OTP64_ALPHABET, AmbiguousDecryption, Variant,
                               decrypt_block, encrypt_block, key_mix, key_unmix)
from chesscrypt.cli import DEFAULT_SEED, main
from chesscrypt.corpus import KINDS, COLORS, accumulate_games, analyze_paths, render_csv, shares, summarize, summary_csv
from chesscrypt.cryptanalysis import (ambiguity_rate, find_collisions, known_plaintext_attack,
                                      uniformity_evidence, weak_game_score)
from chesscrypt.games import EMPTY_GAME, FOOLS_MATE, REMARK_GAME
from chesscrypt.pgn import GameFilter

# Frozen after the first verified replay (cross-checked move by move with python-chess).
REMARK_CAPTURES = 14
REMARK_WEAK_SCORE = Fraction(9, 32)
REMARK_FINAL_FEN = "r7/1p5Q/pkb1p3/4P3/1B1Q4/6P1/P4P2/RN2KB1R b KQ - 4 32"

LICHESS_ENV = "CHG_LICHESS_PGN"
LICHESS_MIN_GAMES = 10_000
GAMES_PER_SECOND_TARGET = 5_000


def test_collision_reproduction(criterion, capsys):
    t0 = time.perf_counter()
    code = main(["collisions", "--key", "62"])
    elapsed = time.perf_counter() - t0
    out = capsys.readouterr().out
    ok = code == 0 and "key=62 x1=9 x2=64 mixed=55" in out and elapsed < 1.0
    assert criterion("collision reproduction", ok,
                     f"'collisions --key 62' -> x1=9 x2=64 mixed=55 present={'x1=9 x2=64 mixed=55' in out}, "
                     f"{elapsed:.3f}s (< 1 s)")


def test_exhaustive_non_injectivity(criterion):
    t0 = time.perf_counter()
    witnesses = [tuple(w) for w in find_collisions(range(256))]
    rate = ambiguity_rate()
    elapsed = time.perf_counter() - t0
    # oracle: pairwise comparison of all 18,176 evaluations, no bucketing
    oracle = [(k, a, b, (a ^ k) % 71) for k in range(256)
              for a, b in itertools.combinations(range(1, 72), 2) if (a ^ k) % 71 == (b ^ k) % 71]
    ok = witnesses == oracle and rate.ambiguous_pairs > 0 and elapsed < 1.0
    assert criterion("exhaustive non-injectivity", ok,
                     f"{len(witnesses)} witnesses == oracle {len(oracle)}: {witnesses == oracle}; "
                     f"ambiguous-pair fraction {rate.ambiguous_pairs} = {float(rate.ambiguous_pairs):.4f}; "
                     f"{elapsed:.3f}s (< 1 s)")


def test_repaired_round_trip(criterion, corpus_records):
    t0 = time.perf_counter()
    inverse_failures = sum(key_unmix(key_mix(x, k, Variant.REPAIRED), k, Variant.REPAIRED) != x
                           for x in range(1, 72) for k in range(256))
    rng = random.Random(DEFAULT_SEED)
    games = corpus_records[:200]
    block_failures = 0
    for _ in range(10_000):
        text = "".join(rng.choice(DEFAULT_CHARS) for _ in range(32))
        key = [rng.randrange(256) for _ in range(32)]
        game = rng.choice(games)
        ct = encrypt_block(text, key, game, Variant.REPAIRED)
        block_failures += decrypt_block(ct, key, game) != text
    elapsed = time.perf_counter() - t0
    ok = inverse_failures == 0 and block_failures == 0 and elapsed < 10.0
    assert criterion("repaired round trip", ok,
                     f"71x256 inverse failures {inverse_failures}; 10,000 block round-trip failures "
                     f"{block_failures}; {elapsed:.2f}s (< 10 s)")


def test_faithful_decryption_failure(criterion):
    key = [62] * 32
    plain = [DEFAULT_ALPHABET.encode("a")] * 32      # code 27 is unambiguous under key 62
    positions = {5, 20}
    plain[4], plain[19] = 9, 64
    text = "".join(DEFAULT_ALPHABET.decode(c) for c in plain)
    ct = encrypt_block(text, key, REMARK_GAME, Variant.FAITHFUL)
    try:
        decrypt_block(ct, key, REMARK_GAME)
        reported = {}
    except AmbiguousDecryption as exc:
        reported = exc.candidates
    ok = set(reported) == positions and all(reported[p] == (9, 64) for p in positions)
    assert criterion("faithful decryption failure", ok,
                     f"codes 9 and 64 at positions {sorted(positions)} under key 62 -> ambiguity report at "
                     f"{sorted(reported)} with candidates {sorted(set(reported.values()))}")


def _kpa_trials(variant, trials=200):
    rng = random.Random(DEFAULT_SEED)
    chars = OTP64_ALPHABET.chars if variant is Variant.OTP64 else DEFAULT_CHARS
    for _ in range(trials):
        text = "".join(rng.choice(chars) for _ in range(32))
        key = [rng.randrange(len(variant.key_range)) for _ in range(32)]
        ct = encrypt_block(text, key, REMARK_GAME, variant)
        yield key, known_plaintext_attack(text, ct, REMARK_GAME)


def test_kpa_otp64_exact(criterion):
    exact = sum(r.exact() == {p: key[p - 1] for p in range(1, 33)} for key, r in _kpa_trials(Variant.OTP64))
    assert criterion("KPA otp64 exact recovery", exact == 200,
                     f"{exact}/200 seeded single known blocks recover all 32 key entries exactly")


def test_kpa_repaired_contains_true_key(criterion):
    contains = all(key[p - 1] in c for key, r in _kpa_trials(Variant.REPAIRED) for p, c in r.recovered.items())
    assert criterion("KPA repaired true key in candidate set", contains,
                     "true key entry is a member of every position's candidate set over 200 blocks")


@pytest.mark.xfail(strict=True, reason="keys 0..255 have up to four lifts mod 71 (k, k+71, k+142, k+213 "
                                       "for k mod 71 < 43); the size <= 3 bound cannot hold")
def test_kpa_repaired_at_most_three(criterion):
    sizes = [len(c) for _, r in _kpa_trials(Variant.REPAIRED) for c in r.recovered.values()]
    largest = max(sizes)
    four = sum(s == 4 for s in sizes)
    assert criterion("KPA repaired candidate sets <= 3", largest <= 3,
                     f"max candidate-set size {largest}; {four}/{len(sizes)} sets have 4 members "
                     f"(ceil(256/71) = 4, so the stated bound is unattainable)")


def test_otp_uniformity(criterion):
    t0 = time.perf_counter()
    otp = uniformity_evidence(Variant.OTP64, trials=100_000, seed=DEFAULT_SEED)
    faithful = uniformity_evidence(Variant.FAITHFUL, trials=100_000, seed=DEFAULT_SEED)
    elapsed = time.perf_counter() - t0
    ok = otp.dof == 63 and otp.all_below and faithful.all_above and elapsed < 30.0
    assert criterion("OTP uniformity", ok,
                     f"otp64 max chi2 {otp.chi2.max():.2f} < {otp.critical:.2f} (dof 63) at all 32 positions: "
                     f"{otp.all_below}; faithful min chi2 {faithful.chi2.min():.2f} > {faithful.critical:.2f} "
                     f"(dof {faithful.dof}): {faithful.all_above}; seed {DEFAULT_SEED}; {elapsed:.2f}s (< 30 s)")


def test_remark_game(criterion):
    replay = replay_game(REMARK_GAME)
    mate = is_checkmate(replay.final)
    captures = len(replay.captures)
    score = weak_game_score(REMARK_GAME).fraction_on_origin
    ok = (len(replay.trace) == 63 and mate and captures == REMARK_CAPTURES and score == REMARK_WEAK_SCORE
          and replay.final.fen() == REMARK_FINAL_FEN)
    assert criterion("remark game", ok,
                     f"63 plies replay legally; checkmate after 32. Qd4#: {mate}; captures {captures} "
                     f"(frozen {REMARK_CAPTURES}); weak-game score {score} (frozen {REMARK_WEAK_SCORE})")


def test_weak_game_scoring(criterion):
    fools = weak_game_score(FOOLS_MATE).fraction_on_origin
    empty = weak_game_score(EMPTY_GAME).fraction_on_origin
    ok = fools == Fraction(28, 32) and empty == 1
    assert criterion("weak-game scoring", ok, f"Fool's mate {fools} = {float(fools)}; empty game {empty}")


def test_corpus_invariants(criterion, corpus_path, corpus_records):
    acc, failed = accumulate_games(corpus_records)
    n = acc.games
    kings = [int(acc.counts[c, Kind.KING].sum()) for c in (WHITE, BLACK)]
    share_err = max(abs(shares(acc, c, k).sum() - 1) for c in COLORS for k in KINDS)
    pawns = acc.counts[:, Kind.PAWN].reshape(2, 8, 8)
    back_rank_pawns = int(pawns[:, 0].sum() + pawns[:, 7].sum())
    csvs = []
    for workers in (1, 2):
        a, _ = analyze_paths([corpus_path], workers=workers)
        csvs.append((summary_csv(a) + "".join(render_csv(a, c, k) for c in COLORS for k in KINDS)).encode())
    ok = (n >= 1000 and failed == 0 and kings == [n, n] and share_err <= 1e-9 and back_rank_pawns == 0
          and csvs[0] == csvs[1])
    assert criterion("corpus invariants", ok,
                     f"{n} games; king totals {kings}; max |sum(shares)-1| {share_err:.1e}; "
                     f"pawns on ranks 1/8 {back_rank_pawns}; CSV identical for 1 and 2 workers: {csvs[0] == csvs[1]}")


@pytest.fixture(scope="module")
def lichess_subset():
    paths = [p for p in os.environ.get(LICHESS_ENV, "").split(os.pathsep) if p]
    if not paths:
        return None
    t0 = time.perf_counter()
    acc, stats = analyze_paths(paths, GameFilter(min_avg_rating=2500, exclude_bullet=True))
    return acc, stats, time.perf_counter() - t0


def _skip_without_data(criterion, name, subset):
    if subset is None:
        criterion(name, True, f"no data; set {LICHESS_ENV} to a Lichess PGN export", status="SKIP")
        pytest.skip(f"{LICHESS_ENV} not set")
    acc = subset[0]
    if acc.games < LICHESS_MIN_GAMES:
        criterion(name, True, f"only {acc.games} games after filtering (< {LICHESS_MIN_GAMES})", status="SKIP")
        pytest.skip("subset too small")


def test_table1_king_band(criterion, lichess_subset):
    name = "table 1 king band (advisory)"
    _skip_without_data(criterion, name, lichess_subset)
    acc, stats, elapsed = lichess_subset
    summary = summarize(acc)
    wk, bk = summary.piece(WHITE, Kind.KING), summary.piece(BLACK, Kind.KING)
    ok = (wk.max_square == parse_square("g1") and abs(wk.max_share - 22.28) <= 5
          and bk.max_square == parse_square("g8") and abs(bk.max_share - 22.46) <= 5)
    assert criterion(name, ok, f"{acc.games} games; white king max {wk.max_share:.2f}% (22.28 +/- 5), "
                               f"black king max {bk.max_share:.2f}% (22.46 +/- 5); "
                               f"{stats.read / elapsed:.0f} games/s")


def test_mean_game_length(criterion, lichess_subset):
    name = "mean game length (advisory)"
    _skip_without_data(criterion, name, lichess_subset)
    plies = summarize(lichess_subset[0]).mean_plies
    assert criterion(name, abs(plies - 86) <= 10, f"mean {plies:.2f} plies (86 +/- 10)")


def test_replay_throughput(criterion, corpus_records):
    """Advisory speed target, measured on the bundled corpus."""
    t0 = time.perf_counter()
    accumulate_games(corpus_records)
    rate = len(corpus_records) / (time.perf_counter() - t0)
    ok = rate >= GAMES_PER_SECOND_TARGET
    criterion("replay throughput (advisory)", ok,
              f"{rate:.0f} games/s on one core (target {GAMES_PER_SECOND_TARGET})",
              status=None if ok else "FAIL (advisory)")
    if not ok:
        pytest.xfail(f"advisory throughput target missed: {rate:.0f} games/s")
