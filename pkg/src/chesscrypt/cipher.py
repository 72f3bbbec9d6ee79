"""Reconstruction of the Chessography block cipher.

A 32-character block is encoded with a 71-symbol alphabet, each code is
mixed with the Key 1 entry of its starting square, the mixed codes are placed
on the 32 starting squares (a1..h1, a2..h2, a7..h7, a8..h8) and a chess game
moves them around.  The ciphertext is the final placement plus a log of the
captured codes.

Three mixing variants are provided:

``faithful``
    ``(code XOR key) mod 71`` with 8-bit keys, as published.  Not injective.
``repaired``
    ``((code - 1 + key) mod 71) + 1``, the smallest reversible fix.
``otp64``
    64-symbol alphabet coded 0..63 with 6-bit keys and plain XOR.
"""

from __future__ import annotations

import enum
import functools
import hashlib
import re
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from .board import SQUARE_NAMES, Board, parse_square, replay_moves
from .pgn import GameRecord

BLOCK_SIZE = 32

DEFAULT_CHARS = ("ABCDEFGHIJKLMNOPQRSTUVWXYZ"
                 "abcdefghijklmnopqrstuvwxyz"
                 "0123456789"
                 " .,;:?!'-")

# Starting squares in plaintext order: a1..h1, a2..h2, a7..h7, a8..h8.
START_SQUARES: Tuple[int, ...] = tuple(range(0, 16)) + tuple(range(48, 64))
POSITION_OF_SQUARE = {sq: i for i, sq in enumerate(START_SQUARES)}


class CipherError(ValueError):
    pass


class CharNotInAlphabet(CipherError):
    pass


class DomainError(CipherError):
    pass


class NoPreimage(CipherError):
    pass


class GameMismatch(CipherError):
    pass


class ParseError(CipherError):
    def __init__(self, message: str, line: int) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class AmbiguousDecryption(CipherError):
    """Raised when mixing cannot be undone uniquely.

    ``candidates`` maps 1-based block positions to the tuple of possible
    plaintext codes; ``partial`` is the decryption with ``?`` placeholders
    wherever more than one code fits (only set by :func:`decrypt_block`).
    """

    def __init__(self, candidates: Dict[int, Tuple[int, ...]], partial: Optional[str] = None,
                 alphabet: Optional["Alphabet"] = None) -> None:
        self.candidates = candidates
        self.partial = partial
        self.alphabet = alphabet
        desc = "; ".join(f"{pos}: {', '.join(map(str, codes))}" for pos, codes in sorted(candidates.items()))
        super().__init__(f"ambiguous codes at position(s) {desc}")

    def candidate_chars(self) -> Dict[int, Tuple[str, ...]]:
        alphabet = self.alphabet or DEFAULT_ALPHABET
        return {pos: tuple(alphabet.decode(c) for c in codes) for pos, codes in self.candidates.items()}


class Variant(enum.Enum):
    FAITHFUL = "faithful"
    REPAIRED = "repaired"
    OTP64 = "otp64"

    @property
    def code_range(self) -> range:
        return range(0, 64) if self is Variant.OTP64 else range(1, 72)

    @property
    def key_range(self) -> range:
        return range(0, 64) if self is Variant.OTP64 else range(0, 256)

    @property
    def output_range(self) -> range:
        if self is Variant.OTP64:
            return range(0, 64)
        if self is Variant.FAITHFUL:
            return range(0, 71)
        return range(1, 72)


class Alphabet:
    """Ordered character set; codes start at ``first_code``."""

    def __init__(self, chars: str = DEFAULT_CHARS, first_code: int = 1) -> None:
        if len(set(chars)) != len(chars):
            raise ValueError("alphabet characters must be distinct")
        self.chars = chars
        self.first_code = first_code
        self._codes = {c: i + first_code for i, c in enumerate(chars)}

    def __len__(self) -> int:
        return len(self.chars)

    def __contains__(self, c: str) -> bool:
        return c in self._codes

    def encode(self, c: str) -> int:
        try:
            return self._codes[c]
        except KeyError:
            raise CharNotInAlphabet(f"{c!r} is not in the alphabet") from None

    def decode(self, code: int) -> str:
        i = code - self.first_code
        if not 0 <= i < len(self.chars):
            raise DomainError(f"code {code} outside alphabet")
        return self.chars[i]

    def __repr__(self) -> str:
        return f"Alphabet({self.chars!r}, first_code={self.first_code})"


DEFAULT_ALPHABET = Alphabet()
OTP64_ALPHABET = Alphabet(DEFAULT_CHARS[:64], first_code=0)


def alphabet_for(variant: Variant) -> Alphabet:
    return OTP64_ALPHABET if variant is Variant.OTP64 else DEFAULT_ALPHABET


def encode_char(alphabet: Alphabet, c: str) -> int:
    return alphabet.encode(c)


def decode_char(alphabet: Alphabet, code: int) -> str:
    return alphabet.decode(code)


# --- key mixing --------------------------------------------------------------

def _check_domain(code: int, key: int, variant: Variant, code_range: range) -> None:
    if code not in code_range:
        raise DomainError(f"{variant.value}: value {code} outside {code_range.start}..{code_range.stop - 1}")
    if key not in variant.key_range:
        raise DomainError(f"{variant.value}: key {key} outside 0..{variant.key_range.stop - 1}")


def key_mix(code: int, key: int, variant: Variant) -> int:
    _check_domain(code, key, variant, variant.code_range)
    if variant is Variant.FAITHFUL:
        return (code ^ key) % 71
    if variant is Variant.REPAIRED:
        return (code - 1 + key) % 71 + 1
    return code ^ key


def key_preimages(mixed: int, key: int, variant: Variant) -> Tuple[int, ...]:
    """All plaintext codes that mix to ``mixed`` under ``key``."""
    _check_domain(mixed, key, variant, variant.output_range)
    if variant is Variant.REPAIRED:
        return ((mixed - 1 - key) % 71 + 1,)
    if variant is Variant.OTP64:
        return (mixed ^ key,)
    # x < 128 and key < 256 keep x ^ key below 256, so only mixed + 71j with j <= 3 can occur.
    return tuple(sorted(x for x in ((mixed + 71 * j) ^ key for j in range(4)) if 1 <= x <= 71))


def key_unmix(mixed: int, key: int, variant: Variant) -> int:
    candidates = key_preimages(mixed, key, variant)
    if not candidates:
        raise NoPreimage(f"no code mixes to {mixed} under key {key}")
    if len(candidates) > 1:
        raise AmbiguousDecryption({1: candidates}, alphabet=alphabet_for(variant))
    return candidates[0]


# --- keys --------------------------------------------------------------------

def make_key(values: Sequence[int], variant: Variant = Variant.FAITHFUL) -> Tuple[int, ...]:
    key = tuple(int(v) for v in values)
    if len(key) != BLOCK_SIZE:
        raise DomainError(f"Key 1 needs {BLOCK_SIZE} entries, got {len(key)}")
    bad = [v for v in key if v not in variant.key_range]
    if bad:
        raise DomainError(f"key entries out of range for {variant.value}: {bad[:5]}")
    return key


class KeyMode(enum.Enum):
    PER_BLOCK_FRESH_KEY = "per-block"
    SAME_KEY_ALL_BLOCKS = "same-key"


@dataclass(frozen=True)
class KeySchedule:
    mode: KeyMode
    keys: Tuple[Tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.mode is KeyMode.SAME_KEY_ALL_BLOCKS and len(self.keys) != 1:
            raise DomainError("same-key schedule takes exactly one Key 1")
        if not self.keys:
            raise DomainError("empty key schedule")

    def key_for(self, block: int) -> Tuple[int, ...]:
        if self.mode is KeyMode.SAME_KEY_ALL_BLOCKS:
            return self.keys[0]
        try:
            return self.keys[block]
        except IndexError:
            raise DomainError(f"no fresh key supplied for block {block}") from None


# --- game permutation --------------------------------------------------------

class Permutation(NamedTuple):
    """Where each of the 32 block positions ends up after a game.

    ``final_square[i]`` is the final square of position ``i`` (0-based) or
    None if it was captured; ``captured_at[i]`` is the 1-based ply of capture.
    """

    final_square: Tuple[Optional[int], ...]
    captured_at: Tuple[Optional[int], ...]


@functools.lru_cache(maxsize=4096)
def _permutation(moves: Tuple[str, ...]) -> Permutation:
    start = Board.initial({sq: i for i, sq in enumerate(START_SQUARES)})
    replay = replay_moves(moves, start)
    final: List[Optional[int]] = [None] * BLOCK_SIZE
    captured: List[Optional[int]] = [None] * BLOCK_SIZE
    for sq, _piece, tag in replay.final.occupied():
        final[tag] = sq
    for entry in replay.captures:
        captured[entry.captured.tag] = entry.ply
    return Permutation(tuple(final), tuple(captured))


def game_permutation(game: GameRecord) -> Permutation:
    """Replay ``game`` with each starting piece tagged by its block position."""
    return _permutation(tuple(game.moves))


def game_id(game: GameRecord) -> str:
    """Stable identifier of a game's move sequence."""
    digest = hashlib.sha256(" ".join(m.rstrip("!?+#") for m in game.moves).encode()).hexdigest()
    return digest[:16]


# --- ciphertext --------------------------------------------------------------

@dataclass(frozen=True)
class Ciphertext:
    variant: Variant
    survivors: Tuple[Tuple[int, int], ...]
    capture_log: Tuple[Tuple[int, int, int], ...]
    game_id: str

    def __post_init__(self) -> None:
        if len(self.survivors) + len(self.capture_log) != BLOCK_SIZE:
            raise DomainError("ciphertext must account for exactly 32 codes")
        origins = [origin for _, origin, _ in self.capture_log]
        if len(set(origins)) != len(origins) or not set(origins) <= set(START_SQUARES):
            raise DomainError("capture origins must be distinct starting squares")
        squares = [sq for sq, _ in self.survivors]
        if len(set(squares)) != len(squares):
            raise DomainError("duplicate survivor square")
        if not re.fullmatch(r"\S+", self.game_id):
            raise DomainError("game id must be a non-empty token without whitespace")


def pad_block(plaintext: str) -> str:
    if len(plaintext) > BLOCK_SIZE:
        raise DomainError(f"block longer than {BLOCK_SIZE} characters")
    return plaintext.ljust(BLOCK_SIZE)


def mix_block(plaintext: str, key: Sequence[int], variant: Variant) -> List[int]:
    alphabet = alphabet_for(variant)
    key = make_key(key, variant)
    codes = [alphabet.encode(c) for c in pad_block(plaintext)]
    return [key_mix(code, k, variant) for code, k in zip(codes, key)]


def permute(mixed: Sequence[int], game: GameRecord) -> Tuple[List[Tuple[int, int]], List[Tuple[int, int, int]]]:
    """Move ``mixed`` codes (block order) through ``game``.

    Returns ``(survivors, capture_log)``; survivors are sorted by square index.
    """
    perm = game_permutation(game)
    survivors = sorted((sq, mixed[i]) for i, sq in enumerate(perm.final_square) if sq is not None)
    captures = sorted((ply, START_SQUARES[i], mixed[i])
                      for i, ply in enumerate(perm.captured_at) if ply is not None)
    return survivors, captures


def encrypt_block(plaintext: str, key: Sequence[int], game: GameRecord,
                  variant: Variant = Variant.REPAIRED) -> Ciphertext:
    mixed = mix_block(plaintext, key, variant)
    survivors, captures = permute(mixed, game)
    return Ciphertext(variant, tuple(survivors), tuple(captures), game_id(game))


def recover_mixed(ct: Ciphertext, game: GameRecord) -> List[int]:
    """Invert the game permutation: return the mixed codes in block order."""
    if ct.game_id != game_id(game):
        raise GameMismatch(f"ciphertext was made with game {ct.game_id}, not {game_id(game)}")
    perm = game_permutation(game)
    at_square = dict(ct.survivors)
    by_origin = {origin: (ply, code) for ply, origin, code in ct.capture_log}
    mixed: List[int] = []
    for i in range(BLOCK_SIZE):
        sq = perm.final_square[i]
        if sq is not None:
            if sq not in at_square:
                raise GameMismatch(f"no code on {SQUARE_NAMES[sq]}")
            mixed.append(at_square[sq])
        else:
            origin = START_SQUARES[i]
            entry = by_origin.get(origin)
            if entry is None or entry[0] != perm.captured_at[i]:
                raise GameMismatch(f"capture of the piece from {SQUARE_NAMES[origin]} not logged")
            mixed.append(entry[1])
    return mixed


def decrypt_block(ct: Ciphertext, key: Sequence[int], game: GameRecord,
                  variant: Optional[Variant] = None) -> str:
    """Return the 32-character plaintext (padding included).

    Raises :class:`AmbiguousDecryption` when mixing lost information; the
    exception carries the candidate codes for every ambiguous position.
    """
    variant = variant or ct.variant
    if variant is not ct.variant:
        raise GameMismatch(f"ciphertext variant is {ct.variant.value}, not {variant.value}")
    alphabet = alphabet_for(variant)
    key = make_key(key, variant)
    mixed = recover_mixed(ct, game)
    chars: List[str] = []
    ambiguous: Dict[int, Tuple[int, ...]] = {}
    for pos, (value, k) in enumerate(zip(mixed, key), 1):
        candidates = key_preimages(value, k, variant)
        if not candidates:
            raise NoPreimage(f"position {pos}: no code mixes to {value} under key {k}")
        if len(candidates) == 1:
            chars.append(alphabet.decode(candidates[0]))
        else:
            ambiguous[pos] = candidates
            chars.append("?")
    if ambiguous:
        raise AmbiguousDecryption(ambiguous, "".join(chars), alphabet)
    return "".join(chars)


def encrypt_message(text: str, schedule: KeySchedule, games: Sequence[GameRecord],
                    variant: Variant = Variant.REPAIRED) -> List[Ciphertext]:
    """Split ``text`` into padded 32-character blocks and encrypt each.

    Under a same-key schedule a single game may be reused for every block;
    otherwise one game per block is required.
    """
    blocks = [text[i:i + BLOCK_SIZE] for i in range(0, max(len(text), 1), BLOCK_SIZE)]
    out = []
    for b, block in enumerate(blocks):
        if len(games) == 1:
            game = games[0]
        elif b < len(games):
            game = games[b]
        else:
            raise DomainError(f"no game supplied for block {b}")
        out.append(encrypt_block(block, schedule.key_for(b), game, variant))
    return out


def decrypt_message(cts: Sequence[Ciphertext], schedule: KeySchedule,
                    games: Sequence[GameRecord]) -> str:
    parts = []
    for b, ct in enumerate(cts):
        game = games[0] if len(games) == 1 else games[b]
        parts.append(decrypt_block(ct, schedule.key_for(b), game))
    return "".join(parts)


# --- serialization -----------------------------------------------------------

MAGIC = "CHG1"


def serialize(ct: Ciphertext) -> str:
    lines = [f"{MAGIC} {ct.variant.value} {ct.game_id}", f"S {len(ct.survivors)}"]
    lines += [f"{SQUARE_NAMES[sq]} {code}" for sq, code in ct.survivors]
    lines.append(f"C {len(ct.capture_log)}")
    lines += [f"{ply} {SQUARE_NAMES[origin]} {code}" for ply, origin, code in ct.capture_log]
    return "\n".join(lines) + "\n"


def _int(text: str, line: int) -> int:
    if not re.fullmatch(r"-?[0-9]+", text):
        raise ParseError(f"expected an integer, got {text!r}", line)
    return int(text)


def _square(text: str, line: int) -> int:
    try:
        return parse_square(text)
    except ValueError:
        raise ParseError(f"expected a square name, got {text!r}", line) from None


def deserialize(text: str) -> Ciphertext:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    pos = 0

    def take() -> Tuple[List[str], int]:
        nonlocal pos
        if pos >= len(lines):
            raise ParseError("unexpected end of ciphertext", pos + 1)
        pos += 1
        return lines[pos - 1].split(" "), pos

    fields, n = take()
    if len(fields) != 3 or fields[0] != MAGIC:
        raise ParseError(f"expected '{MAGIC} <variant> <game-id>' header", n)
    try:
        variant = Variant(fields[1])
    except ValueError:
        raise ParseError(f"unknown variant {fields[1]!r}", n) from None
    ident = fields[2]

    fields, n = take()
    if len(fields) != 2 or fields[0] != "S":
        raise ParseError("expected 'S <count>' section header", n)
    survivors = []
    for _ in range(_int(fields[1], n)):
        fields, n = take()
        if len(fields) != 2:
            raise ParseError("expected '<square> <code>'", n)
        survivors.append((_square(fields[0], n), _int(fields[1], n)))

    fields, n = take()
    if len(fields) != 2 or fields[0] != "C":
        raise ParseError("expected 'C <count>' section header", n)
    captures = []
    for _ in range(_int(fields[1], n)):
        fields, n = take()
        if len(fields) != 3:
            raise ParseError("expected '<ply> <origin-square> <code>'", n)
        captures.append((_int(fields[0], n), _square(fields[1], n), _int(fields[2], n)))
    if pos != len(lines):
        raise ParseError("trailing data after capture log", pos + 1)
    if [sq for sq, _ in survivors] != sorted(sq for sq, _ in survivors):
        raise ParseError("survivors must be in ascending square order", 3)
    if [c[0] for c in captures] != sorted(c[0] for c in captures):
        raise ParseError("capture log must be in ascending ply order", n)
    try:
        return Ciphertext(variant, tuple(survivors), tuple(captures), ident)
    except DomainError as exc:
        raise ParseError(str(exc), n) from None
