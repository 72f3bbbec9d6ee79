"""Streaming PGN reader for the Lichess export dialect.

Games are produced one at a time from a binary stream, so memory stays
bounded by the size of a single game.  Comments, NAGs, variations and move
numbers are consumed and discarded.
"""

from __future__ import annotations

import bz2
import gzip
import io
import logging
import os
import re
from dataclasses import dataclass
from typing import BinaryIO, Callable, Iterable, Iterator, List, NamedTuple, Optional, Tuple, Union

LOGGER = logging.getLogger(__name__)

RESULTS = ("1-0", "0-1", "1/2-1/2", "*")


class PgnSyntaxError(ValueError):
    def __init__(self, message: str, offset: int, line: int) -> None:
        super().__init__(f"line {line}, byte {offset}: {message}")
        self.offset = offset
        self.line = line


class BadPredicate(ValueError):
    pass


@dataclass(frozen=True)
class GameRecord:
    tags: Tuple[Tuple[str, str], ...]
    moves: Tuple[str, ...]
    result: str

    def tag(self, name: str, default: Optional[str] = None) -> Optional[str]:
        for key, value in self.tags:
            if key == name:
                return value
        return default

    @property
    def plies(self) -> int:
        return len(self.moves)


# --- events ------------------------------------------------------------------

class TagPair(NamedTuple):
    name: str
    value: str


class MoveToken(NamedTuple):
    san: str


class Comment(NamedTuple):
    text: str


class Nag(NamedTuple):
    number: int


@dataclass(frozen=True)
class VariationStart:
    pass


@dataclass(frozen=True)
class VariationEnd:
    pass


class Result(NamedTuple):
    token: str


@dataclass(frozen=True)
class GameEnd:
    pass


PgnEvent = Union[TagPair, MoveToken, Comment, Nag, VariationStart, VariationEnd, Result, GameEnd]

TAG_REGEX = re.compile(r'^\[([A-Za-z0-9_+#=:-]+)\s+"((?:[^"\\]|\\.)*)"\s*\]\s*$')

MOVETEXT_REGEX = re.compile(r"""
    (?P<ws>\s+)
    |(?P<comment>\{[^}]*\}?)
    |(?P<line_comment>;.*)
    |(?P<nag>\$[0-9]+)
    |(?P<open>\()
    |(?P<close>\))
    |(?P<result>1-0|0-1|1/2-1/2|\*)
    |(?P<san>(?:O-O(?:-O)?|0-0(?:-0)?|[NBRQK]?[a-h]?[1-8]?x?[a-h][1-8](?:=?[NBRQ])?)[+#]?)(?P<glyph>[!?]{0,2})
    |(?P<number>[0-9]+\.*|\.\.\.)
    |(?P<suffix>[!?]{1,2})
    """, re.VERBOSE)


class _Lexer:
    """Line-at-a-time tokenizer; keeps state for multi-line ``{...}`` comments."""

    def __init__(self) -> None:
        self.in_comment = False
        self.comment_parts: List[str] = []
        self.in_movetext = False

    def feed(self, text: str, offset: int, lineno: int, raw: bytes) -> List[PgnEvent]:
        events: List[PgnEvent] = []
        pos = 0
        if self.in_comment:
            end = text.find("}")
            if end < 0:
                self.comment_parts.append(text)
                return events
            self.comment_parts.append(text[:end])
            events.append(Comment("\n".join(self.comment_parts).strip()))
            self.in_comment = False
            self.comment_parts = []
            pos = end + 1
        elif text.startswith("%"):
            return events
        elif text.startswith("["):
            m = TAG_REGEX.match(text)
            if m is None:
                raise PgnSyntaxError(f"malformed tag pair {text.strip()!r}", offset, lineno)
            value = re.sub(r"\\(.)", r"\1", m.group(2))
            self.in_movetext = False
            return [TagPair(m.group(1), value)]

        while pos < len(text):
            m = MOVETEXT_REGEX.match(text, pos)
            if m is None:
                col = len(text[:pos].encode("utf-8"))
                raise PgnSyntaxError(f"unexpected character {text[pos]!r}", offset + col, lineno)
            pos = m.end()
            kind = m.lastgroup
            if kind == "ws" or kind == "number":
                continue
            self.in_movetext = True
            if kind == "comment":
                body = m.group("comment")
                if body.endswith("}"):
                    events.append(Comment(body[1:-1].strip()))
                else:
                    self.in_comment = True
                    self.comment_parts = [body[1:]]
            elif kind == "line_comment":
                events.append(Comment(m.group("line_comment")[1:].strip()))
            elif kind == "nag":
                events.append(Nag(int(m.group("nag")[1:])))
            elif kind == "open":
                events.append(VariationStart())
            elif kind == "close":
                events.append(VariationEnd())
            elif kind == "result":
                events.append(Result(m.group("result")))
            elif kind in ("san", "glyph"):
                events.append(MoveToken(m.group("san")))
            # bare "!"/"?" glyphs separated by whitespace are dropped
        return events


def _lines(stream: BinaryIO) -> Iterator[Tuple[str, int, int, bytes]]:
    offset = 0
    for lineno, raw in enumerate(stream, 1):
        if lineno == 1 and raw.startswith(b"\xef\xbb\xbf"):
            text = raw[3:].decode("utf-8")
        else:
            text = raw.decode("utf-8")
        yield text.rstrip("\r\n"), offset, lineno, raw
        offset += len(raw)


def iter_events(stream: BinaryIO) -> Iterator[Tuple[PgnEvent, int, int]]:
    """Yield ``(event, byte_offset, line)`` triples; raises :class:`PgnSyntaxError`."""
    lexer = _Lexer()
    last = (0, 0)
    for text, offset, lineno, raw in _lines(stream):
        last = (offset + len(raw), lineno)
        for event in lexer.feed(text, offset, lineno, raw):
            yield event, offset, lineno
            if isinstance(event, Result):
                yield GameEnd(), offset, lineno
    if lexer.in_comment:
        raise PgnSyntaxError("unterminated comment", *last)


class PgnReader:
    """Iterate over the games in a binary PGN stream.

    With ``errors="skip"`` a malformed game is dropped, counted in
    :attr:`skipped`, and parsing resumes at the next tag section.  With
    ``errors="strict"`` the first :class:`PgnSyntaxError` propagates.
    """

    def __init__(self, stream: BinaryIO, errors: str = "strict") -> None:
        if errors not in ("strict", "skip"):
            raise ValueError(f"errors must be 'strict' or 'skip', not {errors!r}")
        self.stream = stream
        self.errors = errors
        self.skipped = 0
        self.parsed = 0
        self.error_log: List[PgnSyntaxError] = []

    def _fail(self, exc: PgnSyntaxError) -> None:
        if self.errors == "strict":
            raise exc
        self.skipped += 1
        self.error_log.append(exc)
        LOGGER.debug("skipping game: %s", exc)

    def __iter__(self) -> Iterator[GameRecord]:
        lexer = _Lexer()
        tags: List[Tuple[str, str]] = []
        moves: List[str] = []
        depth = 0
        started = False
        skipping = False
        last_pos = (0, 0)

        def reset() -> None:
            nonlocal tags, moves, depth, started
            tags, moves, depth, started = [], [], 0, False

        for text, offset, lineno, raw in _lines(self.stream):
            last_pos = (offset + len(raw), lineno)
            if skipping:
                if not (text.startswith("[") and TAG_REGEX.match(text)):
                    continue
                skipping = False
                lexer = _Lexer()
            try:
                events = lexer.feed(text, offset, lineno, raw)
                for event in events:
                    if isinstance(event, TagPair):
                        if moves or depth:
                            raise PgnSyntaxError("game has no result token", offset, lineno)
                        tags.append((event.name, event.value))
                        started = True
                    elif isinstance(event, VariationStart):
                        depth += 1
                    elif isinstance(event, VariationEnd):
                        if depth == 0:
                            raise PgnSyntaxError("unbalanced ')'", offset, lineno)
                        depth -= 1
                    elif depth:
                        continue
                    elif isinstance(event, MoveToken):
                        moves.append(event.san)
                        started = True
                    elif isinstance(event, Result):
                        record = GameRecord(tuple(tags), tuple(moves), event.token)
                        reset()
                        self.parsed += 1
                        yield record
            except PgnSyntaxError as exc:
                self._fail(exc)
                reset()
                lexer = _Lexer()
                skipping = True
        if lexer.in_comment:
            self._fail(PgnSyntaxError("unterminated comment", *last_pos))
        elif started and not skipping:
            self._fail(PgnSyntaxError("game has no result token", *last_pos))


def parse_pgn_stream(stream: BinaryIO, errors: str = "strict") -> Iterator[GameRecord]:
    return iter(PgnReader(stream, errors))


def parse_pgn_string(text: str, errors: str = "strict") -> List[GameRecord]:
    return list(parse_pgn_stream(io.BytesIO(text.encode("utf-8")), errors))


def open_pgn(path: Union[str, os.PathLike]) -> BinaryIO:
    """Open a possibly compressed PGN file in binary mode."""
    path = os.fspath(path)
    if path.endswith(".gz"):
        return gzip.open(path, "rb")
    if path.endswith(".bz2"):
        return bz2.open(path, "rb")
    if path.endswith(".zst"):
        import zstandard  # optional

        return io.BufferedReader(zstandard.ZstdDecompressor().stream_reader(open(path, "rb")))
    return open(path, "rb")


# --- filtering ---------------------------------------------------------------

BULLET_LIMIT_SECONDS = 180


def average_rating(record: GameRecord) -> Optional[float]:
    try:
        return (int(record.tag("WhiteElo", "")) + int(record.tag("BlackElo", ""))) / 2
    except ValueError:
        return None


def base_time(record: GameRecord) -> Optional[int]:
    """Initial clock in seconds from ``TimeControl`` ("base+increment"), or None."""
    tc = record.tag("TimeControl")
    if not tc or tc in ("-", "?"):
        return None
    try:
        return int(tc.split("+", 1)[0])
    except ValueError:
        return None


@dataclass(frozen=True)
class GameFilter:
    min_avg_rating: Optional[float] = None
    exclude_bullet: bool = False
    event_contains: Optional[str] = None

    def __call__(self, record: GameRecord) -> bool:
        if self.min_avg_rating is not None:
            avg = average_rating(record)
            if avg is None or avg < self.min_avg_rating:
                return False
        if self.exclude_bullet:
            tc = record.tag("TimeControl")
            if tc is None:
                return False
            if tc != "-":
                base = base_time(record)
                if base is None or base < BULLET_LIMIT_SECONDS:
                    return False
        if self.event_contains is not None:
            event = record.tag("Event")
            if event is None or self.event_contains not in event:
                return False
        return True

    @classmethod
    def parse(cls, spec: str) -> "GameFilter":
        """Parse e.g. ``"min-avg-rating=2500,exclude-bullet"``."""
        kwargs: dict = {}
        for part in filter(None, (p.strip() for p in spec.split(","))):
            name, _, value = part.partition("=")
            if name == "min-avg-rating":
                try:
                    kwargs["min_avg_rating"] = float(value)
                except ValueError:
                    raise BadPredicate(f"bad rating in {part!r}") from None
            elif name == "exclude-bullet" and not value:
                kwargs["exclude_bullet"] = True
            elif name == "event" and value:
                kwargs["event_contains"] = value
            else:
                raise BadPredicate(f"unknown filter term {part!r}")
        return cls(**kwargs)


def filter_games(records: Iterable[GameRecord],
                 predicate: Union[GameFilter, str, Callable[[GameRecord], bool]]) -> Iterator[GameRecord]:
    if isinstance(predicate, str):
        predicate = GameFilter.parse(predicate)
    return (r for r in records if predicate(r))
