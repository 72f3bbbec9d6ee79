"""Final-position statistics over PGN corpora.

Each game is replayed to its final position and the placement of every piece
is counted in a ``(color, kind, square)`` table.  Accumulators are plain
integer arrays, so partial results from worker processes merge exactly and
the outcome does not depend on how the corpus was split.
"""

from __future__ import annotations

import csv
import io
import itertools
import logging
import os
from collections import deque
from concurrent.futures import Future, ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Deque, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from .board import SQUARE_NAMES, Board, ChessError, Color, Kind, replay_game
from .pgn import GameFilter, GameRecord, PgnReader, open_pgn

LOGGER = logging.getLogger(__name__)

COLORS = (Color.WHITE, Color.BLACK)
KINDS = (Kind.KING, Kind.QUEEN, Kind.BISHOP, Kind.KNIGHT, Kind.ROOK, Kind.PAWN)
PIECE_NAMES = {k: k.name.lower() for k in Kind}
RESULT_KEYS = {"1-0": "white", "0-1": "black", "1/2-1/2": "draw", "*": "unfinished"}


class EmptyCorpus(ValueError):
    pass


class UnknownPiece(ValueError):
    pass


def _new_counts() -> np.ndarray:
    return np.zeros((2, 7, 64), dtype=np.int64)


@dataclass
class HeatmapAccumulator:
    """Per ``(color, kind)`` square counts over final positions.

    ``counts[color, kind, square]``; index ``kind`` with :class:`Kind`
    (row 0 is unused).
    """

    counts: np.ndarray = field(default_factory=_new_counts)
    games: int = 0
    ply_sum: int = 0
    results: Dict[str, int] = field(default_factory=lambda: dict.fromkeys(RESULT_KEYS.values(), 0))

    def add(self, final: Board, result: str, plies: int) -> "HeatmapAccumulator":
        """Count ``final`` in place and return ``self``."""
        counts = self.counts
        for sq, piece, _tag in final.occupied():
            counts[piece.color, piece.kind, sq] += 1
        self.games += 1
        self.ply_sum += plies
        self.results[RESULT_KEYS.get(result, "unfinished")] += 1
        return self

    def merge(self, other: "HeatmapAccumulator") -> "HeatmapAccumulator":
        return HeatmapAccumulator(
            self.counts + other.counts,
            self.games + other.games,
            self.ply_sum + other.ply_sum,
            {k: self.results[k] + other.results[k] for k in self.results},
        )

    def grid(self, color: Color, kind: Kind) -> np.ndarray:
        return self.counts[color, kind]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HeatmapAccumulator):
            return NotImplemented
        return (np.array_equal(self.counts, other.counts) and self.games == other.games
                and self.ply_sum == other.ply_sum and self.results == other.results)


def accumulate(acc: HeatmapAccumulator, final: Board, result: str, plies: int) -> HeatmapAccumulator:
    return acc.add(final, result, plies)


def merge(a: HeatmapAccumulator, b: HeatmapAccumulator) -> HeatmapAccumulator:
    return a.merge(b)


# --- summaries ---------------------------------------------------------------

PER_OCCURRENCE = "per-occurrence"
PER_GAME = "per-game"


def shares(acc: HeatmapAccumulator, color: Color, kind: Kind, normalization: str = PER_OCCURRENCE) -> np.ndarray:
    """Per-square fractions for one piece.

    A square holds at most one piece, so the number of games with a piece on
    a square equals that square's count; per-game shares are ``count / games``.
    """
    counts = acc.counts[color, kind].astype(float)
    if normalization == PER_OCCURRENCE:
        total = counts.sum()
        return counts / total if total else counts
    if normalization == PER_GAME:
        return counts / acc.games if acc.games else counts
    raise ValueError(f"unknown normalization {normalization!r}")


def entropy_bits(counts: np.ndarray) -> float:
    total = counts.sum()
    if not total:
        return 0.0
    p = counts[counts > 0] / total
    return float(max(0.0, -(p * np.log2(p)).sum()))


@dataclass(frozen=True)
class PieceSummary:
    color: Color
    kind: Kind
    max_square: int
    max_share: float  # percent
    entropy_bits: float
    occurrences: int
    normalization: str

    @property
    def label(self) -> str:
        return f"{self.color.name.lower()} {PIECE_NAMES[self.kind]}"


@dataclass(frozen=True)
class CorpusSummary:
    pieces: Tuple[PieceSummary, ...]
    games: int
    mean_plies: float
    white_win: float
    black_win: float
    draw: float

    @property
    def mean_moves(self) -> float:
        return self.mean_plies / 2

    def piece(self, color: Color, kind: Kind) -> PieceSummary:
        for p in self.pieces:
            if p.color == color and p.kind == kind:
                return p
        raise UnknownPiece(f"{color!r} {kind!r}")


def summarize(acc: HeatmapAccumulator, normalization: str = PER_OCCURRENCE) -> CorpusSummary:
    if acc.games == 0:
        raise EmptyCorpus("no games accumulated")
    pieces = []
    for kind in KINDS:
        for color in COLORS:
            s = shares(acc, color, kind, normalization)
            best = int(np.argmax(s))
            counts = acc.counts[color, kind]
            pieces.append(PieceSummary(color, kind, best, 100.0 * float(s[best]),
                                       entropy_bits(counts), int(counts.sum()), normalization))
    g = acc.games
    return CorpusSummary(tuple(pieces), g, acc.ply_sum / g, acc.results["white"] / g,
                         acc.results["black"] / g, acc.results["draw"] / g)


# --- rendering ---------------------------------------------------------------

def parse_piece(name: str) -> Tuple[Color, Kind]:
    """``"white king"``, ``"white-king"`` or ``"K"`` / ``"k"``."""
    text = name.strip().replace("-", " ").replace("_", " ")
    if len(text) == 1 and text.lower() in "kqbnrp":
        kind = Kind(" pnbrqk".index(text.lower()))
        return (Color.WHITE if text.isupper() else Color.BLACK), kind
    parts = text.lower().split()
    if len(parts) == 2 and parts[0] in ("white", "black"):
        for kind, kname in PIECE_NAMES.items():
            if kname == parts[1]:
                return Color[parts[0].upper()], kind
    raise UnknownPiece(f"unknown piece {name!r}")


def _check_piece(color: Color, kind: Kind) -> None:
    if color not in COLORS or kind not in KINDS:
        raise UnknownPiece(f"unknown piece ({color!r}, {kind!r})")


def render_text(acc: HeatmapAccumulator, color: Color, kind: Kind,
                normalization: str = PER_OCCURRENCE) -> str:
    _check_piece(color, kind)
    s = shares(acc, color, kind, normalization) * 100
    lines = [f"{color.name.lower()} {PIECE_NAMES[kind]} ({normalization}, %)"]
    for rank in range(7, -1, -1):
        cells = " ".join(f"{s[rank * 8 + f]:6.2f}" for f in range(8))
        lines.append(f"{rank + 1} {cells}")
    lines.append("  " + " ".join(f"{c:>6}" for c in "abcdefgh"))
    return "\n".join(lines) + "\n"


def render_csv(acc: HeatmapAccumulator, color: Color, kind: Kind) -> str:
    _check_piece(color, kind)
    occ = shares(acc, color, kind, PER_OCCURRENCE) * 100
    per_game = shares(acc, color, kind, PER_GAME) * 100
    counts = acc.counts[color, kind]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["square", "count", "share_per_occurrence", "share_per_game"])
    for sq in range(64):
        w.writerow([SQUARE_NAMES[sq], int(counts[sq]), f"{occ[sq]:.2f}", f"{per_game[sq]:.2f}"])
    return buf.getvalue()


def _color_for(t: float) -> str:
    # white -> dark red, monotone in t
    r = 255 - int(round(120 * t))
    g = b = 255 - int(round(255 * t))
    return f"#{r:02x}{g:02x}{b:02x}"


def render_svg(acc: HeatmapAccumulator, color: Color, kind: Kind,
               normalization: str = PER_OCCURRENCE, cell: int = 48) -> str:
    """8x8 SVG heatmap; the color scale is normalized to this piece's maximum."""
    _check_piece(color, kind)
    s = shares(acc, color, kind, normalization)
    top = float(s.max())
    margin = 20
    size = 8 * cell + margin
    title = f"{color.name.lower()} {PIECE_NAMES[kind]}"
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size + margin}" '
           f'viewBox="0 0 {size} {size + margin}" data-scale-max="{100 * top:.2f}">',
           f'<title>{title}</title>',
           f'<text x="{margin}" y="14" font-family="sans-serif" font-size="12">{title} '
           f'(max {100 * top:.2f}%)</text>']
    for sq in range(64):
        f, r = sq & 7, sq >> 3
        x, y = margin + f * cell, margin + (7 - r) * cell
        t = s[sq] / top if top else 0.0
        out.append(f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{_color_for(t)}" '
                   f'stroke="#888" data-square="{SQUARE_NAMES[sq]}" data-share="{100 * s[sq]:.2f}"/>')
        if s[sq] > 0:
            fill = "#fff" if t > 0.6 else "#000"
            out.append(f'<text x="{x + cell / 2}" y="{y + cell / 2 + 4}" text-anchor="middle" '
                       f'font-family="sans-serif" font-size="10" fill="{fill}">{100 * s[sq]:.2f}</text>')
    for f in range(8):
        out.append(f'<text x="{margin + f * cell + cell / 2}" y="{size + 14}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="11">{"abcdefgh"[f]}</text>')
    for r in range(8):
        out.append(f'<text x="6" y="{margin + (7 - r) * cell + cell / 2 + 4}" '
                   f'font-family="sans-serif" font-size="11">{r + 1}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


FORMATS = ("text-grid", "csv", "svg")


def render_heatmap(acc: HeatmapAccumulator, piece: Union[str, Tuple[Color, Kind]], fmt: str = "text-grid",
                   normalization: str = PER_OCCURRENCE) -> str:
    color, kind = parse_piece(piece) if isinstance(piece, str) else piece
    if fmt == "text-grid":
        return render_text(acc, color, kind, normalization)
    if fmt == "csv":
        return render_csv(acc, color, kind)
    if fmt == "svg":
        return render_svg(acc, color, kind, normalization)
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def summary_csv(acc: HeatmapAccumulator) -> str:
    """Table-1-style rows with both normalizations side by side."""
    occ = summarize(acc, PER_OCCURRENCE)
    per_game = summarize(acc, PER_GAME)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["piece", "color", "max_square", "max_pct_per_occurrence",
                "max_square_per_game", "max_pct_per_game", "entropy_bits", "occurrences"])
    for a, b in zip(occ.pieces, per_game.pieces):
        w.writerow([PIECE_NAMES[a.kind], a.color.name.lower(), SQUARE_NAMES[a.max_square],
                    f"{a.max_share:.2f}", SQUARE_NAMES[b.max_square], f"{b.max_share:.2f}",
                    f"{a.entropy_bits:.2f}", a.occurrences])
    return buf.getvalue()


def corpus_summary_csv(acc: HeatmapAccumulator, stats: Optional["RunStats"] = None) -> str:
    s = summarize(acc)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["metric", "value"])
    rows = [("games", s.games), ("mean_plies", f"{s.mean_plies:.2f}"), ("mean_moves", f"{s.mean_moves:.2f}"),
            ("white_win_pct", f"{100 * s.white_win:.2f}"), ("black_win_pct", f"{100 * s.black_win:.2f}"),
            ("draw_pct", f"{100 * s.draw:.2f}")]
    if stats is not None:
        rows += [("games_read", stats.read), ("games_filtered_out", stats.filtered_out),
                 ("pgn_errors_skipped", stats.syntax_skipped), ("replay_errors_skipped", stats.replay_skipped)]
    w.writerows(rows)
    return buf.getvalue()


# --- pipeline ----------------------------------------------------------------

@dataclass
class RunStats:
    read: int = 0
    filtered_out: int = 0
    syntax_skipped: int = 0
    replay_skipped: int = 0

    @property
    def kept(self) -> int:
        return self.read - self.filtered_out - self.replay_skipped


def accumulate_games(records: Iterable[GameRecord], strict: bool = False) -> Tuple[HeatmapAccumulator, int]:
    """Replay and count ``records``; returns the accumulator and the number of replay failures."""
    acc = HeatmapAccumulator()
    failed = 0
    for record in records:
        try:
            final = replay_game(record).final
        except ChessError:
            if strict:
                raise
            failed += 1
            continue
        acc.add(final, record.result, len(record.moves))
    return acc, failed


def _chunks(it: Iterable[GameRecord], size: int) -> Iterator[List[GameRecord]]:
    it = iter(it)
    while True:
        chunk = list(itertools.islice(it, size))
        if not chunk:
            return
        yield chunk


def analyze_records(records: Iterable[GameRecord], workers: int = 1, chunk_size: int = 200,
                    strict: bool = False, stats: Optional[RunStats] = None) -> HeatmapAccumulator:
    """Map-reduce over ``records``; the result is independent of ``workers``."""
    stats = stats if stats is not None else RunStats()
    if workers <= 1:
        acc, failed = accumulate_games(records, strict)
        stats.replay_skipped += failed
        return acc
    acc = HeatmapAccumulator()
    pending: Deque[Future] = deque()

    def drain_one() -> None:
        nonlocal acc
        part, failed = pending.popleft().result()
        acc = acc.merge(part)
        stats.replay_skipped += failed

    # bounded window keeps memory independent of corpus size; FIFO drain fixes the reduction order
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for chunk in _chunks(records, chunk_size):
            pending.append(pool.submit(accumulate_games, chunk, strict))
            if len(pending) >= 2 * workers:
                drain_one()
        while pending:
            drain_one()
    return acc


def analyze_paths(paths: Sequence[Union[str, os.PathLike]], game_filter: Optional[GameFilter] = None,
                  workers: int = 1, strict: bool = False,
                  stats: Optional[RunStats] = None) -> Tuple[HeatmapAccumulator, RunStats]:
    stats = stats if stats is not None else RunStats()
    game_filter = game_filter or GameFilter()
    readers: List[PgnReader] = []

    def records() -> Iterator[GameRecord]:
        for path in paths:
            with open_pgn(path) as fh:
                reader = PgnReader(fh, "strict" if strict else "skip")
                readers.append(reader)
                for record in reader:
                    stats.read += 1
                    if game_filter(record):
                        yield record
                    else:
                        stats.filtered_out += 1

    acc = analyze_records(records(), workers=workers, strict=strict, stats=stats)
    stats.syntax_skipped = sum(r.skipped for r in readers)
    return acc, stats
