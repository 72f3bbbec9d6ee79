"""Command-line entry point: ``chesscrypt <subcommand> ...``.

Exit codes::

    0  success
    2  usage error (argparse)
    3  io            missing or unreadable file
    4  pgn-syntax    malformed PGN (strict mode)
    5  replay        a move in a game is not legal
    6  ambiguous     decryption has several candidate plaintexts
    7  domain        character, key or code outside its range
    8  parse         malformed ciphertext file
    9  mismatch      ciphertext does not belong to the given game/key
    10 filter        unparseable filter specification

Errors are reported on stderr as a single line ``error: <class>: <message>``.
Set ``CHG_LOG=debug`` (or info/warning) for logging.
"""

from __future__ import annotations

import argparse
import logging
import os
import re
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from . import cipher, cryptanalysis, games
from .board import ChessError, ReplayError
from .cipher import (AmbiguousDecryption, CharNotInAlphabet, DomainError, GameMismatch,
                     NoPreimage, ParseError, Variant)
from .corpus import (COLORS, KINDS, PIECE_NAMES, UnknownPiece, analyze_paths,
                     corpus_summary_csv, parse_piece, render_heatmap, render_csv, render_svg,
                     summarize, summary_csv)
from .board import SQUARE_NAMES
from .pgn import BadPredicate, GameFilter, GameRecord, PgnSyntaxError, open_pgn, parse_pgn_stream

LOGGER = logging.getLogger("chesscrypt")

DEFAULT_SEED = 20241001

EXIT_CODES = {"io": 3, "pgn-syntax": 4, "replay": 5, "ambiguous": 6, "domain": 7,
              "parse": 8, "mismatch": 9, "filter": 10}


class CliError(Exception):
    def __init__(self, kind: str, message: str) -> None:
        super().__init__(message)
        self.kind = kind


def _classify(exc: BaseException) -> Optional[str]:
    if isinstance(exc, CliError):
        return exc.kind
    if isinstance(exc, OSError):
        return "io"
    if isinstance(exc, PgnSyntaxError):
        return "pgn-syntax"
    if isinstance(exc, (ReplayError, ChessError)):
        return "replay"
    if isinstance(exc, AmbiguousDecryption):
        return "ambiguous"
    if isinstance(exc, ParseError):
        return "parse"
    if isinstance(exc, (GameMismatch, cryptanalysis.PairMismatch)):
        return "mismatch"
    if isinstance(exc, BadPredicate):
        return "filter"
    if isinstance(exc, (CharNotInAlphabet, DomainError, NoPreimage, UnknownPiece)):
        return "domain"
    return None


# --- input helpers -----------------------------------------------------------

def read_key_file(path: str, variant: Variant) -> Tuple[int, ...]:
    text = Path(path).read_text()
    text = re.sub(r"#.*", "", text)
    try:
        values = [int(v) for v in re.split(r"[\s,]+", text.strip()) if v]
    except ValueError as exc:
        raise CliError("domain", f"key file {path}: {exc}") from None
    return cipher.make_key(values, variant)


def load_games(path: str) -> List[GameRecord]:
    with open_pgn(path) as fh:
        return list(parse_pgn_stream(fh, "strict"))


def load_single_game(path: str) -> GameRecord:
    records = load_games(path)
    if len(records) != 1:
        raise CliError("pgn-syntax", f"{path}: expected exactly one game, found {len(records)}")
    return records[0]


def read_text_arg(text: Optional[str], path: Optional[str]) -> str:
    if text is not None:
        return text
    data = Path(path).read_text(encoding="utf-8") if path and path != "-" else sys.stdin.read()
    return data[:-1] if data.endswith("\n") else data


def write_output(out: Optional[str], content: str) -> None:
    if out and out != "-":
        Path(out).write_text(content, encoding="utf-8")
    else:
        sys.stdout.write(content)


def parse_keys(specs: Sequence[str]) -> List[int]:
    keys: List[int] = []
    for spec in specs:
        for part in spec.split(","):
            lo, sep, hi = part.partition("-")
            try:
                keys += list(range(int(lo), int(hi) + 1)) if sep else [int(lo)]
            except ValueError:
                raise CliError("domain", f"bad key spec {part!r}") from None
    bad = [k for k in keys if not 0 <= k <= 255]
    if bad:
        raise CliError("domain", f"keys outside 0..255: {bad[:5]}")
    return keys


def select_pieces(specs: Optional[Sequence[str]]):
    if not specs or specs == ["all"]:
        return [(c, k) for k in KINDS for c in COLORS]
    out = []
    for spec in specs:
        for name in spec.split(","):
            name = name.strip()
            if name.lower() in (n for n in PIECE_NAMES.values()):
                kind = next(k for k, n in PIECE_NAMES.items() if n == name.lower())
                out += [(c, kind) for c in COLORS]
            else:
                out.append(parse_piece(name))
    return out


# --- subcommands -------------------------------------------------------------

def cmd_encrypt(args: argparse.Namespace) -> int:
    variant = Variant(args.variant)
    key = read_key_file(args.key_file, variant)
    game = load_single_game(args.game)
    plaintext = read_text_arg(args.text, args.input)
    ct = cipher.encrypt_block(plaintext, key, game, variant)
    write_output(args.out, cipher.serialize(ct))
    return 0


def cmd_decrypt(args: argparse.Namespace) -> int:
    ct = cipher.deserialize(Path(args.input).read_text(encoding="utf-8") if args.input else sys.stdin.read())
    variant = Variant(args.variant) if args.variant else ct.variant
    key = read_key_file(args.key_file, variant)
    game = load_single_game(args.game)
    try:
        text = cipher.decrypt_block(ct, key, game, variant)
    except AmbiguousDecryption as exc:
        lines = [f"ambiguous: {len(exc.candidates)} position(s) cannot be decrypted uniquely",
                 f"partial: {exc.partial.rstrip(' ')}"]
        chars = exc.candidate_chars()
        for pos, codes in sorted(exc.candidates.items()):
            square = SQUARE_NAMES[cipher.START_SQUARES[pos - 1]]
            options = " | ".join(f"{c!r} ({code})" for c, code in zip(chars[pos], codes))
            lines.append(f"position {pos} ({square}): {options}")
        write_output(args.out, "\n".join(lines) + "\n")
        print(f"error: ambiguous: {exc}", file=sys.stderr)
        return EXIT_CODES["ambiguous"]
    write_output(args.out, text.rstrip(" ") + "\n")
    return 0


def cmd_collisions(args: argparse.Namespace) -> int:
    keys = parse_keys(args.key or ["0-255"])
    witnesses = cryptanalysis.find_collisions(keys)
    if args.format == "csv":
        content = cryptanalysis.witnesses_csv(witnesses)
    else:
        stats = cryptanalysis.ambiguity_rate(keys)
        lines = [f"key={w.key} x1={w.x1} x2={w.x2} mixed={w.mixed}" for w in witnesses]
        lines.append(f"# {len(witnesses)} collision(s) over {len(set(keys))} key(s); "
                     f"ambiguous pairs {stats.ambiguous_pairs} ({float(stats.ambiguous_pairs):.4f}), "
                     f"keys with collisions {stats.colliding_keys} ({float(stats.colliding_keys):.4f})")
        content = "\n".join(lines) + "\n"
    write_output(args.out, content)
    return 0


def cmd_kpa(args: argparse.Namespace) -> int:
    ct = cipher.deserialize(Path(args.ciphertext).read_text(encoding="utf-8"))
    variant = Variant(args.variant) if args.variant else ct.variant
    game = load_single_game(args.game)
    plaintext = read_text_arg(args.text, args.input)
    report = cryptanalysis.known_plaintext_attack(plaintext, ct, game, variant,
                                                  use_capture_log=not args.survivors_only)
    content = report.to_csv()
    content += f"# coverage {report.coverage} ({float(report.coverage):.4f})\n"
    write_output(args.out, content)
    return 0


def cmd_weak_score(args: argparse.Namespace) -> int:
    if args.pgn:
        named = []
        for path in args.pgn:
            for i, record in enumerate(load_games(path), 1):
                named.append((record.tag("Site") or f"{Path(path).name}#{i}", record))
    else:
        named = [("empty", games.EMPTY_GAME)] + list(games.WEAK_GAMES.items()) + [("remark", games.REMARK_GAME)]
    lines = ["game,plies,on_origin,fraction"]
    for name, record in named:
        score = cryptanalysis.weak_game_score(record)
        on = score.fraction_on_origin * 32
        lines.append(f"{name},{score.plies},{on}/32,{float(score.fraction_on_origin):.4f}")
    write_output(args.out, "\n".join(lines) + "\n")
    return 0


def _demo_kpa(variant: Variant, seed: int):
    import random

    rng = random.Random(seed)
    key = [rng.randrange(len(variant.key_range)) for _ in range(cipher.BLOCK_SIZE)]
    alphabet = cipher.alphabet_for(variant)
    plaintext = "".join(rng.choice(alphabet.chars) for _ in range(cipher.BLOCK_SIZE))
    game = games.REMARK_GAME
    ct = cipher.encrypt_block(plaintext, key, game, variant)
    full = cryptanalysis.known_plaintext_attack(plaintext, ct, game)
    survivors = cryptanalysis.known_plaintext_attack(plaintext, ct, game, use_capture_log=False)
    return key, full, survivors


def cmd_demo_flaws(args: argparse.Namespace) -> int:
    out = Path(args.out or "demo-flaws")
    out.mkdir(parents=True, exist_ok=True)
    report: List[str] = []

    witnesses = cryptanalysis.find_collisions()
    (out / "collisions.csv").write_text(cryptanalysis.witnesses_csv(witnesses))
    worked = cryptanalysis.CollisionWitness(62, 9, 64, 55)
    report.append(f"collisions: {len(witnesses)} witnesses over keys 0..255; "
                  f"worked example {tuple(worked)} present: {worked in witnesses}")

    stats = cryptanalysis.ambiguity_rate()
    report.append(f"ambiguity: {stats.ambiguous_pairs} of (code, key) pairs ambiguous "
                  f"({100 * float(stats.ambiguous_pairs):.2f}%), {stats.colliding_keys} of keys collide")

    for variant in Variant:
        u = cryptanalysis.uniformity_evidence(variant, args.trials, args.seed)
        (out / f"uniformity_{variant.value}.csv").write_text(u.to_csv())
        below = int((u.chi2 < u.critical).sum())
        report.append(f"uniformity {variant.value}: {below}/32 positions below chi2 critical "
                      f"{u.critical:.2f} (dof {u.dof}, {args.trials} trials, seed {args.seed})")

    for variant in (Variant.OTP64, Variant.REPAIRED, Variant.FAITHFUL):
        key, full, survivors = _demo_kpa(variant, args.seed)
        (out / f"kpa_{variant.value}.csv").write_text(full.to_csv())
        contains = all(key[p - 1] in c for p, c in full.recovered.items())
        report.append(f"kpa {variant.value}: coverage {float(full.coverage):.4f} with capture log, "
                      f"{float(survivors.coverage):.4f} survivors only; "
                      f"max candidates {max(len(c) for c in full.recovered.values())}; true key in all sets: {contains}")

    lines = ["game,plies,on_origin,fraction"]
    for name, record in [("empty", games.EMPTY_GAME), *games.WEAK_GAMES.items(), ("remark", games.REMARK_GAME)]:
        score = cryptanalysis.weak_game_score(record)
        lines.append(f"{name},{score.plies},{score.fraction_on_origin * 32}/32,{float(score.fraction_on_origin):.4f}")
    (out / "weak_games.csv").write_text("\n".join(lines) + "\n")
    report.append("weak games: " + "; ".join(lines[1:]))

    text = "\n".join(report) + "\n"
    (out / "report.txt").write_text(text)
    sys.stdout.write(text)
    return 0


def _game_filter(args: argparse.Namespace) -> GameFilter:
    spec = []
    if args.min_avg_rating is not None:
        spec.append(f"min-avg-rating={args.min_avg_rating}")
    if args.exclude_bullet:
        spec.append("exclude-bullet")
    if args.filter:
        spec.append(args.filter)
    return GameFilter.parse(",".join(spec))


def _run_analysis(args: argparse.Namespace):
    for path in args.pgn:
        if not Path(path).exists():
            raise CliError("io", f"no such file: {path}")
    acc, stats = analyze_paths(args.pgn, _game_filter(args), workers=args.workers, strict=args.strict)
    return acc, stats


def cmd_analyze(args: argparse.Namespace) -> int:
    acc, stats = _run_analysis(args)
    summary = summarize(acc)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for color, kind in [(c, k) for k in KINDS for c in COLORS]:
            stem = f"{color.name.lower()}_{PIECE_NAMES[kind]}"
            (out / f"{stem}.csv").write_text(render_csv(acc, color, kind))
            if args.format == "svg":
                (out / f"{stem}.svg").write_text(render_svg(acc, color, kind))
        (out / "summary.csv").write_text(summary_csv(acc))
        (out / "corpus.csv").write_text(corpus_summary_csv(acc, stats))
    print(f"games read {stats.read}, kept {acc.games}, filtered out {stats.filtered_out}, "
          f"skipped (pgn) {stats.syntax_skipped}, skipped (replay) {stats.replay_skipped}")
    print(f"mean length {summary.mean_moves:.2f} moves ({summary.mean_plies:.2f} plies); "
          f"white {100 * summary.white_win:.2f}%, black {100 * summary.black_win:.2f}%, draw {100 * summary.draw:.2f}%")
    if args.format == "text-grid" or (args.pieces and not args.out):
        for piece in select_pieces(args.pieces):
            sys.stdout.write(render_heatmap(acc, piece, "text-grid"))
    elif not args.out:
        sys.stdout.write(summary_csv(acc))
    return 0


def cmd_heatmap(args: argparse.Namespace) -> int:
    acc, _stats = _run_analysis(args)
    docs = [render_heatmap(acc, piece, args.format) for piece in select_pieces(args.pieces)]
    write_output(args.out, "".join(docs))
    return 0


# --- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chesscrypt", description="Chessography cryptanalysis workbench.")
    sub = parser.add_subparsers(dest="command", required=True)
    variants = [v.value for v in Variant]

    p = sub.add_parser("encrypt", help="encrypt one 32-character block")
    p.add_argument("--variant", choices=variants, default="repaired")
    p.add_argument("--key-file", required=True)
    p.add_argument("--game", required=True, help="PGN file holding exactly one game")
    p.add_argument("--text", help="plaintext (otherwise --in or stdin)")
    p.add_argument("--in", dest="input", help="plaintext file")
    p.add_argument("--out")
    p.set_defaults(func=cmd_encrypt)

    p = sub.add_parser("decrypt", help="decrypt a ciphertext file")
    p.add_argument("--variant", choices=variants)
    p.add_argument("--key-file", required=True)
    p.add_argument("--game", required=True)
    p.add_argument("--in", dest="input", help="ciphertext file (otherwise stdin)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_decrypt)

    p = sub.add_parser("collisions", help="enumerate faithful key-mixing collisions")
    p.add_argument("--key", action="append", help="key, list or range, e.g. 62 or 0-255 (repeatable)")
    p.add_argument("--format", choices=["text", "csv"], default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_collisions)

    p = sub.add_parser("kpa", help="known-plaintext Key 1 recovery")
    p.add_argument("--variant", choices=variants)
    p.add_argument("--game", required=True)
    p.add_argument("--ciphertext", required=True)
    p.add_argument("--text")
    p.add_argument("--in", dest="input", help="known plaintext file")
    p.add_argument("--survivors-only", action="store_true", help="ignore the capture log")
    p.add_argument("--out")
    p.set_defaults(func=cmd_kpa)

    p = sub.add_parser("weak-score", help="share of pieces left on their starting squares")
    p.add_argument("--pgn", nargs="+")
    p.add_argument("--out")
    p.set_defaults(func=cmd_weak_score)

    p = sub.add_parser("demo-flaws", help="run every flaw demonstration and write reports")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--out", help="report directory (default ./demo-flaws)")
    p.set_defaults(func=cmd_demo_flaws)

    for name, func, help_text in (("analyze", cmd_analyze, "final-position statistics of a PGN corpus"),
                                  ("heatmap", cmd_heatmap, "render final-position heatmaps")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--pgn", nargs="+", required=True)
        p.add_argument("--min-avg-rating", type=float)
        p.add_argument("--exclude-bullet", action="store_true")
        p.add_argument("--filter", help="extra filter terms, e.g. 'event=Blitz'")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--strict", action="store_true", help="abort on the first malformed game")
        p.add_argument("--pieces", nargs="+", help="e.g. king, white-queen, all")
        p.add_argument("--out")
        if name == "analyze":
            p.add_argument("--format", choices=["text-grid", "csv", "svg"], default="csv")
        else:
            p.add_argument("--format", choices=["text-grid", "csv", "svg"], default="text-grid")
        p.set_defaults(func=func)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    level = os.environ.get("CHG_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:
        kind = _classify(exc)
        if kind is None:
            raise
        message = str(exc).replace("\n", " ")
        print(f"error: {kind}: {message}", file=sys.stderr)
        return EXIT_CODES[kind]


if __name__ == "__main__":
    sys.exit(main())
