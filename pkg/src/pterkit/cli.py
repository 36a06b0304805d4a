"""Command-line interface.

Exit codes: 0 success, 1 input/format error, 2 configuration error,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from pterkit.alignment import InvariantViolation, UndefinedRateError, pter
from pterkit.cli_io import (
    align_corpus,
    build_inventories,
    emit,
    load_manifest,
    load_transcripts,
    builtin_manifest_path,
    render_json,
    run_manifest,
    score_corpus,
)
from pterkit.compare import ConfigurationError
from pterkit.inventory import unique_phones

EXIT_OK, EXIT_INPUT, EXIT_CONFIG, EXIT_INVARIANT = 0, 1, 2, 3
BUILTIN_ALIAS = "@table2"

log = logging.getLogger("pterkit")


def _add_ingest_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--pre-tokenized", action="store_true", default=None,
                   help="payloads are space-separated tokens ('|' = word boundary)")
    p.add_argument("--permissive", action="store_true", default=None,
                   help="pass unknown symbols through with a warning instead of failing")


def _add_analysis_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("manifest", help=f"manifest file, or {BUILTIN_ALIAS} for the shipped PTER table")
    _add_ingest_flags(p)
    p.add_argument("--clip-floor", type=float, dest="clip_floor_pp", help="default -100")
    p.add_argument("--stability-threshold", type=float, dest="stability_threshold_pp",
                   help="default 25")
    p.add_argument("--min-languages", type=int, help="default 11")
    p.add_argument("--min-ref-count", type=int, help="default 1")
    p.add_argument("--tone-threshold", type=float,
                   help="inserted tones per 100 reference vowels that flag spurious tonality (default 5)")
    p.add_argument("--mirror-substitutions", action="store_true", default=None,
                   help="also count substitutions against the hypothesized token")
    p.add_argument("--jobs", type=int, default=1)


def get_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pterkit", description="Phonetic token error rate scoring and transfer analysis"
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tokenize", help="print the phonetic tokens of a transcript file")
    p.add_argument("file")
    _add_ingest_flags(p)

    p = sub.add_parser("score", help="score hypotheses against references")
    p.add_argument("--ref", required=True)
    p.add_argument("--hyp", required=True)
    _add_ingest_flags(p)
    p.add_argument("--mirror-substitutions", action="store_true")
    p.add_argument("--per-phone", action="store_true", help="print per-token statistics")
    p.add_argument("--alignments", action="store_true", help="print every alignment")

    p = sub.add_parser("inventory", help="per-language token inventories")
    p.add_argument("manifest")
    _add_ingest_flags(p)

    p = sub.add_parser("analyze", help="run all analyses; JSON to stdout unless --out is given")
    _add_analysis_flags(p)
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--out")

    p = sub.add_parser("report", help="run all analyses and write the report files")
    _add_analysis_flags(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", required=True)
    return parser


def _manifest(args: argparse.Namespace):
    path = builtin_manifest_path() if args.manifest == BUILTIN_ALIAS else Path(args.manifest)
    m = load_manifest(path)
    overrides = {
        key: getattr(args, key, None)
        for key in (
            "pre_tokenized", "permissive", "clip_floor_pp", "stability_threshold_pp",
            "min_languages", "min_ref_count", "tone_threshold", "mirror_substitutions",
        )
    }
    m.options = m.options.updated(**overrides)
    return m


def cmd_tokenize(args: argparse.Namespace) -> int:
    for seq in load_transcripts(args.file, bool(args.pre_tokenized), permissive=bool(args.permissive)):
        print(f"{seq.utterance_id}\t{seq.pretokenized()}")
    return EXIT_OK


def cmd_score(args: argparse.Namespace) -> int:
    opts = dict(pre_tokenized=bool(args.pre_tokenized), permissive=bool(args.permissive))
    refs = load_transcripts(args.ref, **opts)
    hyps = load_transcripts(args.hyp, **opts)
    if args.alignments:
        for a in align_corpus(refs, hyps):
            print(f"id: {a.utterance_id}\n{a.pretty()}\n")
    total, stats = score_corpus(refs, hyps, mirror_substitutions=args.mirror_substitutions)
    print(
        f"PTER {100 * pter(total):.1f}%  N={total.n_ref} C={total.correct} "
        f"S={total.sub} D={total.dels} I={total.ins}"
    )
    if args.per_phone:
        print("token\tref\tcor\tsub\tdel\tins\tsub_in\tpter")
        for tok, s in stats.items():
            rate = "" if s.pter is None else f"{100 * s.pter:.1f}"
            print(f"{tok.text}\t{s.ref_count}\t{s.correct}\t{s.sub_out}\t{s.dels}\t{s.ins}\t{s.sub_in}\t{rate}")
    return EXIT_OK


def cmd_inventory(args: argparse.Namespace) -> int:
    m = _manifest(args)
    inventories = build_inventories(m)
    uniques = unique_phones(inventories) if len(inventories) > 1 else {}
    print("language\tvowels\tconsonants\tmodifiers\tunique")
    for inv in inventories:
        unique = " ".join(sorted(t.text for t in uniques.get(inv.language, ())))
        print(f"{inv.language}\t{inv.n_vowels}\t{inv.n_consonants}\t{len(inv.modifier_symbols)}\t{unique}")
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    report = run_manifest(_manifest(args), jobs=args.jobs)
    if args.out:
        for path in emit(report, args.format, args.out):
            log.info("wrote %s", path)
    else:
        sys.stdout.write(render_json(report))
    return EXIT_OK


COMMANDS = {
    "tokenize": cmd_tokenize,
    "score": cmd_score,
    "inventory": cmd_inventory,
    "analyze": cmd_analyze,
    "report": cmd_analyze,
}


def main(argv: list[str] | None = None) -> int:
    args = get_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantViolation as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ValueError, KeyError, OSError, UndefinedRateError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
