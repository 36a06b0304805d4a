"""Transcript and manifest ingestion, corpus scoring, and report emission."""

from __future__ import annotations

import csv
import io
import json
import logging
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Sequence

import yaml

from pterkit.alignment import (
    Alignment,
    ErrorTally,
    InvariantViolation,
    PhoneErrorStats,
    align,
    merge,
    per_phone_stats,
    pter,
    tally,
)
from pterkit.compare import (
    BoxplotStats,
    Condition,
    ConditionScores,
    ConfigurationError,
    ExperimentTable,
    corpus_improvements,
    cross_language_distribution,
    feature_group_values,
    improvement_points,
    stability_counts,
)
from pterkit.inventory import LanguageInventory, build_inventory, sharing_counts, unique_phones
from pterkit.ipa_core import (
    IPAEncodingError,
    PhoneticToken,
    TokenSequence,
    from_token_texts,
    tokenize,
)
from pterkit.phonology import ToneDiagnostic, UnknownPhoneError, tone_insertion_report

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
ALL = "*"


class InputError(ValueError):
    """Malformed or inconsistent input data."""


class TranscriptFormatError(InputError):
    def __init__(self, path: str | Path, line: int, message: str) -> None:
        super().__init__(f"{path}:{line}: {message}")
        self.path = str(path)
        self.line = line


class DuplicateIdError(TranscriptFormatError):
    pass


class OrphanHypothesisError(InputError):
    def __init__(self, ids: Sequence[str]) -> None:
        shown = ", ".join(ids[:5]) + (" ..." if len(ids) > 5 else "")
        super().__init__(f"{len(ids)} hypothesis id(s) without a reference: {shown}")
        self.ids = list(ids)


# transcripts


def load_transcripts(
    path: str | Path, pre_tokenized: bool = False, *, permissive: bool = False
) -> list[TokenSequence]:
    """Read ``utterance-id<TAB>payload`` lines.

    Raw payloads are normalized and tokenized; pre-tokenized payloads are
    split on spaces, with ``|`` marking word boundaries.
    """
    out: list[TokenSequence] = []
    seen: set[str] = set()
    data = Path(path).read_bytes()
    for lineno, raw in enumerate(data.split(b"\n"), start=1):
        raw = raw.rstrip(b"\r")
        if not raw.strip():
            continue
        try:
            line = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise TranscriptFormatError(path, lineno, str(IPAEncodingError(exc.start))) from None
        if "\t" not in line:
            raise TranscriptFormatError(path, lineno, "expected '<utterance-id>\\t<payload>'")
        utt_id, payload = line.split("\t", 1)
        utt_id = utt_id.strip()
        if not utt_id:
            raise TranscriptFormatError(path, lineno, "empty utterance id")
        if utt_id in seen:
            raise DuplicateIdError(path, lineno, f"duplicate utterance id {utt_id!r}")
        seen.add(utt_id)
        try:
            if pre_tokenized:
                seq = from_token_texts(payload.split(), utt_id)
            else:
                seq = tokenize(payload, utt_id, permissive=permissive)
        except ValueError as exc:
            raise TranscriptFormatError(path, lineno, str(exc)) from None
        out.append(seq)
    return out


def align_corpus(
    refs: Sequence[TokenSequence], hyps: Sequence[TokenSequence]
) -> list[Alignment]:
    """Pair utterances by id; a reference without hypothesis scores as all deletions."""
    by_id = {h.utterance_id: h for h in hyps}
    ref_ids = {r.utterance_id for r in refs}
    orphans = sorted(i for i in by_id if i not in ref_ids)
    if orphans:
        raise OrphanHypothesisError(orphans)
    alignments = []
    for ref in refs:
        hyp = by_id.get(ref.utterance_id)
        alignments.append(align(ref, hyp.tokens if hyp else (), ref.utterance_id))
    return alignments


def score_corpus(
    refs: Sequence[TokenSequence],
    hyps: Sequence[TokenSequence],
    *,
    mirror_substitutions: bool = False,
) -> tuple[ErrorTally, dict[PhoneticToken, PhoneErrorStats]]:
    alignments = align_corpus(refs, hyps)
    return _summarize(alignments, mirror_substitutions)


def _summarize(
    alignments: Sequence[Alignment], mirror_substitutions: bool
) -> tuple[ErrorTally, dict[PhoneticToken, PhoneErrorStats]]:
    total = merge(tally(a) for a in alignments)
    stats = per_phone_stats(alignments, mirror_substitutions=mirror_substitutions)
    check_conservation(total, stats)
    return total, stats


def check_conservation(total: ErrorTally, stats: dict[PhoneticToken, PhoneErrorStats]) -> None:
    for s in stats.values():
        s.check()
    sums = {
        "n_ref": sum(s.ref_count for s in stats.values()),
        "correct": sum(s.correct for s in stats.values()),
        "sub": sum(s.sub_out for s in stats.values()),
        "dels": sum(s.dels for s in stats.values()),
        "ins": sum(s.ins for s in stats.values()),
    }
    sub_in = sum(s.sub_in for s in stats.values())
    if sums != {k: getattr(total, k) for k in sums} or sub_in != total.sub:
        raise InvariantViolation(f"per-phone counts {sums} do not match corpus tally {total}")


# manifest


@dataclass
class Options:
    pre_tokenized: bool = False
    permissive: bool = False
    clip_floor_pp: float = -100.0
    stability_threshold_pp: float = 25.0
    min_languages: int = 11
    min_ref_count: int = 1
    tone_threshold: float = 5.0
    mirror_substitutions: bool = False

    def updated(self, **overrides: Any) -> Options:
        known = {f.name for f in fields(self)}
        values = asdict(self)
        for key, value in overrides.items():
            if key not in known:
                raise ConfigurationError(f"unknown option {key!r}")
            if value is not None:
                values[key] = value
        return Options(**values)


@dataclass(frozen=True)
class LanguageSpec:
    id: str
    is_tonal: bool = False


@dataclass
class ExperimentManifest:
    languages: list[LanguageSpec]
    # condition -> language -> (ref path, hyp path)
    conditions: dict[Condition, dict[str, tuple[Path, Path]]] = field(default_factory=dict)
    options: Options = field(default_factory=Options)
    mode: str = "transcripts"
    scores: Path | None = None
    phone_scores: Path | None = None
    source: Path | None = None


def builtin_manifest_path() -> Path:
    return Path(str(resources.files("pterkit") / "data" / "table2_manifest.yaml"))


def _as_bool(value: Any, what: str) -> bool:
    if isinstance(value, bool):
        return value
    raise ConfigurationError(f"{what} must be true or false, got {value!r}")


def load_manifest(path: str | Path) -> ExperimentManifest:
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigurationError(f"cannot read manifest {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigurationError(f"{path}: manifest must be a mapping")
    return parse_manifest(doc, base_dir=path.parent, source=path)


def parse_manifest(
    doc: dict[str, Any], base_dir: str | Path = ".", source: Path | None = None
) -> ExperimentManifest:
    base_dir = Path(base_dir)
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigurationError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")

    def resolve(p: Any, what: str) -> Path:
        if not isinstance(p, str):
            raise ConfigurationError(f"{what}: expected a path, got {p!r}")
        full = (base_dir / p).resolve()
        if not full.exists():
            raise ConfigurationError(f"{what}: no such file {full}")
        return full

    languages = []
    for entry in doc.get("languages") or []:
        if isinstance(entry, str):
            entry = {"id": entry}
        if not isinstance(entry, dict) or "id" not in entry:
            raise ConfigurationError(f"bad language entry {entry!r}")
        languages.append(
            LanguageSpec(str(entry["id"]), _as_bool(entry.get("is_tonal", False), "is_tonal"))
        )
    ids = [lang.id for lang in languages]
    if len(set(ids)) != len(ids):
        raise ConfigurationError("language ids must be unique")

    raw_opts = doc.get("options") or {}
    if not isinstance(raw_opts, dict):
        raise ConfigurationError("options must be a mapping")
    options = Options().updated(**raw_opts)

    mode = doc.get("mode", "transcripts")
    manifest = ExperimentManifest(languages, options=options, mode=mode, source=source)
    if mode == "precomputed":
        manifest.scores = resolve(doc.get("scores"), "scores")
        if doc.get("phone_scores") is not None:
            manifest.phone_scores = resolve(doc["phone_scores"], "phone_scores")
        return manifest
    if mode != "transcripts":
        raise ConfigurationError(f"unknown mode {mode!r}")

    if not languages:
        raise ConfigurationError("manifest lists no languages")
    for entry in doc.get("conditions") or []:
        try:
            cond = Condition(entry.get("name"))
        except (AttributeError, ValueError):
            raise ConfigurationError(f"bad condition entry {entry!r}") from None
        if cond in manifest.conditions:
            raise ConfigurationError(f"condition {cond.value!r} listed twice")
        paths = {}
        for lang, pair in (entry.get("transcripts") or {}).items():
            lang = str(lang)
            if lang not in ids:
                raise ConfigurationError(f"{cond.value}: language {lang!r} not declared")
            if not isinstance(pair, dict):
                raise ConfigurationError(f"{cond.value}/{lang}: expected ref and hyp paths")
            paths[lang] = (
                resolve(pair.get("ref"), f"{cond.value}/{lang} ref"),
                resolve(pair.get("hyp"), f"{cond.value}/{lang} hyp"),
            )
        manifest.conditions[cond] = paths
    if not manifest.conditions:
        raise ConfigurationError("manifest lists no conditions")
    return manifest


# precomputed scores


def _read_tsv(path: Path) -> list[dict[str, str]]:
    lines = [
        line
        for line in path.read_text(encoding="utf-8").splitlines()
        if line.strip() and not line.startswith("#")
    ]
    return list(csv.DictReader(lines, delimiter="\t", quoting=csv.QUOTE_NONE))


def load_precomputed(manifest: ExperimentManifest) -> ExperimentTable:
    """Build an experiment table from corpus (and optional per-phone) PTERs in percent."""
    table = ExperimentTable()
    wanted = {lang.id for lang in manifest.languages}
    for lineno, row in enumerate(_read_tsv(manifest.scores), start=2):
        lang = row.get("language")
        if wanted and lang not in wanted:
            continue
        for cond in Condition:
            value = row.get(cond.value)
            if value in (None, "", "-"):
                continue
            try:
                rate = float(value) / 100.0
            except ValueError:
                raise TranscriptFormatError(manifest.scores, lineno, f"bad {cond.value} value {value!r}") from None
            table.add(ConditionScores(lang, cond, rate))
    if wanted - set(table.languages()):
        missing = sorted(wanted - set(table.languages()))
        raise ConfigurationError(f"no scores for declared languages {missing}")

    if manifest.phone_scores is not None:
        inventories: dict[str, LanguageInventory] = {}
        for lineno, row in enumerate(_read_tsv(manifest.phone_scores), start=2):
            try:
                stats = _phone_row(row)
                key = (row["language"], Condition(row["condition"]))
            except (KeyError, ValueError) as exc:
                raise TranscriptFormatError(manifest.phone_scores, lineno, f"bad row: {exc}") from None
            if key not in table.rows:
                if wanted and key[0] not in wanted:
                    continue
                raise ConfigurationError(f"phone scores for {key[0]}/{key[1].value} without corpus score")
            table.rows[key].phone_stats[stats.token] = stats
            if key[1] is Condition.MONO and stats.pter is not None:
                inv = inventories.setdefault(key[0], LanguageInventory(key[0]))
                inv.tokens[stats.token] += max(stats.ref_count, 1)
        table.inventories = [inventories[k] for k in sorted(inventories)]
    return table


def _phone_row(row: dict[str, str]) -> PhoneErrorStats:
    token = PhoneticToken.of(row["token"])

    def count(name: str) -> int:
        value = row.get(name) or "0"
        return int(value)

    if row.get("correct") not in (None, ""):
        return PhoneErrorStats(
            token,
            ref_count=count("ref_count"),
            correct=count("correct"),
            sub_out=count("sub_out"),
            dels=count("dels"),
            ins=count("ins"),
            sub_in=count("sub_in"),
        )
    value = row.get("pter", "")
    return PhoneErrorStats(
        token,
        ref_count=count("ref_count"),
        reported_pter=None if value in ("", "-") else float(value) / 100.0,
    )


# running


@dataclass
class CellResult:
    language: str
    condition: Condition
    tally: ErrorTally
    stats: dict[PhoneticToken, PhoneErrorStats]
    inventory: LanguageInventory
    tone: ToneDiagnostic


def _score_cell(
    language: str,
    condition: Condition,
    ref_path: Path,
    hyp_path: Path,
    is_tonal: bool,
    options: Options,
) -> CellResult:
    refs = load_transcripts(ref_path, options.pre_tokenized, permissive=options.permissive)
    hyps = load_transcripts(hyp_path, options.pre_tokenized, permissive=options.permissive)
    try:
        alignments = align_corpus(refs, hyps)
    except OrphanHypothesisError as exc:
        raise InputError(f"{hyp_path}: {exc}") from None
    total, stats = _summarize(alignments, options.mirror_substitutions)
    if total.n_ref == 0:
        raise InputError(f"{ref_path}: no reference tokens, PTER is undefined")
    with warnings.catch_warnings():
        if options.permissive:
            warnings.simplefilter("ignore")
        inventory = build_inventory(refs, language, permissive=options.permissive)
    tone = tone_insertion_report(alignments, is_tonal, threshold=options.tone_threshold)
    return CellResult(language, condition, total, stats, inventory, tone)


def _score_cell_args(args: tuple) -> CellResult:
    language, condition = args[:2]
    try:
        return _score_cell(*args)
    except (InputError, UnknownPhoneError, OSError) as exc:
        raise InputError(f"[{language}/{condition.value}] {exc}") from None


def build_inventories(m: ExperimentManifest) -> list[LanguageInventory]:
    """Inventories from each language's mono references (else its first condition)."""
    if m.mode == "precomputed":
        return load_precomputed(m).inventories
    out = []
    for lang in sorted(spec.id for spec in m.languages):
        paths = [m.conditions[c][lang] for c in Condition if lang in m.conditions.get(c, {})]
        if not paths:
            continue
        refs = load_transcripts(paths[0][0], m.options.pre_tokenized, permissive=m.options.permissive)
        out.append(build_inventory(refs, lang, permissive=m.options.permissive))
    return out


@dataclass
class Report:
    sections: dict[str, list[dict[str, Any]]]

    def __getitem__(self, name: str) -> list[dict[str, Any]]:
        return self.sections[name]


def run_manifest(
    m: ExperimentManifest, jobs: int = 1, *, table_out: list | None = None
) -> Report:
    """Score every (language, condition) cell and assemble the analysis report."""
    opts = m.options
    tonal = {lang.id: lang.is_tonal for lang in m.languages}
    tone_rows: list[tuple[str, Condition, bool, ToneDiagnostic]] = []
    if m.mode == "precomputed":
        table = load_precomputed(m)
    else:
        tasks = [
            (lang, cond, ref, hyp, tonal[lang], opts)
            for cond, per_lang in m.conditions.items()
            for lang, (ref, hyp) in per_lang.items()
        ]
        tasks.sort(key=lambda t: (t[0], list(Condition).index(t[1])))
        if jobs > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(_score_cell_args, tasks))
        else:
            results = [_score_cell_args(t) for t in tasks]

        table = ExperimentTable()
        inventories: dict[str, LanguageInventory] = {}
        for res in results:
            table.add(
                ConditionScores(res.language, res.condition, pter(res.tally), res.stats, res.tally)
            )
            # mono references define the inventory; other conditions are a fallback
            if res.condition is Condition.MONO or res.language not in inventories:
                inventories[res.language] = res.inventory
            tone_rows.append((res.language, res.condition, tonal[res.language], res.tone))
        table.inventories = [inventories[k] for k in sorted(inventories)]
    if table_out is not None:
        table_out.append(table)
    return build_report(table, opts, tone_rows)


def _box_record(b: BoxplotStats) -> dict[str, Any]:
    return {
        "n": b.n,
        "median": b.median,
        "q1": b.q1,
        "q3": b.q3,
        "iqd": b.iqd,
        "whisker_low": b.whisker_low,
        "whisker_high": b.whisker_high,
        "outliers": list(b.outliers),
    }


def build_report(
    table: ExperimentTable, opts: Options, tone_rows: Iterable[tuple] = ()
) -> Report:
    sections: dict[str, list[dict[str, Any]]] = {name: [] for name in SECTIONS}
    cond_order = list(Condition)
    rows = sorted(table.rows.values(), key=lambda r: (r.language, cond_order.index(r.condition)))
    conds = {r.condition for r in rows}
    sharing = sharing_counts(table.inventories)

    for r in rows:
        t = r.tally
        sections["summary"].append({
            "language": r.language, "condition": r.condition.value, "token": ALL,
            "n_ref": t.n_ref if t else None, "correct": t.correct if t else None,
            "sub": t.sub if t else None, "del": t.dels if t else None,
            "ins": t.ins if t else None, "pter": r.corpus_pter,
        })
        for token, s in sorted(r.phone_stats.items()):
            sections["per_phone"].append({
                "language": r.language, "condition": r.condition.value, "token": token.text,
                "role": token.role.value, "ref_count": s.ref_count, "correct": s.correct,
                "sub_out": s.sub_out, "del": s.dels, "ins": s.ins, "sub_in": s.sub_in,
                "pter": s.pter, "sharing_count": sharing.get(token, 0),
            })

    comparisons = [c for c in (Condition.MULTI, Condition.CROSS) if Condition.MONO in conds and c in conds]
    for to in comparisons:
        for lang, rel in corpus_improvements(table, Condition.MONO, to).items():
            base = table.get(lang, Condition.MONO).corpus_pter
            other = table.get(lang, to).corpus_pter
            sections["corpus_improvements"].append({
                "language": lang, "condition": to.value, "token": ALL, "from_condition": "mono",
                "absolute_pp": (base - other) * 100.0, "relative_pct": rel,
            })

        points, skipped = improvement_points(
            table, Condition.MONO, to, clip_floor=opts.clip_floor_pp, min_ref_count=opts.min_ref_count
        )
        bins: dict[int, list[float]] = {}
        for p in points:
            bins.setdefault(p.sharing_count, []).append(p.clipped_pp)
        for k in sorted(bins):
            sections["fig1_bins"].append({
                "language": ALL, "condition": to.value, "token": ALL, "from_condition": "mono",
                "sharing_count": k, **_box_record(BoxplotStats.from_values(bins[k])),
            })
        sections["meta"].append({
            "language": ALL, "condition": to.value, "token": ALL,
            "key": "fig1_skipped_pairs", "value": str(skipped),
        })

        for axis in ("manner", "place"):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                groups = feature_group_values(
                    table, axis, Condition.MONO, to, permissive=opts.permissive
                )
            for cat, values in groups.items():
                sections["feature_groups"].append({
                    "language": ALL, "condition": to.value, "token": ALL, "from_condition": "mono",
                    "axis": axis, "category": cat, "n": len(values),
                    "mean_relative_pct": sum(values) / len(values),
                })

    if all(c in conds for c in Condition):
        for token, (stable, evaluated) in stability_counts(table, opts.stability_threshold_pp).items():
            sections["stability"].append({
                "language": ALL, "condition": ALL, "token": token.text,
                "threshold_pp": opts.stability_threshold_pp,
                "n_stable": len(stable), "n_evaluated": len(evaluated),
                "stable_languages": sorted(stable),
            })

    dist = cross_language_distribution(table, opts.min_languages)
    for (token, cond), box in sorted(dist.items(), key=lambda kv: (kv[0][0].text, cond_order.index(kv[0][1]))):
        sections["fig2_rows"].append({
            "language": ALL, "condition": cond.value, "token": token.text,
            "sharing_count": sharing[token], **_box_record(box),
        })

    for lang, cond, is_tonal, diag in sorted(tone_rows, key=lambda t: (t[0], cond_order.index(t[1]))):
        sections["tone_diagnostics"].append({
            "language": lang, "condition": cond.value, "token": ALL, "is_tonal": is_tonal,
            "inserted_tones": diag.inserted_tones, "ref_vowels": diag.ref_vowels,
            "rate_per_100_vowels": diag.rate_per_100_vowels,
            "invalid_combinations": diag.invalid_combinations, "hyp_phones": diag.hyp_phones,
            "unknown_symbols": diag.unknown_symbols, "flagged": diag.flagged,
        })

    uniques = unique_phones(table.inventories) if len(table.inventories) > 1 else {}
    for inv in table.inventories:
        sections["inventory"].append({
            "language": inv.language, "condition": "mono", "token": ALL,
            "n_vowels": inv.n_vowels, "n_consonants": inv.n_consonants,
            "n_modifiers": len(inv.modifier_symbols),
            "vowels": sorted(inv.vowel_symbols), "consonants": sorted(inv.consonant_symbols),
            "modifiers": sorted(inv.modifier_symbols),
            "unique_tokens": sorted(t.text for t in uniques.get(inv.language, ())),
        })

    for key, value in (
        ("schema_version", SCHEMA_VERSION),
        ("clip_floor_pp", opts.clip_floor_pp),
        ("stability_threshold_pp", opts.stability_threshold_pp),
        ("min_languages", opts.min_languages),
        ("min_ref_count", opts.min_ref_count),
        ("tone_threshold", opts.tone_threshold),
        ("mirror_substitutions", opts.mirror_substitutions),
    ):
        sections["meta"].append(
            {"language": ALL, "condition": ALL, "token": ALL, "key": key, "value": str(value)}
        )
    return Report(sections)


# emission

_KEYS = [("language", "str"), ("condition", "str"), ("token", "str")]
_BOX = [
    ("n", "int"), ("median", "float"), ("q1", "float"), ("q3", "float"), ("iqd", "float"),
    ("whisker_low", "float"), ("whisker_high", "float"), ("outliers", "floats"),
]
SECTIONS: dict[str, list[tuple[str, str]]] = {
    "summary": _KEYS + [
        ("n_ref", "int?"), ("correct", "int?"), ("sub", "int?"), ("del", "int?"),
        ("ins", "int?"), ("pter", "pct1"),
    ],
    "corpus_improvements": _KEYS + [
        ("from_condition", "str"), ("absolute_pp", "float"), ("relative_pct", "float?"),
    ],
    "per_phone": _KEYS + [
        ("role", "str"), ("ref_count", "int"), ("correct", "int"), ("sub_out", "int"),
        ("del", "int"), ("ins", "int"), ("sub_in", "int"), ("pter", "float?"),
        ("sharing_count", "int"),
    ],
    "fig1_bins": _KEYS + [("from_condition", "str"), ("sharing_count", "int")] + _BOX,
    "feature_groups": _KEYS + [
        ("from_condition", "str"), ("axis", "str"), ("category", "str"), ("n", "int"),
        ("mean_relative_pct", "float"),
    ],
    "stability": _KEYS + [
        ("threshold_pp", "float"), ("n_stable", "int"), ("n_evaluated", "int"),
        ("stable_languages", "strs"),
    ],
    "fig2_rows": _KEYS + [("sharing_count", "int")] + _BOX,
    "tone_diagnostics": _KEYS + [
        ("is_tonal", "bool"), ("inserted_tones", "int"), ("ref_vowels", "int"),
        ("rate_per_100_vowels", "float?"), ("invalid_combinations", "int"),
        ("hyp_phones", "int"), ("unknown_symbols", "int"), ("flagged", "bool"),
    ],
    "inventory": _KEYS + [
        ("n_vowels", "int"), ("n_consonants", "int"), ("n_modifiers", "int"),
        ("vowels", "strs"), ("consonants", "strs"), ("modifiers", "strs"),
        ("unique_tokens", "strs"),
    ],
    "meta": _KEYS + [("key", "str"), ("value", "str")],
}


def _header(columns: list[tuple[str, str]]) -> list[str]:
    # rates stored as ratios are written as percentages
    return [f"{c}_pct" if kind == "pct1" else c for c, kind in columns]


def _format_cell(value: Any, kind: str) -> str:
    if value is None:
        return ""
    if kind == "pct1":
        return f"{value * 100:.1f}"
    if kind in ("float", "float?"):
        return repr(float(value))
    if kind == "floats":
        return " ".join(repr(float(v)) for v in value)
    if kind == "strs":
        return " ".join(value)
    if kind == "bool":
        return "true" if value else "false"
    return str(value)


def _parse_cell(text: str, kind: str) -> Any:
    if kind in ("int?", "float?") and text == "":
        return None
    if kind in ("int", "int?"):
        return int(text)
    if kind in ("float", "float?"):
        return float(text)
    if kind == "pct1":
        return float(text) / 100.0
    if kind == "floats":
        return [float(v) for v in text.split()]
    if kind == "strs":
        return text.split()
    if kind == "bool":
        return text == "true"
    return text


def emit(report: Report, fmt: str, out_dir: str | Path) -> list[Path]:
    """Write the report as CSV files (one per section) or a single JSON document."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        path = out / "report.json"
        path.write_text(render_json(report), encoding="utf-8")
        return [path]
    if fmt != "csv":
        raise ConfigurationError(f"unknown report format {fmt!r}")
    paths = []
    for name, columns in SECTIONS.items():
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(_header(columns))
        for record in report.sections.get(name, []):
            writer.writerow([_format_cell(record.get(c), kind) for c, kind in columns])
        path = out / f"{name}.csv"
        path.write_text(buf.getvalue(), encoding="utf-8")
        paths.append(path)
    return paths


def render_json(report: Report) -> str:
    doc = {
        name: [{c: record.get(c) for c, _ in columns} for record in report.sections.get(name, [])]
        for name, columns in SECTIONS.items()
    }
    return json.dumps(doc, ensure_ascii=False, indent=2, allow_nan=False) + "\n"


def read_csv_report(out_dir: str | Path) -> Report:
    """Parse a CSV report directory back into a ``Report``."""
    sections = {}
    for name, columns in SECTIONS.items():
        with open(Path(out_dir) / f"{name}.csv", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != _header(columns):
                raise InputError(f"{name}.csv: unexpected header {header}")
            records = []
            for row in reader:
                record = {c: _parse_cell(v, kind) for (c, kind), v in zip(columns, row)}
                if name == "summary" and record["n_ref"]:
                    # exact rate from the counts instead of the rounded percentage
                    record["pter"] = (record["sub"] + record["del"] + record["ins"]) / record["n_ref"]
                records.append(record)
        sections[name] = records
    return Report(sections)
