"""Articulatory features of IPA tokens and the diagnostics built on them."""

from __future__ import annotations

import csv
import functools
from dataclasses import dataclass, field, fields, replace
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from pterkit.alignment import Alignment, EditKind
from pterkit.ipa_core import PhoneticToken, Role, group_phones, tokenize

MANNERS = (
    "plosive",
    "nasal",
    "trill",
    "flap",
    "fricative",
    "lateral-fricative",
    "approximant",
    "lateral-approximant",
    "click",
    "implosive",
)
PLACES = (
    "bilabial",
    "labiodental",
    "dental",
    "alveolar",
    "postalveolar",
    "retroflex",
    "palatal",
    "velar",
    "uvular",
    "pharyngeal",
    "glottal",
)
HEIGHTS = ("close", "near-close", "close-mid", "mid", "open-mid", "near-open", "open")
BACKNESS = ("front", "central", "back")
ROUNDING = ("rounded", "unrounded")

VOWEL_CATEGORY = "vowel"
TONE_KEY = "<tone>"
DEFAULT_TONE_THRESHOLD = 5.0

_SLOTS = ("klass", "manner", "place", "voicing", "height", "backness", "rounding")
_OVERRIDABLE = {"manner": MANNERS, "place": PLACES, "height": HEIGHTS,
                "backness": BACKNESS, "rounding": ROUNDING}


class UnknownPhoneError(KeyError):
    def __init__(self, symbol: str) -> None:
        super().__init__(symbol)
        self.symbol = symbol

    def __str__(self) -> str:
        return f"no articulatory features for base symbol {self.symbol!r}"


class UnknownModifierError(KeyError):
    def __init__(self, symbol: str) -> None:
        super().__init__(symbol)
        self.symbol = symbol

    def __str__(self) -> str:
        return f"no modifier rule for {self.symbol!r}"


@dataclass(frozen=True)
class ArticulatoryFeatures:
    klass: str
    manner: str | None = None
    place: str | None = None
    voicing: bool | None = None
    height: str | None = None
    backness: str | None = None
    rounding: str | None = None
    marks: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if self.klass == "consonant":
            if self.manner not in MANNERS or self.place not in PLACES:
                raise ValueError(f"consonant needs a known manner and place: {self}")
            if self.height or self.backness or self.rounding:
                raise ValueError(f"consonant with vowel fields: {self}")
        elif self.klass == "vowel":
            if (
                self.height not in HEIGHTS
                or self.backness not in BACKNESS
                or self.rounding not in ROUNDING
            ):
                raise ValueError(f"vowel needs height, backness and rounding: {self}")
            if self.manner or self.place:
                raise ValueError(f"vowel with consonant fields: {self}")
        else:
            raise ValueError(f"unknown class {self.klass!r}")

    @property
    def is_vowel(self) -> bool:
        return self.klass == "vowel"

    @property
    def is_syllabic(self) -> bool:
        return self.is_vowel or "syllabic" in self.marks


@dataclass(frozen=True)
class ModifierRule:
    marks: frozenset[str] = frozenset()
    overrides: tuple[tuple[str, str], ...] = ()


def _parse_rule(spec: str) -> ModifierRule:
    marks, overrides = set(), []
    for part in spec.split(","):
        part = part.strip()
        if part.startswith("mark:"):
            marks.add(part[5:])
        elif "=" in part:
            key, value = part.split("=", 1)
            if key != "voicing" and key not in _OVERRIDABLE:
                raise ValueError(f"cannot override field {key!r}")
            overrides.append((key, value))
        else:
            raise ValueError(f"bad modifier rule {spec!r}")
    return ModifierRule(frozenset(marks), tuple(overrides))


def _cell(value: str) -> str | None:
    return None if value in ("", "-") else value


def _read_tsv(text: str) -> list[dict[str, str]]:
    lines = [line for line in text.splitlines() if line.strip() and not line.startswith("#")]
    return list(csv.DictReader(lines, delimiter="\t", quoting=csv.QUOTE_NONE))


@dataclass(frozen=True)
class FeatureTable:
    entries: dict[str, ArticulatoryFeatures]
    modifier_rules: dict[str, ModifierRule] = field(default_factory=dict)

    @classmethod
    def from_text(cls, features_tsv: str, modifiers_tsv: str) -> FeatureTable:
        entries = {}
        for row in _read_tsv(features_tsv):
            voicing = _cell(row["voicing"])
            marks = _cell(row.get("marks") or "-")
            entries[row["symbol"]] = ArticulatoryFeatures(
                klass=row["klass"],
                manner=_cell(row["manner"]),
                place=_cell(row["place"]),
                voicing=None if voicing is None else voicing == "true",
                height=_cell(row["height"]),
                backness=_cell(row["backness"]),
                rounding=_cell(row["rounding"]),
                marks=frozenset(marks.split(",")) if marks else frozenset(),
            )
        rules = {row["symbol"]: _parse_rule(row["rule"]) for row in _read_tsv(modifiers_tsv)}
        return cls(entries, rules)

    @classmethod
    def load(
        cls, features_path: str | Path | None = None, modifiers_path: str | Path | None = None
    ) -> FeatureTable:
        data = resources.files("pterkit") / "data"
        feat = Path(features_path) if features_path else data / "features.tsv"
        mods = Path(modifiers_path) if modifiers_path else data / "modifiers.tsv"
        return cls.from_text(feat.read_text(encoding="utf-8"), mods.read_text(encoding="utf-8"))

    def rule_for(self, token: PhoneticToken) -> ModifierRule:
        key = TONE_KEY if token.role is Role.TONE_CONTOUR else token.text
        try:
            return self.modifier_rules[key]
        except KeyError:
            raise UnknownModifierError(token.text) from None

    def is_tone_or_length(self, token: PhoneticToken) -> bool:
        if token.role in (Role.TONE_CONTOUR, Role.LENGTH):
            return True
        rule = self.modifier_rules.get(token.text)
        return rule is not None and "tone" in rule.marks


@functools.lru_cache(maxsize=None)
def default_table() -> FeatureTable:
    return FeatureTable.load()


def _text(token: PhoneticToken | str) -> str:
    return token.text if isinstance(token, PhoneticToken) else token


def lookup(base: PhoneticToken | str, table: FeatureTable | None = None) -> ArticulatoryFeatures:
    table = table or default_table()
    symbol = _text(base)
    try:
        return table.entries[symbol]
    except KeyError:
        raise UnknownPhoneError(symbol) from None


def apply_modifiers(
    f: ArticulatoryFeatures,
    mods: Iterable[PhoneticToken],
    table: FeatureTable | None = None,
) -> ArticulatoryFeatures:
    """Compose modifier tokens onto a base's features.

    Marks accumulate. Field overrides replace the field; an override that
    does not apply to the phone's class (e.g. a place on a vowel) is kept
    as a ``field=value`` mark instead.
    """
    table = table or default_table()
    marks = set(f.marks)
    changes: dict[str, object] = {}
    for mod in mods:
        rule = table.rule_for(mod)
        marks |= rule.marks
        for key, value in rule.overrides:
            if key == "voicing":
                changes[key] = value == "true"
            elif getattr(f, key) is not None:
                changes[key] = value
            else:
                marks.add(f"{key}={value}")
    return replace(f, marks=frozenset(marks), **changes)


def feature_distance(a: ArticulatoryFeatures, b: ArticulatoryFeatures) -> int:
    """Number of differing feature slots plus the number of unshared marks."""
    slots = sum(getattr(a, s) != getattr(b, s) for s in _SLOTS)
    return slots + len(a.marks ^ b.marks)


Phone = tuple[PhoneticToken, ...]


def as_phone(p: Phone | str) -> Phone:
    if isinstance(p, str):
        return tokenize(p).tokens
    return tuple(p)


def phone_text(p: Phone) -> str:
    return "".join(t.text for t in p)


def phone_features(p: Phone | str, table: FeatureTable | None = None) -> ArticulatoryFeatures:
    p = as_phone(p)
    base = [t for t in p if t.role is Role.BASE]
    if len(base) != 1:
        raise ValueError(f"a phone needs exactly one base token: {phone_text(p)!r}")
    mods = [t for t in p if t.role is not Role.BASE]
    return apply_modifiers(lookup(base[0], table), mods, table)


def nearest_phone(
    p: Phone | str, pool: Iterable[Phone | str], table: FeatureTable | None = None
) -> tuple[Phone, int]:
    """Closest pool phone by feature distance; ties go to the smaller text."""
    target = phone_features(p, table)
    candidates = sorted({as_phone(q) for q in pool}, key=phone_text)
    if not candidates:
        raise ValueError("empty pool")
    best, best_d = candidates[0], feature_distance(target, phone_features(candidates[0], table))
    for q in candidates[1:]:
        d = feature_distance(target, phone_features(q, table))
        if d < best_d:
            best, best_d = q, d
    return best, best_d


def is_valid_combination(tokens: Sequence[PhoneticToken], table: FeatureTable | None = None) -> bool:
    """False when a tone or length mark sits on a non-syllabic base."""
    table = table or default_table()
    base, mods = tokens[0], list(tokens[1:])
    if not any(table.is_tone_or_length(m) for m in mods):
        return True
    return apply_modifiers(lookup(base, table), mods, table).is_syllabic


@dataclass(frozen=True)
class ToneDiagnostic:
    inserted_tones: int
    ref_vowels: int
    rate_per_100_vowels: float | None
    invalid_combinations: int
    hyp_phones: int
    unknown_symbols: int
    flagged: bool


def tone_insertion_report(
    alignments: Iterable[Alignment],
    ref_is_tonal: bool,
    table: FeatureTable | None = None,
    threshold: float = DEFAULT_TONE_THRESHOLD,
) -> ToneDiagnostic:
    """Detect tone contours hallucinated on a language without tones.

    ``threshold`` is in inserted tone contours per 100 reference vowels.
    """
    table = table or default_table()
    inserted = vowels = invalid = phones = unknown = 0
    for a in alignments:
        for step in a.steps:
            if step.kind is EditKind.INSERT and step.hyp_token.role is Role.TONE_CONTOUR:
                inserted += 1
            ref = step.ref_token
            if ref is not None and ref.role is Role.BASE:
                features = table.entries.get(ref.text)
                if features is None:
                    unknown += 1
                elif features.is_vowel:
                    vowels += 1
        for group in group_phones(a.hyp_tokens()):
            phones += 1
            if group[0].role is not Role.BASE:
                # modifiers with no host phone at all
                invalid += any(table.is_tone_or_length(t) for t in group)
                continue
            try:
                invalid += not is_valid_combination(group, table)
            except (UnknownPhoneError, UnknownModifierError):
                unknown += 1
    rate = 100.0 * inserted / vowels if vowels else None
    flagged = not ref_is_tonal and rate is not None and rate > threshold
    return ToneDiagnostic(inserted, vowels, rate, invalid, phones, unknown, flagged)


def category(features: ArticulatoryFeatures, axis: str) -> str | None:
    """Manner or place category; vowels are their own manner category."""
    if axis == "manner":
        return VOWEL_CATEGORY if features.is_vowel else features.manner
    if axis == "place":
        return features.place
    raise ValueError(f"unknown axis {axis!r}")


def feature_dict(f: ArticulatoryFeatures) -> dict[str, object]:
    out = {fl.name: getattr(f, fl.name) for fl in fields(f)}
    out["marks"] = sorted(f.marks)
    return out
