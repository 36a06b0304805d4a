"""Cross-condition comparisons of corpus and per-phone PTER.

Per-phone rates are ratios inside ``PhoneErrorStats``; every value produced
here is in percent or percentage points.
"""

from __future__ import annotations

import enum
import math
import warnings
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from pterkit.alignment import (
    DEFAULT_CLIP_FLOOR,
    ErrorTally,
    PhoneErrorStats,
    UndefinedRateError,
    clip_improvement,
)
from pterkit.inventory import LanguageInventory, sharing_counts
from pterkit.ipa_core import PhoneticToken, Role
from pterkit.phonology import FeatureTable, UnknownPhoneError, category, default_table, lookup

DEFAULT_STABILITY_THRESHOLD = 25.0
DEFAULT_MIN_LANGUAGES = 11
WHISKER_REACH = 1.5


class Condition(str, enum.Enum):
    MONO = "mono"
    CROSS = "cross"
    MULTI = "multi"


class ConfigurationError(ValueError):
    pass


@dataclass
class ConditionScores:
    language: str
    condition: Condition
    corpus_pter: float
    phone_stats: dict[PhoneticToken, PhoneErrorStats] = field(default_factory=dict)
    tally: ErrorTally | None = None

    def __post_init__(self) -> None:
        self.condition = Condition(self.condition)
        if not self.corpus_pter >= 0:
            raise ValueError(f"corpus PTER must be >= 0, got {self.corpus_pter}")

    def phone_pter(self, token: PhoneticToken) -> float | None:
        stats = self.phone_stats.get(token)
        return None if stats is None else stats.pter


@dataclass
class ExperimentTable:
    rows: dict[tuple[str, Condition], ConditionScores] = field(default_factory=dict)
    inventories: list[LanguageInventory] = field(default_factory=list)

    def add(self, scores: ConditionScores) -> None:
        key = (scores.language, scores.condition)
        if key in self.rows:
            raise ConfigurationError(f"duplicate row for {key[0]}/{key[1].value}")
        self.rows[key] = scores

    def languages(self) -> list[str]:
        return sorted({lang for lang, _ in self.rows})

    def get(self, language: str, condition: Condition | str) -> ConditionScores:
        condition = Condition(condition)
        try:
            return self.rows[(language, condition)]
        except KeyError:
            raise ConfigurationError(
                f"no {condition.value} scores for language {language!r}"
            ) from None

    def has(self, language: str, condition: Condition | str) -> bool:
        return (language, Condition(condition)) in self.rows


@dataclass(frozen=True)
class BoxplotStats:
    n: int
    median: float
    q1: float
    q3: float
    iqd: float
    whisker_low: float
    whisker_high: float
    outliers: tuple[float, ...] = ()

    @classmethod
    def from_values(cls, values: Iterable[float], reach: float = WHISKER_REACH) -> BoxplotStats:
        """Linear-interpolated quartiles with Tukey whiskers at ``reach`` x IQD."""
        x = np.sort(np.asarray(list(values), dtype=float))
        if x.size == 0:
            raise ValueError("no values")
        q1, med, q3 = (float(v) for v in np.percentile(x, [25, 50, 75]))
        iqd = q3 - q1
        lo, hi = q1 - reach * iqd, q3 + reach * iqd
        inside = x[(x >= lo) & (x <= hi)]
        outliers = tuple(float(v) for v in x[(x < lo) | (x > hi)])
        return cls(int(x.size), med, q1, q3, iqd, float(inside.min()), float(inside.max()), outliers)


def absolute_improvement(base: float | None, other: float | None) -> float | None:
    """Improvement of ``other`` over ``base`` in percentage points.

    Rates are ratios. Returns None (skip) when either rate is undefined.
    """
    if base is None or other is None:
        return None
    return (base - other) * 100.0


def relative_improvement(base: float, other: float) -> float:
    if base == 0:
        raise UndefinedRateError("relative improvement over a zero base rate")
    return 100.0 * (base - other) / base


def is_stable(mono_pp: float, cross_pp: float, multi_pp: float, threshold_pp: float) -> bool:
    return abs(cross_pp - mono_pp) <= threshold_pp and abs(multi_pp - mono_pp) <= threshold_pp


@dataclass(frozen=True)
class ImprovementPoint:
    language: str
    token: PhoneticToken
    sharing_count: int
    raw_pp: float
    clipped_pp: float


def _eligible(stats: PhoneErrorStats, min_ref_count: int) -> bool:
    if stats.pter is None:
        return False
    # precomputed rates may come without counts
    return (stats.reported_pter is not None and stats.ref_count == 0) or stats.ref_count >= min_ref_count


def improvement_points(
    table: ExperimentTable,
    from_: Condition | str = Condition.MONO,
    to: Condition | str = Condition.MULTI,
    *,
    clip_floor: float = DEFAULT_CLIP_FLOOR,
    min_ref_count: int = 1,
) -> tuple[list[ImprovementPoint], int]:
    """One clipped absolute improvement per (language, token); also the skip count."""
    sharing = sharing_counts(table.inventories)
    points: list[ImprovementPoint] = []
    skipped = 0
    for language in table.languages():
        if not table.has(language, from_):
            continue
        base_row, other_row = table.get(language, from_), table.get(language, to)
        for token, stats in sorted(base_row.phone_stats.items()):
            if not _eligible(stats, min_ref_count):
                continue
            delta = absolute_improvement(stats.pter, other_row.phone_pter(token))
            if delta is None:
                skipped += 1
                continue
            points.append(
                ImprovementPoint(
                    language,
                    token,
                    sharing.get(token, 0),
                    delta,
                    clip_improvement(delta, clip_floor),
                )
            )
    return points, skipped


def improvement_by_sharing_count(
    table: ExperimentTable,
    from_: Condition | str = Condition.MONO,
    to: Condition | str = Condition.MULTI,
    *,
    clip_floor: float = DEFAULT_CLIP_FLOOR,
    min_ref_count: int = 1,
) -> dict[int, BoxplotStats]:
    points, _ = improvement_points(
        table, from_, to, clip_floor=clip_floor, min_ref_count=min_ref_count
    )
    bins: dict[int, list[float]] = defaultdict(list)
    for p in points:
        bins[p.sharing_count].append(p.clipped_pp)
    return {k: BoxplotStats.from_values(v) for k, v in sorted(bins.items())}


def feature_group_values(
    table: ExperimentTable,
    axis: str,
    from_: Condition | str = Condition.MONO,
    to: Condition | str = Condition.MULTI,
    features: FeatureTable | None = None,
    *,
    permissive: bool = False,
) -> dict[str, list[float]]:
    """Per-(language, phone) relative improvements grouped by category.

    Base symbols missing from the feature table raise ``UnknownPhoneError``,
    or are skipped with a warning when ``permissive`` is set.
    """
    features = features or default_table()
    groups: dict[str, list[float]] = defaultdict(list)
    for language in table.languages():
        if not table.has(language, from_):
            continue
        base_row, other_row = table.get(language, from_), table.get(language, to)
        for token, stats in sorted(base_row.phone_stats.items()):
            if token.role is not Role.BASE:
                continue
            base, other = stats.pter, other_row.phone_pter(token)
            if base is None or other is None or base == 0:
                continue
            try:
                cat = category(lookup(token, features), axis)
            except UnknownPhoneError:
                if not permissive:
                    raise
                warnings.warn(f"{language}: no features for {token.text!r}", stacklevel=2)
                continue
            if cat is not None:
                groups[cat].append(relative_improvement(base, other))
    return dict(sorted(groups.items()))


def group_by_feature(
    table: ExperimentTable,
    axis: str,
    from_: Condition | str = Condition.MONO,
    to: Condition | str = Condition.MULTI,
    features: FeatureTable | None = None,
) -> dict[str, float]:
    """Mean relative improvement per manner or place category."""
    groups = feature_group_values(table, axis, from_, to, features)
    return {cat: math.fsum(v) / len(v) for cat, v in groups.items()}


def _complete_languages(table: ExperimentTable) -> list[str]:
    return [
        lang for lang in table.languages() if all(table.has(lang, c) for c in Condition)
    ]


def stability_counts(
    table: ExperimentTable, threshold_pp: float = DEFAULT_STABILITY_THRESHOLD
) -> dict[PhoneticToken, tuple[frozenset[str], frozenset[str]]]:
    """For each token: (languages where stable, languages evaluated)."""
    stable: dict[PhoneticToken, set[str]] = defaultdict(set)
    evaluated: dict[PhoneticToken, set[str]] = defaultdict(set)
    for lang in _complete_languages(table):
        mono = table.get(lang, Condition.MONO)
        cross = table.get(lang, Condition.CROSS)
        multi = table.get(lang, Condition.MULTI)
        for token, stats in mono.phone_stats.items():
            m, c, u = stats.pter, cross.phone_pter(token), multi.phone_pter(token)
            if m is None or c is None or u is None:
                continue
            evaluated[token].add(lang)
            if is_stable(m * 100, c * 100, u * 100, threshold_pp):
                stable[token].add(lang)
    return {
        tok: (frozenset(stable[tok]), frozenset(langs)) for tok, langs in sorted(evaluated.items())
    }


def stability_filter(
    table: ExperimentTable, threshold_pp: float = DEFAULT_STABILITY_THRESHOLD
) -> dict[PhoneticToken, frozenset[str]]:
    """Languages in which each token's PTER stays within ``threshold_pp`` of mono.

    Only languages with all three conditions are considered.
    """
    return {tok: s for tok, (s, _) in stability_counts(table, threshold_pp).items()}


def cross_language_distribution(
    table: ExperimentTable, min_languages: int = DEFAULT_MIN_LANGUAGES
) -> dict[tuple[PhoneticToken, Condition], BoxplotStats]:
    sharing = sharing_counts(table.inventories)
    out: dict[tuple[PhoneticToken, Condition], BoxplotStats] = {}
    for token, count in sharing.items():
        if count < min_languages:
            continue
        for cond in Condition:
            values = [
                rate * 100
                for lang in table.languages()
                if table.has(lang, cond)
                and (rate := table.get(lang, cond).phone_pter(token)) is not None
            ]
            if values:
                out[(token, cond)] = BoxplotStats.from_values(values)
    return out


def corpus_improvements(
    table: ExperimentTable,
    from_: Condition | str = Condition.MONO,
    to: Condition | str = Condition.MULTI,
) -> dict[str, float | None]:
    """Relative corpus-level improvement per language, in percent.

    None where the base rate is zero and the ratio is undefined.
    """
    out: dict[str, float | None] = {}
    for lang in table.languages():
        if table.has(lang, from_) and table.has(lang, to):
            base, other = table.get(lang, from_).corpus_pter, table.get(lang, to).corpus_pter
            out[lang] = relative_improvement(base, other) if base > 0 else None
    return out
