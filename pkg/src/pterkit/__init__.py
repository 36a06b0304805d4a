"""Phonetic token error rate scoring and crosslingual transfer analysis."""

from pterkit.ipa_core import (
    PhoneticToken,
    Role,
    TokenSequence,
    UnknownSymbolError,
    classify_token,
    normalize,
    tokenize,
)
from pterkit.alignment import (
    Alignment,
    EditKind,
    EditStep,
    ErrorTally,
    PhoneErrorStats,
    UndefinedRateError,
    align,
    clip_improvement,
    merge,
    per_phone_stats,
    pter,
    tally,
)

__version__ = "0.1.0"

__all__ = [
    "Alignment",
    "EditKind",
    "EditStep",
    "ErrorTally",
    "PhoneErrorStats",
    "PhoneticToken",
    "Role",
    "TokenSequence",
    "UndefinedRateError",
    "UnknownSymbolError",
    "align",
    "classify_token",
    "clip_improvement",
    "merge",
    "normalize",
    "per_phone_stats",
    "pter",
    "tally",
    "tokenize",
]
