"""Per-language token inventories built from reference transcripts."""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from pterkit.ipa_core import PhoneticToken, Role, TokenSequence
from pterkit.phonology import FeatureTable, UnknownPhoneError, default_table


@dataclass
class LanguageInventory:
    language: str
    tokens: Counter = field(default_factory=Counter)
    vowel_symbols: set[str] = field(default_factory=set)
    consonant_symbols: set[str] = field(default_factory=set)
    modifier_symbols: set[str] = field(default_factory=set)
    # base symbols without a feature table entry (permissive mode only)
    unclassified_symbols: set[str] = field(default_factory=set)

    def __contains__(self, token: PhoneticToken) -> bool:
        return self.tokens.get(token, 0) > 0

    @property
    def n_vowels(self) -> int:
        return len(self.vowel_symbols)

    @property
    def n_consonants(self) -> int:
        return len(self.consonant_symbols)


def build_inventory(
    refs: Iterable[TokenSequence],
    language: str,
    table: FeatureTable | None = None,
    *,
    permissive: bool = False,
) -> LanguageInventory:
    """Count reference tokens and split base symbols into vowels and consonants.

    Modifiers are counted in ``tokens`` but kept out of the vowel and
    consonant symbol sets.
    """
    table = table or default_table()
    inv = LanguageInventory(language)
    for seq in refs:
        inv.tokens.update(seq.tokens)
    for tok in inv.tokens:
        if tok.role is not Role.BASE:
            inv.modifier_symbols.add(tok.text)
            continue
        features = table.entries.get(tok.text)
        if features is None:
            if not permissive:
                raise UnknownPhoneError(tok.text)
            warnings.warn(f"{language}: no features for {tok.text!r}", stacklevel=2)
            inv.unclassified_symbols.add(tok.text)
        elif features.is_vowel:
            inv.vowel_symbols.add(tok.text)
        else:
            inv.consonant_symbols.add(tok.text)
    return inv


def sharing_count(token: PhoneticToken, inventories: Sequence[LanguageInventory]) -> int:
    """Number of languages whose references contain the token."""
    return sum(token in inv for inv in inventories)


def sharing_counts(inventories: Sequence[LanguageInventory]) -> dict[PhoneticToken, int]:
    counts: Counter = Counter()
    for inv in inventories:
        counts.update(t for t, n in inv.tokens.items() if n > 0)
    return dict(sorted(counts.items()))


def unique_phones(inventories: Sequence[LanguageInventory]) -> dict[str, set[PhoneticToken]]:
    """Tokens found in exactly one language, keyed by that language."""
    counts = sharing_counts(inventories)
    return {
        inv.language: {t for t, n in inv.tokens.items() if n > 0 and counts[t] == 1}
        for inv in inventories
    }
