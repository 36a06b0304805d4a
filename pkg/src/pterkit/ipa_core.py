"""Normalization and segmentation of IPA text into phonetic tokens.

Every base letter, diacritic, length mark and stress mark is its own token.
A maximal run of Chao tone letters (e.g. ``˥˥``) is kept as one token so
that contour tones stay atomic.
"""

from __future__ import annotations

import enum
import logging
import unicodedata
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

logger = logging.getLogger(__name__)

TIE_BARS = frozenset("͜͡")
TONE_LETTERS = frozenset(chr(c) for c in range(0x02E5, 0x02EA))
LENGTH_MARKS = frozenset("ːˑ")
STRESS_MARKS = frozenset("ˈˌ")
# word boundary marker accepted in pre-tokenized payloads
SEPARATOR = "|"

_EXTRA_LETTERS = frozenset("æçðøħŋœǀǁǂǃβθχᵻᵿᶑⱱ")

_MODIFIER_RANGES = (
    (0x02B0, 0x02FF),  # spacing modifier letters
    (0x0300, 0x036F),  # combining diacritical marks
    (0x1AB0, 0x1AFF),  # combining diacritical marks extended
    (0x1D2C, 0x1D6A),  # superscript modifier letters
    (0x1D9B, 0x1DBF),
    (0x1DC0, 0x1DFF),  # combining diacritical marks supplement
    (0x207F, 0x207F),  # superscript n
)


class Role(str, enum.Enum):
    BASE = "base"
    DIACRITIC = "diacritic"
    TONE_CONTOUR = "tone_contour"
    STRESS = "stress"
    LENGTH = "length"
    SEPARATOR = "separator"


class IPAEncodingError(ValueError):
    def __init__(self, offset: int, reason: str = "invalid UTF-8") -> None:
        super().__init__(f"{reason} at byte offset {offset}")
        self.offset = offset


class UnknownSymbolError(ValueError):
    """A codepoint outside the known IPA repertoire."""

    def __init__(self, symbol: str, offset: int) -> None:
        super().__init__(
            f"unknown IPA symbol {symbol!r} (U+{ord(symbol):04X}) at offset {offset}"
        )
        self.symbol = symbol
        self.offset = offset


def _in_modifier_ranges(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _MODIFIER_RANGES)


def is_known_symbol(ch: str) -> bool:
    """True when a single codepoint belongs to the supported IPA repertoire."""
    cp = ord(ch)
    if "a" <= ch <= "z":
        return True
    if 0x0250 <= cp <= 0x02AF:  # IPA extensions
        return True
    return ch in _EXTRA_LETTERS or _in_modifier_ranges(ch)


def _char_role(ch: str) -> Role:
    if ch in TONE_LETTERS:
        return Role.TONE_CONTOUR
    if ch in LENGTH_MARKS:
        return Role.LENGTH
    if ch in STRESS_MARKS:
        return Role.STRESS
    if unicodedata.category(ch) in ("Mn", "Lm", "Sk"):
        return Role.DIACRITIC
    return Role.BASE


@dataclass(frozen=True, order=True)
class PhoneticToken:
    text: str
    role: Role = field(compare=False)

    def __post_init__(self) -> None:
        if not self.text or any(ch.isspace() for ch in self.text):
            raise ValueError(f"invalid token text {self.text!r}")

    @classmethod
    def of(cls, text: str) -> PhoneticToken:
        """Build a token from its text, classifying the role."""
        return cls(text, _classify_text(text))

    @property
    def is_modifier(self) -> bool:
        return self.role in (Role.DIACRITIC, Role.TONE_CONTOUR, Role.LENGTH, Role.STRESS)

    def __str__(self) -> str:
        return self.text


def _classify_text(text: str) -> Role:
    if text == SEPARATOR:
        return Role.SEPARATOR
    if text and all(ch in TONE_LETTERS for ch in text):
        return Role.TONE_CONTOUR
    if len(text) == 1:
        if is_known_symbol(text):
            return _char_role(text)
    elif text and all(is_known_symbol(ch) and _char_role(ch) is Role.BASE for ch in text):
        # multi-letter unit from an external vocabulary, e.g. "tʃ"
        return Role.BASE
    warnings.warn(f"unknown pre-tokenized symbol {text!r} classified as base", stacklevel=3)
    return Role.BASE


def classify_token(token: PhoneticToken | str) -> Role:
    text = token.text if isinstance(token, PhoneticToken) else token
    return _classify_text(text)


@dataclass(frozen=True)
class TokenSequence:
    """Tokens of one utterance.

    ``breaks`` holds the indices of tokens that start a new word, so the
    separators dropped during tokenization can be restored.
    """

    utterance_id: str
    tokens: tuple[PhoneticToken, ...]
    breaks: tuple[int, ...] = ()
    was_normalized: bool = False

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[PhoneticToken]:
        return iter(self.tokens)

    def texts(self) -> list[str]:
        return [t.text for t in self.tokens]

    def text(self) -> str:
        """Join token texts, restoring single separators at word boundaries."""
        out: list[str] = []
        starts = set(self.breaks)
        for i, tok in enumerate(self.tokens):
            if i in starts:
                out.append(" ")
            out.append(tok.text)
        return "".join(out)

    def pretokenized(self) -> str:
        """Space-separated tokens with ``|`` at word boundaries."""
        out: list[str] = []
        starts = set(self.breaks)
        for i, tok in enumerate(self.tokens):
            if i in starts:
                out.append(SEPARATOR)
            out.append(tok.text)
        return " ".join(out)


def normalize(raw: str | bytes) -> str:
    """Canonical decomposition, tie bars removed, whitespace collapsed."""
    if isinstance(raw, (bytes, bytearray)):
        try:
            raw = bytes(raw).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise IPAEncodingError(exc.start) from None
    text = unicodedata.normalize("NFD", raw)
    text = "".join(ch for ch in text if ch not in TIE_BARS)
    return unicodedata.normalize("NFD", " ".join(text.split()))


def tokenize(
    text: str, utterance_id: str = "", *, permissive: bool = False
) -> TokenSequence:
    """Segment IPA text into phonetic tokens.

    Unknown codepoints raise ``UnknownSymbolError`` unless ``permissive`` is
    set, in which case they are passed through as base tokens with a warning.
    """
    normalized = normalize(text)
    was_normalized = normalized != text
    if was_normalized:
        logger.debug("input for %r was not normalized", utterance_id)

    tokens: list[PhoneticToken] = []
    breaks: list[int] = []
    i, n = 0, len(normalized)
    while i < n:
        ch = normalized[i]
        if ch == " ":
            if tokens:
                breaks.append(len(tokens))
            i += 1
            continue
        if ch in TONE_LETTERS:
            j = i
            while j < n and normalized[j] in TONE_LETTERS:
                j += 1
            tokens.append(PhoneticToken(normalized[i:j], Role.TONE_CONTOUR))
            i = j
            continue
        if is_known_symbol(ch):
            role = _char_role(ch)
        elif permissive:
            warnings.warn(str(UnknownSymbolError(ch, i)), stacklevel=2)
            role = Role.BASE
        else:
            raise UnknownSymbolError(ch, i)
        tokens.append(PhoneticToken(ch, role))
        i += 1
    return TokenSequence(utterance_id, tuple(tokens), tuple(breaks), was_normalized)


def from_token_texts(texts: Iterable[str], utterance_id: str = "") -> TokenSequence:
    """Build a sequence from already-split token texts.

    A literal ``|`` marks a word boundary and is not kept as a token.
    """
    tokens: list[PhoneticToken] = []
    breaks: list[int] = []
    for text in texts:
        if text == SEPARATOR:
            if tokens and (not breaks or breaks[-1] != len(tokens)):
                breaks.append(len(tokens))
            continue
        tokens.append(PhoneticToken.of(text))
    if breaks and breaks[-1] == len(tokens):
        breaks.pop()
    return TokenSequence(utterance_id, tuple(tokens), tuple(breaks))


def group_phones(tokens: Sequence[PhoneticToken]) -> list[tuple[PhoneticToken, ...]]:
    """Group tokens into phones: a base followed by its modifiers.

    Stress marks precede the syllable they mark, so they are carried over to
    the next base. Modifiers with no preceding base form their own group.
    """
    groups: list[list[PhoneticToken]] = []
    pending: list[PhoneticToken] = []
    for tok in tokens:
        if tok.role is Role.SEPARATOR:
            continue
        if tok.role is Role.STRESS:
            pending.append(tok)
        elif tok.role is Role.BASE:
            groups.append([tok, *pending])
            pending = []
        elif groups:
            groups[-1].append(tok)
        else:
            groups.append([tok])
    if pending:
        groups.append(pending)
    return [tuple(g) for g in groups]
