from __future__ import annotations

import unicodedata

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pterkit.ipa_core import (
    IPAEncodingError,
    PhoneticToken,
    Role,
    UnknownSymbolError,
    classify_token,
    from_token_texts,
    group_phones,
    normalize,
    tokenize,
)


def texts(s: str) -> list[str]:
    return tokenize(s).texts()


@pytest.mark.parametrize(
    "raw, expected",
    [("t͡ʃ", "tʃ"), ("t͜ʃ", "tʃ"), ("a", "a"), ("aː  b", "aː b"), ("  a\tb \n", "a b")],
)
def test_normalize(raw, expected):
    assert normalize(raw) == expected


def test_normalize_decomposes_precomposed_letters():
    assert normalize("é") == "é"
    assert normalize("ç") == "ç"
    assert texts("ã") == ["a", "̃"]


def test_normalize_bytes_and_bad_encoding():
    assert normalize("aː".encode()) == "aː"
    with pytest.raises(IPAEncodingError) as exc:
        normalize(b"ab\xffc")
    assert exc.value.offset == 2
    assert "2" in str(exc.value)


@pytest.mark.parametrize(
    "raw, expected",
    [
        ("tʃʼ", ["t", "ʃ", "ʼ"]),
        ("aː", ["a", "ː"]),
        ("a˥˥i", ["a", "˥˥", "i"]),
        ("", []),
        ("ˈpa˧˥", ["ˈ", "p", "a", "˧˥"]),
        ("t͡ʃa", ["t", "ʃ", "a"]),
    ],
)
def test_tokenize_examples(raw, expected):
    assert texts(raw) == expected


def test_tokenize_roles():
    seq = tokenize("ˈkʰaː˥˩")
    assert [t.role for t in seq] == [
        Role.STRESS, Role.BASE, Role.DIACRITIC, Role.BASE, Role.LENGTH, Role.TONE_CONTOUR,
    ]


def test_tone_runs_split_by_space_stay_apart():
    seq = tokenize("a˥ ˩")
    assert seq.texts() == ["a", "˥", "˩"]
    assert seq.breaks == (2,)
    assert seq.text() == "a˥ ˩"


def test_word_breaks_restore_single_spaces():
    seq = tokenize("  pa   ta ")
    assert seq.breaks == (2,)
    assert seq.text() == "pa ta"
    assert seq.pretokenized() == "p a | t a"


def test_unknown_symbol_strict_and_permissive():
    with pytest.raises(UnknownSymbolError) as exc:
        tokenize("pa7")
    assert exc.value.symbol == "7" and exc.value.offset == 2
    assert "U+0037" in str(exc.value)
    with pytest.warns(UserWarning):
        seq = tokenize("pa7", permissive=True)
    assert seq.texts() == ["p", "a", "7"]
    assert seq.tokens[-1].role is Role.BASE


def test_was_normalized_flag():
    assert not tokenize("pa").was_normalized
    assert tokenize("t͡ʃ").was_normalized


@pytest.mark.parametrize(
    "text, role",
    [("ˈ", Role.STRESS), ("˨˨", Role.TONE_CONTOUR), ("ʼ", Role.DIACRITIC), ("ː", Role.LENGTH),
     ("p", Role.BASE), ("|", Role.SEPARATOR), ("̃", Role.DIACRITIC), ("tʃ", Role.BASE)],
)
def test_classify_token(text, role):
    assert classify_token(text) is role
    assert classify_token(PhoneticToken(text, Role.BASE)) is role


def test_classify_unknown_pretokenized_symbol_warns():
    with pytest.warns(UserWarning):
        assert classify_token("7") is Role.BASE


def test_token_equality_ignores_role():
    assert PhoneticToken("a", Role.BASE) == PhoneticToken("a", Role.DIACRITIC)
    with pytest.raises(ValueError):
        PhoneticToken("a b", Role.BASE)


def test_from_token_texts():
    seq = from_token_texts("t ʃ ʼ".split(), "u")
    assert seq.texts() == ["t", "ʃ", "ʼ"] and seq.breaks == ()
    seq = from_token_texts("| p a | | t a |".split())
    assert seq.texts() == ["p", "a", "t", "a"]
    assert seq.breaks == (2,)


def test_group_phones():
    groups = group_phones(tokenize("ˈkʰaː˥ ˨").tokens)
    assert [[t.text for t in g] for g in groups] == [["k", "ˈ", "ʰ"], ["a", "ː", "˥", "˨"]]
    orphan = group_phones(tokenize("˥pa").tokens)
    assert [t.text for t in orphan[0]] == ["˥"]
    trailing = group_phones(tokenize("paˈ").tokens)
    assert [t.text for t in trailing[-1]] == ["ˈ"]


_PIECES = st.sampled_from(
    list("ptkdgmnsʃʒaeiouəɛɔŋɬǃ") + ["é", "ç", "ʰ", "ʼ", "ʲ", "̃", "̥", "ː", "ˈ", "ˌ",
                                     "˥", "˧˥", "˨˩˦", " ", "\t", "͡"]
)


@settings(max_examples=300, deadline=None)
@given(st.lists(_PIECES, max_size=15).map("".join))
def test_round_trip_properties(s):
    norm = normalize(s)
    seq = tokenize(s)
    assert seq.text() == norm
    again = tokenize(seq.text())
    assert again.tokens == seq.tokens and again.breaks == seq.breaks
    assert sum(len(t) for t in seq.texts()) == len(norm.replace(" ", ""))
    assert unicodedata.is_normalized("NFD", norm)
    # byte-identical inputs, identical outputs
    assert tokenize(s.encode().decode()).texts() == seq.texts()
    assert from_token_texts(seq.pretokenized().split()).tokens == seq.tokens
