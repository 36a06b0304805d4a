from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_force_edit_cost, replay_counts
from pterkit.alignment import (
    EditKind,
    EditStep,
    ErrorTally,
    InvariantViolation,
    PhoneErrorStats,
    UndefinedRateError,
    align,
    clip_improvement,
    merge,
    per_phone_stats,
    pter,
    tally,
)
from pterkit.ipa_core import PhoneticToken, from_token_texts, tokenize

C, S, D, I = EditKind.CORRECT, EditKind.SUBSTITUTE, EditKind.DELETE, EditKind.INSERT


def toks(s: str) -> list[PhoneticToken]:
    return [PhoneticToken.of(c) for c in s]


def kinds(a) -> list[EditKind]:
    return [s.kind for s in a.steps]


def test_tone_contour_deleted_not_substituted():
    a = align(tokenize("a˥˥"), tokenize("a"))
    assert kinds(a) == [C, D] and a.cost == 1
    assert a.steps[1].ref_token.text == "˥˥"
    assert tally(a) == ErrorTally(n_ref=2, correct=1, sub=0, dels=1, ins=0)


def test_identity_and_single_substitution():
    a = align(toks("pa"), toks("pa"))
    assert kinds(a) == [C, C] and a.cost == 0
    a = align(toks("pat"), toks("pet"))
    assert kinds(a) == [C, S, C] and a.cost == 1
    assert (a.steps[1].ref_token.text, a.steps[1].hyp_token.text) == ("a", "e")


def test_tie_break_prefers_substitution_then_deletion():
    # "ab" vs "b": deleting a is the only optimal script
    assert kinds(align(toks("ab"), toks("b"))) == [D, C]
    # "ab" vs "ba" has cost 2; substitutions beat delete+insert
    assert kinds(align(toks("ab"), toks("ba"))) == [S, S]
    # from the end, deletion is preferred over insertion
    assert kinds(align(toks("a"), toks("b"))) == [S]
    assert kinds(align(toks("aa"), toks("b"))) == [D, S]


def test_empty_cases():
    assert tally(align([], [])) == ErrorTally()
    t = tally(align([], toks("a")))
    assert t.n_ref == 0 and t.ins == 1
    with pytest.raises(UndefinedRateError):
        pter(t)


def test_merge_and_pter():
    assert merge([]) == ErrorTally()
    total = merge([ErrorTally(2, 1, 0, 1, 0), ErrorTally(3, 3, 0, 0, 0)])
    assert total == ErrorTally(n_ref=5, correct=4, sub=0, dels=1, ins=0)
    assert pter(ErrorTally(4, 3, 1, 0, 1)) == 0.5
    assert pter(tally(align(toks("pat"), toks("pat")))) == 0.0
    assert pter(tally(align(toks("pata"), []))) == 1.0


def test_tally_rejects_inconsistent_counts():
    with pytest.raises(ValueError):
        ErrorTally(n_ref=3, correct=1)
    with pytest.raises(ValueError):
        EditStep(C, PhoneticToken.of("a"), PhoneticToken.of("e"))
    with pytest.raises(ValueError):
        EditStep(D, hyp_token=PhoneticToken.of("a"))


def test_per_phone_substitution_attribution():
    stats = per_phone_stats([align(toks("a"), toks("e"))])
    a, e = stats[PhoneticToken.of("a")], stats[PhoneticToken.of("e")]
    assert (a.ref_count, a.sub_out, a.pter) == (1, 1, 1.0)
    assert (e.ref_count, e.sub_in, e.pter) == (0, 1, None)
    mirrored = per_phone_stats([align(toks("ae"), toks("ee"))], mirror_substitutions=True)
    assert mirrored[PhoneticToken.of("e")].pter == 1.0


def test_insertions_can_push_pter_above_one():
    s = PhoneErrorStats(PhoneticToken.of("a"), ref_count=2, correct=2, ins=5)
    assert s.pter == 2.5
    with pytest.raises(InvariantViolation):
        PhoneErrorStats(PhoneticToken.of("a"), ref_count=2, correct=1).check()


@pytest.mark.parametrize("delta, expected", [(-250, -100), (37, 37), (-100, -100)])
def test_clip_improvement(delta, expected):
    assert clip_improvement(delta, -100) == expected


def test_clip_floor_must_not_be_positive():
    with pytest.raises(ValueError):
        clip_improvement(5, floor=1)


def test_pretty_rendering():
    text = align(toks("pat"), toks("pet")).pretty()
    lines = text.splitlines()
    assert lines[0] == "REF: p a t"
    assert lines[1] == "HYP: p e t"
    assert lines[2].strip() == "S"


_seq = st.lists(st.sampled_from(toks("abcd")), max_size=6)


@settings(max_examples=300, deadline=None)
@given(_seq, _seq, _seq)
def test_metric_properties(x, y, z):
    a = align(x, y)
    assert a.cost == brute_force_edit_cost(x, y)
    assert a.ref_tokens() == x and a.hyp_tokens() == y
    assert align(x, x).cost == 0
    b = align(y, x)
    assert b.cost == a.cost
    ta, tb = tally(a), tally(b)
    # swapping the roles turns deletions into insertions
    assert (ta.errors, tb.errors) == (a.cost, b.cost)
    assert ta.dels - ta.ins == tb.ins - tb.dels
    assert align(x, z).cost <= a.cost + align(y, z).cost


def test_per_phone_counts_match_step_replay():
    rng = random.Random(3)
    alignments = []
    for _ in range(200):
        x = from_token_texts(rng.choices(list("ptkaeiː"), k=rng.randint(0, 8)))
        y = from_token_texts(rng.choices(list("ptkaeiuː"), k=rng.randint(0, 8)))
        alignments.append(align(x, y))
    stats = per_phone_stats(alignments)
    replay = replay_counts(alignments)
    assert {t.text for t in stats} == set(replay)
    for tok, s in stats.items():
        r = replay[tok.text]
        assert (s.ref_count, s.correct, s.sub_out, s.dels, s.ins, s.sub_in) == (
            r["ref"], r["correct"], r["sub_out"], r["dels"], r["ins"], r["sub_in"]
        )
    total = merge(tally(a) for a in alignments)
    assert total.n_ref == sum(s.ref_count for s in stats.values())
    assert total.ins == sum(s.ins for s in stats.values())
    assert total.sub == sum(s.sub_in for s in stats.values())
