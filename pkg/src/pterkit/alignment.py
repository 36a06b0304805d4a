"""Token-level Levenshtein alignment and phonetic token error rate (PTER).

Every modifier is scored as a token of its own, so a vowel recognized
without its tone is one correct token plus one deletion.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, fields
from typing import Iterable, Sequence

from pterkit.ipa_core import PhoneticToken, TokenSequence

DEFAULT_CLIP_FLOOR = -100.0


class UndefinedRateError(ZeroDivisionError):
    pass


class InvariantViolation(AssertionError):
    pass


class EditKind(str, enum.Enum):
    CORRECT = "C"
    SUBSTITUTE = "S"
    DELETE = "D"
    INSERT = "I"


@dataclass(frozen=True)
class EditStep:
    kind: EditKind
    ref_token: PhoneticToken | None = None
    hyp_token: PhoneticToken | None = None

    def __post_init__(self) -> None:
        has_ref, has_hyp = self.ref_token is not None, self.hyp_token is not None
        if self.kind in (EditKind.CORRECT, EditKind.SUBSTITUTE):
            if not (has_ref and has_hyp):
                raise ValueError(f"{self.kind.name} needs both tokens")
            if (self.ref_token == self.hyp_token) != (self.kind is EditKind.CORRECT):
                raise ValueError(f"token texts inconsistent with {self.kind.name}")
        elif self.kind is EditKind.DELETE and (not has_ref or has_hyp):
            raise ValueError("DELETE carries only a reference token")
        elif self.kind is EditKind.INSERT and (has_ref or not has_hyp):
            raise ValueError("INSERT carries only a hypothesis token")


@dataclass(frozen=True)
class Alignment:
    utterance_id: str
    steps: tuple[EditStep, ...]
    cost: int

    def ref_tokens(self) -> list[PhoneticToken]:
        return [s.ref_token for s in self.steps if s.ref_token is not None]

    def hyp_tokens(self) -> list[PhoneticToken]:
        return [s.hyp_token for s in self.steps if s.hyp_token is not None]

    def pretty(self) -> str:
        """Three-row sclite-style rendering of the alignment."""
        ref_row, hyp_row, op_row = [], [], []
        for s in self.steps:
            r = s.ref_token.text if s.ref_token else "*"
            h = s.hyp_token.text if s.hyp_token else "*"
            w = max(len(r), len(h), 1)
            ref_row.append(r.ljust(w))
            hyp_row.append(h.ljust(w))
            op_row.append(("" if s.kind is EditKind.CORRECT else s.kind.value).ljust(w))
        return "\n".join(
            ["REF: " + " ".join(ref_row), "HYP: " + " ".join(hyp_row), "     " + " ".join(op_row)]
        )


def _tokens(seq: TokenSequence | Sequence[PhoneticToken]) -> tuple[PhoneticToken, ...]:
    return seq.tokens if isinstance(seq, TokenSequence) else tuple(seq)


def align(
    ref: TokenSequence | Sequence[PhoneticToken],
    hyp: TokenSequence | Sequence[PhoneticToken],
    utterance_id: str | None = None,
) -> Alignment:
    """Minimal unit-cost edit script between reference and hypothesis.

    The backtrace runs from the end of both sequences and prefers, among
    optimal moves, Correct over Substitute over Delete over Insert.
    """
    r, h = _tokens(ref), _tokens(hyp)
    if utterance_id is None:
        utterance_id = ref.utterance_id if isinstance(ref, TokenSequence) else ""
    nr, nh = len(r), len(h)

    dist = [[0] * (nh + 1) for _ in range(nr + 1)]
    for i in range(1, nr + 1):
        dist[i][0] = i
    for j in range(1, nh + 1):
        dist[0][j] = j
    for i in range(1, nr + 1):
        row, prev = dist[i], dist[i - 1]
        ri = r[i - 1]
        for j in range(1, nh + 1):
            diag = prev[j - 1] + (0 if ri == h[j - 1] else 1)
            row[j] = min(diag, prev[j] + 1, row[j - 1] + 1)

    steps: list[EditStep] = []
    i, j = nr, nh
    while i > 0 or j > 0:
        here = dist[i][j]
        if i > 0 and j > 0:
            same = r[i - 1] == h[j - 1]
            if same and dist[i - 1][j - 1] == here:
                steps.append(EditStep(EditKind.CORRECT, r[i - 1], h[j - 1]))
                i, j = i - 1, j - 1
                continue
            if not same and dist[i - 1][j - 1] + 1 == here:
                steps.append(EditStep(EditKind.SUBSTITUTE, r[i - 1], h[j - 1]))
                i, j = i - 1, j - 1
                continue
        if i > 0 and dist[i - 1][j] + 1 == here:
            steps.append(EditStep(EditKind.DELETE, ref_token=r[i - 1]))
            i -= 1
        else:
            steps.append(EditStep(EditKind.INSERT, hyp_token=h[j - 1]))
            j -= 1
    steps.reverse()
    return Alignment(utterance_id, tuple(steps), dist[nr][nh])


@dataclass(frozen=True)
class ErrorTally:
    n_ref: int = 0
    correct: int = 0
    sub: int = 0
    dels: int = 0
    ins: int = 0

    def __post_init__(self) -> None:
        if min(self.n_ref, self.correct, self.sub, self.dels, self.ins) < 0:
            raise ValueError("negative count in tally")
        if self.n_ref != self.correct + self.sub + self.dels:
            raise ValueError("n_ref must equal correct + sub + dels")

    @property
    def errors(self) -> int:
        return self.sub + self.dels + self.ins

    def __add__(self, other: ErrorTally) -> ErrorTally:
        return ErrorTally(
            *(getattr(self, f.name) + getattr(other, f.name) for f in fields(self))
        )


def tally(a: Alignment) -> ErrorTally:
    counts = {kind: 0 for kind in EditKind}
    for step in a.steps:
        counts[step.kind] += 1
    correct, sub, dels = counts[EditKind.CORRECT], counts[EditKind.SUBSTITUTE], counts[EditKind.DELETE]
    return ErrorTally(correct + sub + dels, correct, sub, dels, counts[EditKind.INSERT])


def merge(tallies: Iterable[ErrorTally]) -> ErrorTally:
    total = ErrorTally()
    for t in tallies:
        total = total + t
    return total


def pter(t: ErrorTally) -> float:
    """(sub + del + ins) / n_ref as a ratio; can exceed 1."""
    if t.n_ref == 0:
        raise UndefinedRateError("PTER is undefined for an empty reference")
    return t.errors / t.n_ref


@dataclass
class PhoneErrorStats:
    """Error counts attributed to one token.

    A substitution counts against the reference token (``sub_out``); the
    hypothesized token only records it in ``sub_in`` unless
    ``mirror_substitutions`` is set, which adds ``sub_in`` to its error count.
    ``reported_pter`` carries an externally supplied rate when the counts are
    not available.
    """

    token: PhoneticToken
    ref_count: int = 0
    correct: int = 0
    sub_out: int = 0
    dels: int = 0
    ins: int = 0
    sub_in: int = 0
    mirror_substitutions: bool = False
    reported_pter: float | None = None

    @property
    def errors(self) -> int:
        n = self.sub_out + self.dels + self.ins
        if self.mirror_substitutions:
            n += self.sub_in
        return n

    @property
    def pter(self) -> float | None:
        if self.reported_pter is not None:
            return self.reported_pter
        if self.ref_count == 0:
            return None
        return self.errors / self.ref_count

    def check(self) -> None:
        if self.reported_pter is None and self.ref_count != self.correct + self.sub_out + self.dels:
            raise InvariantViolation(f"conservation violated for {self.token.text!r}")


def per_phone_stats(
    alignments: Iterable[Alignment], *, mirror_substitutions: bool = False
) -> dict[PhoneticToken, PhoneErrorStats]:
    stats: dict[PhoneticToken, PhoneErrorStats] = {}

    def get(tok: PhoneticToken) -> PhoneErrorStats:
        s = stats.get(tok)
        if s is None:
            s = stats[tok] = PhoneErrorStats(tok, mirror_substitutions=mirror_substitutions)
        return s

    for a in alignments:
        for step in a.steps:
            if step.kind is EditKind.CORRECT:
                s = get(step.ref_token)
                s.ref_count += 1
                s.correct += 1
            elif step.kind is EditKind.SUBSTITUTE:
                s = get(step.ref_token)
                s.ref_count += 1
                s.sub_out += 1
                get(step.hyp_token).sub_in += 1
            elif step.kind is EditKind.DELETE:
                s = get(step.ref_token)
                s.ref_count += 1
                s.dels += 1
            else:
                get(step.hyp_token).ins += 1
    return dict(sorted(stats.items()))


def clip_improvement(delta_pp: float, floor: float = DEFAULT_CLIP_FLOOR) -> float:
    """Lower-bound an improvement in percentage points at ``floor``."""
    if floor > 0:
        raise ValueError("clip floor must be <= 0")
    return max(delta_pp, floor)
