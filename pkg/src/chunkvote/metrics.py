"""Chunk level evaluation: precision, recall and the F rate.

All scoring is by exact span matching: a predicted chunk is correct when a
gold chunk with the same begin, end and label exists in the same sentence,
and each gold chunk can be matched at most once.  Counts are kept per label
and overall; rates are derived from the counts on demand.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .corpus import (
    PLACEHOLDER_WORD,
    ChunkSpan,
    Corpus,
    NestedSentence,
    extract_chunks,
)
from .errors import AlignmentError, ValidationError


def f_beta(precision: float, recall: float, beta: float = 1.0) -> float:
    """Weighted harmonic mean of precision and recall, 0 when both are 0.

    ``beta`` > 1 favours recall, ``beta`` < 1 favours precision.
    """
    if precision + recall == 0:
        return 0.0
    b2 = beta * beta
    return (b2 + 1) * precision * recall / (b2 * precision + recall)


@dataclass(frozen=True)
class Counts:
    """Found, gold and correct chunk counts for one label or overall."""

    found: int = 0
    gold: int = 0
    correct: int = 0

    @property
    def precision(self) -> float:
        return self.correct / self.found if self.found else 0.0

    @property
    def recall(self) -> float:
        return self.correct / self.gold if self.gold else 0.0

    def f(self, beta: float = 1.0) -> float:
        return f_beta(self.precision, self.recall, beta)


@dataclass(frozen=True)
class EvalReport:
    overall: Counts
    per_label: Mapping[str, Counts] = field(default_factory=dict)
    beta: float = 1.0

    @property
    def precision(self) -> float:
        return self.overall.precision

    @property
    def recall(self) -> float:
        return self.overall.recall

    @property
    def f_rate(self) -> float:
        return self.overall.f(self.beta)


def _score_span_lists(
    gold: Sequence[Sequence[ChunkSpan]],
    pred: Sequence[Sequence[ChunkSpan]],
    beta: float,
) -> EvalReport:
    if len(gold) != len(pred):
        raise AlignmentError(f"gold has {len(gold)} sentences, predictions have {len(pred)}")
    tallies: dict[str, list[int]] = {}

    def tally(label: str) -> list[int]:
        return tallies.setdefault(label, [0, 0, 0])

    for gold_spans, pred_spans in zip(gold, pred):
        gold_counts = Counter(gold_spans)
        pred_counts = Counter(pred_spans)
        for span, n in pred_counts.items():
            tally(span.label)[0] += n
        for span, n in gold_counts.items():
            tally(span.label)[1] += n
        for span, n in pred_counts.items():
            tally(span.label)[2] += min(n, gold_counts.get(span, 0))
    per_label = {label: Counts(*t) for label, t in sorted(tallies.items())}
    overall = Counts(
        sum(c.found for c in per_label.values()),
        sum(c.gold for c in per_label.values()),
        sum(c.correct for c in per_label.values()),
    )
    return EvalReport(overall, per_label, beta)


def score_chunks(
    gold: Sequence[Sequence[ChunkSpan]],
    pred: Sequence[Sequence[ChunkSpan]],
    beta: float = 1.0,
) -> EvalReport:
    """Score predicted spans against gold spans, sentence by sentence."""
    return _score_span_lists(gold, pred, beta)


def _words_compatible(a: str, b: str) -> bool:
    return a == b or PLACEHOLDER_WORD in (a, b)


def score_tagged(gold: Corpus, pred: Corpus, beta: float = 1.0) -> EvalReport:
    """Score two tagged corpora over the same token sequence.

    Illegal tag sequences on either side are repaired during chunk
    extraction, so raw system output never crashes the scorer.
    """
    if len(gold.sentences) != len(pred.sentences):
        raise AlignmentError(
            f"gold has {len(gold.sentences)} sentences, predictions have {len(pred.sentences)}"
        )
    gold_spans: list[list[ChunkSpan]] = []
    pred_spans: list[list[ChunkSpan]] = []
    for si, (gs, ps) in enumerate(zip(gold.sentences, pred.sentences), start=1):
        if len(gs) != len(ps):
            raise AlignmentError(f"sentence {si}: {len(gs)} gold tokens vs {len(ps)} predicted")
        for ti, (gt, pt) in enumerate(zip(gs.tokens, ps.tokens), start=1):
            if not _words_compatible(gt.word, pt.word):
                raise AlignmentError(f"sentence {si}, token {ti}: word {gt.word!r} vs {pt.word!r}")
        for name, sentence in (("gold", gs), ("predicted", ps)):
            if any(tag is None for tag in sentence.chunk_tags):
                raise ValidationError(f"sentence {si}: {name} side has untagged tokens")
        gold_spans.append(extract_chunks(gs.chunk_tags))  # type: ignore[arg-type]
        pred_spans.append(extract_chunks(ps.chunk_tags))  # type: ignore[arg-type]
    return _score_span_lists(gold_spans, pred_spans, beta)


def score_nested(
    gold: Sequence[NestedSentence],
    pred: Sequence[NestedSentence],
    beta: float = 1.0,
) -> EvalReport:
    """Score nested bracketings by multiset span matching."""
    if len(gold) != len(pred):
        raise AlignmentError(f"gold has {len(gold)} sentences, predictions have {len(pred)}")
    for si, (gs, ps) in enumerate(zip(gold, pred), start=1):
        if len(gs) != len(ps):
            raise AlignmentError(f"sentence {si}: {len(gs)} gold tokens vs {len(ps)} predicted")
        for ti, (gt, pt) in enumerate(zip(gs.tokens, ps.tokens), start=1):
            if not _words_compatible(gt.word, pt.word):
                raise AlignmentError(f"sentence {si}, token {ti}: word {gt.word!r} vs {pt.word!r}")
    return _score_span_lists([s.spans for s in gold], [s.spans for s in pred], beta)


def format_report(report: EvalReport) -> str:
    """Human readable report: one line per label plus an overall line."""
    lines = []
    for label, counts in sorted(report.per_label.items()):
        lines.append(
            f"{label}: precision {100 * counts.precision:.2f}% "
            f"recall {100 * counts.recall:.2f}% F {100 * counts.f(report.beta):.2f}"
        )
    o = report.overall
    lines.append(
        f"overall: precision {100 * o.precision:.2f}% "
        f"recall {100 * o.recall:.2f}% F {100 * o.f(report.beta):.2f}"
    )
    return "\n".join(lines) + "\n"


def format_report_kv(report: EvalReport) -> str:
    """Machine readable key=value dump with exact counts and full rates."""
    lines = [f"beta={report.beta!r}"]

    def emit(prefix: str, counts: Counts) -> None:
        lines.append(f"{prefix}.found={counts.found}")
        lines.append(f"{prefix}.gold={counts.gold}")
        lines.append(f"{prefix}.correct={counts.correct}")
        lines.append(f"{prefix}.precision={counts.precision!r}")
        lines.append(f"{prefix}.recall={counts.recall!r}")
        lines.append(f"{prefix}.f={counts.f(report.beta)!r}")

    emit("overall", report.overall)
    for label, counts in sorted(report.per_label.items()):
        emit(f"label.{label}", counts)
    return "\n".join(lines) + "\n"
