"""Bottom-up parsing of nested chunks with a flat chunker.

A flat chunker only sees one level of structure.  To recover nesting,
each round tags the current token sequence, records the chunks found,
then collapses every chunk to its head token and runs again on the
shorter sequence.  Spans found on collapsed sequences are translated
back to positions in the original sentence through a collapse map.
The same collapsing, applied to a treebank, yields one flat training
sentence per nesting level.
"""

from __future__ import annotations

from typing import Callable, Sequence

from .corpus import (
    ChunkSpan,
    Corpus,
    NestedSentence,
    Sentence,
    TagScheme,
    Token,
    extract_chunks,
    strip_tags,
    tags_from_chunks,
    with_tags,
)
from .errors import ConfigError, ValidationError
from .features import WindowConfig
from .learners import TrainedModel, tag_sentence

HEAD_CHOICES = ("last", "first")

# original-token range, one entry per token of a collapsed sentence
CollapseMap = tuple[tuple[int, int], ...]


def identity_map(length: int) -> CollapseMap:
    return tuple((i, i + 1) for i in range(length))


def compose_maps(outer: CollapseMap, inner: CollapseMap) -> CollapseMap:
    """Map positions through ``inner`` first, then ``outer``.

    ``inner`` ranges index into the sequence that ``outer`` describes, so
    a composed entry covers the original tokens from the start of its
    first constituent to the end of its last.
    """
    composed = []
    for begin, end in inner:
        if not 0 <= begin < end <= len(outer):
            raise ValidationError(f"collapse range ({begin}, {end}) outside outer map")
        composed.append((outer[begin][0], outer[end - 1][1]))
    return tuple(composed)


def translate_span(span: ChunkSpan, mapping: CollapseMap) -> ChunkSpan:
    if not 0 <= span.begin < span.end <= len(mapping):
        raise ValidationError(f"span {span} outside collapse map")
    return ChunkSpan(mapping[span.begin][0], mapping[span.end - 1][1], span.label)


def collapse(
    sentence: Sentence,
    spans: Sequence[ChunkSpan],
    head: str = "last",
) -> tuple[Sentence, CollapseMap]:
    """Replace each chunk by its head token; other tokens pass through.

    The head keeps its word and pos.  Spans must be disjoint.  Returns
    the shorter sentence and a map from its positions to original token
    ranges.
    """
    if head not in HEAD_CHOICES:
        raise ConfigError(f"head must be one of {HEAD_CHOICES}, got {head!r}")
    ordered = sorted(spans, key=lambda s: s.begin)
    for left, right in zip(ordered, ordered[1:]):
        if right.begin < left.end:
            raise ValidationError(f"cannot collapse overlapping spans {left} and {right}")
    for span in ordered:
        if span.end > len(sentence):
            raise ValidationError(f"span {span} outside sentence of length {len(sentence)}")
    tokens: list[Token] = []
    mapping: list[tuple[int, int]] = []
    position = 0
    for span in ordered:
        while position < span.begin:
            old = sentence.tokens[position]
            tokens.append(Token(old.word, old.pos, None))
            mapping.append((position, position + 1))
            position += 1
        head_token = sentence.tokens[span.end - 1 if head == "last" else span.begin]
        tokens.append(Token(head_token.word, head_token.pos, None))
        mapping.append((span.begin, span.end))
        position = span.end
    while position < len(sentence):
        old = sentence.tokens[position]
        tokens.append(Token(old.word, old.pos, None))
        mapping.append((position, position + 1))
        position += 1
    return Sentence(tuple(tokens)), tuple(mapping)


def cascade_bracket(
    sentence: Sentence,
    tagger: TrainedModel | Callable[[Sentence], list[str]],
    max_depth: int = 5,
    head: str = "last",
    window: WindowConfig | None = None,
) -> NestedSentence:
    """Run a flat chunker repeatedly, collapsing found chunks each round.

    ``tagger`` is either a trained model or any callable from a sentence
    to a tag list.  Spans are translated to original token offsets and
    accumulated as a set.  The cascade stops when a round contributes no
    span it has not seen before, when everything has collapsed into a
    single token, or after ``max_depth`` rounds; a chunker stuck re-deriving
    the same brackets therefore terminates after one wasted round.
    """
    if max_depth < 1:
        raise ConfigError(f"max_depth must be >= 1, got {max_depth}")
    if callable(tagger):
        tag = tagger
    else:
        def tag(s: Sentence) -> list[str]:
            return tag_sentence(tagger, s, window)
    current = strip_tags(sentence)
    mapping = identity_map(len(sentence))
    found: dict[ChunkSpan, None] = {}
    for _ in range(max_depth):
        tags = tag(current)
        level_spans = extract_chunks(tags)
        if not level_spans:
            break
        translated = [translate_span(span, mapping) for span in level_spans]
        new = [span for span in translated if span not in found]
        for span in new:
            found[span] = None
        if not new:
            break
        current, level_map = collapse(current, level_spans, head)
        mapping = compose_maps(mapping, level_map)
        if len(current) == 1:
            break
    return NestedSentence(strip_tags(sentence).tokens, tuple(found))


def _strictly_inside(inner: ChunkSpan, outer: ChunkSpan) -> bool:
    return (
        outer.begin <= inner.begin
        and inner.end <= outer.end
        and (inner.begin, inner.end) != (outer.begin, outer.end)
    )


def _innermost_level(remaining: Sequence[ChunkSpan]) -> list[ChunkSpan]:
    """The deepest spans, one per distinct range.

    A span qualifies when no other remaining span lies strictly inside
    it.  Spans sharing a range form a chain; only one of them (the one
    written innermost, with the largest label) comes out per level, so
    repeated spans surface again on later levels.
    """
    leaves = [
        span
        for span in remaining
        if not any(_strictly_inside(other, span) for other in remaining)
    ]
    by_range: dict[tuple[int, int], ChunkSpan] = {}
    for span in leaves:
        key = (span.begin, span.end)
        if key not in by_range or span.label > by_range[key].label:
            by_range[key] = span
    return sorted(by_range.values(), key=lambda s: s.begin)


def cascade_training_corpus(
    sentences: Sequence[NestedSentence],
    head: str = "last",
) -> Corpus:
    """Flatten nested sentences into one training sentence per level.

    Level zero carries each sentence's innermost chunks; every next
    level collapses those and carries the chunks that became innermost.
    A final sentence with no chunks teaches the chunker when to stop.
    """
    flat: list[Sentence] = []
    for nested in sentences:
        current = Sentence(nested.tokens)
        remaining = list(nested.spans)
        mapping = identity_map(len(current))
        while remaining:
            level = _innermost_level(
                [translate_local(span, mapping) for span in remaining]
            )
            tags = tags_from_chunks(len(current), level, TagScheme.IOB2)
            flat.append(with_tags(current, tags))
            for span in level:
                remaining.remove(translate_span(span, mapping))
            current, level_map = collapse(current, level, head)
            mapping = compose_maps(mapping, level_map)
        flat.append(with_tags(current, ["O"] * len(current)))
    return Corpus(tuple(flat), TagScheme.IOB2)


def translate_local(span: ChunkSpan, mapping: CollapseMap) -> ChunkSpan:
    """Express an original-coordinate span in collapsed coordinates.

    The span's boundaries must coincide with collapsed token boundaries,
    which holds for any remaining span of a properly nested sentence.
    """
    begin = next(
        (i for i, (b, _) in enumerate(mapping) if b == span.begin), None
    )
    end = next(
        (i for i, (_, e) in enumerate(mapping) if e == span.end), None
    )
    if begin is None or end is None:
        raise ValidationError(f"span {span} does not align with collapsed tokens")
    return ChunkSpan(begin, end + 1, span.label)
