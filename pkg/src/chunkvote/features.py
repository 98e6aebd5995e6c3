"""Feature vectors for token-in-context classification.

Every token is described by a fixed window of categorical slots: words and
pos tags around the focus token plus the chunk tags already assigned to its
left neighbours.  Slot values are plain strings; positions outside the
sentence get a reserved padding value.  Relevance of a slot is measured by
information gain or its split-normalised variant, the gain ratio.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .corpus import Corpus, Sentence
from .errors import ConfigError, TrainingError, ValidationError

# Reserved slot value for positions outside the sentence.  Corpora must not
# use it as a word, pos tag or chunk tag.
PAD = "__PAD__"


@dataclass(frozen=True)
class WindowConfig:
    """Which context slots a feature vector contains.

    The defaults describe the chunking window: the focus word and pos tag,
    two words and pos tags to the left, one word and pos tag to the right,
    and the chunk tags of the two previous tokens.  ``complex_pairs`` adds
    conjunctions of adjacent pos slots and of the previous chunk tag with
    the focus pos tag.
    """

    left_words: int = 2
    right_words: int = 1
    left_pos: int = 2
    right_pos: int = 1
    left_chunk_tags: int = 2
    use_focus_word: bool = True
    use_focus_pos: bool = True
    complex_pairs: bool = False

    def __post_init__(self):
        for name in ("left_words", "right_words", "left_pos", "right_pos", "left_chunk_tags"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        if not (
            self.left_words or self.right_words or self.use_focus_word
            or self.left_pos or self.right_pos or self.use_focus_pos
            or self.left_chunk_tags
        ):
            raise ConfigError("window selects no slots at all")

    @classmethod
    def maxent_window(cls) -> "WindowConfig":
        """Wider window with conjunction features: 3 tokens left, 2 right."""
        return cls(
            left_words=3, right_words=2, left_pos=3, right_pos=2,
            left_chunk_tags=3, complex_pairs=True,
        )

    def _pos_offsets(self) -> list[int]:
        offsets = list(range(-self.left_pos, 0))
        if self.use_focus_pos:
            offsets.append(0)
        offsets.extend(range(1, self.right_pos + 1))
        return offsets

    def _pair_names(self) -> list[tuple[str, str]]:
        pairs = []
        pos_offsets = self._pos_offsets()
        for a, b in zip(pos_offsets, pos_offsets[1:]):
            if b - a == 1:
                pairs.append((f"p[{a:+d}]", f"p[{b:+d}]"))
        if self.left_chunk_tags >= 1 and self.use_focus_pos:
            pairs.append(("t[-1]", "p[+0]"))
        return pairs

    def slot_names(self) -> tuple[str, ...]:
        names = [f"w[{i:+d}]" for i in range(-self.left_words, 0)]
        if self.use_focus_word:
            names.append("w[+0]")
        names.extend(f"w[{i:+d}]" for i in range(1, self.right_words + 1))
        names.extend(f"p[{i:+d}]" for i in self._pos_offsets())
        names.extend(f"t[{i:+d}]" for i in range(-self.left_chunk_tags, 0))
        if self.complex_pairs:
            names.extend(f"{a}&{b}" for a, b in self._pair_names())
        return tuple(names)


FeatureVector = tuple[str, ...]


def make_features(
    sentence: Sentence,
    index: int,
    config: WindowConfig,
    predicted_tags: Sequence[str] = (),
) -> FeatureVector:
    """Feature vector for one token.

    ``predicted_tags`` must hold the chunk tags already assigned to
    positions 0..index-1; at training time these are the gold tags, at
    tagging time the model's own previous decisions.
    """
    n = len(sentence)
    if not 0 <= index < n:
        raise ValidationError(f"token index {index} outside sentence of length {n}")
    if len(predicted_tags) != index:
        raise ValidationError(f"need {index} left chunk tags, got {len(predicted_tags)}")

    def word(i: int) -> str:
        return sentence.tokens[i].word if 0 <= i < n else PAD

    def pos(i: int) -> str:
        return sentence.tokens[i].pos if 0 <= i < n else PAD

    def left_tag(i: int) -> str:
        return predicted_tags[i] if i >= 0 else PAD

    values = [word(index + off) for off in range(-config.left_words, 0)]
    if config.use_focus_word:
        values.append(word(index))
    values.extend(word(index + off) for off in range(1, config.right_words + 1))
    pos_values = {off: pos(index + off) for off in config._pos_offsets()}
    values.extend(pos_values[off] for off in config._pos_offsets())
    tag_values = {off: left_tag(index + off) for off in range(-config.left_chunk_tags, 0)}
    values.extend(tag_values[off] for off in range(-config.left_chunk_tags, 0))
    if config.complex_pairs:
        named = {}
        for off, v in pos_values.items():
            named[f"p[{off:+d}]"] = v
        for off, v in tag_values.items():
            named[f"t[{off:+d}]"] = v
        for a, b in config._pair_names():
            values.append(f"{named[a]}|{named[b]}")
    return tuple(values)


@dataclass(frozen=True)
class Dataset:
    """Labelled feature vectors with shared slot names."""

    items: tuple[tuple[FeatureVector, str], ...]
    slot_names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        object.__setattr__(self, "slot_names", tuple(self.slot_names))
        for vector, _ in self.items:
            if len(vector) != len(self.slot_names):
                raise ValidationError(
                    f"vector arity {len(vector)} does not match {len(self.slot_names)} slots"
                )

    @property
    def arity(self) -> int:
        return len(self.slot_names)

    def class_counts(self) -> Counter:
        return Counter(label for _, label in self.items)


def corpus_to_dataset(corpus: Corpus, config: WindowConfig) -> Dataset:
    """Window every token of a labelled corpus.

    Left chunk tag slots are filled with the gold tags, mirroring how a
    tagger sees its own previous decisions at prediction time.
    """
    items: list[tuple[FeatureVector, str]] = []
    for si, sentence in enumerate(corpus.sentences, start=1):
        tags = sentence.chunk_tags
        if any(tag is None for tag in tags):
            raise TrainingError(f"sentence {si} has untagged tokens")
        for i in range(len(sentence)):
            items.append((make_features(sentence, i, config, tags[:i]), tags[i]))  # type: ignore[arg-type]
    return Dataset(tuple(items), config.slot_names())


def _entropy(counts: Iterable[int], total: int) -> float:
    h = 0.0
    for c in counts:
        if c:
            p = c / total
            h -= p * math.log2(p)
    return h


def information_gain(dataset: Dataset, slot: int) -> float:
    """Reduction of class entropy (in bits) from knowing one slot's value."""
    if not dataset.items:
        raise TrainingError("cannot measure a slot on an empty dataset")
    if not 0 <= slot < dataset.arity:
        raise ValidationError(f"slot {slot} outside arity {dataset.arity}")
    total = len(dataset.items)
    class_counts = Counter(label for _, label in dataset.items)
    by_value: dict[str, Counter] = {}
    for vector, label in dataset.items:
        by_value.setdefault(vector[slot], Counter())[label] += 1
    conditional = 0.0
    for labels in by_value.values():
        n = sum(labels.values())
        conditional += (n / total) * _entropy(labels.values(), n)
    return max(0.0, _entropy(class_counts.values(), total) - conditional)


def gain_ratio(dataset: Dataset, slot: int) -> float:
    """Information gain normalised by the entropy of the slot's values.

    0 for a constant slot (whose split entropy is 0), at most 1 otherwise.
    """
    if not dataset.items:
        raise TrainingError("cannot measure a slot on an empty dataset")
    if not 0 <= slot < dataset.arity:
        raise ValidationError(f"slot {slot} outside arity {dataset.arity}")
    total = len(dataset.items)
    value_counts = Counter(vector[slot] for vector, _ in dataset.items)
    split = _entropy(value_counts.values(), total)
    if split == 0.0:
        return 0.0
    return min(1.0, information_gain(dataset, slot) / split)
