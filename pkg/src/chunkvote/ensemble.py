"""Combining the output of several chunkers.

The unit of exchange is the prediction table: per token, the pos tag, the
tag every system predicted and optionally the gold tag.  Tables are built
by cross validation over the training data (so the combiner weights are
estimated on predictions for unseen text) and consumed by five weighted
voting methods, by stacked classifiers and by best subset selection.
A second combination mode votes on chunk start and end brackets instead
of whole tags.
"""

from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .corpus import (
    PLACEHOLDER_WORD,
    ChunkSpan,
    Corpus,
    Sentence,
    TagScheme,
    Token,
    extract_chunks,
    tags_from_chunks,
)
from .errors import AlignmentError, ConfigError, ParseError, TrainingError, ValidationError
from .learners import (
    IGTreeModel,
    KnnModel,
    LearnerSpec,
    pick_best,
    tag_sentence,
    train_igtree,
    train_knn,
)
from .features import Dataset
from .metrics import EvalReport, score_chunks

VOTING_METHODS = ("majority", "tot-precision", "tag-precision", "precision-recall", "tag-pair")

# Vote value meaning "no bracket here" in start/end streams.  Chunk types
# named O are therefore not supported in bracket level combination.
NO_BRACKET = "O"

_RESERVED_COLUMNS = ("gold", "pos")


@dataclass(frozen=True)
class PredictionRow:
    pos: str
    preds: tuple[str, ...]
    gold: str | None = None


@dataclass(frozen=True)
class PredictionTable:
    """Aligned per-token predictions of several systems."""

    systems: tuple[str, ...]
    sentences: tuple[tuple[PredictionRow, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "systems", tuple(self.systems))
        object.__setattr__(self, "sentences", tuple(tuple(rows) for rows in self.sentences))
        if not self.systems:
            raise ValidationError("a prediction table needs at least one system")
        if len(set(self.systems)) != len(self.systems):
            raise ValidationError("system names must be unique")
        for name in self.systems:
            if name in _RESERVED_COLUMNS:
                raise ValidationError(f"system name {name!r} is reserved")
        gold_flags = set()
        for rows in self.sentences:
            if not rows:
                raise ValidationError("empty sentence in prediction table")
            for row in rows:
                if len(row.preds) != len(self.systems):
                    raise ValidationError(
                        f"row has {len(row.preds)} predictions for {len(self.systems)} systems"
                    )
                gold_flags.add(row.gold is not None)
        if len(gold_flags) > 1:
            raise ValidationError("gold tags must be present on every row or on none")

    @property
    def has_gold(self) -> bool:
        return bool(self.sentences) and self.sentences[0][0].gold is not None

    def rows(self) -> Iterable[PredictionRow]:
        for sentence in self.sentences:
            yield from sentence

    def column(self, system: str) -> list[list[str]]:
        """One system's predictions, per sentence."""
        index = self.systems.index(system)
        return [[row.preds[index] for row in rows] for rows in self.sentences]

    def gold_column(self) -> list[list[str]]:
        if not self.has_gold:
            raise ValidationError("prediction table has no gold tags")
        return [[row.gold for row in rows] for rows in self.sentences]  # type: ignore[misc]


def from_corpora(predictions: Mapping[str, Corpus], gold: Corpus | None = None) -> PredictionTable:
    """Assemble a table from per-system corpora over the same tokens."""
    if not predictions:
        raise ValidationError("need at least one system")
    systems = tuple(predictions)
    reference = gold if gold is not None else predictions[systems[0]]
    for name, corpus in predictions.items():
        if len(corpus.sentences) != len(reference.sentences):
            raise AlignmentError(f"system {name}: sentence count differs from reference")
    sentences = []
    for si, ref_sentence in enumerate(reference.sentences):
        rows = []
        for ti in range(len(ref_sentence)):
            preds = []
            for name in systems:
                pred_sentence = predictions[name].sentences[si]
                if len(pred_sentence) != len(ref_sentence):
                    raise AlignmentError(f"system {name}: sentence {si + 1} length differs")
                tag = pred_sentence.tokens[ti].chunk_tag
                if tag is None:
                    raise ValidationError(f"system {name}: sentence {si + 1} has untagged tokens")
                preds.append(tag)
            gold_tag = None
            if gold is not None:
                gold_tag = gold.sentences[si].tokens[ti].chunk_tag
                if gold_tag is None:
                    raise ValidationError(f"gold sentence {si + 1} has untagged tokens")
            rows.append(PredictionRow(ref_sentence.tokens[ti].pos, tuple(preds), gold_tag))
        sentences.append(tuple(rows))
    return PredictionTable(systems, tuple(sentences))


#---------------------------------------------------------------------------
# table file format

def write_table(table: PredictionTable) -> str:
    """Render a table: a header naming the systems, then one token per line."""
    header = (["gold", "pos"] if table.has_gold else ["pos"]) + list(table.systems)
    parts = [" ".join(header) + "\n"]
    for rows in table.sentences:
        for row in rows:
            fields = ([row.gold] if row.gold is not None else []) + [row.pos] + list(row.preds)
            parts.append(" ".join(fields) + "\n")  # type: ignore[arg-type]
        parts.append("\n")
    return "".join(parts)


def read_table(source) -> PredictionTable:
    lines = source.splitlines() if isinstance(source, str) else [l.rstrip("\r\n") for l in source]
    header: list[str] | None = None
    start = 0
    for i, line in enumerate(lines):
        if line.strip():
            header = line.split()
            start = i + 1
            break
    if header is None:
        raise ParseError("empty prediction table")
    if header[0] == "gold":
        if len(header) < 3 or header[1] != "pos":
            raise ParseError("table header must start with 'gold pos' or 'pos'")
        has_gold, systems = True, header[2:]
    elif header[0] == "pos":
        if len(header) < 2:
            raise ParseError("table header names no systems")
        has_gold, systems = False, header[1:]
    else:
        raise ParseError("table header must start with 'gold pos' or 'pos'")
    width = len(header)
    sentences: list[tuple[PredictionRow, ...]] = []
    rows: list[PredictionRow] = []
    for lineno, line in enumerate(lines[start:], start=start + 1):
        if not line.strip():
            if rows:
                sentences.append(tuple(rows))
                rows = []
            continue
        fields = line.split()
        if len(fields) != width:
            raise ParseError(f"line {lineno}: expected {width} columns, got {len(fields)}")
        if has_gold:
            rows.append(PredictionRow(fields[1], tuple(fields[2:]), fields[0]))
        else:
            rows.append(PredictionRow(fields[0], tuple(fields[1:])))
    if rows:
        sentences.append(tuple(rows))
    return PredictionTable(tuple(systems), tuple(sentences))


#---------------------------------------------------------------------------
# cross validation tuning tables

def cv_tuning_table(corpus: Corpus, specs: Sequence[LearnerSpec], folds: int = 10) -> PredictionTable:
    """Predict every training sentence with models that never saw it.

    Sentences are dealt round robin over ``folds`` partitions; each system
    is retrained once per fold on the other partitions.  The table keeps
    the original sentence order and carries the gold tags.
    """
    if folds < 2:
        raise ConfigError(f"folds must be >= 2, got {folds}")
    if len(corpus.sentences) < folds:
        raise ConfigError(f"{len(corpus.sentences)} sentences cannot fill {folds} folds")
    if not specs:
        raise ConfigError("need at least one learner spec")
    names = [spec.name for spec in specs]
    if len(set(names)) != len(names):
        raise ConfigError("system names must be unique")
    predicted: dict[str, list[list[str] | None]] = {
        spec.name: [None] * len(corpus.sentences) for spec in specs
    }
    for fold in range(folds):
        train_sentences = tuple(
            s for i, s in enumerate(corpus.sentences) if i % folds != fold
        )
        train_corpus = Corpus(train_sentences, corpus.scheme)
        for spec in specs:
            model = spec.train(train_corpus)
            for i, sentence in enumerate(corpus.sentences):
                if i % folds == fold:
                    predicted[spec.name][i] = tag_sentence(model, sentence)
    sentences = []
    for i, sentence in enumerate(corpus.sentences):
        gold = sentence.chunk_tags
        if any(tag is None for tag in gold):
            raise TrainingError(f"sentence {i + 1} has untagged tokens")
        rows = tuple(
            PredictionRow(
                sentence.tokens[t].pos,
                tuple(predicted[name][i][t] for name in names),  # type: ignore[index]
                gold[t],
            )
            for t in range(len(sentence))
        )
        sentences.append(rows)
    return PredictionTable(tuple(names), tuple(sentences))


#---------------------------------------------------------------------------
# combiner weights

@dataclass(frozen=True)
class CombinerWeights:
    """Reliability estimates for every system, measured on a tuning table."""

    systems: tuple[str, ...]
    accuracy: Mapping[str, float]
    tag_precision: Mapping[tuple[str, str], float]
    tag_recall: Mapping[tuple[str, str], float]
    pair_prob: Mapping[tuple[str, str, str, str], Mapping[str, float]]
    tag_counts: Mapping[str, int]

    def accuracy_of(self, system: str) -> float:
        return self.accuracy.get(system, 0.0)

    def tag_precision_of(self, system: str, tag: str) -> float:
        return self.tag_precision.get((system, tag), 0.0)

    def tag_recall_of(self, system: str, tag: str) -> float:
        return self.tag_recall.get((system, tag), 0.0)


def estimate_weights(table: PredictionTable) -> CombinerWeights:
    """Token level reliability of each system; undefined ratios become 0."""
    if not table.has_gold:
        raise ValidationError("weights need a tuning table with gold tags")
    systems = table.systems
    total = 0
    correct: Counter = Counter()
    pred_count: Counter = Counter()
    hit_count: Counter = Counter()
    gold_count: Counter = Counter()
    pair_counts: dict[tuple[str, str, str, str], Counter] = {}
    for row in table.rows():
        total += 1
        gold_count[row.gold] += 1
        for name, tag in zip(systems, row.preds):
            if tag == row.gold:
                correct[name] += 1
                hit_count[(name, tag)] += 1
            pred_count[(name, tag)] += 1
        for (i, a), (j, b) in itertools.combinations(enumerate(systems), 2):
            key = (a, b, row.preds[i], row.preds[j])
            pair_counts.setdefault(key, Counter())[row.gold] += 1
    accuracy = {name: correct[name] / total for name in systems}
    tag_precision = {
        key: hit_count.get(key, 0) / n for key, n in pred_count.items()
    }
    tag_recall = {
        (name, tag): hit_count.get((name, tag), 0) / gold_count[tag]
        for name in systems
        for tag in gold_count
    }
    pair_prob = {
        key: {tag: n / sum(counts.values()) for tag, n in counts.items()}
        for key, counts in pair_counts.items()
    }
    return CombinerWeights(
        systems=systems,
        accuracy=accuracy,
        tag_precision=tag_precision,
        tag_recall=tag_recall,
        pair_prob=pair_prob,
        tag_counts=dict(gold_count),
    )


def write_weights(weights: CombinerWeights) -> str:
    lines = ["combiner-weights 1"]
    for name in weights.systems:
        lines.append(f"system {name}")
    for tag in sorted(weights.tag_counts):
        lines.append(f"tagcount {tag} {weights.tag_counts[tag]}")
    for name in weights.systems:
        lines.append(f"accuracy {name} {weights.accuracy[name]!r}")
    for name, tag in sorted(weights.tag_precision):
        lines.append(f"tagprec {name} {tag} {weights.tag_precision[(name, tag)]!r}")
    for name, tag in sorted(weights.tag_recall):
        lines.append(f"tagrec {name} {tag} {weights.tag_recall[(name, tag)]!r}")
    for key in sorted(weights.pair_prob):
        dist = weights.pair_prob[key]
        for tag in sorted(dist):
            lines.append(f"pair {' '.join(key)} {tag} {dist[tag]!r}")
    return "\n".join(lines) + "\n"


def read_weights(source) -> CombinerWeights:
    text = source if isinstance(source, str) else source.read()
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or lines[0].split() != ["combiner-weights", "1"]:
        raise ParseError("not a combiner-weights file")
    systems: list[str] = []
    accuracy: dict[str, float] = {}
    tag_precision: dict[tuple[str, str], float] = {}
    tag_recall: dict[tuple[str, str], float] = {}
    pair_prob: dict[tuple[str, str, str, str], dict[str, float]] = {}
    tag_counts: dict[str, int] = {}
    try:
        for line in lines[1:]:
            fields = line.split()
            if fields[0] == "system" and len(fields) == 2:
                systems.append(fields[1])
            elif fields[0] == "tagcount" and len(fields) == 3:
                tag_counts[fields[1]] = int(fields[2])
            elif fields[0] == "accuracy" and len(fields) == 3:
                accuracy[fields[1]] = float(fields[2])
            elif fields[0] == "tagprec" and len(fields) == 4:
                tag_precision[(fields[1], fields[2])] = float(fields[3])
            elif fields[0] == "tagrec" and len(fields) == 4:
                tag_recall[(fields[1], fields[2])] = float(fields[3])
            elif fields[0] == "pair" and len(fields) == 7:
                key = (fields[1], fields[2], fields[3], fields[4])
                pair_prob.setdefault(key, {})[fields[5]] = float(fields[6])
            else:
                raise ParseError(f"bad weights line {line!r}")
    except ValueError as exc:
        raise ParseError(f"bad number in weights file: {exc}") from None
    return CombinerWeights(
        systems=tuple(systems),
        accuracy=accuracy,
        tag_precision=tag_precision,
        tag_recall=tag_recall,
        pair_prob=pair_prob,
        tag_counts=tag_counts,
    )


#---------------------------------------------------------------------------
# voting

def vote(
    votes: Sequence[tuple[str, str]],
    method: str = "majority",
    weights: CombinerWeights | None = None,
) -> str:
    """Combine one row of (system, tag) votes into a single tag.

    * ``majority``: one vote per system;
    * ``tot-precision``: votes weighted by system accuracy;
    * ``tag-precision``: votes weighted by the system's precision on the
      tag it proposes;
    * ``precision-recall``: a candidate tag collects the proposing
      systems' precision on it plus, from every system proposing another
      tag, one minus that system's recall on the candidate; candidates
      are the proposed tags and every tag seen in tuning;
    * ``tag-pair``: every unordered system pair contributes the tuning
      distribution of the gold tag given the pair's two proposals,
      backing off to halved tag-precision votes for unseen pairs.

    A unanimous row is returned unchanged under every method.  Remaining
    ties prefer the tag more frequent in the tuning data, then the
    alphabetically smaller tag.
    """
    if not votes:
        raise ValidationError("cannot combine an empty vote row")
    if method not in VOTING_METHODS:
        raise ConfigError(f"unknown voting method {method!r}, expected one of {VOTING_METHODS}")
    tags = [tag for _, tag in votes]
    if all(tag == tags[0] for tag in tags):
        return tags[0]
    if method != "majority" and weights is None:
        raise ConfigError(f"voting method {method!r} needs combiner weights")
    frequencies = weights.tag_counts if weights is not None else {}

    scores: dict[str, float]
    if method == "majority":
        scores = dict(Counter(tags))
    elif method == "tot-precision":
        scores = defaultdict(float)
        for system, tag in votes:
            scores[tag] += weights.accuracy_of(system)
    elif method == "tag-precision":
        scores = defaultdict(float)
        for system, tag in votes:
            scores[tag] += weights.tag_precision_of(system, tag)
    elif method == "precision-recall":
        candidates = list(dict.fromkeys(tags))
        candidates.extend(t for t in sorted(weights.tag_counts) if t not in candidates)
        scores = {}
        for candidate in candidates:
            score = 0.0
            for system, tag in votes:
                if tag == candidate:
                    score += weights.tag_precision_of(system, tag)
                else:
                    score += 1.0 - weights.tag_recall_of(system, candidate)
            scores[candidate] = score / len(votes)
    else:  # tag-pair
        scores = defaultdict(float)
        for (a, tag_a), (b, tag_b) in itertools.combinations(votes, 2):
            dist = weights.pair_prob.get((a, b, tag_a, tag_b))
            if dist is None:
                scores[tag_a] += weights.tag_precision_of(a, tag_a) / 2.0
                scores[tag_b] += weights.tag_precision_of(b, tag_b) / 2.0
            else:
                for tag, p in dist.items():
                    scores[tag] += p
    return pick_best(scores, frequencies)


#---------------------------------------------------------------------------
# stacked classifiers

def stacked_train(
    table: PredictionTable,
    learner: str = "knn",
    add_pos: bool = False,
    k: int = 1,
    weighting: str = "gain_ratio",
) -> KnnModel | IGTreeModel:
    """Train a second stage classifier on the systems' joint output."""
    if learner not in ("knn", "igtree"):
        raise ConfigError(f"stacked learner must be 'knn' or 'igtree', got {learner!r}")
    if not table.has_gold:
        raise ValidationError("stacking needs a tuning table with gold tags")
    slot_names = tuple(table.systems) + (("pos",) if add_pos else ())
    items = []
    for row in table.rows():
        vector = row.preds + ((row.pos,) if add_pos else ())
        items.append((vector, row.gold))
    dataset = Dataset(tuple(items), slot_names)
    if learner == "knn":
        return train_knn(dataset, k=k, weighting=weighting)
    return train_igtree(dataset, weighting=weighting)


def stacked_tags(model: KnnModel | IGTreeModel, table: PredictionTable) -> list[list[str]]:
    """Apply a stacked model to every row of a test table."""
    add_pos = len(model.slot_names) == len(table.systems) + 1
    if not add_pos and len(model.slot_names) != len(table.systems):
        raise ValidationError(
            f"model expects {len(model.slot_names)} columns, table has {len(table.systems)} systems"
        )
    result = []
    for rows in table.sentences:
        tags = []
        for row in rows:
            vector = row.preds + ((row.pos,) if add_pos else ())
            tags.append(model.predict(vector))
        result.append(tags)
    return result


#---------------------------------------------------------------------------
# best subset selection

def _majority_tags(table: PredictionTable, subset: Sequence[int]) -> list[list[str]]:
    result = []
    for rows in table.sentences:
        tags = []
        for row in rows:
            pairs = [(table.systems[i], row.preds[i]) for i in subset]
            tags.append(vote(pairs, "majority"))
        result.append(tags)
    return result


def evaluate_subset(table: PredictionTable, systems: Sequence[str]) -> EvalReport:
    """Chunk level score of majority voting over a subset of systems."""
    indices = [table.systems.index(name) for name in systems]
    gold_spans = [extract_chunks(tags) for tags in table.gold_column()]
    voted = _majority_tags(table, indices)
    return score_chunks(gold_spans, [extract_chunks(tags) for tags in voted])


def best_n_select(table: PredictionTable, n: int) -> tuple[str, ...]:
    """Exhaustively pick the n systems whose majority vote scores best.

    The criterion is the chunk level F rate on the tuning table after
    reconstructing chunks from the voted tags.  Ties keep the first
    subset in lexicographic order over system positions.
    """
    if not table.has_gold:
        raise ValidationError("subset selection needs a tuning table with gold tags")
    if not 1 <= n <= len(table.systems):
        raise ConfigError(f"n must be between 1 and {len(table.systems)}, got {n}")
    gold_spans = [extract_chunks(tags) for tags in table.gold_column()]
    best_subset: tuple[int, ...] | None = None
    best_f = -1.0
    for subset in itertools.combinations(range(len(table.systems)), n):
        voted = _majority_tags(table, subset)
        report = score_chunks(gold_spans, [extract_chunks(tags) for tags in voted])
        if report.f_rate > best_f:
            best_f = report.f_rate
            best_subset = subset
    assert best_subset is not None
    return tuple(table.systems[i] for i in best_subset)


#---------------------------------------------------------------------------
# bracket level combination

def _vote_stream(
    streams: Sequence[dict[int, str]],
    systems: Sequence[str],
    length: int,
    method: str,
    weights: CombinerWeights | None,
) -> dict[int, str]:
    winners = {}
    for position in range(length):
        pairs = [
            (name, stream.get(position, NO_BRACKET))
            for name, stream in zip(systems, streams)
        ]
        winner = vote(pairs, method, weights)
        if winner != NO_BRACKET:
            winners[position] = winner
    return winners


def combine_bracket_sentence(
    spans_per_system: Sequence[Sequence[ChunkSpan]],
    systems: Sequence[str],
    length: int,
    method: str = "majority",
    weights: CombinerWeights | None = None,
) -> list[ChunkSpan]:
    """Vote on chunk starts and ends separately, then rebuild chunks.

    A start of type T at position p is matched with the nearest end of
    type T at a position >= p that precedes the next start of type T;
    unmatched brackets are dropped, and so is any rebuilt chunk that
    overlaps an earlier one.
    """
    starts = []
    ends = []
    for spans in spans_per_system:
        start_stream: dict[int, str] = {}
        end_stream: dict[int, str] = {}
        for span in spans:
            start_stream[span.begin] = span.label
            end_stream[span.end - 1] = span.label
        starts.append(start_stream)
        ends.append(end_stream)
    start_winners = _vote_stream(starts, systems, length, method, weights)
    end_winners = _vote_stream(ends, systems, length, method, weights)

    spans: list[ChunkSpan] = []
    for begin in sorted(start_winners):
        label = start_winners[begin]
        next_start = min(
            (p for p in start_winners if p > begin and start_winners[p] == label),
            default=length,
        )
        end = min(
            (p for p in end_winners if begin <= p < next_start and end_winners[p] == label),
            default=None,
        )
        if end is not None:
            spans.append(ChunkSpan(begin, end + 1, label))
    kept: list[ChunkSpan] = []
    for span in sorted(spans, key=lambda s: (s.begin, s.end)):
        if not kept or span.begin >= kept[-1].end:
            kept.append(span)
    return kept


def combine_brackets(
    outputs: Mapping[str, Sequence[Sequence[ChunkSpan]]],
    lengths: Sequence[int],
    method: str = "majority",
    weights: CombinerWeights | None = None,
) -> list[list[ChunkSpan]]:
    """Bracket level combination over whole corpora of span lists."""
    if not outputs:
        raise ValidationError("need at least one system")
    systems = list(outputs)
    for name, sentences in outputs.items():
        if len(sentences) != len(lengths):
            raise AlignmentError(f"system {name}: {len(sentences)} sentences for {len(lengths)} lengths")
    return [
        combine_bracket_sentence(
            [outputs[name][i] for name in systems], systems, lengths[i], method, weights
        )
        for i in range(len(lengths))
    ]


#---------------------------------------------------------------------------
# corpus level combination

def _normalised_corpus(
    tags_per_sentence: Sequence[Sequence[str]],
    table: PredictionTable,
    words: Corpus | None,
) -> Corpus:
    if words is not None and len(words.sentences) != len(table.sentences):
        raise AlignmentError(
            f"word corpus has {len(words.sentences)} sentences, table has {len(table.sentences)}"
        )
    sentences = []
    for si, (rows, tags) in enumerate(zip(table.sentences, tags_per_sentence)):
        spans = extract_chunks(tags)
        clean = tags_from_chunks(len(rows), spans, TagScheme.IOB2)
        if words is not None:
            word_list = words.sentences[si].words
            if len(word_list) != len(rows):
                raise AlignmentError(f"sentence {si + 1}: word count differs from table")
        else:
            word_list = tuple(PLACEHOLDER_WORD for _ in rows)
        tokens = tuple(
            Token(word_list[t], rows[t].pos, clean[t]) for t in range(len(rows))
        )
        sentences.append(Sentence(tokens))
    return Corpus(tuple(sentences), TagScheme.IOB2)


def combine_corpus(
    table: PredictionTable,
    method: str = "majority",
    weights: CombinerWeights | None = None,
    bracket_level: bool = False,
    words: Corpus | None = None,
) -> Corpus:
    """Combine a test table into one tagged corpus under IOB2.

    With ``bracket_level`` the systems' chunk starts and ends are voted on
    separately and chunks are rebuilt from the surviving brackets;
    otherwise each token's tags are voted on directly.  Words are taken
    from ``words`` when given, else a placeholder is written.
    """
    if bracket_level:
        outputs = {
            name: [extract_chunks(tags) for tags in table.column(name)]
            for name in table.systems
        }
        lengths = [len(rows) for rows in table.sentences]
        combined = combine_brackets(outputs, lengths, method, weights)
        tags_per_sentence = [
            tags_from_chunks(lengths[i], combined[i], TagScheme.IOB2)
            for i in range(len(lengths))
        ]
    else:
        tags_per_sentence = [
            [vote(list(zip(table.systems, row.preds)), method, weights) for row in rows]
            for rows in table.sentences
        ]
    return _normalised_corpus(tags_per_sentence, table, words)


def stacked_corpus(
    model: KnnModel | IGTreeModel,
    table: PredictionTable,
    words: Corpus | None = None,
) -> Corpus:
    """Apply a stacked model to a test table and normalise to IOB2."""
    return _normalised_corpus(stacked_tags(model, table), table, words)
