"""Trainable base chunkers sharing one prediction contract.

Five learner kinds are provided:

* ``baseline``: the most frequent chunk tag per pos tag;
* ``knn``: nearest neighbour classification over the stored training
  items, slots weighted by gain ratio, where k counts distance values
  rather than items;
* ``igtree``: an oblivious decision tree whose levels test the slots in
  order of decreasing gain ratio, with the modal class stored at every
  node as the fallback answer;
* ``maxent``: a conditional maximum entropy model trained by iterative
  scaling over (slot value, class) indicator features;
* ``rules``: per focus value default rules refined with context premises
  until they reach an accuracy threshold.

All models predict a chunk tag for one feature vector at a time and tag a
sentence left to right, feeding their own previous decisions back in as
the left chunk tag context.  Ties anywhere are broken in favour of the
candidate seen more often in training, then alphabetically, so training
and prediction are fully deterministic.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .corpus import Corpus, Sentence, TagScheme, Token, tag_parts
from .errors import ConfigError, TrainingError, ValidationError
from .features import (
    Dataset,
    FeatureVector,
    WindowConfig,
    corpus_to_dataset,
    gain_ratio,
    information_gain,
    make_features,
)

WEIGHTINGS = ("gain_ratio", "information_gain")


def pick_best(scores: Mapping[str, float], frequencies: Mapping[str, int] | None = None) -> str:
    """Candidate with the highest score.

    Ties prefer the candidate more frequent in ``frequencies`` (typically
    training class counts), then the alphabetically smaller one.
    """
    if not scores:
        raise ValidationError("no candidates to choose from")
    freq = frequencies or {}
    return min(scores, key=lambda c: (-scores[c], -freq.get(c, 0), c))


def modal_class(labels: Counter, frequencies: Mapping[str, int] | None = None) -> str:
    return pick_best(labels, frequencies if frequencies is not None else labels)


def _slot_weights(dataset: Dataset, weighting: str) -> tuple[float, ...]:
    if weighting not in WEIGHTINGS:
        raise ConfigError(f"unknown weighting {weighting!r}, expected one of {WEIGHTINGS}")
    measure = gain_ratio if weighting == "gain_ratio" else information_gain
    return tuple(measure(dataset, s) for s in range(dataset.arity))


#---------------------------------------------------------------------------
# baseline

@dataclass(frozen=True)
class BaselineModel:
    kind = "baseline"
    table: Mapping[str, str]
    fallback: str
    class_counts: Mapping[str, int]
    window: None = None

    def predict_pos(self, pos: str) -> str:
        return self.table.get(pos, self.fallback)


def train_baseline(corpus: Corpus, io_encoding: bool = False) -> BaselineModel:
    """Most frequent chunk tag per pos tag, corpus-wide modal tag as fallback."""
    if not corpus.sentences:
        raise TrainingError("cannot train on an empty corpus")
    per_pos: dict[str, Counter] = defaultdict(Counter)
    overall: Counter = Counter()
    for si, sentence in enumerate(corpus.sentences, start=1):
        for token in sentence.tokens:
            if token.chunk_tag is None:
                raise TrainingError(f"sentence {si} has untagged tokens")
            tag = _io_tag(token.chunk_tag) if io_encoding else token.chunk_tag
            per_pos[token.pos][tag] += 1
            overall[tag] += 1
    table = {pos: pick_best(counts, overall) for pos, counts in per_pos.items()}
    return BaselineModel(table, pick_best(overall, overall), dict(overall))


def _io_tag(tag: str) -> str:
    marker, label = tag_parts(tag)
    return f"I-{label}" if marker == "B" else tag


def io_corpus(corpus: Corpus) -> Corpus:
    """Rewrite every B tag as an I tag, keeping only an inside/outside split.

    The result is a legal IOB1 corpus; adjacent chunks of the same type
    become indistinguishable, which is the price of the two-tag encoding.
    """
    sentences = []
    for sentence in corpus.sentences:
        tokens = tuple(
            Token(t.word, t.pos, None if t.chunk_tag is None else _io_tag(t.chunk_tag))
            for t in sentence.tokens
        )
        sentences.append(Sentence(tokens))
    return Corpus(tuple(sentences), TagScheme.IOB1)


#---------------------------------------------------------------------------
# nearest neighbour

@dataclass(frozen=True)
class KnnModel:
    kind = "knn"
    memory: tuple[tuple[FeatureVector, str], ...]
    weights: tuple[float, ...]
    k: int
    class_counts: Mapping[str, int]
    slot_names: tuple[str, ...]
    window: WindowConfig | None = None

    def predict(self, vector: FeatureVector) -> str:
        return predict_knn(self, vector)


def train_knn(
    dataset: Dataset,
    k: int = 1,
    weights: Sequence[float] | None = None,
    weighting: str = "gain_ratio",
    window: WindowConfig | None = None,
) -> KnnModel:
    """Store the dataset verbatim together with per slot relevance weights."""
    if not dataset.items:
        raise TrainingError("cannot train on an empty dataset")
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    if weights is None:
        weights = _slot_weights(dataset, weighting)
    elif len(weights) != dataset.arity:
        raise ValidationError(f"{len(weights)} weights for arity {dataset.arity}")
    return KnnModel(
        memory=dataset.items,
        weights=tuple(weights),
        k=k,
        class_counts=dict(dataset.class_counts()),
        slot_names=dataset.slot_names,
        window=window,
    )


def predict_knn(model: KnnModel, vector: FeatureVector) -> str:
    """Majority class over the k nearest distance values.

    The distance between two vectors is the sum of the weights of the
    slots on which they disagree; all items sharing one of the k smallest
    distinct distances vote.
    """
    if len(vector) != len(model.slot_names):
        raise ValidationError(f"vector arity {len(vector)}, model expects {len(model.slot_names)}")
    by_distance: dict[float, Counter] = {}
    weights = model.weights
    for item_vector, label in model.memory:
        d = 0.0
        for w, a, b in zip(weights, vector, item_vector):
            if a != b:
                d += w
        tally = by_distance.get(d)
        if tally is None:
            tally = by_distance[d] = Counter()
        tally[label] += 1
    votes: Counter = Counter()
    for distance in sorted(by_distance)[: model.k]:
        votes.update(by_distance[distance])
    return pick_best(votes, model.class_counts)


#---------------------------------------------------------------------------
# oblivious decision tree ordered by slot relevance

@dataclass(frozen=True)
class IGTreeNode:
    default: str
    children: Mapping[str, "IGTreeNode"]


@dataclass(frozen=True)
class IGTreeModel:
    kind = "igtree"
    feature_order: tuple[int, ...]
    root: IGTreeNode
    class_counts: Mapping[str, int]
    slot_names: tuple[str, ...]
    window: WindowConfig | None = None

    def predict(self, vector: FeatureVector) -> str:
        return predict_igtree(self, vector)


def train_igtree(
    dataset: Dataset,
    weighting: str = "gain_ratio",
    window: WindowConfig | None = None,
) -> IGTreeModel:
    """Partition the data slot by slot, most relevant slot first.

    Branching stops as soon as a node is class-pure or no slots remain;
    every node keeps the modal class of its items as the default answer
    for unseen branch values.
    """
    if not dataset.items:
        raise TrainingError("cannot train on an empty dataset")
    weights = _slot_weights(dataset, weighting)
    order = tuple(sorted(range(dataset.arity), key=lambda s: (-weights[s], s)))
    global_counts = dataset.class_counts()

    def build(items: Sequence[tuple[FeatureVector, str]], depth: int) -> IGTreeNode:
        counts = Counter(label for _, label in items)
        default = pick_best(counts, global_counts)
        if len(counts) == 1 or depth == len(order):
            return IGTreeNode(default, {})
        slot = order[depth]
        groups: dict[str, list] = {}
        for item in items:
            groups.setdefault(item[0][slot], []).append(item)
        children = {value: build(group, depth + 1) for value, group in groups.items()}
        return IGTreeNode(default, children)

    return IGTreeModel(
        feature_order=order,
        root=build(dataset.items, 0),
        class_counts=dict(global_counts),
        slot_names=dataset.slot_names,
        window=window,
    )


def predict_igtree(model: IGTreeModel, vector: FeatureVector) -> str:
    """Walk the tree in slot order; a missing branch answers with the default."""
    if len(vector) != len(model.slot_names):
        raise ValidationError(f"vector arity {len(vector)}, model expects {len(model.slot_names)}")
    node = model.root
    for slot in model.feature_order:
        if not node.children:
            break
        child = node.children.get(vector[slot])
        if child is None:
            break
        node = child
    return node.default


#---------------------------------------------------------------------------
# maximum entropy

@dataclass(frozen=True)
class MaxEntTrace:
    """Training diagnostics: per iteration log likelihood and final counts."""

    loglik: tuple[float, ...]
    empirical: Mapping[tuple[int, str, str], float]
    expected: Mapping[tuple[int, str, str], float]
    empirical_correction: float
    expected_correction: float
    iterations: int


@dataclass(frozen=True)
class MaxEntModel:
    kind = "maxent"
    weights: Mapping[tuple[int, str, str], float]
    classes: tuple[str, ...]
    constant: int
    correction: float
    class_counts: Mapping[str, int]
    slot_names: tuple[str, ...]
    window: WindowConfig | None = None
    trace: MaxEntTrace | None = field(default=None, compare=False, repr=False)

    def scores(self, vector: FeatureVector) -> dict[str, float]:
        if len(vector) != len(self.slot_names):
            raise ValidationError(f"vector arity {len(vector)}, model expects {len(self.slot_names)}")
        result = {}
        for c in self.classes:
            score = 0.0
            active = 0
            for slot, value in enumerate(vector):
                lam = self.weights.get((slot, value, c))
                if lam is not None:
                    score += lam
                    active += 1
            result[c] = score + self.correction * (self.constant - active)
        return result

    def distribution(self, vector: FeatureVector) -> dict[str, float]:
        scores = self.scores(vector)
        top = max(scores.values())
        exps = {c: math.exp(s - top) for c, s in scores.items()}
        z = sum(exps.values())
        return {c: e / z for c, e in exps.items()}

    def predict(self, vector: FeatureVector) -> str:
        return predict_maxent(self, vector)


def predict_maxent(model: MaxEntModel, vector: FeatureVector) -> str:
    return pick_best(model.scores(vector), model.class_counts)


def _gis_delta(emp: float, exp_: float, lam: float, constant: int, sigma: float | None) -> float:
    if sigma is None:
        return math.log(emp / exp_) / constant
    # Gaussian penalty: solve emp = exp * e^(C d) + (lam + d) / sigma^2 for d.
    inv = 1.0 / (sigma * sigma)
    delta = 0.0
    for _ in range(50):
        e = exp_ * math.exp(constant * delta)
        g = e + (lam + delta) * inv - emp
        step = g / (constant * e + inv)
        delta -= step
        if abs(step) < 1e-14:
            break
    return delta


def train_maxent(
    dataset: Dataset,
    iterations: int = 100,
    sigma: float | None = None,
    cutoff: int = 2,
    tol: float = 0.0,
    window: WindowConfig | None = None,
) -> MaxEntModel:
    """Iterative scaling over (slot value, class) indicator features.

    Features seen fewer than ``cutoff`` times are dropped.  Every item is
    padded to a constant number of active features by one shared
    correction feature, and each iteration moves every weight by
    log(empirical / expected) divided by that constant.  With ``sigma``
    set, weights shrink towards 0 under a Gaussian penalty.  A positive
    ``tol`` stops early once every feature's expected count is within
    ``tol`` of its empirical count.
    """
    if not dataset.items:
        raise TrainingError("cannot train on an empty dataset")
    if iterations < 1:
        raise ConfigError(f"iterations must be >= 1, got {iterations}")
    if cutoff < 1:
        raise ConfigError(f"cutoff must be >= 1, got {cutoff}")
    classes = tuple(sorted({label for _, label in dataset.items}))
    class_counts = dataset.class_counts()

    # Aggregate duplicate vectors; chunking data repeats contexts heavily.
    vector_index: dict[FeatureVector, int] = {}
    totals: list[int] = []
    label_counts: list[dict[str, int]] = []
    for vector, label in dataset.items:
        u = vector_index.setdefault(vector, len(totals))
        if u == len(totals):
            totals.append(0)
            label_counts.append({})
        totals[u] += 1
        label_counts[u][label] = label_counts[u].get(label, 0) + 1
    vectors = list(vector_index)

    raw: Counter = Counter()
    for u, vector in enumerate(vectors):
        for label, n in label_counts[u].items():
            for slot, value in enumerate(vector):
                raw[(slot, value, label)] += n
    feature_ids: dict[tuple[int, str, str], int] = {}
    empirical: list[float] = []
    for feat, n in raw.items():
        if n >= cutoff:
            feature_ids[feat] = len(empirical)
            empirical.append(float(n))
    n_features = len(empirical)

    # Active feature ids per unique vector and class, plus the padding
    # needed to bring each (vector, class) pair up to the constant.
    active: list[list[list[int]]] = []
    constant = 1
    for vector in vectors:
        per_class = []
        for c in classes:
            ids = []
            for slot, value in enumerate(vector):
                fid = feature_ids.get((slot, value, c))
                if fid is not None:
                    ids.append(fid)
            constant = max(constant, len(ids))
            per_class.append(ids)
        active.append(per_class)
    padding = [[constant - len(ids) for ids in per_class] for per_class in active]

    emp_corr = 0.0
    for u, vector in enumerate(vectors):
        for ci, c in enumerate(classes):
            emp_corr += label_counts[u].get(c, 0) * padding[u][ci]

    lambdas = [0.0] * n_features
    corr_lambda = 0.0
    loglik: list[float] = []
    expected = [0.0] * n_features
    exp_corr = 0.0

    def pass_over_data() -> tuple[list[float], float, float]:
        exp_ = [0.0] * n_features
        exp_c = 0.0
        ll = 0.0
        for u in range(len(vectors)):
            scores = []
            for ci in range(len(classes)):
                s = corr_lambda * padding[u][ci]
                for fid in active[u][ci]:
                    s += lambdas[fid]
                scores.append(s)
            top = max(scores)
            exps = [math.exp(s - top) for s in scores]
            z = sum(exps)
            log_z = top + math.log(z)
            for ci, c in enumerate(classes):
                p = exps[ci] / z
                w = totals[u] * p
                for fid in active[u][ci]:
                    exp_[fid] += w
                exp_c += w * padding[u][ci]
                n = label_counts[u].get(c, 0)
                if n:
                    ll += n * (scores[ci] - log_z)
        return exp_, exp_c, ll

    done = 0
    for _ in range(iterations):
        expected, exp_corr, ll = pass_over_data()
        loglik.append(ll)
        if tol > 0.0:
            gap = max(
                (abs(e - x) for e, x in zip(empirical, expected)),
                default=0.0,
            )
            if emp_corr > 0.0:
                gap = max(gap, abs(emp_corr - exp_corr))
            if gap <= tol:
                break
        for fid in range(n_features):
            lambdas[fid] += _gis_delta(empirical[fid], expected[fid], lambdas[fid], constant, sigma)
        if emp_corr > 0.0:
            corr_lambda += _gis_delta(emp_corr, exp_corr, corr_lambda, constant, sigma)
        done += 1
    expected, exp_corr, ll = pass_over_data()
    loglik.append(ll)

    id_to_feat = {fid: feat for feat, fid in feature_ids.items()}
    return MaxEntModel(
        weights={id_to_feat[fid]: lambdas[fid] for fid in range(n_features)},
        classes=classes,
        constant=constant,
        correction=corr_lambda,
        class_counts=dict(class_counts),
        slot_names=dataset.slot_names,
        window=window,
        trace=MaxEntTrace(
            loglik=tuple(loglik),
            empirical={id_to_feat[fid]: empirical[fid] for fid in range(n_features)},
            expected={id_to_feat[fid]: expected[fid] for fid in range(n_features)},
            empirical_correction=emp_corr,
            expected_correction=exp_corr,
            iterations=done,
        ),
    )


#---------------------------------------------------------------------------
# refined rules

@dataclass(frozen=True)
class Rule:
    premises: tuple[tuple[int, str], ...]
    conclusion: str
    accuracy: float
    support: int

    def matches(self, vector: FeatureVector) -> bool:
        return all(vector[slot] == value for slot, value in self.premises)


@dataclass(frozen=True)
class RuleSetModel:
    kind = "rules"
    rules: tuple[Rule, ...]
    default_class: str
    class_counts: Mapping[str, int]
    slot_names: tuple[str, ...]
    window: WindowConfig | None = None

    def predict(self, vector: FeatureVector) -> str:
        return predict_rules(self, vector)


def predict_rules(model: RuleSetModel, vector: FeatureVector) -> str:
    """Answer of the first (most specific) matching rule, else the default."""
    if len(vector) != len(model.slot_names):
        raise ValidationError(f"vector arity {len(vector)}, model expects {len(model.slot_names)}")
    for rule in model.rules:
        if rule.matches(vector):
            return rule.conclusion
    return model.default_class


def _slot_rank(name: str) -> int:
    # Chunk tag context disambiguates best, then pos context, then words.
    if name.startswith("t["):
        return 0
    if name.startswith("p["):
        return 1
    if name.startswith("w["):
        return 2
    return 3


def train_rules(
    dataset: Dataset,
    threshold: float = 0.95,
    focus_slot: int | None = None,
    window: WindowConfig | None = None,
) -> RuleSetModel:
    """General-to-specific rule refinement around one focus slot.

    Every focus value starts as a default rule predicting its modal class.
    While a rule's training accuracy is below ``threshold``, the context
    premise (slot, value) that raises the accuracy most is added; ties
    prefer chunk tag slots over pos slots over word slots, then lower slot
    indices, then smaller values.  Refinement also stops when no premise
    improves the accuracy.  The result keeps one rule per focus value,
    ordered most specific first, plus a global default class.
    """
    if not dataset.items:
        raise TrainingError("cannot train on an empty dataset")
    if not 0.0 < threshold <= 1.0:
        raise ConfigError(f"threshold must be in (0, 1], got {threshold}")
    if focus_slot is None:
        focus_slot = dataset.slot_names.index("p[+0]") if "p[+0]" in dataset.slot_names else 0
    if not 0 <= focus_slot < dataset.arity:
        raise ValidationError(f"focus slot {focus_slot} outside arity {dataset.arity}")
    global_counts = dataset.class_counts()
    ranks = tuple(_slot_rank(name) for name in dataset.slot_names)

    by_focus: dict[str, list[tuple[FeatureVector, str]]] = {}
    for item in dataset.items:
        by_focus.setdefault(item[0][focus_slot], []).append(item)

    def accuracy(items: Sequence[tuple[FeatureVector, str]], conclusion: str) -> float:
        return sum(1 for _, label in items if label == conclusion) / len(items)

    rules: list[Rule] = []
    for value, subset in by_focus.items():
        conclusion = modal_class(Counter(label for _, label in subset), global_counts)
        acc = accuracy(subset, conclusion)
        premises: list[tuple[int, str]] = [(focus_slot, value)]
        used = {focus_slot}
        while acc < threshold and len(used) < dataset.arity:
            best: tuple[float, int, int, str] | None = None
            best_items: list[tuple[FeatureVector, str]] = []
            for slot in range(dataset.arity):
                if slot in used:
                    continue
                groups: dict[str, list[tuple[FeatureVector, str]]] = {}
                for item in subset:
                    groups.setdefault(item[0][slot], []).append(item)
                for slot_value, group in groups.items():
                    key = (-accuracy(group, conclusion), ranks[slot], slot, slot_value)
                    if best is None or key < best:
                        best = key
                        best_items = group
            if best is None or -best[0] <= acc:
                break
            subset = best_items
            premises.append((best[2], best[3]))
            used.add(best[2])
            acc = -best[0]
        rules.append(Rule(tuple(premises), conclusion, acc, len(subset)))

    rules.sort(key=lambda r: (-len(r.premises), r.premises))
    return RuleSetModel(
        rules=tuple(rules),
        default_class=modal_class(global_counts, global_counts),
        class_counts=dict(global_counts),
        slot_names=dataset.slot_names,
        window=window,
    )


#---------------------------------------------------------------------------
# sentence tagging and learner specs

TrainedModel = BaselineModel | KnnModel | IGTreeModel | MaxEntModel | RuleSetModel


def tag_sentence(
    model: TrainedModel,
    sentence: Sentence,
    config: WindowConfig | None = None,
) -> list[str]:
    """Tag one sentence left to right.

    Windowed models see their own previous decisions as the left chunk tag
    context, so the output is deterministic for a deterministic model.
    """
    if isinstance(model, BaselineModel):
        return [model.predict_pos(token.pos) for token in sentence.tokens]
    window = config or model.window
    if window is None:
        raise ConfigError("model carries no window configuration, pass one explicitly")
    tags: list[str] = []
    for i in range(len(sentence)):
        vector = make_features(sentence, i, window, tags)
        tags.append(model.predict(vector))
    return tags


LEARNER_KINDS = ("baseline", "knn", "igtree", "maxent", "rules")


@dataclass(frozen=True)
class LearnerSpec:
    """A named, reproducible recipe for training one base chunker."""

    name: str
    learner: str
    window: WindowConfig | None = None
    k: int = 3
    iterations: int = 100
    sigma: float | None = None
    cutoff: int = 2
    threshold: float = 0.95
    weighting: str = "gain_ratio"
    io_encoding: bool = False

    def __post_init__(self):
        if not self.name or not self.name.isprintable() or " " in self.name:
            raise ConfigError(f"bad system name {self.name!r}")
        if self.learner not in LEARNER_KINDS:
            raise ConfigError(f"unknown learner {self.learner!r}, expected one of {LEARNER_KINDS}")
        if self.io_encoding and self.learner not in ("baseline", "rules"):
            raise ConfigError("io_encoding is only supported for the baseline and rules learners")

    def resolved_window(self) -> WindowConfig:
        if self.window is not None:
            return self.window
        if self.learner == "maxent":
            return WindowConfig.maxent_window()
        return WindowConfig()

    def train(self, corpus: Corpus) -> TrainedModel:
        if self.learner == "baseline":
            return train_baseline(corpus, io_encoding=self.io_encoding)
        window = self.resolved_window()
        if self.io_encoding:
            corpus = io_corpus(corpus)
        dataset = corpus_to_dataset(corpus, window)
        if self.learner == "knn":
            return train_knn(dataset, k=self.k, weighting=self.weighting, window=window)
        if self.learner == "igtree":
            return train_igtree(dataset, weighting=self.weighting, window=window)
        if self.learner == "maxent":
            return train_maxent(
                dataset,
                iterations=self.iterations,
                sigma=self.sigma,
                cutoff=self.cutoff,
                window=window,
            )
        return train_rules(dataset, threshold=self.threshold, window=window)
