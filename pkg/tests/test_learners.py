import math

import pytest

from chunkvote import (
    PAD,
    BaselineModel,
    ConfigError,
    Corpus,
    Dataset,
    IGTreeModel,
    KnnModel,
    LEARNER_KINDS,
    LearnerSpec,
    MaxEntModel,
    RuleSetModel,
    TagScheme,
    TrainingError,
    ValidationError,
    WindowConfig,
    corpus_to_dataset,
    extract_chunks,
    predict_igtree,
    predict_knn,
    predict_maxent,
    predict_rules,
    tag_sentence,
    train_baseline,
    train_igtree,
    train_knn,
    train_maxent,
    train_rules,
)
from chunkvote.learners import io_corpus, pick_best

import datagen
from conftest import make_sentence, make_untagged
from oracles import oracle_igtree_path, oracle_knn, oracle_maxent_counts


def dataset(rows, slot_names=None):
    items = tuple((tuple(vector), label) for vector, label in rows)
    if slot_names is None:
        slot_names = tuple(f"s{i}" for i in range(len(items[0][0])))
    return Dataset(items, tuple(slot_names))


def random_dataset(r, size, arity, values=("a", "b", "c", "d"), labels=("X", "Y", "Z")):
    rows = [
        ([r.choice(values) for _ in range(arity)], r.choice(labels))
        for _ in range(size)
    ]
    return dataset(rows)


class TestPickBest:
    def test_highest_score_wins(self):
        assert pick_best({"A": 1.0, "B": 2.0}) == "B"

    def test_frequency_breaks_score_ties(self):
        assert pick_best({"A": 1.0, "B": 1.0}, {"A": 2, "B": 5}) == "B"

    def test_alphabet_breaks_remaining_ties(self):
        assert pick_best({"C": 1.0, "B": 1.0}, {"B": 3, "C": 3}) == "B"
        assert pick_best({"C": 1.0, "B": 1.0}) == "B"

    def test_empty_candidates_are_rejected(self):
        with pytest.raises(ValidationError):
            pick_best({})


class TestBaseline:
    def corpus(self):
        return Corpus(
            (
                make_sentence([("the", "DT", "B-NP"), ("dog", "NN", "I-NP"),
                               ("runs", "VBZ", "O")]),
                make_sentence([("dog", "NN", "B-NP")]),
            ),
            TagScheme.IOB2,
        )

    def test_modal_tag_per_pos(self):
        model = train_baseline(self.corpus())
        assert model.predict_pos("DT") == "B-NP"
        assert model.predict_pos("VBZ") == "O"
        # NN is split 1/1; the corpus-wide more frequent tag wins
        assert model.predict_pos("NN") == "B-NP"

    def test_unseen_pos_gets_the_corpus_modal_tag(self):
        model = train_baseline(self.corpus())
        assert model.fallback == "B-NP"
        assert model.predict_pos("XYZ") == "B-NP"

    def test_io_encoding_folds_b_into_i(self):
        model = train_baseline(self.corpus(), io_encoding=True)
        assert set(model.table.values()) <= {"I-NP", "O"}
        assert model.predict_pos("DT") == "I-NP"

    def test_training_errors(self):
        with pytest.raises(TrainingError):
            train_baseline(Corpus((), TagScheme.IOB2))
        bare = Corpus((make_untagged([("the", "DT")]),), TagScheme.IOB2)
        with pytest.raises(TrainingError, match="sentence 1"):
            train_baseline(bare)


class TestIoCorpus:
    def test_rewrites_b_tags_and_switches_scheme(self):
        corpus = Corpus(
            (make_sentence([("a", "DT", "B-NP"), ("b", "NN", "I-NP"),
                            ("c", "NN", "B-NP"), ("d", "VB", "O")]),),
            TagScheme.IOB2,
        )
        got = io_corpus(corpus)
        assert got.scheme is TagScheme.IOB1
        assert got.sentences[0].chunk_tags == ("I-NP", "I-NP", "I-NP", "O")

    def test_adjacent_same_type_chunks_merge(self):
        corpus = Corpus(
            (make_sentence([("a", "DT", "B-NP"), ("b", "NN", "B-NP")]),),
            TagScheme.IOB2,
        )
        before = extract_chunks(corpus.sentences[0].chunk_tags)
        after = extract_chunks(io_corpus(corpus).sentences[0].chunk_tags)
        assert len(before) == 2
        assert len(after) == 1

    def test_untagged_tokens_stay_untagged(self):
        corpus = Corpus((make_untagged([("a", "DT")]),), TagScheme.IOB2)
        assert io_corpus(corpus).sentences[0].chunk_tags == (None,)


class TestKnn:
    def model(self, k):
        data = dataset([
            (["a", "b"], "X"),
            (["a", "c"], "Y"),
            (["d", "b"], "Y"),
            (["d", "c"], "Z"),
        ])
        return train_knn(data, k=k, weights=(1.0, 0.5))

    def test_exact_match_wins_at_k1(self):
        assert predict_knn(self.model(1), ("a", "b")) == "X"
        assert predict_knn(self.model(1), ("d", "c")) == "Z"

    def test_k_counts_distinct_distances(self):
        # distances from ("a", "b"): 0.0 X, 0.5 Y, 1.0 Y, 1.5 Z
        assert predict_knn(self.model(2), ("a", "b")) == "Y"
        assert predict_knn(self.model(3), ("a", "b")) == "Y"

    def test_equidistant_items_vote_together(self):
        data = dataset([
            (["a", "b"], "X"),
            (["a", "c"], "Y"),
            (["d", "b"], "Y"),
        ])
        model = train_knn(data, k=1, weights=(1.0, 1.0))
        # both one-slot-away neighbours share distance 1.0, X is unseen
        assert predict_knn(model, ("e", "b")) == "Y"

    def test_weight_zero_slots_are_ignored(self):
        data = dataset([(["a", "b"], "X"), (["c", "b"], "Y")])
        model = train_knn(data, k=1, weights=(0.0, 1.0))
        # slot 0 cannot separate the two items, so both vote; the tie
        # falls back to class frequency, then the alphabet
        assert predict_knn(model, ("a", "b")) == "X"

    def test_training_validation(self):
        data = dataset([(["a"], "X")])
        with pytest.raises(ConfigError):
            train_knn(data, k=0)
        with pytest.raises(ValidationError):
            train_knn(data, weights=(1.0, 2.0))
        with pytest.raises(TrainingError):
            train_knn(Dataset((), ("s0",)))
        with pytest.raises(ConfigError):
            train_knn(data, weighting="nonsense")
        with pytest.raises(ValidationError):
            predict_knn(train_knn(data), ("a", "b"))

    @pytest.mark.parametrize("seed", range(20))
    def test_matches_brute_force(self, seed):
        r = datagen.rng(10_000 + seed)
        data = random_dataset(r, r.randint(1, 50), 3)
        k = r.randint(1, 4)
        weighting = r.choice(("gain_ratio", "information_gain"))
        model = train_knn(data, k=k, weighting=weighting)
        for _ in range(50):
            query = tuple(r.choice(("a", "b", "c", "d", "unseen")) for _ in range(3))
            expected = oracle_knn(
                model.memory, model.weights, model.k, query, model.class_counts
            )
            assert predict_knn(model, query) == expected


class TestIGTree:
    def test_more_relevant_slots_are_tested_first(self):
        data = dataset([
            (["n", "a"], "X"), (["n", "a"], "X"),
            (["n", "b"], "Y"), (["m", "b"], "Y"),
        ])
        model = train_igtree(data)
        assert model.feature_order[0] == 1

    def test_tied_relevance_prefers_lower_slot_index(self):
        data = dataset([(["a", "a"], "X"), (["b", "b"], "Y")])
        model = train_igtree(data)
        assert model.feature_order == (0, 1)

    def test_missing_branch_answers_with_the_node_default(self):
        data = dataset([
            (["a", "x"], "X"), (["a", "y"], "Y"),
            (["b", "x"], "Y"), (["b", "x"], "Y"),
        ])
        model = train_igtree(data)
        # feature order puts slot 1 last; an unseen slot value at the
        # root falls back to the modal class of the whole data
        unseen = ("c", "x")
        first = model.feature_order[0]
        assert unseen[first] not in ("a", "b") or True
        assert predict_igtree(model, unseen) == "Y"

    def test_pure_dataset_collapses_to_a_leaf(self):
        data = dataset([(["a"], "X"), (["b"], "X")])
        model = train_igtree(data)
        assert model.root.children == {}
        assert predict_igtree(model, ("anything",)) == "X"

    def test_arity_check_and_empty_data(self):
        with pytest.raises(TrainingError):
            train_igtree(Dataset((), ("s0",)))
        model = train_igtree(dataset([(["a"], "X")]))
        with pytest.raises(ValidationError):
            predict_igtree(model, ("a", "b"))

    @pytest.mark.parametrize("seed", range(20))
    def test_matches_the_path_filter_oracle(self, seed):
        r = datagen.rng(11_000 + seed)
        data = random_dataset(r, r.randint(1, 60), 3)
        model = train_igtree(data)
        counts = data.class_counts()
        for vector, _ in data.items:
            expected = oracle_igtree_path(data.items, model.feature_order, vector, counts)
            assert predict_igtree(model, vector) == expected
        for _ in range(30):
            query = tuple(r.choice(("a", "b", "c", "d", "unseen")) for _ in range(3))
            expected = oracle_igtree_path(data.items, model.feature_order, query, counts)
            assert predict_igtree(model, query) == expected


class TestMaxEnt:
    def skewed(self):
        return dataset([(["x"], "A"), (["x"], "A"), (["x"], "A"), (["x"], "B")])

    @pytest.mark.parametrize("cutoff", [1, 2])
    def test_learns_the_three_to_one_split(self, cutoff):
        model = train_maxent(self.skewed(), cutoff=cutoff)
        dist = model.distribution(("x",))
        assert dist["A"] == pytest.approx(0.75, abs=1e-3)
        assert predict_maxent(model, ("x",)) == "A"

    def test_cutoff_drops_rare_features(self):
        with_rare = train_maxent(self.skewed(), cutoff=1)
        without = train_maxent(self.skewed(), cutoff=2)
        assert (0, "x", "B") in with_rare.weights
        assert (0, "x", "B") not in without.weights

    def test_log_likelihood_never_decreases(self):
        data = dataset([
            (["a", "p"], "X"), (["a", "q"], "X"), (["b", "p"], "Y"),
            (["b", "q"], "Z"), (["a", "p"], "X"), (["b", "p"], "Y"),
        ])
        model = train_maxent(data, iterations=40, cutoff=1)
        curve = model.trace.loglik
        assert len(curve) >= 2
        assert all(b >= a - 1e-9 for a, b in zip(curve, curve[1:]))

    def test_trace_counts_match_an_independent_recomputation(self):
        data = dataset([
            (["a", "p"], "X"), (["a", "q"], "Y"), (["b", "p"], "Y"),
            (["b", "q"], "X"), (["a", "p"], "X"),
        ])
        model = train_maxent(data, iterations=25, cutoff=1)
        empirical, expected, emp_corr, exp_corr = oracle_maxent_counts(model, data.items)
        for feature, value in model.trace.empirical.items():
            assert value == pytest.approx(empirical[feature], abs=1e-9)
        for feature, value in model.trace.expected.items():
            assert value == pytest.approx(expected[feature], abs=1e-9)
        assert model.trace.empirical_correction == pytest.approx(emp_corr, abs=1e-9)
        assert model.trace.expected_correction == pytest.approx(exp_corr, abs=1e-9)

    def test_tolerance_stops_training_early(self):
        model = train_maxent(self.skewed(), iterations=100, cutoff=1, tol=1e-6)
        assert model.trace.iterations < 100

    def test_gaussian_prior_shrinks_the_weights(self):
        plain = train_maxent(self.skewed(), cutoff=1)
        damped = train_maxent(self.skewed(), cutoff=1, sigma=1.0)
        plain_norm = sum(abs(w) for w in plain.weights.values())
        damped_norm = sum(abs(w) for w in damped.weights.values())
        assert damped_norm < plain_norm
        assert predict_maxent(damped, ("x",)) == "A"
        dist = damped.distribution(("x",))
        assert dist["A"] > 0.5

    @pytest.mark.parametrize("seed", range(10))
    def test_distribution_sums_to_one(self, seed):
        r = datagen.rng(12_000 + seed)
        data = random_dataset(r, r.randint(2, 30), 2)
        model = train_maxent(data, iterations=10, cutoff=1)
        for _ in range(10):
            query = tuple(r.choice(("a", "b", "unseen")) for _ in range(2))
            dist = model.distribution(query)
            assert sum(dist.values()) == pytest.approx(1.0)
            assert all(p >= 0.0 for p in dist.values())

    def test_training_is_deterministic(self):
        data = dataset([(["a", "p"], "X"), (["b", "p"], "Y"), (["a", "q"], "Y")])
        first = train_maxent(data, iterations=15, cutoff=1)
        second = train_maxent(data, iterations=15, cutoff=1)
        assert first.weights == second.weights
        assert first.correction == second.correction

    def test_validation(self):
        with pytest.raises(TrainingError):
            train_maxent(Dataset((), ("s0",)))
        with pytest.raises(ConfigError):
            train_maxent(self.skewed(), iterations=0)
        with pytest.raises(ConfigError):
            train_maxent(self.skewed(), cutoff=0)
        model = train_maxent(self.skewed())
        with pytest.raises(ValidationError):
            predict_maxent(model, ("x", "y"))


class TestRules:
    def test_refinement_adds_the_best_premise(self):
        data = dataset([
            (["a", "x"], "X"), (["a", "x"], "X"), (["a", "y"], "Y"),
            (["b", "x"], "Y"),
        ])
        model = train_rules(data, threshold=0.95)
        by_focus_value = {rule.premises[0][1]: rule for rule in model.rules}
        refined = by_focus_value["a"]
        assert refined.premises == ((0, "a"), (1, "x"))
        assert refined.conclusion == "X"
        assert refined.accuracy == pytest.approx(1.0)
        assert refined.support == 2
        plain = by_focus_value["b"]
        assert plain.premises == ((0, "b"),)
        assert plain.conclusion == "Y"
        assert plain.support == 1

    def test_most_specific_rules_match_first(self):
        data = dataset([
            (["a", "x"], "X"), (["a", "x"], "X"), (["a", "y"], "Y"),
            (["b", "x"], "Y"),
        ])
        model = train_rules(data, threshold=0.95)
        assert [len(r.premises) for r in model.rules] == sorted(
            (len(r.premises) for r in model.rules), reverse=True
        )
        assert predict_rules(model, ("a", "x")) == "X"
        assert predict_rules(model, ("b", "q")) == "Y"

    def test_unmatched_vectors_fall_through_to_the_default(self):
        data = dataset([
            (["a", "x"], "X"), (["a", "x"], "X"), (["a", "y"], "Y"),
            (["b", "x"], "Y"),
        ])
        model = train_rules(data, threshold=0.95)
        # ("a", "y") matches no rule: the refined rule for focus "a"
        # requires context "x" and the other rule requires focus "b"
        assert model.default_class == "X"
        assert predict_rules(model, ("a", "y")) == "X"

    def test_chunk_tag_premises_beat_pos_and_word_premises(self):
        data = dataset(
            [
                (["u", "P", "B"], "X"), (["u", "P", "B"], "X"),
                (["v", "P", "C"], "Y"),
            ],
            slot_names=("w[+0]", "p[+0]", "t[-1]"),
        )
        model = train_rules(data, threshold=0.95)
        rule = model.rules[0]
        assert rule.premises[0] == (1, "P")
        assert rule.premises[1][0] == 2

    def test_focus_defaults_to_the_focus_pos_slot(self):
        data = dataset(
            [(["u", "P", "B"], "X"), (["v", "Q", "C"], "Y")],
            slot_names=("w[+0]", "p[+0]", "t[-1]"),
        )
        model = train_rules(data)
        assert all(rule.premises[0][0] == 1 for rule in model.rules)

    def test_explicit_focus_slot(self):
        data = dataset([(["u", "P"], "X"), (["v", "P"], "Y")])
        model = train_rules(data, focus_slot=1)
        assert all(rule.premises[0] == (1, "P") for rule in model.rules)

    @pytest.mark.parametrize("seed", range(15))
    def test_stored_accuracy_and_support_describe_the_training_data(self, seed):
        r = datagen.rng(13_000 + seed)
        data = random_dataset(r, r.randint(2, 40), 3)
        threshold = r.choice((0.6, 0.8, 0.95, 1.0))
        model = train_rules(data, threshold=threshold)
        for rule in model.rules:
            covered = [
                (vector, label)
                for vector, label in data.items
                if rule.matches(vector)
            ]
            assert len(covered) == rule.support
            hits = sum(1 for _, label in covered if label == rule.conclusion)
            assert hits / len(covered) == pytest.approx(rule.accuracy)

    @pytest.mark.parametrize("seed", range(15))
    def test_one_rule_per_focus_value(self, seed):
        r = datagen.rng(14_000 + seed)
        data = random_dataset(r, r.randint(2, 40), 3)
        model = train_rules(data, threshold=0.9)
        focus_values = {vector[0] for vector, _ in data.items}
        assert {rule.premises[0][1] for rule in model.rules} == focus_values
        assert len(model.rules) == len(focus_values)

    def test_validation(self):
        data = dataset([(["a"], "X")])
        with pytest.raises(ConfigError):
            train_rules(data, threshold=0.0)
        with pytest.raises(ConfigError):
            train_rules(data, threshold=1.5)
        with pytest.raises(ValidationError):
            train_rules(data, focus_slot=3)
        with pytest.raises(TrainingError):
            train_rules(Dataset((), ("s0",)))
        model = train_rules(data)
        with pytest.raises(ValidationError):
            predict_rules(model, ("a", "b"))


class TestTagSentence:
    def test_baseline_ignores_the_window(self, tiny_corpus):
        model = train_baseline(tiny_corpus)
        sentence = make_untagged([("the", "DT"), ("dog", "NN")])
        assert tag_sentence(model, sentence) == ["B-NP", "I-NP"]

    def test_previous_decisions_feed_the_next_one(self):
        window = WindowConfig(
            left_words=0, right_words=0, use_focus_word=False,
            left_pos=0, right_pos=0, left_chunk_tags=1,
        )
        assert window.slot_names() == ("p[+0]", "t[-1]")
        data = Dataset(
            ((("A", PAD), "B-NP"), (("A", "B-NP"), "I-NP")),
            ("p[+0]", "t[-1]"),
        )
        model = train_knn(data, k=1, weights=(1.0, 1.0), window=window)
        sentence = make_untagged([("x", "A"), ("y", "A"), ("z", "A")])
        assert tag_sentence(model, sentence) == ["B-NP", "I-NP", "B-NP"]

    def test_window_argument_overrides_the_stored_window(self, tiny_corpus):
        window = WindowConfig()
        data = corpus_to_dataset(tiny_corpus, window)
        bare = train_knn(data, k=1)
        assert bare.window is None
        sentence = tiny_corpus.sentences[0]
        with pytest.raises(ConfigError):
            tag_sentence(bare, make_untagged([(t.word, t.pos) for t in sentence.tokens]))
        got = tag_sentence(
            bare, make_untagged([(t.word, t.pos) for t in sentence.tokens]), window
        )
        assert got == list(sentence.chunk_tags)

    @pytest.mark.parametrize("learner", ["knn", "igtree"])
    def test_memorising_learners_reproduce_unambiguous_training_data(
        self, learner, tiny_corpus
    ):
        window = WindowConfig()
        data = corpus_to_dataset(tiny_corpus, window)
        by_vector = {}
        for vector, label in data.items:
            assert by_vector.setdefault(vector, label) == label
        if learner == "knn":
            model = train_knn(data, k=1, window=window)
        else:
            model = train_igtree(data, window=window)
        for sentence in tiny_corpus.sentences:
            bare = make_untagged([(t.word, t.pos) for t in sentence.tokens])
            assert tag_sentence(model, bare) == list(sentence.chunk_tags)


class TestLearnerSpec:
    def test_learner_kinds(self):
        assert LEARNER_KINDS == ("baseline", "knn", "igtree", "maxent", "rules")

    def test_validation(self):
        with pytest.raises(ConfigError):
            LearnerSpec("bad name", "knn")
        with pytest.raises(ConfigError):
            LearnerSpec("", "knn")
        with pytest.raises(ConfigError):
            LearnerSpec("sys", "svm")
        with pytest.raises(ConfigError):
            LearnerSpec("sys", "knn", io_encoding=True)
        LearnerSpec("sys", "rules", io_encoding=True)

    def test_window_resolution(self):
        assert LearnerSpec("a", "knn").resolved_window() == WindowConfig()
        assert LearnerSpec("a", "maxent").resolved_window() == WindowConfig.maxent_window()
        custom = WindowConfig(left_words=1)
        assert LearnerSpec("a", "maxent", window=custom).resolved_window() == custom

    def test_train_dispatch(self, tiny_corpus):
        cases = {
            "baseline": BaselineModel,
            "knn": KnnModel,
            "igtree": IGTreeModel,
            "rules": RuleSetModel,
        }
        for learner, cls in cases.items():
            model = LearnerSpec(learner, learner).train(tiny_corpus)
            assert isinstance(model, cls)
        maxent = LearnerSpec("me", "maxent", iterations=3).train(tiny_corpus)
        assert isinstance(maxent, MaxEntModel)
        assert maxent.window == WindowConfig.maxent_window()

    def test_trained_models_carry_their_window(self, tiny_corpus):
        model = LearnerSpec("sys", "knn", k=1).train(tiny_corpus)
        assert model.window == WindowConfig()
        assert model.k == 1

    def test_default_k(self):
        assert LearnerSpec("sys", "knn").k == 3

    def test_io_encoding_spec_trains_on_io_tags(self, tiny_corpus):
        model = LearnerSpec("sys", "rules", io_encoding=True).train(tiny_corpus)
        conclusions = {rule.conclusion for rule in model.rules}
        assert all(not c.startswith("B-") for c in conclusions)
