import math

import numpy as np
import pytest

from proxplain.edition import ContextModel, build_context_model
from proxplain.errors import ProxplainError
from proxplain.evaluation import (
    EvaluationConfig,
    baseline_edit,
    evaluate,
    guided_edit,
    report_to_dict,
)
from proxplain.explainer import ExplainerConfig, explain
from proxplain.models import NEGATIVE, POSITIVE, LexiconBlackBox, strong_opposite_words
from proxplain.neighborhood import NeighborhoodConfig
from proxplain.surrogate import EXTRINSIC, INTRINSIC, WordImportance
from proxplain.toydata import DEFAULT_LEXICON, build_toy_backend, make_review_corpus


def wi(token, weight, origin=INTRINSIC):
    supports = "predicted_class" if weight >= 0 else "opposite_class"
    return WordImportance(token=token, weight=weight, origin=origin, supports=supports)


def flat_context():
    return ContextModel(window=1)


class TestGuidedEdit:
    def test_single_supporting_word_deleted(self):
        edited, ops = guided_edit(["fries", "worth", "it"], [wi("worth", 0.51)],
                                  0.1, flat_context())
        assert edited == ["fries", "it"]
        assert ops == 1

    def test_threshold_above_all_weights_means_no_edit(self):
        query = ["great", "food"]
        edited, ops = guided_edit(query, [wi("great", 0.4), wi("food", 0.05)],
                                  0.9, flat_context())
        assert edited == query
        assert ops == 0

    def test_deletion_removes_all_occurrences_one_op(self):
        edited, ops = guided_edit(["x", "y", "x", "x"], [wi("x", 0.5)], 0.1, flat_context())
        assert edited == ["y"]
        assert ops == 1

    def test_opposing_word_inserted_at_optimal_gap(self):
        ctx = build_context_model([["not", "worth", "it"]], window=1)
        edited, ops = guided_edit(["worth", "it"], [wi("not", -0.6, EXTRINSIC)], 0.1, ctx)
        assert edited == ["not", "worth", "it"]
        assert ops == 1

    def test_never_empties_the_sentence(self):
        edited, ops = guided_edit(["worth"], [wi("worth", 0.9)], 0.1, flat_context())
        assert edited == ["worth"]
        assert ops == 0

    def test_deleting_only_positive_word_drops_confidence(self):
        lexicon = {"worth": 1.0}
        bb = LexiconBlackBox(lexicon)
        query = ["fries", "worth", "it"]
        before = bb.predict_batch([query])[0][0]
        edited, _ = guided_edit(query, [wi("worth", 0.51)], 0.1, flat_context())
        after = bb.predict_batch([edited])[0][0]
        assert after < before
        assert after == pytest.approx(1.0 / (1.0 + math.exp(0.0)))

    def test_raising_eta_never_increases_operations(self):
        imps = [wi("a", 0.5), wi("b", 0.25, EXTRINSIC), wi("c", -0.15, EXTRINSIC)]
        query = ["a", "b2", "c2", "d"]
        ctx = flat_context()
        ops_by_eta = [guided_edit(query, imps, eta, ctx)[1]
                      for eta in (0.05, 0.1, 0.2, 0.3, 0.6)]
        assert ops_by_eta == sorted(ops_by_eta, reverse=True)

    def test_deletions_precede_insertions(self):
        ctx = flat_context()
        imps = [wi("bad", -0.9, EXTRINSIC), wi("good", 0.8)]
        edited, ops = guided_edit(["good", "food"], imps, 0.1, ctx)
        assert "good" not in edited
        assert "bad" in edited
        assert ops == 2


class TestBaselineEdit:
    def test_single_token_query_only_inserts(self):
        rng = np.random.default_rng(70)
        edited, ops = baseline_edit(["solo"], POSITIVE, ["neg1", "neg2"], 3, rng)
        assert ops == 1
        assert "solo" in edited
        assert len(edited) == 2

    def test_seeded_run_reproducible(self):
        strong = [f"s{i}" for i in range(10)]
        query = ["a", "b", "c", "d", "e"]
        a = baseline_edit(query, POSITIVE, strong, 3, np.random.default_rng(71))
        b = baseline_edit(query, POSITIVE, strong, 3, np.random.default_rng(71))
        assert a == b

    def test_inserted_word_from_strong_list(self):
        bb = LexiconBlackBox({"up": 2.0, "down": -2.0, "meh": 0.1})
        vocab = ["up", "down", "meh"]
        strong = strong_opposite_words(bb.predict_batch, vocab, POSITIVE, 2)
        rng = np.random.default_rng(72)
        for _ in range(20):
            edited, ops = baseline_edit(["a", "b", "c"], POSITIVE, strong, 3, rng)
            inserted = [t for t in edited if t in set(strong)]
            assert len(inserted) >= 1

    def test_operations_count_drops_plus_one(self):
        rng = np.random.default_rng(73)
        for _ in range(50):
            query = ["a", "b", "c", "d", "e", "f"]
            edited, ops = baseline_edit(query, NEGATIVE, ["w"], 3, rng)
            drops = ops - 1
            assert 0 <= drops <= 3
            assert len(edited) == len(query) - drops + 1

    def test_never_empty(self):
        rng = np.random.default_rng(74)
        for _ in range(30):
            edited, _ = baseline_edit(["one"], NEGATIVE, ["w"], 3, rng)
            assert len(edited) >= 1


@pytest.fixture(scope="module")
def eval_world():
    texts = make_review_corpus(120, seed=80)
    backend, corpus = build_toy_backend(texts, DEFAULT_LEXICON, dim=32, seed=1)
    cfg = ExplainerConfig(neighborhood=NeighborhoodConfig(k=6, s=5, n=40, max_iterations=3))

    def explain_fn(tokens, seed):
        return explain(tokens, corpus, backend, cfg, seed=seed)

    vocabulary = sorted({t for text in corpus.texts for t in text})
    return backend, corpus, explain_fn, vocabulary


class TestEvaluate:
    def test_report_structure_and_determinism(self, eval_world):
        backend, corpus, explain_fn, vocab = eval_world
        tests = make_review_corpus(8, seed=81)
        cfg = EvaluationConfig(eta=0.1, eta_high=0.3)
        r1 = evaluate(tests, explain_fn, backend, vocab, cfg, master_seed=5)
        r2 = evaluate(tests, explain_fn, backend, vocab, cfg, master_seed=5)
        assert report_to_dict(r1) == report_to_dict(r2)
        d = report_to_dict(r1)
        assert d["config"]["eta"] == 0.1 and d["config"]["eta_high"] == 0.3
        assert set(d["methods"]) == {"guided", "baseline"}
        assert len(d["methods"]["guided"]["instances"]) == 8

    def test_completeness_zero_when_nothing_edited(self, eval_world):
        backend, corpus, explain_fn, vocab = eval_world
        tests = make_review_corpus(5, seed=82)
        cfg = EvaluationConfig(eta=50.0, eta_high=60.0)  # above any weight
        report = evaluate(tests, explain_fn, backend, vocab, cfg, master_seed=6)
        assert report.guided_aggregate.completeness_mean == pytest.approx(0.0)
        assert report.guided_aggregate.completeness_std == pytest.approx(0.0)
        # zero-operation instances are excluded from compactness ...
        assert report.guided_aggregate.compactness_count == 0
        assert report.guided_aggregate.compactness_mean is None
        # ... but present in completeness
        assert len(report.guided) == 5

    def test_flip_implies_positive_drop(self, eval_world):
        backend, corpus, explain_fn, vocab = eval_world
        tests = make_review_corpus(10, seed=83)
        cfg = EvaluationConfig(eta=0.1, eta_high=0.3)
        report = evaluate(tests, explain_fn, backend, vocab, cfg, master_seed=7)
        for row in report.guided + report.baseline:
            before = backend.predict(list(row.query))
            after = backend.predict(list(row.edited))
            if after.label != before.label:
                assert row.confidence_drop > 0

    def test_drop_bounded(self, eval_world):
        backend, corpus, explain_fn, vocab = eval_world
        tests = make_review_corpus(10, seed=84)
        report = evaluate(tests, explain_fn, backend, vocab,
                          EvaluationConfig(), master_seed=8)
        for row in report.guided + report.baseline:
            assert -1.0 <= row.confidence_drop <= 1.0

    def test_failures_recorded_and_excluded(self, eval_world):
        backend, corpus, explain_fn, vocab = eval_world

        def flaky(tokens, seed):
            if tokens[0] == "poison":
                raise ProxplainError("synthetic failure")
            return explain_fn(tokens, seed)

        tests = [["poison", "pill"]] + make_review_corpus(4, seed=85)
        report = evaluate(tests, flaky, backend, vocab, EvaluationConfig(), master_seed=9)
        assert len(report.failures) == 1
        assert report.failures[0]["query"] == "poison pill"
        assert len(report.guided) == 4
        assert len(report.baseline) == 4

    def test_empty_test_set_rejected(self, eval_world):
        backend, corpus, explain_fn, vocab = eval_world
        with pytest.raises(ProxplainError):
            evaluate([], explain_fn, backend, vocab, EvaluationConfig(), master_seed=1)

    def test_eta_high_must_exceed_eta(self):
        with pytest.raises(ValueError):
            EvaluationConfig(eta=0.3, eta_high=0.3)
