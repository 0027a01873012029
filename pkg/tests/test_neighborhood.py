import numpy as np
import pytest
from _worlds import CountingBackend, synthetic_world, unit

from proxplain.errors import DegenerateNeighborhoodError, LandmarkSeedingError
from proxplain.latent import cosine_distance
from proxplain.models import NEGATIVE, POSITIVE, Corpus, VectorTokenBackend, build_corpus
from proxplain.neighborhood import (
    NeighborhoodConfig,
    approximate,
    construct,
    seed_landmarks,
)


def random_corpus(rng, size, dim=8):
    """A latent-only corpus with random labels (no backend involved)."""
    latents = rng.standard_normal((size, dim))
    latents /= np.linalg.norm(latents, axis=1, keepdims=True)
    labels = [POSITIVE if rng.random() < 0.5 else NEGATIVE for _ in range(size)]
    texts = [[f"t{i}"] for i in range(size)]
    scores = np.array([[0.9, 0.1] if lab == POSITIVE else [0.1, 0.9] for lab in labels])
    return Corpus(texts=texts, latents=latents, labels=labels, scores=scores)


class TestSeedLandmarks:
    def test_matches_bruteforce_sort(self):
        rng = np.random.default_rng(20)
        for trial in range(20):
            corpus = random_corpus(rng, int(rng.integers(10, 120)))
            pivot = unit(rng.standard_normal(8))
            k = int(rng.integers(1, 10))
            got = seed_landmarks(pivot, POSITIVE, corpus, k)
            # oracle: sort all negative entries by distance, stable on index
            neg = [(cosine_distance(pivot, corpus.latents[i]), i)
                   for i in range(len(corpus)) if corpus.labels[i] == NEGATIVE]
            neg.sort(key=lambda pair: pair[0])
            expected = [i for _, i in neg[:k]]
            assert [lm.tokens for lm in got.landmarks] == [tuple(corpus.texts[i]) for i in expected]
            assert [lm.distance_to_pivot for lm in got.landmarks] == pytest.approx(
                [d for d, _ in neg[:k]])

    def test_planted_distances(self):
        # three opposite-class entries at distances 0.2, 0.5, 0.9 with k=2
        pivot = np.array([1.0, 0.0])

        def at_distance(d):
            angle = np.arccos(1.0 - d)
            return np.array([np.cos(angle), np.sin(angle)])

        latents = np.stack([at_distance(0.5), at_distance(0.9), at_distance(0.2), [1.0, 0.01]])
        corpus = Corpus(texts=[["a"], ["b"], ["c"], ["d"]], latents=latents,
                        labels=[NEGATIVE, NEGATIVE, NEGATIVE, POSITIVE],
                        scores=np.array([[0.1, 0.9]] * 3 + [[0.9, 0.1]]))
        got = seed_landmarks(pivot, POSITIVE, corpus, 2)
        assert [lm.tokens for lm in got.landmarks] == [("c",), ("a",)]

    def test_saturation_warns_and_returns_all(self):
        rng = np.random.default_rng(21)
        corpus = random_corpus(rng, 10)
        n_neg = corpus.labels.count(NEGATIVE)
        pivot = unit(rng.standard_normal(8))
        with pytest.warns(UserWarning, match="only"):
            got = seed_landmarks(pivot, POSITIVE, corpus, n_neg + 5)
        assert len(got) == n_neg

    def test_single_class_corpus_is_error(self):
        rng = np.random.default_rng(22)
        corpus = random_corpus(rng, 10)
        corpus.labels = [POSITIVE] * 10
        with pytest.raises(LandmarkSeedingError, match="cannot seed landmarks"):
            seed_landmarks(unit(rng.standard_normal(8)), POSITIVE, corpus, 3)

    def test_ties_break_by_corpus_order(self):
        pivot = np.array([1.0, 0.0])
        z = np.array([0.0, 1.0])
        corpus = Corpus(texts=[["first"], ["second"]], latents=np.stack([z, z]),
                        labels=[NEGATIVE, NEGATIVE], scores=np.array([[0.1, 0.9]] * 2))
        got = seed_landmarks(pivot, POSITIVE, corpus, 1)
        assert got.landmarks[0].tokens == ("first",)


class TestApproximate:
    def test_single_landmark_degenerate_draw(self):
        backend, corpus, query, w, pivot = synthetic_world(seed=30)
        query_class = backend.predict(query).label
        seeds = seed_landmarks(pivot, query_class, corpus, 1)
        cfg = NeighborhoodConfig(k=3, s=4)
        rng = np.random.default_rng(0)
        neighbors, new_set = approximate(pivot, query_class, seeds, cfg, backend, rng)
        assert len(new_set) == 3
        # with one landmark the first stage collapses to that point and the
        # second stage walks the landmark->pivot segment
        c = seeds.landmarks[0].latent
        for nb in neighbors:
            t = np.linspace(0, 1, cfg.s + 1)
            on_segment = any(
                np.allclose(nb.latent, c + ti * (pivot - c), atol=1e-9) for ti in t
            )
            assert on_segment

    def test_admitted_landmark_not_farther_than_drawn(self):
        backend, corpus, query, w, pivot = synthetic_world(seed=31)
        query_class = backend.predict(query).label
        seeds = seed_landmarks(pivot, query_class, corpus, 8)
        cfg = NeighborhoodConfig(k=10, s=5)
        trace = []
        approximate(pivot, query_class, seeds, cfg, backend,
                    np.random.default_rng(1), trace=trace)
        assert len(trace) == 10
        for rec in trace:
            assert not rec["retained_landmark"]
            nearer = min(rec["drawn_distances"])
            assert rec["admitted_distance"] <= nearer + 1e-12

    def test_one_landmark_admitted_per_repeat(self):
        backend, corpus, query, w, pivot = synthetic_world(seed=32)
        query_class = backend.predict(query).label
        seeds = seed_landmarks(pivot, query_class, corpus, 5)
        cfg = NeighborhoodConfig(k=7, s=3)
        _, new_set = approximate(pivot, query_class, seeds, cfg, backend,
                                 np.random.default_rng(2))
        assert len(new_set) == cfg.k

    def test_every_neighbor_carries_confidence_and_distance(self):
        backend, corpus, query, w, pivot = synthetic_world(seed=33)
        query_class = backend.predict(query).label
        seeds = seed_landmarks(pivot, query_class, corpus, 4)
        neighbors, _ = approximate(pivot, query_class, seeds, NeighborhoodConfig(k=4, s=4),
                                   backend, np.random.default_rng(3))
        for nb in neighbors:
            assert abs(nb.p_pos + nb.p_neg - 1.0) <= 1e-9
            assert nb.distance_to_pivot == pytest.approx(
                cosine_distance(nb.latent, pivot), abs=1e-12)


@pytest.fixture(scope="module")
def world():
    return synthetic_world(dim=16, n_corpus=300, seed=34)


class TestConstruct:
    def test_output_contracts(self, world):
        backend, corpus, query, w, pivot = world
        cfg = NeighborhoodConfig(k=6, s=5, n=40, max_iterations=3)
        hood = construct(query, corpus, cfg, backend, np.random.default_rng(4))
        assert len(hood.factuals) <= cfg.n
        assert len(hood.counterfactuals) <= cfg.n
        texts = [nb.tokens for nb in hood.neighbors]
        assert len(texts) == len(set(texts)), "duplicate token sequences in output"
        query_class = hood.prediction.label
        for nb in hood.factuals:
            assert nb.label == query_class
        for nb in hood.counterfactuals:
            assert nb.label != query_class

    def test_output_sorted_by_distance(self, world):
        backend, corpus, query, w, pivot = world
        cfg = NeighborhoodConfig(k=6, s=5, n=40, max_iterations=3)
        hood = construct(query, corpus, cfg, backend, np.random.default_rng(5))
        for group in (hood.factuals, hood.counterfactuals):
            dists = [nb.distance_to_pivot for nb in group]
            assert dists == sorted(dists)

    def test_decode_budget(self, world):
        backend, corpus, query, w, pivot = world
        counting = CountingBackend(backend)
        cfg = NeighborhoodConfig(k=5, s=4, n=30, max_iterations=4, patience=10)
        construct(query, corpus, cfg, counting, np.random.default_rng(6))
        budget = cfg.max_iterations * cfg.k * (cfg.s + 1) ** 2
        assert counting.decode_rows <= budget

    def test_landmark_minimum_never_regresses(self, world):
        backend, corpus, query, w, pivot = world
        cfg = NeighborhoodConfig(k=5, s=5, n=30, max_iterations=6, patience=10)
        hood = construct(query, corpus, cfg, backend, np.random.default_rng(7),
                         keep_trace=True)
        minima = [it["min_landmark_distance"] for it in hood.trace]
        assert minima == sorted(minima, reverse=True)
        assert hood.final_min_distance <= hood.seed_min_distance + 1e-12

    def test_patience_terminates_early(self, world):
        backend, corpus, query, w, pivot = world
        cfg = NeighborhoodConfig(k=4, s=4, n=30, max_iterations=50, patience=2,
                                 improvement_tol=1e-6)
        hood = construct(query, corpus, cfg, backend, np.random.default_rng(8))
        assert hood.iterations < 50

    def test_counterfactuals_get_closer_than_seeds(self, world):
        backend, corpus, query, w, pivot = world
        cfg = NeighborhoodConfig(k=8, s=8, n=50, max_iterations=5)
        hood = construct(query, corpus, cfg, backend, np.random.default_rng(9))
        assert hood.final_min_distance < hood.seed_min_distance
        closest = hood.counterfactuals[0].distance_to_pivot
        assert closest < hood.seed_min_distance

    def test_missing_factuals_is_degenerate_error(self):
        # corpus entirely opposite to the query class and a corpus-closed
        # decoder leave no factual to report
        rng = np.random.default_rng(35)
        w = unit(rng.standard_normal(8))
        backend = VectorTokenBackend(w, gain=4.0)
        pts = rng.standard_normal((40, 8))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        pts = pts - np.outer(np.clip(pts @ w, 0, None) + 0.2, w)  # all negative side

        from proxplain.models import CorpusNearestDecoder, ComposedBackend

        texts = [backend.decode(z) for z in pts]
        corpus_backend = ComposedBackend(backend, CorpusNearestDecoder(texts, pts), backend)
        corpus = build_corpus(texts, corpus_backend)
        assert set(corpus.labels) == {NEGATIVE}
        query = backend.decode(unit(w + 0.1 * rng.standard_normal(8)))
        assert corpus_backend.predict(query).label == POSITIVE
        with pytest.raises(DegenerateNeighborhoodError, match="factual") as exc_info:
            construct(query, corpus, NeighborhoodConfig(k=4, s=4, n=10, max_iterations=2),
                      corpus_backend, np.random.default_rng(10))
        assert exc_info.value.missing_class == "factual"
        assert "landmark_distances" in exc_info.value.diagnostics

    def test_seeding_error_propagates(self):
        rng = np.random.default_rng(36)
        backend, corpus, query, w, pivot = synthetic_world(seed=36)
        corpus.labels = [backend.predict(query).label] * len(corpus)
        with pytest.raises(LandmarkSeedingError):
            construct(query, corpus, NeighborhoodConfig(k=3, s=3), backend,
                      np.random.default_rng(11))

    def test_reproducible_under_seed(self, world):
        backend, corpus, query, w, pivot = world
        cfg = NeighborhoodConfig(k=5, s=5, n=20, max_iterations=3)
        a = construct(query, corpus, cfg, backend, np.random.default_rng(12))
        b = construct(query, corpus, cfg, backend, np.random.default_rng(12))
        assert [nb.tokens for nb in a.neighbors] == [nb.tokens for nb in b.neighbors]
        assert [nb.distance_to_pivot for nb in a.neighbors] == [
            nb.distance_to_pivot for nb in b.neighbors]
