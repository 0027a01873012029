"""Cross-component conformance: the toy-mirror server must be indistinguishable
from the client's in-process toy backend through the full explanation pipeline."""

import sys

import numpy as np
import pytest

from proxplain.bridge import BridgeBackend
from proxplain.explainer import ExplainerConfig, explain
from proxplain.models import build_corpus
from proxplain.neighborhood import NeighborhoodConfig
from proxplain.toydata import DEFAULT_LEXICON, build_toy_backend, make_review_corpus

from model_server.toy import ToyMirrorModel

DIM = 32
SEED = 0


@pytest.fixture(scope="module")
def world(tmp_path_factory):
    texts = make_review_corpus(120, seed=55)
    root = tmp_path_factory.mktemp("conformance")
    corpus_path = root / "corpus.txt"
    corpus_path.write_text("\n".join(" ".join(t) for t in texts) + "\n", encoding="utf-8")
    lexicon_path = root / "lexicon.tsv"
    lexicon_path.write_text(
        "".join(f"{tok}\t{w}\n" for tok, w in DEFAULT_LEXICON.items()), encoding="utf-8")

    toy_backend, toy_corpus = build_toy_backend(texts, DEFAULT_LEXICON, dim=DIM, seed=SEED)
    server_cmd = [sys.executable, "-m", "model_server.cli", "--mode", "toy-mirror",
                  "--corpus", str(corpus_path), "--lexicon", str(lexicon_path),
                  "--dim", str(DIM), "--seed", str(SEED)]
    bridge_backend = BridgeBackend(server_cmd)
    bridge_corpus = build_corpus(texts, bridge_backend)
    yield texts, toy_backend, toy_corpus, bridge_backend, bridge_corpus
    bridge_backend.close()


class TestModelMirroring:
    def test_encode_matches_within_wire_precision(self, world):
        texts, toy_backend, _, bridge_backend, _ = world
        probes = [["great", "food", "."], ["terrible", "slow", "service", "."], ["x"]]
        np.testing.assert_allclose(bridge_backend.encode_batch(probes),
                                   toy_backend.encode_batch(probes), atol=1e-6)

    def test_predict_matches_within_wire_precision(self, world):
        texts, toy_backend, _, bridge_backend, _ = world
        probes = [["great", "food", "."], ["bad", "coffee", "."]]
        np.testing.assert_allclose(bridge_backend.predict_batch(probes),
                                   toy_backend.predict_batch(probes), atol=1e-6)

    def test_decode_identical(self, world):
        texts, toy_backend, toy_corpus, bridge_backend, _ = world
        rng = np.random.default_rng(9)
        Z = rng.standard_normal((15, DIM))
        Z /= np.linalg.norm(Z, axis=1, keepdims=True)
        assert bridge_backend.decode_batch(Z) == toy_backend.decode_batch(Z)

    def test_handshake_declares_toy_dimensions(self, world):
        _, _, _, bridge_backend, _ = world
        assert bridge_backend.latent_dim == DIM
        assert bridge_backend.deterministic_decoder is True

    def test_mirror_embedding_bit_equality(self):
        # the mirror's arithmetic reproduces the client's table exactly
        from proxplain.models import TokenEmbedding, ToyEncoder

        texts = [["great", "food"], ["bad", "service"]]
        mirror = ToyMirrorModel(texts, DEFAULT_LEXICON, dim=16, seed=3)
        client = ToyEncoder(TokenEmbedding(dim=16, seed=3, sentiment=DEFAULT_LEXICON))
        np.testing.assert_array_equal(mirror.encode_batch(texts),
                                      client.encode_batch(texts))


class TestPipelineConformance:
    def test_token_identical_explanations_on_20_instances(self, world):
        texts, toy_backend, toy_corpus, bridge_backend, bridge_corpus = world
        instances = make_review_corpus(20, seed=66)
        cfg = ExplainerConfig(neighborhood=NeighborhoodConfig(k=6, s=5, n=40,
                                                              max_iterations=3))
        for i, query in enumerate(instances):
            a = explain(query, toy_corpus, toy_backend, cfg, seed=100 + i)
            b = explain(query, bridge_corpus, bridge_backend, cfg, seed=100 + i)
            assert a.prediction.label == b.prediction.label
            assert abs(a.prediction.p_pos - b.prediction.p_pos) <= 1e-6
            assert [f.tokens for f in a.factuals] == [f.tokens for f in b.factuals]
            assert [c.tokens for c in a.counterfactuals] == [c.tokens for c in b.counterfactuals]
            assert [e.tokens for e in a.editions] == [e.tokens for e in b.editions]
            # weights agree to 1e-6 per token; ordering of sub-precision ties may differ
            wa = {w.token: w.weight for w in a.importances}
            wb = {w.token: w.weight for w in b.importances}
            assert wa.keys() == wb.keys()
            for token, weight in wa.items():
                assert abs(weight - wb[token]) <= 1e-6, token
