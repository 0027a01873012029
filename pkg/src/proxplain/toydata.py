"""Seeded toy corpora and lexicons for demos, tests, and the CLI default backend."""

from __future__ import annotations

import numpy as np

from .models import (
    ComposedBackend,
    Corpus,
    CorpusNearestDecoder,
    GreedyBagDecoder,
    LexiconBlackBox,
    TokenEmbedding,
    ToyEncoder,
    build_corpus,
)

DEFAULT_LEXICON: dict[str, float] = {
    "great": 2.0, "amazing": 2.0, "excellent": 2.0, "perfect": 2.0, "wonderful": 1.5,
    "delicious": 1.5, "best": 1.5, "love": 1.5, "good": 1.0, "tasty": 1.0,
    "friendly": 1.0, "fresh": 1.0, "worth": 1.0, "definitely": 1.0, "recommend": 1.0,
    "terrible": -2.0, "awful": -2.0, "horrible": -2.0, "disgusting": -2.0, "worst": -2.0,
    "hate": -1.5, "dirty": -1.5, "disappointing": -1.5, "not": -1.5, "bad": -1.0,
    "bland": -1.0, "rude": -1.0, "slow": -1.0, "never": -1.0, "stale": -1.0,
}

_POSITIVE_ADJ = ["great", "amazing", "excellent", "perfect", "wonderful", "delicious",
                 "good", "tasty", "friendly", "fresh"]
_NEGATIVE_ADJ = ["terrible", "awful", "horrible", "disgusting", "bland", "rude",
                 "slow", "dirty", "bad", "stale"]
_NOUNS = ["food", "service", "place", "pizza", "staff", "coffee", "burger", "sushi",
          "atmosphere", "dessert"]


def make_review_corpus(size: int, seed: int = 0) -> list[list[str]]:
    """Short restaurant-review style sentences with planted sentiment words."""
    rng = np.random.default_rng(seed)
    sentences = []
    for _ in range(size):
        polarity = rng.integers(0, 2)
        adjs = _POSITIVE_ADJ if polarity else _NEGATIVE_ADJ
        adj = adjs[rng.integers(0, len(adjs))]
        noun = _NOUNS[rng.integers(0, len(_NOUNS))]
        template = int(rng.integers(0, 5))
        if template == 0:
            s = [adj, noun, "."]
        elif template == 1:
            s = ["the", noun, "was", adj, "."]
        elif template == 2:
            adj2 = adjs[rng.integers(0, len(adjs))]
            s = [adj, adj2, noun, "."]
        elif template == 3:
            s = ["really", adj, noun, "here", "."]
        else:
            verb = "love" if polarity else "hate"
            s = ["i", verb, "the", adj, noun, "."]
        sentences.append(s)
    return sentences


def build_toy_backend(corpus_texts, lexicon: dict[str, float] | None = None,
                      dim: int = 64, seed: int = 0, decoder: str = "corpus",
                      ) -> tuple[ComposedBackend, Corpus]:
    """Assemble the deterministic toy world over a corpus.

    `decoder` is "corpus" (nearest-corpus-sentence, corpus-closed) or "greedy"
    (matching-pursuit bag of words, produces novel texts).
    """
    lexicon = DEFAULT_LEXICON if lexicon is None else lexicon
    embedding = TokenEmbedding(dim=dim, seed=seed, sentiment=lexicon)
    encoder = ToyEncoder(embedding)
    blackbox = LexiconBlackBox(lexicon)
    vocabulary = sorted({t for text in corpus_texts for t in text} | set(lexicon))

    latents = encoder.encode_batch([list(t) for t in corpus_texts])
    if decoder == "corpus":
        dec = CorpusNearestDecoder(corpus_texts, latents)
    elif decoder == "greedy":
        dec = GreedyBagDecoder(embedding, vocabulary)
    else:
        raise ValueError(f"unknown decoder {decoder!r}")
    backend = ComposedBackend(encoder, dec, blackbox, vocabulary=vocabulary)
    corpus = build_corpus(corpus_texts, backend)
    return backend, corpus


# ---------------------------------------------------------------------------
# Planted fixture: flipping "would not recommend ." by one replacement.
#
# Every corpus occurrence of "would" has "definitely" inside its +-2 window and
# no corpus text pairs "definitely" with "not", so the placement likelihood is
# maximal for replacing the negation: "would definitely recommend .".

EDITION_DEMO_QUERY = ["would", "not", "recommend", "."]

EDITION_DEMO_LEXICON: dict[str, float] = {
    "definitely": 2.0, "great": 2.0, "amazing": 2.0, "excellent": 2.0, "love": 1.5,
    "best": 1.5, "recommend": 1.0,
    "not": -2.0, "never": -1.5, "terrible": -2.0, "awful": -2.0, "worst": -2.0,
    "bad": -1.5, "avoid": -1.5,
}

EDITION_DEMO_CORPUS: list[list[str]] = [
    ["would", "definitely", "recommend", "."],
    ["i", "would", "definitely", "recommend", "."],
    ["would", "definitely", "come", "again", "."],
    ["definitely", "the", "best", "place", "."],
    ["great", "food", "and", "great", "service", "."],
    ["amazing", "place", "love", "it", "."],
    ["excellent", "service", "."],
    ["do", "not", "recommend", "."],
    ["not", "recommend", "this", "place", "."],
    ["never", "coming", "back", "."],
    ["terrible", "food", "."],
    ["awful", "service", "."],
    ["the", "worst", "place", "."],
    ["bad", "food", "bad", "service", "."],
    ["avoid", "this", "place", "."],
]


def edition_demo_world(dim: int = 64, seed: int = 0) -> tuple[ComposedBackend, Corpus]:
    return build_toy_backend(EDITION_DEMO_CORPUS, EDITION_DEMO_LEXICON, dim=dim, seed=seed)
