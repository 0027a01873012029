"""Mirror of the client-side toy model, reimplemented without importing it.

The construction is a pure function of (corpus, lexicon, dim, seed), so this
copy reproduces the client's in-process toy model bit-for-bit (and therefore
matches on the wire at the protocol's 9 significant digits):

* per-token embedding: unit Gaussian vector seeded by blake2b(seed, token),
  shifted along a planted sentiment axis by strength * lexicon weight;
* encoder: L2-normalized mean of token embeddings;
* decoder: nearest corpus sentence by cosine distance ("corpus"), or greedy
  matching pursuit over the vocabulary with at most 12 tokens ("greedy");
* classifier: logistic of the summed lexicon weights.
"""

from __future__ import annotations

import hashlib
import math

import numpy as np

SENTIMENT_STRENGTH = 0.6
GREEDY_MAX_LEN = 12
GREEDY_STOP = 0.1
TIE_EPS = 1e-8  # decode near-ties resolve by corpus order / token order


def _token_seed(token: str, seed: int) -> int:
    digest = hashlib.blake2b(f"{seed}\x00{token}".encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def load_corpus(path) -> list[list[str]]:
    texts = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                texts.append(line.split(" "))
    return texts


def load_lexicon(path) -> dict[str, float]:
    lexicon: dict[str, float] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip():
                continue
            token, _, weight = line.partition("\t")
            if not weight:
                raise ValueError(f"malformed lexicon line: {line!r}")
            lexicon[token] = float(weight)
    return lexicon


class ToyMirrorModel:
    """Deterministic toy world equal to the client's built-in backend."""

    deterministic = True

    def __init__(self, corpus_texts, lexicon: dict[str, float], dim: int = 64,
                 seed: int = 0, decoder: str = "corpus"):
        self.dim = int(dim)
        self.seed = int(seed)
        self.lexicon = dict(lexicon)
        self.decoder_kind = decoder
        self._embeddings: dict[str, np.ndarray] = {}

        axis = np.random.default_rng(_token_seed("\x01sentiment-axis", self.seed)).standard_normal(self.dim)
        self._axis = axis / np.linalg.norm(axis)

        self.corpus_texts = [list(t) for t in corpus_texts]
        self.corpus_latents = self.encode_batch(self.corpus_texts)

        self.vocabulary = sorted({t for text in corpus_texts for t in text} | set(lexicon))
        if decoder == "greedy":
            mat = np.stack([self._embedding(t) for t in self.vocabulary])
            self._units = mat / np.linalg.norm(mat, axis=1, keepdims=True)
        elif decoder != "corpus":
            raise ValueError(f"unknown decoder {decoder!r}")

    @property
    def latent_dim(self) -> int:
        return self.dim

    def _embedding(self, token: str) -> np.ndarray:
        v = self._embeddings.get(token)
        if v is None:
            base = np.random.default_rng(_token_seed(token, self.seed)).standard_normal(self.dim)
            base /= np.linalg.norm(base)
            v = base + SENTIMENT_STRENGTH * self.lexicon.get(token, 0.0) * self._axis
            self._embeddings[token] = v
        return v

    def encode_batch(self, texts) -> np.ndarray:
        out = np.empty((len(texts), self.dim))
        for i, tokens in enumerate(texts):
            if not tokens:
                raise ValueError("cannot encode empty text")
            mean = np.mean([self._embedding(t) for t in tokens], axis=0)
            norm = np.linalg.norm(mean)
            if norm == 0.0:
                raise ValueError("degenerate latent vector")
            out[i] = mean / norm
        return out

    def decode_batch(self, vectors) -> list[list[str]]:
        Z = np.asarray(vectors, dtype=np.float64)
        if Z.ndim != 2 or Z.shape[1] != self.dim:
            raise ValueError(f"expected vectors of dimension {self.dim}")
        if self.decoder_kind == "corpus":
            return [self._decode_corpus(z) for z in Z]
        return [self._decode_greedy(z) for z in Z]

    def _decode_corpus(self, z: np.ndarray) -> list[str]:
        norms = np.linalg.norm(self.corpus_latents, axis=1) * np.linalg.norm(z)
        cos = (self.corpus_latents @ z) / norms
        dist = 1.0 - np.clip(cos, -1.0, 1.0)
        dist[np.all(self.corpus_latents == z, axis=1)] = 0.0
        nearest = int(np.argmax(dist <= dist.min() + TIE_EPS))
        return list(self.corpus_texts[nearest])

    def _decode_greedy(self, z: np.ndarray) -> list[str]:
        residual = z.astype(np.float64).copy()
        tokens: list[str] = []
        while len(tokens) < GREEDY_MAX_LEN:
            scores = self._units @ residual
            best = int(np.argmax(scores >= scores.max() - TIE_EPS))
            if tokens and scores[best] <= GREEDY_STOP:
                break
            tokens.append(self.vocabulary[best])
            residual = residual - scores[best] * self._units[best]
        return tokens

    def predict_batch(self, texts) -> list[list[float]]:
        out = []
        for tokens in texts:
            if not tokens:
                raise ValueError("cannot classify empty text")
            score = sum(self.lexicon.get(t, 0.0) for t in tokens)
            p = 1.0 / (1.0 + math.exp(-score))
            out.append([p, 1.0 - p])
        return out
