"""Model contracts and deterministic in-process toy implementations.

The explanation engine only ever sees three callables: an encoder text->vector,
a decoder vector->text, and a black-box classifier text->confidence pair.
`ModelBackend` bundles them. The toy backends below are deliberately cheap and
fully deterministic so that every pipeline stage can be verified at desk scale:

* `ToyEncoder` embeds a text as the L2-normalized mean of per-token embedding
  vectors drawn from a seeded pseudo-random table, with sentiment-bearing
  tokens shifted along a planted direction.
* `CorpusNearestDecoder` snaps a latent vector to the nearest corpus sentence.
* `GreedyBagDecoder` runs matching pursuit over the vocabulary and emits novel
  bag-of-words sentences (at most 12 tokens).
* `LexiconBlackBox` scores a text by summing per-token lexicon weights through
  a logistic; `LatentLinearBlackBox` thresholds a linear functional of the
  encoded text.

All objects are read-only after construction and safe for concurrent use.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateVectorError, ProxplainError
from .latent import as_latent, cosine_distances_to

POSITIVE = "positive"
NEGATIVE = "negative"

MAX_BAG_DECODE_LEN = 12


def opposite(label: str) -> str:
    return NEGATIVE if label == POSITIVE else POSITIVE


@dataclass(frozen=True)
class Prediction:
    """Binary confidence pair; p_pos + p_neg == 1 within 1e-9."""

    p_pos: float
    p_neg: float

    def __post_init__(self):
        if not (math.isfinite(self.p_pos) and math.isfinite(self.p_neg)):
            raise ProxplainError("non-finite confidence")
        if abs(self.p_pos + self.p_neg - 1.0) > 1e-9:
            raise ProxplainError(f"confidences must sum to 1, got {self.p_pos + self.p_neg}")

    @property
    def label(self) -> str:
        # exact ties break toward positive
        return POSITIVE if self.p_pos >= self.p_neg else NEGATIVE

    def confidence_in(self, label: str) -> float:
        return self.p_pos if label == POSITIVE else self.p_neg


def check_tokens(tokens) -> list[str]:
    """Validate a token sequence: non-empty, each token a whitespace-free string."""
    toks = list(tokens)
    if not toks:
        raise ProxplainError("empty token sequence")
    for t in toks:
        if not isinstance(t, str) or not t or any(c.isspace() for c in t):
            raise ProxplainError(f"invalid token: {t!r}")
    return toks


class ModelBackend:
    """Bundle of encoder / decoder / black box, batch-first.

    Subclasses set `latent_dim` and `deterministic_decoder` and implement the
    three *_batch methods. Single-item helpers are provided for convenience.
    """

    latent_dim: int
    deterministic_decoder: bool

    def encode_batch(self, texts) -> np.ndarray:
        raise NotImplementedError

    def decode_batch(self, vectors) -> list[list[str]]:
        raise NotImplementedError

    def predict_batch(self, texts) -> np.ndarray:
        raise NotImplementedError

    def encode(self, tokens) -> np.ndarray:
        return self.encode_batch([tokens])[0]

    def decode(self, vector) -> list[str]:
        return self.decode_batch(np.asarray(vector, dtype=np.float64)[None, :])[0]

    def predict(self, tokens) -> Prediction:
        row = self.predict_batch([tokens])[0]
        return Prediction(float(row[0]), float(row[1]))

    def close(self):
        pass


# ---------------------------------------------------------------------------
# Toy embedding table


def _token_seed(token: str, seed: int) -> int:
    digest = hashlib.blake2b(f"{seed}\x00{token}".encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


class TokenEmbedding:
    """Deterministic per-token embedding table.

    Each token gets a unit pseudo-random base vector derived from
    blake2b(seed, token); tokens with a sentiment weight are additionally
    shifted along a planted direction so that latent geometry correlates with
    sentiment. The mapping is a pure function of (token, dim, seed, sentiment)
    and is therefore reproducible across processes.
    """

    def __init__(self, dim: int = 64, seed: int = 0, sentiment: dict[str, float] | None = None,
                 strength: float = 0.6):
        self.dim = int(dim)
        self.seed = int(seed)
        self.sentiment = dict(sentiment or {})
        self.strength = float(strength)
        self._cache: dict[str, np.ndarray] = {}
        axis = np.random.default_rng(_token_seed("\x01sentiment-axis", self.seed)).standard_normal(self.dim)
        self.sentiment_axis = axis / np.linalg.norm(axis)

    def vector(self, token: str) -> np.ndarray:
        v = self._cache.get(token)
        if v is None:
            base = np.random.default_rng(_token_seed(token, self.seed)).standard_normal(self.dim)
            base /= np.linalg.norm(base)
            w = self.sentiment.get(token, 0.0)
            v = base + self.strength * w * self.sentiment_axis
            v.setflags(write=False)
            self._cache[token] = v
        return v

    def matrix(self, tokens) -> np.ndarray:
        return np.stack([self.vector(t) for t in tokens])


class ToyEncoder:
    """L2-normalized mean of per-token embeddings; deterministic."""

    def __init__(self, embedding: TokenEmbedding):
        self.embedding = embedding
        self.latent_dim = embedding.dim

    def encode(self, tokens) -> np.ndarray:
        return self.encode_batch([tokens])[0]

    def encode_batch(self, texts) -> np.ndarray:
        out = np.empty((len(texts), self.latent_dim))
        for i, tokens in enumerate(texts):
            toks = check_tokens(tokens)
            mean = self.embedding.matrix(toks).mean(axis=0)
            norm = np.linalg.norm(mean)
            if norm == 0.0:
                raise DegenerateVectorError("degenerate latent vector: zero norm")
            out[i] = mean / norm
        return out


class CorpusNearestDecoder:
    """Map a latent vector to the corpus sentence nearest in cosine distance.

    Exact and corpus-closed: every decode returns a corpus text. Entries within
    DECODE_TIE_EPS of the minimum count as tied and resolve toward the earlier
    corpus entry; the window absorbs float dust (interpolation midpoints between
    two corpus vectors are exactly equidistant from both) and keeps decodes
    stable across the 9-digit wire serialization.
    """

    deterministic = True

    DECODE_TIE_EPS = 1e-8

    def __init__(self, corpus_texts, corpus_latents: np.ndarray):
        self.texts = [list(t) for t in corpus_texts]
        self.latents = np.asarray(corpus_latents, dtype=np.float64)
        if len(self.texts) != self.latents.shape[0]:
            raise ProxplainError("corpus texts and latents disagree in length")
        self.latent_dim = self.latents.shape[1]

    def decode_batch(self, vectors) -> list[list[str]]:
        Z = np.asarray(vectors, dtype=np.float64)
        out = []
        for z in Z:
            d = cosine_distances_to(z, self.latents)
            nearest = int(np.argmax(d <= d.min() + self.DECODE_TIE_EPS))
            out.append(list(self.texts[nearest]))
        return out


class GreedyBagDecoder:
    """Matching-pursuit bag-of-words decoder: greedily pick the vocabulary token
    best aligned with the residual, subtract its projection, repeat.

    Stops when no token improves alignment beyond `stop_threshold` or after
    MAX_BAG_DECODE_LEN tokens; always emits at least one token. Produces novel
    texts (token order is selection order). Deterministic; ties break toward
    the lexicographically smaller token.
    """

    deterministic = True

    def __init__(self, embedding: TokenEmbedding, vocabulary, stop_threshold: float = 0.1):
        self.vocabulary = sorted(set(vocabulary))
        if not self.vocabulary:
            raise ProxplainError("greedy decoder needs a non-empty vocabulary")
        self.stop_threshold = float(stop_threshold)
        mat = embedding.matrix(self.vocabulary)
        self.units = mat / np.linalg.norm(mat, axis=1, keepdims=True)
        self.latent_dim = embedding.dim

    def decode_batch(self, vectors) -> list[list[str]]:
        Z = np.asarray(vectors, dtype=np.float64)
        return [self._decode_one(z) for z in Z]

    TIE_EPS = 1e-8

    def _decode_one(self, z: np.ndarray) -> list[str]:
        residual = as_latent(z).copy()
        tokens: list[str] = []
        while len(tokens) < MAX_BAG_DECODE_LEN:
            scores = self.units @ residual
            # scores within TIE_EPS of the maximum tie-break to the earlier
            # (lexicographically smaller) token, stable under wire rounding
            best = int(np.argmax(scores >= scores.max() - self.TIE_EPS))
            if tokens and scores[best] <= self.stop_threshold:
                break
            tokens.append(self.vocabulary[best])
            residual = residual - scores[best] * self.units[best]
        return tokens


class LexiconBlackBox:
    """Logistic of the summed per-token lexicon weight; order-insensitive."""

    def __init__(self, lexicon: dict[str, float], scale: float = 1.0):
        self.lexicon = dict(lexicon)
        self.scale = float(scale)

    def predict_batch(self, texts) -> np.ndarray:
        out = np.empty((len(texts), 2))
        for i, tokens in enumerate(texts):
            toks = check_tokens(tokens)
            score = sum(self.lexicon.get(t, 0.0) for t in toks)
            p = 1.0 / (1.0 + math.exp(-self.scale * score))
            out[i] = (p, 1.0 - p)
        return out


class LatentLinearBlackBox:
    """Logistic of a linear functional of the encoded text: p_pos = sigma(gain * w.z)."""

    def __init__(self, weights, encoder, gain: float = 4.0):
        self.weights = as_latent(weights)
        self.encoder = encoder
        self.gain = float(gain)

    def predict_batch(self, texts) -> np.ndarray:
        Z = self.encoder.encode_batch(texts)
        s = 1.0 / (1.0 + np.exp(-self.gain * (Z @ self.weights)))
        return np.column_stack([s, 1.0 - s])


class ComposedBackend(ModelBackend):
    """A ModelBackend assembled from separate encoder/decoder/black-box parts."""

    def __init__(self, encoder, decoder, blackbox, vocabulary=None):
        self.encoder = encoder
        self.decoder = decoder
        self.blackbox = blackbox
        self.vocabulary = sorted(set(vocabulary)) if vocabulary is not None else None
        self.latent_dim = encoder.latent_dim
        self.deterministic_decoder = bool(getattr(decoder, "deterministic", True))

    def encode_batch(self, texts) -> np.ndarray:
        return self.encoder.encode_batch(texts)

    def decode_batch(self, vectors) -> list[list[str]]:
        return self.decoder.decode_batch(vectors)

    def predict_batch(self, texts) -> np.ndarray:
        return self.blackbox.predict_batch(texts)


class VectorTokenBackend(ModelBackend):
    """Synthetic latent world for geometry tests: a text IS its vector.

    decode() formats each component with 9 significant digits into one token;
    encode() parses the tokens back. The black box is linear in the parsed
    vector, so the decision boundary in latent space is an exact hyperplane.
    """

    deterministic_decoder = True

    def __init__(self, weights, gain: float = 4.0):
        self.weights = as_latent(weights)
        self.latent_dim = self.weights.shape[0]
        self.gain = float(gain)

    def encode_batch(self, texts) -> np.ndarray:
        out = np.empty((len(texts), self.latent_dim))
        for i, tokens in enumerate(texts):
            toks = check_tokens(tokens)
            if len(toks) != self.latent_dim:
                raise DegenerateVectorError(f"expected {self.latent_dim} tokens, got {len(toks)}")
            out[i] = [float(t) for t in toks]
        return out

    def decode_batch(self, vectors) -> list[list[str]]:
        Z = np.asarray(vectors, dtype=np.float64)
        return [[f"{c:.9g}" for c in z] for z in Z]

    def predict_batch(self, texts) -> np.ndarray:
        Z = self.encode_batch(texts)
        s = 1.0 / (1.0 + np.exp(-self.gain * (Z @ self.weights)))
        return np.column_stack([s, 1.0 - s])


# ---------------------------------------------------------------------------
# Corpus


@dataclass
class Corpus:
    """Pre-tokenized sentences with precomputed latents and black-box labels."""

    texts: list[list[str]]
    latents: np.ndarray
    labels: list[str]
    scores: np.ndarray = field(repr=False, default=None)

    def __len__(self) -> int:
        return len(self.texts)

    def class_indices(self, label: str) -> np.ndarray:
        return np.array([i for i, lab in enumerate(self.labels) if lab == label], dtype=int)


def build_corpus(texts, backend: ModelBackend) -> Corpus:
    """Encode and classify every sentence once; landmark search is a hot loop."""
    toks = [check_tokens(t) for t in texts]
    if len(toks) < 2:
        raise ProxplainError("corpus needs at least 2 sentences")
    latents = backend.encode_batch(toks)
    scores = backend.predict_batch(toks)
    labels = [Prediction(float(r[0]), float(r[1])).label for r in scores]
    return Corpus(texts=toks, latents=latents, labels=labels, scores=scores)


def load_corpus_file(path) -> list[list[str]]:
    """One pre-tokenized sentence per line, tokens separated by single spaces."""
    texts = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                texts.append(line.split(" "))
    return texts


def load_lexicon_file(path) -> dict[str, float]:
    """Lines of `token<TAB>weight`."""
    lexicon: dict[str, float] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip():
                continue
            token, _, weight = line.partition("\t")
            if not weight:
                raise ProxplainError(f"malformed lexicon line: {line!r}")
            lexicon[token] = float(weight)
    return lexicon


def strong_opposite_words(blackbox_predict, vocabulary, query_class: str, count: int) -> list[str]:
    """Tokens maximizing single-token confidence for the class opposite to `query_class`.

    Probes every vocabulary word as a one-token text and ranks by descending
    opposite-class confidence, ties broken lexicographically. Returns all
    (sorted) if the vocabulary is smaller than `count`.
    """
    if count <= 0:
        return []
    vocab = sorted(set(vocabulary))
    if not vocab:
        return []
    target = opposite(query_class)
    col = 0 if target == POSITIVE else 1
    scores = np.asarray(blackbox_predict([[w] for w in vocab]))[:, col]
    order = sorted(range(len(vocab)), key=lambda i: (-scores[i], vocab[i]))
    return [vocab[i] for i in order[:count]]
