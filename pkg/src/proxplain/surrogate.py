"""Bag-of-words surrogate fitted to the black box in the neighborhood.

The local model is a linear regression of the positive-class probability on
binary token-presence features, trained with the weighted square loss: each
neighbor is weighted by exp(-d^2 / sigma^2) where d is its cosine distance to
the pivot. Coefficients double as word importances; tokens from the query are
"intrinsic", tokens appearing only in neighbors are "extrinsic".
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SurrogateError
from .latent import cosine_distances_to
from .models import POSITIVE

DEFAULT_SIGMA = 0.25
DEFAULT_RIDGE = 1e-6

INTRINSIC = "intrinsic"
EXTRINSIC = "extrinsic"
SUPPORTS_PREDICTED = "predicted_class"
SUPPORTS_OPPOSITE = "opposite_class"


@dataclass(frozen=True)
class Vocabulary:
    """Query tokens first (in query order), then neighbor tokens by first appearance."""

    tokens: tuple[str, ...]
    index: dict[str, int]

    def __len__(self) -> int:
        return len(self.tokens)


def build_vocabulary(query, neighbor_texts) -> Vocabulary:
    tokens: list[str] = []
    index: dict[str, int] = {}
    for source in [list(query)] + [list(t) for t in neighbor_texts]:
        for tok in source:
            if tok not in index:
                index[tok] = len(tokens)
                tokens.append(tok)
    return Vocabulary(tokens=tuple(tokens), index=index)


def featurize(tokens, vocab: Vocabulary) -> np.ndarray:
    """Binary presence vector; out-of-vocabulary tokens are ignored."""
    x = np.zeros(len(vocab))
    for tok in tokens:
        j = vocab.index.get(tok)
        if j is not None:
            x[j] = 1.0
    return x


@dataclass
class SurrogateModel:
    vocabulary: Vocabulary
    coefficients: np.ndarray
    intercept: float
    sigma: float
    ridge: float

    def predict_value(self, tokens) -> float:
        return float(self.intercept + featurize(tokens, self.vocabulary) @ self.coefficients)


def kernel_weights(distances, sigma: float) -> np.ndarray:
    d = np.asarray(distances, dtype=np.float64)
    return np.exp(-(d ** 2) / sigma ** 2)


def solve_weighted(X: np.ndarray, y: np.ndarray, w: np.ndarray, ridge: float,
                   grad_tol: float = 1e-8) -> tuple[np.ndarray, float]:
    """Closed-form minimizer of sum w_i (y_i - b0 - x_i.beta)^2 + ridge ||beta||^2.

    The intercept is unpenalized. Solved via the bordered normal equations;
    the gradient of the objective is checked at the solution.
    """
    m, p = X.shape
    A = np.column_stack([np.ones(m), X])
    WA = A * w[:, None]
    gram = A.T @ WA
    penalty = np.full(p + 1, ridge)
    penalty[0] = 0.0
    gram[np.diag_indices_from(gram)] += penalty
    rhs = WA.T @ y
    try:
        theta = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError as exc:
        raise SurrogateError("surrogate underdetermined: singular normal equations") from exc

    residual = y - A @ theta
    grad = -2.0 * (WA.T @ residual)
    grad[1:] += 2.0 * ridge * theta[1:]
    scale = max(1.0, float(np.abs(rhs).max()))
    if float(np.linalg.norm(grad)) > grad_tol * scale:
        raise SurrogateError("surrogate underdetermined: normal equations unstable")
    return theta[1:], float(theta[0])


def fit(neighbors, pivot, query, sigma: float = DEFAULT_SIGMA,
        ridge: float = DEFAULT_RIDGE) -> SurrogateModel:
    """Fit the weighted linear surrogate on a generated neighborhood.

    Targets are positive-class probabilities; weights decay with the squared
    cosine distance of each neighbor's latent point to the pivot.
    """
    if len(neighbors) < 2:
        raise SurrogateError("surrogate underdetermined: need at least 2 neighbors")
    vocab = build_vocabulary(query, [nb.tokens for nb in neighbors])
    X = np.stack([featurize(nb.tokens, vocab) for nb in neighbors])
    if len({tuple(row) for row in X.astype(int)}) < 2:
        raise SurrogateError("surrogate underdetermined: all neighbors featurize identically")
    y = np.array([nb.p_pos for nb in neighbors])
    latents = np.stack([nb.latent for nb in neighbors])
    w = kernel_weights(cosine_distances_to(pivot, latents), sigma)
    coefficients, intercept = solve_weighted(X, y, w, ridge)
    return SurrogateModel(vocabulary=vocab, coefficients=coefficients,
                          intercept=intercept, sigma=sigma, ridge=ridge)


@dataclass(frozen=True)
class WordImportance:
    token: str
    weight: float  # positive always means "supports the decision that was made"
    origin: str    # intrinsic | extrinsic
    supports: str  # predicted_class | opposite_class


def extract_importances(model: SurrogateModel, query, predicted_class: str) -> list[WordImportance]:
    """Decision-oriented importances for every vocabulary token, |weight| descending.

    Coefficients model p_pos, so for a negative prediction the sign is flipped:
    a positive weight then still reads "supports the made decision". Filter with
    `filter_important` for the thresholded view.
    """
    sign = 1.0 if predicted_class == POSITIVE else -1.0
    query_tokens = set(query)
    importances = []
    for token, coef in zip(model.vocabulary.tokens, model.coefficients):
        weight = sign * float(coef)
        importances.append(WordImportance(
            token=token,
            weight=weight,
            origin=INTRINSIC if token in query_tokens else EXTRINSIC,
            supports=SUPPORTS_PREDICTED if weight >= 0 else SUPPORTS_OPPOSITE,
        ))
    importances.sort(key=lambda wi: (-abs(wi.weight), wi.token))
    return importances


def filter_important(importances, eta: float) -> list[WordImportance]:
    return [wi for wi in importances if abs(wi.weight) >= eta]
