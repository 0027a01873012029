"""Single-token editions connecting extrinsic words to the query text.

A context model counts, over the neighborhood texts, how often a word appears
within a +-l token window of each other word. The likelihood of placing a word
at position i of the query is the sum of log(P(word | context token) + eps)
over the in-bounds window positions; the placement maximizing it becomes the
edition. Both insertion (at any gap) and single-token replacement (at any
position) are scored in one argmax.

P(word | u) is the windowed co-occurrence count divided by the number of
occurrences of u. Out-of-sentence window positions contribute nothing (no
padding tokens), and the edited position itself is excluded from its own
context.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

from .errors import ProxplainError
from .models import Prediction

DEFAULT_WINDOW = 2
DEFAULT_EPS = 1e-6

OP_INSERT = "insert"
OP_REPLACE = "replace"


@dataclass
class ContextModel:
    window: int = DEFAULT_WINDOW
    eps: float = DEFAULT_EPS
    pair_counts: Counter = field(default_factory=Counter)  # (context_token, word) -> count
    occurrences: Counter = field(default_factory=Counter)  # context_token -> count

    def probability(self, word: str, context_token: str) -> float:
        occ = self.occurrences.get(context_token, 0)
        if occ == 0:
            return 0.0
        return self.pair_counts.get((context_token, word), 0) / occ


def build_context_model(neighbor_texts, window: int = DEFAULT_WINDOW,
                        eps: float = DEFAULT_EPS) -> ContextModel:
    """Windowed co-occurrence statistics over the neighborhood texts.

    For every position pair (i, i+o) with 0 < |o| <= window, the count of
    (token_i -> token_{i+o}) increases by one; offsets are aggregated into a
    single windowed count.
    """
    if not neighbor_texts:
        raise ProxplainError("context model needs at least one neighbor text")
    model = ContextModel(window=window, eps=eps)
    for text in neighbor_texts:
        toks = list(text)
        m = len(toks)
        for i, u in enumerate(toks):
            model.occurrences[u] += 1
            for o in range(-window, window + 1):
                if o == 0:
                    continue
                j = i + o
                if 0 <= j < m:
                    model.pair_counts[(u, toks[j])] += 1
    return model


def placement_score(model: ContextModel, edited, position: int, word: str) -> float:
    """Sum of log(P(word | context token) + eps) over the in-bounds window of `position`."""
    total = 0.0
    m = len(edited)
    for o in range(-model.window, model.window + 1):
        if o == 0:
            continue
        j = position + o
        if 0 <= j < m:
            total += math.log(model.probability(word, edited[j]) + model.eps)
    return total


@dataclass(frozen=True)
class Edition:
    tokens: tuple[str, ...]
    op: str
    position: int
    word: str
    p_pos: float
    p_neg: float
    flipped: bool
    score: float

    @property
    def prediction(self) -> Prediction:
        return Prediction(self.p_pos, self.p_neg)


def enumerate_placements(query, word: str) -> list[tuple[str, int, list[str]]]:
    """All 2|query|+1 candidate editions: every insertion gap, then every replacement."""
    toks = list(query)
    out = []
    for gap in range(len(toks) + 1):
        out.append((OP_INSERT, gap, toks[:gap] + [word] + toks[gap:]))
    for pos in range(len(toks)):
        out.append((OP_REPLACE, pos, toks[:pos] + [word] + toks[pos + 1:]))
    return out


def best_edition(query, word: str, model: ContextModel, backend) -> Edition:
    """Likelihood-optimal single-token edition, classified fresh by the black box.

    Ties break toward the leftmost position, and at the same position toward
    insertion.
    """
    toks = list(query)
    if not toks:
        raise ProxplainError("cannot edit an empty query")
    candidates = enumerate_placements(toks, word)
    scored = [
        (placement_score(model, edited, pos, word), pos, 0 if op == OP_INSERT else 1, op, edited)
        for op, pos, edited in candidates
    ]
    score, pos, _, op, edited = max(scored, key=lambda c: (c[0], -c[1], -c[2]))

    original = backend.predict(toks)
    new = backend.predict(edited)
    return Edition(
        tokens=tuple(edited), op=op, position=pos, word=word,
        p_pos=new.p_pos, p_neg=new.p_neg,
        flipped=new.label != original.label, score=score,
    )


def best_insertion_gap(model: ContextModel, tokens, word: str) -> int:
    """Gap index maximizing the placement likelihood among insertions only."""
    toks = list(tokens)
    best_gap = 0
    best_score = -math.inf
    for gap in range(len(toks) + 1):
        edited = toks[:gap] + [word] + toks[gap:]
        s = placement_score(model, edited, gap, word)
        if s > best_score:
            best_score = s
            best_gap = gap
    return best_gap
