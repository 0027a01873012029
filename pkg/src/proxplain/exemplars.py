"""Diversity-aware greedy selection of factual/counterfactual exemplar sets.

Candidates are scored by a convex mix of closeness to the pivot and the mean
pairwise cosine distance among *difference vectors* (candidate minus pivot) of
the set being built. The score of every remaining candidate is recomputed
after each absorption, because the diversity term depends on the current set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class ExemplarConfig:
    lam: float = 0.5
    set_size: int = 5

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lam must lie in [0, 1]")
        if self.set_size < 1:
            raise ValueError("set_size must be positive")


def _unit_difference(latent: np.ndarray, pivot: np.ndarray):
    """Unit difference vector, or None when the candidate sits on the pivot."""
    delta = np.asarray(latent, dtype=np.float64) - pivot
    norm = np.linalg.norm(delta)
    if norm == 0.0:
        return None
    return delta / norm


def _pair_distance(u, v) -> float:
    # a zero difference vector carries no direction: its pairs contribute 0
    if u is None or v is None:
        return 0.0
    return 1.0 - float(np.clip(np.dot(u, v), -1.0, 1.0))


def select(candidates, pivot, config: ExemplarConfig) -> list:
    """Greedy exemplar selection; returns min(set_size, len(candidates)) neighbors.

    Each round scores every remaining candidate i as
        (1 - lam) * (-distance_to_pivot_i) + lam * diversity(selected + {i})
    where diversity is the sum of pairwise difference-vector cosine distances of
    the augmented set divided by (|S|^2 + |S|)/2 for the pre-absorption size
    |S| (the pair count of the augmented set). The first pick has no pairs and
    therefore reduces to the closest candidate. Ties break toward the smaller
    distance, then input order.
    """
    if not candidates:
        raise ValueError("no exemplar candidates")
    pivot = np.asarray(pivot, dtype=np.float64)
    pool = list(candidates)
    units = [_unit_difference(nb.latent, pivot) for nb in pool]

    chosen_idx: list[int] = []
    remaining = list(range(len(pool)))
    while remaining and len(chosen_idx) < config.set_size:
        size = len(chosen_idx)
        normalizer = (size * size + size) / 2.0  # pairs in the augmented set
        base_pairs = sum(
            _pair_distance(units[a], units[b])
            for ai, a in enumerate(chosen_idx) for b in chosen_idx[ai + 1:]
        )
        best_i = None
        best_key = None
        for i in remaining:
            closeness = -pool[i].distance_to_pivot
            if normalizer > 0.0:
                pair_sum = base_pairs + sum(_pair_distance(units[i], units[a]) for a in chosen_idx)
                diversity = pair_sum / normalizer
            else:
                diversity = 0.0
            r = (1.0 - config.lam) * closeness + config.lam * diversity
            key = (-r, pool[i].distance_to_pivot, i)
            if best_key is None or key < best_key:
                best_key = key
                best_i = i
        chosen_idx.append(best_i)
        remaining.remove(best_i)

    return [pool[i] for i in chosen_idx]
