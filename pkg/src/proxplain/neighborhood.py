"""Progressive neighborhood approximation with counterfactual landmarks.

The construction alternates two interpolation stages inside an iterative loop:

1. draw two landmarks (counterfactual latent vectors) and interpolate between
   them, which explores the counterfactual region;
2. for every interpolated point the black box labels opposite to the query,
   interpolate between that point and the pivot, which straddles the local
   decision boundary.

Each repeat contributes the counterfactual closest to the pivot as a new
landmark, so successive iterations tighten the landmark set around the query.
Decoded texts of all second-stage points accumulate into the neighborhood; the
n closest factuals and n closest counterfactuals are returned.

A per-run cache keyed on exact latent bytes makes repeated decodes free, which
keeps total decoder calls within max_iterations * k * (s+1)^2.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateNeighborhoodError, LandmarkSeedingError
from .latent import cosine_distances_to, interpolate
from .models import Corpus, ModelBackend, Prediction, opposite


@dataclass(frozen=True)
class Neighbor:
    """A generated text with the latent point it was decoded from.

    `latent` is the interpolated point, not a re-encoding of `tokens`; the two
    coincide only when the decoder is corpus-exact at that point. Scoring and
    weighting use `distance_to_pivot = cosine_distance(latent, pivot)`.
    """

    tokens: tuple[str, ...]
    latent: np.ndarray
    p_pos: float
    p_neg: float
    label: str
    distance_to_pivot: float

    @property
    def prediction(self) -> Prediction:
        return Prediction(self.p_pos, self.p_neg)


@dataclass(frozen=True)
class Landmark:
    latent: np.ndarray
    tokens: tuple[str, ...]
    p_pos: float
    p_neg: float
    distance_to_pivot: float


@dataclass
class LandmarkSet:
    """Counterfactual latent vectors steering the exploration; duplicates allowed."""

    landmarks: list[Landmark]
    capacity: int

    def __len__(self) -> int:
        return len(self.landmarks)

    def min_distance(self) -> float:
        return min(lm.distance_to_pivot for lm in self.landmarks)

    def closest(self) -> Landmark:
        return min(self.landmarks, key=lambda lm: lm.distance_to_pivot)


@dataclass
class NeighborhoodConfig:
    k: int = 25
    s: int = 10
    n: int = 100
    max_iterations: int = 8
    patience: int = 2
    improvement_tol: float = 1e-6

    def __post_init__(self):
        for name in ("k", "s", "n", "max_iterations", "patience"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")


@dataclass
class Neighborhood:
    """Output of construct(): per-class closest neighbors plus run diagnostics."""

    factuals: list[Neighbor]
    counterfactuals: list[Neighbor]
    pivot: np.ndarray
    prediction: Prediction
    seed_min_distance: float
    final_min_distance: float
    iterations: int
    decode_calls: int
    trace: list = field(default_factory=list)

    @property
    def neighbors(self) -> list[Neighbor]:
        return self.factuals + self.counterfactuals

    @property
    def texts(self) -> list[list[str]]:
        return [list(nb.tokens) for nb in self.neighbors]


class _EvalCache:
    """Decode + predict results memoized on exact latent bytes."""

    def __init__(self, backend: ModelBackend):
        self.backend = backend
        self._store: dict[bytes, tuple[tuple[str, ...], float, float]] = {}
        self.decode_calls = 0

    def prefill(self, latent: np.ndarray, tokens, p_pos: float, p_neg: float):
        self._store[np.ascontiguousarray(latent).tobytes()] = (tuple(tokens), p_pos, p_neg)

    def lookup(self, Z: np.ndarray) -> list[tuple[tuple[str, ...], float, float]]:
        keys = [np.ascontiguousarray(z).tobytes() for z in Z]
        missing_keys = []
        missing_rows = []
        seen = set()
        for key, z in zip(keys, Z):
            if key not in self._store and key not in seen:
                seen.add(key)
                missing_keys.append(key)
                missing_rows.append(z)
        if missing_rows:
            batch = np.stack(missing_rows)
            texts = self.backend.decode_batch(batch)
            self.decode_calls += len(missing_rows)
            scores = self.backend.predict_batch(texts)
            for key, toks, row in zip(missing_keys, texts, scores):
                self._store[key] = (tuple(toks), float(row[0]), float(row[1]))
        return [self._store[key] for key in keys]


def seed_landmarks(pivot: np.ndarray, query_class: str, corpus: Corpus, k: int) -> LandmarkSet:
    """The k corpus entries of the opposite class closest to the pivot.

    Ties break by corpus order; if fewer than k counterfactuals exist they are
    all returned with a warning. An all-same-class corpus is an error.
    """
    target = opposite(query_class)
    idx = corpus.class_indices(target)
    if idx.size == 0:
        raise LandmarkSeedingError(f"cannot seed landmarks: corpus has no {target} instances")
    dists = cosine_distances_to(pivot, corpus.latents[idx])
    order = np.argsort(dists, kind="stable")
    if idx.size < k:
        warnings.warn(f"corpus holds only {idx.size} counterfactuals; requested k={k}")
    chosen = order[:k]
    landmarks = []
    for j in chosen:
        i = int(idx[j])
        p_pos = float(corpus.scores[i][0]) if corpus.scores is not None else (1.0 if target == "positive" else 0.0)
        landmarks.append(Landmark(
            latent=corpus.latents[i].copy(),
            tokens=tuple(corpus.texts[i]),
            p_pos=p_pos,
            p_neg=1.0 - p_pos,
            distance_to_pivot=float(dists[j]),
        ))
    return LandmarkSet(landmarks=landmarks, capacity=k)


def approximate(pivot: np.ndarray, query_class: str, landmarks: LandmarkSet,
                config: NeighborhoodConfig, backend: ModelBackend, rng: np.random.Generator,
                cache: _EvalCache | None = None, trace: list | None = None,
                ) -> tuple[list[Neighbor], LandmarkSet]:
    """One approximation round: k repeats of the two-stage interpolation.

    Returns the freshly generated neighbors and the replacement landmark set
    (one landmark admitted per repeat: the counterfactual closest to the pivot
    found in that repeat, or the nearer drawn landmark if the decoder is
    nondeterministic and produced no counterfactual at all).
    """
    if len(landmarks) == 0:
        raise LandmarkSeedingError("cannot approximate with an empty landmark set")
    if cache is None:
        cache = _EvalCache(backend)
        for lm in landmarks.landmarks:
            cache.prefill(lm.latent, lm.tokens, lm.p_pos, lm.p_neg)

    new_neighbors: list[Neighbor] = []
    new_landmarks: list[Landmark] = []
    for _ in range(config.k):
        i, j = (int(v) for v in rng.integers(0, len(landmarks), size=2))
        z_p = landmarks.landmarks[i]
        z_q = landmarks.landmarks[j]

        first_stage = interpolate(z_p.latent, z_q.latent, config.s)
        first_results = cache.lookup(first_stage)

        segments = [
            interpolate(z, pivot, config.s)
            for z, (_, p_pos, p_neg) in zip(first_stage, first_results)
            if Prediction(p_pos, p_neg).label != query_class
        ]
        if not segments:
            # unreachable with deterministic decoders: first-stage endpoints are landmarks
            survivor = z_p if z_p.distance_to_pivot <= z_q.distance_to_pivot else z_q
            new_landmarks.append(survivor)
            if trace is not None:
                trace.append({"drawn": (i, j), "admitted_distance": survivor.distance_to_pivot,
                              "neighbors": 0, "retained_landmark": True})
            continue

        second_stage = np.concatenate(segments, axis=0)
        second_results = cache.lookup(second_stage)
        distances = cosine_distances_to(pivot, second_stage)

        best_idx = -1
        best_dist = np.inf
        for row, ((toks, p_pos, p_neg), dist) in enumerate(zip(second_results, distances)):
            label = Prediction(p_pos, p_neg).label
            new_neighbors.append(Neighbor(
                tokens=toks, latent=second_stage[row], p_pos=p_pos, p_neg=p_neg,
                label=label, distance_to_pivot=float(dist),
            ))
            if label != query_class and dist < best_dist:
                best_dist = float(dist)
                best_idx = row
        # each segment starts at a cached counterfactual point, so one exists
        assert best_idx >= 0, "second-stage batch lost its counterfactual endpoints"
        toks, p_pos, p_neg = second_results[best_idx]
        new_landmarks.append(Landmark(
            latent=second_stage[best_idx].copy(), tokens=toks,
            p_pos=p_pos, p_neg=p_neg, distance_to_pivot=best_dist,
        ))
        if trace is not None:
            trace.append({
                "drawn": (i, j),
                "drawn_distances": (z_p.distance_to_pivot, z_q.distance_to_pivot),
                "admitted_distance": best_dist,
                "neighbors": len(second_stage),
                "retained_landmark": False,
            })

    return new_neighbors, LandmarkSet(landmarks=new_landmarks, capacity=config.k)


def construct(query, corpus: Corpus, config: NeighborhoodConfig, backend: ModelBackend,
              rng: np.random.Generator, keep_trace: bool = False) -> Neighborhood:
    """Full neighborhood construction around a query text.

    Iterates approximation rounds, replacing the landmark set each round,
    until max_iterations is hit or the minimum counterfactual distance to the
    pivot stops improving by more than improvement_tol for `patience`
    consecutive rounds. Exact duplicate token sequences are collapsed to their
    closest-to-pivot representative before the per-class selection.
    """
    prediction = backend.predict(query)
    query_class = prediction.label
    pivot = backend.encode(query)

    landmarks = seed_landmarks(pivot, query_class, corpus, config.k)
    seed_min = landmarks.min_distance()

    cache = _EvalCache(backend)
    for lm in landmarks.landmarks:
        cache.prefill(lm.latent, lm.tokens, lm.p_pos, lm.p_neg)

    trace: list = []
    collected: list[Neighbor] = []
    best = seed_min
    best_landmark = landmarks.closest()
    stall = 0
    iterations = 0
    for _ in range(config.max_iterations):
        round_trace: list = [] if keep_trace else None
        new_neighbors, new_set = approximate(
            pivot, query_class, landmarks, config, backend, rng, cache=cache, trace=round_trace,
        )
        iterations += 1
        collected.extend(new_neighbors)

        round_best = new_set.min_distance()
        if round_best > best:
            # an unlucky draw can lose the best landmark; put it back so the
            # landmark-set minimum never regresses
            worst = max(range(len(new_set.landmarks)),
                        key=lambda idx: new_set.landmarks[idx].distance_to_pivot)
            new_set.landmarks[worst] = best_landmark
            round_best = best
        landmarks = new_set

        improved = (best - round_best) > config.improvement_tol
        if round_best < best:
            best = round_best
            best_landmark = landmarks.closest()
        stall = 0 if improved else stall + 1
        if keep_trace:
            trace.append({"iteration": iterations, "min_landmark_distance": round_best,
                          "improved": improved, "repeats": round_trace})
        if stall >= config.patience:
            break

    # duplicate texts collapse to their closest-to-pivot occurrence
    by_text: dict[tuple[str, ...], Neighbor] = {}
    for nb in collected:
        cur = by_text.get(nb.tokens)
        if cur is None or nb.distance_to_pivot < cur.distance_to_pivot:
            by_text[nb.tokens] = nb
    unique = list(by_text.values())

    factuals = sorted((nb for nb in unique if nb.label == query_class),
                      key=lambda nb: nb.distance_to_pivot)[:config.n]
    counterfactuals = sorted((nb for nb in unique if nb.label != query_class),
                             key=lambda nb: nb.distance_to_pivot)[:config.n]

    diagnostics = {
        "seed_min_distance": seed_min,
        "final_min_distance": best,
        "iterations": iterations,
        "landmark_distances": [lm.distance_to_pivot for lm in landmarks.landmarks],
        "trace": trace,
    }
    if not factuals:
        raise DegenerateNeighborhoodError("factual", diagnostics)
    if not counterfactuals:
        raise DegenerateNeighborhoodError("counterfactual", diagnostics)

    return Neighborhood(
        factuals=factuals, counterfactuals=counterfactuals, pivot=pivot,
        prediction=prediction, seed_min_distance=seed_min, final_min_distance=best,
        iterations=iterations, decode_calls=cache.decode_calls, trace=trace,
    )
