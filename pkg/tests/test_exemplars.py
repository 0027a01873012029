import itertools
import math

import numpy as np
import pytest

from proxplain.exemplars import ExemplarConfig, select
from proxplain.models import POSITIVE
from proxplain.neighborhood import Neighbor


def make_candidates(rng, count, dim=5, pivot=None):
    pivot = np.zeros(dim) if pivot is None else pivot
    out = []
    for i in range(count):
        z = rng.standard_normal(dim)
        dist = float(np.linalg.norm(z - pivot)) * 0.1  # any nonnegative proxy works
        out.append(Neighbor(tokens=(f"t{i}",), latent=z, p_pos=0.9, p_neg=0.1,
                            label=POSITIVE, distance_to_pivot=dist))
    return out, pivot


def oracle_cosine(u, v):
    dot = sum(a * b for a, b in zip(u, v))
    nu = math.sqrt(sum(a * a for a in u))
    nv = math.sqrt(sum(b * b for b in v))
    return 1.0 - max(-1.0, min(1.0, dot / (nu * nv)))


def oracle_greedy(candidates, pivot, lam, set_size):
    """From-scratch greedy rescoring of the quality criterion, pure Python."""
    deltas = []
    for nb in candidates:
        d = [a - b for a, b in zip(nb.latent, pivot)]
        deltas.append(None if all(v == 0.0 for v in d) else d)

    chosen = []
    remaining = list(range(len(candidates)))
    while remaining and len(chosen) < set_size:
        size = len(chosen)
        denom = (size * size + size) / 2.0
        scored = []
        for i in remaining:
            members = chosen + [i]
            pair_sum = 0.0
            for a, b in itertools.combinations(members, 2):
                if deltas[a] is None or deltas[b] is None:
                    continue
                pair_sum += oracle_cosine(deltas[a], deltas[b])
            diversity = pair_sum / denom if denom > 0 else 0.0
            r = (1.0 - lam) * (-candidates[i].distance_to_pivot) + lam * diversity
            scored.append((-r, candidates[i].distance_to_pivot, i))
        scored.sort()
        pick = scored[0][2]
        chosen.append(pick)
        remaining.remove(pick)
    return [candidates[i] for i in chosen]


class TestSelect:
    def test_lambda_zero_is_ascending_distance(self):
        rng = np.random.default_rng(50)
        candidates, pivot = make_candidates(rng, 10)
        got = select(candidates, pivot, ExemplarConfig(lam=0.0, set_size=4))
        dists = [nb.distance_to_pivot for nb in got]
        assert dists == sorted(nb.distance_to_pivot for nb in candidates)[:4]
        assert dists == sorted(dists)

    def test_first_pick_is_closest(self):
        rng = np.random.default_rng(51)
        for lam in (0.0, 0.3, 0.7, 1.0):
            candidates, pivot = make_candidates(rng, 8)
            got = select(candidates, pivot, ExemplarConfig(lam=lam, set_size=3))
            closest = min(candidates, key=lambda nb: nb.distance_to_pivot)
            assert got[0] is closest

    @pytest.mark.parametrize("lam", [0.0, 0.3, 0.5, 1.0])
    def test_matches_exhaustive_oracle(self, lam):
        rng = np.random.default_rng(52)
        for trial in range(25):
            n = int(rng.integers(1, 9))
            candidates, pivot = make_candidates(rng, n)
            got = select(candidates, pivot, ExemplarConfig(lam=lam, set_size=3))
            expected = oracle_greedy(candidates, pivot, lam, 3)
            assert [nb.tokens for nb in got] == [nb.tokens for nb in expected]

    def test_no_repeats_and_size(self):
        rng = np.random.default_rng(53)
        candidates, pivot = make_candidates(rng, 6)
        got = select(candidates, pivot, ExemplarConfig(lam=0.5, set_size=10))
        assert len(got) == 6
        assert len({nb.tokens for nb in got}) == 6
        got = select(candidates, pivot, ExemplarConfig(lam=0.5, set_size=2))
        assert len(got) == 2

    def test_higher_lambda_no_less_diverse(self):
        # median over seeded fixtures: raising lambda cannot shrink the mean
        # pairwise difference-vector distance of the selected set
        rng = np.random.default_rng(54)
        gains = []
        for trial in range(20):
            candidates, pivot = make_candidates(rng, 12)

            def mean_pairwise(selected):
                deltas = [nb.latent - pivot for nb in selected]
                pairs = list(itertools.combinations(deltas, 2))
                return float(np.mean([oracle_cosine(u, v) for u, v in pairs]))

            low = select(candidates, pivot, ExemplarConfig(lam=0.2, set_size=4))
            high = select(candidates, pivot, ExemplarConfig(lam=0.8, set_size=4))
            gains.append(mean_pairwise(high) - mean_pairwise(low))
        assert float(np.median(gains)) >= 0.0

    def test_candidate_at_pivot_allowed(self):
        rng = np.random.default_rng(55)
        candidates, pivot = make_candidates(rng, 5)
        at_pivot = Neighbor(tokens=("pivot",), latent=pivot.copy(), p_pos=0.9, p_neg=0.1,
                            label=POSITIVE, distance_to_pivot=0.0)
        got = select(candidates + [at_pivot], pivot, ExemplarConfig(lam=0.5, set_size=3))
        # zero difference vector: eligible via the distance term only, and since
        # its distance is 0 it is the first pick
        assert got[0] is at_pivot

    def test_empty_candidates_is_error(self):
        with pytest.raises(ValueError):
            select([], np.zeros(3), ExemplarConfig())

    def test_tie_breaks_toward_input_order(self):
        z = np.array([1.0, 0.0])
        a = Neighbor(tokens=("a",), latent=z, p_pos=0.9, p_neg=0.1,
                     label=POSITIVE, distance_to_pivot=0.5)
        b = Neighbor(tokens=("b",), latent=z.copy(), p_pos=0.9, p_neg=0.1,
                     label=POSITIVE, distance_to_pivot=0.5)
        got = select([a, b], np.zeros(2), ExemplarConfig(lam=0.5, set_size=1))
        assert got[0] is a
