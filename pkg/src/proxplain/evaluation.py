"""Quantitative evaluation by sentence edition.

Words whose decision-oriented importance clears a threshold are acted on:
positive (decision-supporting) intrinsic words are deleted, negative
(decision-opposing) words are inserted at their likelihood-optimal position.
The black-box confidence drop after editing measures *completeness*, the drop
per operation measures *compactness*, and the change of compactness when the
threshold rises measures *correctness*. A random editor that drops up to 3
words and inserts one strong opposite-sentiment word serves as the baseline.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .edition import ContextModel, best_insertion_gap
from .errors import ProxplainError
from .models import strong_opposite_words
from .surrogate import INTRINSIC, filter_important

GUIDED = "guided"
BASELINE = "baseline"


@dataclass
class EvaluationConfig:
    eta: float = 0.1
    eta_high: float = 0.3
    max_drops: int = 3
    strong_word_count: int = 100

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        if self.eta_high <= self.eta:
            raise ValueError("eta_high must exceed eta")


def guided_edit(query, importances, eta: float, context: ContextModel) -> tuple[list[str], int]:
    """Apply the explanation-guided sentence edition at threshold `eta`.

    Deletions run first (descending |weight|), then insertions; each acted-on
    word counts as one operation. A deletion that would empty the sentence is
    skipped. Returns the edited tokens and the operation count.
    """
    tokens = list(query)
    relevant = filter_important(importances, eta)
    deletions = [wi for wi in relevant if wi.weight > 0 and wi.origin == INTRINSIC]
    insertions = [wi for wi in relevant if wi.weight < 0]

    operations = 0
    for wi in deletions:
        kept = [t for t in tokens if t != wi.token]
        if not kept:
            continue  # never empty the sentence
        if len(kept) < len(tokens):
            tokens = kept
            operations += 1
    for wi in insertions:
        gap = best_insertion_gap(context, tokens, wi.token)
        tokens.insert(gap, wi.token)
        operations += 1
    return tokens, operations


def baseline_edit(query, query_class: str, strong_words, max_drops: int,
                  rng: np.random.Generator) -> tuple[list[str], int]:
    """Random editor: drop d ~ U{0..min(max_drops, |query|-1)} distinct positions,
    then insert one uniformly chosen strong opposite-class word at a random gap."""
    tokens = list(query)
    max_d = min(max_drops, len(tokens) - 1)
    d = int(rng.integers(0, max_d + 1)) if max_d > 0 else 0
    if d > 0:
        dropped = set(rng.choice(len(tokens), size=d, replace=False).tolist())
        tokens = [t for i, t in enumerate(tokens) if i not in dropped]
    word = strong_words[int(rng.integers(0, len(strong_words)))]
    gap = int(rng.integers(0, len(tokens) + 1))
    tokens.insert(gap, word)
    return tokens, d + 1


@dataclass
class InstanceResult:
    query: tuple[str, ...]
    edited: tuple[str, ...]
    confidence_drop: float
    operations: int

    @property
    def drop_per_operation(self) -> float | None:
        if self.operations == 0:
            return None
        return self.confidence_drop / self.operations


@dataclass
class MethodAggregate:
    completeness_mean: float
    completeness_std: float
    compactness_mean: float | None
    compactness_std: float | None
    compactness_count: int
    correctness: float | None = None


@dataclass
class EvaluationReport:
    config: dict
    guided: list[InstanceResult]
    baseline: list[InstanceResult]
    guided_aggregate: MethodAggregate
    baseline_aggregate: MethodAggregate
    failures: list[dict] = field(default_factory=list)


def _aggregate(rows) -> tuple[float, float, float | None, float | None, int]:
    drops = np.array([r.confidence_drop for r in rows], dtype=np.float64)
    per_op = [r.drop_per_operation for r in rows if r.operations > 0]
    comp_mean = comp_std = None
    if per_op:
        arr = np.array(per_op, dtype=np.float64)
        comp_mean, comp_std = float(arr.mean()), float(arr.std())
    if drops.size == 0:
        return 0.0, 0.0, comp_mean, comp_std, len(per_op)
    return float(drops.mean()), float(drops.std()), comp_mean, comp_std, len(per_op)


def derive_instance_seeds(master_seed: int, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-instance (explanation, baseline) seeds, a pure function of the master seed."""
    seed_rng = np.random.default_rng(master_seed)
    explain_seeds = seed_rng.integers(0, 2**63 - 1, size=count)
    baseline_seeds = seed_rng.integers(0, 2**63 - 1, size=count)
    return explain_seeds, baseline_seeds


def evaluate(test_texts, explain_fn, backend, vocabulary, cfg: EvaluationConfig,
             master_seed: int = 0) -> EvaluationReport:
    """Run guided and baseline editors over a test set and aggregate the three Cs.

    `explain_fn(tokens, seed)` must return an Explanation. Per-instance seeds
    derive deterministically from the master seed, so results are identical
    whether instances run sequentially or in parallel. Explanation failures are
    recorded and excluded from the aggregates.
    """
    texts = [list(t) for t in test_texts]
    if not texts:
        raise ProxplainError("empty test set")
    instance_seeds, baseline_seeds = derive_instance_seeds(master_seed, len(texts))

    strong: dict[str, list[str]] = {}
    for label in ("positive", "negative"):
        words = strong_opposite_words(backend.predict_batch, vocabulary, label, cfg.strong_word_count)
        if not words:
            raise ProxplainError("empty probe vocabulary for the baseline editor")
        strong[label] = words

    guided_rows: list[InstanceResult] = []
    guided_high_rows: list[InstanceResult] = []
    baseline_rows: list[InstanceResult] = []
    failures: list[dict] = []
    for i, tokens in enumerate(texts):
        pred = backend.predict(tokens)
        p_orig = pred.confidence_in(pred.label)
        try:
            expl = explain_fn(tokens, int(instance_seeds[i]))
        except ProxplainError as exc:
            failures.append({"index": i, "query": " ".join(tokens), "error": str(exc)})
            continue
        importances = expl.importances

        for eta, rows in ((cfg.eta, guided_rows), (cfg.eta_high, guided_high_rows)):
            edited, ops = guided_edit(tokens, importances, eta, expl.context)
            drop = p_orig - backend.predict(edited).confidence_in(pred.label)
            rows.append(InstanceResult(tuple(tokens), tuple(edited), drop, ops))

        rng = np.random.default_rng(int(baseline_seeds[i]))
        edited_b, ops_b = baseline_edit(tokens, pred.label, strong[pred.label], cfg.max_drops, rng)
        drop_b = p_orig - backend.predict(edited_b).confidence_in(pred.label)
        baseline_rows.append(InstanceResult(tuple(tokens), tuple(edited_b), drop_b, ops_b))

    g_mean, g_std, g_cmean, g_cstd, g_cn = _aggregate(guided_rows)
    _, _, high_cmean, _, _ = _aggregate(guided_high_rows)
    correctness = None
    if g_cmean is not None and high_cmean is not None:
        correctness = high_cmean - g_cmean
    b_mean, b_std, b_cmean, b_cstd, b_cn = _aggregate(baseline_rows)

    return EvaluationReport(
        config={"eta": cfg.eta, "eta_high": cfg.eta_high, "max_drops": cfg.max_drops,
                "strong_word_count": cfg.strong_word_count, "seed": master_seed},
        guided=guided_rows,
        baseline=baseline_rows,
        guided_aggregate=MethodAggregate(g_mean, g_std, g_cmean, g_cstd, g_cn, correctness),
        baseline_aggregate=MethodAggregate(b_mean, b_std, b_cmean, b_cstd, b_cn, None),
        failures=failures,
    )


def report_to_dict(report: EvaluationReport) -> dict:
    """JSON-ready representation with per-instance rows and the aggregate block."""

    def rows(items):
        return [
            {"query": " ".join(r.query), "edited": " ".join(r.edited),
             "confidence_drop": r.confidence_drop, "operations": r.operations}
            for r in items
        ]

    def agg(a: MethodAggregate) -> dict:
        out = {
            "completeness": {"mean": a.completeness_mean, "stddev": a.completeness_std},
            "compactness": {"mean": a.compactness_mean, "stddev": a.compactness_std,
                            "instances": a.compactness_count},
        }
        out["correctness"] = a.correctness
        return out

    return {
        "config": report.config,
        "methods": {
            GUIDED: {"aggregate": agg(report.guided_aggregate), "instances": rows(report.guided)},
            BASELINE: {"aggregate": agg(report.baseline_aggregate), "instances": rows(report.baseline)},
        },
        "failures": report.failures,
    }
