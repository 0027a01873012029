"""Quantitative evaluation: completeness, compactness, correctness.

Edits each test sentence as the explanation dictates (delete decision-
supporting words, insert opposing words at their likeliest position) and
measures the black-box confidence drop, comparing against a random editor
that drops up to 3 words and inserts one strong opposite-sentiment word.
"""

from proxplain.evaluation import EvaluationConfig, evaluate
from proxplain.explainer import ExplainerConfig, explain
from proxplain.neighborhood import NeighborhoodConfig
from proxplain.toydata import DEFAULT_LEXICON, build_toy_backend, make_review_corpus

corpus_texts = make_review_corpus(300, seed=7)
backend, corpus = build_toy_backend(corpus_texts, DEFAULT_LEXICON, dim=32, seed=0)
test_set = make_review_corpus(40, seed=99)

config = ExplainerConfig(neighborhood=NeighborhoodConfig(k=8, s=5, n=50, max_iterations=3))


def explain_fn(tokens, seed):
    return explain(tokens, corpus, backend, config, seed=seed)


vocabulary = sorted({t for text in corpus.texts for t in text})
report = evaluate(test_set, explain_fn, backend, vocabulary,
                  EvaluationConfig(eta=0.1, eta_high=0.3), master_seed=42)

print(f"{'':14s}{'completeness':>16s}{'compactness':>16s}{'correctness':>13s}")
for name, agg in (("guided", report.guided_aggregate),
                  ("baseline", report.baseline_aggregate)):
    comp = f"{agg.completeness_mean:.3f} +- {agg.completeness_std:.2f}"
    if agg.compactness_mean is None:
        cpo = "n/a"
    else:
        cpo = f"{agg.compactness_mean:.3f} +- {agg.compactness_std:.2f}"
    corr = "/" if agg.correctness is None else f"{agg.correctness:+.3f}"
    print(f"{name:14s}{comp:>16s}{cpo:>16s}{corr:>13s}")

print("\nsample guided editions:")
for row in report.guided[:5]:
    print(f"  drop {row.confidence_drop:+.3f} ({row.operations} ops): "
          f"{' '.join(row.query)}  ->  {' '.join(row.edited)}")
