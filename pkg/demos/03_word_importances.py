"""Word-level explanation of a single decision.

Fits the weighted bag-of-words surrogate on a constructed neighborhood and
prints intrinsic saliency (words from the query) next to extrinsic words
(words the neighborhood introduced). Positive weights support the decision
that was made; negative weights pull toward the opposite class.
"""

from proxplain.explainer import ExplainerConfig, explain
from proxplain.neighborhood import NeighborhoodConfig
from proxplain.surrogate import filter_important
from proxplain.toydata import DEFAULT_LEXICON, build_toy_backend, make_review_corpus

corpus_texts = make_review_corpus(300, seed=7)
backend, corpus = build_toy_backend(corpus_texts, DEFAULT_LEXICON, dim=64, seed=0)

config = ExplainerConfig(neighborhood=NeighborhoodConfig(k=10, s=8, n=50, max_iterations=4))
for query in (["great", "food", "."], ["the", "sushi", "was", "bland", "."]):
    expl = explain(query, corpus, backend, config, seed=3)
    print(f"query: {' '.join(query)}   ->   {expl.prediction.label} "
          f"(p_pos={expl.prediction.p_pos:.3f})")
    print("  intrinsic saliency:")
    for wi in expl.intrinsic:
        mark = "*" if abs(wi.weight) >= config.eta else " "
        print(f"   {mark} {wi.token:<12s} {wi.weight:+.3f}")
    print("  extrinsic words (only in neighbors), top 5:")
    for wi in expl.extrinsic[:5]:
        mark = "*" if abs(wi.weight) >= config.eta else " "
        print(f"   {mark} {wi.token:<12s} {wi.weight:+.3f}")
    print()

print("(* marks |weight| above the importance threshold)")
