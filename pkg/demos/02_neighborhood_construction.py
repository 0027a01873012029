"""Progressive neighborhood approximation around one review.

Seeds counterfactual landmarks from the corpus, then runs the two-stage
interpolation loop and reports how much closer the discovered counterfactuals
get compared to the best the corpus alone could offer.
"""

import numpy as np

from proxplain.neighborhood import NeighborhoodConfig, construct
from proxplain.toydata import DEFAULT_LEXICON, build_toy_backend, make_review_corpus

corpus_texts = make_review_corpus(300, seed=7)
backend, corpus = build_toy_backend(corpus_texts, DEFAULT_LEXICON, dim=64, seed=0)

query = ["the", "coffee", "was", "horrible", "."]
print(f"query: {' '.join(query)}")
print(f"black box says: {backend.predict(query).label}\n")

config = NeighborhoodConfig(k=10, s=8, n=25, max_iterations=5)
hood = construct(query, corpus, config, backend, np.random.default_rng(42), keep_trace=True)

print(f"closest counterfactual in the corpus (seed landmark): {hood.seed_min_distance:.4f}")
for step in hood.trace:
    print(f"  after iteration {step['iteration']}: "
          f"min landmark distance {step['min_landmark_distance']:.4f}")
print(f"closest constructed counterfactual: {hood.final_min_distance:.4f}")
print(f"improvement factor: {hood.seed_min_distance / hood.final_min_distance:.1f}x")
print(f"decoder calls spent: {hood.decode_calls}\n")

print("nearest factuals (same class as the query):")
for nb in hood.factuals[:5]:
    print(f"  {nb.distance_to_pivot:.4f}  {' '.join(nb.tokens)}")
print("nearest counterfactuals (opposite class):")
for nb in hood.counterfactuals[:5]:
    print(f"  {nb.distance_to_pivot:.4f}  {' '.join(nb.tokens)}")
