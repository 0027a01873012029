"""Diverse (counter-)factual exemplars and single-token editions.

First shows how the diversity weight changes which counterfactuals are picked,
then runs the planted negation fixture: explaining "would not recommend ."
surfaces the extrinsic word "definitely", and the likelihood-optimal edition
replaces the negation, flipping the black box from negative to positive.
"""

from proxplain.exemplars import ExemplarConfig, select
from proxplain.explainer import ExplainerConfig, explain
from proxplain.neighborhood import NeighborhoodConfig, construct
from proxplain.toydata import (
    DEFAULT_LEXICON,
    EDITION_DEMO_QUERY,
    build_toy_backend,
    edition_demo_world,
    make_review_corpus,
)

import numpy as np

# --- exemplar diversity -----------------------------------------------------
corpus_texts = make_review_corpus(300, seed=7)
backend, corpus = build_toy_backend(corpus_texts, DEFAULT_LEXICON, dim=64, seed=0)
query = ["the", "burger", "was", "awful", "."]
hood = construct(query, corpus, NeighborhoodConfig(k=10, s=8, n=50, max_iterations=4),
                 backend, np.random.default_rng(1))

for lam in (0.0, 0.5, 1.0):
    picks = select(hood.counterfactuals, hood.pivot, ExemplarConfig(lam=lam, set_size=4))
    print(f"counterfactual exemplars at diversity weight {lam}:")
    for nb in picks:
        print(f"  {nb.distance_to_pivot:.4f}  {' '.join(nb.tokens)}")
    print()

# --- the negation-flip edition ----------------------------------------------
backend, corpus = edition_demo_world()
cfg = ExplainerConfig(neighborhood=NeighborhoodConfig(k=7, s=6, n=50, max_iterations=4))
expl = explain(EDITION_DEMO_QUERY, corpus, backend, cfg, seed=7)

print(f"query:   {' '.join(expl.query)}   ->   {expl.prediction.label}")
for ed in expl.editions:
    verdict = "FLIPS the decision" if ed.flipped else "keeps the decision"
    print(f"edition: {' '.join(ed.tokens)}   [{ed.op} {ed.word!r} at {ed.position}]   "
          f"->   {ed.prediction.label}  ({verdict})")
