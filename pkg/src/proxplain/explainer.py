"""End-to-end pipeline: neighborhood -> surrogate -> exemplars -> editions."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from . import edition as edition_mod
from . import exemplars as exemplars_mod
from . import surrogate as surrogate_mod
from .edition import ContextModel, Edition
from .exemplars import ExemplarConfig
from .models import Corpus, ModelBackend, Prediction, check_tokens
from .neighborhood import Neighbor, Neighborhood, NeighborhoodConfig, construct
from .surrogate import WordImportance, filter_important

DEFAULT_EDITION_CAP = 3


@dataclass
class ExplainerConfig:
    neighborhood: NeighborhoodConfig = field(default_factory=NeighborhoodConfig)
    exemplars: ExemplarConfig = field(default_factory=ExemplarConfig)
    sigma: float = surrogate_mod.DEFAULT_SIGMA
    ridge: float = surrogate_mod.DEFAULT_RIDGE
    window: int = edition_mod.DEFAULT_WINDOW
    eps: float = edition_mod.DEFAULT_EPS
    eta: float = 0.1
    edition_cap: int = DEFAULT_EDITION_CAP

    def snapshot(self) -> dict:
        return asdict(self)


@dataclass
class Explanation:
    query: tuple[str, ...]
    prediction: Prediction
    intrinsic: list[WordImportance]
    extrinsic: list[WordImportance]
    factuals: list[Neighbor]
    counterfactuals: list[Neighbor]
    editions: list[Edition]
    context: ContextModel
    neighborhood: Neighborhood
    provenance: dict

    @property
    def importances(self) -> list[WordImportance]:
        """All importances, |weight| descending."""
        merged = self.intrinsic + self.extrinsic
        merged.sort(key=lambda wi: (-abs(wi.weight), wi.token))
        return merged


def explain(query, corpus: Corpus, backend: ModelBackend, config: ExplainerConfig | None = None,
            seed: int = 0) -> Explanation:
    """Explain one black-box decision; deterministic given the seed.

    Runs neighborhood construction, fits the surrogate, splits importances into
    intrinsic/extrinsic, selects diverse exemplars per class, and builds one
    edition for each important extrinsic word opposing the decision (up to
    `edition_cap`, by descending absolute weight).
    """
    config = config or ExplainerConfig()
    toks = check_tokens(query)
    rng = np.random.default_rng(np.random.SeedSequence(seed))

    hood = construct(toks, corpus, config.neighborhood, backend, rng)
    model = surrogate_mod.fit(hood.neighbors, hood.pivot, toks,
                              sigma=config.sigma, ridge=config.ridge)
    importances = surrogate_mod.extract_importances(model, toks, hood.prediction.label)
    intrinsic = [wi for wi in importances if wi.origin == surrogate_mod.INTRINSIC]
    extrinsic = [wi for wi in importances if wi.origin == surrogate_mod.EXTRINSIC]

    factuals = exemplars_mod.select(hood.factuals, hood.pivot, config.exemplars)
    counterfactuals = exemplars_mod.select(hood.counterfactuals, hood.pivot, config.exemplars)

    context = edition_mod.build_context_model(hood.texts, window=config.window, eps=config.eps)
    # one edition per important extrinsic word, strongest first: opposing words
    # yield manually created counterfactuals, supporting words factuals
    editions = []
    for wi in filter_important(extrinsic, config.eta)[:config.edition_cap]:
        editions.append(edition_mod.best_edition(toks, wi.token, context, backend))

    provenance = {
        "seed": seed,
        "config": config.snapshot(),
        "neighborhood_size": len(hood.neighbors),
        "iterations": hood.iterations,
        "seed_min_distance": hood.seed_min_distance,
        "final_min_distance": hood.final_min_distance,
    }
    return Explanation(
        query=tuple(toks), prediction=hood.prediction,
        intrinsic=intrinsic, extrinsic=extrinsic,
        factuals=factuals, counterfactuals=counterfactuals,
        editions=editions, context=context, neighborhood=hood,
        provenance=provenance,
    )
