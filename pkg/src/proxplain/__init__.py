"""proxplain: local explanations for text classifiers via progressive
latent-space neighborhood approximation.

The pipeline encodes a query text into a latent space, seeds counterfactual
landmarks from a corpus, tightens them around the query with a two-stage
interpolation scheme, fits a weighted bag-of-words surrogate on the decoded
neighborhood, and reports word importances, diverse (counter-)factual
exemplars, and single-token editions, together with a quantitative evaluation
harness (completeness / compactness / correctness).
"""

from .errors import (
    BridgeError,
    BridgeProtocolError,
    BridgeServerError,
    BridgeTransportError,
    DegenerateNeighborhoodError,
    DegenerateVectorError,
    LandmarkSeedingError,
    ProxplainError,
    SurrogateError,
)
from .latent import cosine_distance, interpolate
from .models import (
    ComposedBackend,
    Corpus,
    CorpusNearestDecoder,
    GreedyBagDecoder,
    LatentLinearBlackBox,
    LexiconBlackBox,
    ModelBackend,
    Prediction,
    TokenEmbedding,
    ToyEncoder,
    VectorTokenBackend,
    build_corpus,
    load_corpus_file,
    load_lexicon_file,
    strong_opposite_words,
)
from .bridge import BridgeBackend, BridgeClient
from .neighborhood import (
    LandmarkSet,
    Neighbor,
    Neighborhood,
    NeighborhoodConfig,
    approximate,
    construct,
    seed_landmarks,
)
from .surrogate import (
    SurrogateModel,
    Vocabulary,
    WordImportance,
    build_vocabulary,
    extract_importances,
    featurize,
    filter_important,
    fit,
)
from .exemplars import ExemplarConfig, select
from .edition import ContextModel, Edition, best_edition, build_context_model
from .evaluation import EvaluationConfig, EvaluationReport, baseline_edit, evaluate, guided_edit
from .explainer import Explanation, ExplainerConfig, explain

__version__ = "0.1.0"

__all__ = [
    "ProxplainError", "DegenerateVectorError", "LandmarkSeedingError",
    "DegenerateNeighborhoodError", "SurrogateError",
    "BridgeError", "BridgeTransportError", "BridgeProtocolError", "BridgeServerError",
    "cosine_distance", "interpolate",
    "Prediction", "ModelBackend", "ComposedBackend", "TokenEmbedding", "ToyEncoder",
    "CorpusNearestDecoder", "GreedyBagDecoder", "LexiconBlackBox", "LatentLinearBlackBox",
    "VectorTokenBackend", "Corpus", "build_corpus", "load_corpus_file", "load_lexicon_file",
    "strong_opposite_words",
    "BridgeClient", "BridgeBackend",
    "Neighbor", "LandmarkSet", "Neighborhood", "NeighborhoodConfig",
    "seed_landmarks", "approximate", "construct",
    "Vocabulary", "SurrogateModel", "WordImportance", "build_vocabulary", "featurize",
    "fit", "extract_importances", "filter_important",
    "ExemplarConfig", "select",
    "ContextModel", "Edition", "build_context_model", "best_edition",
    "EvaluationConfig", "EvaluationReport", "guided_edit", "baseline_edit", "evaluate",
    "Explanation", "ExplainerConfig", "explain",
]
