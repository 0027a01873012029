"""Reference external model server for the proxplain bridge protocol.

Hosts either a mirrored copy of the client's built-in toy model (for protocol
conformance testing) or custom encode/decode/predict callables mounted through
the adapter interface, and answers newline-delimited JSON requests on stdio.
"""

from .toy import ToyMirrorModel, load_corpus, load_lexicon
from .protocol import serve

__version__ = "0.1.0"

__all__ = ["ToyMirrorModel", "load_corpus", "load_lexicon", "serve"]
