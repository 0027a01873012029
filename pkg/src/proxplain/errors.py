"""Exception hierarchy shared across the package."""


class ProxplainError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateVectorError(ProxplainError):
    """A latent vector is unusable (zero norm, NaN/Inf, or wrong dimension)."""


class LandmarkSeedingError(ProxplainError):
    """The corpus holds no counterfactual to seed the landmark set from."""


class DegenerateNeighborhoodError(ProxplainError):
    """Neighborhood construction found no instance of one class."""

    def __init__(self, missing_class: str, diagnostics=None):
        self.missing_class = missing_class
        self.diagnostics = diagnostics or {}
        super().__init__(f"degenerate neighborhood: no {missing_class} instances found")


class SurrogateError(ProxplainError):
    """The local regression problem cannot be solved."""


class BridgeError(ProxplainError):
    """Base class for model-bridge failures."""


class BridgeTransportError(BridgeError):
    """The child process or pipe died; the operation may be retried on a fresh connection."""


class BridgeProtocolError(BridgeError):
    """The server sent a malformed or out-of-order response."""


class BridgeServerError(BridgeError):
    """The server answered ok=false; carries the server's message verbatim."""
