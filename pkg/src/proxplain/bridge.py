"""Client for the line-delimited model-server protocol.

A server is any child process that answers one JSON object per line on stdout
for each JSON object received on stdin:

    {"id":N,"op":"info"}                         -> {"id":N,"ok":true,"latent_dim":D,"deterministic":B}
    {"id":N,"op":"encode","texts":[...]}         -> {"id":N,"ok":true,"vectors":[[...],...]}
    {"id":N,"op":"decode","vectors":[[...],...]} -> {"id":N,"ok":true,"texts":[...]}
    {"id":N,"op":"predict","texts":[...]}        -> {"id":N,"ok":true,"scores":[[p_pos,p_neg],...]}
    any failure                                  -> {"id":N,"ok":false,"error":"..."}

Texts travel as space-joined token strings; floats carry 9 significant digits,
which round-trips across languages at the 1e-6 tolerance the pipeline needs.
The client keeps at most one request in flight and consumes responses in
request order. One connection serves one explanation run; parallel runs use
separate connections.
"""

from __future__ import annotations

import json
import os
import select
import shlex
import subprocess

import numpy as np

from .errors import BridgeProtocolError, BridgeServerError, BridgeTransportError
from .models import ModelBackend

WIRE_DIGITS = 9


def wire_float(x: float) -> float:
    """Round to 9 significant digits so serialized output is cross-language stable."""
    return float(f"{float(x):.{WIRE_DIGITS}g}")


def wire_vectors(vectors) -> list[list[float]]:
    return [[wire_float(c) for c in row] for row in np.asarray(vectors, dtype=np.float64)]


class _LineTransport:
    """Newline-delimited I/O with a child process, with read timeouts."""

    def __init__(self, command, timeout: float = 30.0):
        argv = shlex.split(command) if isinstance(command, str) else list(command)
        try:
            self.proc = subprocess.Popen(
                argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=False, bufsize=0
            )
        except OSError as exc:
            raise BridgeTransportError(f"cannot launch bridge server: {exc}") from exc
        self.timeout = timeout
        self._buf = b""

    def send_line(self, line: str):
        try:
            self.proc.stdin.write(line.encode("utf-8") + b"\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise BridgeTransportError(f"bridge server pipe broken: {exc}") from exc

    def recv_line(self) -> str:
        fd = self.proc.stdout.fileno()
        while b"\n" not in self._buf:
            ready, _, _ = select.select([fd], [], [], self.timeout)
            if not ready:
                raise BridgeTransportError(f"no reply from bridge server within {self.timeout}s")
            chunk = os.read(fd, 65536)
            if not chunk:
                raise BridgeTransportError("bridge server closed its output")
            self._buf += chunk
        line, self._buf = self._buf.split(b"\n", 1)
        return line.decode("utf-8")

    def close(self):
        if self.proc.poll() is None:
            try:
                self.proc.stdin.close()
            except OSError:
                pass
            try:
                self.proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self.proc.kill()
                self.proc.wait()


class BridgeClient:
    """Synchronous client; ids increase monotonically per connection."""

    def __init__(self, command, timeout: float = 30.0):
        self._transport = _LineTransport(command, timeout=timeout)
        self._next_id = 0
        self.latent_dim: int | None = None
        self.decoder_deterministic: bool | None = None

    def _exchange(self, op: str, **payload) -> dict:
        req_id = self._next_id
        self._next_id += 1
        request = {"id": req_id, "op": op, **payload}
        self._transport.send_line(json.dumps(request))
        raw = self._transport.recv_line()
        try:
            response = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise BridgeProtocolError(f"malformed response line: {raw[:200]!r}") from exc
        if not isinstance(response, dict) or "id" not in response or "ok" not in response:
            raise BridgeProtocolError(f"response missing id/ok fields: {raw[:200]!r}")
        if response["id"] != req_id:
            raise BridgeProtocolError(f"response id {response['id']} does not match request id {req_id}")
        if not response["ok"]:
            raise BridgeServerError(str(response.get("error") or "server reported an unnamed error"))
        return response

    def handshake(self) -> tuple[int, bool]:
        response = self._exchange("info")
        try:
            dim = int(response["latent_dim"])
            det = bool(response["deterministic"])
        except (KeyError, TypeError, ValueError) as exc:
            raise BridgeProtocolError(f"invalid info reply: {response}") from exc
        if dim < 1:
            raise BridgeProtocolError(f"server declared nonpositive latent_dim {dim}")
        self.latent_dim = dim
        self.decoder_deterministic = det
        return dim, det

    def encode_batch(self, texts) -> np.ndarray:
        if len(texts) == 0:
            return np.zeros((0, self.latent_dim or 0))
        response = self._exchange("encode", texts=[" ".join(t) for t in texts])
        vectors = response.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise BridgeProtocolError("encode reply misaligned with request")
        return np.asarray(vectors, dtype=np.float64)

    def decode_batch(self, vectors) -> list[list[str]]:
        Z = np.asarray(vectors, dtype=np.float64)
        if Z.shape[0] == 0:
            return []
        response = self._exchange("decode", vectors=wire_vectors(Z))
        texts = response.get("texts")
        if not isinstance(texts, list) or len(texts) != Z.shape[0]:
            raise BridgeProtocolError("decode reply misaligned with request")
        return [t.split(" ") for t in texts]

    def predict_batch(self, texts) -> np.ndarray:
        if len(texts) == 0:
            return np.zeros((0, 2))
        response = self._exchange("predict", texts=[" ".join(t) for t in texts])
        scores = response.get("scores")
        if not isinstance(scores, list) or len(scores) != len(texts):
            raise BridgeProtocolError("predict reply misaligned with request")
        return np.asarray(scores, dtype=np.float64)

    def close(self):
        self._transport.close()


class BridgeBackend(ModelBackend):
    """ModelBackend over a BridgeClient; performs the handshake on construction."""

    def __init__(self, command, timeout: float = 30.0):
        self.client = BridgeClient(command, timeout=timeout)
        self.latent_dim, self.deterministic_decoder = self.client.handshake()

    def encode_batch(self, texts) -> np.ndarray:
        return self.client.encode_batch(texts)

    def decode_batch(self, vectors) -> list[list[str]]:
        return self.client.decode_batch(vectors)

    def predict_batch(self, texts) -> np.ndarray:
        scores = self.client.predict_batch(texts)
        if scores.size:
            sums = scores.sum(axis=1)
            if np.any(np.abs(sums - 1.0) > 1e-6):
                raise BridgeProtocolError("server confidences do not sum to 1")
            # remove 9-digit serialization dust so downstream invariants hold exactly
            scores = scores / sums[:, None]
        return scores

    def close(self):
        self.client.close()
