"""Request loop for the line-delimited bridge protocol.

One JSON object per line in, one per line out, ids echoed. A malformed record
produces an ok=false response and the loop keeps running; the loop ends only
when stdin closes. Floats are written with 9 significant digits.

A hosted model must provide:

    latent_dim: int
    deterministic: bool
    encode_batch(list[list[str]]) -> array-like of shape (n, latent_dim)
    decode_batch(array-like)      -> list[list[str]]
    predict_batch(list[list[str]]) -> array-like of shape (n, 2)  # [p_pos, p_neg]

which is also the adapter signature for mounting real autoencoders and
classifiers in custom mode.
"""

from __future__ import annotations

import json

import numpy as np

WIRE_DIGITS = 9


def wire_float(x: float) -> float:
    return float(f"{float(x):.{WIRE_DIGITS}g}")


def handle_request(model, line: str) -> dict:
    req_id = None
    try:
        request = json.loads(line)
        if not isinstance(request, dict):
            raise ValueError("request is not an object")
        req_id = request.get("id")
        op = request.get("op")
        if op == "info":
            return {"id": req_id, "ok": True, "latent_dim": int(model.latent_dim),
                    "deterministic": bool(model.deterministic)}
        if op == "encode":
            texts = [t.split(" ") for t in request["texts"]]
            vectors = np.asarray(model.encode_batch(texts), dtype=np.float64)
            return {"id": req_id, "ok": True,
                    "vectors": [[wire_float(c) for c in row] for row in vectors]}
        if op == "decode":
            decoded = model.decode_batch(np.asarray(request["vectors"], dtype=np.float64))
            return {"id": req_id, "ok": True, "texts": [" ".join(t) for t in decoded]}
        if op == "predict":
            texts = [t.split(" ") for t in request["texts"]]
            scores = np.asarray(model.predict_batch(texts), dtype=np.float64)
            return {"id": req_id, "ok": True,
                    "scores": [[wire_float(r[0]), wire_float(r[1])] for r in scores]}
        return {"id": req_id, "ok": False, "error": f"unsupported op {op!r}"}
    except Exception as exc:  # never crash the loop on a bad record
        return {"id": req_id, "ok": False, "error": f"{type(exc).__name__}: {exc}"}


def serve(model, stdin, stdout):
    """Answer requests until the input stream closes."""
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        response = handle_request(model, line)
        stdout.write(json.dumps(response) + "\n")
        stdout.flush()
