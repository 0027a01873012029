"""Vector arithmetic in the latent space: cosine distance and linear interpolation.

All functions operate on 1-D float arrays of a common dimension and are pure;
they are safe for unrestricted parallel use.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateVectorError

_ZERO_TOL = 0.0  # exact zero norm only; encoders never emit near-zero vectors


def as_latent(v) -> np.ndarray:
    """Coerce to a finite 1-D float64 vector, rejecting NaN/Inf."""
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise DegenerateVectorError(f"latent vector must be 1-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DegenerateVectorError("degenerate latent vector: non-finite components")
    return arr


def cosine_distance(a, b) -> float:
    """1 - cos(a, b), in [0, 2]. Zero vectors and dimension mismatches are rejected."""
    a = as_latent(a)
    b = as_latent(b)
    if a.shape != b.shape:
        raise DegenerateVectorError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na <= _ZERO_TOL or nb <= _ZERO_TOL:
        raise DegenerateVectorError("degenerate latent vector: zero norm")
    if np.array_equal(a, b):
        return 0.0  # exact, so identical vectors get kernel weight exactly 1
    cos = float(np.dot(a, b) / (na * nb))
    # clamp rounding spill outside [-1, 1]
    cos = max(-1.0, min(1.0, cos))
    return 1.0 - cos


def cosine_distances_to(point, matrix) -> np.ndarray:
    """Cosine distance from one vector to every row of a matrix."""
    p = as_latent(point)
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[1] != p.shape[0]:
        raise DegenerateVectorError(f"matrix shape {m.shape} incompatible with vector of dim {p.shape[0]}")
    np_norm = np.linalg.norm(p)
    row_norms = np.linalg.norm(m, axis=1)
    if np_norm <= _ZERO_TOL or np.any(row_norms <= _ZERO_TOL):
        raise DegenerateVectorError("degenerate latent vector: zero norm")
    cos = (m @ p) / (row_norms * np_norm)
    dist = 1.0 - np.clip(cos, -1.0, 1.0)
    dist[np.all(m == p, axis=1)] = 0.0
    return dist


def interpolate(start, end, steps: int) -> np.ndarray:
    """Evenly spaced points from `start` to `end`, inclusive.

    Returns an array of shape (steps + 1, d) whose row i is
    start + i * (end - start) / steps; rows 0 and steps are bitwise copies of
    the endpoints.
    """
    a = as_latent(start)
    b = as_latent(end)
    if a.shape != b.shape:
        raise DegenerateVectorError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    if steps < 1:
        raise ValueError("interpolation requires at least one step")
    t = np.arange(steps + 1, dtype=np.float64)[:, None] / steps
    path = a[None, :] + t * (b - a)[None, :]
    path[0] = a
    path[steps] = b
    return path
