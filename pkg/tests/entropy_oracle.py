"""Brute-force information oracle over GF(2).

Enumerates every message vector w in GF(2)^(m*t), computes an observer's
view (G w, w restricted to known columns) and measures I(W_i; view) from
empirical counts. Independent of any rank computation.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def all_vectors(n: int) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.int64)
    return ((idx[:, None] >> np.arange(n)) & 1).astype(np.int64)


def _entropy_from_counts(counts: np.ndarray) -> float:
    counts = counts[counts > 0].astype(float)
    prob = counts / counts.sum()
    return float(-(prob * np.log2(prob)).sum())


def mutual_information(G, known_cols, t: int) -> dict[int, float]:
    """I(W_i ; G w, w_known) in bits for every message i (1-based)."""
    G = np.asarray(G, dtype=np.int64)
    n = G.shape[1]
    m = n // t
    W = all_vectors(n)
    parts = []
    if G.shape[0]:
        parts.append((W @ G.T) % 2)
    if known_cols:
        parts.append(W[:, sorted(known_cols)])
    if parts:
        view = np.hstack(parts)
        keys = view @ (1 << np.arange(view.shape[1], dtype=np.int64))
        _, view_id = np.unique(keys, return_inverse=True)
    else:
        view_id = np.zeros(len(W), dtype=np.int64)
    n_views = int(view_id.max()) + 1
    h_view = _entropy_from_counts(np.bincount(view_id))
    out = {}
    for i in range(1, m + 1):
        block = W[:, (i - 1) * t:i * t] @ (1 << np.arange(t, dtype=np.int64))
        joint = view_id * (1 << t) + block
        h_joint = _entropy_from_counts(np.bincount(joint, minlength=n_views << t))
        h_block = _entropy_from_counts(np.bincount(block, minlength=1 << t))
        out[i] = h_block + h_view - h_joint
    return out


def user_leakage(G, m: int, s: int, t: int, j: int) -> dict[int, float]:
    """Bits learned by user j about each message outside its window."""
    known = {(j - 1 + k) % m + 1 for k in range(s)}
    cols = [(i - 1) * t + c for i in known for c in range(t)]
    mi = mutual_information(G, cols, t)
    return {i: v for i, v in mi.items() if i not in known}


def status_from_entropy(leak: dict[int, float], t: int, tol: float = 1e-9) -> tuple[str, int | None]:
    positive = [i for i, v in leak.items() if v > tol]
    full = [i for i, v in leak.items() if abs(v - t) <= tol]
    if len(positive) >= 2:
        return "SecurityViolation", (full[0] if len(full) == 1 else None)
    if len(positive) == 1 and len(full) == 1:
        return "SatisfiedSecure", full[0]
    return "UnsatisfiedSecure", None
