"""Exact linear algebra over prime fields GF(p).

Matrices are handled as 2-D integer numpy arrays with entries in [0, p-1].
Anything array-like (lists of rows, tuples) is accepted and coerced.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np


class DimensionError(ValueError):
    """Raised when vector and matrix widths disagree."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def check_prime(p: int) -> int:
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise ValueError(f"field modulus must be prime, got {p!r}")
    return int(p)


@lru_cache(maxsize=None)
def inverses(p: int) -> tuple[int, ...]:
    """Multiplicative inverse table; entry 0 is a placeholder 0."""
    return (0,) + tuple(pow(a, p - 2, p) for a in range(1, p))


@dataclass(frozen=True)
class FieldScalar:
    value: int
    p: int = 2

    def __post_init__(self):
        check_prime(self.p)
        if not 0 <= self.value < self.p:
            raise ValueError(f"{self.value} is not a residue mod {self.p}")

    def __add__(self, other: FieldScalar) -> FieldScalar:
        self._same_field(other)
        return FieldScalar((self.value + other.value) % self.p, self.p)

    def __sub__(self, other: FieldScalar) -> FieldScalar:
        self._same_field(other)
        return FieldScalar((self.value - other.value) % self.p, self.p)

    def __mul__(self, other: FieldScalar) -> FieldScalar:
        self._same_field(other)
        return FieldScalar((self.value * other.value) % self.p, self.p)

    def __neg__(self) -> FieldScalar:
        return FieldScalar(-self.value % self.p, self.p)

    def inverse(self) -> FieldScalar:
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse")
        return FieldScalar(inverses(self.p)[self.value], self.p)

    def __int__(self) -> int:
        return self.value

    def _same_field(self, other: FieldScalar) -> None:
        if self.p != other.p:
            raise ValueError(f"mixed moduli {self.p} and {other.p}")


def as_matrix(rows, p: int = 2, width: int | None = None) -> np.ndarray:
    """Coerce ``rows`` to a reduced int64 matrix of shape (r, width)."""
    check_prime(p)
    M = np.asarray(rows, dtype=np.int64)
    if M.size == 0:
        if M.ndim == 2:
            width = M.shape[1] if width is None else width
        return np.zeros((0, width or 0), dtype=np.int64)
    if M.ndim == 1:
        M = M.reshape(1, -1)
    if M.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {M.shape}")
    if width is not None and M.shape[1] != width:
        raise DimensionError(f"expected width {width}, got {M.shape[1]}")
    return M % p


def row_reduce(rows, p: int = 2) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(p).

    Pivots are taken left to right (lowest column index first), so the
    result is canonical for the row space. Returns the nonzero RREF rows
    and their pivot columns.
    """
    R = as_matrix(rows, p).copy()
    inv = inverses(p)
    n_rows, n_cols = R.shape
    pivots: list[int] = []
    r = 0
    for col in range(n_cols):
        if r == n_rows:
            break
        nz = np.flatnonzero(R[r:, col])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            R[[r, k]] = R[[k, r]]
        R[r] = (R[r] * inv[int(R[r, col])]) % p
        factors = R[:, col].copy()
        factors[r] = 0
        R = (R - np.outer(factors, R[r])) % p
        pivots.append(col)
        r += 1
    return R[:r], pivots


def rank(rows, p: int = 2) -> int:
    return len(row_reduce(rows, p)[1])


def in_rowspan(v: Sequence[int], rows, p: int = 2) -> bool:
    """True iff ``v`` is a GF(p) linear combination of ``rows``."""
    vec = np.asarray(v, dtype=np.int64).reshape(-1) % p
    M = as_matrix(rows, p)
    if M.shape[0] == 0:
        M = np.zeros((0, vec.size), dtype=np.int64)
    if M.shape[1] != vec.size:
        raise DimensionError(f"vector width {vec.size} != matrix width {M.shape[1]}")
    if not vec.any():
        return True
    return rank(np.vstack([M, vec]), p) == rank(M, p)


def block_columns(block: int, t: int) -> range:
    """Columns holding the ``t`` symbols of 1-based message ``block``."""
    return range((block - 1) * t, block * t)


def info_symbols(rows, block: int, t: int = 1, p: int = 2) -> int:
    """Symbols an observer of ``rows`` learns about message ``block``.

    Equals rank(M) - rank(M with the block's t columns deleted), i.e. the
    dimension of the part of the row space supported on that block.
    """
    M = as_matrix(rows, p)
    if t < 1 or M.shape[1] % t:
        raise DimensionError(f"width {M.shape[1]} is not a multiple of t={t}")
    m = M.shape[1] // t
    if not 1 <= block <= m:
        raise IndexError(f"message {block} outside 1..{m}")
    keep = [c for c in range(M.shape[1]) if c not in block_columns(block, t)]
    return rank(M, p) - rank(M[:, keep], p)
