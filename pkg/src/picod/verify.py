"""Exact decodability and individual-security checks for linear codes.

For uniform independent messages and linear observations, a user learns
exactly ``info_symbols`` symbols of a message: the rank drop when that
message's columns are deleted from the generator matrix augmented with the
user's side-information basis rows. Zero rank drop means zero mutual
information, so the security condition becomes a rank test.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable

import numpy as np

from .code import LinearCode
from .field import block_columns, rank


class Status(str, Enum):
    SATISFIED_SECURE = "SatisfiedSecure"
    UNSATISFIED_SECURE = "UnsatisfiedSecure"
    SECURITY_VIOLATION = "SecurityViolation"


@dataclass(frozen=True)
class UserReport:
    user: int
    leakage: dict[int, int]  # outside messages only
    decoded: int | None
    status: Status

    def to_dict(self, m: int) -> dict:
        return {
            "user": self.user,
            "status": self.status.value,
            "decoded": self.decoded,
            "leakage": [self.leakage.get(i) for i in range(1, m + 1)],
        }


@dataclass(frozen=True)
class VerificationReport:
    per_user: tuple[UserReport, ...]
    feasible: bool
    ranges: tuple[int, ...]
    length: Fraction

    @property
    def decoded(self) -> dict[int, int | None]:
        return {r.user: r.decoded for r in self.per_user}

    def failing(self) -> list[UserReport]:
        return [r for r in self.per_user if r.status is not Status.SATISFIED_SECURE]

    def to_dict(self) -> dict:
        m = len(self.per_user)
        return {
            "users": [r.to_dict(m) for r in self.per_user],
            "summary": {
                "feasible": self.feasible,
                "length": str(self.length),
                "sum_ranges": sum(self.ranges),
            },
        }


def _user_matrix(code: LinearCode, j: int, extra_known: Iterable[int] = ()) -> np.ndarray:
    known = set(code.instance.side_info(j)) | set(extra_known)
    basis = []
    for i in sorted(known):
        for c in block_columns(i, code.t):
            e = np.zeros(code.width, dtype=np.int64)
            e[c] = 1
            basis.append(e)
    G = code.matrix()
    return np.vstack([G] + basis) if basis else G


def leakage_profile(code: LinearCode, j: int, extra_known: Iterable[int] = ()) -> dict[int, int]:
    """Symbols user j learns about each message outside its side information.

    ``extra_known`` adds basis rows for further messages, e.g. to check
    that granting a user its decoded message changes nothing.
    """
    if not 1 <= j <= code.m:
        raise IndexError(f"user {j} outside 1..{code.m}")
    extra = set(extra_known)
    M = _user_matrix(code, j, extra)
    full = rank(M, code.p)
    out = {}
    for i in code.instance.outside(j):
        if i in extra:
            continue
        keep = [c for c in range(code.width) if c not in block_columns(i, code.t)]
        out[i] = full - rank(M[:, keep], code.p)
    return out


def classify_leakage(leakage: dict[int, int], t: int) -> tuple[Status, int | None]:
    positive = [i for i, v in leakage.items() if v > 0]
    full = [i for i, v in leakage.items() if v == t]
    decoded = full[0] if len(full) == 1 else None
    if len(positive) >= 2:
        return Status.SECURITY_VIOLATION, decoded
    if len(positive) == 1 and decoded is not None:
        return Status.SATISFIED_SECURE, decoded
    return Status.UNSATISFIED_SECURE, None


def user_report(code: LinearCode, j: int) -> UserReport:
    leak = leakage_profile(code, j)
    status, decoded = classify_leakage(leak, code.t)
    return UserReport(j, leak, decoded, status)


def verify(code: LinearCode) -> VerificationReport:
    per_user = tuple(user_report(code, j) for j in range(1, code.m + 1))
    feasible = all(r.status is Status.SATISFIED_SECURE for r in per_user)
    return VerificationReport(per_user, feasible, tuple(code.ranges()), code.length)


def check_no_basis_vector(code: LinearCode) -> bool:
    """True iff no nonzero vector supported on a single message lies in Span(G)."""
    G = code.matrix()
    if G.shape[0] == 0:
        return True
    full = rank(G, code.p)
    for i in range(1, code.m + 1):
        keep = [c for c in range(code.width) if c not in block_columns(i, code.t)]
        if rank(G[:, keep], code.p) < full:
            return False
    return True


@dataclass(frozen=True)
class RangeAccounting:
    sum_b: int
    threshold: Fraction
    passed: bool


def check_range_accounting(code: LinearCode) -> RangeAccounting:
    """Compare the sum of row ranges with m/2 + l (a necessary condition for scalar codes)."""
    if code.t != 1:
        raise NotImplementedError("range accounting is only defined for scalar codes (t=1)")
    sum_b = sum(code.ranges())
    threshold = Fraction(code.m, 2) + len(code.rows)
    return RangeAccounting(sum_b, threshold, sum_b >= threshold)
