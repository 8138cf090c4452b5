"""Circular-shift instances, regime classification and closed-form bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction


class InvalidInstance(ValueError):
    pass


class RegimeError(ValueError):
    """An operation was requested for an instance in the wrong regime."""


class Regime(str, Enum):
    DIVISIBLE = "Divisible"
    INFEASIBLE_LINEAR = "InfeasibleLinear"
    GENERAL_NON_DIVISIBLE = "GeneralNonDivisible"


# Linear infeasibility conditions, in case order 1..4.
INFEASIBLE_CASES = {
    1: "s=1, m>=3",
    2: "s=2, m>=5",
    3: "s=3, odd m",
    4: "s=m-2, odd m",
}


@dataclass(frozen=True)
class Instance:
    """m users/messages; user j knows the s messages j, j+1, ..., j+s-1 (mod m)."""

    m: int
    s: int

    def __post_init__(self):
        if not isinstance(self.m, int) or not isinstance(self.s, int):
            raise InvalidInstance("m and s must be integers")
        if self.m < 2:
            raise InvalidInstance(f"need m >= 2, got m={self.m}")
        if not 1 <= self.s <= self.m - 1:
            raise InvalidInstance(f"need 1 <= s <= m-1, got (m, s) = ({self.m}, {self.s})")

    def wrap(self, i: int) -> int:
        """Reduce an index into 1..m."""
        return (i - 1) % self.m + 1

    def side_info(self, j: int) -> frozenset[int]:
        if not 1 <= j <= self.m:
            raise IndexError(f"user {j} outside 1..{self.m}")
        return frozenset(self.wrap(j + k) for k in range(self.s))

    def outside(self, j: int) -> list[int]:
        """Messages user j does not know, in increasing order."""
        known = self.side_info(j)
        return [i for i in range(1, self.m + 1) if i not in known]

    @property
    def divisible(self) -> bool:
        return self.m % (self.m - self.s) == 0


def side_info(inst: Instance, j: int) -> frozenset[int]:
    return inst.side_info(j)


def infeasible_cases(inst: Instance) -> tuple[int, ...]:
    m, s = inst.m, inst.s
    hits = []
    if s == 1 and m >= 3:
        hits.append(1)
    if s == 2 and m >= 5:
        hits.append(2)
    if s == 3 and m % 2:
        hits.append(3)
    if s == m - 2 and m % 2:
        hits.append(4)
    return tuple(hits)


@dataclass(frozen=True)
class RegimeClassification:
    """``upper_bound`` is None when no achievability result is known."""

    regime: Regime
    lower_bound: Fraction | None
    upper_bound: Fraction | None
    infeasibility_case: int | None = None
    all_cases: tuple[int, ...] = ()

    @property
    def optimum(self) -> Fraction | None:
        if self.lower_bound is not None and self.lower_bound == self.upper_bound:
            return self.lower_bound
        return None

    def label(self) -> str:
        if self.regime is Regime.INFEASIBLE_LINEAR:
            return f"InfeasibleLinear case {self.infeasibility_case}"
        return self.regime.value


def converse_bound(inst: Instance) -> Fraction:
    """Linear converse 3m/(2s) for the non-divisible regime."""
    return Fraction(3 * inst.m, 2 * inst.s)


def even_m_length(inst: Instance) -> int:
    return inst.m // 2 + 2 - math.ceil(inst.s / 2)


def classify(inst: Instance) -> RegimeClassification:
    m, s = inst.m, inst.s
    cases = infeasible_cases(inst)
    if cases:
        assert not inst.divisible, (m, s)
        return RegimeClassification(Regime.INFEASIBLE_LINEAR, None, None, cases[0], cases)
    if inst.divisible:
        opt = Fraction(m, s)
        return RegimeClassification(Regime.DIVISIBLE, opt, opt)
    lower = converse_bound(inst)
    upper: Fraction | None = None
    if m % (2 * s) == 0:
        upper = lower
    elif m % 2 == 0:
        upper = Fraction(even_m_length(inst))
    elif s == m - 3 and s >= 8:
        upper = Fraction(4)
    return RegimeClassification(Regime.GENERAL_NON_DIVISIBLE, lower, upper)


def scalar_lower_bound(inst: Instance) -> int:
    """Ceiling of the converse bound, valid for scalar codes."""
    if inst.divisible:
        raise RegimeError(f"{inst} is in the divisible regime; the converse does not apply")
    return math.ceil(converse_bound(inst))


@dataclass(frozen=True)
class CentralizedBounds:
    """Centralized secure lengths; None marks N/A.

    ``linear_optimal`` is only tabulated for s < m/2 outside the divisible
    regime; elsewhere the information-theoretic value is the reference.
    """

    it_optimal: Fraction | None
    linear_optimal: Fraction | None
    infeasible: bool


def centralized_bounds(inst: Instance) -> CentralizedBounds:
    m, s = inst.m, inst.s
    if inst.divisible:
        return CentralizedBounds(Fraction(1), None, False)
    if m % 2 and s in (1, m - 2):
        return CentralizedBounds(None, None, True)
    if 2 * s > m:
        return CentralizedBounds(Fraction(2), None, False)
    lin = math.ceil(Fraction(m // s, 2))
    if m % s:
        lin += 1
    return CentralizedBounds(None, Fraction(lin), False)


def gap_report(inst: Instance, decentralized: Fraction | int | None = None) -> Fraction | None:
    """Decentralized over centralized secure length, or None if either is unknown.

    ``decentralized`` overrides the closed-form optimum, e.g. with a value
    established by exhaustive search.
    """
    if decentralized is None:
        decentralized = classify(inst).optimum
    central = centralized_bounds(inst)
    denom = central.linear_optimal if central.linear_optimal is not None else central.it_optimal
    if decentralized is None or denom is None:
        return None
    return Fraction(decentralized) / denom
