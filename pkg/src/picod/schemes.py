"""Explicit achievable codes and a dispatcher picking the best one per instance.

No builder returns a code that fails verification: a failing construction
raises ``ConstructionInvalid`` carrying the verifier's per-user report.
"""

from __future__ import annotations

from dataclasses import dataclass

from .code import CodeRow, LinearCode
from .instance import Instance, Regime, RegimeError, classify, even_m_length
from .verify import VerificationReport, verify


class PreconditionError(ValueError):
    pass


class ConstructionInvalid(Exception):
    def __init__(self, construction: str, instance: Instance, report: VerificationReport | None, reason: str = ""):
        self.construction = construction
        self.instance = instance
        self.report = report
        failing = [] if report is None else [u.user for u in report.failing()]
        detail = reason or f"users {failing} not securely satisfied"
        super().__init__(f"{construction} for (m, s) = ({instance.m}, {instance.s}): {detail}")


class NoKnownScheme(Exception):
    pass


def _sum_rows(inst: Instance, index_sets: list[list[int]], p: int, name: str) -> LinearCode:
    """Rows with coefficient 1 on each listed message (repeats accumulate mod p)."""
    rows = []
    for idx in index_sets:
        coeffs = [0] * inst.m
        for i in idx:
            k = inst.wrap(i) - 1
            coeffs[k] = (coeffs[k] + 1) % p
        if not any(coeffs):
            raise ConstructionInvalid(name, inst, None, f"row over messages {idx} cancels to zero")
        rows.append(CodeRow(coeffs))
    try:
        return LinearCode(inst, tuple(rows), p=p)
    except ValueError as exc:
        raise ConstructionInvalid(name, inst, None, str(exc)) from None


def _checked(code: LinearCode, name: str) -> LinearCode:
    report = verify(code)
    if not report.feasible:
        raise ConstructionInvalid(name, code.instance, report)
    return code


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise PreconditionError(msg)


def build_s3_even(m: int, p: int = 2) -> LinearCode:
    """m/2 adjacent pairs w1+w2, w3+w4, ..., w_{m-1}+w_m for s=3."""
    inst = Instance(m, 3)
    _require(m % 2 == 0, f"m must be even, got {m}")
    _require(not inst.divisible, f"({m}, 3) is in the divisible regime")
    code = _sum_rows(inst, [[1 + 2 * k, 2 + 2 * k] for k in range(m // 2)], p, "s3_even")
    return _checked(code, "s3_even")


def build_even_m(m: int, s: int, p: int = 2, *, allow_divisible: bool = False) -> LinearCode:
    """Sums of s-1 consecutive messages starting at 1, 3, 5, ...; m/2 + 2 - ceil(s/2) rows."""
    inst = Instance(m, s)
    _require(m % 2 == 0, f"m must be even, got {m}")
    _require(s >= 3, f"need s >= 3, got {s}")
    _require(allow_divisible or not inst.divisible, f"({m}, {s}) is in the divisible regime")
    n_rows = even_m_length(inst)
    sets = [[1 + 2 * k + d for d in range(s - 1)] for k in range(n_rows)]
    return _checked(_sum_rows(inst, sets, p, "even_m"), "even_m")


def m_over_2s_index_sets(m: int, s: int) -> list[list[int]]:
    sets = []
    for k in range(m // (2 * s)):
        o = 2 * s * k
        sets += [[1 + o, 2 + o], [3 + o, s - 2 + o], [s - 3 + o, s - 4 + o]]
    return sets


def build_m_over_2s(m: int, s: int, p: int = 2) -> LinearCode:
    """Three pairs per block of 2s messages, for m a multiple of 2s.

    The index pattern is used as is; whether it is secure is left to the
    verifier.
    """
    inst = Instance(m, s)
    _require(m % (2 * s) == 0, f"m/(2s) = {m}/{2 * s} is not an integer")
    _require(not inst.divisible, f"({m}, {s}) is in the divisible regime")
    _require(s >= 7, f"need s >= 7 for distinct indices, got {s}")
    code = _sum_rows(inst, m_over_2s_index_sets(m, s), p, "m_over_2s")
    return _checked(code, "m_over_2s")


def odd_s_m_minus_3_index_sets(m: int) -> list[list[int]]:
    first = [1] + [2 * i for i in range(1, (m - 7) // 2 + 1)] + [m - 6]
    second = [2 * i + 1 for i in range(1, (m - 9) // 2 + 1)] + [m - 5, m - 4]
    return [first, second, [m - 3, m - 2], [m - 1, m]]


def build_odd_s_m_minus_3(m: int, p: int = 2) -> LinearCode:
    """Four transmissions for odd m with s = m - 3 >= 8."""
    _require(m % 2 == 1, f"m must be odd, got {m}")
    _require(m - 3 >= 8, f"need s = m-3 >= 8, got s = {m - 3}")
    inst = Instance(m, m - 3)
    _require(not inst.divisible, f"({m}, {m - 3}) is in the divisible regime")
    code = _sum_rows(inst, odd_s_m_minus_3_index_sets(m), p, "odd_s_m_minus_3")
    return _checked(code, "odd_s_m_minus_3")


@dataclass(frozen=True)
class Scheme:
    code: LinearCode
    construction: str


# Searches backing the divisible regime: (t, node budget, time budget in seconds).
DIVISIBLE_SEARCH_PLAN = ((1, 2_000_000, 60.0), (2, 2_000_000, 60.0))
# Scalar search used when an explicit construction fails verification.
FALLBACK_SEARCH = (2_000_000, 60.0)


def _divisible_by_search(inst: Instance, p: int) -> Scheme:
    from .search import min_length_search

    target = classify(inst).upper_bound
    best = None
    for t, nodes, seconds in DIVISIBLE_SEARCH_PLAN:
        if inst.m * t > 64:
            break
        out = min_length_search(inst, p=p, t=t, node_budget=nodes, time_budget=seconds)
        code = out.code if out.code is not None else out.best_found
        if code is not None and (best is None or code.length < best.length):
            best = code
        if best is not None and best.length <= target:
            break
    if best is None:
        raise NoKnownScheme(f"search found no code for divisible instance ({inst.m}, {inst.s})")
    return Scheme(best, f"search(t={best.t})")


def _search_fallback(inst: Instance, p: int, failed: ConstructionInvalid) -> Scheme:
    from .search import min_length_search

    nodes, seconds = FALLBACK_SEARCH
    out = min_length_search(inst, p=p, t=1, node_budget=nodes, time_budget=seconds)
    code = out.code if out.code is not None else out.best_found
    if code is None:
        raise failed
    return Scheme(code, f"search(t=1) after {failed.construction} failed")


def build_best(m: int, s: int, p: int = 2) -> Scheme:
    inst = Instance(m, s)
    cls = classify(inst)
    if cls.regime is Regime.INFEASIBLE_LINEAR:
        raise RegimeError(f"({m}, {s}) is infeasible under linear coding ({cls.label()})")
    if cls.regime is Regime.DIVISIBLE:
        return _divisible_by_search(inst, p)
    if s == 3 and m % 2 == 0:
        return Scheme(build_s3_even(m, p), "s3_even")
    if m % (2 * s) == 0 and s >= 7:
        try:
            return Scheme(build_m_over_2s(m, s, p), "m_over_2s")
        except ConstructionInvalid:
            pass
    if m % 2 == 0:
        try:
            return Scheme(build_even_m(m, s, p), "even_m")
        except ConstructionInvalid as exc:
            return _search_fallback(inst, p, exc)
    if s == m - 3 and s >= 8:
        return Scheme(build_odd_s_m_minus_3(m, p), "odd_s_m_minus_3")
    raise NoKnownScheme(f"no construction is known for odd m with (m, s) = ({m}, {s})")


BUILDERS = {
    "s3_even": lambda m, s, p: build_s3_even(m, p) if s == 3 else _bad_s("s3_even", 3, s),
    "even_m": build_even_m,
    "m_over_2s": build_m_over_2s,
    "odd_s_m_minus_3": lambda m, s, p: build_odd_s_m_minus_3(m, p) if s == m - 3 else _bad_s("odd_s_m_minus_3", m - 3, s),
}


def _bad_s(name: str, want: int, got: int):
    raise PreconditionError(f"{name} requires s={want}, got s={got}")

