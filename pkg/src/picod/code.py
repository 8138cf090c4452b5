"""Decentralized linear codes: rows attributed to senders, ranges, JSON documents.

Columns are message-major: the t symbols of message 1, then message 2, ...
All message and user indices are 1-based and circular.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .field import check_prime
from .instance import Instance


class CodeError(ValueError):
    pass


class DegenerateRowError(CodeError):
    pass


class WindowViolation(CodeError):
    def __init__(self, index: int, message: str):
        super().__init__(f"row {index}: {message}")
        self.index = index


class CodeFormatError(CodeError):
    pass


def support(coeffs: Sequence[int], m: int, t: int = 1) -> tuple[int, ...]:
    """Messages with a nonzero coefficient in any of their t columns."""
    return tuple(i + 1 for i in range(m) if any(coeffs[i * t:(i + 1) * t]))


def circular_range(supp: Iterable[int], m: int) -> tuple[int, int]:
    """(b, a): the shortest circular interval [a, a+b-1] covering ``supp``.

    Ties go to the smallest start a.
    """
    supp = sorted(set(supp))
    if not supp:
        raise DegenerateRowError("empty support has no range")
    best = None
    for a in supp:
        b = max((x - a) % m for x in supp) + 1
        if best is None or b < best[0]:
            best = (b, a)
    return best


@dataclass(frozen=True)
class CodeRow:
    coeffs: tuple[int, ...]
    sender: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))


def row_range(row: CodeRow | Sequence[int], m: int, t: int = 1) -> int:
    coeffs = row.coeffs if isinstance(row, CodeRow) else tuple(row)
    supp = support(coeffs, m, t)
    if not supp:
        raise DegenerateRowError("zero row has no range")
    return circular_range(supp, m)[0]


@dataclass(frozen=True)
class LinearCode:
    """A validated code; construction checks every row against its sender's window.

    Rows without a sender are attributed to the start of their shortest
    covering interval.
    """

    instance: Instance
    rows: tuple[CodeRow, ...] = ()
    p: int = 2
    t: int = 1
    starts: tuple[int, ...] = field(default=(), init=False, repr=False, compare=False)

    def __post_init__(self):
        check_prime(self.p)
        if not isinstance(self.t, int) or self.t < 1:
            raise CodeError(f"subpacketization must be a positive integer, got {self.t!r}")
        m, s = self.instance.m, self.instance.s
        width = m * self.t
        rows, starts = [], []
        for k, row in enumerate(self.rows, start=1):
            if not isinstance(row, CodeRow):
                row = CodeRow(row)
            if len(row.coeffs) != width:
                raise CodeError(f"row {k}: expected {width} coefficients, got {len(row.coeffs)}")
            if any(not 0 <= c < self.p for c in row.coeffs):
                raise CodeError(f"row {k}: coefficients must lie in [0, {self.p - 1}]")
            supp = support(row.coeffs, m, self.t)
            if not supp:
                raise DegenerateRowError(f"row {k} is zero")
            b, a = circular_range(supp, m)
            if b > s:
                raise WindowViolation(k, f"support {list(supp)} has range {b} > s={s}")
            sender = row.sender
            if sender is None:
                sender = a
            elif not 1 <= sender <= m:
                raise WindowViolation(k, f"sender {sender} outside 1..{m}")
            elif not set(supp) <= self.instance.side_info(sender):
                raise WindowViolation(k, f"support {list(supp)} not inside the window of user {sender}")
            rows.append(CodeRow(row.coeffs, sender))
            starts.append(a)
        object.__setattr__(self, "rows", tuple(rows))
        object.__setattr__(self, "starts", tuple(starts))

    @classmethod
    def from_supports(cls, instance: Instance, supports: Iterable[Iterable[int]], p: int = 2) -> LinearCode:
        """Scalar code whose rows are unit-coefficient sums of the given messages."""
        rows = []
        for supp in supports:
            coeffs = [0] * instance.m
            for i in supp:
                k = instance.wrap(i) - 1
                coeffs[k] = (coeffs[k] + 1) % p
            rows.append(CodeRow(coeffs))
        return cls(instance, tuple(rows), p=p, t=1)

    @property
    def m(self) -> int:
        return self.instance.m

    @property
    def s(self) -> int:
        return self.instance.s

    @property
    def width(self) -> int:
        return self.m * self.t

    @property
    def length(self) -> Fraction:
        return Fraction(len(self.rows), self.t)

    def matrix(self) -> np.ndarray:
        return np.array([r.coeffs for r in self.rows], dtype=np.int64).reshape(len(self.rows), self.width)

    def supports(self) -> list[tuple[int, ...]]:
        return [support(r.coeffs, self.m, self.t) for r in self.rows]

    def ranges(self) -> list[int]:
        return [circular_range(supp, self.m)[0] for supp in self.supports()]

    def rotate(self, r: int) -> LinearCode:
        """Relabel message and user i as i + r (mod m)."""
        m, t = self.m, self.t
        rows = []
        for row in self.rows:
            coeffs = [0] * self.width
            for i in range(m):
                j = (i + r) % m
                coeffs[j * t:(j + 1) * t] = row.coeffs[i * t:(i + 1) * t]
            rows.append(CodeRow(coeffs, self.instance.wrap(row.sender + r)))
        return replace(self, rows=tuple(rows))

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "s": self.s,
            "p": self.p,
            "t": self.t,
            "rows": [{"sender": r.sender, "coeffs": list(r.coeffs)} for r in self.rows],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> LinearCode:
        if not isinstance(doc, dict):
            raise CodeFormatError("code document must be an object")
        try:
            m, s, p, t, rows = doc["m"], doc["s"], doc.get("p", 2), doc.get("t", 1), doc["rows"]
        except KeyError as exc:
            raise CodeFormatError(f"missing field {exc.args[0]!r}") from None
        for name, val in (("m", m), ("s", s), ("p", p), ("t", t)):
            if not isinstance(val, int) or isinstance(val, bool):
                raise CodeFormatError(f"field {name!r} must be an integer")
        try:
            check_prime(p)
        except ValueError as exc:
            raise CodeFormatError(str(exc)) from None
        if not isinstance(rows, list):
            raise CodeFormatError("'rows' must be a list")
        parsed = []
        for k, row in enumerate(rows, start=1):
            if not isinstance(row, dict) or "coeffs" not in row:
                raise CodeFormatError(f"row {k} must be an object with 'coeffs'")
            coeffs, sender = row["coeffs"], row.get("sender")
            if not isinstance(coeffs, list) or not all(isinstance(c, int) and not isinstance(c, bool) for c in coeffs):
                raise CodeFormatError(f"row {k}: 'coeffs' must be a list of integers")
            if len(coeffs) != m * t:
                raise CodeFormatError(f"row {k}: expected {m * t} coefficients, got {len(coeffs)}")
            if sender is not None and (not isinstance(sender, int) or isinstance(sender, bool)):
                raise CodeFormatError(f"row {k}: 'sender' must be an integer")
            parsed.append(CodeRow(coeffs, sender))
        try:
            return cls(Instance(m, s), tuple(parsed), p=p, t=t)
        except CodeError:
            raise
        except ValueError as exc:
            raise CodeFormatError(str(exc)) from None


def validate(code: LinearCode) -> LinearCode:
    """Re-run all row checks; returns the code with senders filled in."""
    return LinearCode(code.instance, code.rows, p=code.p, t=code.t)


def serialize(code: LinearCode) -> str:
    return json.dumps(code.to_dict(), indent=2) + "\n"


def deserialize(text: str) -> LinearCode:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CodeFormatError(f"not valid JSON: {exc}") from None
    return LinearCode.from_dict(doc)
