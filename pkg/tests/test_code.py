import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from picod.code import (
    CodeError,
    CodeFormatError,
    CodeRow,
    DegenerateRowError,
    LinearCode,
    WindowViolation,
    deserialize,
    row_range,
    serialize,
    validate,
)
from picod.instance import Instance
from randcodes import random_code

I83 = Instance(8, 3)


def unit_sum(m, *idx):
    c = [0] * m
    for i in idx:
        c[i - 1] = 1
    return c


def test_row_range_examples():
    assert row_range(unit_sum(8, 1, 3), 8) == 3
    assert row_range(unit_sum(8, 8, 1), 8) == 2
    assert row_range(unit_sum(8, 2), 8) == 1
    with pytest.raises(DegenerateRowError):
        row_range([0] * 8, 8)


def test_row_range_with_subpacketization():
    # m=4, t=2: second symbol of message 1 and first symbol of message 4
    assert row_range([0, 1, 0, 0, 0, 0, 1, 0], 4, t=2) == 2


def test_validate_examples():
    code = LinearCode(I83, (CodeRow(unit_sum(8, 1, 2), 1),))
    assert validate(code).rows[0].sender == 1
    with pytest.raises(WindowViolation) as exc:
        LinearCode(I83, (CodeRow(unit_sum(8, 1, 3, 5)),))
    assert exc.value.index == 1
    code = LinearCode(I83, (CodeRow(unit_sum(8, 8, 1)),))
    assert code.rows[0].sender == 8


def test_sender_window_checked():
    with pytest.raises(WindowViolation):
        LinearCode(I83, (CodeRow(unit_sum(8, 1, 2), 3),))
    with pytest.raises(WindowViolation):
        LinearCode(I83, (CodeRow(unit_sum(8, 1, 2), 9),))


def test_malformed_rows():
    with pytest.raises(DegenerateRowError):
        LinearCode(I83, (CodeRow([0] * 8),))
    with pytest.raises(CodeError):
        LinearCode(I83, (CodeRow([1, 1]),))
    with pytest.raises(CodeError):
        LinearCode(I83, (CodeRow([2] + [0] * 7),))
    with pytest.raises(ValueError):
        LinearCode(I83, (), p=4)


PAIRS = LinearCode.from_supports(I83, [(1, 2), (3, 4), (5, 6), (7, 8)])


def test_round_trip_pair_code():
    assert deserialize(serialize(PAIRS)) == PAIRS
    doc = json.loads(serialize(PAIRS))
    assert set(doc) == {"m", "s", "p", "t", "rows"}
    assert doc["rows"][0] == {"sender": 1, "coeffs": [1, 1, 0, 0, 0, 0, 0, 0]}
    assert PAIRS.length == 4


def _doc(**kw):
    doc = json.loads(serialize(PAIRS))
    doc.update(kw)
    return json.dumps(doc)


@pytest.mark.parametrize("text", [
    _doc(p=4),
    _doc(rows=[{"sender": 1, "coeffs": [1, 1, 0]}]),
    _doc(rows="nope"),
    _doc(m="8"),
    json.dumps({"s": 3, "rows": []}),
    "[1, 2",
    "[]",
])
def test_bad_documents(text):
    with pytest.raises(CodeError):
        deserialize(text)


def test_bad_instance_in_document():
    with pytest.raises(CodeFormatError):
        deserialize(json.dumps({"m": 3, "s": 3, "rows": []}))


def test_window_violation_in_document_surfaces():
    with pytest.raises(WindowViolation):
        deserialize(_doc(rows=[{"coeffs": unit_sum(8, 1, 4)}]))


def test_length_is_rational():
    inst = Instance(3, 2)
    code = LinearCode(inst, (CodeRow([1, 0, 1, 0, 0, 0]), CodeRow([0, 0, 0, 1, 1, 0]),
                             CodeRow([0, 1, 0, 0, 0, 1])), t=2)
    assert code.length == pytest.approx(1.5)
    assert str(code.length) == "3/2"


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 7))
def test_round_trip_and_rotation(seed, r):
    code = random_code(np.random.default_rng(seed), m_max=8, t_max=2)
    assert deserialize(serialize(code)) == code
    assert validate(deserialize(serialize(code))) == validate(code)
    rot = code.rotate(r)
    assert rot.ranges() == code.ranges()
    assert rot.rotate(-r) == code
