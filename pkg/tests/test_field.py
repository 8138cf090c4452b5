import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entropy_oracle import mutual_information
from picod.field import (
    DimensionError,
    FieldScalar,
    check_prime,
    in_rowspan,
    info_symbols,
    rank,
    row_reduce,
)


def test_rank_examples():
    assert rank(np.eye(3, dtype=int)) == 3
    assert rank([(1, 1, 0), (0, 1, 1), (1, 0, 1)]) == 2
    assert rank([]) == 0
    assert rank(np.zeros((0, 5), dtype=int)) == 0


def test_rank_depends_on_field():
    # determinant 3: singular mod 3, invertible mod 2
    rows = [(1, 1), (1, 4)]
    assert rank(rows, 2) == 2
    assert rank(rows, 3) == 1


def test_in_rowspan_examples():
    rows = [(1, 1, 0), (0, 1, 1)]
    assert in_rowspan((1, 0, 1), rows)
    assert not in_rowspan((1, 0, 0), rows)
    assert in_rowspan((0, 0, 0), rows)
    assert in_rowspan((0, 0, 0), [])


def test_in_rowspan_width_mismatch():
    with pytest.raises(DimensionError):
        in_rowspan((1, 0), [(1, 1, 0)])


def test_info_symbols_examples():
    assert info_symbols([(1, 1)], block=1) == 0
    assert info_symbols([(1, 0)], block=1) == 1
    assert info_symbols([(1, 0, 0, 0)], block=1, t=2) == 1
    assert info_symbols([(1, 0, 0, 0), (0, 1, 0, 0)], block=1, t=2) == 2
    with pytest.raises(IndexError):
        info_symbols([(1, 0)], block=3)


@pytest.mark.parametrize("p", [1, 4, 6, 9])
def test_non_prime_modulus_rejected(p):
    with pytest.raises(ValueError):
        check_prime(p)
    with pytest.raises(ValueError):
        rank([(1, 0)], p)


def test_field_scalar():
    a, b = FieldScalar(3, 5), FieldScalar(4, 5)
    assert int(a + b) == 2
    assert int(a * b) == 2
    assert int(a - b) == 4
    assert int(a * a.inverse()) == 1
    assert int(-a) == 2
    with pytest.raises(ZeroDivisionError):
        FieldScalar(0, 5).inverse()
    with pytest.raises(ValueError):
        FieldScalar(1, 2) + FieldScalar(1, 3)


def test_row_reduce_is_reduced():
    R, piv = row_reduce([(0, 1, 1), (1, 1, 0), (1, 0, 1)], 2)
    assert piv == [0, 1]
    assert R.tolist() == [[1, 0, 1], [0, 1, 1]]


def _brute_rank(rows, p):
    rows = [tuple(r) for r in rows]
    if not rows:
        return 0
    span = {tuple(np.dot(c, rows) % p) for c in itertools.product(range(p), repeat=len(rows))}
    return round(np.log(len(span)) / np.log(p))


@settings(max_examples=150, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(1, 4), st.integers(1, 5), st.data())
def test_rank_matches_span_size(p, r, c, data):
    rows = data.draw(st.lists(st.lists(st.integers(0, p - 1), min_size=c, max_size=c), min_size=r, max_size=r))
    assert rank(rows, p) == _brute_rank(rows, p)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4), st.integers(1, 5), st.data())
def test_in_rowspan_matches_enumeration(r, c, data):
    rows = data.draw(st.lists(st.lists(st.integers(0, 1), min_size=c, max_size=c), min_size=r, max_size=r))
    v = data.draw(st.lists(st.integers(0, 1), min_size=c, max_size=c))
    span = {tuple(np.dot(k, rows) % 2) for k in itertools.product(range(2), repeat=r)}
    assert in_rowspan(v, rows) == (tuple(v) in span)


def test_info_symbols_matches_entropy_oracle():
    rng = np.random.default_rng(7)
    for _ in range(60):
        t = int(rng.integers(1, 3))
        m = int(rng.integers(2, 8 // t + 1))
        n = m * t
        G = rng.integers(0, 2, size=(int(rng.integers(1, 5)), n))
        mi = mutual_information(G, [], t)
        for i in range(1, m + 1):
            assert info_symbols(G, i, t) == pytest.approx(mi[i], abs=1e-9)


def test_random_4x6_against_oracle():
    rng = np.random.default_rng(2024)
    G = rng.integers(0, 2, size=(4, 6))
    mi = mutual_information(G, [], 1)
    assert [info_symbols(G, i) for i in range(1, 7)] == pytest.approx([mi[i] for i in range(1, 7)])


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 2), st.integers(2, 4), st.data())
def test_info_symbols_monotone_under_row_addition(t, m, data):
    n = m * t
    rows = data.draw(st.lists(st.lists(st.integers(0, 1), min_size=n, max_size=n), min_size=1, max_size=4))
    extra = data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    for i in range(1, m + 1):
        before = info_symbols(rows, i, t)
        after = info_symbols(rows + [extra], i, t)
        assert before <= after <= t
