import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tropctl.semiring import (
    NEG_INF,
    POS_INF,
    check_scalar,
    format_scalar,
    is_scalar,
    neg,
    parse_scalar,
    trop_add,
    trop_mul,
)

finite = st.integers(min_value=-(10**30), max_value=10**30)
extended = st.one_of(finite, st.just(NEG_INF), st.just(POS_INF))


@pytest.mark.parametrize(
    "a, b, mode, expected",
    [
        (3, 5, "max", 5),
        (3, 5, "min", 3),
        (NEG_INF, 7, "max", 7),
        (POS_INF, 7, "min", 7),
        (NEG_INF, POS_INF, "max", POS_INF),
        (NEG_INF, POS_INF, "min", NEG_INF),
    ],
)
def test_add(a, b, mode, expected):
    assert trop_add(a, b, mode) == expected


@pytest.mark.parametrize(
    "a, b, mode, expected",
    [
        (3, 5, "max_completed", 8),
        (NEG_INF, POS_INF, "max_completed", NEG_INF),
        (POS_INF, NEG_INF, "max_completed", NEG_INF),
        (NEG_INF, POS_INF, "min_completed", POS_INF),
        (NEG_INF, 4, "max_completed", NEG_INF),
        (POS_INF, 4, "min_completed", POS_INF),
        (POS_INF, 4, "max_completed", POS_INF),
    ],
)
def test_mul_absorption(a, b, mode, expected):
    assert trop_mul(a, b, mode) == expected


def test_unknown_modes():
    with pytest.raises(ValueError):
        trop_add(1, 2, "plus")
    with pytest.raises(ValueError):
        trop_mul(1, 2, "max")


def test_big_integers_stay_exact():
    big = 2**80 + 1
    assert trop_mul(big, big) == 2**81 + 2
    assert isinstance(trop_mul(big, 1), int)


@given(extended, extended, extended)
def test_add_is_associative_and_commutative(a, b, c):
    for mode in ("max", "min"):
        assert trop_add(a, b, mode) == trop_add(b, a, mode)
        assert trop_add(trop_add(a, b, mode), c, mode) == trop_add(a, trop_add(b, c, mode), mode)


@given(extended, extended, extended)
def test_mul_distributes(a, b, c):
    for add, mul in (("max", "max_completed"), ("min", "min_completed")):
        left = trop_mul(a, trop_add(b, c, add), mul)
        right = trop_add(trop_mul(a, b, mul), trop_mul(a, c, mul), add)
        assert left == right


@given(finite, finite)
def test_negation_swaps_laws(a, b):
    assert neg(trop_add(a, b, "max")) == trop_add(neg(a), neg(b), "min")
    assert neg(trop_mul(a, b)) == trop_mul(neg(a), neg(b), "min_completed")


def test_negation_swaps_infinities():
    assert neg(NEG_INF) == POS_INF
    assert neg(POS_INF) == NEG_INF


@pytest.mark.parametrize(
    "token, value",
    [("-inf", NEG_INF), ("+inf", POS_INF), ("inf", POS_INF), ("12", 12), (-3, -3), (4.0, 4)],
)
def test_parse(token, value):
    assert parse_scalar(token) == value


@pytest.mark.parametrize("bad", ["1.5", "nan", 2.5, math.nan, True, None, [1]])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        parse_scalar(bad)


@given(extended)
def test_format_round_trip(v):
    assert parse_scalar(format_scalar(v)) == v


def test_scalar_predicates():
    assert is_scalar(3) and is_scalar(NEG_INF)
    assert not is_scalar(1.5) and not is_scalar(True)
    assert check_scalar(7.0) == 7 and isinstance(check_scalar(7.0), int)
