from __future__ import annotations

import pytest
from hypothesis import given

from ordeq.ordinal import (
    OMEGA,
    ONE,
    ZERO,
    Ordinal,
    OrdinalParseError,
    length,
    nat,
    omega_power,
    ord_add,
    ord_omega_mul,
    ord_parse,
    ord_print,
    split_at,
)
from strategies import ordinals


def test_parse_print_examples():
    assert ord_print(ord_parse("w^2*3 + w + 5")) == "w^2*3 + w + 5"
    assert ord_parse("w^w + 1") == ord_add(omega_power(OMEGA), ONE)
    assert ord_parse("0") == ZERO
    assert ord_parse("7") == nat(7)


@pytest.mark.parametrize("text", ["w +", "w^", "x", "w**2", "1 2"])
def test_parse_rejects(text):
    with pytest.raises(OrdinalParseError):
        ord_parse(text)


def test_addition_absorbs_smaller_terms():
    assert ord_add(ONE, OMEGA) == OMEGA
    assert ord_add(ord_parse("w+1"), ord_parse("w^2")) == ord_parse("w^2")
    assert ord_add(ord_parse("w^2 + w"), ord_parse("w*2 + 3")) == ord_parse("w^2 + w*3 + 3")
    assert ord_add(OMEGA, ONE) != ord_add(ONE, OMEGA)


def test_left_omega_multiplication():
    assert ord_omega_mul(nat(5)) == ord_parse("w*5")
    assert ord_omega_mul(ord_parse("w+3")) == ord_parse("w^2 + w*3")
    assert ord_omega_mul(ord_parse("w^w+3")) == ord_parse("w^w + w*3")
    assert ord_omega_mul(ZERO) == ZERO


def test_split_and_length():
    a = ord_parse("w^2 + w*3 + 4")
    assert split_at(a, 1) == (ord_parse("w^2 + w*3"), nat(4))
    assert length(a) == 8  # sum of coefficients


@given(ordinals, ordinals, ordinals)
def test_addition_is_associative(a, b, c):
    assert ord_add(ord_add(a, b), c) == ord_add(a, ord_add(b, c))


@given(ordinals, ordinals)
def test_omega_multiplication_distributes(a, b):
    assert ord_omega_mul(ord_add(a, b)) == ord_add(ord_omega_mul(a), ord_omega_mul(b))


@given(ordinals, ordinals)
def test_sum_dominates_right_summand(a, b):
    assert ord_add(a, b) >= b
    assert ord_add(a, b) >= a


@given(ordinals)
def test_print_parse_round_trip(a):
    assert ord_parse(ord_print(a)) == a


def test_ordinal_is_immutable():
    with pytest.raises(AttributeError):
        OMEGA.terms = ()
    assert isinstance(hash(OMEGA), int)
    assert Ordinal([(1, 1)]) == OMEGA
