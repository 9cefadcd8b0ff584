from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from revsynth.perms import (
    CycleParseError,
    Permutation,
    Specification,
    compose,
    format_cycles,
    identity,
    inverse,
    parse_cycles,
    perm_to_spec,
    spec_to_perm,
)

perms_of_8 = st.permutations(range(1, 9)).map(lambda xs: Permutation(tuple(xs)))


def test_identity_images():
    assert identity(8).images == (1, 2, 3, 4, 5, 6, 7, 8)
    assert identity(1).images == (1,)


def test_identity_rejects_nonpositive():
    with pytest.raises(ValueError):
        identity(0)


def test_permutation_validates_images():
    with pytest.raises(ValueError):
        Permutation((1, 1, 3))
    with pytest.raises(ValueError):
        Permutation((0, 1, 2))


def test_specification_validates_outputs():
    with pytest.raises(ValueError):
        Specification((1, 2, 3))


def test_parse_cycles_two_cycles():
    p = parse_cycles("(1, 3, 5, 6)(7, 8)", 8)
    assert p.images == (3, 2, 5, 4, 6, 1, 8, 7)


def test_parse_cycles_single_transposition():
    p = parse_cycles("(7,8)", 8)
    assert perm_to_spec(p).outputs == (0, 1, 2, 3, 4, 5, 7, 6)


def test_parse_cycles_inverter_pattern():
    p = parse_cycles("(1,5)(2,6)(3,7)(4,8)", 8)
    assert perm_to_spec(p).outputs == (4, 5, 6, 7, 0, 1, 2, 3)


def test_parse_cycles_identity():
    assert parse_cycles("()", 8) == identity(8)
    assert parse_cycles(" ( ) ", 5) == identity(5)


def test_parse_cycles_whitespace_tolerated():
    assert parse_cycles(" (1 , 2) ( 3,4 ) ", 4).images == (2, 1, 4, 3)


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("", "empty input"),
        ("(1,2", "expected ')'"),
        ("(1)", "at least two points"),
        ("(1,2)(2,3)", "repeated"),
        ("(1,1)", "repeated"),
        ("(0,1)", "out of range"),
        ("(1,9)", "out of range"),
        ("(1,2)x", "expected '('"),
        ("()(1,2)", "trailing text"),
        ("(1,,2)", "expected a point"),
        ("1,2", "expected '('"),
    ],
)
def test_parse_cycles_errors(text, fragment):
    with pytest.raises(CycleParseError) as err:
        parse_cycles(text, 8)
    assert fragment in str(err.value)
    assert isinstance(err.value.position, int)


def test_parse_error_position_points_at_fault():
    with pytest.raises(CycleParseError) as err:
        parse_cycles("(1,9)", 8)
    assert err.value.position == 3


def test_format_cycles_canonical():
    assert format_cycles(parse_cycles("(8,7)(3,5,6,1)", 8)) == "(1,3,5,6)(7,8)"
    assert format_cycles(identity(8)) == "()"


def test_compose_applies_left_operand_first():
    p = parse_cycles("(1,2)", 3)
    q = parse_cycles("(2,3)", 3)
    assert format_cycles(compose(p, q)) == "(1,3,2)"


def test_compose_rejects_size_mismatch():
    with pytest.raises(ValueError):
        compose(identity(3), identity(4))


def test_inverse_reverses_cycle():
    assert format_cycles(inverse(parse_cycles("(1,3,5,6)", 8))) == "(1,6,5,3)"


def test_spec_to_perm_is_one_based_shift():
    s = Specification((2, 6, 5, 4, 7, 1, 0, 3))
    assert spec_to_perm(s).images == (3, 7, 6, 5, 8, 2, 1, 4)
    assert perm_to_spec(spec_to_perm(s)) == s


def test_call_returns_image():
    p = parse_cycles("(1,3,5,6)(7,8)", 8)
    assert p(1) == 3 and p(6) == 1 and p(2) == 2
    with pytest.raises(ValueError):
        p(9)


@given(perms_of_8)
def test_format_parse_round_trip(p):
    assert parse_cycles(format_cycles(p), 8) == p


@given(perms_of_8)
def test_inverse_cancels(p):
    assert compose(p, inverse(p)) == identity(8)
    assert compose(inverse(p), p) == identity(8)


@given(perms_of_8, perms_of_8, perms_of_8)
def test_compose_is_associative(p, q, r):
    assert compose(compose(p, q), r) == compose(p, compose(q, r))


@given(perms_of_8, perms_of_8)
def test_compose_matches_pointwise_application(p, q):
    c = compose(p, q)
    assert all(c(x) == q(p(x)) for x in range(1, 9))


@given(perms_of_8)
def test_spec_round_trip(p):
    assert spec_to_perm(perm_to_spec(p)) == p
