import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sigmapf.exact import (
    Angle,
    UndecidableError,
    cot_multiples_equal,
    format_angle,
    parse_angle,
    parse_scalar,
    snap_rational,
)

fractions = st.fractions(min_value=-6, max_value=6, max_denominator=24)


@pytest.mark.parametrize("text,turns", [
    ("pi/2", Fraction(1, 2)),
    ("-3pi/4", Fraction(-3, 4)),
    ("2*pi/3", Fraction(2, 3)),
    ("pi", Fraction(1)),
    ("0", Fraction(0)),
    (0, Fraction(0)),
])
def test_parse_angle_exact(text, turns):
    a = parse_angle(text)
    assert a.exact and a.turns == turns


def test_bare_rational_is_not_a_multiple_of_pi():
    a = parse_angle("1/2")
    assert not a.exact
    assert a.radians == 0.5
    with pytest.raises(UndecidableError):
        a.turns


def test_parse_scalar():
    assert parse_scalar("-2/3") == Fraction(-2, 3)
    assert parse_scalar(3) == Fraction(3)
    assert isinstance(parse_scalar(0.25), float)
    assert parse_scalar("pi/2") == pytest.approx(math.pi / 2)


def test_format_round_trip():
    for q in [Fraction(1, 2), Fraction(-3, 4), Fraction(7, 5), Fraction(2), Fraction(0)]:
        assert parse_angle(format_angle(Angle.pi(q))).turns == q


def test_snap_rational():
    assert snap_rational(0.5 + 1e-14) == Fraction(1, 2)
    assert snap_rational(1 / 3) == Fraction(1, 3)
    assert not isinstance(snap_rational(math.sqrt(2)), Fraction)


@given(fractions)
def test_normalized_in_half_open_interval(q):
    n = Angle.pi(q).normalized()
    assert -1 < n.turns <= 1
    assert (n.turns - q) % 2 == 0


def test_normalized_inexact_upper_end():
    assert Angle.rad(-math.pi).normalized().radians == pytest.approx(math.pi)


def test_two_pi_z_membership():
    assert Angle.pi(4).in_two_pi_z()
    assert not Angle.pi(1).in_two_pi_z()
    assert not Angle.rad(1.0).in_two_pi_z()
    with pytest.raises(UndecidableError):
        Angle.rad(2 * math.pi + 1e-13).in_two_pi_z()


def test_arithmetic_keeps_exactness():
    a = Angle.pi(Fraction(1, 3)) + Angle.pi(Fraction(1, 6))
    assert a.exact and a.turns == Fraction(1, 2)
    assert (Angle.pi(Fraction(1, 3)) * Fraction(3)).turns == 1
    assert not (Angle.pi(1) + Angle.rad(0.1)).exact


def test_cot_half_zero_at_odd_multiples():
    assert Angle.pi(1).cot_half() == 0.0
    assert Angle.pi(-3).cot_half() == 0.0
    assert Angle.pi(Fraction(1, 2)).cot_half() == pytest.approx(1.0)


def test_cot_multiples_equal_nontrivial():
    # cot(pi/6) = sqrt 3 = 3 cot(pi/3)
    assert cot_multiples_equal(Fraction(1), Fraction(1, 6), Fraction(3), Fraction(1, 3))
    assert not cot_multiples_equal(Fraction(1), Fraction(1, 6), Fraction(2), Fraction(1, 3))
    # cot(pi/8) = 1 + sqrt 2 and cot(3pi/8) = sqrt 2 - 1 are not rationally related
    assert not cot_multiples_equal(Fraction(1), Fraction(1, 8), Fraction(-1), Fraction(3, 8))
    assert cot_multiples_equal(Fraction(2), Fraction(1, 5), Fraction(-2), Fraction(-1, 5))
    assert cot_multiples_equal(Fraction(5), Fraction(1, 2), Fraction(0), Fraction(1, 7))


def test_cot_multiples_equal_pole():
    with pytest.raises(ValueError):
        cot_multiples_equal(Fraction(1), Fraction(1), Fraction(1), Fraction(1, 2))


@given(fractions, st.fractions(min_value=Fraction(1, 24), max_value=Fraction(23, 24), max_denominator=24),
       fractions, st.fractions(min_value=Fraction(1, 24), max_value=Fraction(23, 24), max_denominator=24))
def test_cot_multiples_equal_matches_floats(k1, p1, k2, p2):
    exact = cot_multiples_equal(k1, p1, k2, p2)
    diff = float(k1) / math.tan(float(p1) * math.pi) - float(k2) / math.tan(float(p2) * math.pi)
    if exact:
        assert abs(diff) < 1e-9
    else:
        assert abs(diff) > 1e-12
