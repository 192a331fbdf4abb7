"""Exact scalar arithmetic: examples and algebraic invariants."""

import random
from fractions import Fraction as F

import pytest

from bandode.exact import (
    GaussRat,
    abs_sq,
    agreeing_digits,
    canonical_unit_factor,
    decimal_digit_count,
    decimal_exponent,
    format_decimal,
    format_gauss_decimal,
    format_rat,
    format_scientific,
    gauss_inv,
    gauss_mul,
    gaussian_gcd,
    parse_gauss,
    parse_rat,
    primitivize,
    round_gauss,
    round_half_away,
)

I = GaussRat(0, 1)


def rand_gauss(rng, span=30):
    return GaussRat(
        F(rng.randint(-span, span), rng.randint(1, span)),
        F(rng.randint(-span, span), rng.randint(1, span)),
    )


def test_gauss_mul_examples():
    assert gauss_mul(I, I) == GaussRat(-1)
    assert gauss_mul(GaussRat(F(1, 2)), GaussRat(2)) == GaussRat(1)
    assert gauss_mul(GaussRat(1, 1), GaussRat(1, -1)) == GaussRat(2)


def test_gauss_inv_examples():
    assert gauss_inv(I) == GaussRat(0, -1)
    assert gauss_inv(GaussRat(2)) == GaussRat(F(1, 2))
    assert gauss_inv(GaussRat(1, 1)) == GaussRat(F(1, 2), F(-1, 2))
    with pytest.raises(ZeroDivisionError):
        gauss_inv(GaussRat(0))


def test_abs_sq_examples():
    assert abs_sq(GaussRat(0)) == 0
    assert abs_sq(GaussRat(F(3, 5), F(4, 5))) == 1
    assert abs_sq(GaussRat(1, 2)) == 5


def test_field_axioms_random():
    rng = random.Random(1)
    for _ in range(200):
        a, b, c = (rand_gauss(rng) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert a * (b + c) == a * b + a * c
        assert abs_sq(a * b) == abs_sq(a) * abs_sq(b)
        if not a.is_zero():
            assert gauss_inv(gauss_inv(a)) == a
            assert a * gauss_inv(a) == GaussRat(1)


def test_normalization_idempotent():
    # Fraction keeps values reduced with positive denominator on every op
    q = F(6, -4)
    assert q == F(-3, 2) and q.denominator == 2
    z = GaussRat(F(6, -4), F(10, 5))
    assert z.re == F(-3, 2) and z.im == 2


def test_pow_negative():
    z = GaussRat(1, 1)
    assert z**0 == GaussRat(1)
    assert z**3 == z * z * z
    assert z**-2 == gauss_inv(z * z)


def test_parse_format_roundtrip():
    assert parse_rat("3/4") == F(3, 4)
    assert parse_rat("-5") == -5
    assert parse_rat("0.25") == F(1, 4)
    assert format_rat(F(3, 4)) == "3/4"
    assert format_rat(F(-5)) == "-5"
    z = parse_gauss("1/2,-3")
    assert z == GaussRat(F(1, 2), -3)
    assert parse_gauss(str(z)) == z
    assert parse_gauss("7") == GaussRat(7)
    with pytest.raises(ValueError):
        parse_gauss("1,2,3")


def test_decimal_fixed_rendering():
    assert format_decimal(F(1, 4), 3) == "0.250"
    assert format_decimal(F(-1), 2) == "-1.00"
    assert format_decimal(F(0), 4) == "0.0000"
    # round-half-even on ties
    assert format_decimal(F(25, 1000), 2) == "0.02"
    assert format_decimal(F(35, 1000), 2) == "0.04"
    assert format_decimal(F(-25, 1000), 2) == "-0.02"
    # no negative zero
    assert format_decimal(F(-1, 10**9), 2) == "0.00"


def test_gauss_decimal_rendering():
    assert format_gauss_decimal(GaussRat(0, -1), 5) == "0.00000-1.00000i"
    assert format_gauss_decimal(GaussRat(F(1, 2), F(1, 3)), 3) == "0.500+0.333i"


def test_rendering_reparse_error_bound():
    rng = random.Random(2)
    for _ in range(50):
        q = F(rng.randint(-10**6, 10**6), rng.randint(1, 10**6))
        for digits in (5, 12):
            back = parse_rat(format_decimal(q, digits))
            assert abs(back - q) <= F(1, 10**digits)


def test_scientific_rendering():
    assert format_scientific(F(0), 3) == "0.00e+0"
    assert format_scientific(F(1, 3), 4) == "3.333e-1"
    assert format_scientific(F(-12345), 2) == "-1.2e+4"
    assert format_scientific(F(999951, 100), 4) == "1.000e+4"  # carry


def test_decimal_exponent():
    assert decimal_exponent(F(1)) == 0
    assert decimal_exponent(F(999, 1000)) == -1
    assert decimal_exponent(F(10)) == 1
    assert decimal_exponent(F(-1, 100)) == -2


def test_round_half_away():
    assert round_half_away(F(1, 2)) == 1
    assert round_half_away(F(-1, 2)) == -1
    assert round_half_away(F(3, 4)) == 1
    assert round_half_away(F(-5, 4)) == -1
    assert round_gauss(GaussRat(F(1, 2), F(-1, 2))) == GaussRat(1, -1)


def test_gaussian_gcd_and_primitivize():
    a = GaussRat(6)
    b = GaussRat(0, 4)
    g = gaussian_gcd(a, b)
    assert abs_sq(g) == 4  # gcd is 2 up to a unit
    vec = primitivize([GaussRat(F(2, 3)), GaussRat(0, F(4, 3))])
    assert vec == [GaussRat(1), GaussRat(0, 2)]
    # canonical leading entry: positive real part
    vec = primitivize([GaussRat(-3), GaussRat(0, 6)])
    assert vec[0] == GaussRat(1)
    assert canonical_unit_factor(GaussRat(0, -2)) * GaussRat(0, -2) == GaussRat(2)


def test_primitivize_preserves_ratios():
    rng = random.Random(3)
    for _ in range(20):
        vec = [rand_gauss(rng) for _ in range(5)]
        if all(v.is_zero() for v in vec):
            continue
        out = primitivize(vec)
        pairs = [(a, b) for a, b in zip(vec, out) if not a.is_zero()]
        ratios = {str(b * gauss_inv(a)) for a, b in pairs}
        assert len(ratios) == 1
        assert all(z.is_gaussian_integer() for z in out)


def test_agreeing_digits():
    true = F("0.3772818303248061138245150770767548664028706")
    paper_row_50 = F(147826, 391819)
    assert agreeing_digits(paper_row_50, true) == 5
    assert agreeing_digits(true, true, cap=60) == 60
    assert agreeing_digits(F(1), F(2)) == 0
    assert decimal_digit_count(0) == 1
    assert decimal_digit_count(-12345) == 5
