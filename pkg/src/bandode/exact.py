"""Exact scalar arithmetic: rationals and Gaussian rationals.

Every quantity the solver manipulates is a rational number or a complex
number with rational real and imaginary parts, so all arithmetic reduces to
the four integer operations.  ``BigRat`` is the stdlib ``fractions.Fraction``
(already kept in lowest terms with a positive denominator); ``GaussRat``
wraps a pair of them.  Decimal output is produced by integer long division
with round-half-even, never through floating point.

Textual forms: a rational is ``"a/b"`` or ``"a"``; a Gaussian rational is
``"re,im"`` with each part in rational form.
"""

from __future__ import annotations

from fractions import Fraction

BigRat = Fraction

_ZERO = Fraction(0)
_ONE = Fraction(1)


def parse_rat(text: str) -> Fraction:
    """Parse "a/b" or "a" (integer or decimal string) to an exact rational."""
    return Fraction(text.strip())


def format_rat(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class GaussRat:
    """An element of Q(i), immutable, always exactly normalized."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", re if type(re) is Fraction else Fraction(re))
        object.__setattr__(self, "im", im if type(im) is Fraction else Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussRat is immutable")

    @staticmethod
    def _raw(re: Fraction, im: Fraction) -> "GaussRat":
        z = object.__new__(GaussRat)
        object.__setattr__(z, "re", re)
        object.__setattr__(z, "im", im)
        return z

    @staticmethod
    def coerce(value) -> "GaussRat":
        if isinstance(value, GaussRat):
            return value
        if isinstance(value, (int, Fraction)):
            return GaussRat._raw(Fraction(value), _ZERO)
        raise TypeError(f"cannot interpret {value!r} as a Gaussian rational")

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def __add__(self, other):
        other = GaussRat.coerce(other)
        return GaussRat._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = GaussRat.coerce(other)
        return GaussRat._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussRat.coerce(other) - self

    def __neg__(self):
        return GaussRat._raw(-self.re, -self.im)

    def __mul__(self, other):
        other = GaussRat.coerce(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        return GaussRat._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def conjugate(self) -> "GaussRat":
        return GaussRat._raw(self.re, -self.im)

    def abs_sq(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "GaussRat":
        n = self.abs_sq()
        if not n:
            raise ZeroDivisionError("inverse of zero Gaussian rational")
        return GaussRat._raw(self.re / n, -self.im / n)

    def __truediv__(self, other):
        return self * GaussRat.coerce(other).inverse()

    def __rtruediv__(self, other):
        return GaussRat.coerce(other) * self.inverse()

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = GaussRat._raw(_ONE, _ZERO)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        try:
            other = GaussRat.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussRat({self.re!r}, {self.im!r})"

    def __str__(self):
        return f"{format_rat(self.re)},{format_rat(self.im)}"

    def is_gaussian_integer(self) -> bool:
        return self.re.denominator == 1 and self.im.denominator == 1


GR_ZERO = GaussRat(0)
GR_ONE = GaussRat(1)
GR_I = GaussRat(0, 1)


def gauss_mul(a: GaussRat, b: GaussRat) -> GaussRat:
    """Exact complex product in Q(i)."""
    return GaussRat.coerce(a) * b


def gauss_inv(a: GaussRat) -> GaussRat:
    """Exact multiplicative inverse; raises ZeroDivisionError on zero."""
    return GaussRat.coerce(a).inverse()


def abs_sq(a: GaussRat) -> Fraction:
    """Squared modulus re² + im², a nonnegative rational; zero iff a = 0."""
    return GaussRat.coerce(a).abs_sq()


def parse_gauss(text: str) -> GaussRat:
    """Parse "re,im" (each part "a/b" form) or a bare rational as real."""
    parts = text.strip().split(",")
    if len(parts) == 1:
        return GaussRat(parse_rat(parts[0]))
    if len(parts) == 2:
        return GaussRat(parse_rat(parts[0]), parse_rat(parts[1]))
    raise ValueError(f"malformed Gaussian rational: {text!r}")


def format_gauss(z: GaussRat) -> str:
    return str(z)


# ---------------------------------------------------------------------------
# Gaussian-integer utilities (content reduction, size-reduction rounding)
# ---------------------------------------------------------------------------


def round_half_away(q: Fraction) -> int:
    """Nearest integer, ties away from zero."""
    n, d = q.numerator, q.denominator
    if n >= 0:
        return (2 * n + d) // (2 * d)
    return -((-2 * n + d) // (2 * d))


def round_gauss(z: GaussRat) -> GaussRat:
    """Nearest Gaussian integer, each component rounded half away from zero."""
    return GaussRat(round_half_away(z.re), round_half_away(z.im))


def gauss_divmod(a: GaussRat, b: GaussRat):
    """Euclidean step in Z[i]: q nearest Gaussian integer to a/b, r = a - q*b."""
    q = round_gauss(a / b)
    return q, a - q * b


def gaussian_gcd(a: GaussRat, b: GaussRat) -> GaussRat:
    """gcd in Z[i] (inputs must be Gaussian integers), up to a unit."""
    while not b.is_zero():
        _, r = gauss_divmod(a, b)
        a, b = b, r
    return a


def canonical_unit_factor(z: GaussRat) -> GaussRat:
    """Unit u in {1, i, -1, -i} making u*z lie in the canonical quadrant.

    Canonical: re > 0, or re == 0 and im > 0.  Zero maps to unit 1.
    """
    if z.is_zero():
        return GR_ONE
    for u in (GR_ONE, GR_I, -GR_ONE, -GR_I):
        w = u * z
        if w.re > 0 or (not w.re and w.im > 0):
            return u
    raise AssertionError("unreachable")


def _lcm(a: int, b: int) -> int:
    from math import gcd

    return a // gcd(a, b) * b


def primitive_scale(values) -> GaussRat:
    """Scalar s making s*values a primitive Gaussian-integer vector.

    Multiplies out the common denominator, divides by the Z[i] content and
    applies the canonical unit for the first nonzero entry.  Returns 1 for
    the all-zero vector.
    """
    den = 1
    for z in values:
        den = _lcm(den, _lcm(z.re.denominator, z.im.denominator))
    content = GR_ZERO
    for z in values:
        g = GaussRat(z.re * den, z.im * den)
        content = g if content.is_zero() else gaussian_gcd(content, g)
        if content.abs_sq() == 1:
            break
    if content.is_zero():
        return GR_ONE
    scale = GaussRat(den) * content.inverse()
    for z in values:
        w = scale * z
        if not w.is_zero():
            return canonical_unit_factor(w) * scale
    return scale


def primitivize(values) -> list:
    """Rescale a vector of Gaussian rationals to primitive Z[i] form."""
    s = primitive_scale(values)
    return [s * z for z in values]


# ---------------------------------------------------------------------------
# Decimal rendering (exact, round-half-even) and digit accounting
# ---------------------------------------------------------------------------


def _round_scaled_half_even(num: int, den: int) -> int:
    """Round num/den (num >= 0, den > 0) to the nearest integer, ties to even."""
    q, r = divmod(num, den)
    twice = 2 * r
    if twice > den or (twice == den and q % 2 == 1):
        q += 1
    return q


def format_decimal(q: Fraction, places: int) -> str:
    """Fixed-point decimal with `places` digits after the point.

    Correctly rounded from the exact value, round-half-even.  No sign is
    printed on a rounded-to-zero result.
    """
    if places < 0:
        raise ValueError("places must be >= 0")
    negative = q < 0
    scaled = _round_scaled_half_even(abs(q.numerator) * 10**places, q.denominator)
    digits = str(scaled).rjust(places + 1, "0")
    whole, frac = digits[: len(digits) - places], digits[len(digits) - places :]
    body = whole if not places else f"{whole}.{frac}"
    return f"-{body}" if negative and scaled else body


def format_gauss_decimal(z: GaussRat, places: int) -> str:
    """Render re and im at fixed precision as "<re><+/-><im>i"."""
    re_part = format_decimal(z.re, places)
    im_part = format_decimal(z.im, places)
    sign = "" if im_part.startswith("-") else "+"
    return f"{re_part}{sign}{im_part}i"


def decimal_exponent(q: Fraction) -> int:
    """The integer e with 10^e <= |q| < 10^(e+1); q must be nonzero."""
    if not q:
        raise ValueError("zero has no decimal exponent")
    n, d = abs(q.numerator), q.denominator
    e = len(str(n)) - len(str(d))
    # correct the string-length estimate by at most one in each direction
    while n * 10 ** max(0, -e) < d * 10 ** max(0, e):
        e -= 1
    while n * 10 ** max(0, -(e + 1)) >= d * 10 ** max(0, e + 1):
        e += 1
    return e


def format_scientific(q: Fraction, sig_digits: int) -> str:
    """Scientific notation with sig_digits significant digits, exact rounding."""
    if sig_digits < 1:
        raise ValueError("sig_digits must be >= 1")
    if not q:
        return "0." + "0" * (sig_digits - 1) + "e+0"
    e = decimal_exponent(q)
    # mantissa digits: round |q| / 10^(e - sig_digits + 1) to an integer
    shift = e - sig_digits + 1
    num = abs(q.numerator) * 10 ** max(0, -shift)
    den = q.denominator * 10 ** max(0, shift)
    mant = _round_scaled_half_even(num, den)
    if len(str(mant)) > sig_digits:  # rounding carried over, e.g. 9.99 -> 10.0
        mant //= 10
        e += 1
    s = str(mant)
    body = s[0] + ("." + s[1:] if sig_digits > 1 else "")
    sign = "-" if q < 0 else ""
    return f"{sign}{body}e{'+' if e >= 0 else '-'}{abs(e)}"


def decimal_digit_count(n: int) -> int:
    """Number of decimal digits of |n| (0 counts as one digit)."""
    return len(str(abs(n)))


def agreeing_digits(value: Fraction, reference: Fraction, cap: int = 1000) -> int:
    """Significant decimal digits on which value agrees with reference.

    The largest d >= 0 with |value - reference| <= 10^-d * |reference|,
    computed by exact integer comparisons and capped at `cap` (equality
    returns the cap).
    """
    if not reference:
        raise ValueError("reference must be nonzero")
    diff = abs(value - reference)
    if not diff:
        return cap
    bound = abs(reference)
    lo, hi = 0, cap
    if diff > bound:
        return 0
    while lo < hi:  # find the last d with diff * 10^d <= bound
        mid = (lo + hi + 1) // 2
        if diff * 10**mid <= bound:
            lo = mid
        else:
            hi = mid - 1
    return lo
