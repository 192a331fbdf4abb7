"""Differential operators with exact polynomial coefficients.

An operator of order M is a list of M+1 polynomials over Q(i), p[m] being
the coefficient of the m-th derivative.  This module ingests operators
(clearing rational-function denominators by an exact polynomial lcm),
regularizes the leading coefficient so every root has multiplicity >= M
(the Fuchsian normal form that makes the band representation faithful at
singular points), computes the degree excess s0 = max(deg p_m - m), and
validates the space parameters (k0, k0d) before any matrix is assembled.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction

from .exact import GR_I, GR_ONE, GaussRat


class PolyGR:
    """Dense univariate polynomial over Q(i); index = power of x."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [GaussRat.coerce(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs = tuple(cs)

    @staticmethod
    def constant(c) -> "PolyGR":
        return PolyGR([GaussRat.coerce(c)])

    @staticmethod
    def x() -> "PolyGR":
        return PolyGR([0, 1])

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def leading(self) -> GaussRat:
        if self.is_zero():
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __eq__(self, other):
        return isinstance(other, PolyGR) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        if self.is_zero():
            return "PolyGR(0)"
        return "PolyGR[" + ", ".join(str(c) for c in self.coeffs) + "]"

    def __add__(self, other: "PolyGR") -> "PolyGR":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for j, c in enumerate(b):
            out[j] = out[j] + c
        return PolyGR(out)

    def __neg__(self) -> "PolyGR":
        return PolyGR([-c for c in self.coeffs])

    def __sub__(self, other: "PolyGR") -> "PolyGR":
        return self + (-other)

    def __mul__(self, other: "PolyGR") -> "PolyGR":
        if self.is_zero() or other.is_zero():
            return PolyGR()
        out = [GaussRat(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for j, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for k, b in enumerate(other.coeffs):
                out[j + k] = out[j + k] + a * b
        return PolyGR(out)

    def scaled(self, c) -> "PolyGR":
        c = GaussRat.coerce(c)
        return PolyGR([c * a for a in self.coeffs])

    def __pow__(self, exponent: int) -> "PolyGR":
        if exponent < 0:
            raise ValueError("negative polynomial power")
        result = PolyGR.constant(1)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def divmod(self, other: "PolyGR"):
        """Exact Euclidean division over the field Q(i)."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        quo = [GaussRat(0)] * max(0, len(rem) - len(other.coeffs) + 1)
        inv_lead = other.leading().inverse()
        d = other.degree
        while len(rem) - 1 >= d and rem:
            shift = len(rem) - 1 - d
            factor = rem[-1] * inv_lead
            quo[shift] = factor
            for j, b in enumerate(other.coeffs):
                rem[shift + j] = rem[shift + j] - factor * b
            while rem and rem[-1].is_zero():
                rem.pop()
        return PolyGR(quo), PolyGR(rem)

    def __floordiv__(self, other: "PolyGR") -> "PolyGR":
        return self.divmod(other)[0]

    def __mod__(self, other: "PolyGR") -> "PolyGR":
        return self.divmod(other)[1]

    def monic(self) -> "PolyGR":
        if self.is_zero():
            return self
        return self.scaled(self.leading().inverse())

    def derivative(self) -> "PolyGR":
        return PolyGR([c * j for j, c in enumerate(self.coeffs)][1:])

    def eval(self, z) -> GaussRat:
        z = GaussRat.coerce(z)
        acc = GaussRat(0)
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def compose_affine(self, a: Fraction, b: Fraction) -> "PolyGR":
        """The polynomial p(a*x + b), exactly."""
        arg = PolyGR([GaussRat(b), GaussRat(a)])
        acc = PolyGR()
        for c in reversed(self.coeffs):
            acc = acc * arg + PolyGR.constant(c)
        return acc


def poly_gcd(a: PolyGR, b: PolyGR) -> PolyGR:
    """Monic gcd over Q(i) by the Euclidean algorithm."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic() if not a.is_zero() else a


def poly_lcm(a: PolyGR, b: PolyGR) -> PolyGR:
    if a.is_zero() or b.is_zero():
        return PolyGR()
    return a * (b // poly_gcd(a, b))


def squarefree_decomposition(p: PolyGR) -> tuple[GaussRat, list[PolyGR]]:
    """Yun's algorithm: p = c * prod factors[i]^(i+1) with squarefree factors.

    Returned factors are monic; factors[i] may be 1 (degree 0).  Requires a
    nonzero input; characteristic zero throughout.
    """
    if p.is_zero():
        raise ValueError("squarefree decomposition of zero")
    lead = p.leading()
    p = p.monic()
    dp = p.derivative()
    a = poly_gcd(p, dp)
    if a.degree <= 0:
        return lead, [p]
    b = p // a
    c = dp // a
    d = c - b.derivative()
    factors: list[PolyGR] = []
    while b.degree > 0:
        g = poly_gcd(b, d)
        factors.append(g)
        b = b // g
        d = (d // g) - b.derivative()
    return lead, factors


class InvalidOperatorError(ValueError):
    pass


class ValidationError(ValueError):
    """A space-parameter validation failure; carries the report."""

    def __init__(self, report: "ValidationReport"):
        super().__init__("; ".join(report.failures))
        self.report = report


@dataclass(frozen=True)
class OdeProblem:
    """A polynomial-coefficient operator plus the solution-space parameters.

    p[m] multiplies the m-th derivative.  k0 parametrizes the space the
    solution is sought in, k0d the image space; the admissible gap is
    governed by s0 and by the degree spent in Fuchsian regularization
    (extra_degree).  scale/shift record the affine coordinate change already
    applied to the coefficients.
    """

    M: int
    p: tuple[PolyGR, ...]
    k0: int
    k0d: int
    scale: Fraction = Fraction(1)
    shift: Fraction = Fraction(0)
    regularized: bool = False
    extra_degree: int = 0

    def __post_init__(self):
        if self.M < 0 or len(self.p) != self.M + 1:
            raise InvalidOperatorError("need exactly M+1 coefficient polynomials")
        if self.p[self.M].is_zero():
            raise InvalidOperatorError("leading coefficient polynomial is zero")
        if self.scale <= 0:
            raise InvalidOperatorError("coordinate scale must be positive")


def make_problem(coeffs, k0: int, k0d: int | None = None, **kwargs) -> OdeProblem:
    """Build an OdeProblem from raw coefficient polynomials (index = order).

    k0d defaults to the largest admissible value k0 - s0 (minimizing the
    bandwidth); pass it explicitly to override.
    """
    polys = tuple(c if isinstance(c, PolyGR) else PolyGR(c) for c in coeffs)
    problem = OdeProblem(M=len(polys) - 1, p=polys, k0=k0, k0d=0, **kwargs)
    if k0d is None:
        k0d = k0 - s0(problem)
    return replace(problem, k0d=k0d)


def s0(problem: OdeProblem) -> int:
    """Degree excess max_m (deg p_m - m) of the stored coefficients."""
    return max(problem.p[m].degree - m for m in range(problem.M + 1) if not problem.p[m].is_zero())


def clear_denominators(numerators, denominators, k0: int, k0d: int | None = None) -> OdeProblem:
    """Turn rational-function coefficients num[m]/den[m] into polynomial ones.

    Multiplies through by the exact lcm of the denominators; the resulting
    operator has the same kernel away from the singular set.
    """
    nums = [c if isinstance(c, PolyGR) else PolyGR(c) for c in numerators]
    dens = [c if isinstance(c, PolyGR) else PolyGR(c) for c in denominators]
    if len(nums) != len(dens):
        raise InvalidOperatorError("numerator/denominator lists differ in length")
    for d in dens:
        if d.is_zero():
            raise InvalidOperatorError("zero denominator polynomial")
    lcm = PolyGR.constant(1)
    for d in dens:
        lcm = poly_lcm(lcm, d)
    polys = []
    for num, den in zip(nums, dens):
        cofactor, rem = lcm.divmod(den)
        assert rem.is_zero()
        polys.append(num * cofactor)
    if polys[-1].is_zero():
        raise InvalidOperatorError("leading coefficient vanished while clearing denominators")
    return make_problem(polys, k0=k0, k0d=k0d)


def regularize_fuchsian(problem: OdeProblem) -> OdeProblem:
    """Multiply by the cofactor raising every leading-coefficient root to
    multiplicity >= M.

    With the squarefree decomposition p_M = c * prod g_i^i the cofactor is
    C = prod g_i^(M-i); all coefficients are multiplied by C and the spent
    degree (deg C) is recorded, shrinking the admissible k0d by the same
    amount.  Complex-conjugate root pairs are included wholesale; no root
    isolation happens.
    """
    if problem.regularized:
        return problem
    lead = problem.p[problem.M]
    cofactor = PolyGR.constant(1)
    if lead.degree > 0:
        _, factors = squarefree_decomposition(lead)
        for i, g in enumerate(factors, start=1):
            if g.degree > 0 and i < problem.M:
                cofactor = cofactor * g ** (problem.M - i)
    extra = cofactor.degree
    if extra == 0:
        return replace(problem, regularized=True)
    new_p = tuple(q * cofactor for q in problem.p)
    return replace(
        problem,
        p=new_p,
        regularized=True,
        extra_degree=problem.extra_degree + extra,
    )


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    failures: tuple[str, ...] = ()
    suggested_shift: Fraction | None = None
    s0: int = 0

    def raise_if_failed(self):
        if not self.ok:
            raise ValidationError(self)


def _shift_candidates():
    yield Fraction(1)
    yield Fraction(-1)
    k = 2
    while True:
        yield Fraction(1, k)
        yield Fraction(-1, k)
        yield Fraction(k)
        yield Fraction(-k)
        k += 1


def validate_spaces(problem: OdeProblem) -> ValidationReport:
    """Check the admissibility of (k0, k0d) and the nondegeneracy at ±i.

    Passes iff k0d <= k0 - s0_original - extra_degree (with s0_original the
    excess before regularization, so the bound equals k0 - s0 of the stored
    coefficients) and the leading coefficient does not vanish at x = i or
    x = -i.  On a ±i failure a rational shift b with p_M(±i - b) != 0 is
    proposed; validation never silently proceeds.
    """
    excess = s0(problem)
    failures = []
    bound = problem.k0 - excess
    if problem.k0d > bound:
        failures.append(
            f"condition C3 violated: k0d = {problem.k0d} exceeds "
            f"k0 - s0 - extra_degree = {problem.k0} - {excess - problem.extra_degree}"
            f" - {problem.extra_degree} = {bound}"
        )
    lead = problem.p[problem.M]
    suggested = None
    if lead.eval(GR_I).is_zero() or lead.eval(-GR_I).is_zero():
        failures.append("leading coefficient vanishes at x = i or x = -i")
        for b in _shift_candidates():
            shifted = lead.compose_affine(Fraction(1), b)
            if not shifted.eval(GR_I).is_zero() and not shifted.eval(-GR_I).is_zero():
                suggested = b
                failures[-1] += f"; a coordinate shift x -> x + {b} avoids it"
                break
    return ValidationReport(
        ok=not failures,
        failures=tuple(failures),
        suggested_shift=suggested,
        s0=excess,
    )


def transform_coords(problem: OdeProblem, a: Fraction, b: Fraction) -> OdeProblem:
    """Affine change of coordinate x -> a*x + b (a > 0).

    Solutions of the result are the pullbacks f(a*x + b) of solutions of the
    input: the m-th coefficient becomes p_m(a*x + b) / a^m.
    """
    a = Fraction(a)
    b = Fraction(b)
    if a <= 0:
        raise ValueError("coordinate scale must be positive")
    new_p = []
    inv = Fraction(1)
    for m in range(problem.M + 1):
        new_p.append(problem.p[m].compose_affine(a, b).scaled(GaussRat(inv)))
        inv /= a
    return replace(
        problem,
        p=tuple(new_p),
        scale=problem.scale * a,
        shift=problem.scale * b + problem.shift,
    )
