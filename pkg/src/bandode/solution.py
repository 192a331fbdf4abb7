"""Turning accepted kernel vectors into solution functions.

A coefficient sequence f_0..f_N at level k0 represents the function
sum_n f_n psi(k0, n̈(k0, n); x) up to one global constant that is dropped
uniformly (it cancels from every ratio, residual and plot shape).  This
module normalizes candidates, evaluates them exactly at rational points,
renders decimal grids and CSV files, and reports coefficient ratios with
digit-agreement accounting against a reference value.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction

from .assembly import BandMatrix
from .basis import BasisExpansion, eval_exact, inv_sort_map, sort_map
from .exact import (
    GaussRat,
    agreeing_digits,
    decimal_digit_count,
    format_gauss_decimal,
    format_rat,
    parse_rat,
)


class NormalizationDegenerateError(ArithmeticError):
    pass


@dataclass(frozen=True)
class SpectralSolution:
    k0: int
    coeffs: tuple[GaussRat, ...]
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    def expansion(self) -> BasisExpansion:
        return BasisExpansion(
            self.k0,
            {sort_map(self.k0, n): c for n, c in enumerate(self.coeffs)},
        )


def normalization_indices(k0: int) -> tuple[int, int]:
    """Positions of the self-conjugate packet pair (bilateral 0 and -k0-1)."""
    return inv_sort_map(k0, 0), inv_sort_map(k0, -k0 - 1)


def normalize(solution: SpectralSolution) -> SpectralSolution:
    """Scale so the two central coefficients sum to exactly 2.

    This pins the same ray representative as pairing against the symmetric
    central packet pair, while staying inside Q(i); coefficient ratios and
    value ratios are untouched.  Degenerate when that sum vanishes.
    """
    a, b = normalization_indices(solution.k0)
    total = solution.coeffs[a] + solution.coeffs[b]
    if total.is_zero():
        raise NormalizationDegenerateError(
            "central coefficient pair sums to zero; use peak normalization"
        )
    factor = GaussRat(2) * total.inverse()
    return SpectralSolution(
        k0=solution.k0,
        coeffs=tuple(factor * c for c in solution.coeffs),
        meta=dict(solution.meta),
    )


def normalize_peak(solution: SpectralSolution) -> SpectralSolution:
    """Fallback: scale the largest-modulus coefficient to exactly 1."""
    best = max(range(len(solution.coeffs)), key=lambda n: solution.coeffs[n].abs_sq())
    if solution.coeffs[best].is_zero():
        raise NormalizationDegenerateError("zero solution cannot be normalized")
    factor = solution.coeffs[best].inverse()
    return SpectralSolution(
        k0=solution.k0,
        coeffs=tuple(factor * c for c in solution.coeffs),
        meta=dict(solution.meta),
    )


def eval_exact_solution(solution: SpectralSolution, x: Fraction) -> GaussRat:
    """Exact value of the represented function at a rational point."""
    return eval_exact(solution.expansion(), Fraction(x))


def eval_real_grid(solution: SpectralSolution, xs, digits: int):
    """Evaluate on a grid and render to fixed decimals.

    Grid points are read exactly (decimal strings parse to exact rationals);
    returns a list of (x_string, value_string) pairs, values correctly
    rounded from the exact evaluations.
    """
    if digits < 1:
        raise ValueError("digits must be >= 1")
    rows = []
    for x in xs:
        point = parse_rat(x) if isinstance(x, str) else Fraction(x)
        value = eval_exact_solution(solution, point)
        rows.append((format_rat(point), format_gauss_decimal(value, digits)))
    return rows


@dataclass(frozen=True)
class RatioEntry:
    numerator_index: int
    denominator_index: int
    value: GaussRat | None
    error: str | None = None
    agreed_digits: int | None = None
    precision_proportion: Fraction | None = None

    def decimal(self, digits: int) -> str:
        if self.value is None:
            return "-"
        return format_gauss_decimal(self.value, digits)


def ratio_report(
    solution: SpectralSolution,
    pairs,
    reference: str | None = None,
    digit_cap: int = 1000,
) -> list[RatioEntry]:
    """Exact coefficient ratios f_a/f_b with optional reference comparison.

    With a reference decimal string the report counts how many significant
    digits of the (real part of the) exact ratio agree with it, and the
    proportion of those to the total digits of the reduced numerator and
    denominator — near 1 means the rational carries no wasted precision.
    """
    ref_value = parse_rat(reference) if reference is not None else None
    entries = []
    for a, b in pairs:
        denom = solution.coeffs[b]
        if denom.is_zero():
            entries.append(
                RatioEntry(a, b, None, error=f"coefficient {b} is zero")
            )
            continue
        value = solution.coeffs[a] * denom.inverse()
        agreed = None
        proportion = None
        if ref_value is not None:
            agreed = agreeing_digits(value.re, ref_value, cap=digit_cap)
            width = decimal_digit_count(value.re.numerator) + decimal_digit_count(
                value.re.denominator
            )
            proportion = Fraction(agreed, width)
        entries.append(
            RatioEntry(a, b, value, agreed_digits=agreed, precision_proportion=proportion)
        )
    return entries


def tail_mass(solution: SpectralSolution, K: int) -> Fraction:
    """Fraction of the squared coefficient mass above index K."""
    if K >= solution.N:
        raise ValueError("K must be below the top index")
    total = Fraction(0)
    tail = Fraction(0)
    for n, c in enumerate(solution.coeffs):
        size = c.abs_sq()
        total += size
        if n > K:
            tail += size
    if not total:
        raise ZeroDivisionError("zero solution has no tail mass")
    return tail / total


def residual_rows(matrix: BandMatrix, solution: SpectralSolution, K: int | None = None) -> Fraction:
    """Worst truncated-row defect, relative to the head norm.

    Rows up to N - ell0 are satisfied exactly by construction; the rows
    above them lack their columns beyond N, and this measures exactly that
    truncation defect: max over those rows of |row sum|^2 / head norm.
    """
    N = solution.N
    if K is None:
        K = N
    head = Fraction(0)
    for n in range(min(K, N) + 1):
        head += solution.coeffs[n].abs_sq()
    if not head:
        raise ZeroDivisionError("zero solution")
    worst = Fraction(0)
    for m in range(max(0, N - matrix.ell0 + 1), N + 1):
        lo, hi = matrix.row_span(m)
        acc = GaussRat(0)
        for n in range(lo, min(hi, N) + 1):
            coeff = matrix.entry(m, n)
            if not coeff.is_zero() and not solution.coeffs[n].is_zero():
                acc = acc + coeff * solution.coeffs[n]
        defect = acc.abs_sq()
        if defect > worst:
            worst = defect
    return worst / head


def export_csv(solution: SpectralSolution, xs, digits: int, path) -> None:
    """Write "x,re,im" rows for the grid, deterministically formatted."""
    rows = []
    for x in xs:
        point = parse_rat(x) if isinstance(x, str) else Fraction(x)
        value = eval_exact_solution(solution, point)
        rows.append(
            (
                format_rat(point),
                _fixed(value.re, digits),
                _fixed(value.im, digits),
            )
        )
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["x", "re", "im"])
        writer.writerows(rows)


def _fixed(q: Fraction, digits: int) -> str:
    from .exact import format_decimal

    return format_decimal(q, digits)
