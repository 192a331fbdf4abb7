"""Band-diagonal matrix representation of a differential operator.

Row m, column n holds the component of (operator applied to the n-th input
basis function) on the m-th output basis function.  For polynomial
coefficients the matrix is banded with half-width ell0 = 2M + k0 - k0d, the
outermost upper-band entry is nonzero from row j0 = max(k0d, 0) on (the
pivot property the kernel recursion relies on), and the entry on the lowest
band admits a closed form used here purely as an independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .basis import BasisExpansion, apply_d, apply_lower, apply_x, inv_sort_map, singleton, sort_map
from .diffop import OdeProblem
from .exact import GaussRat


class AssemblyError(RuntimeError):
    pass


class PivotError(AssemblyError):
    """A required outermost-band entry vanished (recursion cannot proceed)."""

    def __init__(self, row: int):
        super().__init__(
            f"outermost band entry at row {row} is zero; "
            "retry after a coordinate shift"
        )
        self.row = row


@dataclass(frozen=True)
class BandMatrix:
    """Rows 0..N of the operator's band matrix, dense within the band.

    rows[m][n - max(0, m - ell0)] is the entry at (m, n); columns beyond N
    are truncated away (rows above N - ell0 are therefore incomplete, which
    only matters to residual diagnostics, never to the recursion).
    """

    ell0: int
    j0: int
    N: int
    rows: tuple[tuple[GaussRat, ...], ...]

    def row_span(self, m: int) -> tuple[int, int]:
        """Inclusive column range stored for row m."""
        return max(0, m - self.ell0), min(self.N, m + self.ell0)

    def entry(self, m: int, n: int) -> GaussRat:
        if not (0 <= m <= self.N):
            raise IndexError(f"row {m} out of range")
        lo, hi = self.row_span(m)
        if n < lo or n > hi:
            return GaussRat(0)
        return self.rows[m][n - lo]

    def pivot(self, m: int) -> GaussRat:
        """The entry at (m, m + ell0)."""
        return self.entry(m, m + self.ell0)

    def dump_lines(self):
        """Debug dump: one "m n re im" line per stored nonzero entry."""
        for m in range(self.N + 1):
            lo, _ = self.row_span(m)
            for offset, value in enumerate(self.rows[m]):
                if not value.is_zero():
                    yield f"{m} {lo + offset} {value.re} {value.im}"


def bandwidth(problem: OdeProblem) -> int:
    return 2 * problem.M + problem.k0 - problem.k0d


def pivot_start(problem: OdeProblem) -> int:
    return max(problem.k0d, 0)


def expand_column(problem: OdeProblem, n: int) -> BasisExpansion:
    """Expansion of the operator applied to input basis function n, written
    at the output level k0d.

    Each monomial coeff * x^j * (d/dx)^m acts as: differentiate m times,
    multiply by x j times, then lower the level the remaining
    k0 - k0d - j + m times; validation guarantees that count is nonnegative.
    """
    k0, k0d = problem.k0, problem.k0d
    seed = singleton(k0, sort_map(k0, n))
    total = BasisExpansion(k0d)
    derivative = seed
    for m in range(problem.M + 1):
        if m > 0:
            derivative = apply_d(derivative)
        poly = problem.p[m]
        if poly.is_zero():
            continue
        powered = derivative
        for j, coeff in enumerate(poly.coeffs):
            if j > 0:
                powered = apply_x(powered)
            if coeff.is_zero():
                continue
            drops = k0 - k0d - j + m
            if drops < 0:
                raise AssemblyError(
                    "operator monomial exceeds the admissible degree excess; "
                    "validate_spaces must pass before assembly"
                )
            term = powered
            for _ in range(drops):
                term = apply_lower(term)
            if term.level != k0d:
                raise AssemblyError("level bookkeeping mismatch in column expansion")
            total = total + term.scaled(coeff)
    return total


def build(problem: OdeProblem, N: int, check_pivots: bool = True) -> BandMatrix:
    """Assemble rows 0..N exactly.

    The basis normalizations cancel against the orthogonality constant, so
    each entry is literally a coefficient of the column expansion.  Verifies
    the band support structurally and, unless disabled, the pivot property
    on every row the recursion will use.
    """
    ell0 = bandwidth(problem)
    j0 = pivot_start(problem)
    if N < j0 + ell0 - 1:
        raise AssemblyError(f"N = {N} is smaller than the head length {j0 + ell0 - 1}")
    spans = [(max(0, m - ell0), min(N, m + ell0)) for m in range(N + 1)]
    rows = [[GaussRat(0)] * (hi - lo + 1) for lo, hi in spans]
    for n in range(N + 1):
        expansion = expand_column(problem, n)
        for mdd, coeff in expansion.terms.items():
            m = inv_sort_map(problem.k0d, mdd)
            if m > N:
                continue
            lo, hi = spans[m]
            if n < lo or n > hi:
                raise AssemblyError(
                    f"entry ({m}, {n}) falls outside the band of half-width {ell0}"
                )
            rows[m][n - lo] = coeff
    matrix = BandMatrix(ell0=ell0, j0=j0, N=N, rows=tuple(tuple(r) for r in rows))
    if check_pivots:
        for m in range(j0, N - ell0 + 1):
            if matrix.pivot(m).is_zero():
                raise PivotError(m)
    return matrix


def closed_form_leading(problem: OdeProblem, r: int) -> GaussRat:
    """Closed form of the lowest-band entry at (r - ell0, r).

    Independent of the assembly path: the value is
        p_M(-i) * (i/2)^(k0-k0d+M) * (-1)^M * prod_{t=1..M} (n̈(k0,r)+k0+t)
    when k0 + r is even, and
        p_M(+i) * (-i/2)^(k0-k0d+M) * prod_{t=1..M} (n̈(k0,r)-t+1)
    when k0 + r is odd.  Used solely as a test oracle.
    """
    M, k0, k0d = problem.M, problem.k0, problem.k0d
    if r < 2 * M + k0 + max(-k0d, 0):
        raise ValueError(f"column {r} below the closed-form range")
    nd = sort_map(k0, r)
    half_i = GaussRat(0, Fraction(1, 2))
    if (k0 + r) % 2 == 0:
        value = problem.p[M].eval(GaussRat(0, -1)) * half_i ** (k0 - k0d + M)
        if M % 2 == 1:
            value = -value
        for t in range(1, M + 1):
            value = value * (nd + k0 + t)
    else:
        value = problem.p[M].eval(GaussRat(0, 1)) * (-half_i) ** (k0 - k0d + M)
        for t in range(1, M + 1):
            value = value * (nd - t + 1)
    return value
