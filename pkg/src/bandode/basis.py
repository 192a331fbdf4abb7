"""Rational wavepacket basis and its structural recurrences.

The level-k wavepacket with bilateral index n̈ is

    psi(k, n̈; x) = (x + i)^-(k+1) * ((x - i)/(x + i))^n̈ ,

an almost-sinusoidal packet with envelope (x²+1)^-(k+1)/2.  The family
{psi(k, n̈)/sqrt(pi) : n̈ in Z} is orthonormal for the weighted inner product
with weight (x²+1)^k.  Three exact identities drive everything downstream:

    psi(k, n̈)        = -i/2 * (psi(k-1, n̈) - psi(k-1, n̈+1))       (lower)
    x * psi(k, n̈)    =  1/2 * (psi(k-1, n̈) + psi(k-1, n̈+1))       (mult)
    d/dx psi(k, n̈)   =  n̈ * psi(k+1, n̈-1) - (n̈+k+1) * psi(k+1, n̈) (diff)

Expansions are kept in bilateral indexing; the unilateral sorting that makes
operator matrices band-diagonal is applied only at assembly and I/O
boundaries (the sorted form of the identities is impractically messy).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exact import GR_ONE, GaussRat

_NEG_HALF_I = GaussRat(0, Fraction(-1, 2))
_POS_HALF_I = GaussRat(0, Fraction(1, 2))
_HALF = GaussRat(Fraction(1, 2))


@dataclass(frozen=True)
class BasisIndex:
    """Level and bilateral index of a single wavepacket."""

    k: int
    nddot: int

    def conjugate_partner(self) -> "BasisIndex":
        """Index of the complex conjugate packet; an involution."""
        return BasisIndex(self.k, -self.nddot - self.k - 1)


def sort_map(k: int, n: int) -> int:
    """Bilateral index of the n-th basis function at level k.

    n̈(k, n) = floor(-(k+1)/2) + (-1)^(n+k+1) * floor((n+1)/2); for fixed k
    this is a bijection from nonnegative n onto all integers, ordered so the
    operator matrix acquires its band structure.
    """
    if n < 0:
        raise ValueError("unilateral index must be nonnegative")
    base = (-(k + 1)) // 2
    step = (n + 1) // 2
    return base + (step if (n + k + 1) % 2 == 0 else -step)


def inv_sort_map(k: int, nddot: int) -> int:
    """Inverse of sort_map: the unilateral position of bilateral index n̈."""
    offset = nddot - ((-(k + 1)) // 2)
    if offset == 0:
        return 0
    if offset > 0:
        # (-1)^(n+k+1) = +1, floor((n+1)/2) = offset  ->  n in {2*offset-1, 2*offset}
        candidates = (2 * offset - 1, 2 * offset)
        wanted_parity = 0
    else:
        candidates = (-2 * offset - 1, -2 * offset)
        wanted_parity = 1
    for n in candidates:
        if (n + k + 1) % 2 == wanted_parity:
            return n
    raise AssertionError("unreachable")


class BasisExpansion:
    """A finite linear combination of wavepackets at one fixed level.

    Zero coefficients are never stored.  Instances are treated as immutable;
    all operations return new expansions.
    """

    __slots__ = ("level", "terms")

    def __init__(self, level: int, terms: dict[int, GaussRat] | None = None):
        self.level = level
        self.terms = {n: c for n, c in (terms or {}).items() if not c.is_zero()}

    def __eq__(self, other):
        return (
            isinstance(other, BasisExpansion)
            and self.level == other.level
            and self.terms == other.terms
        )

    def __repr__(self):
        inner = ", ".join(f"{n}: {c}" for n, c in sorted(self.terms.items()))
        return f"BasisExpansion(level={self.level}, {{{inner}}})"

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, nddot: int) -> GaussRat:
        return self.terms.get(nddot, GaussRat(0))

    def support(self) -> list[int]:
        return sorted(self.terms)

    def scaled(self, factor: GaussRat) -> "BasisExpansion":
        factor = GaussRat.coerce(factor)
        if factor.is_zero():
            return BasisExpansion(self.level)
        return BasisExpansion(self.level, {n: factor * c for n, c in self.terms.items()})

    def __add__(self, other: "BasisExpansion") -> "BasisExpansion":
        if self.level != other.level:
            raise ValueError(
                f"cannot add expansions at levels {self.level} and {other.level}"
            )
        merged = dict(self.terms)
        for n, c in other.terms.items():
            merged[n] = merged.get(n, GaussRat(0)) + c
        return BasisExpansion(self.level, merged)

    def conjugated_reflection(self) -> "BasisExpansion":
        """The expansion of the complex conjugate of the represented function."""
        k = self.level
        return BasisExpansion(
            k, {-n - k - 1: c.conjugate() for n, c in self.terms.items()}
        )


def singleton(k: int, nddot: int, coeff=GR_ONE) -> BasisExpansion:
    return BasisExpansion(k, {nddot: GaussRat.coerce(coeff)})


def apply_lower(e: BasisExpansion) -> BasisExpansion:
    """Rewrite at level-1 using psi(k,n̈) = -i/2 (psi(k-1,n̈) - psi(k-1,n̈+1))."""
    out: dict[int, GaussRat] = {}
    for n, c in e.terms.items():
        lo = _NEG_HALF_I * c
        hi = _POS_HALF_I * c
        out[n] = out.get(n, GaussRat(0)) + lo
        out[n + 1] = out.get(n + 1, GaussRat(0)) + hi
    return BasisExpansion(e.level - 1, out)


def apply_x(e: BasisExpansion) -> BasisExpansion:
    """Multiply by x: x psi(k,n̈) = 1/2 (psi(k-1,n̈) + psi(k-1,n̈+1))."""
    out: dict[int, GaussRat] = {}
    for n, c in e.terms.items():
        half = _HALF * c
        out[n] = out.get(n, GaussRat(0)) + half
        out[n + 1] = out.get(n + 1, GaussRat(0)) + half
    return BasisExpansion(e.level - 1, out)


def apply_d(e: BasisExpansion) -> BasisExpansion:
    """Differentiate: d/dx psi(k,n̈) = n̈ psi(k+1,n̈-1) - (n̈+k+1) psi(k+1,n̈)."""
    k = e.level
    out: dict[int, GaussRat] = {}
    for n, c in e.terms.items():
        if n:
            down = c * n
            out[n - 1] = out.get(n - 1, GaussRat(0)) + down
        factor = -(n + k + 1)
        if factor:
            out[n] = out.get(n, GaussRat(0)) + c * factor
    return BasisExpansion(e.level + 1, out)


def eval_psi(index: BasisIndex, x: Fraction) -> GaussRat:
    """Exact value of one wavepacket at a rational point."""
    z = GaussRat(x, 1)  # x + i, never zero for real x
    ratio = z.conjugate() * z.inverse()
    return z ** (-(index.k + 1)) * ratio**index.nddot


def eval_exact(e: BasisExpansion, x: Fraction) -> GaussRat:
    """Exact value of an expansion at a rational point.

    Powers of (x-i)/(x+i) are built incrementally over the sorted support, so
    the cost is linear in the support width.
    """
    if e.is_zero():
        return GaussRat(0)
    z = GaussRat(x, 1)
    ratio = z.conjugate() * z.inverse()
    support = e.support()
    power = ratio ** support[0]
    total = GaussRat(0)
    previous = support[0]
    for n in support:
        if n != previous:
            power = power * ratio ** (n - previous)
            previous = n
        total = total + e.terms[n] * power
    return z ** (-(e.level + 1)) * total


def eval_d_exact(index: BasisIndex, x: Fraction) -> GaussRat:
    """Exact derivative value of one wavepacket: closed form, no recurrence.

    d/dx psi = psi(x) * ( -(k+1)/(x+i) + 2i*n̈/(x²+1) ), used as an
    independent cross-check of apply_d.
    """
    k, nd = index.k, index.nddot
    z = GaussRat(x, 1)
    log_deriv = GaussRat(-(k + 1)) * z.inverse() + GaussRat(0, 2 * nd) * GaussRat(
        x * x + 1
    ).inverse()
    return eval_psi(index, x) * log_deriv
