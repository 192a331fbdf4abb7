"""Exact spanning of the band system's kernel.

The kernel of the semi-infinite band system is finite dimensional: its
dimension D equals that of the head block (rows 0..j0-1, columns 0..p0 with
p0 = j0 + ell0 - 1).  A basis of the head null space is found by
fraction-free elimination over the Gaussian integers, then each basis vector
is extended entry by entry with the band recursion

    F[n] = -(1/pivot(n - ell0)) * sum_{m < n in band} entry(n-ell0, m) * F[m],

which is exact because every pivot is a nonzero Gaussian rational.  No
rounding of any kind occurs here.
"""

from __future__ import annotations

from dataclasses import dataclass

from .assembly import BandMatrix, PivotError
from .exact import GaussRat, abs_sq, primitive_scale, primitivize

PRIMITIVIZE_EVERY = 32


class EmptyKernelError(RuntimeError):
    pass


@dataclass(frozen=True)
class KernelBasis:
    """D exact sequences of length N+1 spanning the truncated kernel."""

    D: int
    p0: int
    N: int
    sequences: tuple[tuple[GaussRat, ...], ...]
    denom_log: tuple[tuple[int, int], ...] = ()  # (index, digits of the rescale)


def _integerize_row(row: list[GaussRat]) -> list[GaussRat]:
    from math import gcd

    den = 1
    for z in row:
        for part in (z.re, z.im):
            den = den // gcd(den, part.denominator) * part.denominator
    return [z * den for z in row]


def _bareiss_echelon(matrix: list[list[GaussRat]], ncols: int):
    """Fraction-free elimination with full pivoting by largest squared modulus.

    Returns (rows, col_perm, rank): rows are the eliminated Gaussian-integer
    rows, col_perm maps elimination position -> original column.
    """
    rows = [_integerize_row(r) for r in matrix]
    nrows = len(rows)
    col_perm = list(range(ncols))
    prev = GaussRat(1)
    rank = 0
    for step in range(min(nrows, ncols)):
        best = None
        best_size = 0
        for i in range(step, nrows):
            for j in range(step, ncols):
                size = abs_sq(rows[i][j])
                if size > best_size:
                    best, best_size = (i, j), size
        if best is None or best_size == 0:
            break
        bi, bj = best
        rows[step], rows[bi] = rows[bi], rows[step]
        if bj != step:
            for r in rows:
                r[step], r[bj] = r[bj], r[step]
            col_perm[step], col_perm[bj] = col_perm[bj], col_perm[step]
        pivot = rows[step][step]
        inv_prev = prev.inverse()
        for i in range(step + 1, nrows):
            head = rows[i][step]
            for j in range(step, ncols):
                value = (pivot * rows[i][j] - head * rows[step][j]) * inv_prev
                assert value.is_gaussian_integer()
                rows[i][j] = value
            rows[i][step] = GaussRat(0)
        prev = pivot
        rank += 1
    return rows, col_perm, rank


def head_solve(matrix: BandMatrix) -> list[list[GaussRat]]:
    """Primitive Gaussian-integer basis of the head-block null space.

    Free variables (the non-pivot columns, in increasing index order) are set
    to unit vectors and the pivot variables back-substituted, mirroring the
    reduced-echelon construction; every vector is returned content-free with
    a canonical leading unit.
    """
    j0, p0 = matrix.j0, matrix.j0 + matrix.ell0 - 1
    ncols = p0 + 1
    if j0 == 0:
        basis = []
        for f in range(ncols):
            vec = [GaussRat(0)] * ncols
            vec[f] = GaussRat(1)
            basis.append(vec)
        return basis
    block = [[matrix.entry(m, n) for n in range(ncols)] for m in range(j0)]
    rows, col_perm, rank = _bareiss_echelon(block, ncols)
    dim = ncols - rank
    if dim == 0:
        raise EmptyKernelError("head block has full column rank; no kernel to span")
    free_cols = sorted(col_perm[rank:])
    position = {orig: pos for pos, orig in enumerate(col_perm)}
    basis = []
    for f in free_cols:
        x = [GaussRat(0)] * ncols  # indexed by elimination position
        x[position[f]] = GaussRat(1)
        for i in range(rank - 1, -1, -1):
            acc = GaussRat(0)
            for j in range(i + 1, ncols):
                if not x[j].is_zero():
                    acc = acc + rows[i][j] * x[j]
            x[i] = -acc * rows[i][i].inverse()
        vec = [GaussRat(0)] * ncols
        for pos, orig in enumerate(col_perm):
            vec[orig] = x[pos]
        basis.append(primitivize(vec))
    return basis


def extend(matrix: BandMatrix, head: list[list[GaussRat]], N: int) -> KernelBasis:
    """Extend head-block vectors to index N with the band recursion.

    Periodically rescales each sequence to primitive Gaussian-integer form
    (a pure ray rescale: membership and entry ratios are unchanged), which
    keeps the stored integers from accreting redundant common factors.
    """
    ell0, j0 = matrix.ell0, matrix.j0
    p0 = j0 + ell0 - 1
    if N < p0:
        raise ValueError(f"N = {N} below head length {p0}")
    if N > matrix.N:
        raise ValueError("band matrix too short for the requested extension")
    sequences = []
    log: list[tuple[int, int]] = []
    for vec in head:
        seq = list(vec)
        for n in range(p0 + 1, N + 1):
            row = n - ell0
            pivot = matrix.pivot(row)
            if pivot.is_zero():
                raise PivotError(row)
            lo = max(0, n - 2 * ell0)
            acc = GaussRat(0)
            for m in range(lo, n):
                coeff = matrix.entry(row, m)
                if not coeff.is_zero() and not seq[m].is_zero():
                    acc = acc + coeff * seq[m]
            seq.append(-acc * pivot.inverse())
            if (n - p0) % PRIMITIVIZE_EVERY == 0:
                scale = primitive_scale(seq)
                if scale != GaussRat(1):
                    seq = [scale * z for z in seq]
                    log.append((n, len(str(scale.re.numerator))))
        scale = primitive_scale(seq)
        if scale != GaussRat(1):
            seq = [scale * z for z in seq]
            log.append((N, len(str(scale.re.numerator))))
        sequences.append(tuple(seq))
    return KernelBasis(
        D=len(sequences),
        p0=p0,
        N=N,
        sequences=tuple(sequences),
        denom_log=tuple(log),
    )


def membership_check(matrix: BandMatrix, f, m_lo: int, m_hi: int) -> bool:
    """True iff every row equation in [m_lo, m_hi] holds exactly."""
    if m_hi + matrix.ell0 > len(f) - 1:
        raise ValueError("vector too short for the requested row range")
    if m_hi + matrix.ell0 > matrix.N:
        raise ValueError("band matrix rows are truncated inside the requested range")
    for m in range(m_lo, m_hi + 1):
        lo, hi = matrix.row_span(m)
        acc = GaussRat(0)
        for n in range(lo, hi + 1):
            coeff = matrix.entry(m, n)
            if not coeff.is_zero():
                fn = GaussRat.coerce(f[n])
                if not fn.is_zero():
                    acc = acc + coeff * fn
        if not acc.is_zero():
            return False
    return True
