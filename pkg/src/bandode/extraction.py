"""Extraction of the square-summable directions from the kernel span.

Divergent kernel sequences dwarf the true solutions once weighted: with
weights equal to 1 up to index K and then growing like powers of a large
base, the ratio

    sigma(f) = (sum_n w_n |f_n|^2) / (sum_{n<=K} |f_n|^2)

is moderate exactly on the near-square-summable rays and astronomically
large on the rest.  Rather than minimizing sigma by eigendecomposition
(hopeless here: the Gram matrices are nearly rank one), the kernel basis is
quasi-orthogonalized over the Gaussian integers by repeated size-reduction
sweeps, and the minimum-sigma member of the reduced basis is taken; accepted
directions are projected out (exactly, in the K-truncated inner product) and
the process repeats while the ratio stays within a factor c of the first.

Everything here happens in the D-dimensional coordinate space of the kernel
basis, through D x D Gram matrices, so the cost is independent of N except
for the one-time Gram assembly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .basis import sort_map
from .exact import GaussRat, primitivize, round_gauss
from .kernel import KernelBasis

DEFAULT_BASE = 10**16
DEFAULT_C = Fraction(10**4)
DEFAULT_ZETA = Fraction(1, 100)
MAX_SWEEPS = 64

SCHEMES = {
    "A": (Fraction(3, 8), Fraction(7, 16)),
    "B": (Fraction(7, 16), Fraction(15, 32)),
}


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class WeightProfile:
    """Weights 1 on [0, K], geometric in the decay index on (K, J), capped
    at the plateau value from J on."""

    N: int
    K: int
    J: int
    base: int
    w: tuple[int, ...]
    mu: tuple[int, ...]
    scheme: str
    mu_variant: str


def decay_index(k0: int, n: int, variant: str = "symmetric") -> int:
    """The weight exponent of basis position n.

    The symmetric variant measures the distance of the bilateral index from
    the conjugation center -(k0+1)/2, matching the symmetry the weights are
    built around; the printed variant mirrors the center to +(k0+1)/2.
    Both are integers.
    """
    nd = sort_map(k0, n)
    center = Fraction(k0 + 1, 2)
    if variant == "symmetric":
        value = abs(nd + center) - center
    elif variant == "printed":
        value = abs(nd - center) - center
    else:
        raise ConfigurationError(f"unknown mu variant {variant!r}")
    assert value.denominator == 1
    return int(value)


def make_weights(
    N: int,
    k0: int,
    scheme: str = "B",
    base: int = DEFAULT_BASE,
    mu_variant: str = "symmetric",
) -> WeightProfile:
    """Weight profile for vectors indexed 0..N.

    K and J come from the scheme's floor formulas
    (A: K = 2*floor(3(N-k0)/8)+k0, J = 2*floor(7(N-k0)/16)+k0;
     B: K = 2*floor(7(N-k0)/16)+k0, J = 2*floor(15(N-k0)/32)+k0).
    """
    if N < k0 + 2:
        raise ConfigurationError(f"N = {N} too small for k0 = {k0}")
    if scheme not in SCHEMES:
        raise ConfigurationError(f"unknown scheme {scheme!r}")
    if base < 2:
        raise ConfigurationError("weight base must be at least 2")
    frac_k, frac_j = SCHEMES[scheme]
    K = 2 * int(frac_k * (N - k0)) + k0
    J = 2 * int(frac_j * (N - k0)) + k0
    mu = tuple(decay_index(k0, n, mu_variant) for n in range(N + 1))
    mu_K, mu_J = mu[K], mu[J]
    w = []
    for n in range(N + 1):
        if n <= K:
            w.append(1)
        elif n < J:
            w.append(base ** max(0, mu[n] - mu_K))
        else:
            w.append(base ** max(0, mu_J - mu_K))
    return WeightProfile(
        N=N, K=K, J=J, base=base, w=tuple(w), mu=mu, scheme=scheme, mu_variant=mu_variant
    )


def omega(f, g, profile: WeightProfile) -> GaussRat:
    """The weighted sesquilinear form sum_n w_n f_n conj(g_n)."""
    if len(f) != profile.N + 1 or len(g) != profile.N + 1:
        raise ValueError("vectors must have length N+1")
    acc = GaussRat(0)
    for wn, fn, gn in zip(profile.w, f, g):
        fn = GaussRat.coerce(fn)
        gn = GaussRat.coerce(gn)
        if not fn.is_zero() and not gn.is_zero():
            acc = acc + fn * gn.conjugate() * wn
    return acc


def sigma(f, profile: WeightProfile) -> Fraction:
    """Weighted-to-truncated norm ratio; scale invariant; >= 1 by w >= 1."""
    head = Fraction(0)
    for n in range(profile.K + 1):
        head += GaussRat.coerce(f[n]).abs_sq()
    if not head:
        raise ZeroDivisionError("vector vanishes on the truncation range")
    return omega(f, f, profile).re / head


# ---------------------------------------------------------------------------
# Integer quasi-orthogonalization
# ---------------------------------------------------------------------------


def _vec_sub_scaled(v, q: GaussRat, u):
    return [a - q * b for a, b in zip(v, u)]


_LOVASZ_DELTA = Fraction(3, 4)


def _lll(vectors, inner, delta: Fraction = _LOVASZ_DELTA):
    """Exact Lovász-conditioned reduction of a complex lattice basis.

    Size-reduction sweeps alone stall in local optima once the form is
    extremely anisotropic (observed for kernel dimension 9); the swap step
    is what lets the reduction cascade into the shallow directions.  The
    Gram-Schmidt data (mu, r) is kept exactly and updated incrementally,
    so the form is evaluated only once per input pair.
    """
    n = len(vectors)
    if n < 2:
        return vectors
    # exact GS from the form: mu[i][j] = <b_i, b_j*>/r_j, r[i] = |b_i*|^2
    mu = [[GaussRat(0)] * n for _ in range(n)]
    r: list[Fraction] = [Fraction(0)] * n
    ip_row = [GaussRat(0)] * n
    for i in range(n):
        for j in range(i + 1):
            value = inner(vectors[i], vectors[j])
            for t in range(j):
                value = value - mu[j][t].conjugate() * ip_row[t]
            ip_row[j] = value
            if j < i:
                mu[i][j] = value * GaussRat(r[j]).inverse()
        r[i] = ip_row[i].re

    def size_reduce(k: int, j: int):
        q = round_gauss(mu[k][j])
        if q.is_zero():
            return
        vectors[k] = _vec_sub_scaled(vectors[k], q, vectors[j])
        for t in range(j):
            mu[k][t] = mu[k][t] - q * mu[j][t]
        mu[k][j] = mu[k][j] - q

    k = 1
    while k < n:
        size_reduce(k, k - 1)
        if r[k] < (delta - mu[k][k - 1].abs_sq()) * r[k - 1]:
            # swap b_{k-1} and b_k, updating the GS data in place:
            # the new front GS vector is b*_k + mu b*_{k-1}
            m = mu[k][k - 1]
            r_lo, r_hi = r[k - 1], r[k]
            big = r_hi + m.abs_sq() * r_lo
            r[k - 1] = big
            r[k] = r_lo * r_hi / big
            vectors[k], vectors[k - 1] = vectors[k - 1], vectors[k]
            for t in range(k - 1):
                mu[k - 1][t], mu[k][t] = mu[k][t], mu[k - 1][t]
            for i in range(k + 1, n):
                upper = mu[i][k]
                lower = mu[i][k - 1]
                mu[i][k - 1] = (upper * r_hi + m.conjugate() * lower * r_lo) * GaussRat(
                    big
                ).inverse()
                mu[i][k] = lower - m * upper
            mu[k][k - 1] = m.conjugate() * GaussRat(r_lo / big)
            k = max(k - 1, 1)
            continue
        for j in range(k - 2, -1, -1):
            size_reduce(k, j)
        k += 1
    return vectors


def quasi_orthogonalize(basis, inner, zeta: Fraction = DEFAULT_ZETA, max_sweeps: int = MAX_SWEEPS):
    """Integer-preserving quasi-orthogonalization under a positive form.

    inner(u, v) must be a sesquilinear positive form returning GaussRat.
    A Lovász-conditioned reduction first untangles the basis, then
    size-reduction sweeps run: sort by form norm ascending and replace v_j
    by v_j - round(<v_j, v_i>/<v_i, v_i>) * v_i for every pair i < j,
    rounding to the nearest Gaussian integer (ties away from zero), then
    rescale to primitive integer vectors.  Stops once all pairwise cosines
    satisfy |<u,v>|^2 <= zeta^2 <u,u> <v,v>, or after max_sweeps (flagged:
    some lattices have no basis that orthogonal, the caller sees the flag).

    Returns (vectors, certified).
    """
    if not 0 < zeta < 1:
        raise ValueError("zeta must lie in (0, 1)")
    vectors = [primitivize(list(v)) for v in basis]
    vectors = [primitivize(v) for v in _lll(vectors, inner)]
    zeta_sq = zeta * zeta

    def certified() -> bool:
        norms = [inner(v, v).re for v in vectors]
        for i in range(len(vectors)):
            for j in range(i + 1, len(vectors)):
                cross = inner(vectors[i], vectors[j]).abs_sq()
                if cross > zeta_sq * norms[i] * norms[j]:
                    return False
        return True

    for _ in range(max_sweeps):
        if certified():
            return vectors, True
        vectors.sort(key=lambda v: inner(v, v).re)
        changed = False
        for i in range(len(vectors)):
            vi = vectors[i]
            norm_i = inner(vi, vi).re
            for j in range(i + 1, len(vectors)):
                mu = inner(vectors[j], vi) * GaussRat(norm_i).inverse()
                q = round_gauss(mu)
                if not q.is_zero():
                    vectors[j] = _vec_sub_scaled(vectors[j], q, vi)
                    changed = True
        vectors = [primitivize(v) for v in vectors]
        if not changed:
            break
    return vectors, certified()


# ---------------------------------------------------------------------------
# Step-3 extraction loop
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Candidate:
    """An accepted near-square-summable kernel element."""

    vector: tuple[GaussRat, ...]
    sigma: Fraction
    combo: tuple[GaussRat, ...]


@dataclass
class ExtractionOutcome:
    candidates: list[Candidate]
    sigma_min: Fraction | None
    sigma_second: Fraction | None  # second-smallest in the first reduced basis
    sigma_stop: Fraction | None  # ratio of the vector that ended the loop
    certified: list[bool] = field(default_factory=list)
    rejected_head_dominance: bool = False

    @property
    def sigma_gap(self) -> Fraction | None:
        """Ratio of the loop-terminating sigma to the accepted minimum."""
        if self.sigma_min and self.sigma_stop is not None:
            return self.sigma_stop / self.sigma_min
        return None


def _gram(seqs, weights, upto: int):
    """Hermitian D x D Gram matrix sum_{n<=upto} w_n s_d[n] conj(s_e[n])."""
    D = len(seqs)
    G = [[GaussRat(0)] * D for _ in range(D)]
    for d in range(D):
        for e in range(d, D):
            acc = GaussRat(0)
            for n in range(upto + 1):
                a, b = seqs[d][n], seqs[e][n]
                if not a.is_zero() and not b.is_zero():
                    term = a * b.conjugate()
                    if weights is not None and weights[n] != 1:
                        term = term * weights[n]
                    acc = acc + term
            G[d][e] = acc
            if e != d:
                G[e][d] = acc.conjugate()
    return G


def _gram_inner(G, u, v) -> GaussRat:
    acc = GaussRat(0)
    for d, ud in enumerate(u):
        if ud.is_zero():
            continue
        row = G[d]
        inner = GaussRat(0)
        for e, ve in enumerate(v):
            if not ve.is_zero():
                inner = inner + row[e] * ve.conjugate()
        acc = acc + ud * inner
    return acc


def _solve_hermitian(G, rhs):
    """Solve G x = rhs for a positive-definite Hermitian G, exactly."""
    n = len(G)
    M = [row[:] + [rhs[i]] for i, row in enumerate(G)]
    for col in range(n):
        pivot_row = next(r for r in range(col, n) if not M[r][col].is_zero())
        M[col], M[pivot_row] = M[pivot_row], M[col]
        inv = M[col][col].inverse()
        for r in range(n):
            if r != col and not M[r][col].is_zero():
                factor = M[r][col] * inv
                M[r] = [a - factor * b for a, b in zip(M[r], M[col])]
    return [M[i][n] * M[i][i].inverse() for i in range(n)]


def _project_out(v, accepted, gram_k):
    """Exact projection of v onto the K-truncated orthocomplement of the
    accepted combos."""
    rhs = [_gram_inner(gram_k, v, g) for g in accepted]
    if all(r.is_zero() for r in rhs):
        return list(v)
    # <v - sum_d c_d g_d, g_e> = 0  =>  sum_d <g_d, g_e> c_d = <v, g_e>
    M = [[_gram_inner(gram_k, gd, ge) for gd in accepted] for ge in accepted]
    coeffs = _solve_hermitian(M, rhs)
    out = list(v)
    for c, g in zip(coeffs, accepted):
        if not c.is_zero():
            out = _vec_sub_scaled(out, c, g)
    return out


def extract_l2_detailed(
    kb: KernelBasis,
    profile: WeightProfile,
    c: Fraction = DEFAULT_C,
    zeta: Fraction = DEFAULT_ZETA,
) -> ExtractionOutcome:
    """Run the removal loop and return candidates plus diagnostics.

    A reduced basis vector is accepted while (a) its ratio is within c of
    the first accepted one and (b) it is head dominated: at most 1% of
    sum_{n<=N} |f_n|^2 sits above K.  Divergent rays keep a third or more
    of their mass above K even after quasi-minimization, genuine
    square-summable ones orders of magnitude less than 1%, so the test is
    insensitive to its exact threshold; unlike a gap test it is independent
    of c, which keeps acceptance monotone in c.  An empty result means no
    square-summable component was found.

    Within each round the candidate is not simply the minimum-ratio reduced
    vector: the ratio valley is flat near its bottom (every vector tracking
    the square-summable ray down to the truncation floor sits within a
    modest factor of the minimum), and among the admissible vectors the one
    with the smallest weighted norm is the arithmetically canonical
    representative -- it carries the fewest integer digits per delivered
    digit of accuracy.  The round therefore reduces the basis a second time
    under a ladder of penalized forms Omega + lambda <.,.>_K (lambda
    sweeping up from the round minimum), pools the results, keeps the pool
    members within c of the pool minimum ratio, and selects the pool member
    of least weighted norm.
    """
    if profile.N != kb.N:
        raise ConfigurationError("weight profile and kernel basis disagree on N")
    if profile.K < kb.p0:
        raise ConfigurationError(
            f"K = {profile.K} must be at least the head length {kb.p0}"
        )
    if c < 1:
        raise ConfigurationError("acceptance factor c must be >= 1")
    seqs = [primitivize(list(s)) for s in kb.sequences]
    D = len(seqs)
    gram_w = _gram(seqs, profile.w, profile.N)
    gram_k = _gram(seqs, None, profile.K)
    gram_n = _gram(seqs, None, profile.N)

    def inner_w(u, v):
        return _gram_inner(gram_w, u, v)

    def inner_k(u, v):
        return _gram_inner(gram_k, u, v)

    def ratio(v) -> Fraction:
        return inner_w(v, v).re / inner_k(v, v).re

    def head_dominant(v) -> bool:
        # tail mass below 1/100: sum_{n<=K} must carry 99% of sum_{n<=N}
        return 100 * inner_k(v, v).re > 99 * _gram_inner(gram_n, v, v).re

    def select(reduced):
        """Pool the penalized reductions and pick the admissible vector of
        least weighted norm (ties: smaller ratio)."""
        pool = [list(v) for v in reduced]
        base_sigma = min(ratio(v) for v in pool)
        rungs = 2 * len(str(c.numerator // c.denominator))
        for step in range(rungs + 1):
            lam = base_sigma * 10**step

            def penalized(u, v, _lam=lam):
                return inner_w(u, v) + GaussRat(_lam) * inner_k(u, v)

            for v in _lll([list(x) for x in reduced], penalized):
                pool.append(primitivize(v))
        floor = min(ratio(v) for v in pool)
        window = [v for v in pool if ratio(v) <= c * floor]
        best = min(window, key=lambda v: (inner_w(v, v).re, ratio(v)))
        return best, floor

    unit = [GaussRat(0)] * D
    work = []
    for d in range(D):
        combo = unit[:]
        combo[d] = GaussRat(1)
        work.append(combo)

    outcome = ExtractionOutcome(
        candidates=[], sigma_min=None, sigma_second=None, sigma_stop=None
    )
    accepted: list[list[GaussRat]] = []
    first_round = True
    while work:
        reduced, ok = quasi_orthogonalize(work, inner_w, zeta)
        outcome.certified.append(ok)
        best, floor = select(reduced)
        best_sigma = ratio(best)
        if first_round:
            outcome.sigma_min = floor
            ranked = sorted(reduced, key=ratio)
            if len(ranked) > 1:
                outcome.sigma_second = ratio(ranked[1])
            first_round = False
        if not accepted:
            if not head_dominant(best):
                outcome.rejected_head_dominance = True
                outcome.sigma_stop = best_sigma
                break
        else:
            if best_sigma > c * outcome.candidates[0].sigma or not head_dominant(best):
                outcome.sigma_stop = best_sigma
                break
        vector = [GaussRat(0)] * (kb.N + 1)
        for d, coeff in enumerate(best):
            if coeff.is_zero():
                continue
            seq = seqs[d]
            for n in range(kb.N + 1):
                if not seq[n].is_zero():
                    vector[n] = vector[n] + coeff * seq[n]
        outcome.candidates.append(
            Candidate(
                vector=tuple(primitivize(vector)),
                sigma=best_sigma,
                combo=tuple(best),
            )
        )
        accepted.append(best)
        # keep only as many projected survivors as the complement can hold
        survivors = []
        kept = [list(g) for g in accepted]
        for v in sorted(reduced, key=ratio):
            if len(accepted) + len(survivors) >= D:
                break
            projected = primitivize(_project_out(v, accepted, gram_k))
            if all(z.is_zero() for z in projected):
                continue
            if _independent(kept + [projected]):
                survivors.append(projected)
                kept.append(projected)
        work = survivors
    outcome.candidates.sort(key=lambda cand: cand.sigma)
    return outcome


def _independent(vectors) -> bool:
    """Exact rank check: True iff the combo vectors are linearly independent."""
    rows = [list(v) for v in vectors]
    n = len(rows)
    cols = len(rows[0]) if rows else 0
    rank = 0
    for col in range(cols):
        pivot = next(
            (r for r in range(rank, n) if not rows[r][col].is_zero()), None
        )
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = rows[rank][col].inverse()
        for r in range(rank + 1, n):
            if not rows[r][col].is_zero():
                factor = rows[r][col] * inv
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
        if rank == n:
            return True
    return rank == n


def extract_l2(
    kb: KernelBasis,
    profile: WeightProfile,
    c: Fraction = DEFAULT_C,
    zeta: Fraction = DEFAULT_ZETA,
) -> list[Candidate]:
    """Accepted near-square-summable candidates, sorted by ratio."""
    return extract_l2_detailed(kb, profile, c, zeta).candidates
