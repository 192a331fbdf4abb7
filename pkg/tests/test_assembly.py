"""Band matrix assembly against independent oracles."""

import random
from fractions import Fraction as F

import numpy as np
import pytest

from bandode.assembly import (
    AssemblyError,
    PivotError,
    bandwidth,
    build,
    closed_form_leading,
    expand_column,
    pivot_start,
)
from bandode.basis import eval_exact, eval_psi, BasisIndex, inv_sort_map, sort_map, singleton
from bandode.diffop import PolyGR, make_problem
from bandode.exact import GaussRat


def weber(nu=F(0), k0=3, k0d=1):
    return make_problem(
        [PolyGR([2 * nu + 1, 0, -1]), PolyGR(), PolyGR([1])], k0=k0, k0d=k0d
    )


def test_weber_band_parameters():
    problem = weber()
    assert bandwidth(problem) == 6
    assert pivot_start(problem) == 1
    matrix = build(problem, 30)
    assert matrix.ell0 == 6 and matrix.j0 == 1


def test_expand_column_identity_operator():
    problem = make_problem([PolyGR([1])], k0=4, k0d=4)
    out = expand_column(problem, 7)
    assert out.terms == {sort_map(4, 7): GaussRat(1)}


def test_expand_column_x_operator():
    problem = make_problem([PolyGR([0, 1])], k0=4, k0d=3)
    n = inv_sort_map(4, 0)
    out = expand_column(problem, n)
    assert out.coefficient(0) == GaussRat(F(1, 2))
    assert out.coefficient(1) == GaussRat(F(1, 2))


def test_expand_column_derivative_pointwise():
    # first derivative operator, checked against exact evaluation
    problem = make_problem([PolyGR(), PolyGR([1])], k0=0, k0d=-1)
    assert bandwidth(problem) == 3
    rng = random.Random(12)
    for n in (0, 1, 4):
        expansion = expand_column(problem, n)
        assert expansion.level == -1
        idx = BasisIndex(0, sort_map(0, n))
        for _ in range(20):
            x = F(rng.randint(-15, 15), rng.randint(1, 15))
            from bandode.basis import eval_d_exact

            assert eval_exact(expansion, x) == eval_d_exact(idx, x)


def test_band_support_exact():
    matrix = build(weber(), 40)
    for m in range(41):
        lo, hi = matrix.row_span(m)
        for n in range(41):
            if n < lo or n > hi:
                assert matrix.entry(m, n).is_zero()


def test_vanishing_rows_below_output_level():
    # rows m <= k0d - 1 vanish at columns n >= k0 (and the transpose
    # pattern does not hold: b_3^0 is nonzero for this operator)
    matrix = build(weber(), 40)
    for m in range(0, 1):
        for n in range(3, 41):
            assert matrix.entry(m, n).is_zero()
    assert not matrix.entry(3, 0).is_zero()


def test_closed_form_leading_agreement():
    problem = weber()
    matrix = build(problem, 60)
    lower = 2 * 2 + 3 + max(-1, 0)  # 2M + k0 + max(-k0d, 0)
    for r in range(lower, 61):
        assert matrix.entry(r - 6, r) == closed_form_leading(problem, r)
        assert not closed_form_leading(problem, r).is_zero()
    with pytest.raises(ValueError):
        closed_form_leading(problem, lower - 1)


def test_closed_form_growth_bound():
    # |b_m^n| is bounded by a degree-M polynomial in n: calibrate the
    # constant on small columns and verify across the built range
    problem = weber()
    N = 60
    matrix = build(problem, N)
    M = problem.M

    def column_max_sq(n):
        return max(
            (matrix.entry(m, n).abs_sq() for m in range(N + 1)), default=F(0)
        )

    scale = max(column_max_sq(n) / (n + 1) ** (2 * M) for n in range(12))
    for n in range(N + 1):
        assert column_max_sq(n) <= 4 * scale * (n + 1) ** (2 * M)


def test_quadrature_oracle_small_indices():
    problem = weber()
    matrix = build(problem, 20)
    size = 2**15
    theta = -np.pi + (np.arange(size) + 0.5) * (2 * np.pi / size)
    x = np.tan(theta / 2)
    dx = 0.5 * (1 + x * x)

    def e_fun(k, n):
        nd = sort_map(k, n)
        return np.pi**-0.5 * (x + 1j) ** (-(k + 1)) * ((x - 1j) / (x + 1j)) ** nd

    h = 1e-5
    for n in range(0, 13, 3):

        def e_at(points):
            nd = sort_map(3, n)
            return np.pi**-0.5 * (points + 1j) ** (-4) * (
                (points - 1j) / (points + 1j)
            ) ** nd

        second = (e_at(x + h) - 2 * e_at(x) + e_at(x - h)) / h**2
        image = second + (1 - x * x) * e_at(x)
        for m in range(0, 13, 4):
            integrand = image * np.conj(e_fun(1, m)) * (x * x + 1) * dx
            value = integrand.sum() * (2 * np.pi / size)
            built = matrix.entry(m, n)
            assert abs(value - complex(built.re, built.im)) <= 1e-6 * (
                1 + abs(complex(built.re, built.im))
            )


def test_conjugate_reflection_symmetry():
    # for a real-coefficient operator the reflected column expansion equals
    # the conjugated expansion
    problem = weber()
    k0, k0d = problem.k0, problem.k0d
    for n in range(12):
        nd = sort_map(k0, n)
        reflected = inv_sort_map(k0, -nd - k0 - 1)
        lhs = expand_column(problem, reflected)
        rhs = expand_column(problem, n).conjugated_reflection()
        assert lhs == rhs


def test_pivot_error_reported():
    # an operator whose leading band entry vanishes on needed rows:
    # p_M = x**2 + 1 makes p_M(+-i) = 0, killing the closed-form pivot
    problem = make_problem([PolyGR([1]), PolyGR(), PolyGR([1, 0, 1])], k0=4, k0d=0)
    with pytest.raises(PivotError) as err:
        build(problem, 30)
    assert err.value.row >= 0


def test_n_too_small_rejected():
    with pytest.raises(AssemblyError):
        build(weber(), 4)


def test_dump_lines_format():
    matrix = build(weber(), 8)
    lines = list(matrix.dump_lines())
    assert lines
    for line in lines[:5]:
        m, n, re, im = line.split(" ")
        assert 0 <= int(m) <= 8 and 0 <= int(n) <= 8
        F(re), F(im)  # parses as exact rationals
