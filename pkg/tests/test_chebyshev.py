import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from numpy.polynomial import chebyshev as npcheb
from scipy.integrate import quad

from nisqtda.chebyshev import (
    MAX_MINIMIZING_DEGREE, ErrorBudget, cheb_from_powers, cheb_to_power_matrix, choose_params,
    estimate_betti, make_series, minimizing_bound, minimizing_poly_powers, shot_noise_bound,
    step_coeffs,
)
from nisqtda.complexes import AdjacencyGraph, enumerate_simplices, preset_complex
from nisqtda.errors import EmptyComplexError
from nisqtda.moments import MomentMode, MomentTable, build_moment_table, exact_moments
from nisqtda.oracle import exact_betti, hodge_laplacian


def test_step_examples():
    s = step_coeffs(3, 0.0, 1.0)
    assert s.coeffs[0] == pytest.approx(0.5)
    assert s.coeffs[1] == pytest.approx(2 / math.pi)
    full = step_coeffs(5, -1.0, 1.0)
    assert full.coeffs[0] == pytest.approx(1.0)
    np.testing.assert_allclose(full.coeffs[1:], 0, atol=1e-15)
    with pytest.raises(ValueError):
        step_coeffs(3, 0.5, 0.2)


@pytest.mark.parametrize("a, b", [(0.1, 1.0), (-0.3, 0.6), (0.05, 0.9)])
def test_step_coeffs_match_quadrature(a, b):
    s = step_coeffs(12, a, b)
    for j, c in enumerate(s.coeffs):
        # c_j = (2 - [j == 0]) / pi * integral over t in [acos b, acos a] of cos(j t)
        val, _ = quad(lambda t: math.cos(j * t), math.acos(b), math.acos(a))
        assert c == pytest.approx((2 - (j == 0)) / math.pi * val, abs=1e-12)


def test_step_series_converges_away_from_jumps():
    x = np.linspace(-1, 1, 4001)
    a, b = 0.2, 0.8
    target = ((x >= a) & (x <= b)).astype(float)
    errs = []
    for m in (10, 40, 160):
        collar = (b - a) / m
        far = (np.abs(x - a) > collar) & (np.abs(x - b) > collar)
        errs.append(np.abs(step_coeffs(m, a, b)(x) - target)[far].max())
    assert errs[0] > errs[2]


def test_cheb_from_powers_examples():
    assert cheb_from_powers([1, 0.5], 1) == pytest.approx(0.5)
    assert cheb_from_powers([1, 0.5, 0.3], 2) == pytest.approx(-0.4)
    assert cheb_from_powers([1, 0.3, 0.09, 0.027], 3) == pytest.approx(-0.792)
    assert cheb_from_powers([0.7], 0) == 0.7
    with pytest.raises(ValueError):
        cheb_from_powers([1, 0.5], 2)


def test_cheb_power_matrix_matches_numpy():
    mat = cheb_to_power_matrix(25)
    for j in range(26):
        unit = np.zeros(j + 1)
        unit[j] = 1
        np.testing.assert_allclose(mat[j, : j + 1], npcheb.cheb2poly(unit), rtol=0, atol=0)


def test_scalar_chebyshev_identity():
    # exact powers of each grid point isolate the integer coefficients from input rounding
    for x in np.linspace(-1, 1, 41):
        powers = [Fraction(float(x)) ** e for e in range(31)]
        for j in range(31):
            assert abs(cheb_from_powers(powers, j) - math.cos(j * math.acos(x))) <= 1e-9


def test_scalar_chebyshev_identity_float_powers():
    # float inputs lose ~1e-6 by j=30 near |x|=1 (power-basis coefficients reach ~1e11)
    for x in np.linspace(-1, 1, 41):
        powers = x ** np.arange(21)
        for j in range(21):
            assert abs(cheb_from_powers(powers, j) - math.cos(j * math.acos(x))) <= 1e-9


@pytest.mark.parametrize("m", [1, 2, 3, 5, 8])
@pytest.mark.parametrize("delta", [0.1, 0.25, 0.5])
def test_minimizing_poly_matches_symbolic(m, delta):
    x = sympy.symbols("x")
    d = sympy.Rational(str(delta))
    alpha = 1 - d
    expr = sympy.chebyshevt(m, (1 - x) / alpha) / sympy.chebyshevt(m, 1 / alpha)
    want = [float(c) for c in reversed(sympy.Poly(sympy.expand(expr), x).all_coeffs())]
    np.testing.assert_allclose(minimizing_poly_powers(m, delta).coeffs, want, rtol=1e-9, atol=1e-12)


def test_minimizing_small_cases():
    np.testing.assert_allclose(minimizing_poly_powers(1, 0.5).coeffs, [1, -1], atol=1e-15)
    np.testing.assert_allclose(minimizing_poly_powers(2, 0.5).coeffs, [1, -16 / 7, 8 / 7], atol=1e-14)
    for m in (1, 4, 9, 20):
        assert minimizing_poly_powers(m, 0.2)(0.0) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        minimizing_poly_powers(MAX_MINIMIZING_DEGREE + 1, 0.2)
    with pytest.raises(ValueError):
        minimizing_poly_powers(3, 1.0)


def test_minimizing_bound_on_grid():
    for delta in (0.05, 0.1, 0.25):
        grid = np.linspace(delta, 1.0, 10_000)
        for m in range(1, 21):
            sup = np.abs(minimizing_poly_powers(m, delta)(grid)).max()
            assert sup <= minimizing_bound(m, delta) * (1 + 1e-9)


def test_choose_params_examples():
    p = choose_params(0.1, 0.1, 0.25)
    assert (p.n_v, p.m) == (300, 8)
    loose = choose_params(0.99, 0.5, 0.9)
    assert loose.m == 1 and loose.n_v == 2
    ms = [choose_params(0.1, 0.1, d).m for d in (0.1, 0.3, 0.6, 0.9, 0.99)]
    assert ms == sorted(ms, reverse=True)
    for bad in ((0, 0.1, 0.1), (0.1, 1.0, 0.1), (0.1, 0.1, 1.0)):
        with pytest.raises(ValueError):
            choose_params(*bad)


def test_shot_noise_bound_examples():
    assert shot_noise_bound(5, 8, 0.01, n=10).value == pytest.approx(0.025)
    assert shot_noise_bound(5, 8, 0.0).value == 0.0
    assert shot_noise_bound(5, 8, 0.01, n=8).valid is False
    assert shot_noise_bound(5, 8, 0.01, n=10).valid is True


def test_error_budget_total():
    b = ErrorBudget(0.1, 0.2, 0.05)
    assert b.total == pytest.approx(0.35)


def test_estimate_square_k1_step():
    g = preset_complex("square")
    delta = exact_betti(g, 1).delta
    p = choose_params(0.1, 0.1, delta)
    table = build_moment_table(g, 1, p.m, p.n_v, seed=0)
    est = estimate_betti(table, make_series("step", p.m, delta))
    assert abs(est.chi_k - 0.25) <= 0.1
    assert est.s_k_estimate == pytest.approx(4.0)
    assert est.rank_estimate == pytest.approx((1 - est.chi_k) * 4.0)


def test_estimate_empty_graph_is_all_kernel():
    g = AdjacencyGraph.empty(5)
    table = build_moment_table(g, 0, 4, 10, seed=1)
    est = estimate_betti(table, make_series("minimizing", 4, 0.5))
    assert est.chi_k == pytest.approx(1.0)
    assert est.beta_estimate == pytest.approx(5.0)
    # the truncated step series leaks f(0) != 0 at the zero eigenvalue
    leaks = []
    for m in (4, 16, 64):
        table = build_moment_table(g, 0, m, 4, seed=1)
        series = make_series("step", m, 0.5)
        est = estimate_betti(table, series)
        assert est.chi_raw == pytest.approx(1.0 - float(series(0.0)), abs=1e-12)
        leaks.append(1.0 - est.chi_k)
    assert leaks[-1] < leaks[0] and leaks[-1] < 0.05


def test_estimate_errors():
    g = preset_complex("square")
    table = build_moment_table(g, 2, 3, 4, seed=0)
    with pytest.raises(EmptyComplexError):
        estimate_betti(table, make_series("step", 3, 0.5))
    table = build_moment_table(g, 1, 3, 4, seed=0)
    with pytest.raises(ValueError):
        estimate_betti(table, make_series("step", 5, 0.5))
    with pytest.raises(ValueError):
        make_series("gaussian", 3, 0.5)


@pytest.mark.parametrize("name, k", [("two-squares", 0), ("cube", 1), ("three-squares", 1), ("square", 0)])
@pytest.mark.parametrize("kind", ["step", "minimizing"])
def test_full_basis_estimator_is_polynomial_trace(name, k, kind):
    g = preset_complex(name)
    m = 6
    delta = exact_betti(g, k).delta
    series = make_series(kind, m, delta)
    mu = exact_moments(range(1 << g.n), g, k, m)
    table = MomentTable(g.n, k, m, 1 << g.n, mu)
    est = estimate_betti(table, series)
    lam = np.linalg.eigvalsh(hodge_laplacian(g, k)) / g.n
    s_k = enumerate_simplices(g, k).count
    traced = float(series(lam).sum())
    want_rank = traced if kind == "step" else s_k - traced
    assert est.chi_raw * s_k == pytest.approx(s_k - want_rank, abs=1e-8)


def test_shot_budget_reported_for_sampled_tables():
    g = preset_complex("square")
    table = build_moment_table(g, 1, 2, 5, MomentMode.sampled(100), seed=0)
    est = estimate_betti(table, make_series("step", 2, 0.5))
    assert est.budget.shot_error > 0 and est.budget.shot_bound_valid
    exact = estimate_betti(build_moment_table(g, 1, 2, 5, seed=0), make_series("step", 2, 0.5))
    assert exact.budget.shot_error == 0
