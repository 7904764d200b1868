"""Numerics layer: Bessel contracts against independent oracles, bracketed
root finding, and the damped Gauss-Newton engine."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nanotrap.errors import BracketError, DegenerateFitError, DomainError, EvaluationError
from nanotrap.numerics import bessel_j, bessel_k, find_root, least_squares


def series_j(order, x, terms=60):
    """Power-series oracle for J_n(x), independent of the implementation."""
    total = 0.0
    for k in range(terms):
        term = (-1) ** k * (x / 2.0) ** (2 * k + order)
        for m in range(1, k + 1):
            term /= m
        for m in range(1, k + order + 1):
            term /= m
        total += term
    return total


def quadrature_k(order, x, n=40001, t_max=40.0):
    """Integral-representation oracle: K_v(x) = int_0^inf exp(-x cosh t) cosh(vt) dt."""
    t = np.linspace(0.0, t_max, n)
    integrand = np.exp(-x * np.cosh(t) + np.log(np.cosh(order * t)))
    return np.trapezoid(integrand, t)


class TestBesselJ:
    def test_origin(self):
        assert bessel_j(0, 0.0) == 1.0

    def test_first_zero_of_j0(self):
        # locate the zero of the series oracle by bisection, then compare
        lo, hi = 2.0, 3.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if series_j(0, lo) * series_j(0, mid) <= 0:
                hi = mid
            else:
                lo = mid
        zero = 0.5 * (lo + hi)
        assert zero == pytest.approx(2.404826, abs=1e-6)
        assert abs(bessel_j(0, zero)) < 1e-6

    def test_against_series_oracle(self):
        assert bessel_j(1, 1.0) == pytest.approx(0.4400506, abs=1e-7)
        for order in (0, 1, 2, 3, 5):
            for x in (0.3, 1.7, 6.5, 14.0):
                assert bessel_j(order, x) == pytest.approx(
                    series_j(order, x, terms=80), rel=1e-10, abs=1e-14
                )

    def test_wronskian_like_derivative_identity(self):
        # J0'(x) = -J1(x) via central differences on [0.5, 10]
        xs = np.linspace(0.5, 10.0, 41)
        h = 1e-6
        d = (bessel_j(0, xs + h) - bessel_j(0, xs - h)) / (2 * h)
        assert np.max(np.abs(d + bessel_j(1, xs))) < 1e-9

    def test_rejects_non_finite(self):
        with pytest.raises(DomainError):
            bessel_j(0, np.inf)


class TestBesselK:
    def test_against_quadrature_oracle(self):
        assert bessel_k(0, 1.0) == pytest.approx(0.4210244, abs=1e-7)
        assert bessel_k(1, 1.0) == pytest.approx(0.6019072, abs=1e-7)
        for order in (0, 1, 2, 5):
            for x in (0.05, 0.8, 3.0, 12.0):
                assert bessel_k(order, x) == pytest.approx(
                    quadrature_k(order, x), rel=1e-8
                )

    def test_monotone_decreasing(self):
        assert bessel_k(0, 2.0) < bessel_k(0, 1.0)

    def test_domain(self):
        with pytest.raises(DomainError):
            bessel_k(0, 0.0)
        with pytest.raises(DomainError):
            bessel_k(0, -1.0)


class TestFindRoot:
    def test_cosine(self):
        assert find_root(np.cos, 1.0, 2.0, 1e-12) == pytest.approx(np.pi / 2, abs=1e-11)

    def test_sqrt2(self):
        assert find_root(lambda x: x * x - 2.0, 0.0, 2.0, 1e-12) == pytest.approx(
            np.sqrt(2.0), abs=1e-11
        )

    def test_j0_zero(self):
        root = find_root(lambda x: bessel_j(0, x), 2.0, 3.0, 1e-9)
        assert root == pytest.approx(2.404826, abs=1e-6)

    def test_endpoint_order_independent(self):
        f = lambda x: x**3 - 1.7
        a = find_root(f, 0.0, 2.0, 1e-13)
        b = find_root(lambda x: -f(x), 0.0, 2.0, 1e-13)
        assert a == pytest.approx(b, abs=1e-12)

    def test_no_bracket(self):
        with pytest.raises(BracketError):
            find_root(lambda x: x * x + 1.0, -1.0, 1.0, 1e-9)

    def test_non_finite_evaluation(self):
        with pytest.raises(EvaluationError):
            find_root(lambda x: np.nan, 0.0, 1.0, 1e-9)


def line(params, x):
    return params[0] * np.asarray(x) + params[1]


def lorentzian_dip(params, x):
    amp, center, width = params
    return 1.0 - amp / (1.0 + 4.0 * (np.asarray(x) - center) ** 2 / width**2)


class TestLeastSquares:
    def test_exact_line_recovery(self):
        x = np.linspace(-3, 5, 30)
        data = [(xi, 2.0 * xi + 1.0, 1.0) for xi in x]
        res = least_squares(line, [0.0, 0.0], data)
        assert res.converged
        assert np.allclose(res.parameters, [2.0, 1.0], atol=1e-8)
        assert res.residual_norm < 1e-10

    def test_lorentzian_dip_recovery(self):
        truth = np.array([0.6, 1.2e6, 5e6])
        x = np.linspace(-20e6, 20e6, 60)
        y = lorentzian_dip(truth, x)
        data = list(zip(x, y, np.ones_like(x)))
        res = least_squares(lorentzian_dip, truth * 1.15, data)
        assert np.max(np.abs(res.parameters - truth) / truth) < 1e-6

    @settings(max_examples=25, deadline=None)
    @given(
        st.tuples(
            st.floats(-0.19, 0.19), st.floats(-0.19, 0.19), st.floats(-0.19, 0.19)
        )
    )
    def test_recovery_from_any_nearby_start(self, rel_offsets):
        truth = np.array([0.6, 1.2e6, 5e6])
        x = np.linspace(-20e6, 20e6, 60)
        y = lorentzian_dip(truth, x)
        data = list(zip(x, y, np.ones_like(x)))
        start = truth * (1.0 + np.array(rel_offsets))
        res = least_squares(lorentzian_dip, start, data)
        assert np.max(np.abs(res.parameters - truth) / truth) < 1e-6

    def test_covariance_symmetric_psd(self):
        rng = np.random.Generator(np.random.Philox(key=5))
        x = np.linspace(0, 10, 40)
        y = 2.0 * x + 1.0 + rng.normal(0, 0.1, x.size)
        res = least_squares(line, [1.5, 0.5], list(zip(x, y, np.full_like(x, 100.0))))
        cov = res.covariance
        assert np.allclose(cov, cov.T)
        assert np.all(np.linalg.eigvalsh(cov) >= -1e-18)

    def test_weights_must_be_positive(self):
        with pytest.raises(DomainError):
            least_squares(line, [0, 0], [(0.0, 1.0, 0.0), (1.0, 2.0, 1.0)])

    def test_underdetermined_rejected(self):
        with pytest.raises(DomainError):
            least_squares(line, [0, 0], [(0.0, 1.0, 1.0)])

    def test_non_finite_model(self):
        def bad(params, x):
            return np.full(np.asarray(x).shape, np.nan)

        with pytest.raises(EvaluationError):
            least_squares(bad, [1.0], [(0.0, 1.0, 1.0), (1.0, 2.0, 1.0)])

    def test_singular_problem_raises(self):
        def degenerate(params, x):
            return (params[0] + params[1]) * np.ones_like(np.asarray(x, dtype=float))

        data = [(0.0, np.nan, 1.0), (1.0, np.nan, 1.0), (2.0, np.nan, 1.0)]
        with pytest.raises((DegenerateFitError, EvaluationError)):
            least_squares(degenerate, [1.0, -1.0], data)

    def test_residual_norm_nonincreasing_reported(self):
        x = np.linspace(0, 1, 20)
        rng = np.random.Generator(np.random.Philox(key=9))
        y = 3.0 * x - 0.5 + rng.normal(0, 0.02, x.size)
        res = least_squares(line, [0.0, 0.0], list(zip(x, y, np.ones_like(x))))
        start_norm = np.linalg.norm(y - line([0.0, 0.0], x))
        assert res.residual_norm <= start_norm
