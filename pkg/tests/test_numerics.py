import math

import numpy as np
import pytest
import scipy.special
from hypothesis import given
from hypothesis import strategies as st

from mharm.errors import DomainError, InvalidSpecError, TruncationWarning
from mharm.numerics import (
    QuadratureSpec,
    bessel_asymptotic_check,
    bessel_bridge_check,
    bessel_I0,
    bessel_I0e,
    circle_average,
    gauss_hermite_integrate,
    hermite_rule,
    legendre_rule,
    lifted_radial_fourier,
    log_bessel_I0,
)
from oracles import gaussian_moment_2d, i0_series


def test_quadrature_spec_validation():
    with pytest.raises(InvalidSpecError):
        QuadratureSpec(hermite_nodes=2)
    with pytest.raises(InvalidSpecError):
        QuadratureSpec(radial_cutoff=0.0)
    assert QuadratureSpec().doubled().radial_nodes == 2 * QuadratureSpec().radial_nodes


@pytest.mark.parametrize("t", [0.1, 1.0, 7.5])
@pytest.mark.parametrize("d", [1, 2])
def test_hermite_normalized(t, d):
    assert gauss_hermite_integrate(lambda y: np.ones(len(y)), t, d) == pytest.approx(1.0, rel=1e-14)


def test_hermite_second_moment():
    val = gauss_hermite_integrate(lambda y: np.sum(y**2, axis=1), 1.0, 2)
    assert val == pytest.approx(gaussian_moment_2d(1.0), rel=1e-14)


@given(st.floats(0.05, 2.0), st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_hermite_exponential_moment(t, a, b):
    # closed-form Gaussian integral: E exp(2 x.y) = exp(2 t |x|^2)
    val = gauss_hermite_integrate(lambda y: np.exp(2 * (a * y[:, 0] + b * y[:, 1])), t, 2, nodes=48)
    assert val == pytest.approx(math.exp(2 * t * (a * a + b * b)), rel=1e-11)


def test_hermite_doubling_stable():
    f = lambda y: (1 + y[:, 0] ** 2) ** 3
    assert gauss_hermite_integrate(f, 0.7, 1, 16) == pytest.approx(gauss_hermite_integrate(f, 0.7, 1, 32), rel=1e-12)


def test_rule_errors():
    with pytest.raises(InvalidSpecError):
        hermite_rule(0, 1.0)
    with pytest.raises(DomainError):
        hermite_rule(4, -1.0)
    with pytest.raises(InvalidSpecError):
        legendre_rule(0, 0, 1)


def test_legendre_polynomial_exactness():
    x, w = legendre_rule(6, 0.0, 2.0)
    assert np.sum(w * x**11) == pytest.approx(2**12 / 12, rel=1e-13)


def test_circle_average_trivial_cases():
    assert circle_average(lambda y: np.full(len(y), 3.5), 1.2) == pytest.approx(3.5)
    assert abs(circle_average(lambda y: y[:, 0] ** 3 + y[:, 1], 2.0)) < 1e-14
    with pytest.raises(DomainError):
        circle_average(lambda y: y[:, 0], 0.0)


@pytest.mark.parametrize("r", [0.3, 1.0, 2.5])
def test_circle_average_bessel_bridge(r):
    xi = np.array([0.7, -1.1])
    s = np.hypot(*xi)
    val = circle_average(lambda y: np.exp(-2 * y @ xi), r)
    assert val == pytest.approx(i0_series(2 * r * s), rel=1e-12)


def test_bessel_examples():
    assert bessel_I0(0.0) == 1.0
    assert bessel_I0(1.0) == pytest.approx(1.2660658778, abs=1e-10)
    assert bessel_I0(1.0) == pytest.approx(i0_series(1.0), rel=1e-15)


@pytest.mark.parametrize("x", [50.0, 100.0])
def test_bessel_asymptotic_ratio(x):
    assert bessel_I0e(x) * math.sqrt(2 * math.pi * x) == pytest.approx(1.0, rel=1e-2)
    assert bessel_asymptotic_check(x).passed


@given(st.floats(0.0, 19.9))
def test_bessel_series_region(x):
    assert bessel_I0(x) == pytest.approx(i0_series(x, 60), rel=1e-13)


@given(st.floats(0.0, 700.0))
def test_bessel_scaled_matches_scipy(x):
    assert bessel_I0e(x) == pytest.approx(scipy.special.i0e(x), rel=1e-13)
    assert log_bessel_I0(x) == pytest.approx(math.log(scipy.special.i0e(x)) + x, rel=1e-13, abs=1e-13)


def test_bessel_domain():
    with pytest.raises(DomainError):
        bessel_I0(-1.0)
    with pytest.raises(DomainError):
        bessel_I0e(np.nan)


def test_bridge_check():
    rep = bessel_bridge_check(1.0, np.linspace(0, 10, 21))
    assert rep.passed and rep.rel_err < 1e-12


@pytest.mark.parametrize("m", [0, 1, 2, 3])
@pytest.mark.parametrize("s", [0.5, 1.3])
def test_lifted_gaussian(m, s):
    # unitary FT of exp(-s r^2) in R^d is (2s)^{-d/2} exp(-a^2 / 4s) for every d
    d = 2 + 2 * m
    a = np.linspace(0.0, 6.0, 25)
    got = lifted_radial_fourier(lambda r: np.exp(-s * r * r), m, a, cutoff=12.0 / math.sqrt(s), nodes=160)
    np.testing.assert_allclose(got, (2 * s) ** (-d / 2) * np.exp(-a * a / (4 * s)), rtol=1e-10, atol=1e-14)


def test_lifted_twice_is_identity():
    g = lambda r: np.exp(-0.5 * r * r) * (1 + r * r)
    r_out = np.linspace(0.0, 3.0, 13)
    once = lambda a: lifted_radial_fourier(g, 1, a, cutoff=14.0, nodes=200)
    twice = lifted_radial_fourier(once, 1, r_out, cutoff=14.0, nodes=200)
    np.testing.assert_allclose(twice, g(r_out), rtol=1e-6, atol=1e-12)


def test_lifted_zero_and_warning():
    np.testing.assert_array_equal(lifted_radial_fourier(lambda r: 0 * r, 2, [0.5, 1.0], 5.0), 0.0)
    with pytest.warns(TruncationWarning):
        lifted_radial_fourier(lambda r: np.exp(-0.01 * r), 0, [1.0], 5.0)
