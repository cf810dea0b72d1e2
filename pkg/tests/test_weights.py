import math

import numpy as np
import pytest
from scipy.integrate import quad
from hypothesis import given
from hypothesis import strategies as st

from mharm.errors import DomainError, InadmissibleWeightError, InvalidSpecError
from mharm.modes import GridSpec
from mharm.weights import (
    Density,
    build_weight_system,
    canonical_weights,
    density_from_record,
    gaussian_line,
    gaussian_plane,
    gaussian_poly_line,
    gaussian_poly_plane,
    log_delta,
    log_sigma,
    plane_cutoff,
)

G = GridSpec(8.0, 64, 4)


def poly_sigma_log(t, s):
    # int e^{2 xi.y} (1 + |y|^2) N(0, t) dy / (1 + 2t), by completing the square
    return 2 * t * s**2 + np.log((1 + 2 * t + 4 * t * t * s**2) / (1 + 2 * t))


def poly_delta_log(t, n):
    return 2 * t * n**2 + np.log((1 + t + 4 * t * t * n**2) / (1 + t))


def test_canonical_tables():
    t = 0.5
    W = canonical_weights(G, t)
    np.testing.assert_allclose(W.log_sigma, 2 * t * G.xi_abs() ** 2, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(W.log_delta, 2 * t * G.mode_indices**2, atol=1e-12)
    assert W.delta_table[G.M + 1] == pytest.approx(math.e, rel=1e-12)
    assert W.is_canonical


@pytest.mark.parametrize("generic", [False, True])
def test_poly_tables(generic):
    t = 0.4
    mu, nu = gaussian_poly_plane(t), gaussian_poly_line(t)
    if generic:
        mu, nu = mu.generic(), nu.generic()
    W = build_weight_system(G, mu, nu)
    np.testing.assert_allclose(W.log_sigma, poly_sigma_log(t, G.xi_abs()), rtol=1e-11, atol=1e-11)
    np.testing.assert_allclose(W.log_delta, poly_delta_log(t, G.mode_indices), atol=1e-11)
    assert not W.is_canonical


@pytest.mark.parametrize("factory", [gaussian_plane, gaussian_poly_plane])
def test_plane_densities_normalized(factory):
    d = factory(0.7)
    val, _ = quad(lambda r: 2 * math.pi * r * d(r), 0.0, np.inf, epsabs=0, epsrel=1e-13)
    assert val == pytest.approx(1.0, rel=1e-11)


@given(st.floats(0.05, 3.0))
def test_line_densities_normalized(t):
    for d in (gaussian_line(t), gaussian_poly_line(t)):
        val, _ = quad(lambda u: float(d(u)), -np.inf, np.inf, epsabs=0, epsrel=1e-13)
        assert val == pytest.approx(1.0, rel=1e-11)


def test_sigma_generic_routes_agree():
    mu = gaussian_plane(0.3)
    s = np.linspace(0, 6, 7)
    cut = plane_cutoff(mu, 6.0)
    np.testing.assert_allclose(log_sigma(mu, s, cut), 2 * 0.3 * s**2, atol=1e-12)
    np.testing.assert_allclose(log_delta(gaussian_line(0.3), np.arange(-3, 4), 20.0), 0.6 * np.arange(-3, 4) ** 2, atol=1e-12)


def test_reject_hole():
    base = gaussian_plane(0.5)
    hole = Density("hole", 2, lambda r: np.where((r > 1) & (r < 2), -np.inf, base.log_density(r)), {})
    with pytest.raises(InadmissibleWeightError, match="bounded away from zero"):
        build_weight_system(G, hole, gaussian_line(0.5))


def test_reject_divergent_sigma():
    laplace = Density("laplace", 2, lambda r: -np.asarray(r) - math.log(2 * math.pi), {})
    with pytest.raises(InadmissibleWeightError):
        build_weight_system(G, laplace, gaussian_line(0.5))


def test_reject_divergent_delta():
    cauchy = Density("cauchy", 1, lambda u: -np.log1p(u * u) - math.log(math.pi), {})
    with pytest.raises(InadmissibleWeightError):
        build_weight_system(G, gaussian_plane(0.5), cauchy)


def test_reject_phase():
    c = np.ones(G.n_modes, dtype=complex)
    c[2] = 0.9
    with pytest.raises(InadmissibleWeightError):
        build_weight_system(G, gaussian_plane(0.5), gaussian_line(0.5), phase_c=c)
    with pytest.raises(InvalidSpecError):
        build_weight_system(G, gaussian_plane(0.5), gaussian_line(0.5), phase_c=c[:3])


def test_dimension_mismatch_and_t():
    with pytest.raises(InvalidSpecError):
        build_weight_system(G, gaussian_line(0.5), gaussian_plane(0.5))
    with pytest.raises(DomainError):
        gaussian_plane(0.0)


def test_density_registry():
    d = density_from_record(1, "gaussian_poly", {"t": 0.2})
    assert d.gaussian_t == 0.2 and d.log_factor is not None
    with pytest.raises(InvalidSpecError):
        density_from_record(2, "nope", {})


def test_tables_read_only():
    W = canonical_weights(G, 0.5)
    with pytest.raises(ValueError):
        W.log_sigma[0, 0] = 0.0
