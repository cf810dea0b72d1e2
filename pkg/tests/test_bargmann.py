import math

import numpy as np
import pytest

from mharm.bargmann import (
    PSI_SCALE,
    bargmann_transform,
    bergman_mode_norms_sq,
    bergman_norm_sq,
    chi_eval,
    compact_bound_check,
    generalized_isometry_check,
    generalized_transform,
    heat_convolve,
    heat_kernel_eval,
    heat_multiplier,
    invert_multiplier,
    isometry_check,
    mode_identity_check,
    phi_eval,
    psi_eval,
    reconstruction_check,
)
from mharm.errors import DomainError, NonInvertibleSymbolError
from mharm.generators import make_bandlimited, make_heat, make_rough, make_separable
from mharm.group import ComplexGroupPoint, GroupElement
from mharm.modes import GridSpec, ModeStack, l2_norm_sq, spatial_transform
from mharm.numerics import QuadratureSpec
from mharm.weights import build_weight_system, canonical_weights, gaussian_line, gaussian_plane, gaussian_poly_line, gaussian_poly_plane
from oracles import theta_series

Q = QuadratureSpec()


def gauss(x1, x2):
    return np.exp(-(x1**2 + x2**2) / 2)


def test_heat_kernel_value():
    assert heat_kernel_eval(1.0, GroupElement.identity()) == pytest.approx(theta_series(1.0, 0.0, 6) / (4 * math.pi), rel=1e-14)
    assert heat_kernel_eval(1.0, GroupElement.identity()) == pytest.approx(0.141062, abs=1e-6)


def test_heat_kernel_circle_mean():
    g = lambda a: GroupElement((0.3, -0.4), a)
    a = 2 * math.pi * np.arange(64) / 64
    mean = np.mean([heat_kernel_eval(0.5, g(x)) for x in a])
    assert mean == pytest.approx(math.exp(-0.25 / 2.0) / (2 * math.pi), rel=1e-13)


@pytest.mark.parametrize("t", [0.25, 1.0])
def test_heat_kernel_positive(t):
    rng = np.random.default_rng(0)
    for _ in range(400):
        assert heat_kernel_eval(t, GroupElement(rng.uniform(-3, 3, 2), rng.uniform(-math.pi, math.pi))) >= 0.0
    with pytest.raises(DomainError):
        heat_kernel_eval(0.0, GroupElement.identity())


def test_heat_convolve_small_time(grid):
    f = make_heat(grid, 0.5, seed=1)
    g = heat_convolve(f, 1e-6)
    assert math.sqrt(l2_norm_sq(ModeStack(grid, g.modes - f.modes)) / l2_norm_sq(f)) <= 1e-4


def test_heat_semigroup(grid):
    f = make_heat(grid, 0.5, seed=2)
    a = heat_convolve(heat_convolve(f, 0.2), 0.3)
    b = heat_convolve(f, 0.5)
    assert np.max(np.abs(a.modes - b.modes)) <= 1e-12 * np.max(np.abs(b.modes))


def test_narrow_gaussian_approaches_kernel():
    g = GridSpec(8.0, 256, 1)
    t = 0.5
    x1, x2 = g.x_mesh()
    p_t = np.exp(-(x1**2 + x2**2) / (4 * t)) / (4 * math.pi * t)
    dist = []
    for eps in (0.04, 0.01):
        narrow = make_separable(g, lambda a, b: np.exp(-(a**2 + b**2) / (4 * eps)) / (4 * math.pi * eps), 0)
        out = heat_convolve(narrow, t).mode(0)
        # heat kernels compose: p_eps * p_t = p_{t + eps}
        exact = np.exp(-(x1**2 + x2**2) / (4 * (t + eps))) / (4 * math.pi * (t + eps))
        np.testing.assert_allclose(out, exact, atol=1e-12)
        dist.append(np.max(np.abs(out - p_t)))
    assert dist[1] < dist[0] / 3


def test_bargmann_restriction(grid):
    f = make_heat(grid, 0.5, seed=3)
    B = bargmann_transform(f, 0.4)
    assert np.max(np.abs(B.restrict().modes - heat_convolve(f, 0.4).modes)) < 1e-14


@pytest.mark.parametrize("m", [0, 2])
def test_bargmann_gaussian_continuation(grid, m):
    # exp(-|x|^2/2) * p_t = exp(-|x|^2 / 2(1+2t)) / (1+2t), continued to z = (i s, 0)
    t, s = 0.5, 1.0
    B = bargmann_transform(make_separable(grid, gauss, m), t)
    p = ComplexGroupPoint((1j * s, 0.0), 0.2, 0.5)
    expected = math.exp(s * s / (2 * (1 + 2 * t))) / (1 + 2 * t) * math.exp(-m * m * t) * p.w**m
    assert B(p) == pytest.approx(expected, rel=1e-10)


def test_bergman_zero(grid):
    B = bargmann_transform(ModeStack.zeros(grid), 0.5)
    assert bergman_norm_sq(B, canonical_weights(grid, 0.5), Q) == 0.0


def test_mode_identity(grid):
    rep = mode_identity_check(make_heat(grid, 0.5, seed=1), 0.5, Q)
    assert rep.passed and rep.rel_err <= 1e-6


def test_mode_norms_match_l2(grid):
    f = make_heat(grid, 0.5, seed=4)
    W = canonical_weights(grid, 0.5)
    per_mode = bergman_mode_norms_sq(bargmann_transform(f, 0.5), W, Q)
    exact = spatial_transform(f).mode_norms_sq()
    np.testing.assert_allclose(per_mode, exact, rtol=1e-8, atol=1e-9 * exact.sum())


def test_isometry_bandlimited():
    g = GridSpec(24.0, 128, 8)
    f = make_bandlimited(g, 2.0, 1, steepness=1.0)
    assert isometry_check(f, 0.5, Q).rel_err <= 1e-2
    assert isometry_check(f, 0.5, Q.doubled()).rel_err <= 1e-4


def test_isometry_homogeneous(grid):
    f = make_heat(grid, 0.5, seed=2)
    assert isometry_check(2 * f, 0.5, Q).rel_err == pytest.approx(isometry_check(f, 0.5, Q).rel_err, rel=1e-6, abs=1e-15)
    assert isometry_check(ModeStack.zeros(grid), 0.5, Q).passed


def test_psi_canonical(grid):
    t = 0.5
    W = canonical_weights(grid, t)
    for z in ([0.0, 0.0], [0.3 + 0.2j, -0.4 + 0.1j], [1.0, 0.5j]):
        z = np.asarray(z, dtype=complex)
        assert psi_eval(W, z) == pytest.approx(math.pi / t * np.exp(-(z @ z) / (4 * t)), rel=1e-10)
    assert PSI_SCALE == pytest.approx(4 * math.pi**2)


def test_chi_and_phi(grid):
    W = canonical_weights(grid, 0.5)
    v = chi_eval(W, 1.0)
    assert v.real > 0 and abs(v.imag) < 1e-15
    assert phi_eval(W, [0.0, 0.0], 1.0) == pytest.approx(psi_eval(W, [0, 0]) * v)
    with pytest.raises(DomainError):
        chi_eval(W, 0)


def test_phi_square_integrable_per_mode(grid):
    W = canonical_weights(grid, 0.5)
    mult = W.multiplier()
    assert np.all(np.isfinite(np.sum(np.abs(mult) ** 2, axis=(1, 2))))


def test_canonical_generalized_matches_heat(grid):
    W = canonical_weights(grid, 0.5)
    np.testing.assert_allclose(W.multiplier(), heat_multiplier(grid, 0.5), rtol=1e-12, atol=1e-300)


def test_generalized_single_mode_structure(grid):
    t, m = 0.5, -1
    rng = np.random.default_rng(5)
    c = np.exp(1j * rng.uniform(0, 2 * math.pi, grid.n_modes))
    W = build_weight_system(grid, gaussian_poly_plane(t), gaussian_poly_line(t), phase_c=c)
    f = make_separable(grid, gauss, m)
    C = generalized_transform(f, W)
    p = ComplexGroupPoint((0.2 + 0.1j, -0.3j), 0.1, 0.7)
    # (g * psi)(z) with the plane factor alone
    plain = build_weight_system(grid, gaussian_poly_plane(t), gaussian_poly_line(t))
    g_psi = generalized_transform(f, plain).mode_values(np.array([p.z]))[m + grid.M, 0] * math.exp(0.5 * plain.log_delta[m + grid.M])
    expected = g_psi * c[m + grid.M] * math.exp(-0.5 * W.log_delta[m + grid.M]) * p.w**m
    assert C(p) == pytest.approx(expected, rel=1e-10)


def test_phases_do_not_change_norm(grid):
    t = 0.5
    f = make_heat(grid, t, seed=1)
    rng = np.random.default_rng(1)
    c = np.exp(1j * rng.uniform(0, 2 * math.pi, grid.n_modes))
    W0 = build_weight_system(grid, gaussian_plane(t), gaussian_line(t))
    W1 = build_weight_system(grid, gaussian_plane(t), gaussian_line(t), phase_a=lambda a, b: a * a - b, phase_c=c)
    r0 = generalized_isometry_check(f, W0, Q)
    r1 = generalized_isometry_check(f, W1, Q)
    assert r1.lhs == pytest.approx(r0.lhs, rel=1e-13)


@pytest.mark.parametrize("generic", [False, True])
def test_generalized_isometry_poly(grid, generic):
    mu, nu = gaussian_poly_plane(0.5), gaussian_poly_line(0.5)
    if generic:
        mu, nu = mu.generic(), nu.generic()
    W = build_weight_system(grid, mu, nu)
    assert generalized_isometry_check(make_heat(grid, 0.5, seed=2), W, Q).rel_err <= 1e-2


def test_reconstruction(grid):
    W = canonical_weights(grid, 0.5)
    assert reconstruction_check(W, [(gauss, 0), (gauss, 3)]).rel_err <= 1e-8
    zero = reconstruction_check(W, [(lambda x1, x2: 0 * x1, 1)])
    assert zero.lhs == 0.0


def test_reconstruction_bandlimited_half_nyquist():
    g = GridSpec(16.0, 64, 2)
    W = canonical_weights(g, 0.5)
    bl = make_bandlimited(g, 0.5 * g.xi_max, seed=0, steepness=1.0)
    rep = reconstruction_check(W, [(lambda x1, x2: bl.mode(0), 0)])
    assert rep.rel_err <= 1e-8


def test_non_invertible_symbol():
    g = GridSpec(8.0, 64, 2)
    W = canonical_weights(g, 3.0)  # e^{-3 |xi|^2} underflows at the grid corners
    F = spatial_transform(make_rough(g))
    image = F.multiply(W.multiplier())
    with pytest.raises(NonInvertibleSymbolError):
        invert_multiplier(image, W.multiplier(), F.modes != 0)


def test_compact_bound(grid):
    W = build_weight_system(grid, gaussian_poly_plane(0.5), gaussian_poly_line(0.5))
    zs = [[0, 0], [0.5 + 1j, -1 + 0.3j], [2j, 0]]
    rep = compact_bound_check(make_heat(grid, 0.5, seed=1), W, zs)
    assert rep.passed and 0 < rep.lhs <= 1.0
