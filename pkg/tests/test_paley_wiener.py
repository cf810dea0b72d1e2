import math

import numpy as np
import pytest
from scipy.integrate import quad

from mharm.errors import InvalidSpecError, PreconditionError
from mharm.generators import bandlimited_spectrum, bump, make_bandlimited, make_heat, make_rough
from mharm.modes import GridSpec, ModeStack, SpectralStack, spatial_inverse
from mharm.paley_wiener import (
    PWBound,
    bandlimit_check,
    derivative_l1,
    exponential_type_check,
    exponential_type_estimate,
    out_of_band_max,
    pw_bound_check,
    unit_directions,
)

R = 2.0


@pytest.fixture(scope="module")
def pw_grid():
    return GridSpec(32.0, 128, 8)


@pytest.fixture(scope="module")
def single_mode():
    """Mode 0 carries the real radial spectrum ``bump(|xi| / R)``, the rest vanish.

    The wide box keeps ``x f`` small at its edge and refines the frequency grid.
    """
    g = GridSpec(64.0, 256, 1)
    k1, k2 = g.xi_mesh()
    spec = np.zeros((g.n_modes, g.N, g.N), dtype=complex)
    spec[g.M] = bandlimited_spectrum(k1, k2, R, steepness=1.0)
    return spatial_inverse(SpectralStack(g, spec))


@pytest.fixture(scope="module")
def bandlimited(pw_grid):
    return make_bandlimited(pw_grid, R, 1, steepness=0.1)


# ---------------------------------------------------------------- band limit


def test_bandlimit_passes_for_bandlimited(bandlimited):
    r = bandlimit_check(bandlimited, R)
    assert r.passed, r.line()


def test_bandlimit_fails_for_heat(grid):
    r = bandlimit_check(make_heat(grid, 0.5, 1), R)
    assert not r.passed
    assert r.lhs > 1e-3


def test_out_of_band_max_nonincreasing(grid):
    f = make_heat(grid, 0.5, 2)
    vals = [out_of_band_max(f, r) for r in (0.5, 1.0, 2.0, 4.0, 8.0)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_bandlimit_rejects_beyond_nyquist(grid):
    f = make_heat(grid, 0.5)
    with pytest.raises(InvalidSpecError):
        bandlimit_check(f, grid.xi_max)
    with pytest.raises(InvalidSpecError):
        bandlimit_check(f, 0.0)


# ---------------------------------------------------------------- L1 constants


def test_derivative_l1_zero_index_quadrature(single_mode):
    expected = 2 * math.pi * R**2 * quad(lambda u: bump(u, 1.0) * u, 0, 1)[0]
    assert derivative_l1(single_mode) == pytest.approx(expected, rel=1e-7)


@pytest.mark.parametrize("m", [(1, 0), (0, 1)])
def test_derivative_l1_first_order_quadrature(single_mode, m):
    # int |d_1 b| = int_0^R |b'(r)| r dr int |cos| = 4 int_0^R b(r) dr for decreasing b
    expected = 4 * R * quad(lambda u: bump(u, 1.0), 0, 1)[0]
    assert derivative_l1(single_mode, m) == pytest.approx(expected, rel=1e-4)


def test_derivative_l1_homogeneous(bandlimited):
    c = 2.5 - 1.5j
    scaled = ModeStack(bandlimited.grid, c * bandlimited.modes)
    assert derivative_l1(scaled, (1, 1)) == pytest.approx(abs(c) * derivative_l1(bandlimited, (1, 1)), rel=1e-12)


def test_derivative_l1_requires_band_limit(grid):
    with pytest.raises(PreconditionError):
        derivative_l1(make_rough(grid))


# ---------------------------------------------------------------- growth bound


def test_pw_bound_constant():
    b = PWBound(2.0, (1, 0), 3.0)
    assert b(np.array([1.0 + 0.5j, -2.0 + 0.0j])) == pytest.approx(3.0 / (2 * math.pi) * math.e)


@pytest.mark.parametrize("args", [(0.0, (0, 0), 1.0), (1.0, (0, 0), -1.0), (1.0, (-1, 0), 1.0), (1.0, (0,), 1.0)])
def test_pw_bound_rejects_bad_input(args):
    with pytest.raises(InvalidSpecError):
        PWBound(*args)


def test_pw_bound_zero_function(pw_grid):
    f = ModeStack(pw_grid, np.zeros((pw_grid.n_modes, pw_grid.N, pw_grid.N), dtype=complex))
    r = pw_bound_check(f, R, (0, 0), [[0.5j, 1.0]])
    assert r.lhs == 0.0 and r.passed


@pytest.mark.parametrize("m", [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0)])
def test_pw_bound_holds(bandlimited, m):
    zs = [[0.0, 1j * s] for s in (0.5, 2.0, 5.0)] + [[1.0 + 0.3j, -0.5 - 1.2j], [3.0, 2.0]]
    r = pw_bound_check(bandlimited, R, m, zs)
    assert r.passed, r.line()
    assert 0 < r.lhs <= 1


def test_pw_bound_at_origin_is_sharp_for_positive_spectrum(single_mode):
    # a nonnegative spectrum attains its L1 norm at z = 0
    r = pw_bound_check(single_mode, R, (0, 0), [[0.0, 0.0]])
    assert r.lhs == pytest.approx(1.0, rel=1e-10)


def test_pw_bound_requires_band_limit(grid):
    with pytest.raises(PreconditionError):
        pw_bound_check(make_heat(grid, 0.5), R, (0, 0), [[0.0, 0.0]])


# ---------------------------------------------------------------- exponential type


def test_unit_directions():
    d = unit_directions(12)
    assert d.shape == (12, 2)
    assert np.allclose(np.linalg.norm(d, axis=1), 1.0)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_exponential_type_recovers_band(pw_grid, seed):
    f = make_bandlimited(pw_grid, R, seed, steepness=0.1)
    est = exponential_type_estimate(f, s_max=8.0)
    assert 1.8 <= est.R_hat <= R
    r = exponential_type_check(f, R)
    assert r.passed, r.line()


def test_exponential_type_scales_with_band(pw_grid):
    half = exponential_type_estimate(make_bandlimited(pw_grid, R / 2, 1, steepness=0.1), s_max=16.0).R_hat
    full = exponential_type_estimate(make_bandlimited(pw_grid, R, 1, steepness=0.1), s_max=8.0).R_hat
    assert half == pytest.approx(full / 2, rel=0.05)


def test_exponential_type_of_heat_grows_with_window(grid):
    f = make_heat(grid, 0.5, 1)
    a = exponential_type_estimate(f, s_max=4.0).R_hat
    b = exponential_type_estimate(f, s_max=8.0).R_hat
    assert b > 1.5 * a
