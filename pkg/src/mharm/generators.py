"""Deterministic test functions on M(2).

Each generator returns a :class:`ModeStack`; random ones draw from
``numpy.random.default_rng(seed)`` so a seed fixes the function exactly.
"""

from __future__ import annotations

import math

import numpy as np

from mharm.errors import InvalidSpecError
from mharm.modes import GridSpec, ModeStack, SpectralStack, spatial_inverse


def heat_kernel_plane(x1, x2, t: float):
    """Plane heat kernel ``(4 pi t)^{-1} exp(-|x|^2 / 4t)``; accepts complex arguments."""
    return np.exp(-(x1 * x1 + x2 * x2) / (4.0 * t)) / (4.0 * math.pi * t)


def heat_parameters(grid: GridSpec, t: float, seed: int | None):
    """Per-mode amplitudes and centres used by :func:`make_heat`."""
    ms = grid.mode_indices
    if seed is None:
        return np.exp(-(ms**2) * t).astype(complex), np.zeros((grid.n_modes, 2))
    rng = np.random.default_rng(seed)
    amp = (rng.normal(size=grid.n_modes) + 1j * rng.normal(size=grid.n_modes)) / math.sqrt(2.0)
    amp *= np.exp(-0.5 * ms**2 * t)
    centers = rng.uniform(-2.0, 2.0, size=(grid.n_modes, 2))
    return amp, centers


def make_heat(grid: GridSpec, t: float, seed: int | None = None) -> ModeStack:
    """Heat-regularized function with Gaussian modes ``c_m p_t(x - x_m)``.

    Without a seed this is the group heat kernel truncated to ``|m| <= M``:
    ``c_m = e^{-m^2 t}`` and all centres at the origin.
    """
    if not t > 0:
        raise InvalidSpecError("t must be positive")
    amp, centers = heat_parameters(grid, t, seed)
    x1, x2 = grid.x_mesh()
    modes = np.stack(
        [a * heat_kernel_plane(x1 - c[0], x2 - c[1], t) for a, c in zip(amp, centers)]
    )
    return ModeStack(grid, modes)


def bump(s, steepness: float = 1.0):
    """Smooth profile equal to 1 at ``s = 0`` and vanishing to all orders at ``s = 1``."""
    s = np.asarray(s, dtype=float)
    inside = s < 1.0
    ss = np.where(inside, s, 0.0)
    return np.where(inside, np.exp(steepness - steepness / (1.0 - ss * ss)), 0.0)


def bandlimited_spectrum(xi1, xi2, R: float, steepness: float = 0.1, width: float | None = None):
    """Radial spectral profile supported in ``|xi| <= R``.

    A small ``steepness`` keeps the profile near 1 up to the band edge, which
    makes the exponential type visible at moderate imaginary parts; ``width``
    adds a Gaussian factor ``exp(-|xi|^2 / 2 width^2)`` for fast spatial decay.
    """
    prof = bump(np.hypot(xi1, xi2) / R, steepness)
    if width is not None:
        prof = prof * np.exp(-(xi1 * xi1 + xi2 * xi2) / (2.0 * width * width))
    return prof


def bandlimited_parameters(grid: GridSpec, seed: int):
    rng = np.random.default_rng(seed)
    amp = (rng.normal(size=grid.n_modes) + 1j * rng.normal(size=grid.n_modes)) / math.sqrt(2.0)
    amp /= 1.0 + np.abs(grid.mode_indices)
    shifts = rng.uniform(-1.0, 1.0, size=(grid.n_modes, 2))
    return amp, shifts


def make_bandlimited(
    grid: GridSpec,
    R: float,
    seed: int = 0,
    steepness: float = 0.1,
    width: float | None = None,
) -> ModeStack:
    """Random function whose plane spectrum vanishes on the grid outside ``|xi| <= R``.

    Mode ``m`` has spectrum ``c_m b(xi) e^{-i xi.x_m}`` with ``b`` from
    :func:`bandlimited_spectrum`.
    """
    if not 0 < R < grid.xi_max:
        raise InvalidSpecError(f"band limit R={R} must lie in (0, {grid.xi_max:.4g}) for this grid")
    amp, shifts = bandlimited_parameters(grid, seed)
    k1, k2 = grid.xi_mesh()
    prof = bandlimited_spectrum(k1, k2, R, steepness, width)
    spec = np.stack([a * prof * np.exp(-1j * (k1 * s[0] + k2 * s[1])) for a, s in zip(amp, shifts)])
    return spatial_inverse(SpectralStack(grid, spec))


def make_separable(grid: GridSpec, g, n: int) -> ModeStack:
    """``f(x, e^{i alpha}) = g(x) e^{i n alpha}``; ``g`` is an array or a callable ``g(x1, x2)``."""
    if abs(n) > grid.M:
        raise InvalidSpecError(f"mode {n} outside |m| <= {grid.M}")
    vals = g(*grid.x_mesh()) if callable(g) else np.asarray(g)
    modes = np.zeros((grid.n_modes, grid.N, grid.N), dtype=complex)
    modes[n + grid.M] = vals
    return ModeStack(grid, modes)


def hecke_bochner_values(g, m: int, x1, x2):
    """``g(|x|) |x|^{|m|} e^{i m arg x}``, written as ``g(r) (x1 +- i x2)^{|m|}``."""
    r = np.hypot(x1, x2)
    z = x1 + 1j * x2 if m >= 0 else x1 - 1j * x2
    return g(r) * z ** abs(m)


def make_hecke_bochner(grid: GridSpec, g, m: int, n: int) -> ModeStack:
    """Single mode ``n`` of the form ``g(|x|) |x|^{|m|} e^{i m arg x}``.

    Its plane spectrum is ``i^{-|m|} a^{|m|} F_{2+2|m|}[g](a) e^{i m phi}``.
    """
    return make_separable(grid, lambda x1, x2: hecke_bochner_values(g, m, x1, x2), n)


def make_rough(grid: GridSpec, decay: float = 1.5, seed: int = 0, modes=(-1, 0, 1)) -> ModeStack:
    """Function with algebraically decaying spectrum ``(1 + |xi|^2)^{-decay}``.

    It has no holomorphic extension beyond the real group, which makes it the
    natural probe for divergence detection.
    """
    rng = np.random.default_rng(seed)
    k1, k2 = grid.xi_mesh()
    prof = (1.0 + k1 * k1 + k2 * k2) ** (-decay)
    spec = np.zeros((grid.n_modes, grid.N, grid.N), dtype=complex)
    for m in modes:
        c = complex(rng.normal(), rng.normal())
        s = rng.uniform(-1.0, 1.0, size=2)
        spec[m + grid.M] = c * prof * np.exp(-1j * (k1 * s[0] + k2 * s[1]))
    return spatial_inverse(SpectralStack(grid, spec))
