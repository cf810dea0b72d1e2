"""Functions on M(2) as stacks of angular modes.

A function is stored through its expansion ``f(x, e^{i alpha}) = sum_m f_m(x) e^{i m alpha}``
with ``|m| <= M`` and each ``f_m`` sampled on the periodic box ``[-L, L)^2``.

Conventions used throughout the package:

* Haar measure on M(2) is ``dx d(alpha) / 2 pi``, so ``||f||^2 = sum_m ||f_m||^2``.
* The plane Fourier transform is unitary,
  ``f~(xi) = (2 pi)^{-1} int f(x) e^{-i x.xi} dx``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from mharm.errors import AliasingError, ExtensionDomainError, InvalidSpecError

CONVENTION_TAG = "haar=dx.dalpha/2pi;ft=unitary(2pi)^-1,e^-ix.xi"
DECAY_FLOOR = 1e-10


@dataclass(frozen=True)
class GridSpec:
    """Spatial box ``[-L, L)^2`` with ``N`` samples per axis and modes ``|m| <= M``."""

    L: float
    N: int = 128
    M: int = 8

    def __post_init__(self) -> None:
        if not self.L > 0:
            raise InvalidSpecError("L must be positive")
        if self.N < 8 or self.N & (self.N - 1):
            raise InvalidSpecError("N must be a power of two and at least 8")
        if self.M < 1:
            raise InvalidSpecError("M must be at least 1")

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def dxi(self) -> float:
        return math.pi / self.L

    @property
    def xi_max(self) -> float:
        """Largest radius of a disc fully inside the frequency grid."""
        return 0.5 * self.N * self.dxi

    @property
    def n_modes(self) -> int:
        return 2 * self.M + 1

    @property
    def mode_indices(self) -> np.ndarray:
        return np.arange(-self.M, self.M + 1)

    def x_axis(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.N)

    def xi_axis(self) -> np.ndarray:
        return self.dxi * (np.arange(self.N) - self.N // 2)

    def x_mesh(self) -> tuple[np.ndarray, np.ndarray]:
        x = self.x_axis()
        return np.meshgrid(x, x, indexing="ij")

    def xi_mesh(self) -> tuple[np.ndarray, np.ndarray]:
        k = self.xi_axis()
        return np.meshgrid(k, k, indexing="ij")

    def xi_abs(self) -> np.ndarray:
        k1, k2 = self.xi_mesh()
        return np.hypot(k1, k2)

    def refined(self, factor: int = 2) -> GridSpec:
        """Same box, ``factor`` times the samples per axis."""
        return GridSpec(self.L, self.N * factor, self.M)

    def enlarged(self, factor: int = 2) -> GridSpec:
        """Box and sample count both scaled, keeping the spatial step."""
        return GridSpec(self.L * factor, self.N * factor, self.M)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class ModeStack:
    """Angular modes ``f_m`` sampled on the spatial grid, shape ``(2M+1, N, N)``."""

    grid: GridSpec
    modes: np.ndarray

    def __post_init__(self) -> None:
        shape = (self.grid.n_modes, self.grid.N, self.grid.N)
        if self.modes.shape != shape:
            raise InvalidSpecError(f"modes must have shape {shape}, got {self.modes.shape}")
        object.__setattr__(self, "modes", _frozen(self.modes))

    @classmethod
    def zeros(cls, grid: GridSpec) -> ModeStack:
        return cls(grid, np.zeros((grid.n_modes, grid.N, grid.N), dtype=complex))

    def mode(self, m: int) -> np.ndarray:
        return self.modes[m + self.grid.M]

    def __add__(self, other: ModeStack) -> ModeStack:
        return ModeStack(self.grid, self.modes + other.modes)

    def __mul__(self, c: complex) -> ModeStack:
        return ModeStack(self.grid, c * self.modes)

    __rmul__ = __mul__

    def decay_warnings(self, floor: float = DECAY_FLOOR) -> list[str]:
        """Warn when samples near the box edge exceed ``floor`` times the peak."""
        peak = np.max(np.abs(self.modes)) if self.modes.size else 0.0
        if peak == 0.0:
            return []
        x1, x2 = self.grid.x_mesh()
        edge = np.maximum(np.abs(x1), np.abs(x2)) >= 0.9 * self.grid.L
        out = []
        for m, fm in zip(self.grid.mode_indices, self.modes):
            level = np.max(np.abs(fm[edge])) / peak
            if level > floor:
                out.append(f"box truncation: mode {m} reaches {level:.1e} of peak near |x| = L")
        return out


@dataclass(frozen=True, eq=False)
class SpectralStack:
    """Plane Fourier transforms ``f~_m(xi)`` on the centred frequency grid."""

    grid: GridSpec
    modes: np.ndarray

    def __post_init__(self) -> None:
        shape = (self.grid.n_modes, self.grid.N, self.grid.N)
        if self.modes.shape != shape:
            raise InvalidSpecError(f"modes must have shape {shape}, got {self.modes.shape}")
        object.__setattr__(self, "modes", _frozen(self.modes))

    def mode(self, m: int) -> np.ndarray:
        return self.modes[m + self.grid.M]

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.modes) ** 2) * self.grid.dxi**2)

    def mode_norms_sq(self) -> np.ndarray:
        return np.sum(np.abs(self.modes) ** 2, axis=(1, 2)) * self.grid.dxi**2

    def multiply(self, mult) -> SpectralStack:
        """Apply a per-mode multiplier of shape ``(2M+1, N, N)`` or broadcastable."""
        return SpectralStack(self.grid, self.modes * mult)


def _phase(grid: GridSpec) -> np.ndarray:
    k = np.arange(grid.N) - grid.N // 2
    s = np.where(k % 2 == 0, 1.0, -1.0)
    return np.outer(s, s)


def spatial_transform(f: ModeStack) -> SpectralStack:
    """Unitary plane Fourier transform of every mode."""
    g = f.grid
    F = np.fft.fftshift(np.fft.fft2(f.modes, axes=(1, 2)), axes=(1, 2))
    F *= _phase(g) * (g.h**2 / (2.0 * math.pi))
    return SpectralStack(g, F)


def spatial_inverse(F: SpectralStack) -> ModeStack:
    g = F.grid
    A = np.fft.ifftshift(F.modes * _phase(g), axes=(1, 2))
    f = np.fft.ifft2(A, axes=(1, 2)) * (g.N**2 * g.dxi**2 / (2.0 * math.pi))
    return ModeStack(g, f)


def l2_norm_sq(f: ModeStack) -> float:
    """``int |f|^2 dx d(alpha)/2 pi`` on the grid."""
    return float(np.sum(np.abs(f.modes) ** 2) * f.grid.h**2)


def synthesize(f: ModeStack, alpha: float) -> np.ndarray:
    """Values ``f(x, e^{i alpha})`` on the spatial grid."""
    ph = np.exp(1j * f.grid.mode_indices * alpha)
    return np.tensordot(ph, f.modes, axes=(0, 0))


def alpha_grid(n: int) -> np.ndarray:
    return 2.0 * math.pi * np.arange(n) / n


def angular_decompose(samples, grid: GridSpec) -> ModeStack:
    """Angular Fourier analysis of samples on ``alpha_j = 2 pi j / n``.

    ``samples`` has shape ``(n, N, N)``; ``n >= 2M + 1`` is required.
    """
    samples = np.asarray(samples, dtype=complex)
    n = samples.shape[0]
    if n < grid.n_modes:
        raise AliasingError(f"{n} angular samples cannot resolve {grid.n_modes} modes")
    if samples.shape[1:] != (grid.N, grid.N):
        raise InvalidSpecError("spatial shape of samples does not match grid")
    a = alpha_grid(n)
    kern = np.exp(-1j * np.outer(grid.mode_indices, a)) / n
    return ModeStack(grid, np.tensordot(kern, samples, axes=(1, 0)))


def tail_fractions(weighted: np.ndarray, grid: GridSpec, shell: float = 0.9) -> np.ndarray:
    """Fraction of each mode's weighted spectral mass in the outer frequency shell.

    The shell is ``max(|xi_1|, |xi_2|) >= shell * xi_max``; a large fraction means
    the weighted integrand has not decayed by the edge of the grid.
    """
    k1, k2 = grid.xi_mesh()
    outer = np.maximum(np.abs(k1), np.abs(k2)) >= shell * grid.xi_max
    total = np.sum(weighted, axis=(1, 2))
    edge = np.sum(weighted[:, outer], axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(total > 0, edge / total, 0.0)
    return frac


def check_weighted_tail(weighted: np.ndarray, grid: GridSpec, tol: float = 1e-3, what: str = "") -> None:
    """Raise :class:`ExtensionDomainError` if a weighted spectral sum fails to converge."""
    if not np.all(np.isfinite(weighted)):
        bad = [int(m) for m, w in zip(grid.mode_indices, weighted) if not np.all(np.isfinite(w))]
        raise ExtensionDomainError(f"{what}: non-finite weighted spectrum in modes {bad}")
    frac = tail_fractions(weighted, grid)
    bad = [int(m) for m, fr in zip(grid.mode_indices, frac) if fr > tol]
    if bad:
        raise ExtensionDomainError(
            f"{what}: weighted spectrum does not decay at the grid edge in modes {bad} "
            f"(edge fraction up to {frac.max():.2e})"
        )
    mass = np.sum(weighted, axis=(1, 2))
    total = mass.sum()
    for side in (mass[-3:], mass[:3][::-1]):
        if len(mass) >= 3 and total > 0 and np.all(side > 0) and np.all(np.diff(side) > 0) and side[-1] > tol * total:
            raise ExtensionDomainError(f"{what}: weighted mode sum grows toward the cutoff |m| = {grid.M}")


def _mult_array(F: SpectralStack, mult) -> np.ndarray:
    if mult is None:
        return F.modes
    return F.modes * np.broadcast_to(mult, F.modes.shape)


def eval_modes(F: SpectralStack, zs, mult=None) -> np.ndarray:
    """Holomorphic extensions ``f_m(z)`` at complex points ``zs`` of shape ``(P, 2)``.

    Evaluates the damped Fourier inversion
    ``(2 pi)^{-1} sum_xi F_m(xi) mult_m(xi) e^{i xi.z} dxi^2``; returns ``(2M+1, P)``.
    """
    g = F.grid
    zs = np.atleast_2d(np.asarray(zs, dtype=complex))
    k = g.xi_axis()
    A = _mult_array(F, mult)
    E1 = np.exp(1j * np.outer(k, zs[:, 0]))
    E2 = np.exp(1j * np.outer(k, zs[:, 1]))
    T = A @ E2
    return np.einsum("map,ap->mp", T, E1) * (g.dxi**2 / (2.0 * math.pi))


def eval_modes_shifted(F: SpectralStack, y, mult=None) -> np.ndarray:
    """``f_m(x + i y)`` for every grid point ``x``, shape ``(2M+1, N, N)``."""
    g = F.grid
    k1, k2 = g.xi_mesh()
    damp = np.exp(-(k1 * y[0] + k2 * y[1]))
    return spatial_inverse(SpectralStack(g, _mult_array(F, mult) * damp)).modes


def eval_modes_affine(F: SpectralStack, A, b, mult=None, support_tol: float = 1e-300) -> np.ndarray:
    """``f_m(A x + b)`` for every grid point ``x``, ``A`` a complex 2x2 matrix.

    The sum runs over frequencies where any mode is nonzero; the exponential
    separates in ``x_1, x_2`` so each mode costs one matrix product.
    """
    g = F.grid
    A = np.asarray(A, dtype=complex)
    b = np.asarray(b, dtype=complex)
    vals = _mult_array(F, mult)
    k1, k2 = g.xi_mesh()
    mask = np.max(np.abs(vals), axis=0) > support_tol
    xi = np.stack([k1[mask], k2[mask]], axis=1)
    c = xi @ A  # rows are A^T xi
    x = g.x_axis()
    E1 = np.exp(1j * np.outer(x, c[:, 0]))
    E2 = np.exp(1j * np.outer(x, c[:, 1]))
    shift = np.exp(1j * (xi @ b))
    out = np.zeros((g.n_modes, g.N, g.N), dtype=complex)
    for i in range(g.n_modes):
        v = vals[i][mask]
        if np.any(v):
            out[i] = (E1 * (v * shift)) @ E2.T
    return out * (g.dxi**2 / (2.0 * math.pi))


def holomorphic_eval(F: SpectralStack, p, weights=None, tail_tol: float = 1e-3) -> complex:
    """Value at ``p = (z, w)`` of ``sum_m f_m(z) w^m`` built from the (weighted) spectrum.

    Raises :class:`ExtensionDomainError` when the spectrum, amplified by
    ``e^{|xi| |Im z|}``, has not decayed at the edge of the grid.
    """
    g = F.grid
    z = np.asarray(p.z, dtype=complex)
    vals = np.abs(_mult_array(F, weights))
    amp = np.exp(g.xi_abs() * np.linalg.norm(z.imag))
    with np.errstate(over="ignore", invalid="ignore"):
        weighted = (vals * amp) ** 2 * np.exp(2.0 * np.abs(g.mode_indices * p.u))[:, None, None]
    check_weighted_tail(weighted, g, tail_tol, what=f"holomorphic_eval at |Im z| = {np.linalg.norm(z.imag):.3g}")
    fm = eval_modes(F, z[None, :], weights)[:, 0]
    wm = np.exp(g.mode_indices * complex(p.u, p.theta))
    return complex(np.sum(fm * wm))


ROUNDOFF_FLOOR = 1e-15


def denoise(F: SpectralStack, rel: float = ROUNDOFF_FLOOR) -> SpectralStack:
    """Zero spectral values below ``rel`` times the peak.

    FFT round-off leaves values near ``1e-17`` of the peak everywhere; any
    evaluation that multiplies the spectrum by ``e^{|xi| |Im z|}`` would
    amplify them without bound.
    """
    peak = float(np.max(np.abs(F.modes))) if F.modes.size else 0.0
    return SpectralStack(F.grid, np.where(np.abs(F.modes) > rel * peak, F.modes, 0.0))
