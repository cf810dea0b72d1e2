"""Band limits and entire extensions of exponential type.

A function whose group Fourier transform vanishes for ``|xi| > R`` extends
to ``C^2 x C^*`` with ``|z^m f(z, e^{i alpha})| <= (2 pi)^{-1} c_m e^{R |Im z|}``,
``c_m = sup_alpha ||d^m f~(., alpha)||_1``.  The factor ``(2 pi)^{-1}`` comes
from the unitary Fourier normalization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from mharm.errors import ExtensionDomainError, InvalidSpecError, PreconditionError
from mharm.modes import (
    GridSpec,
    ModeStack,
    SpectralStack,
    alpha_grid,
    denoise,
    eval_modes,
    spatial_transform,
)
from mharm.report import VerificationReport

BAND_TOL = 1e-14
MULTI_INDICES = ((0, 0), (1, 0), (0, 1), (1, 1), (2, 0))


@dataclass(frozen=True)
class PWBound:
    """Constant of the growth bound for one multi-index."""

    R: float
    m: tuple[int, int]
    c_m: float

    def __post_init__(self) -> None:
        if not self.R > 0:
            raise InvalidSpecError("band limit must be positive")
        if self.c_m < 0:
            raise InvalidSpecError("c_m must be nonnegative")
        if len(self.m) != 2 or min(self.m) < 0:
            raise InvalidSpecError("multi-index must be a pair of nonnegative integers")

    def __call__(self, z) -> float:
        """``(2 pi)^{-1} c_m e^{R |Im z|}``."""
        return self.c_m / (2 * math.pi) * math.exp(self.R * float(np.linalg.norm(np.imag(z))))


def _resolution(g: GridSpec) -> dict:
    return {"L": g.L, "N": g.N, "M": g.M}


def out_of_band_max(f: ModeStack, R: float) -> float:
    g = f.grid
    if not 0 < R < g.xi_max:
        raise InvalidSpecError(f"R={R} must lie in (0, {g.xi_max:.4g}), the Nyquist range of the grid")
    F = spatial_transform(f)
    outside = g.xi_abs() > R
    return float(np.max(np.abs(F.modes[:, outside]))) if np.any(outside) else 0.0


def bandlimit_check(f: ModeStack, R: float, tol: float = BAND_TOL, generator: str = "") -> VerificationReport:
    """Largest ``|f~_m(xi)|`` with ``|xi| > R`` against an absolute tolerance."""
    mx = out_of_band_max(f, R)
    return VerificationReport.build(
        "bandlimit",
        mx,
        tol,
        0.0,
        generator=generator,
        params={"R": R},
        resolution=_resolution(f.grid),
        relation="le",
    )


def _require_bandlimited(F: SpectralStack) -> SpectralStack:
    g = F.grid
    D = denoise(F)
    live = np.any(D.modes != 0, axis=0)
    if np.any(live & (g.xi_abs() >= 0.95 * g.xi_max)):
        raise PreconditionError("spectrum reaches the edge of the frequency grid; f is not band-limited here")
    return D


def derivative_spectrum(f: ModeStack, m) -> SpectralStack:
    """Spectrum of ``x^m f``; equals ``(i d)^m f~`` up to the unimodular factor ``i^{|m|}``."""
    x1, x2 = f.grid.x_mesh()
    return spatial_transform(ModeStack(f.grid, f.modes * (x1 ** m[0] * x2 ** m[1])[None]))


def derivative_l1(f: ModeStack, m=(0, 0), alpha_nodes: int | None = None) -> float:
    """``sup_alpha ||d^m f~(., alpha)||_1`` on the frequency grid.

    Raises
    ------
    PreconditionError
        If the spectrum of ``f`` reaches the edge of the grid.
    """
    g = f.grid
    _require_bandlimited(spatial_transform(f))
    D = derivative_spectrum(f, m).modes
    na = alpha_nodes or 4 * g.n_modes
    best = 0.0
    for a in alpha_grid(na):
        ph = np.exp(1j * g.mode_indices * a)
        best = max(best, float(np.sum(np.abs(np.tensordot(ph, D, axes=(0, 0))))))
    return best * g.dxi**2


def _values(F: SpectralStack, zs, alphas) -> np.ndarray:
    """``f(z, e^{i alpha})`` as ``(len(alphas), len(zs))``."""
    fm = eval_modes(F, zs)
    ph = np.exp(1j * np.outer(alphas, F.grid.mode_indices))
    return ph @ fm


def pw_bound_check(
    f: ModeStack,
    R: float,
    m,
    z_samples,
    alpha_nodes: int | None = None,
    tol: float = 0.0,
    generator: str = "",
) -> VerificationReport:
    """Worst ratio ``|z^m f(z, e^{i alpha})| / ((2 pi)^{-1} c_m e^{R |Im z|})`` over samples."""
    g = f.grid
    if not bandlimit_check(f, R).passed:
        raise PreconditionError(f"f is not band-limited to |xi| <= {R}")
    m = tuple(int(k) for k in m)
    bound = PWBound(R, m, derivative_l1(f, m, alpha_nodes))
    zs = np.atleast_2d(np.asarray(z_samples, dtype=complex))
    F = denoise(spatial_transform(f))
    alphas = alpha_grid(alpha_nodes or 4 * g.n_modes)
    vals = np.abs(_values(F, zs, alphas) * (zs[:, 0] ** m[0] * zs[:, 1] ** m[1])[None, :])
    b = np.array([bound(z) for z in zs])
    if not np.all(np.isfinite(vals)):
        raise ExtensionDomainError("non-finite values of the extension")
    ratio = float(np.max(vals / b[None, :])) if bound.c_m > 0 else 0.0
    return VerificationReport.build(
        "pw_bound",
        ratio,
        1.0,
        tol,
        generator=generator,
        params={"R": R, "m": list(m), "c_m": bound.c_m, "points": len(zs), "alpha_nodes": len(alphas)},
        resolution=_resolution(g),
        relation="le",
    )


def unit_directions(n: int) -> np.ndarray:
    phi = 2 * math.pi * (np.arange(n) + 0.5) / n
    return np.stack([np.cos(phi), np.sin(phi)], axis=1)


@dataclass(frozen=True)
class TypeEstimate:
    """Directional growth fits ``log sup_alpha |f(i s v)| ~ R s + beta log s + c``."""

    R_hat: float
    slopes: tuple[float, ...]
    s_max: float


def exponential_type_estimate(
    f: ModeStack, directions=None, s_max: float = 8.0, n_s: int = 17, alpha_nodes: int | None = None
) -> TypeEstimate:
    """Estimate the exponential type from growth along imaginary directions.

    For each unit vector ``v`` the log of ``sup_alpha |f(i s v, e^{i alpha})|``
    on ``s`` in ``[s_max/2, s_max]`` is fitted by least squares to
    ``R s + beta log s + c``; the ``log s`` term absorbs the algebraic factor
    that accompanies the exponential growth of band-limited functions.
    """
    g = f.grid
    dirs = unit_directions(32) if directions is None else np.atleast_2d(np.asarray(directions, dtype=float))
    F = denoise(spatial_transform(f))
    weighted = np.abs(F.modes) ** 2 * np.exp(2 * s_max * g.xi_abs())[None]
    if not np.all(np.isfinite(weighted)):
        raise ExtensionDomainError(f"spectrum cannot be continued to |Im z| = {s_max}")
    s = np.linspace(s_max / 2, s_max, n_s)
    alphas = alpha_grid(alpha_nodes or 4 * g.n_modes)
    design = np.stack([s, np.log(s), np.ones_like(s)], axis=1)
    slopes = []
    for v in dirs:
        zs = 1j * s[:, None] * v[None, :]
        sup = np.max(np.abs(_values(F, zs, alphas)), axis=0)
        if not np.all(np.isfinite(sup)) or np.any(sup <= 0):
            raise ExtensionDomainError("non-finite or vanishing samples along an imaginary direction")
        coef, *_ = np.linalg.lstsq(design, np.log(sup), rcond=None)
        slopes.append(float(coef[0]))
    return TypeEstimate(max(slopes), tuple(slopes), float(s_max))


def exponential_type_check(
    f: ModeStack,
    R: float,
    directions=None,
    s_max: float = 8.0,
    eps: float = 0.1,
    tol: float = 0.1,
    generator: str = "",
) -> VerificationReport:
    """Converse direction: the estimated type lies in ``[(1 - tol) R, R]`` and
    ``f`` passes :func:`bandlimit_check` at ``(1 + eps) R_hat``."""
    est = exponential_type_estimate(f, directions, s_max)
    R_conv = min(est.R_hat * (1 + eps), f.grid.xi_max * 0.999)
    conv = bandlimit_check(f, R_conv)
    fatal = est.R_hat > R or not conv.passed
    warn = [] if conv.passed else [f"bandlimit fails at {R_conv:.4g} (max {conv.lhs:.2e})"]
    if est.R_hat > R:
        warn.append("estimated type exceeds the band limit")
    return VerificationReport.build(
        "exponential_type",
        est.R_hat,
        R,
        tol,
        generator=generator,
        params={"R": R, "s_max": s_max, "eps": eps, "converse_R": R_conv, "directions": len(est.slopes)},
        resolution=_resolution(f.grid),
        warnings=warn,
        fatal=fatal,
    )
