"""Representations of M(2) and the group Fourier transform as matrices.

For ``xi = (a, 0)`` the operator ``f^(a)`` acts on the basis
``e_n(theta) = e^{i n theta}`` of ``L^2(S^1, d theta / 2 pi)`` by
``(f^(a) e_n)(theta) = f~_n(a e^{i theta}) e^{i n theta}``; the matrix entry
``(k, n)`` is the ``k``-th Fourier coefficient of that function.  With this
normalization Plancherel reads ``||f||^2 = 2 pi int_0^oo ||f^(a)||_HS^2 a da``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import jv

from mharm.errors import DomainError, TruncationWarning
from mharm.group import ComplexGroupPoint, GroupElement
from mharm.modes import ModeStack, SpectralStack, l2_norm_sq, spatial_inverse, spatial_transform
from mharm.numerics import QuadratureSpec, legendre_rule, lifted_radial_fourier
from mharm.report import VerificationReport

PLANCHEREL_FACTOR = 2.0 * math.pi


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Matrix of ``f^(a)``: rows are output frequencies ``k``, columns input modes ``n``."""

    a: float
    entries: np.ndarray
    rows: np.ndarray
    cols: np.ndarray

    def entry(self, k: int, n: int) -> complex:
        i = int(np.searchsorted(self.rows, k))
        j = int(np.searchsorted(self.cols, n))
        if i >= len(self.rows) or self.rows[i] != k or j >= len(self.cols) or self.cols[j] != n:
            return 0j
        return complex(self.entries[i, j])

    def projection(self, m: int) -> OperatorMatrix:
        """Matrix of the x-rotation component of weight ``m``: entries with ``k - n = m``."""
        keep = (self.rows[:, None] - self.cols[None, :]) == m
        return OperatorMatrix(self.a, np.where(keep, self.entries, 0.0), self.rows, self.cols)


def hs_norm_sq(T: OperatorMatrix) -> float:
    return float(np.sum(np.abs(T.entries) ** 2))


def hs_inner(T: OperatorMatrix, S: OperatorMatrix) -> complex:
    return complex(np.sum(T.entries * np.conj(S.entries)))


def rep_apply(xi, g: GroupElement, F) -> np.ndarray:
    """Coefficients of ``theta -> e^{i <x, e^{i theta} xi>} F(theta - alpha)``.

    ``F`` holds coefficients for ``n = -M..M``; the multiplication is the
    angular convolution with Jacobi-Anger coefficients, truncated back to
    ``|n| <= M``.  A :class:`TruncationWarning` is issued when the truncation
    loses more than ``1e-12`` of the squared norm.
    """
    F = np.asarray(F, dtype=complex)
    M = (len(F) - 1) // 2
    n = np.arange(-M, M + 1)
    shifted = F * np.exp(-1j * n * g.alpha)
    xi = np.asarray(xi, dtype=float)
    x = np.asarray(g.x, dtype=float)
    rho = float(np.hypot(*x) * np.hypot(*xi))
    if rho == 0.0:
        return shifted
    # <x, R(theta) xi> = |x||xi| cos(theta + arg xi - arg x)
    phase = math.atan2(xi[1], xi[0]) - math.atan2(x[1], x[0])
    k = np.arange(-2 * M, 2 * M + 1)
    ja = (1j**k) * jv(k, rho) * np.exp(1j * k * phase)
    full = np.convolve(ja, shifted)  # indices -3M .. 3M
    out = full[2 * M : 4 * M + 1]
    loss = np.sum(np.abs(shifted) ** 2) - np.sum(np.abs(out) ** 2)
    total = np.sum(np.abs(shifted) ** 2)
    if total > 0 and loss > 1e-12 * total:
        warnings.warn(f"rep_apply truncation lost {loss / total:.2e} of the norm", TruncationWarning, stacklevel=2)
    return out


def complexified_rep_apply(a: float, p: ComplexGroupPoint, n: int):
    """``theta -> e^{i <x, a e^{i theta}>} e^{-<y, a e^{i theta}>} w^{-n} e^{i n theta}``."""
    if not a > 0:
        raise DomainError("a must be positive")
    z1, z2 = p.z
    wn = np.exp(-n * complex(p.u, p.theta))

    def apply(theta):
        theta = np.asarray(theta, dtype=float)
        return np.exp(1j * a * (z1 * np.cos(theta) + z2 * np.sin(theta))) * wn * np.exp(1j * n * theta)

    return apply


def circle_values_dtft(f: ModeStack, points) -> np.ndarray:
    """Exact trigonometric interpolation of the spectra at arbitrary ``points`` ``(P, 2)``.

    Evaluates ``(h^2 / 2 pi) sum_j f_m(x_j) e^{-i x_j . xi}`` for every mode;
    returns ``(2M+1, P)``.
    """
    g = f.grid
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    x = g.x_axis()
    out = np.empty((g.n_modes, len(pts)), dtype=complex)
    nz = [i for i in range(g.n_modes) if np.any(f.modes[i])]
    out[:] = 0.0
    chunk = max(1, 4_000_000 // (g.N * g.N))
    for s in range(0, len(pts), chunk):
        p = pts[s : s + chunk]
        E1 = np.exp(-1j * np.outer(x, p[:, 0]))
        E2 = np.exp(-1j * np.outer(x, p[:, 1]))
        for i in nz:
            out[i, s : s + chunk] = np.einsum("ap,ap->p", E1, f.modes[i] @ E2)
    return out * (g.h**2 / (2.0 * math.pi))


def circle_values_bilinear(F: SpectralStack, points) -> np.ndarray:
    """Bilinear interpolation of the spectra on the frequency grid."""
    g = F.grid
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    u = pts / g.dxi + g.N // 2
    i0 = np.floor(u).astype(int)
    fr = u - i0
    out = np.zeros((g.n_modes, len(pts)), dtype=complex)
    for di in (0, 1):
        for dj in (0, 1):
            ii = i0[:, 0] + di
            jj = i0[:, 1] + dj
            w = (fr[:, 0] if di else 1 - fr[:, 0]) * (fr[:, 1] if dj else 1 - fr[:, 1])
            ok = (ii >= 0) & (ii < g.N) & (jj >= 0) & (jj < g.N)
            out[:, ok] += w[ok] * F.modes[:, ii[ok], jj[ok]]
    return out


def _coerce(f):
    if isinstance(f, SpectralStack):
        return spatial_inverse(f), f
    return f, None


def fourier_operators(f, radii, circle_nodes: int = 64, method: str = "dtft") -> list[OperatorMatrix]:
    """:func:`fourier_operator` for many radii sharing one batch of circle evaluations."""
    fs, F = _coerce(f)
    g = fs.grid
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    if np.any(radii < 0) or np.any(radii > g.xi_max):
        raise DomainError(f"radius outside the frequency grid [0, {g.xi_max:.4g}]")
    nt = int(circle_nodes)
    theta = 2.0 * math.pi * np.arange(nt) / nt
    pts = np.concatenate([np.stack([a * np.cos(theta), a * np.sin(theta)], axis=1) for a in radii])
    if method == "dtft":
        vals = circle_values_dtft(fs, pts)
    elif method == "bilinear":
        vals = circle_values_bilinear(F if F is not None else spatial_transform(fs), pts)
    else:
        raise ValueError(f"unknown interpolation method {method!r}")
    vals = vals.reshape(g.n_modes, len(radii), nt)
    n = g.mode_indices
    rows = np.arange(nt) - nt // 2
    ops = []
    for ia, a in enumerate(radii):
        col_fun = vals[:, ia, :] * np.exp(1j * np.outer(n, theta))  # (n, theta)
        coeff = np.fft.fftshift(np.fft.fft(col_fun, axis=1), axes=1) / nt  # (n, k)
        ops.append(OperatorMatrix(float(a), coeff.T.copy(), rows, n.copy()))
    return ops


def fourier_operator(f, a: float, circle_nodes: int = 64, method: str = "dtft") -> OperatorMatrix:
    """Matrix of the group Fourier transform at ``|xi| = a``.

    Parameters
    ----------
    f : ModeStack or SpectralStack
    a : float
        Radius of the frequency shell.
    circle_nodes : int
        Number of equispaced angles on the shell; rows cover ``k`` in
        ``[-circle_nodes/2, circle_nodes/2)``.
    method : {"dtft", "bilinear"}
        How spectra are evaluated off the frequency grid.
    """
    return fourier_operators(f, [a], circle_nodes, method)[0]


def spectral_cutoff(F: SpectralStack, rel: float = 1e-15) -> float:
    """Smallest radius outside which the spectral energy is below ``rel`` of the total."""
    g = F.grid
    r = g.xi_abs().ravel()
    e = np.sum(np.abs(F.modes) ** 2, axis=0).ravel()
    total = e.sum()
    if total == 0:
        return g.dxi
    order = np.argsort(r)[::-1]
    outside = np.cumsum(e[order])
    idx = np.searchsorted(outside, rel * total)
    cut = r[order][min(idx, len(order) - 1)] + 2 * g.dxi
    return float(min(cut, g.xi_max))


def plancherel_sides(f: ModeStack, spec: QuadratureSpec, method: str = "dtft") -> tuple[float, float, float]:
    """``(||f||^2, 2 pi int ||f^(a)||_HS^2 a da, cutoff)``."""
    F = spatial_transform(f)
    cut = spec.radial_cutoff or spectral_cutoff(F)
    a, w = legendre_rule(spec.radial_nodes, 0.0, cut)
    ops = fourier_operators(f, a, spec.circle_nodes, method)
    hs = np.array([hs_norm_sq(T) for T in ops])
    rhs = PLANCHEREL_FACTOR * float(np.sum(w * hs * a))
    return l2_norm_sq(f), rhs, cut


def plancherel_check(
    f: ModeStack,
    spec: QuadratureSpec,
    tol: float = 1e-3,
    generator: str = "",
    params: dict | None = None,
    method: str = "dtft",
) -> VerificationReport:
    """Compare ``int |f|^2 dg`` with the Hilbert-Schmidt side of Plancherel."""
    lhs, rhs, cut = plancherel_sides(f, spec, method)
    warn = f.decay_warnings()
    if cut >= f.grid.xi_max:
        warn.append("spectrum not contained in the inscribed frequency disc")
    return VerificationReport.build(
        "plancherel",
        lhs,
        rhs,
        tol,
        generator=generator,
        params=params,
        resolution=_resolution(f, spec) | {"radial_cutoff": cut, "interp": method},
        warnings=warn,
    )


def _resolution(f: ModeStack, spec: QuadratureSpec) -> dict:
    g = f.grid
    return {
        "L": g.L,
        "N": g.N,
        "M": g.M,
        "hermite_nodes": spec.hermite_nodes,
        "circle_nodes": spec.circle_nodes,
        "radial_nodes": spec.radial_nodes,
    }


resolution_stamp = _resolution


def hecke_bochner_check(
    g, m: int, n: int, f: ModeStack, radii, profile_cutoff: float, spec: QuadratureSpec, tol: float = 1e-4
) -> VerificationReport:
    """Operator entry ``(n + m, n)`` of ``f = g(|x|) |x|^{|m|} e^{i m arg x}`` in mode ``n``
    against ``i^{-|m|} a^{|m|}`` times the lifted radial transform of ``g``.

    Reports the worst relative error over ``radii``.
    """
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    ops = fourier_operators(f, radii, spec.circle_nodes)
    lhs = np.array([T.entry(n + m, n) for T in ops])
    rhs = (1j) ** (-abs(m)) * radii ** abs(m) * lifted_radial_fourier(g, m, radii, profile_cutoff, spec.radial_nodes)
    scale = np.max(np.abs(rhs))
    err = np.abs(lhs - rhs)
    i = int(np.argmax(err))
    return VerificationReport.build(
        "hecke_bochner",
        float(err[i]) / scale,
        0.0,
        tol,
        generator=f"hecke_bochner(m={m}, n={n})",
        params={"m": m, "n": n, "worst_a": float(radii[i]), "radii": len(radii)},
        resolution=_resolution(f, spec),
        relation="err",
    )
