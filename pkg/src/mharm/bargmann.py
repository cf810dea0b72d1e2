"""Heat semigroup, Segal-Bargmann transforms and weighted Bergman norms.

Every transform here is a per-mode spectral multiplier followed by
holomorphic extension.  The canonical transform damps mode ``m`` by
``e^{-t |xi|^2} e^{-m^2 t}``; the generalized transform of a weight system
``W`` uses ``W.multiplier()``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from mharm.errors import DomainError, NonInvertibleSymbolError
from mharm.group import ComplexGroupPoint, GroupElement
from mharm.modes import (
    GridSpec,
    ModeStack,
    SpectralStack,
    check_weighted_tail,
    eval_modes,
    holomorphic_eval,
    l2_norm_sq,
    spatial_inverse,
    spatial_transform,
)
from mharm.numerics import QuadratureSpec, circle_points, hermite_rule, legendre_rule
from mharm.report import VerificationReport
from mharm.weights import Density, WeightSystem, canonical_weights

SYMBOL_FLOOR = 1e-300
KERNEL_TAIL = 1e-14

# The kernel psi(z) = int e^{i a(y)} sigma(y)^{-1/2} e^{-i y.z} dy equals this
# constant times the function the transform convolves with.
PSI_SCALE = (2.0 * math.pi) ** 2


def _check_t(t: float) -> None:
    if not t > 0:
        raise DomainError(f"heat time must be positive, got {t}")


def theta_terms(t: float, tail: float = KERNEL_TAIL) -> int:
    """Smallest ``n_max`` with ``sum_{|n| > n_max} e^{-n^2 t} < tail``."""
    _check_t(t)
    n = 0
    while True:
        # tail bounded by 2 e^{-(n+1)^2 t} / (1 - e^{-(2n+3) t})
        rest = 2.0 * math.exp(-((n + 1) ** 2) * t) / -math.expm1(-(2 * n + 3) * t)
        if rest < tail:
            return n
        n += 1


def heat_kernel_eval(t: float, g: GroupElement) -> float:
    """``psi_t(x, e^{i alpha}) = p_t(x) q_t(alpha)``, plane Gaussian times theta series."""
    _check_t(t)
    x1, x2 = g.x
    plane = math.exp(-(x1 * x1 + x2 * x2) / (4 * t)) / (4 * math.pi * t)
    n = np.arange(1, theta_terms(t) + 1)
    circle = 1.0 + 2.0 * float(np.sum(np.exp(-(n**2) * t) * np.cos(n * g.alpha)))
    return plane * circle


def heat_multiplier(grid: GridSpec, t: float) -> np.ndarray:
    """``e^{-t |xi|^2} e^{-m^2 t}`` for every mode, shape ``(2M+1, N, N)``."""
    _check_t(t)
    plane = np.exp(-t * grid.xi_abs() ** 2)
    return np.exp(-t * grid.mode_indices.astype(float) ** 2)[:, None, None] * plane[None]


def heat_convolve(f: ModeStack, t: float) -> ModeStack:
    """Convolution with the group heat kernel ``psi_t``."""
    return spatial_inverse(spatial_transform(f).multiply(heat_multiplier(f.grid, t)))


@dataclass(frozen=True, eq=False)
class BargmannFunction:
    """A holomorphic function on ``C^2 x C^*`` given by a damped spectrum."""

    source: SpectralStack
    weights: np.ndarray
    label: str = ""

    @property
    def grid(self) -> GridSpec:
        return self.source.grid

    def damped(self) -> SpectralStack:
        return self.source.multiply(self.weights)

    def restrict(self) -> ModeStack:
        """The function on the real group ``M(2)``."""
        return spatial_inverse(self.damped())

    def __call__(self, p: ComplexGroupPoint) -> complex:
        return holomorphic_eval(self.source, p, self.weights)

    def mode_values(self, zs) -> np.ndarray:
        """Extended modes at points ``zs``, shape ``(2M+1, P)``."""
        return eval_modes(self.source, zs, self.weights)


def bargmann_transform(f: ModeStack, t: float) -> BargmannFunction:
    return BargmannFunction(spatial_transform(f), heat_multiplier(f.grid, t), f"heat t={t}")


def _plane_log_kernel(W: WeightSystem, spec: QuadratureSpec) -> np.ndarray:
    """``log K(xi)`` with ``K(xi) = int e^{-2 xi.y} mu(y) dy`` by a quadrature in ``y``.

    Gauss-Hermite tensor rule for Gaussian-based densities, otherwise a polar
    rule (Gauss-Legendre in ``|y|`` times trapezoid in angle).  Accumulated in
    logs because ``K`` grows like ``sigma``.
    """
    g = W.grid
    k1, k2 = g.xi_mesh()
    mu = W.mu
    logK = np.full(k1.shape, -np.inf)
    if mu.gaussian_t is not None and mu.log_factor is None:
        # the tensor rule factorizes across the two coordinates
        y1, w1 = hermite_rule(spec.hermite_nodes, mu.gaussian_t, 1)
        row = logsumexp(np.log(w1)[None, :] - 2.0 * np.outer(g.xi_axis(), y1[:, 0]), axis=1)
        return row[:, None] + row[None, :]
    if mu.gaussian_t is not None:
        y, w = hermite_rule(spec.hermite_nodes, mu.gaussian_t, 2)
        logw = np.log(w)
        if mu.log_factor is not None:
            logw = logw + mu.log_factor(np.hypot(y[:, 0], y[:, 1]))
        for yq, lw in zip(y, logw):
            logK = np.logaddexp(logK, lw - 2.0 * (k1 * yq[0] + k2 * yq[1]))
        return logK
    r, wr = legendre_rule(spec.radial_nodes, 0.0, W.r_cut)
    phi = circle_points(1.0, spec.circle_nodes)
    s = g.xi_abs()
    for rj, wj in zip(r, wr):
        # trapezoid mean over the circle |y| = r_j, scaled by e^{-2 r_j |xi|}
        avg = np.zeros_like(s)
        for c, d in phi:
            avg += np.exp(-2.0 * rj * (k1 * c + k2 * d + s))
        avg /= len(phi)
        with np.errstate(divide="ignore"):
            term = math.log(wj * rj) + float(mu.log_density(np.array([rj]))[0]) + 2.0 * rj * s + np.log(avg)
        logK = np.logaddexp(logK, term + math.log(2 * math.pi))
    return logK


def _line_moments(nu: Density, n: np.ndarray, spec: QuadratureSpec, u_cut: float) -> np.ndarray:
    """``int e^{2 n u} nu(u) du`` by Gauss-Hermite or Gauss-Legendre."""
    if nu.gaussian_t is not None:
        u, w = hermite_rule(spec.hermite_nodes, nu.gaussian_t, 1)
        u = u[:, 0]
        if nu.log_factor is not None:
            w = w * np.exp(nu.log_factor(u))
    else:
        u, w = legendre_rule(spec.radial_nodes, -u_cut, u_cut)
        w = w * nu(u)
    return np.exp(2.0 * np.outer(n, u)) @ w


def bergman_mode_norms_sq(F: BargmannFunction, W: WeightSystem, spec: QuadratureSpec) -> np.ndarray:
    """Per-mode contributions to ``int |F(z, w)|^2 d mu(y) dx d nu(w)``.

    The ``x``-integral is Parseval on the frequency grid, the ``y`` and ``u``
    integrals are quadratures, and the ``theta``-integral is mode orthogonality.
    """
    g = F.grid
    with np.errstate(divide="ignore"):
        logP = 2.0 * np.log(np.abs(F.damped().modes))
    PK = np.exp(logP + _plane_log_kernel(W, spec)[None])
    D = _line_moments(W.nu, g.mode_indices.astype(float), spec, W.u_cut)
    check_weighted_tail(PK, g, what="Bergman norm")
    return D * np.sum(PK, axis=(1, 2)) * g.dxi**2


def bergman_norm_sq(F: BargmannFunction, W: WeightSystem, spec: QuadratureSpec) -> float:
    return float(np.sum(bergman_mode_norms_sq(F, W, spec)))


def _resolution(grid: GridSpec, spec: QuadratureSpec) -> dict:
    return {
        "L": grid.L,
        "N": grid.N,
        "M": grid.M,
        "hermite_nodes": spec.hermite_nodes,
        "circle_nodes": spec.circle_nodes,
        "radial_nodes": spec.radial_nodes,
    }


def mode_identity_check(
    f: ModeStack, t: float, spec: QuadratureSpec, tol: float = 1e-6, generator: str = "", params=None
) -> VerificationReport:
    """Per-mode identity ``int int |f_m * p_t (x + i y)|^2 dx d mu_t(y) = ||f_m||^2``.

    Reports the worst mode.
    """
    g = f.grid
    F = spatial_transform(f)
    W = canonical_weights(g, t)
    with np.errstate(divide="ignore"):
        logP = 2.0 * np.log(np.abs(F.modes)) - 2 * t * g.xi_abs()[None] ** 2
    lhs = np.sum(np.exp(logP + _plane_log_kernel(W, spec)[None]), axis=(1, 2)) * g.dxi**2
    rhs = F.mode_norms_sq()
    live = rhs > 1e-30 * max(rhs.max(), 1e-300)
    if not np.any(live):
        return VerificationReport.build("bargmann_mode", 0.0, 0.0, tol, generator=generator, params=params)
    rel = np.where(live, np.abs(lhs - rhs) / np.where(live, rhs, 1.0), 0.0)
    i = int(np.argmax(rel))
    return VerificationReport.build(
        "bargmann_mode",
        lhs[i],
        rhs[i],
        tol,
        generator=generator,
        params=dict(params or {}) | {"t": t, "worst_mode": int(g.mode_indices[i])},
        resolution=_resolution(g, spec),
    )


def isometry_check(
    f: ModeStack, t: float, spec: QuadratureSpec, tol: float = 1e-2, generator: str = "", params=None
) -> VerificationReport:
    """``||f * psi_t||^2`` in the weighted Bergman space against ``||f||^2``."""
    W = canonical_weights(f.grid, t)
    lhs = bergman_norm_sq(bargmann_transform(f, t), W, spec)
    return VerificationReport.build(
        "bargmann_isometry",
        lhs,
        l2_norm_sq(f),
        tol,
        generator=generator,
        params=dict(params or {}) | {"t": t},
        resolution=_resolution(f.grid, spec),
        warnings=f.decay_warnings(),
    )


def psi_eval(W: WeightSystem, z) -> complex:
    """``psi(z) = int e^{i a(y)} sigma(y)^{-1/2} e^{-i y.z} dy`` by damped Fourier quadrature."""
    g = W.grid
    z = np.asarray(z, dtype=complex)
    k1, k2 = g.xi_mesh()
    amp = np.exp(-0.5 * W.log_sigma)
    with np.errstate(over="ignore", invalid="ignore"):
        weighted = (amp * np.exp(g.xi_abs() * np.linalg.norm(z.imag))) ** 2
    check_weighted_tail(weighted[None], g, what=f"psi at |Im z| = {np.linalg.norm(z.imag):.3g}")
    vals = amp.astype(complex)
    if W.phase_a is not None:
        vals = vals * np.exp(1j * np.asarray(W.phase_a(k1, k2), dtype=float))
    return complex(np.sum(vals * np.exp(-1j * (k1 * z[0] + k2 * z[1]))) * g.dxi**2)


def chi_eval(W: WeightSystem, w: complex) -> complex:
    """``chi(w) = sum_{|n| <= M} c_n delta(n)^{-1/2} w^n``."""
    if w == 0:
        raise DomainError("chi is defined on C^*")
    n = W.grid.mode_indices
    return complex(np.sum(W.phase_c * np.exp(-0.5 * W.log_delta) * complex(w) ** n.astype(float)))


def chi_tail_bound(W: WeightSystem, w: complex) -> float:
    """Size of the outermost retained terms, ``|w|^{2M} / delta(M)`` and its mirror."""
    M = W.grid.M
    lr = math.log(abs(w))
    return float(max(math.exp(2 * M * lr - W.log_delta[-1]), math.exp(-2 * M * lr - W.log_delta[0])))


def phi_eval(W: WeightSystem, z, w: complex) -> complex:
    return psi_eval(W, z) * chi_eval(W, w)


def generalized_transform(f: ModeStack, W: WeightSystem) -> BargmannFunction:
    """``sum_m (f_m * psi)(z) c_m delta(m)^{-1/2} w^m`` with ``psi`` scaled by ``1 / PSI_SCALE``."""
    return BargmannFunction(spatial_transform(f), W.multiplier(), f"weights {W.mu.name}/{W.nu.name}")


def generalized_isometry_check(
    f: ModeStack, W: WeightSystem, spec: QuadratureSpec, tol: float = 1e-2, generator: str = "", params=None
) -> VerificationReport:
    lhs = bergman_norm_sq(generalized_transform(f, W), W, spec)
    return VerificationReport.build(
        "generalized_isometry",
        lhs,
        l2_norm_sq(f),
        tol,
        generator=generator,
        params=dict(params or {}) | {"mu": W.mu.name, "nu": W.nu.name} | W.mu.params,
        resolution=_resolution(f.grid, spec),
        warnings=f.decay_warnings(),
    )


def invert_multiplier(image: SpectralStack, symbol: np.ndarray, needed: np.ndarray) -> SpectralStack:
    """Divide by a per-mode symbol where ``needed``; elsewhere the result is 0."""
    small = needed & (np.abs(symbol) < SYMBOL_FLOOR)
    if np.any(small):
        m = sorted({int(image.grid.mode_indices[i]) for i in np.nonzero(small)[0]})
        raise NonInvertibleSymbolError(f"symbol below {SYMBOL_FLOOR:g} on needed frequencies in modes {m}")
    safe = np.where(needed, symbol, 1.0)
    return SpectralStack(image.grid, np.where(needed, image.modes / safe, 0.0))


def reconstruction_check(W: WeightSystem, targets, tol: float = 1e-8, generator: str = "") -> VerificationReport:
    """Round trip ``f -> C_phi f -> f`` by inverting the multiplier on the frequency grid.

    ``targets`` is a list of ``(g, m)``: a callable ``g(x1, x2)`` placed in mode ``m``.
    The report carries the worst relative round-trip error.
    """
    from mharm.generators import make_separable

    symbol = W.multiplier()
    worst = 0.0
    for gfun, m in targets:
        F = spatial_transform(make_separable(W.grid, gfun, m))
        image = F.multiply(symbol)
        back = invert_multiplier(image, symbol, F.modes != 0)
        den = math.sqrt(F.norm_sq())
        if den > 0:
            worst = max(worst, math.sqrt(SpectralStack(W.grid, back.modes - F.modes).norm_sq()) / den)
    return VerificationReport.build(
        "reconstruction",
        worst,
        0.0,
        tol,
        generator=generator,
        params={"targets": len(targets), "mu": W.mu.name, "nu": W.nu.name},
        relation="err",
    )


def compact_bound_check(f: ModeStack, W: WeightSystem, zs, tol: float = 1e-12, generator: str = "") -> VerificationReport:
    """Uniform bound ``|f_m * psi (z)| <= C(z) ||f_m||`` on sampled points.

    ``C(z)^2 = (2 pi)^{-2} int e^{-2 xi.Im z} sigma(xi)^{-1} d xi`` by Cauchy-Schwarz;
    the report carries the worst ratio over modes and points.
    """
    g = f.grid
    F = spatial_transform(f)
    zs = np.atleast_2d(np.asarray(zs, dtype=complex))
    plane = np.exp(-0.5 * W.log_sigma)[None].astype(complex)
    vals = np.abs(eval_modes(F, zs, plane))
    k1, k2 = g.xi_mesh()
    y = zs.imag
    C2 = np.array([np.sum(np.exp(-2 * (k1 * a + k2 * b) - W.log_sigma)) for a, b in y]) * g.dxi**2
    C = np.sqrt(C2) / (2 * math.pi)
    norms = np.sqrt(F.mode_norms_sq())
    bound = norms[:, None] * C[None, :]
    live = bound > 0
    ratio = float(np.max(np.where(live, vals / np.where(live, bound, 1.0), 0.0))) if np.any(live) else 0.0
    return VerificationReport.build(
        "compact_bound", ratio, 1.0, tol, generator=generator, params={"points": len(zs)}, relation="le"
    )
