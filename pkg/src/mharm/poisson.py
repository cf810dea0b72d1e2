"""Gutzmer identity, Poisson semigroups and analytic vectors.

The Gutzmer functional of ``f`` at ``(y, rho)`` is
``int |f(x + i y, rho e^{i theta})|^2 dx d(theta)/2 pi``; by Parseval and
mode orthogonality it equals ``sum_n rho^{2n} int |f~_n(xi)|^2 e^{-2 xi.y} d xi``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from mharm.errors import AliasingError, DomainError, ExtensionDomainError, NotInRangeError, TruncationWarning
from mharm.fourier import PLANCHEREL_FACTOR, fourier_operators, spectral_cutoff
from mharm.group import complex_rotation
from mharm.modes import (
    GridSpec,
    ModeStack,
    SpectralStack,
    alpha_grid,
    check_weighted_tail,
    eval_modes_affine,
    eval_modes_shifted,
    l2_norm_sq,
    spatial_inverse,
    spatial_transform,
)
from mharm.numerics import QuadratureSpec, circle_points, legendre_rule
from mharm.report import VerificationReport

AFFINE_SUPPORT = 1e-15  # below this the FFT spectrum is round-off


@dataclass(frozen=True)
class OmegaDomain:
    """``|Im z| < s`` and ``e^{-s} < |w| < e^{s}``."""

    s: float

    def __post_init__(self) -> None:
        if not self.s > 0:
            raise DomainError("domain radius must be positive")

    def contains(self, y, rho: float) -> bool:
        return bool(np.linalg.norm(np.asarray(y, dtype=float)) < self.s and abs(math.log(rho)) < self.s)


def _resolution(grid: GridSpec, spec: QuadratureSpec | None = None) -> dict:
    d = {"L": grid.L, "N": grid.N, "M": grid.M}
    if spec is not None:
        d |= {"circle_nodes": spec.circle_nodes, "radial_nodes": spec.radial_nodes}
    return d


def gutzmer_rhs(F: SpectralStack, y, rho: float, tail_tol: float = 1e-3) -> float:
    """``sum_n rho^{2n} int |f~_n|^2 e^{-2 xi.y} d xi``; raises on an undecayed tail."""
    g = F.grid
    k1, k2 = g.xi_mesh()
    with np.errstate(over="ignore", invalid="ignore"):
        w = np.abs(F.modes) ** 2 * np.exp(-2 * (k1 * y[0] + k2 * y[1]))[None]
        w = w * (rho ** (2.0 * g.mode_indices))[:, None, None]
    check_weighted_tail(w, g, tail_tol, what=f"Gutzmer sum at |y| = {np.hypot(*y):.3g}, rho = {rho:.3g}")
    return float(np.sum(w) * g.dxi**2)


def gutzmer_lhs(F: SpectralStack, y, rho: float, theta_nodes: int | None = None) -> float:
    """``int |f(x + i y, rho e^{i theta})|^2 dx d(theta)/2 pi`` on the x-grid with theta-trapezoid."""
    g = F.grid
    nt = theta_nodes or 2 * g.n_modes
    if nt < g.n_modes:
        raise AliasingError("theta quadrature cannot resolve all modes")
    G = eval_modes_shifted(F, y)
    th = alpha_grid(nt)
    ph = (rho ** g.mode_indices.astype(float))[None, :] * np.exp(1j * np.outer(th, g.mode_indices))
    total = 0.0
    for row in ph:
        total += float(np.sum(np.abs(np.tensordot(row, G, axes=(0, 0))) ** 2))
    return total * g.h**2 / nt


def gutzmer_check(
    f: ModeStack, y, rho: float, tol: float = 1e-6, generator: str = "", params=None, theta_nodes=None
) -> VerificationReport:
    y = np.asarray(y, dtype=float)
    F = spatial_transform(f)
    rhs = gutzmer_rhs(F, y, rho)
    lhs = gutzmer_lhs(F, y, rho, theta_nodes)
    return VerificationReport.build(
        "gutzmer",
        lhs,
        rhs,
        tol,
        generator=generator,
        params=dict(params or {}) | {"y": [float(y[0]), float(y[1])], "rho": float(rho)},
        resolution=_resolution(f.grid),
        warnings=f.decay_warnings(),
    )


def poisson_multiplier(grid: GridSpec, t: float) -> np.ndarray:
    """``e^{-t (|xi|^2 + m^2)^{1/2}}``, shape ``(2M+1, N, N)``."""
    m = grid.mode_indices.astype(float)[:, None, None]
    return np.exp(-t * np.sqrt(grid.xi_abs()[None] ** 2 + m**2))


def product_poisson_multiplier(grid: GridSpec, t: float) -> np.ndarray:
    """``e^{-t |xi|} e^{-t |m|}``."""
    m = np.abs(grid.mode_indices.astype(float))[:, None, None]
    return np.exp(-t * grid.xi_abs())[None] * np.exp(-t * m)


def _check_t(t: float, allow_zero: bool = False) -> None:
    if not (t > 0 or (allow_zero and t == 0)):
        raise DomainError(f"semigroup time must be positive, got {t}")


def poisson_semigroup(f: ModeStack, t: float) -> ModeStack:
    """``e^{-t Delta^{1/2}} f``."""
    _check_t(t)
    return spatial_inverse(spatial_transform(f).multiply(poisson_multiplier(f.grid, t)))


def product_poisson(f: ModeStack, t: float) -> ModeStack:
    """Product semigroup with multiplier ``e^{-t |xi|} e^{-t |m|}``."""
    _check_t(t)
    return spatial_inverse(spatial_transform(f).multiply(product_poisson_multiplier(f.grid, t)))


def multiplier_sup(grid: GridSpec, t: float, s: float) -> float:
    """``sup_{xi, m} e^{-2 t (|xi|^2 + m^2)^{1/2}} e^{2 |xi| s} e^{2 |m| s}`` over the grid."""
    m = np.abs(grid.mode_indices.astype(float))[:, None, None]
    a = grid.xi_abs()[None]
    expo = -2 * t * np.sqrt(a**2 + m**2) + 2 * s * (a + m)
    return float(np.exp(np.max(expo)))


def poisson_extension_check(
    f: ModeStack, t: float, samples, tol: float = 1e-10, generator: str = "", params=None
) -> VerificationReport:
    """Forward half of the Poisson characterization on ``Omega_{t / sqrt 2}``.

    For ``g = e^{-t Delta^{1/2}} f`` the Gutzmer functional at each sample is
    computed on the x-grid and compared with ``C ||f||^2``, where ``C`` is the
    grid supremum of the amplified multiplier at ``s = t / sqrt 2``.
    """
    s = t / math.sqrt(2.0)
    dom = OmegaDomain(s)
    for y, rho in samples:
        if not dom.contains(y, rho):
            raise DomainError(f"sample y={tuple(y)}, rho={rho} lies outside Omega_{{{s:.4g}}}")
    C = multiplier_sup(f.grid, t, s)
    G = spatial_transform(poisson_semigroup(f, t))
    vals = []
    for y, rho in samples:
        y = np.asarray(y, dtype=float)
        gutzmer_rhs(G, y, rho)  # divergence guard
        vals.append(gutzmer_lhs(G, y, rho))
    sup = max(vals) if vals else 0.0
    if not math.isfinite(sup):
        raise ExtensionDomainError("Gutzmer functional is not finite")
    return VerificationReport.build(
        "poisson_extension",
        sup,
        C * l2_norm_sq(f),
        tol,
        generator=generator,
        params=dict(params or {}) | {"t": t, "s": s, "C": C, "samples": len(samples)},
        resolution=_resolution(f.grid),
        relation="le",
    )


def poisson_invert(g: ModeStack, s: float, tail_tol: float = 1e-3) -> ModeStack:
    """Recover ``f`` from ``g = e^{-s Delta^{1/2}} f``.

    Raises
    ------
    NotInRangeError
        When the amplified spectrum ``|g~_m|^2 e^{2 s (|xi|^2 + m^2)^{1/2}}`` has
        not decayed at the edge of the grid.
    """
    _check_t(s, allow_zero=True)
    G = spatial_transform(g)
    if s == 0:
        return g
    amp = 1.0 / poisson_multiplier(g.grid, s)
    try:
        check_weighted_tail(np.abs(G.modes * amp) ** 2, g.grid, tail_tol, what=f"amplified spectrum at s = {s:g}")
    except ExtensionDomainError as e:
        raise NotInRangeError(str(e)) from None
    return spatial_inverse(G.multiply(amp))


def poisson_round_trip_check(f: ModeStack, s: float, tol: float = 1e-8, generator: str = "") -> VerificationReport:
    back = poisson_invert(poisson_semigroup(f, s), s)
    den = math.sqrt(l2_norm_sq(f))
    err = math.sqrt(l2_norm_sq(ModeStack(f.grid, back.modes - f.modes))) / den if den > 0 else 0.0
    return VerificationReport.build(
        "poisson_round_trip", err, 0.0, tol, generator=generator, params={"s": s}, relation="err"
    )


def angular_project(f: ModeStack, m: int, nodes: int | None = None) -> ModeStack:
    """``f^m(x, alpha) = (2 pi)^{-1} int f(R(theta) x, alpha) e^{-i m theta} d theta``.

    Rotations are applied exactly through the trigonometric interpolant of the
    grid samples; ``nodes`` equispaced rotation angles are used.
    """
    g = f.grid
    nt = nodes or max(64, 4 * g.M + 1)
    if abs(m) >= nt // 2:
        raise AliasingError(f"{nt} rotation angles cannot resolve weight {m}")
    F = spatial_transform(f)
    x1, x2 = g.x_mesh()
    outside = np.hypot(x1, x2) > g.L
    mass = np.sum(np.abs(f.modes) ** 2, axis=0)
    if mass.sum() > 0 and mass[outside].sum() > 1e-20 * mass.sum():
        warnings.warn(
            "function not negligible outside the inscribed disc; rotations wrap around the box",
            TruncationWarning,
            stacklevel=2,
        )
    live = [i for i in range(g.n_modes) if np.any(F.modes[i])]
    out = np.zeros((g.n_modes, g.N, g.N), dtype=complex)
    if not live:
        return ModeStack(g, out)
    sub = SpectralStack(g, F.modes)
    for th in alpha_grid(nt):
        vals = eval_modes_affine(sub, complex_rotation(0.0, th), np.zeros(2), support_tol=AFFINE_SUPPORT * _peak(F))
        out += vals * np.exp(-1j * m * th)
    return ModeStack(g, out / nt)


def _peak(F: SpectralStack) -> float:
    return float(np.max(np.abs(F.modes))) if F.modes.size else 0.0


def roundoff_amplification(f: ModeStack, A) -> float:
    """Largest factor ``e^{|Im(A^T xi)| sqrt(2) L}`` over the retained frequencies."""
    g = f.grid
    F = spatial_transform(f)
    k1, k2 = g.xi_mesh()
    mask = np.max(np.abs(F.modes), axis=0) > AFFINE_SUPPORT * _peak(F)
    if not np.any(mask):
        return 1.0
    c = np.stack([k1[mask], k2[mask]], axis=1) @ np.asarray(A, dtype=complex)
    return float(np.exp(np.max(np.linalg.norm(c.imag, axis=1)) * math.sqrt(2.0) * g.L))


def _hs_on_circle(ops, a, w, y_nodes, theta_eval, x=None):
    """``||U^a_{(x + i y, w)} T||_HS^2`` for each radial node and each ``y`` node.

    Returns an array ``(len(a), len(y_nodes))``.
    """
    out = np.empty((len(a), len(y_nodes)))
    cos, sin = np.cos(theta_eval), np.sin(theta_eval)
    for i, (T, ai) in enumerate(zip(ops, a)):
        k = T.rows
        Tw = T.entries * np.exp(-k * complex(math.log(abs(w)), np.angle(w)))[:, None]
        S = np.exp(1j * np.outer(theta_eval, k)) @ Tw  # (theta, n)
        col = np.sum(np.abs(S) ** 2, axis=1)
        for j, y in enumerate(y_nodes):
            z1 = (0.0 if x is None else x[0]) + 1j * y[0]
            z2 = (0.0 if x is None else x[1]) + 1j * y[1]
            ph = np.exp(1j * ai * (z1 * cos + z2 * sin))
            out[i, j] = float(np.mean(np.abs(ph) ** 2 * col))
    return out


def analytic_vectors_sides(
    f: ModeStack,
    r: float,
    rho: float,
    spec: QuadratureSpec,
    theta_w: float = 0.3,
    y_nodes: int = 16,
    x_spots: int = 3,
    seed: int = 0,
):
    """Both sides of the Hilbert-Schmidt identity for the complexified representations.

    LHS is ``2 pi int_0^oo circle-mean_{|y| = r} ||U^a_{(x+iy, w)} f^(a)||_HS^2 a da``
    with ``|w| = rho``, assembled from operator matrices.  RHS is the circle
    mean of ``int |f(w^{-1}(x + i y), rho^{-1} e^{i alpha})|^2 dx d(alpha)/2 pi``
    evaluated on the x-grid.  Returns ``(lhs, rhs, x_spread)`` where ``x_spread``
    is the largest relative change of the LHS over random choices of ``x``.
    """
    if not r > 0 or not rho > 0:
        raise DomainError("r and rho must be positive")
    g = f.grid
    F = spatial_transform(f)
    w = rho * complex(math.cos(theta_w), math.sin(theta_w))
    cut = spec.radial_cutoff or spectral_cutoff(F)
    a, wa = legendre_rule(spec.radial_nodes, 0.0, cut)
    ops = fourier_operators(f, a, spec.circle_nodes)
    ys = circle_points(r, y_nodes)
    theta_eval = alpha_grid(4 * spec.circle_nodes)
    hs = _hs_on_circle(ops, a, w, ys, theta_eval)
    # the exponential weight must have decayed by the radial cutoff
    prof = hs.mean(axis=1) * a
    if prof.max() > 0 and prof[-1] > 1e-8 * prof.max() and cut < g.xi_max:
        raise ExtensionDomainError(f"weighted HS norm has not decayed by a = {cut:.3g}")
    lhs = PLANCHEREL_FACTOR * float(np.sum(wa * a * hs.mean(axis=1)))

    rng = np.random.default_rng(seed)
    spread = 0.0
    for _ in range(x_spots):
        x = rng.uniform(-g.L / 2, g.L / 2, size=2)
        hx = _hs_on_circle(ops, a, w, ys, theta_eval, x)
        other = PLANCHEREL_FACTOR * float(np.sum(wa * a * hx.mean(axis=1)))
        spread = max(spread, abs(other - lhs) / max(abs(lhs), 1e-300))

    A = complex_rotation(-math.log(rho), -theta_w)
    live = np.sum(np.abs(F.modes) ** 2, axis=(1, 2)) > 0
    scale = rho ** (-2.0 * g.mode_indices)
    peak = _peak(F)
    acc = 0.0
    for y in ys:
        vals = eval_modes_affine(F, A, A @ (1j * y), support_tol=AFFINE_SUPPORT * peak)
        per_mode = np.sum(np.abs(vals) ** 2, axis=(1, 2)) * g.h**2
        if not np.all(np.isfinite(per_mode[live])):
            raise ExtensionDomainError("complexified evaluation overflowed")
        acc += float(np.sum(np.where(live, per_mode * scale, 0.0)))
    rhs = acc / len(ys)
    return lhs, rhs, spread


def analytic_vectors_check(
    f: ModeStack,
    r: float,
    rho: float,
    spec: QuadratureSpec,
    tol: float = 1e-3,
    generator: str = "",
    params=None,
    theta_w: float = 0.3,
    y_nodes: int = 16,
) -> VerificationReport:
    lhs, rhs, spread = analytic_vectors_sides(f, r, rho, spec, theta_w, y_nodes)
    warn = f.decay_warnings()
    amp = roundoff_amplification(f, complex_rotation(-math.log(rho), -theta_w))
    if amp * np.finfo(float).eps > 1e-3:
        warn.append(f"complex rotation amplifies spectral round-off by up to {amp:.1e}")
    if spread > 1e-10:
        warn.append(f"LHS varies with x by {spread:.2e}")
    return VerificationReport.build(
        "analytic_vectors",
        lhs,
        rhs,
        tol,
        generator=generator,
        params=dict(params or {}) | {"r": r, "rho": rho, "theta_w": theta_w, "x_spread": spread},
        resolution=_resolution(f.grid, spec),
        warnings=warn,
    )


def cross_term_check(
    f: ModeStack,
    weights,
    r: float,
    rho: float,
    spec: QuadratureSpec,
    tol: float = 1e-10,
    theta_w: float = 0.3,
    y_nodes: int = 16,
    generator: str = "",
) -> VerificationReport:
    """Circle-averaged mixed HS products of distinct rotation-weight projections.

    Reports ``max |<U f^(m), U f^(l)>| / sqrt(||U f^(m)||^2 ||U f^(l)||^2)``
    over pairs ``m != l`` of ``weights``.
    """
    F = spatial_transform(f)
    cut = spec.radial_cutoff or spectral_cutoff(F)
    a, wa = legendre_rule(spec.radial_nodes, 0.0, cut)
    ops = fourier_operators(f, a, spec.circle_nodes)
    ys = circle_points(r, y_nodes)
    th = alpha_grid(4 * spec.circle_nodes)
    cos, sin = np.cos(th), np.sin(th)
    weights = list(weights)
    gram = np.zeros((len(weights), len(weights)), dtype=complex)
    for T, ai, wi in zip(ops, a, wa):
        Tw = [T.projection(m) for m in weights]
        S = []
        for P in Tw:
            k = P.rows
            S.append(np.exp(1j * np.outer(th, k)) @ (P.entries * np.exp(-k * complex(math.log(rho), theta_w))[:, None]))
        damp = np.mean([np.exp(-2 * ai * (y[0] * cos + y[1] * sin)) for y in ys], axis=0)
        for i in range(len(weights)):
            for j in range(len(weights)):
                gram[i, j] += wi * ai * np.mean(damp * np.sum(S[i] * np.conj(S[j]), axis=1))
    worst = 0.0
    for i in range(len(weights)):
        for j in range(len(weights)):
            if i != j:
                den = math.sqrt(abs(gram[i, i].real * gram[j, j].real))
                if den > 0:
                    worst = max(worst, abs(gram[i, j]) / den)
    return VerificationReport.build(
        "cross_terms",
        worst,
        0.0,
        tol,
        generator=generator,
        params={"weights": weights, "r": r, "rho": rho},
        relation="err",
    )
