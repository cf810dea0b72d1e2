"""Weight systems for generalized Segal-Bargmann transforms.

A weight system pairs a radial density ``mu`` on the imaginary parts
``y`` of ``z = x + i y`` with a density ``nu`` on ``C^*`` that is invariant
under rotations.  Writing ``w = e^{u + i theta}``, the density of ``nu`` is
given in ``u`` with respect to ``du d(theta)/2 pi``.  The transform needs

    sigma(xi) = int e^{2 xi.y} mu(y) dy,     delta(n) = int e^{2 n u} nu(u) du,

which are tabulated once, in log form, on the frequency grid and for
``|n| <= M``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import logsumexp

from mharm.errors import DomainError, InadmissibleWeightError, InvalidSpecError
from mharm.modes import GridSpec
from mharm.numerics import legendre_rule, log_bessel_I0

TABLE_NODES = 256
CUT_LIMIT = 1e3
TAIL_LOG_DROP = 36.0  # e^-36 ~ 2e-16 relative tail


@dataclass(frozen=True, eq=False)
class Density:
    """A positive density known through its logarithm.

    ``gaussian_t`` marks densities of the form ``N(0, t) * factor``; those
    integrals can use Gauss-Hermite rules with ``log_factor`` folded into the
    integrand.  ``dim`` is 2 for plane densities (argument ``|y|``) and 1 for
    line densities (argument ``u``).
    """

    name: str
    dim: int
    log_density: Callable[[np.ndarray], np.ndarray]
    params: dict = field(default_factory=dict)
    gaussian_t: float | None = None
    log_factor: Callable[[np.ndarray], np.ndarray] | None = None

    def __call__(self, r):
        return np.exp(self.log_density(np.asarray(r, dtype=float)))

    def generic(self) -> Density:
        """Same density without the Gaussian marker, forcing generic quadrature."""
        return Density(self.name, self.dim, self.log_density, dict(self.params))


def _check_t(t: float) -> float:
    if not t > 0:
        raise DomainError("t must be positive")
    return float(t)


def gaussian_plane(t: float) -> Density:
    """``(2 pi t)^{-1} e^{-|y|^2 / 2t}``."""
    t = _check_t(t)
    return Density(
        "gaussian",
        2,
        lambda r: -(r**2) / (2 * t) - math.log(2 * math.pi * t),
        {"t": t},
        gaussian_t=t,
    )


def gaussian_poly_plane(t: float) -> Density:
    """``(2 pi t)^{-1} e^{-|y|^2 / 2t} (1 + |y|^2) / (1 + 2t)``, a probability density."""
    t = _check_t(t)
    c = math.log1p(2 * t)
    return Density(
        "gaussian_poly",
        2,
        lambda r: -(r**2) / (2 * t) - math.log(2 * math.pi * t) + np.log1p(r**2) - c,
        {"t": t},
        gaussian_t=t,
        log_factor=lambda r: np.log1p(r**2) - c,
    )


def gaussian_line(t: float) -> Density:
    """``(2 pi t)^{-1/2} e^{-u^2 / 2t}``."""
    t = _check_t(t)
    return Density(
        "gaussian",
        1,
        lambda u: -(u**2) / (2 * t) - 0.5 * math.log(2 * math.pi * t),
        {"t": t},
        gaussian_t=t,
    )


def gaussian_poly_line(t: float) -> Density:
    """``(2 pi t)^{-1/2} e^{-u^2 / 2t} (1 + u^2) / (1 + t)``."""
    t = _check_t(t)
    c = math.log1p(t)
    return Density(
        "gaussian_poly",
        1,
        lambda u: -(u**2) / (2 * t) - 0.5 * math.log(2 * math.pi * t) + np.log1p(u**2) - c,
        {"t": t},
        gaussian_t=t,
        log_factor=lambda u: np.log1p(u**2) - c,
    )


DENSITIES = {
    (2, "gaussian"): gaussian_plane,
    (2, "gaussian_poly"): gaussian_poly_plane,
    (1, "gaussian"): gaussian_line,
    (1, "gaussian_poly"): gaussian_poly_line,
}


def density_from_record(dim: int, name: str, params: dict) -> Density:
    try:
        return DENSITIES[(dim, name)](**params)
    except KeyError:
        raise InvalidSpecError(f"no density named {name!r} in dimension {dim}") from None


def sigma_closed_form_gaussian(t: float, xi_abs):
    """``sigma`` for :func:`gaussian_plane`: ``e^{2 t |xi|^2}``."""
    return np.exp(2 * t * np.asarray(xi_abs) ** 2)


def delta_closed_form_gaussian(t: float, n):
    """``delta`` for :func:`gaussian_line`: ``e^{2 n^2 t}``."""
    return np.exp(2 * t * np.asarray(n, dtype=float) ** 2)


def _log_sigma_integrand(mu: Density, s: np.ndarray, r: np.ndarray) -> np.ndarray:
    # 2 pi int_0^oo I_0(2 s r) mu(r) r dr, integrand in logs on an (s, r) mesh
    with np.errstate(divide="ignore"):
        return log_bessel_I0(2.0 * np.outer(s, r)) + mu.log_density(r)[None, :] + np.log(r)[None, :]


def _log_delta_integrand(nu: Density, n: np.ndarray, u: np.ndarray) -> np.ndarray:
    return 2.0 * np.outer(n, u) + nu.log_density(u)[None, :]


def _tail_ok(log_vals: np.ndarray, edge: np.ndarray) -> bool:
    peak = np.max(log_vals, axis=1)
    return bool(np.all(np.max(edge, axis=1) < peak - TAIL_LOG_DROP))


def plane_cutoff(mu: Density, s_max: float, nodes: int = TABLE_NODES) -> float:
    """Radius beyond which ``e^{2 s_max r} mu(r) r`` is negligible."""
    rc = 1.0
    while rc <= CUT_LIMIT:
        r, _ = legendre_rule(nodes, 0.0, rc)
        vals = _log_sigma_integrand(mu, np.array([s_max]), r)
        edge = _log_sigma_integrand(mu, np.array([s_max]), np.array([rc]))
        if not np.any(np.isnan(vals) | (vals == np.inf)) and _tail_ok(vals, edge):
            return rc
        rc *= 1.5
    raise InadmissibleWeightError(
        f"sigma(x) = int e^(2 x.y) mu(y) dy diverges at |x| = {s_max:.4g}: the mu-integrand does not decay"
    )


def line_cutoff(nu: Density, n_max: int, nodes: int = TABLE_NODES) -> float:
    """Half-width beyond which ``e^{+-2 n_max u} nu(u)`` is negligible."""
    uc = 1.0
    n = np.array([-float(n_max), float(n_max)])
    while uc <= CUT_LIMIT:
        u, _ = legendre_rule(nodes, -uc, uc)
        vals = _log_delta_integrand(nu, n, u)
        edge = _log_delta_integrand(nu, n, np.array([-uc, uc]))
        if not np.any(np.isnan(vals) | (vals == np.inf)) and _tail_ok(vals, edge):
            return uc
        uc *= 1.5
    raise InadmissibleWeightError(
        f"delta(n) = int |w|^(2n) d nu(w) diverges for |n| = {n_max}: the nu-integrand does not decay"
    )


def log_sigma(mu: Density, s, r_cut: float, nodes: int = TABLE_NODES) -> np.ndarray:
    """``log sigma`` at radii ``s`` by Gauss-Legendre on ``[0, r_cut]`` with the Bessel kernel."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    r, w = legendre_rule(nodes, 0.0, r_cut)
    return math.log(2 * math.pi) + logsumexp(_log_sigma_integrand(mu, s, r), b=w[None, :], axis=1)


def log_delta(nu: Density, n, u_cut: float, nodes: int = TABLE_NODES) -> np.ndarray:
    n = np.atleast_1d(np.asarray(n, dtype=float))
    u, w = legendre_rule(nodes, -u_cut, u_cut)
    return logsumexp(_log_delta_integrand(nu, n, u), b=w[None, :], axis=1)


def _check_positive(d: Density, pts: np.ndarray, what: str, var: str) -> None:
    with np.errstate(divide="ignore"):
        v = d.log_density(pts)
    if not np.all(np.isfinite(v)):
        bad = pts[~np.isfinite(v)]
        raise InadmissibleWeightError(
            f"{what} is not locally bounded away from zero: it vanishes at {var} = {bad[0]:.4g}"
        )


@dataclass(frozen=True, eq=False)
class WeightSystem:
    """Tabulated, validated weight data for one frequency grid."""

    grid: GridSpec
    mu: Density
    nu: Density
    log_sigma: np.ndarray
    log_delta: np.ndarray
    phase_c: np.ndarray
    phase_a: Callable | None = None
    r_cut: float = 0.0
    u_cut: float = 0.0

    @property
    def sigma_table(self) -> np.ndarray:
        return np.exp(self.log_sigma)

    @property
    def delta_table(self) -> np.ndarray:
        return np.exp(self.log_delta)

    @property
    def is_canonical(self) -> bool:
        return (
            self.mu.name == "gaussian"
            and self.nu.name == "gaussian"
            and self.mu.gaussian_t is not None
            and self.mu.gaussian_t == self.nu.gaussian_t
            and self.phase_a is None
            and bool(np.all(self.phase_c == 1))
        )

    def multiplier(self) -> np.ndarray:
        """Per-mode multiplier ``e^{i a(-xi)} sigma(xi)^{-1/2} c_m delta(m)^{-1/2}``.

        The reflection ``a(-xi)`` appears because the kernel's defining integral
        uses ``e^{-i y.z}`` while the spectrum uses ``e^{+i xi.x}`` for synthesis.
        """
        plane = np.exp(-0.5 * self.log_sigma).astype(complex)
        if self.phase_a is not None:
            k1, k2 = self.grid.xi_mesh()
            plane = plane * np.exp(1j * np.asarray(self.phase_a(-k1, -k2), dtype=float))
        per_mode = self.phase_c * np.exp(-0.5 * self.log_delta)
        return per_mode[:, None, None] * plane[None, :, :]


def build_weight_system(
    grid: GridSpec,
    mu: Density,
    nu: Density,
    phase_a: Callable | None = None,
    phase_c=None,
    nodes: int = TABLE_NODES,
) -> WeightSystem:
    """Validate a weight pair and tabulate ``sigma`` on the frequency grid and ``delta(n)``.

    Raises
    ------
    InadmissibleWeightError
        If ``mu`` or ``nu`` vanishes somewhere, or ``sigma`` / ``delta``
        diverges within the grid range, or some ``|c_n| != 1``.
    """
    if mu.dim != 2 or nu.dim != 1:
        raise InvalidSpecError("mu must be a plane density and nu a line density")
    s_max = float(np.max(grid.xi_abs()))
    r_cut = plane_cutoff(mu, s_max, nodes)
    u_cut = line_cutoff(nu, grid.M, nodes)
    _check_positive(mu, np.linspace(0.0, r_cut, 4 * nodes), "mu", "|y|")
    _check_positive(nu, np.linspace(-u_cut, u_cut, 4 * nodes), "nu", "u")

    s = grid.xi_abs()
    uniq, inv = np.unique(s.ravel(), return_inverse=True)
    ls = log_sigma(mu, uniq, r_cut, nodes)[inv].reshape(s.shape)
    ld = log_delta(nu, grid.mode_indices, u_cut, nodes)
    if not (np.all(np.isfinite(ls)) and np.all(np.isfinite(ld))):
        raise InadmissibleWeightError("sigma or delta table has non-finite entries")

    if phase_c is None:
        c = np.ones(grid.n_modes, dtype=complex)
    else:
        c = np.asarray(phase_c, dtype=complex)
        if c.shape != (grid.n_modes,):
            raise InvalidSpecError(f"phase_c needs {grid.n_modes} entries")
        if not np.allclose(np.abs(c), 1.0, rtol=0, atol=1e-12):
            raise InadmissibleWeightError("phase sequence must satisfy |c_n| = 1")
    for a in (ls, ld, c):
        a.flags.writeable = False
    return WeightSystem(grid, mu, nu, ls, ld, c, phase_a, r_cut, u_cut)


def canonical_weights(grid: GridSpec, t: float) -> WeightSystem:
    """The Gaussian pair attached to the heat kernel at time ``t``."""
    return build_weight_system(grid, gaussian_plane(t), gaussian_line(t))
