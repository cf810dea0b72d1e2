"""Identity suites: each builds its generators from the config and returns sorted reports."""

from __future__ import annotations

import math
import warnings

import numpy as np

from mharm.bargmann import (
    compact_bound_check,
    generalized_isometry_check,
    isometry_check,
    mode_identity_check,
    reconstruction_check,
)
from mharm.config import SuiteConfig, grid_from
from mharm.errors import (
    ExtensionDomainError,
    InadmissibleWeightError,
    InvalidSpecError,
    NotInRangeError,
    TruncationWarning,
)
from mharm.fourier import hecke_bochner_check, plancherel_check
from mharm.generators import make_bandlimited, make_hecke_bochner, make_heat, make_rough
from mharm.modes import GridSpec, ModeStack, spatial_transform
from mharm.numerics import bessel_asymptotic_check, bessel_bridge_check
from mharm.paley_wiener import bandlimit_check, exponential_type_check, pw_bound_check, unit_directions
from mharm.poisson import (
    OmegaDomain,
    analytic_vectors_check,
    cross_term_check,
    gutzmer_check,
    gutzmer_rhs,
    multiplier_sup,
    poisson_extension_check,
    poisson_invert,
    poisson_round_trip_check,
    poisson_semigroup,
)
from mharm.report import VerificationReport, sort_key
from mharm.weights import (
    Density,
    build_weight_system,
    canonical_weights,
    gaussian_line,
    gaussian_plane,
    gaussian_poly_line,
    gaussian_poly_plane,
)

SUITES = (
    "plancherel",
    "bargmann",
    "generalized-bargmann",
    "gutzmer",
    "poisson",
    "analytic-vectors",
    "paley-wiener",
)


def gaussian_profile(var: float):
    return lambda r: np.exp(-(r * r) / (2.0 * var))


def hecke_bochner_mixture(grid: GridSpec, g, weights=(0, 1, 2)) -> ModeStack:
    """Sum of weight-``m`` Hecke-Bochner functions in mode 0 with coefficients ``2^{-j}``."""
    modes = sum(0.5**j * make_hecke_bochner(grid, g, m, 0).modes for j, m in enumerate(weights))
    return ModeStack(grid, modes)


def _seeds(cfg: SuiteConfig) -> list[int]:
    return list(cfg.seeds)


def _plancherel(cfg: SuiteConfig) -> list[VerificationReport]:
    sec = cfg.section("plancherel")
    tol = cfg.tol("plancherel")
    out = []
    heat_seeds = [None] + _seeds(cfg)
    for s in heat_seeds:
        f = make_heat(cfg.grid, cfg.t, s)
        out.append(plancherel_check(f, cfg.quad, tol, "heat", {"seed": s, "t": cfg.t}))
    g = gaussian_profile(1.0)
    w = tuple(sec.get("hecke_bochner_weights", (0, 1, 2)))
    out.append(plancherel_check(hecke_bochner_mixture(cfg.grid, g, w), cfg.quad, tol, "hecke_bochner_mixture", {"weights": list(w)}))
    bg = grid_from(sec["bandlimited_grid"])
    steep = float(sec["bandlimited_steepness"])
    for s in _seeds(cfg)[:1]:
        f = make_bandlimited(bg, cfg.R, s, steepness=steep)
        out.append(plancherel_check(f, cfg.quad, tol, "bandlimited", {"seed": s, "R": cfg.R, "steepness": steep}))
    return out


def _bargmann(cfg: SuiteConfig) -> list[VerificationReport]:
    sec = cfg.section("bargmann")
    out = []
    for s in [None] + _seeds(cfg):
        f = make_heat(cfg.grid, cfg.t, s)
        p = {"seed": s}
        out.append(mode_identity_check(f, cfg.t, cfg.quad, cfg.tol("bargmann_mode"), "heat", p))
        out.append(isometry_check(f, cfg.t, cfg.quad, cfg.tol("bargmann_isometry"), "heat", p))
    bg = grid_from(sec["bandlimited_grid"])
    steep = float(sec["bandlimited_steepness"])
    f = make_bandlimited(bg, cfg.R, _seeds(cfg)[0], steepness=steep)
    p = {"seed": _seeds(cfg)[0], "R": cfg.R, "steepness": steep}
    out.append(mode_identity_check(f, cfg.t, cfg.quad, cfg.tol("bargmann_mode"), "bandlimited", p))
    out.append(isometry_check(f, cfg.t, cfg.quad, cfg.tol("bargmann_isometry"), "bandlimited", p))
    return out


def _closed_form_checks(cfg: SuiteConfig) -> list[VerificationReport]:
    W = canonical_weights(cfg.grid, cfg.t)
    t = cfg.t
    s = cfg.grid.xi_abs()
    n = cfg.grid.mode_indices.astype(float)
    out = []
    for name, table, exact in (
        ("sigma_table", W.log_sigma, 2.0 * t * s**2),
        ("delta_table", W.log_delta, 2.0 * t * n**2),
    ):
        # compare in the log domain; sigma overflows double range on the grid
        rel = float(np.max(np.abs(np.expm1(table - exact))))
        out.append(
            VerificationReport.build(
                name, rel, 0.0, cfg.tol(name), generator="gaussian", params={"t": t, "entries": int(table.size)}, relation="err"
            )
        )
    return out


def _hole_plane(t: float) -> Density:
    """Gaussian that vanishes on the annulus ``1 <= |y| <= 1.5``."""
    base = gaussian_plane(t)

    def logd(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where((r >= 1.0) & (r <= 1.5), -np.inf, base.log_density(r))

    return Density("gaussian_hole", 2, logd, {"t": t})


def _laplace_plane() -> Density:
    """``(2 pi)^{-1} e^{-|y|}``; its sigma diverges for ``|xi| >= 1/2``."""
    return Density("laplace", 2, lambda r: -np.asarray(r, dtype=float) - math.log(2 * math.pi), {})


def _rejection(cfg: SuiteConfig, label: str, build) -> VerificationReport:
    try:
        build()
        rejected, msg = False, "accepted an inadmissible weight"
    except InadmissibleWeightError as e:
        rejected, msg = True, str(e)
    return VerificationReport.build(
        "weight_rejection",
        0.0 if rejected else 1.0,
        0.0,
        cfg.tol("weight_rejection"),
        generator=label,
        params={"message": msg},
        relation="err",
    )


def _generalized(cfg: SuiteConfig) -> list[VerificationReport]:
    sec = cfg.section("generalized")
    g, t, q = cfg.grid, cfg.t, cfg.quad
    out = _closed_form_checks(cfg)
    canon = canonical_weights(g, t)
    poly = build_weight_system(g, gaussian_poly_plane(t), gaussian_poly_line(t))
    poly_generic = build_weight_system(g, gaussian_poly_plane(t).generic(), gaussian_poly_line(t).generic())
    tol = cfg.tol("generalized_isometry")
    for s in _seeds(cfg)[:1]:
        f = make_heat(g, t, s)
        p = {"seed": s}
        out.append(generalized_isometry_check(f, canon, q, tol, "heat", p | {"quadrature": "hermite"}))
        out.append(generalized_isometry_check(f, poly, q, tol, "heat", p | {"quadrature": "hermite"}))
        out.append(generalized_isometry_check(f, poly_generic, q, tol, "heat", p | {"quadrature": "polar"}))
        zs = [np.array(a) + 1j * np.array(b) for a, b in sec["compact_points"]]
        out.append(compact_bound_check(f, poly, zs, cfg.tol("compact_bound"), "heat"))
    targets = [
        (lambda x1, x2: np.exp(-(x1**2 + x2**2) / 2), 0),
        (lambda x1, x2: (x1 + 1j * x2) * np.exp(-(x1**2 + x2**2) / 2), 1),
        (lambda x1, x2: np.exp(-((x1 - 1) ** 2 + x2**2)), -2),
    ]
    for W in (canon, poly):
        out.append(reconstruction_check(W, targets, cfg.tol("reconstruction"), f"weights {W.mu.name}"))
    bad_c = np.ones(g.n_modes, dtype=complex)
    bad_c[0] = 1.5
    out.append(_rejection(cfg, "mu vanishing on an annulus", lambda: build_weight_system(g, _hole_plane(t), gaussian_line(t))))
    out.append(_rejection(cfg, "mu laplace", lambda: build_weight_system(g, _laplace_plane(), gaussian_line(t))))
    out.append(
        _rejection(cfg, "phase |c_n| != 1", lambda: build_weight_system(g, gaussian_plane(t), gaussian_line(t), phase_c=bad_c))
    )
    return out


def _gutzmer(cfg: SuiteConfig) -> list[VerificationReport]:
    sec = cfg.section("gutzmer")
    phi = math.radians(float(sec["y_direction_deg"]))
    out = []
    for s in _seeds(cfg):
        f = make_heat(cfg.grid, cfg.t, s)
        for fy in sec["y_fractions"]:
            for fr in sec["log_rho_fractions"]:
                r = fy * cfg.t
                y = (r * math.cos(phi), r * math.sin(phi))
                rho = math.exp(fr * cfg.t)
                out.append(gutzmer_check(f, y, rho, cfg.tol("gutzmer"), "heat", {"seed": s, "t": cfg.t}))
    return out


def poisson_samples(s: float, count: int, frac: float) -> list[tuple[tuple[float, float], float]]:
    """Deterministic points of ``Omega_s`` spread over radii, directions and ``ln rho``."""
    pts = []
    for k in range(count):
        r = frac * s * (k + 1) / count
        ang = 2 * math.pi * k / count
        lr = frac * s * (1 - 2 * k / max(count - 1, 1))
        pts.append(((r * math.cos(ang), r * math.sin(ang)), math.exp(lr)))
    return pts


def _poisson(cfg: SuiteConfig) -> list[VerificationReport]:
    sec = cfg.section("poisson")
    g, t = cfg.grid, cfg.t
    s = t / math.sqrt(2.0)
    out = []
    C = multiplier_sup(g, t, s)
    out.append(
        VerificationReport.build(
            "poisson_multiplier",
            C,
            1.0,
            cfg.tol("poisson_multiplier"),
            generator="multiplier",
            params={"t": t, "s": s},
            relation="le",
            fatal=not math.isfinite(C),
        )
    )
    samples = poisson_samples(s, int(sec["samples"]), float(sec["boundary_fraction"]))
    for seed in _seeds(cfg):
        f = make_heat(g, t, seed)
        out.append(poisson_extension_check(f, t, samples, cfg.tol("poisson_extension"), "heat", {"seed": seed}))
        out.append(poisson_round_trip_check(f, float(sec["invert_s"]), cfg.tol("poisson_round_trip"), f"heat(seed={seed})"))

    rough = make_rough(g, seed=_seeds(cfg)[0])
    G = spatial_transform(poisson_semigroup(rough, t))
    y_out = (float(sec["outside_factor"]) * t, 0.0)
    if OmegaDomain(t).contains(y_out, 1.0):
        raise InvalidSpecError("poisson.outside_factor must place the probe outside Omega_t")
    out.append(_divergence(cfg, "rough/gutzmer", lambda: gutzmer_rhs(G, y_out, 1.0), {"y": list(y_out), "t": t}))
    out.append(
        _divergence(
            cfg, "rough/invert", lambda: poisson_invert(rough, float(sec["invert_s"])), {"s": float(sec["invert_s"])}
        )
    )
    return out


def _divergence(cfg: SuiteConfig, label: str, probe, params) -> VerificationReport:
    try:
        probe()
        detected, msg = False, "no divergence detected"
    except (ExtensionDomainError, NotInRangeError) as e:
        detected, msg = True, str(e)
    return VerificationReport.build(
        "poisson_divergence",
        0.0 if detected else 1.0,
        0.0,
        cfg.tol("poisson_divergence"),
        generator=label,
        params=params | {"message": msg},
        relation="err",
    )


def _analytic(cfg: SuiteConfig) -> list[VerificationReport]:
    sec = cfg.section("analytic_vectors")
    g, q = cfg.grid, cfg.quad
    rs = [float(x) for x in sec["r"]] if isinstance(sec["r"], list) else [float(sec["r"])]
    r_mode = "sweep" if len(rs) > 1 else "single"
    rho = math.exp(float(sec["log_rho"]))
    th, yn = float(sec["theta_w"]), int(sec["y_nodes"])
    var = float(sec["profile_variance"])
    prof = gaussian_profile(var)
    cutoff = math.sqrt(2 * var * 40.0)  # profile below e^-40
    out = []
    radii = np.linspace(0.25, 0.5 * g.xi_max, 12)
    tol = cfg.tol("analytic_vectors")
    mix = hecke_bochner_mixture(g, prof)
    for m in (0, 1, 2):
        f = make_hecke_bochner(g, prof, m, 0)
        for r in rs:
            out.append(analytic_vectors_check(f, r, rho, q, tol, f"hecke_bochner(m={m})", {"m": m, "r_mode": r_mode}, th, yn))
        out.append(hecke_bochner_check(prof, m, 0, f, radii, cutoff, q, cfg.tol("hecke_bochner")))
    for r in rs:
        out.append(analytic_vectors_check(mix, r, rho, q, tol, "hecke_bochner_mixture", {"r_mode": r_mode}, th, yn))
        out.append(cross_term_check(mix, (0, 1, 2), r, rho, q, cfg.tol("cross_terms"), th, yn, "hecke_bochner_mixture"))
    for br in sec["bessel_radii"]:
        xi = np.linspace(0.0, 10.0 / br, 41)
        out.append(bessel_bridge_check(br, xi, q, cfg.tol("bessel_bridge")))
    out.append(bessel_asymptotic_check(100.0, cfg.tol("bessel_asymptotic")))
    return out


def _paley_wiener(cfg: SuiteConfig) -> list[VerificationReport]:
    sec = cfg.section("paley_wiener")
    g = grid_from(sec["grid"])
    R = cfg.R
    zs = [np.array(a) + 1j * np.array(b) for a, b in sec["z_samples"]]
    dirs = unit_directions(int(sec["directions"]))
    out = []
    for s in _seeds(cfg):
        f = make_bandlimited(g, R, s, steepness=float(sec["steepness"]))
        label = f"bandlimited(seed={s})"
        out.append(bandlimit_check(f, R, cfg.tol("bandlimit"), label))
        for m in sec["multi_indices"]:
            out.append(pw_bound_check(f, R, m, zs, tol=cfg.tol("pw_bound"), generator=label))
        out.append(
            exponential_type_check(
                f, R, dirs, float(sec["s_max"]), float(sec["eps"]), cfg.tol("exponential_type"), label
            )
        )
    return out


RUNNERS = {
    "plancherel": _plancherel,
    "bargmann": _bargmann,
    "generalized-bargmann": _generalized,
    "gutzmer": _gutzmer,
    "poisson": _poisson,
    "analytic-vectors": _analytic,
    "paley-wiener": _paley_wiener,
}


def run_suite(config: SuiteConfig, suite: str) -> list[VerificationReport]:
    """Run one named suite, or ``"all"``, and return its reports sorted by check and parameters.

    Truncation warnings raised inside a check are attached to nothing and
    silenced here; checks record the warnings that matter in their reports.
    """
    if suite == "all":
        names = SUITES
    elif suite in RUNNERS:
        names = (suite,)
    else:
        raise InvalidSpecError(f"unknown suite {suite!r}; choose from {', '.join(SUITES + ('all',))}")
    reports = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        for name in names:
            reports.extend(RUNNERS[name](config))
    return sorted(reports, key=sort_key)
