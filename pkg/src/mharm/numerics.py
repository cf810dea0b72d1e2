"""Quadrature rules and the special functions the identity checks rely on."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from numpy.polynomial.legendre import leggauss
from scipy.special import jv

from mharm.errors import DomainError, InvalidSpecError, TruncationWarning

I0_SWITCH = 20.0


@dataclass(frozen=True)
class QuadratureSpec:
    """Node counts for the 1-D rules used across the package.

    ``radial_cutoff`` truncates half-line integrals; ``None`` lets each caller
    pick a cutoff from the decay of its integrand.
    """

    hermite_nodes: int = 32
    circle_nodes: int = 64
    radial_nodes: int = 96
    radial_cutoff: float | None = None

    def __post_init__(self) -> None:
        for name in ("hermite_nodes", "circle_nodes", "radial_nodes"):
            if int(getattr(self, name)) < 4:
                raise InvalidSpecError(f"{name} must be >= 4, got {getattr(self, name)}")
        if self.radial_cutoff is not None and not self.radial_cutoff > 0:
            raise InvalidSpecError("radial_cutoff must be positive")

    def doubled(self) -> QuadratureSpec:
        return QuadratureSpec(
            2 * self.hermite_nodes, 2 * self.circle_nodes, 2 * self.radial_nodes, self.radial_cutoff
        )


@lru_cache(maxsize=64)
def _hermite_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = hermegauss(n)
    w = w / math.sqrt(2.0 * math.pi)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


@lru_cache(maxsize=64)
def _legendre_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(n)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def hermite_rule(n: int, t: float, d: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Nodes ``(n**d, d)`` and weights for the centred Gaussian of variance ``t`` per axis."""
    if n < 1:
        raise InvalidSpecError("need at least one Hermite node")
    if not t > 0:
        raise DomainError("variance t must be positive")
    x, w = _hermite_rule(int(n))
    x = math.sqrt(t) * x
    if d == 1:
        return x[:, None], w.copy()
    if d == 2:
        X1, X2 = np.meshgrid(x, x, indexing="ij")
        W = np.outer(w, w)
        return np.stack([X1.ravel(), X2.ravel()], axis=1), W.ravel()
    raise InvalidSpecError("dimension must be 1 or 2")


def legendre_rule(n: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on ``[a, b]``."""
    if n < 1:
        raise InvalidSpecError("need at least one Legendre node")
    x, w = _legendre_rule(int(n))
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def gauss_hermite_integrate(f, t: float, d: int = 1, nodes: int = 32) -> complex:
    """Integrate ``f`` against the normalized Gaussian ``(2 pi t)^{-d/2} exp(-|y|^2 / 2t)``.

    ``f`` receives an array of shape ``(n, d)`` and returns ``n`` values.
    """
    y, w = hermite_rule(nodes, t, d)
    vals = np.asarray(f(y))
    out = np.sum(w * vals)
    return complex(out) if np.iscomplexobj(out) else float(out)


def circle_points(r: float, n: int, center=(0.0, 0.0)) -> np.ndarray:
    phi = 2.0 * math.pi * np.arange(n) / n
    return np.stack([center[0] + r * np.cos(phi), center[1] + r * np.sin(phi)], axis=1)


def circle_average(f, r: float, spec: QuadratureSpec | None = None, nodes: int | None = None):
    """Average of ``f`` over the circle ``|y| = r`` against normalized arc length.

    Uses the uniform trapezoid rule, which converges geometrically for
    smooth periodic integrands.
    """
    if not r > 0:
        raise DomainError("radius must be positive")
    n = nodes if nodes is not None else (spec or QuadratureSpec()).circle_nodes
    vals = np.asarray(f(circle_points(r, n)))
    return np.mean(vals, axis=0)


def _i0_series(x: np.ndarray) -> np.ndarray:
    q = 0.25 * x * x
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, 80):
        term = term * q / (k * k)
        total = total + term
        if np.all(term <= 1e-17 * total):
            break
    return total


def _i0e_asymptotic(x: np.ndarray) -> np.ndarray:
    # e^{-x} I0(x) = (2 pi x)^{-1/2} sum_k ((2k-1)!!)^2 / (k! 8^k x^k); stop at the smallest term
    total = np.ones_like(x)
    term = np.ones_like(x)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, 200):
        nxt = term * (2 * k - 1) ** 2 / (8.0 * k * x)
        active &= np.abs(nxt) < np.abs(term)
        if not active.any():
            break
        term = np.where(active, nxt, term)
        total = total + np.where(active, nxt, 0.0)
        active &= np.abs(nxt) > 1e-17 * total
    return total / np.sqrt(2.0 * math.pi * x)


def bessel_I0e(x) -> np.ndarray:
    """Exponentially scaled ``I0(x) e^{-x}`` for ``x >= 0``."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(np.isnan(x)):
        raise DomainError("bessel_I0 is defined here for x >= 0")
    out = np.empty_like(x)
    small = x < I0_SWITCH
    out[small] = _i0_series(x[small]) * np.exp(-x[small])
    out[~small] = _i0e_asymptotic(x[~small])
    return out if out.ndim else out[()]


def bessel_I0(x) -> np.ndarray:
    """Modified Bessel function ``I0(x) = J0(i x)`` for ``x >= 0``.

    Power series below ``x = 20``, exponentially scaled asymptotic series
    above it.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(np.isnan(x)):
        raise DomainError("bessel_I0 is defined here for x >= 0")
    out = np.empty_like(x)
    small = x < I0_SWITCH
    out[small] = _i0_series(x[small])
    with np.errstate(over="ignore"):
        out[~small] = _i0e_asymptotic(x[~small]) * np.exp(x[~small])
    return out if out.ndim else out[()]


def log_bessel_I0(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.log(bessel_I0e(x)) + x


def _jm_over_am(m: int, a: np.ndarray, r: np.ndarray) -> np.ndarray:
    """``J_m(a r) / a^m`` on the outer grid ``a x r``, finite at ``a = 0``."""
    a = np.asarray(a, dtype=float)[:, None]
    r = np.asarray(r, dtype=float)[None, :]
    if m == 0:
        return jv(0, a * r)
    tiny = np.abs(a) < 1e-8
    safe_a = np.where(tiny, 1.0, a)
    out = jv(m, safe_a * r) / safe_a**m
    limit = (0.5 * r) ** m / math.factorial(m)
    return np.where(tiny, limit, out)


def lifted_radial_fourier(g, m: int, a_grid, cutoff: float, nodes: int = 96) -> np.ndarray:
    """Fourier transform of ``g(|x|)`` viewed as a radial function on R^{2+2|m|}.

    Uses the unitary normalization ``(2 pi)^{-d/2} int e^{-i x.xi}`` in every
    dimension, so that for ``f(x) = g(|x|) |x|^{|m|} e^{i m arg x}`` on the
    plane ``f~(a e^{i phi}) = i^{-|m|} a^{|m|} F(a) e^{i m phi}``.

    Parameters
    ----------
    g : callable
        Radial profile, vectorized over ``r``.
    m : int
        Angular order; the lifted dimension is ``2 + 2|m|``.
    a_grid : array_like
        Radial frequencies at which to evaluate.
    cutoff : float
        Truncation point of the ``r`` integral.
    nodes : int
        Gauss-Legendre nodes on ``[0, cutoff]``.
    """
    m = abs(int(m))
    a_grid = np.atleast_1d(np.asarray(a_grid, dtype=float))
    r, w = legendre_rule(nodes, 0.0, cutoff)
    gr = np.asarray(g(r))
    integrand_scale = np.max(np.abs(gr * r ** (m + 1))) if gr.size else 0.0
    tail = abs(np.asarray(g(np.array([cutoff])))[0]) * cutoff ** (m + 1)
    if integrand_scale > 0 and tail > 1e-12 * integrand_scale:
        warnings.warn(
            f"radial profile not negligible at cutoff {cutoff:g} (relative tail {tail / integrand_scale:.2e})",
            TruncationWarning,
            stacklevel=2,
        )
    kernel = _jm_over_am(m, a_grid, r)
    return kernel @ (w * gr * r ** (m + 1))


def bessel_bridge_check(r: float, xi_abs, spec: QuadratureSpec | None = None, tol: float = 1e-10):
    """Circle mean of ``e^{-2 xi.y}`` over ``|y| = r`` against ``I0(2 r |xi|)``.

    The check runs for every radius in ``xi_abs`` and reports the worst
    relative error; ``xi`` points along the first axis, which the circle mean
    does not see.
    """
    from mharm.report import VerificationReport

    xi = np.atleast_1d(np.asarray(xi_abs, dtype=float))
    lhs = np.array([circle_average(lambda y: np.exp(-2.0 * s * y[:, 0]), r, spec) for s in xi])
    rhs = bessel_I0(2.0 * r * xi)
    rel = np.abs(lhs - rhs) / rhs
    i = int(np.argmax(rel))
    return VerificationReport.build(
        "bessel_bridge",
        lhs[i],
        rhs[i],
        tol,
        generator="exp(-2 xi.y)",
        params={"r": float(r), "worst_xi": float(xi[i]), "max_r_xi": float(r * xi.max())},
        resolution={"circle_nodes": (spec or QuadratureSpec()).circle_nodes},
    )


def bessel_asymptotic_check(x: float = 100.0, tol: float = 1e-2):
    """``I0(x) sqrt(2 pi x) e^{-x}`` against its limit 1."""
    from mharm.report import VerificationReport

    ratio = float(bessel_I0e(x)) * math.sqrt(2.0 * math.pi * x)
    return VerificationReport.build("bessel_asymptotic", ratio, 1.0, tol, generator="I0", params={"x": float(x)})
