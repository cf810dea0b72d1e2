"""The normalization conventions every computation in the package follows."""

from __future__ import annotations

from mharm.bargmann import PSI_SCALE
from mharm.fourier import PLANCHEREL_FACTOR
from mharm.modes import CONVENTION_TAG

CONVENTIONS = (
    ("Haar measure on M(2)", "dx d(alpha) / 2 pi, so ||f||^2 = sum_m ||f_m||^2"),
    ("angular modes", "f(x, e^{i alpha}) = sum_{|m| <= M} f_m(x) e^{i m alpha}"),
    ("plane Fourier transform", "f~(xi) = (2 pi)^{-1} int f(x) e^{-i x.xi} dx (unitary)"),
    ("holomorphic extension", "f_m(z) = (2 pi)^{-1} int f~_m(xi) e^{i xi.z} d xi"),
    ("basis of L^2(S^1)", "e_n(theta) = e^{i n theta}, inner product d(theta) / 2 pi"),
    ("operator matrix", "T_kn(a) = k-th coefficient of theta -> f~_n(a e^{i theta}) e^{i n theta}"),
    ("Plancherel", f"||f||^2 = {PLANCHEREL_FACTOR:.12g} * int_0^oo ||f^(a)||_HS^2 a da  (factor 2 pi)"),
    ("heat kernel", "psi_t = p_t(x) q_t(alpha), p_t = (4 pi t)^{-1} e^{-|x|^2/4t}, q_t = sum e^{-n^2 t} e^{i n alpha}"),
    ("Bergman weights", "d mu = (2 pi t)^{-1} e^{-|y|^2/2t} dx dy, d nu = (2 pi t)^{-1/2} e^{-u^2/2t} du d(theta)/2 pi, w = e^{u + i theta}"),
    ("sigma, delta", "sigma(xi) = int e^{2 xi.y} d mu(y) = e^{2 t |xi|^2}, delta(n) = int e^{2 n u} d nu = e^{2 n^2 t}"),
    ("generalized kernel", f"transform convolves with psi / {PSI_SCALE:.12g}, psi(z) = int e^{{i a(y)}} sigma(y)^{{-1/2}} e^{{-i y.z}} dy"),
    ("Gutzmer functional", "int |f(x+iy, rho e^{i theta})|^2 dx d(theta)/2 pi = sum_n rho^{2n} int |f~_n|^2 e^{-2 xi.y} d xi"),
    ("angular projection", "f^m = (2 pi)^{-1} int f(R(theta) x, .) e^{-i m theta} d theta, so sum_m f^m = f"),
    ("Paley-Wiener constant", "|z^m f(z, .)| <= (2 pi)^{-1} c_m e^{R |Im z|}, c_m = sup_alpha ||d^m f~(., alpha)||_1"),
)


def conventions_table() -> str:
    width = max(len(k) for k, _ in CONVENTIONS)
    lines = [f"convention tag: {CONVENTION_TAG}", ""]
    lines += [f"{k.ljust(width)}  {v}" for k, v in CONVENTIONS]
    return "\n".join(lines) + "\n"
