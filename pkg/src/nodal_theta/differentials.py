"""The normalized third-kind differential on the curve.

eta has simple poles at the identified points p1 (residue +1/(2*pi*i)) and
p2 (residue -1/(2*pi*i)), unit period around p1, and real cut periods
(r1, r2).  Its dz-coefficient is

    eta(z) = (1/2*pi*i) [ ell(z - p1) - ell(z - p2) ] + kappa_coeff

with ell = theta'[1/2;1/2]/theta[1/2;1/2] and kappa_coeff chosen so both cut
periods are real (see `curve.derive_periods`).  Near the poles the local
data h, h1 (the holomorphic parts in the translation charts z = p_i + t) are
evaluated with explicit pole cancellation.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .curve import NodalCurveSpec, derive_periods
from .errors import PoleAt
from .quadrature import integrate_circle, integrate_polyline, integrate_segment
from .theta import TWO_PI_I, theta_char, theta_char_dz, theta_char_dzk

_ODD = (0.5, 0.5)
_ELL_SWITCH = 1e-2  # |t| below which ell uses its Laurent expansion


class ThirdKindDifferential:
    """Concrete realization of the normalized differential for one spec."""

    def __init__(self, spec: NodalCurveSpec):
        self.spec = spec
        self.tau = spec.tau
        self.p1 = spec.p1
        self.p2 = spec.p2
        self.policy = spec.policy
        self.r1, self.r2, self.kappa_coeff = derive_periods(spec)
        # odd theta Taylor data at its zero: theta11(t) = a1 t + a3 t^3 + ...
        tau, pol = self.tau, self.policy
        a1 = theta_char_dzk(_ODD, 0.0, tau, 1, pol)
        a3 = theta_char_dzk(_ODD, 0.0, tau, 3, pol) / 6.0
        a5 = theta_char_dzk(_ODD, 0.0, tau, 5, pol) / 120.0
        a7 = theta_char_dzk(_ODD, 0.0, tau, 7, pol) / 5040.0
        u, v, w = a3 / a1, a5 / a1, a7 / a1
        # ell(t) - 1/t = c1 t + c3 t^3 + c5 t^5 + O(t^7)
        self._ell_reg_coeffs = (
            2.0 * u,
            4.0 * v - 2.0 * u * u,
            6.0 * w - 6.0 * u * v + 2.0 * u**3,
        )
        self._h1_cache: tuple[float, np.ndarray] | None = None

    # -- log-derivative of the odd theta function --------------------------

    def _reduce(self, x):
        """x = x_red + m + n*tau with x_red near the zero at the origin."""
        x = np.asarray(x, dtype=np.complex128)
        t = np.imag(x) / self.tau.imag
        n = np.round(t)
        s = np.real(x) - n * self.tau.real
        m = np.round(s)
        return x - m - n * self.tau, n

    def _ell_reg_small(self, t):
        c1, c3, c5 = self._ell_reg_coeffs
        t2 = t * t
        return t * (c1 + t2 * (c3 + t2 * c5))

    def ell(self, x):
        """theta'[1/2;1/2]/theta[1/2;1/2](x); Laurent form near the zeros."""
        x_red, n = self._reduce(x)
        x_red = np.atleast_1d(x_red)
        n = np.atleast_1d(n)
        out = np.empty_like(x_red)
        small = np.abs(x_red) < _ELL_SWITCH
        if np.any(~small):
            xs = x_red[~small]
            out[~small] = theta_char_dz(_ODD, xs, self.tau, self.policy) / theta_char(
                _ODD, xs, self.tau, self.policy
            )
        if np.any(small):
            ts = x_red[small]
            if np.any(np.abs(ts) < 1e-12):
                raise PoleAt("ell evaluated at a lattice point")
            out[small] = 1.0 / ts + self._ell_reg_small(ts)
        out = out - TWO_PI_I * n
        if np.isscalar(x) or np.asarray(x).ndim == 0:
            return complex(out[0])
        return out.reshape(np.shape(x))

    def ell_reg(self, t):
        """ell(t) - 1/t, stable for small |t| (no lattice reduction)."""
        t = np.asarray(t, dtype=np.complex128)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        out = np.empty_like(t)
        small = np.abs(t) < _ELL_SWITCH
        if np.any(~small):
            ts = t[~small]
            out[~small] = theta_char_dz(_ODD, ts, self.tau, self.policy) / theta_char(
                _ODD, ts, self.tau, self.policy
            ) - 1.0 / ts
        if np.any(small):
            out[small] = self._ell_reg_small(t[small])
        return complex(out[0]) if scalar else out

    # -- the differential and its local data -------------------------------

    def eta_coeff(self, z):
        """dz-coefficient of eta; raises PoleAt within 1e-12 of p1, p2 mod L."""
        z_arr = np.asarray(z, dtype=np.complex128)
        for p in (self.p1, self.p2):
            red, _ = self._reduce(z_arr - p)
            if np.any(np.abs(red) < 1e-12):
                raise PoleAt(f"eta evaluated at a pole (near {p:.6g} mod lattice)")
        return (self.ell(z_arr - self.p1) - self.ell(z_arr - self.p2)) / TWO_PI_I + self.kappa_coeff

    def h_at_p1(self, t):
        """Holomorphic part of eta at p1: eta(p1+t) - (1/2*pi*i)/t, chart z = p1 + t."""
        t = np.asarray(t, dtype=np.complex128)
        return (self.ell_reg(t) - self.ell(self.p1 - self.p2 + t)) / TWO_PI_I + self.kappa_coeff

    def h1_at_p2(self, t):
        """Holomorphic part of eta at p2: eta(p2+t) + (1/2*pi*i)/t, chart z = p2 + t."""
        t = np.asarray(t, dtype=np.complex128)
        return (self.ell(self.p2 - self.p1 + t) - self.ell_reg(t)) / TWO_PI_I + self.kappa_coeff

    # -- power series cache for h1 on the p2 chart -------------------------

    def _h1_series(self) -> tuple[float, np.ndarray]:
        """Taylor coefficients of h1 at 0, sampled on a circle well inside the
        annulus of analyticity; used to make repeated integrals of h1 cheap."""
        if self._h1_cache is None:
            translates = [
                p for p in self.spec.pole_translates() if abs(p - self.p2) > 1e-12
            ]
            d_min = min(abs(p - self.p2) for p in translates)
            rho = min(0.55 * d_min, 6.0 * self.spec.eps)
            m = 128
            u = np.arange(m) / m
            samples = self.h1_at_p2(rho * np.exp(2j * np.pi * u))
            coeffs = np.fft.fft(samples) / m
            coeffs = coeffs / rho ** np.arange(m)
            # aliasing floor: trailing coefficients are meaningless noise
            self._h1_cache = (rho, coeffs[: m // 2])
        return self._h1_cache

    def h1_primitive(self, t):
        """Antiderivative of h1 with value 0 at t = 0, valid for |t| < rho/2."""
        rho, coeffs = self._h1_series()
        t = np.asarray(t, dtype=np.complex128)
        if np.any(np.abs(t) > 0.5 * rho):
            # outside the safe series zone, integrate directly
            scalar = t.ndim == 0
            ts = np.atleast_1d(t)
            vals = np.array(
                [integrate_segment(self.h1_at_p2, 0.0, tv, self.spec.quad_tol) for tv in ts]
            )
            return complex(vals[0]) if scalar else vals.reshape(np.shape(t))
        k = np.arange(len(coeffs))
        powers = np.power.outer(np.atleast_1d(t), k + 1)
        vals = powers @ (coeffs / (k + 1))
        return complex(vals[0]) if np.asarray(t).ndim == 0 else vals.reshape(np.shape(t))


@lru_cache(maxsize=8)
def third_kind(spec: NodalCurveSpec) -> ThirdKindDifferential:
    return ThirdKindDifferential(spec)


def eta_coeff(spec: NodalCurveSpec, z):
    """Coefficient function of the normalized third-kind differential."""
    return third_kind(spec).eta_coeff(z)


def h_at_p1(spec: NodalCurveSpec, t):
    return third_kind(spec).h_at_p1(t)


def h1_at_p2(spec: NodalCurveSpec, t):
    return third_kind(spec).h1_at_p2(t)


def period_integral(spec: NodalCurveSpec, contour: str, quad_tol: float | None = None) -> complex:
    """Period of eta over one of the four reference contours.

    gamma1/gamma2 are circles of radius delta/2 resp. eps/2 around p1, p2
    (the values are residues, hence radius-independent); alpha and beta are
    the parallelogram edges q0 -> q0+1 and q0 -> q0+tau.
    """
    tol = spec.quad_tol if quad_tol is None else quad_tol
    diff = third_kind(spec)
    if contour == "gamma1":
        return integrate_circle(diff.eta_coeff, spec.p1, spec.delta / 2, tol)
    if contour == "gamma2":
        return integrate_circle(diff.eta_coeff, spec.p2, spec.eps / 2, tol)
    if contour == "alpha":
        return integrate_polyline(diff.eta_coeff, [spec.q0, spec.q0 + 1], tol)
    if contour == "beta":
        return integrate_polyline(diff.eta_coeff, [spec.q0, spec.q0 + spec.tau], tol)
    raise ValueError(f"unknown contour {contour!r}")
