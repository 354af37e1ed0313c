"""Pullback of the generalized theta function along the period map, its
zeros, the Laurent data at the node chart, the generalized Riemann constants
and the inversion congruence check.

The pullback

    T_c(P) = Theta(phi1(P) - c1, phi2(P) - c2)

is single-valued on the cut curve because integer ambiguities of phi2 are
killed by e(.).  It is evaluated through the exact branch-free identity
e(phi2(z)) = (Q(z)/Q(z0)) e(kappa*(z - z0)) with Q the odd-theta quotient,
which also makes grid evaluation cheap.  T_c has a simple pole at p2 and
exactly two zeros; their divisor image W satisfies

    W == d(eps)(c) + kappa(eps)   mod Gamma,

which `verify_thm51` checks for both readings of the constant (-tau/2
versus -tau in the first component), reporting the residual of each.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .abel_jacobi import a_eps, divisor_image, phi1, phi2
from .curve import NodalCurveSpec, derive_periods, lattice_coords, mod_gamma_decompose, period_group
from .differentials import third_kind
from .errors import ContourThroughZero, DegenerateC, ZeroCollision
from .quadrature import integrate_segment, track_log_sampled, winding_number_sampled
from .theta import TWO_PI_I, e_func, theta_char, theta_char_dz, theta_char_dzk

GENERICITY_TOL = 1e-3


@lru_cache(maxsize=16)
def _theta_scale(tau: complex, char: tuple[float, float]) -> float:
    """Coarse-grid maximum of |theta[char]| over one fundamental cell."""
    s = np.linspace(0.0, 1.0, 12)
    zs = (s[:, None] + s[None, :] * tau).ravel()
    return float(np.max(np.abs(theta_char(char, zs, tau))))


class ThetaPullback:
    """T_c for one shift c = (c1, c2) on a given curve instance."""

    def __init__(self, c, spec: NodalCurveSpec, genericity_tol: float = GENERICITY_TOL):
        self.c1 = complex(c[0])
        self.c2 = complex(c[1])
        self.spec = spec
        self.r1, self.r2, self.kappa = derive_periods(spec)
        self._odd = (0.5, 0.5)
        self._rchar = (-self.r1, self.r2)
        self._q_at_z0 = self._quotient(spec.z0)
        guard = abs(theta_char((0.0, 0.0), phi1(spec, spec.p1) - self.c1, spec.tau, spec.policy))
        scale = _theta_scale(spec.tau, (0.0, 0.0))
        if guard <= genericity_tol * scale:
            raise DegenerateC(
                f"|theta00(phi1(p1) - c1)| = {guard:.3e} under guard {genericity_tol * scale:.3e}"
            )

    # -- building blocks ----------------------------------------------------

    def _quotient(self, z):
        spec = self.spec
        return theta_char(self._odd, z - spec.p1, spec.tau, spec.policy) / theta_char(
            self._odd, z - spec.p2, spec.tau, spec.policy
        )

    def e_phi2(self, z):
        """e(phi2(z)): single-valued, branch-free evaluation."""
        z = np.asarray(z, dtype=np.complex128) if isinstance(z, np.ndarray) else z
        return self._quotient(z) / self._q_at_z0 * e_func(self.kappa * (z - self.spec.z0))

    def value(self, P, path=None):
        """T_c(P).  Accepts scalars or arrays; `path` is accepted for symmetry
        with the tracked period map but the value does not depend on it."""
        spec = self.spec
        x = (P - spec.z0) - self.c1
        ew = self.e_phi2(P) * e_func(-self.c2)
        return (
            theta_char((0.0, 0.0), x, spec.tau, spec.policy)
            + theta_char(self._rchar, x, spec.tau, spec.policy) * ew
        )

    def value_from_phi(self, P, path=None):
        """T_c(P) through the tracked period map (dual route, for tests)."""
        from .theta import big_theta

        val = phi2(self.spec, P, path)
        return big_theta(
            phi1(self.spec, P) - self.c1,
            val - self.c2,
            self.spec.tau,
            self.r1,
            self.r2,
            self.spec.policy,
        )

    def dvalue(self, P):
        """dT_c/dz by the chain rule through the theta kernel and eta."""
        spec = self.spec
        diff = third_kind(spec)
        x = (P - spec.z0) - self.c1
        ew = self.e_phi2(P) * e_func(-self.c2)
        return (
            theta_char_dz((0.0, 0.0), x, spec.tau, spec.policy)
            + (
                theta_char_dz(self._rchar, x, spec.tau, spec.policy)
                + TWO_PI_I * diff.eta_coeff(P) * theta_char(self._rchar, x, spec.tau, spec.policy)
            )
            * ew
        )


def frak_T(tp: ThetaPullback, P, path=None):
    """Value of the pulled-back theta function at P."""
    return tp.value(P, path)


# -- zero counting and location ---------------------------------------------


def _box_polyline(spec: NodalCurveSpec, s0, s1, t0, t1):
    pts = [(s0, t0), (s1, t0), (s1, t1), (s0, t1), (s0, t0)]
    return [spec.point(s, t) for s, t in pts]


def _p2_in_box(spec: NodalCurveSpec, s0, s1, t0, t1) -> bool:
    s, t = lattice_coords(spec.p2, spec.q0, spec.tau)
    return s0 < s < s1 and t0 < t < t1


def count_zeros(tp: ThetaPullback, quad_tol: float | None = None) -> int:
    """Number of zeros of T_c: boundary winding plus one for the pole at p2."""
    spec = tp.spec
    w = winding_number_sampled(tp.value, _box_polyline(spec, 0.0, 1.0, 0.0, 1.0))
    return w + 1


def alpha_dlog_integral(tp: ThetaPullback) -> complex:
    """(1/2*pi*i) * integral of dlog T_c along the bottom edge q0 -> q0+1."""
    spec = tp.spec
    d, _ = track_log_sampled(tp.value, spec.q0, spec.q0 + 1.0)
    return d / TWO_PI_I


def beta_dlog_integral(tp: ThetaPullback) -> complex:
    """(1/2*pi*i) * integral of dlog T_c along the left edge q0 -> q0+tau."""
    spec = tp.spec
    d, _ = track_log_sampled(tp.value, spec.q0, spec.q0 + spec.tau)
    return d / TWO_PI_I


def _newton_polish(tp: ThetaPullback, z: complex, tol: float = 1e-12, max_iter: int = 60) -> complex:
    for _ in range(max_iter):
        f = tp.value(z)
        df = tp.dvalue(z)
        if df == 0:
            raise ZeroCollision("vanishing derivative during Newton polish")
        step = f / df
        z = z - step
        if abs(step) < tol:
            return z
    raise ZeroCollision(f"Newton polish did not converge near {z:.6g}")


def locate_zeros(tp: ThetaPullback) -> tuple[complex, complex]:
    """The two zeros of T_c, isolated by winding subdivision in the cell
    and polished by Newton to 1e-10."""
    spec = tp.spec

    def box_winding(s0, s1, t0, t1, depth=0):
        for jitter in (0.0, 7e-4, -9e-4, 1.7e-3):
            try:
                w = winding_number_sampled(
                    tp.value, _box_polyline(spec, s0 + jitter, s1 + jitter, t0 + jitter, t1 + jitter)
                )
                box = (s0 + jitter, s1 + jitter, t0 + jitter, t1 + jitter)
                return w + (1 if _p2_in_box(spec, *box) else 0), box
            except ContourThroughZero:
                continue
        raise ContourThroughZero("could not jitter contour away from a zero")

    found: list[complex] = []
    n_total, box0 = box_winding(0.0, 1.0, 0.0, 1.0)
    stack = [(box0, n_total)]
    while stack:
        (s0, s1, t0, t1), n = stack.pop()
        if n <= 0:
            continue
        if max(s1 - s0, t1 - t0) < 0.02:
            if n == 1:
                z = _newton_polish(tp, spec.point(0.5 * (s0 + s1), 0.5 * (t0 + t1)))
                found.append(z)
                continue
            raise ZeroCollision(f"{n} zeros left unresolved in a minimal box")
        if s1 - s0 >= t1 - t0:
            for frac in (0.5, 0.53, 0.461, 0.587):
                sm = s0 + frac * (s1 - s0)
                try:
                    nl, bl = box_winding(s0, sm, t0, t1)
                    nr, br = box_winding(sm, s1, t0, t1)
                except ContourThroughZero:
                    continue
                if nl + nr == n:
                    stack.extend([(bl, nl), (br, nr)])
                    break
            else:
                raise ZeroCollision("subdivision could not split cleanly")
        else:
            for frac in (0.5, 0.53, 0.461, 0.587):
                tm = t0 + frac * (t1 - t0)
                try:
                    nb, bb = box_winding(s0, s1, t0, tm)
                    nt, bt = box_winding(s0, s1, tm, t1)
                except ContourThroughZero:
                    continue
                if nb + nt == n:
                    stack.extend([(bb, nb), (bt, nt)])
                    break
            else:
                raise ZeroCollision("subdivision could not split cleanly")

    if len(found) != 2:
        raise ZeroCollision(f"expected 2 zeros, isolated {len(found)}")
    q1, q2 = found
    if abs(q1 - q2) < 1e-6:
        raise ZeroCollision("zeros collided after polishing")
    for z in (q1, q2):
        if abs(z - spec.p1) <= spec.delta or abs(z - spec.p2) <= spec.eps:
            raise ZeroCollision(f"zero {z:.6g} inside an excluded disk")
    q1, q2 = sorted((q1, q2), key=lambda z: (z.imag, z.real))
    return q1, q2


# -- Laurent data on the node chart ------------------------------------------


class LaurentData:
    """Evaluators for the pole expansion of T_c at p2 in the chart z = p2 + t.

    T_c(t) = c_minus1/t + h2(t), h3 = T'/T + 1/t = (h2 + h2' t)/(c_minus1 + h2 t),
    and the Moebius structure h3 = (A + B e(-c2))/(C + D e(-c2)) in e(-c2).

    `h3_zero` is the value h3(0; c) implied by the definitions; the shorter
    closed form lacking the derivative term (`h3_zero_no_derivative`) is kept
    for comparison because downstream displays quote it, and its deviation is
    exactly `h3_zero_defect`.
    """

    _SMALL_T = 1e-3

    def __init__(self, tp: ThetaPullback, t0: float, genericity_tol: float = GENERICITY_TOL):
        if t0 <= 0 or t0 >= tp.spec.eps * 1.0001:
            raise ValueError("chart anchor t0 must lie in (0, eps]")
        self.tp = tp
        self.spec = tp.spec
        self.t0 = float(t0)
        spec = tp.spec
        self.diff = third_kind(spec)
        self.x2 = phi1(spec, spec.p2) - tp.c1
        self._rchar = tp._rchar
        scale_r = _theta_scale(spec.tau, self._rchar)
        guard = abs(theta_char(self._rchar, self.x2, spec.tau, spec.policy))
        if guard <= genericity_tol * scale_r:
            raise DegenerateC(
                f"|theta[-r1;r2](phi1(p2) - c1)| = {guard:.3e}; c_minus1 would degenerate"
            )
        scale_0 = _theta_scale(spec.tau, (0.0, 0.0))
        guard0 = abs(theta_char((0.0, 0.0), self.x2, spec.tau, spec.policy))
        if guard0 <= genericity_tol * scale_0:
            raise DegenerateC(
                f"|theta00(phi1(p2) - c1)| = {guard0:.3e}; Moebius determinant would degenerate"
            )
        # e(phi2) at the chart anchor, branch-free
        self._e_phi2_t0 = tp.e_phi2(spec.p2 + self.t0)
        h1c = self._h1_derivs()
        self.g0 = complex(self.g(0.0))
        L = lambda k, t: theta_char_dzk(self._rchar, self.x2 + t, spec.tau, k, spec.policy)
        l0, l1, l2, l3 = (L(k, 0.0) for k in range(4))
        m = TWO_PI_I * h1c[0]
        mp = TWO_PI_I * h1c[1]
        mpp = TWO_PI_I * h1c[2]
        g0 = self.g0
        self._G_taylor = (
            l0 * g0,
            (l1 + m * l0) * g0,
            (l2 + 2 * m * l1 + (m * m + mp) * l0) * g0,
            (l3 + 3 * m * l2 + 3 * (m * m + mp) * l1 + (m**3 + 3 * m * mp + mpp) * l0) * g0,
        )
        self.c_minus1 = self._G_taylor[0] * e_func(-tp.c2)
        self.beta_coeff = self._G_taylor[0]

    def _h1_derivs(self) -> tuple[complex, complex, complex]:
        rho, coeffs = self.diff._h1_series()
        return complex(coeffs[0]), complex(coeffs[1]), 2.0 * complex(coeffs[2])

    # -- chart factor g ------------------------------------------------------

    def g(self, t):
        """g(t) = e(phi2(t0)) * t0 * e(int_{t0}^t h1), so e(phi2(p2+t)) = g(t)/t."""
        prim = self.diff.h1_primitive
        val = self._e_phi2_t0 * self.t0 * np.exp(TWO_PI_I * (prim(t) - prim(self.t0)))
        return val

    def _G(self, t):
        spec = self.spec
        return theta_char(self._rchar, self.x2 + t, spec.tau, spec.policy) * self.g(t)

    def _G_prime(self, t):
        spec = self.spec
        th = theta_char(self._rchar, self.x2 + t, spec.tau, spec.policy)
        thp = theta_char_dz(self._rchar, self.x2 + t, spec.tau, spec.policy)
        return (thp + TWO_PI_I * self.diff.h1_at_p2(t) * th) * self.g(t)

    # -- Moebius coefficient functions ----------------------------------------

    def alpha1(self, t):
        return theta_char((0.0, 0.0), self.x2 + t, self.spec.tau, self.spec.policy)

    def alpha1_prime(self, t):
        return theta_char_dz((0.0, 0.0), self.x2 + t, self.spec.tau, self.spec.policy)

    def alpha2(self, t):
        """(G(t) - G(0))/t extended through t = 0."""
        t = np.asarray(t, dtype=np.complex128)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        out = np.empty_like(t)
        small = np.abs(t) < self._SMALL_T
        if np.any(~small):
            ts = t[~small]
            out[~small] = (self._G(ts) - self._G_taylor[0]) / ts
        if np.any(small):
            ts = t[small]
            _, g1, g2, g3 = self._G_taylor
            out[small] = g1 + ts * (g2 / 2.0 + ts * (g3 / 6.0))
        return complex(out[0]) if scalar else out

    def alpha2_prime(self, t):
        t = np.asarray(t, dtype=np.complex128)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        out = np.empty_like(t)
        small = np.abs(t) < self._SMALL_T
        if np.any(~small):
            ts = t[~small]
            out[~small] = (self._G_prime(ts) * ts - (self._G(ts) - self._G_taylor[0])) / (ts * ts)
        if np.any(small):
            ts = t[small]
            _, _, g2, g3 = self._G_taylor
            out[small] = g2 / 2.0 + ts * (g3 / 3.0)
        return complex(out[0]) if scalar else out

    def mobius_coeffs(self, t):
        """(A, B, C, D) with h3 = (A + B e(-c2)) / (C + D e(-c2))."""
        a1, a1p = self.alpha1(t), self.alpha1_prime(t)
        a2, a2p = self.alpha2(t), self.alpha2_prime(t)
        A = a1 + t * a1p
        B = a2 + t * a2p
        C = t * a1
        D = self.beta_coeff + t * a2
        return A, B, C, D

    # -- pole expansion -------------------------------------------------------

    def h2(self, t):
        return self.alpha1(t) + self.alpha2(t) * e_func(-self.tp.c2)

    def h2_prime(self, t):
        return self.alpha1_prime(t) + self.alpha2_prime(t) * e_func(-self.tp.c2)

    def h3(self, t):
        A, B, C, D = self.mobius_coeffs(t)
        ec = e_func(-self.tp.c2)
        return (A + B * ec) / (C + D * ec)

    def dh3_dc2(self, t):
        """Analytic partial derivative of h3 with respect to c2."""
        A, B, C, D = self.mobius_coeffs(t)
        ec = e_func(-self.tp.c2)
        return TWO_PI_I * ec * (A * D - B * C) / (C + D * ec) ** 2

    @property
    def h3_zero(self) -> complex:
        """h3(0; c) implied by the definitions (includes the derivative term)."""
        ec = e_func(-self.tp.c2)
        return complex((self.alpha1(0.0) + self._G_taylor[1] * ec) / (self.beta_coeff * ec))

    @property
    def h3_zero_no_derivative(self) -> complex:
        """Shorter closed form theta00(x2) e(c2) / (theta_r(x2) g(0)); deviates
        from h3_zero by h3_zero_defect."""
        return complex(self.alpha1(0.0) * e_func(self.tp.c2) / self.beta_coeff)

    @property
    def h3_zero_defect(self) -> complex:
        """Predicted gap between the two closed forms:
        theta_r'/theta_r(x2) + 2*pi*i*h1(0)."""
        return complex(self._G_taylor[1] / self._G_taylor[0])

    def H3(self, t, quad_tol: float | None = None) -> complex:
        """Integral of h3 along the straight segment from 0 to t."""
        if t == 0:
            return 0.0 + 0.0j
        tol = self.spec.quad_tol if quad_tol is None else quad_tol
        return integrate_segment(self.h3, 0.0, complex(t), tol)

    def dH3_dc2(self, t, quad_tol: float | None = None) -> complex:
        if t == 0:
            return 0.0 + 0.0j
        tol = self.spec.quad_tol if quad_tol is None else quad_tol
        return integrate_segment(self.dh3_dc2, 0.0, complex(t), tol)


def laurent_data(tp: ThetaPullback, t0: float | None = None) -> LaurentData:
    """Laurent/Moebius evaluators at the node chart; t0 defaults to eps/2."""
    return LaurentData(tp, tp.spec.eps / 2 if t0 is None else t0)


def g_func(tp: ThetaPullback, t, t0: float | None = None):
    return laurent_data(tp, t0).g(t)


def mobius_coeffs(tp: ThetaPullback, t, c1=None, t0: float | None = None):
    return laurent_data(tp, t0).mobius_coeffs(t)


def H3(t, tp: ThetaPullback, quad_tol: float | None = None, t0: float | None = None) -> complex:
    return laurent_data(tp, t0).H3(t, quad_tol)


def d_map(eps: float, c, spec: NodalCurveSpec, quad_tol: float | None = None) -> tuple[complex, complex]:
    """d(eps)(c) = (c1, c1*r1 + H3(eps; c)/(2*pi*i))."""
    tp = ThetaPullback(c, spec)
    ld = laurent_data(tp, eps)
    r1, _, _ = derive_periods(spec)
    return (tp.c1, tp.c1 * r1 + ld.H3(eps, quad_tol) / TWO_PI_I)


# -- generalized Riemann constants -------------------------------------------


@dataclass(frozen=True)
class RiemannConstants:
    """Generalized Riemann constants; `kappa_vector` produces the two
    candidate readings (-tau/2 from the definition, -tau from the final
    display of the congruence derivation)."""

    kappa1: complex
    kappa2: complex
    eps: float
    a_value: complex
    alpha_phi1_integral: complex
    alpha_phi2_integral: complex


def riemann_constants(spec: NodalCurveSpec, eps: float, quad_tol: float | None = None) -> RiemannConstants:
    """kappa1 = -tau/2 - phi1(Q0) + phi1(P2) + int_alpha phi1 dz and
    kappa2 = (-tau/2 - phi1(Q0)) r1 + a(eps) + int_alpha phi2 dz."""
    tol = spec.quad_tol if quad_tol is None else quad_tol
    r1, _, _ = derive_periods(spec)
    diff = third_kind(spec)

    def phi1_integrand(s):
        return (spec.q0 + s) - spec.z0

    i_phi1 = integrate_segment(phi1_integrand, 0.0, 1.0, tol)

    # int_alpha phi2 dz = phi2(q0) + int_0^1 (1 - x) eta(q0 + x) dx
    phi2_q0 = phi2(spec, spec.q0)

    def phi2_integrand(x):
        return (1.0 - x) * diff.eta_coeff(spec.q0 + x)

    i_phi2 = phi2_q0 + integrate_segment(phi2_integrand, 0.0, 1.0, tol)

    a_val = a_eps(spec, eps, tol)
    phi1_q0 = phi1(spec, spec.q0)
    phi1_p2 = phi1(spec, spec.p2)
    kappa1 = -0.5 * spec.tau - phi1_q0 + phi1_p2 + i_phi1
    kappa2 = (-0.5 * spec.tau - phi1_q0) * r1 + a_val + i_phi2
    return RiemannConstants(
        kappa1=kappa1,
        kappa2=kappa2,
        eps=eps,
        a_value=a_val,
        alpha_phi1_integral=i_phi1,
        alpha_phi2_integral=i_phi2,
    )


def kappa_vector(rc: RiemannConstants, spec: NodalCurveSpec, variant: str):
    """Constant vector for the chosen first-component reading."""
    r1, _, _ = derive_periods(spec)
    if variant == "half_tau":
        return (rc.kappa1, rc.kappa2)
    if variant == "full_tau":
        shift = -0.5 * spec.tau
        return (rc.kappa1 + shift, rc.kappa2 + shift * r1)
    raise ValueError(f"unknown variant {variant!r}")


# -- the inversion congruence -------------------------------------------------


def branch_correction(tp: ThetaPullback, eps: float, ld: LaurentData | None = None) -> complex:
    """Branch-cut contribution A(eps, c) missing from the naive argument
    principle for the two-component period map.

    The second component of the period map is multivalued around the
    identified points; cutting the domain to make it single-valued adds the
    continued-log term

        A = (1/2*pi*i) * [log T_c(P1) - log T_c(p2 + eps)]

    to the divisor-image congruence.  A is well defined modulo 1 (path and
    branch choices shift it by integers, absorbed by the period group).  The
    returned representative uses principal logs of the closed form

        A = (1/2*pi*i) [Log theta00(phi1(P1)-c1) - Log c_minus1 + log eps
                        - Log(1 + eps*h2(eps)/c_minus1)].
    """
    ld = laurent_data(tp, eps) if ld is None else ld
    spec = tp.spec
    x1 = phi1(spec, spec.p1) - tp.c1
    th = theta_char((0.0, 0.0), x1, spec.tau, spec.policy)
    return complex(
        (
            np.log(th)
            - np.log(ld.c_minus1)
            + math.log(eps)
            - np.log(1.0 + eps * ld.h2(eps) / ld.c_minus1)
        )
        / TWO_PI_I
    )


def branch_correction_tracked(tp: ThetaPullback, eps: float) -> complex:
    """A(eps, c) by continued-log tracking of T_c from p2+eps to p1 (clockwise
    chart arc to the p1 direction, then the straight ray).  Independent route
    used to validate the closed form; equals branch_correction mod 1."""
    spec = tp.spec
    d_hat = (spec.p1 - spec.p2) / abs(spec.p1 - spec.p2)
    theta_f = cmath.phase(d_hat)
    if theta_f > 0:
        theta_f -= 2 * math.pi
    n_arc = 48
    angs = np.linspace(0.0, theta_f, n_arc + 1)
    pts = [spec.p2 + eps * cmath.exp(1j * a) for a in angs] + [spec.p1]
    total = 0.0 + 0.0j
    for k in range(len(pts) - 1):
        d, _ = track_log_sampled(tp.value, pts[k], pts[k + 1])
        total += d
    return complex(total / TWO_PI_I)


def d_map_corrected(eps: float, c, spec: NodalCurveSpec, quad_tol: float | None = None) -> tuple[complex, complex]:
    """Branch-corrected inversion map: d(eps)(c) + (0, A(eps, c)).

    Collapses to the closed form (c1, c1*r1 + (1/2*pi*i)[Log theta00(phi1(P1)-c1)
    - Log c_minus1 + log eps]), which is affine in c2 with unit slope; the
    congruence W == d_corr(eps)(c) + kappa(eps) mod Gamma closes numerically,
    whereas the uncorrected form leaves exactly the A(eps, c) defect.
    """
    tp = c if isinstance(c, ThetaPullback) else ThetaPullback(c, spec)
    ld = laurent_data(tp, eps)
    r1, _, _ = derive_periods(spec)
    x1 = phi1(spec, spec.p1) - tp.c1
    th = theta_char((0.0, 0.0), x1, spec.tau, spec.policy)
    d2 = tp.c1 * r1 + (np.log(th) - np.log(ld.c_minus1) + math.log(eps)) / TWO_PI_I
    return (tp.c1, complex(d2))


def jacobian_consistency_check(tp: ThetaPullback, eps: float, rel_tol: float = 1e-5) -> float:
    """Double-entry check of dH3/dc2: quadrature of the analytic derivative
    against a Richardson-extrapolated central difference.  Returns the
    relative disagreement and raises JacobianSingular beyond rel_tol."""
    from .errors import JacobianSingular

    ld = laurent_data(tp, eps)
    analytic = ld.dH3_dc2(eps)
    h = 1e-3

    def h3_at(dc2):
        tp2 = ThetaPullback((tp.c1, tp.c2 + dc2), tp.spec)
        return laurent_data(tp2, eps).H3(eps)

    d1 = (h3_at(h) - h3_at(-h)) / (2 * h)
    d2 = (h3_at(h / 2) - h3_at(-h / 2)) / h
    fd = (4 * d2 - d1) / 3.0
    rel = abs(analytic - fd) / max(1e-30, abs(analytic))
    if rel > rel_tol:
        raise JacobianSingular(
            f"dH3/dc2 dual-route disagreement {rel:.3e} exceeds {rel_tol:g}"
        )
    return rel


@dataclass(frozen=True)
class Thm51Result:
    """Divisor-image congruence residuals.

    residual_half_tau / residual_full_tau follow the stated constant
    (first component -tau/2 resp. -tau); the corrected_* fields add the
    branch-cut term A(eps, c) to the congruence.  variant_used names the
    constant whose corrected residual closes.
    """

    c: tuple[complex, complex]
    n_zeros: int
    zeros: tuple[complex, complex]
    w: tuple[complex, complex]
    d_value: tuple[complex, complex]
    correction: complex
    residual_half_tau: float
    residual_full_tau: float
    corrected_residual_half_tau: float
    corrected_residual_full_tau: float
    variant_used: str
    coeffs: tuple[int, int, int]

    @property
    def residual(self) -> float:
        """Residual of the closing (corrected) variant."""
        return min(self.corrected_residual_half_tau, self.corrected_residual_full_tau)

    @property
    def literal_residual(self) -> float:
        """Best stated-form residual (no branch correction)."""
        return min(self.residual_half_tau, self.residual_full_tau)


def verify_thm51(c, spec: NodalCurveSpec, eps: float | None = None,
                 quad_tol: float | None = None, check_jacobian: bool = True) -> Thm51Result:
    """Check W = phi(Q1) + phi(Q2) == d(eps)(c) + kappa(eps) mod Gamma.

    Residuals are reported for both candidate constants (-tau/2 and -tau in
    the first component) and both congruence forms (stated, and with the
    branch-cut term A(eps, c) added to the second component).  Only the
    corrected form closes; see branch_correction.
    """
    eps_w = spec.eps / 2 if eps is None else eps
    tp = c if isinstance(c, ThetaPullback) else ThetaPullback(c, spec)
    n = count_zeros(tp)
    zeros = locate_zeros(tp)
    w = divisor_image(spec, list(zeros))
    ld = laurent_data(tp, eps_w)
    r1, _, _ = derive_periods(spec)
    d_val = (tp.c1, tp.c1 * r1 + ld.H3(eps_w, quad_tol) / TWO_PI_I)
    corr = branch_correction(tp, eps_w, ld)
    if check_jacobian:
        jacobian_consistency_check(tp, eps_w)
    rc = riemann_constants(spec, eps_w, quad_tol)
    pg = period_group(spec)
    res = {}
    decs = {}
    for variant in ("half_tau", "full_tau"):
        k1, k2 = kappa_vector(rc, spec, variant)
        for corrected in (False, True):
            vec = (
                w[0] - d_val[0] - k1,
                w[1] - d_val[1] - k2 - (corr if corrected else 0.0),
            )
            dec = mod_gamma_decompose(vec, pg)
            res[(variant, corrected)] = dec.residual_norm
            decs[(variant, corrected)] = dec
    variant = min(("half_tau", "full_tau"), key=lambda v: res[(v, True)])
    dec = decs[(variant, True)]
    return Thm51Result(
        c=(tp.c1, tp.c2),
        n_zeros=n,
        zeros=zeros,
        w=w,
        d_value=d_val,
        correction=corr,
        residual_half_tau=res[("half_tau", False)],
        residual_full_tau=res[("full_tau", False)],
        corrected_residual_half_tau=res[("half_tau", True)],
        corrected_residual_full_tau=res[("full_tau", True)],
        variant_used=variant,
        coeffs=(dec.m, dec.p, dec.q),
    )


def run_thm51_batch(spec: NodalCurveSpec, n_samples: int, rng: np.random.Generator,
                    eps: float | None = None, max_draws: int = 200):
    """verify_thm51 over n_samples generic draws of c, resampling degenerate
    draws (guard failures, contour hits, zeros inside the excluded disks).

    Returns (results, n_resampled)."""
    results: list[Thm51Result] = []
    resampled = 0
    draws = 0
    while len(results) < n_samples:
        if draws >= max_draws:
            raise DegenerateC(f"exceeded {max_draws} draws for {n_samples} samples")
        draws += 1
        try:
            c, rejected = sample_generic_c(spec, rng)
            resampled += rejected
            results.append(verify_thm51(c, spec, eps=eps))
        except (DegenerateC, ContourThroughZero, ZeroCollision):
            resampled += 1
    return results, resampled


def sample_generic_c(spec: NodalCurveSpec, rng: np.random.Generator,
                     genericity_tol: float = GENERICITY_TOL, max_tries: int = 64):
    """Draw c from the fundamental box, rejecting degenerate shifts.

    Returns (c, n_rejected).  Guards: the pullback guard at p1 and both
    chart guards at p2 (nonvanishing c_minus1 and Moebius determinant).
    """
    scale0 = _theta_scale(spec.tau, (0.0, 0.0))
    r1, r2, _ = derive_periods(spec)
    scale_r = _theta_scale(spec.tau, (-r1, r2))
    rejected = 0
    for _ in range(max_tries):
        s, t = rng.uniform(0.0, 1.0, size=2)
        c1 = s + t * spec.tau
        c2 = complex(rng.uniform(0.0, 1.0), rng.uniform(-0.25, 0.25))
        x1 = phi1(spec, spec.p1) - c1
        x2 = phi1(spec, spec.p2) - c1
        ok = (
            abs(theta_char((0.0, 0.0), x1, spec.tau, spec.policy)) > genericity_tol * scale0
            and abs(theta_char((0.0, 0.0), x2, spec.tau, spec.policy)) > genericity_tol * scale0
            and abs(theta_char((-r1, r2), x2, spec.tau, spec.policy)) > genericity_tol * scale_r
        )
        if ok:
            return (c1, c2), rejected
        rejected += 1
    raise DegenerateC(f"no generic c found in {max_tries} draws")
