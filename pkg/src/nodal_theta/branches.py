"""Working-radius selection, branch inversion of the d-map, and the zero-set
containment check for the curve image.

beta_k inverts the map d(eps) on its k-th sheet: sheets differ by (0, 1) in
c, matching the integer period of the map in c2.  The transcendental map
d(eps) is
inverted by 1-d complex Newton in c2 on

    F(c2) = c1*r1 + H3(eps; (c1, c2))/(2*pi*i) - (u2 - kappa2),

started from the closed-form solution of the t -> 0 linearization.  The
branch-corrected map d_corr(eps) (see inversion.branch_correction) is affine
in c2 and inverts in closed form; it is the corrected inverse that places
the curve image inside the zero set of the generalized theta function, so
zero_set_residual uses it by default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .abel_jacobi import phi
from .curve import NodalCurveSpec, derive_periods
from .errors import (
    DegenerateC,
    JacobianSingular,
    NewtonDivergence,
    NoValidEpsilon,
    QuadratureFailure,
)
from .inversion import (
    ThetaPullback,
    kappa_vector,
    laurent_data,
    riemann_constants,
    sample_generic_c,
)
from .theta import TWO_PI_I, big_theta, theta_char

_PERIOD_FRACTIONS = (
    0.5,
    1.0 / 3.0, 2.0 / 3.0,
    0.25, 0.75,
    0.2, 0.4, 0.6, 0.8,
)


def estimate_u20_radius(spec: NodalCurveSpec, rng: np.random.Generator | None = None,
                        n_c1: int = 10, det_floor: float = 1e-6) -> float:
    """Largest tested radius on which the Moebius determinant stays bounded
    below by det_floor * scale, sampled over chart circles and generic c."""
    rng = np.random.default_rng(1905) if rng is None else rng
    cs = [sample_generic_c(spec, rng)[0] for _ in range(n_c1)]
    lds = [laurent_data(ThetaPullback(c, spec), spec.eps / 2) for c in cs]
    angles = np.exp(2j * np.pi * np.arange(8) / 8)
    best = 0.0
    for frac in np.linspace(0.95, 0.15, 17):
        r = frac * spec.eps
        dets, scales = [], []
        for ld in lds:
            for rho in (r, 0.75 * r, 0.5 * r, 0.25 * r):
                A, B, C, D = ld.mobius_coeffs(rho * angles)
                dets.append(np.min(np.abs(A * D - B * C)))
                scales.append(np.max(np.abs(A * D) + np.abs(B * C)))
        if min(dets) > det_floor * max(scales):
            best = r
            break
    if best == 0.0:
        raise NoValidEpsilon("Moebius determinant bound fails on every tested radius")
    return best


def select_epsilon(spec: NodalCurveSpec, candidates, rng: np.random.Generator | None = None,
                   n_c: int = 10, sep_tol: float = 1e-4) -> float:
    """First candidate radius whose map d(eps) shows no period in {0} x (Q \\ Z).

    Candidates at or above the determinant-bound radius are skipped.  For
    each remaining candidate, d(eps)(c + (0, s)) is compared against
    d(eps)(c) for the fraction grid s in {1/2, 1/3, 2/3, 1/4, 3/4, 1/5, ...,
    4/5} and n_c generic draws of c; the candidate is accepted when every
    comparison moves by more than sep_tol.
    """
    rng = np.random.default_rng(1106) if rng is None else rng
    u20 = estimate_u20_radius(spec, rng)
    usable = [e for e in candidates if 0 < e < u20]
    if not usable:
        raise NoValidEpsilon(
            f"no candidate below the determinant-bound radius {u20:.4g}"
        )
    cs = [sample_generic_c(spec, rng)[0] for _ in range(n_c)]
    for eps in usable:
        ok = True
        for c in cs:
            base = _d2_value(spec, c, eps)
            for s in _PERIOD_FRACTIONS:
                shifted = _d2_value(spec, (c[0], c[1] + s), eps)
                if abs(shifted - base) <= sep_tol:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return eps
    raise NoValidEpsilon(f"all candidates {list(candidates)} show a rational period")


def _d2_value(spec: NodalCurveSpec, c, eps: float) -> complex:
    tp = ThetaPullback(c, spec)
    ld = laurent_data(tp, eps)
    r1, _, _ = derive_periods(spec)
    return tp.c1 * r1 + ld.H3(eps) / TWO_PI_I


@dataclass(frozen=True)
class BranchInverse:
    """Configuration bundle for inverting d(eps) on the k-th sheet."""

    eps: float
    k: int = 0
    newton_tol: float = 1e-12
    max_iters: int = 50
    use_correction: bool = True

    def __call__(self, u, spec: NodalCurveSpec):
        return beta_k(
            u,
            spec,
            self.eps,
            k=self.k,
            newton_tol=self.newton_tol,
            max_iters=self.max_iters,
            use_correction=self.use_correction,
        )


def _kappa(spec: NodalCurveSpec, eps: float):
    rc = riemann_constants(spec, eps)
    return kappa_vector(rc, spec, "half_tau")


def beta_k(u, spec: NodalCurveSpec, eps: float, k: int = 0,
           newton_tol: float = 1e-12, max_iters: int = 50,
           use_correction: bool = True, _kappa_cache=None) -> tuple[complex, complex]:
    """Inverse of the inversion map on the k-th sheet: the c with
    d(eps)(c) = u - kappa(eps), where consecutive sheets differ by (0, 1).

    With use_correction the branch-corrected map (affine in c2 up to its
    integer branch) is inverted in closed form; both maps are invariant
    under c -> c + (0,1), so round trips close modulo (0,1), which the
    period group absorbs and the generalized theta function does not see.
    Without the correction, the H3-quadrature map is inverted by complex
    Newton in c2 from the linearized initial guess; NewtonDivergence or
    JacobianSingular signals that u lies off the sheet (or near the critical
    set), which callers treat as a skipped sample.
    """
    k1, k2 = _kappa(spec, eps) if _kappa_cache is None else _kappa_cache
    c1 = complex(u[0]) - k1
    v = complex(u[1]) - k2
    r1, _, _ = derive_periods(spec)

    # shared Laurent scaffolding at c2 = 0 (c2 enters only through e(-c2))
    tp0 = ThetaPullback((c1, 0.0), spec)
    ld0 = laurent_data(tp0, eps)
    from .abel_jacobi import phi1 as _phi1

    x1 = _phi1(spec, spec.p1) - c1
    th00_p1 = theta_char((0.0, 0.0), x1, spec.tau, spec.policy)
    beta_c1 = ld0.beta_coeff  # theta_r(phi1(p2) - c1) * g(0)

    if use_correction:
        # d2_corr = c1 r1 + c2 + (Log th00(x1) - Log beta + log eps)/(2 pi i)
        c2 = v - c1 * r1 - (np.log(th00_p1) - np.log(beta_c1) + math.log(eps)) / TWO_PI_I + k
        return (c1, complex(c2))

    # linearized start: H3 ~ eps * h3(0; c), affine in e(c2)
    x2 = _phi1(spec, spec.p2) - c1
    th00_p2 = theta_char((0.0, 0.0), x2, spec.tau, spec.policy)
    P_lin = th00_p2 / beta_c1
    R_lin = ld0.h3_zero_defect
    target = (v - c1 * r1) * TWO_PI_I / eps
    arg = (target - R_lin) / P_lin
    if arg == 0:
        raise NewtonDivergence("linearized start has no solution for e(c2)")
    c2_lin = complex(np.log(arg) / TWO_PI_I) + k

    def F_and_slope(c2):
        ld = laurent_data(ThetaPullback((c1, c2), spec), eps)
        F = c1 * r1 + ld.H3(eps) / TWO_PI_I - v
        dF = ld.dH3_dc2(eps) / TWO_PI_I
        return F, dF

    starts = (c2_lin, c2_lin + 0.25, c2_lin - 0.25, c2_lin + 0.25j, c2_lin - 0.25j)
    last_err: Exception | None = None
    for c2 in starts:
        try:
            f_cur, dF = F_and_slope(c2)
            for _ in range(max_iters):
                if abs(f_cur) < newton_tol:
                    return (c1, c2)
                if abs(dF) < 1e-10:
                    raise JacobianSingular("dH3/dc2 below floor during Newton")
                step = f_cur / dF
                # trust region: cap the step, backtrack while |F| grows
                if abs(step) > 0.7:
                    step *= 0.7 / abs(step)
                for _ in range(8):
                    f_new, dF_new = F_and_slope(c2 - step)
                    if abs(f_new) < abs(f_cur) or abs(step) < newton_tol:
                        break
                    step *= 0.5
                else:
                    raise NewtonDivergence("backtracking stalled; u off the sheet")
                c2 = c2 - step
                f_cur, dF = f_new, dF_new
            else:
                raise NewtonDivergence(f"no convergence within {max_iters} iterations")
        except (NewtonDivergence, JacobianSingular, DegenerateC, QuadratureFailure) as exc:
            # a quadrature blowup means the trial c2 put a zero of the
            # pullback on the chart ray: the iterate left the sheet
            last_err = exc
            continue
    if isinstance(last_err, JacobianSingular):
        raise last_err
    raise NewtonDivergence(f"all starts failed: {last_err}") from last_err


def zero_set_residual(P, spec: NodalCurveSpec, eps: float, path=None, k: int = 0,
                      use_correction: bool = True, _kappa_cache=None) -> float:
    """|Theta(phi(P) - beta_k(phi(P)))|: distance of the curve point's image
    from the zero set cut out by the branch inverses.

    With the branch-corrected inverse this vanishes for points of the curve
    (zero-set containment); the uncorrected inverse leaves an order-one
    residual, which quantifies the branch-cut defect of the stated map.  The
    value is independent of k because the generalized theta function is
    invariant under (0, 1).
    """
    u = phi(spec, P, path).as_tuple()
    c = beta_k(u, spec, eps, k=k, use_correction=use_correction, _kappa_cache=_kappa_cache)
    r1, r2, _ = derive_periods(spec)
    val = big_theta(u[0] - c[0], u[1] - c[1], spec.tau, r1, r2, spec.policy)
    return abs(val)
