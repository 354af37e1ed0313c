"""Complex line integrals and continuous-argument tracking.

Integrands here are analytic along the contours, so composite Gauss-Legendre
panels converge spectrally; a panel is accepted when doubling its node count
moves the value by less than the local tolerance.  The log tracker continues
log f(z) along a contour by summing principal logs of consecutive ratios,
halving steps until each ratio stays well inside the right half plane.
"""

from __future__ import annotations

import cmath
from functools import lru_cache

import numpy as np

from .errors import ContourThroughZero, QuadratureFailure

_MAX_DEPTH = 13


@lru_cache(maxsize=32)
def _gl_nodes(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _panel(f, a: complex, b: complex, n: int) -> complex:
    x, w = _gl_nodes(n)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    vals = f(mid + half * x)
    return half * complex(np.sum(w * vals))


def integrate_segment(f, a, b, tol: float = 1e-10, depth: int = 0) -> complex:
    """Adaptive Gauss-Legendre integral of a vectorized complex integrand
    along the straight segment [a, b]."""
    coarse = _panel(f, a, b, 24)
    fine = _panel(f, a, b, 48)
    if abs(fine - coarse) <= max(tol, 1e-16 * abs(fine)):
        return fine
    if depth >= _MAX_DEPTH:
        raise QuadratureFailure(
            f"segment [{a:.6g}, {b:.6g}] did not converge (err {abs(fine - coarse):.3g})"
        )
    mid = 0.5 * (a + b)
    return integrate_segment(f, a, mid, tol / 2, depth + 1) + integrate_segment(
        f, mid, b, tol / 2, depth + 1
    )


def integrate_polyline(f, vertices, tol: float = 1e-10) -> complex:
    """Integral of f dz along the polyline through `vertices`."""
    verts = list(vertices)
    if len(verts) < 2:
        return 0.0 + 0.0j
    tol_seg = tol / max(1, len(verts) - 1)
    return sum(
        integrate_segment(f, verts[k], verts[k + 1], tol_seg) for k in range(len(verts) - 1)
    )


def integrate_circle(f, center, radius: float, tol: float = 1e-10, u0: float = 0.0, u1: float = 1.0) -> complex:
    """Integral of f dz along the arc center + radius*e(u), u in [u0, u1]."""

    def g(u):
        u = np.asarray(u)
        z = center + radius * np.exp(2j * np.pi * u)
        return f(z) * (2j * np.pi * radius * np.exp(2j * np.pi * u))

    return integrate_segment(g, u0, u1, tol)


def track_log(f, a: complex, b: complex, f_a: complex | None = None,
              max_ratio_log: float = 0.9, min_step: float = 1e-9):
    """Continuous continuation of log f along the segment [a, b].

    Returns (delta_log, f_b): the accumulated change of log f and the value
    f(b).  Steps are halved until each consecutive value ratio satisfies
    |Log ratio| < max_ratio_log, so the tracked argument never jumps by a
    half turn.  Raises ContourThroughZero when halving bottoms out, which
    indicates f vanishes on or very near the segment.
    """
    f_a = f(a) if f_a is None else f_a
    if f_a == 0:
        raise ContourThroughZero(f"f({a:.6g}) = 0 on contour")
    total = 0.0 + 0.0j
    t = 0.0
    step = 1.0
    f_prev = f_a
    while t < 1.0:
        step = min(step, 1.0 - t)
        while True:
            z_next = a + (t + step) * (b - a)
            f_next = f(z_next)
            if f_next != 0:
                ratio = f_next / f_prev
                dlog = cmath.log(ratio)
                if abs(dlog) <= max_ratio_log:
                    break
            if step * abs(b - a) < min_step:
                raise ContourThroughZero(
                    f"log tracking stalled near {z_next:.6g}; zero on or near contour"
                )
            step *= 0.5
        total += dlog
        t += step
        f_prev = f_next
        step *= 1.6  # cautious growth after a comfortable step
    return total, f_prev


def track_log_polyline(f, vertices, f_start: complex | None = None, **kw):
    """track_log chained along a polyline; returns (delta_log, f_end)."""
    verts = list(vertices)
    f_cur = f(verts[0]) if f_start is None else f_start
    total = 0.0 + 0.0j
    for k in range(len(verts) - 1):
        d, f_cur = track_log(f, verts[k], verts[k + 1], f_a=f_cur, **kw)
        total += d
    return total, f_cur


def track_log_sampled(f_vec, a: complex, b: complex, n0: int = 32, n_max: int = 1 << 14):
    """Continuous log change of a vectorized integrand along [a, b].

    Samples the segment at n points, doubling n until every consecutive
    ratio has |Log| < 0.9.  Much faster than scalar stepping when f is
    vectorized, e.g. theta-based integrands on contour walks.
    """
    n = n0
    while True:
        ts = np.linspace(0.0, 1.0, n + 1)
        vals = f_vec(a + ts * (b - a))
        if np.all(vals != 0):
            ratios = vals[1:] / vals[:-1]
            dlogs = np.log(ratios)
            if np.max(np.abs(dlogs)) < 0.9:
                return complex(np.sum(dlogs)), complex(vals[-1])
        if n >= n_max:
            raise ContourThroughZero(
                f"sampled log tracking failed on [{a:.6g}, {b:.6g}] at n={n}"
            )
        n *= 2


def winding_number_sampled(f_vec, vertices, snap_tol: float = 0.1) -> int:
    """Winding of a vectorized function around 0 along a closed polyline."""
    verts = list(vertices)
    if verts[0] != verts[-1]:
        verts = verts + [verts[0]]
    total = 0.0 + 0.0j
    for k in range(len(verts) - 1):
        d, _ = track_log_sampled(f_vec, verts[k], verts[k + 1])
        total += d
    w = total.imag / (2 * np.pi)
    w_int = round(w)
    if abs(w - w_int) > snap_tol or abs(total.real) > snap_tol:
        raise ContourThroughZero(
            f"winding integral {total/(2j*np.pi):.6g} is not an integer"
        )
    return int(w_int)


def winding_number(f, vertices, snap_tol: float = 0.1) -> int:
    """Winding of f around 0 along the closed polyline `vertices`.

    The continuous log change over a closed contour is 2*pi*i times an
    integer; values farther than snap_tol from an integer signal a zero
    sitting on the contour and raise ContourThroughZero.
    """
    verts = list(vertices)
    if verts[0] != verts[-1]:
        verts = verts + [verts[0]]
    total, _ = track_log_polyline(f, verts)
    w = total.imag / (2 * np.pi)
    w_int = round(w)
    if abs(w - w_int) > snap_tol or abs(total.real) > snap_tol:
        raise ContourThroughZero(
            f"winding integral {total/(2j*np.pi):.6g} is not an integer"
        )
    return int(w_int)
