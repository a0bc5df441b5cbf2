"""Adaptive Gauss-Kronrod integration over [lower, inf).

The half line is split at x = 1.  On [lower, 1] we substitute x = v^2,
which smooths the x^{j - j_*} and logarithmic endpoint behaviour at 0; on
[1, inf) we substitute x = 1 + u / (1 - u).  Each piece goes to QUADPACK's
adaptive 21-point Gauss-Kronrod rule (``scipy.integrate.quad``).
"""
import math
import warnings

from scipy import integrate

from .errors import QuadratureFailure

REL_TOL = 1e-10
ABS_FLOOR = 1e-14
_LIMIT = 800


def _quad(fun, a, b, points, rel_tol, abs_floor):
    pts = sorted(p for p in set(points) if a < p < b)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err, *_ = integrate.quad(
            fun, a, b,
            points=pts or None,
            epsabs=abs_floor,
            epsrel=rel_tol * 0.1,
            limit=_LIMIT,
            full_output=1,
        )
    if not math.isfinite(val) or err > max(abs_floor, rel_tol * abs(val)):
        raise QuadratureFailure(
            f"quadrature on [{a:.3g}, {b:.3g}] reached error {err:.3g} for value {val:.6g}"
        )
    return val, err


def half_line(fun, lower=0.0, breakpoints=(), rel_tol=REL_TOL, abs_floor=ABS_FLOOR):
    """Integrate ``fun`` (a scalar function of x) over [lower, inf).

    ``breakpoints`` are x-locations where the integrand changes character
    (peaks, decay onset); they are mapped into the substituted coordinates.
    Returns ``(value, error_estimate)``.
    """
    total = 0.0
    err = 0.0
    split = max(1.0, lower)
    if lower < 1.0:
        v0 = math.sqrt(lower)

        def inner(v):
            return 2.0 * v * fun(v * v)

        pts = [math.sqrt(x) for x in breakpoints if lower < x < 1.0]
        val, e = _quad(inner, v0, 1.0, pts, rel_tol, abs_floor)
        total += val
        err += e

    def outer(u):
        w = 1.0 - u
        if w <= 0.0:  # x = inf; a convergent integrand vanishes there
            return 0.0
        return fun(split + u / w) / (w * w)

    pts = [(x - split) / (1.0 + x - split) for x in breakpoints if x > split]
    val, e = _quad(outer, 0.0, 1.0, pts, rel_tol, abs_floor)
    total += val
    err += e
    if abs(total) > 0 and err > rel_tol * abs(total) + abs_floor:
        raise QuadratureFailure(f"combined error {err:.3g} exceeds tolerance for {total:.6g}")
    return total, err
