"""Certified quadrature helpers wrapping scipy.integrate.

Every integral carries an absolute error budget.  scipy's returned error
estimate is checked against the budget and an AccuracyError is raised on
failure instead of silently degrading.  Complex integrands are split into
real and imaginary parts.
"""

from __future__ import annotations

import math
from typing import Callable

from scipy.integrate import dblquad, quad

from .errors import AccuracyError

# scipy's abserr is an estimate, not a bound; allow a small factor before
# declaring failure so conservative estimates on easy integrands don't trip.
_SLACK = 2.0


def integrate(f: Callable[[float], complex], a: float, b: float, budget: float) -> complex:
    """Integral of a complex-valued f over [a, b] with absolute error <= budget."""
    if a == b:
        return 0.0
    eps = max(budget / 2.0, 1e-15)
    re, re_err = quad(lambda t: complex(f(t)).real, a, b, epsabs=eps, epsrel=1e-12, limit=400)
    im, im_err = quad(lambda t: complex(f(t)).imag, a, b, epsabs=eps, epsrel=1e-12, limit=400)
    if re_err + im_err > _SLACK * max(budget, 1e-15):
        raise AccuracyError(
            f"quadrature on [{a:g}, {b:g}] missed its budget: "
            f"estimated error {re_err + im_err:.2e} > {budget:.2e}"
        )
    return complex(re, im)


def integrate_decades(f: Callable[[float], complex], a: float, b: float, budget: float) -> complex:
    """Like integrate(), splitting [a, b] at powers of ten.

    Used for the large-t Mellin tail where the integrand decays slowly on a
    long interval; per-decade panels keep the adaptive rule well fed.
    """
    if b <= a:
        return 0.0
    panels = []
    lo = a
    while lo < b:
        hi = min(lo * 10.0, b)
        panels.append((lo, hi))
        lo = hi
    per = budget / len(panels)
    return sum(integrate(f, lo, hi, per) for lo, hi in panels)


def integrate2d(
    f: Callable[[float, float], complex],
    x_lo: float,
    x_hi: float,
    y_lo: float,
    y_hi: float,
    budget: float,
) -> complex:
    """Double integral of f(x, y) over a rectangle with absolute error <= budget."""
    eps = max(budget / 2.0, 1e-13)
    # dblquad integrates f(y, x) with x outer.
    re, re_err = dblquad(lambda y, x: complex(f(x, y)).real, x_lo, x_hi, y_lo, y_hi, epsabs=eps, epsrel=1e-10)
    im, im_err = dblquad(lambda y, x: complex(f(x, y)).imag, x_lo, x_hi, y_lo, y_hi, epsabs=eps, epsrel=1e-10)
    if re_err + im_err > _SLACK * max(budget, 1e-13):
        raise AccuracyError(
            f"2-d quadrature missed its budget: estimated error {re_err + im_err:.2e} > {budget:.2e}"
        )
    return complex(re, im)


def decay_horizon(bound_c: float, rate: float, re_s: float, budget: float) -> float:
    """Truncation point T with  int_T^inf t^(re_s - 1) * C e^(-rate t) dt  <= budget.

    Uses t^(a-1) e^(-rate t/2) decreasing past 2(a-1)/rate, so the tail is
    bounded by C T^(a-1) e^(-rate T) * 2/rate once T is large enough.
    """
    if rate <= 0:
        raise AccuracyError("cannot truncate a trace with no decay rate")
    if bound_c <= 0:
        return 1.0
    a = max(re_s, 1.0)
    t = max(1.0, 2.0 * (a - 1.0) / rate, math.log(2.0 * bound_c / (rate * budget)) / rate)
    for _ in range(40):
        tail = bound_c * t ** (a - 1.0) * math.exp(-rate * t) * 2.0 / rate
        if tail <= budget:
            return t
        t *= 1.5
    raise AccuracyError("failed to find a truncation horizon meeting the budget")
