"""Safeguarded scalar root finding for strictly increasing functions."""

import numpy as np

from .errors import NumericalError


def _march(func, lo, hi, side):
    """Find a point of the requested sign by marching toward one boundary.

    ``side=-1`` searches for a negative value on candidates approaching ``lo``
    from inside; ``side=+1`` for a positive value approaching ``hi``.  The
    function is assumed to diverge to -inf/+inf at the respective boundary, so
    a NaN (overflowed arithmetic hard against the boundary) is treated as
    having the boundary's limiting sign.
    """
    width = hi - lo
    for k in range(1, 64):
        x = lo + width * 0.5**k if side < 0 else hi - width * 0.5**k
        if not lo < x < hi:
            break
        value = func(x)
        if np.isnan(value):
            return x, side * np.inf
        if side * value > 0:
            return x, value
    raise NumericalError(
        "failed to bracket a root on (%g, %g): no %s value found"
        % (lo, hi, "negative" if side < 0 else "positive")
    )


def increasing_root(func, deriv, lo, hi, tol=1e-12, max_iter=200):
    """Root of a strictly increasing ``func`` on the open interval ``(lo, hi)``.

    ``func`` must be negative near ``lo`` and positive near ``hi`` (it may
    diverge at the boundaries).  Newton steps from ``deriv`` are used whenever
    they stay inside the current sign bracket; otherwise the step falls back
    to bisection, so convergence to absolute tolerance ``tol`` on the bracket
    width is guaranteed.
    """
    if not hi > lo:
        raise ValueError("empty interval (%g, %g)" % (lo, hi))
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        a, _ = _march(func, lo, hi, -1)
        b, _ = _march(func, lo, hi, +1)
        if b < a:
            # The two marches landed out of order (root hugging a boundary);
            # the signs still bracket it.
            a, b = b, a
        x = 0.5 * (a + b)
        for _ in range(max_iter):
            fx = func(x)
            if fx == 0.0:
                return x
            if fx > 0.0:
                b = x
            else:
                a = x
            if b - a <= tol:
                return 0.5 * (a + b)
            slope = deriv(x)
            if np.isfinite(fx) and np.isfinite(slope) and slope > 0.0:
                candidate = x - fx / slope
                if a < candidate < b:
                    x = candidate
                    continue
            x = 0.5 * (a + b)
        # Newton made no further progress; finish with plain bisection.
        while b - a > tol:
            x = 0.5 * (a + b)
            fx = func(x)
            if fx == 0.0:
                return x
            if fx > 0.0:
                b = x
            else:
                a = x
    return 0.5 * (a + b)
