"""Adaptive quadrature with explicit failure reporting.

Thin wrapper over ``scipy.integrate.quad`` that splits at breakpoints,
handles an algebraic endpoint singularity at the left end, and raises
instead of returning a silently degraded estimate.
"""

from __future__ import annotations

import warnings
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

EPSABS = 1e-10
EPSREL = 1e-10


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested accuracy."""

    def __init__(self, message: str, estimate: float = float("nan"), error: float = float("nan")):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


def _quad_piece(f, a, b, power, epsabs, epsrel, limit):
    kwargs = dict(epsabs=epsabs, epsrel=epsrel, limit=limit, full_output=1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        if power:
            out = integrate.quad(f, a, b, weight="alg", wvar=(power, 0.0), **kwargs)
        else:
            out = integrate.quad(f, a, b, **kwargs)
    value, err = out[0], out[1]
    # ier > 0 at these tolerances is usually roundoff; judge by the error estimate
    slack = 1e3 * max(epsabs, epsrel * abs(value))
    if not np.isfinite(value) or (len(out) > 3 and err > slack):
        msg = out[3] if len(out) > 3 else "non-finite value"
        raise QuadratureError(
            f"quadrature on [{a:g}, {b:g}] failed: {msg.strip()} (estimate {value:.6g}, error {err:.3g})",
            value,
            err,
        )
    return value, err


def integrate_interval(
    f: Callable[[float], float],
    a: float,
    b: float,
    *,
    points: Sequence[float] = (),
    left_power: float = 0.0,
    epsabs: float = EPSABS,
    epsrel: float = EPSREL,
    limit: int = 500,
) -> float:
    """Integrate ``f(x) * (x - a)**left_power`` over ``[a, b]``.

    The interval is split at every breakpoint in ``points`` that falls inside
    it; the algebraic weight is handled exactly (QUADPACK QAWS) on the piece
    touching ``a`` and multiplied in elsewhere.

    Raises
    ------
    QuadratureError
        If any piece fails to converge.
    """
    if b <= a:
        return 0.0
    cuts = sorted({float(p) for p in points if a < p < b})
    edges = [a, *cuts, b]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if left_power and lo == a:
            value, _ = _quad_piece(f, lo, hi, left_power, epsabs, epsrel, limit)
        elif left_power:
            value, _ = _quad_piece(lambda x: f(x) * (x - a) ** left_power, lo, hi, 0.0, epsabs, epsrel, limit)
        else:
            value, _ = _quad_piece(f, lo, hi, 0.0, epsabs, epsrel, limit)
        total += value
    return total


def geometric_breakpoints(scale: float, lo: float = 0.0, hi: float = 1.0) -> list[float]:
    """Breakpoints clustered around ``scale`` for integrands peaked at that width."""
    if scale <= 0:
        return []
    pts = [scale * f for f in (0.1, 1.0, 10.0, 100.0, 1000.0)]
    return [p for p in pts if lo < p < hi]
