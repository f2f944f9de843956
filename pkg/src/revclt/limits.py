"""Limit laws and normalising sequences.

Holding times ``dtau`` of the jump-or-stay chain satisfy
``P[dtau >= k] = int p^(k-1) dnu``.  With ``|g| = 1`` the block sums have
``|Y| = dtau``, so the truncated second moment ``H(y) = E[Y^2; |Y| <= y]`` is a
partial sum of ``k^2 P[dtau = k]``.  The norming ``gamma_m`` solves
``gamma^2 = m H(gamma)``.

Symmetric stable laws with characteristic function ``exp(-c |t|^alpha)`` are
evaluated by sine-kernel inversion.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize, special

from .chain_model import ChainSpec
from .operator_algebra import MomentCache
from .quadrature import QuadratureError, geometric_breakpoints, integrate_interval

__all__ = [
    "GammaSolveError",
    "HoldingLaw",
    "K_SWITCH",
    "StableRef",
    "TailModel",
    "c_alpha",
    "c_alpha_reflection",
    "gamma_m",
    "normal_cdf",
    "solve_gamma",
    "stable_cdf",
    "wynn_epsilon",
]

K_SWITCH = 10**4
OVERLAP_TOL = 0.02
STABLE_TAIL_X = 1e8


# ---------------------------------------------------------------------------
# holding times


@dataclass(frozen=True)
class TailModel:
    """``q_k ~ C k^(-a)`` fitted at the switch point, giving ``k^2 f(k) ~ a C k^(1-a)``."""

    C: float
    a: float
    K: int

    def h_increment(self, lo: float, hi: float) -> float:
        """Model value of ``sum_{lo < k <= hi} k^2 f(k)`` as an integral."""
        if hi <= lo:
            return 0.0
        a, C = self.a, self.C
        if abs(a - 2.0) < 1e-9:
            return a * C * math.log(hi / lo)
        return a * C * (hi ** (2.0 - a) - lo ** (2.0 - a)) / (2.0 - a)


class HoldingLaw:
    """Law of one holding time ``dtau`` on ``{1, 2, ...}``.

    ``method="closed"`` uses exact moments when the chain has them;
    ``"quadrature"`` integrates each ``q_k`` (slower, used for cross-checks).
    """

    def __init__(self, spec: ChainSpec, method: str = "closed", k_switch: int = K_SWITCH):
        if method not in ("closed", "quadrature"):
            raise ValueError("method must be 'closed' or 'quadrature'")
        if method == "closed" and spec.moments is None:
            method = "quadrature"
        self.spec = spec
        self.method = method
        self.k_switch = k_switch
        self._cache = MomentCache(spec) if method == "closed" else None
        self._qcache: dict[int, float] = {}
        self._fcache: dict[int, float] = {}
        self._lock = threading.Lock()
        self._tail: TailModel | None = None
        self._hsum: np.ndarray | None = None

    # q and f -----------------------------------------------------------
    def _quad(self, k: int, with_one_minus_p: bool) -> float:
        spec = self.spec
        j = k - 1
        pts = geometric_breakpoints(1.0 / j) if j else ()
        if with_one_minus_p:
            fn = lambda w: spec.p(w) ** j * spec.one_minus_p(w)
        else:
            fn = lambda w: spec.p(w) ** j
        return spec.nu.integrate(fn, points=pts)

    def q(self, k: int) -> float:
        """``P[dtau >= k]``."""
        if k <= 1:
            return 1.0
        if self._cache is not None:
            return float(self._cache.get("nu_p", k - 1)[k - 1])
        with self._lock:
            if k not in self._qcache:
                self._qcache[k] = self._quad(k, False)
            return self._qcache[k]

    def f(self, k: int) -> float:
        """``P[dtau = k]``."""
        if k < 1:
            return 0.0
        if self._cache is not None:
            return float(self.f_array(k)[k - 1])
        with self._lock:
            if k not in self._fcache:
                self._fcache[k] = self._quad(k, True)
            return self._fcache[k]

    def q_array(self, K: int) -> np.ndarray:
        """``q_1 .. q_K``."""
        if self._cache is not None:
            return self._cache.get("nu_p", K - 1)[:K].copy()
        return np.array([self.q(k) for k in range(1, K + 1)])

    def f_array(self, K: int) -> np.ndarray:
        """``f(1) .. f(K)``."""
        if self._cache is not None:
            nu = self._cache.get("nu_p", K)
            return nu[:K] - nu[1 : K + 1]
        return np.array([self.f(k) for k in range(1, K + 1)])

    def mean_truncated(self, K: int) -> float:
        """``sum_{k<=K} k f(k)``; tends to ``theta``."""
        k = np.arange(1, K + 1)
        return math.fsum(k * self.f_array(K))

    def tail_prob(self, y: float) -> float:
        """``P[|Y| > y] = P[dtau > y]`` for ``|g| = 1``."""
        return self.q(int(math.floor(y)) + 1) if y >= 1 else 1.0

    # H ------------------------------------------------------------------
    def _ensure_hsum(self) -> np.ndarray:
        if self._hsum is None:
            K = self.k_switch
            k = np.arange(1, K + 1, dtype=float)
            terms = k * k * self.f_array(K)
            self._hsum = np.concatenate([[0.0], np.cumsum(terms)])
        return self._hsum

    def tail_model(self) -> TailModel:
        """Power-law fit of ``q_k`` at ``K/2`` and ``K``, checked on the overlap ``(K/2, K]``."""
        if self._tail is not None:
            return self._tail
        K = self.k_switch
        h = self._ensure_hsum()
        k1, k2 = K // 2, K
        q1, q2 = self.q(k1 + 1), self.q(k2 + 1)
        a = math.log(q1 / q2) / math.log(k2 / k1)
        C = q2 * k2**a
        model = TailModel(C, a, K)
        exact = h[k2] - h[k1]
        approx = model.h_increment(k1 + 0.5, k2 + 0.5)
        if abs(approx / exact - 1.0) > OVERLAP_TOL:
            raise QuadratureError(f"tail model of H disagrees with exact sums by {abs(approx / exact - 1):.3%} on ({k1}, {k2}]")
        self._tail = model
        return model

    def H(self, y: float) -> float:
        """``E[Y^2; |Y| <= y]``; exact partial sums up to ``k_switch``, tail model beyond."""
        if y < 1:
            return 0.0
        K = self.k_switch
        h = self._ensure_hsum()
        if y <= K:
            return float(h[int(math.floor(y))])
        return float(h[K]) + self.tail_model().h_increment(K + 0.5, math.floor(y) + 0.5)

    def H_continuous(self, y: float) -> float:
        """``H`` linearly interpolated between integers: continuous and nondecreasing."""
        if y < 1:
            return 0.0
        lo = math.floor(y)
        return self.H(lo) + (y - lo) * (self.H(lo + 1) - self.H(lo))


# ---------------------------------------------------------------------------
# gamma_m


class GammaSolveError(RuntimeError):
    """Fixed-point iteration for gamma_m did not converge."""


def solve_gamma(H: Callable[[float], float], m: float, tol: float = 1e-10, max_iter: int = 1000, x0: float | None = None) -> float:
    """Solve ``gamma^2 = m H(gamma)`` by the iteration ``gamma <- sqrt(m H(gamma))``.

    For nondecreasing ``H`` growing slower than ``y^2`` the iterates are
    monotone and converge to the unique crossing.
    """
    if m <= 0:
        raise ValueError("m must be positive")
    g = x0 if x0 is not None else math.sqrt(m * max(H(math.sqrt(m)), 1e-300))
    for _ in range(max_iter):
        g_new = math.sqrt(m * H(g))
        if abs(g_new - g) <= tol * g_new:
            g = g_new
            break
        g = g_new
    else:
        raise GammaSolveError(f"no convergence in {max_iter} iterations (last {g})")
    resid = abs(g * g - m * H(g)) / (g * g)
    if resid >= 1e-6:
        raise GammaSolveError(f"residual {resid:.2e} after convergence")
    return g


def gamma_m(spec: ChainSpec, m: float, law: HoldingLaw | None = None) -> float:
    law = law or HoldingLaw(spec)
    return solve_gamma(law.H_continuous, m)


# ---------------------------------------------------------------------------
# c_alpha


def wynn_epsilon(partials: np.ndarray) -> float:
    """Wynn's epsilon extrapolation of a sequence of partial sums."""
    s = [float(v) for v in partials]
    n = len(s)
    prev = [0.0] * (n + 1)
    cur = s[:]
    best = cur[-1]
    for k in range(1, n):
        nxt = []
        for i in range(len(cur) - 1):
            diff = cur[i + 1] - cur[i]
            if diff == 0.0:
                # the sequence has converged at this level
                return cur[i + 1] if k % 2 == 1 else best
            nxt.append(prev[i + 1] + 1.0 / diff)
        prev, cur = cur, nxt
        if k % 2 == 0 and cur:
            best = cur[-1]
    return best


def _check_alpha(alpha: float) -> None:
    if not (1.0 < alpha < 2.0):
        raise ValueError(f"alpha must lie strictly between 1 and 2, got {alpha}")


def sine_power_integral(alpha: float, arches: int = 40) -> float:
    """``int_0^inf x^(-alpha) sin(x) dx`` by arches between zeros of ``sin`` plus Wynn acceleration."""
    _check_alpha(alpha)
    # first arch: sin(x)/x is smooth, x^(1-alpha) handled exactly
    first = integrate_interval(lambda x: math.sin(x) / x if x else 1.0, 0.0, math.pi, left_power=1.0 - alpha, epsabs=1e-15, epsrel=1e-14)
    terms = [first]
    for k in range(1, arches):
        a, b = k * math.pi, (k + 1) * math.pi
        terms.append(integrate_interval(lambda x: x ** (-alpha) * math.sin(x), a, b, epsabs=1e-16, epsrel=1e-14))
    return wynn_epsilon(np.cumsum(terms))


def c_alpha_reflection(alpha: float) -> float:
    """Same constant with the inner integral in closed form ``Gamma(1-alpha) cos(pi alpha/2)``."""
    _check_alpha(alpha)
    return (alpha - 1.0) * math.gamma(alpha) * special.gamma(1.0 - alpha) * math.cos(math.pi * alpha / 2.0)


def c_alpha(alpha: float) -> float:
    """``(alpha - 1) Gamma(alpha) int_0^inf x^(-alpha) sin x dx``."""
    return (alpha - 1.0) * math.gamma(alpha) * sine_power_integral(alpha)


# ---------------------------------------------------------------------------
# reference CDFs


def normal_cdf(mean: float, variance: float, x):
    """``Normal[mean, variance]`` CDF; zero variance is a point mass at ``mean``."""
    if variance < 0:
        raise ValueError("variance must be >= 0")
    x = np.asarray(x, dtype=float)
    if variance == 0:
        out = (x >= mean).astype(float)
    else:
        out = 0.5 * special.erfc(-(x - mean) / math.sqrt(2.0 * variance))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class StableRef:
    """Symmetric stable law with characteristic function ``exp(-c |t|^alpha)``."""

    alpha: float
    c: float = 1.0

    def __post_init__(self):
        _check_alpha(self.alpha)
        if self.c <= 0:
            raise ValueError("scale must be positive")

    def _t_max(self) -> float:
        # exp(-c t^alpha) < 1e-18 beyond this
        return (42.0 / self.c) ** (1.0 / self.alpha)

    def _body(self, x: float) -> float:
        a, c = self.alpha, self.c

        def f(t):
            if t == 0.0:
                return x
            return math.sin(t * x) / t * math.exp(-c * t**a)

        tmax = self._t_max()
        if abs(x) * tmax <= 200.0:
            pts = [k * math.pi / abs(x) for k in range(1, int(abs(x) * tmax / math.pi) + 1)] if x else []
            val = integrate_interval(f, 0.0, tmax, points=pts, epsabs=1e-12, epsrel=1e-12, limit=2000)
            return 0.5 + val / math.pi
        tail = self._upper_tail(abs(x))
        return 1.0 - tail if x > 0 else tail

    def _upper_tail(self, z: float) -> float:
        # Zolotarev's non-oscillatory form for symmetric laws,
        # 1 - F(z) = (1/pi) int_0^{pi/2} exp(-(z/c^(1/alpha))^q V(th)) dth,
        # q = alpha/(alpha-1), written in phi = pi/2 - th where the mass sits
        a = self.alpha
        q = a / (a - 1.0)
        half = math.pi / 2.0
        lzq = q * math.log(z / self.c ** (1.0 / a))

        def log_v(phi: float) -> float:
            th = half - phi
            return (q - 1.0) * math.log(math.sin(phi)) - q * math.log(math.sin(a * th)) + math.log(math.cos((a - 1.0) * th))

        lo, hi = math.log(1e-300), math.log(half * (1.0 - 1e-15))

        def level(lev: float) -> float:
            g = lambda s: log_v(math.exp(s)) + lzq - math.log(lev)
            if g(lo) > 0:
                return 0.0
            if g(hi) < 0:
                return half
            return math.exp(optimize.brentq(g, lo, hi, xtol=1e-13, rtol=1e-14))

        end = level(745.0)
        if end == 0.0:
            return 0.0
        pts = sorted({level(v) for v in (50.0, 10.0, 1.0, 0.1, 0.01, 1e-3)} - {0.0, end})

        def f(phi: float) -> float:
            return math.exp(-math.exp(lzq + log_v(phi))) if phi > 0 else 1.0

        val = integrate_interval(f, 0.0, end, points=pts, epsabs=0.0, epsrel=1e-12, limit=500)
        return val / math.pi

    def tail_asymptotic(self, x: float) -> float:
        """First-order ``P[X > |x|] ~ c Gamma(alpha) sin(pi alpha/2) / (pi |x|^alpha)``."""
        a = self.alpha
        return self.c * math.gamma(a) * math.sin(math.pi * a / 2.0) / (math.pi * abs(x) ** a)

    def cdf_flagged(self, x: float) -> tuple[float, bool]:
        """``(F(x), used_tail_asymptotic)``."""
        x = float(x)
        if not np.isfinite(x):
            raise ValueError("x must be finite")
        if abs(x) > STABLE_TAIL_X:
            t = self.tail_asymptotic(x)
            return (1.0 - t if x > 0 else t), True
        return self._body(x), False

    def cdf(self, x):
        xs = np.asarray(x, dtype=float)
        out = np.array([self.cdf_flagged(v)[0] for v in xs.ravel()]).reshape(xs.shape)
        return out if out.ndim else float(out)

    def sf(self, x: float) -> float:
        """``P[X > x]`` without the cancellation in ``1 - cdf`` for large ``x``."""
        x = float(x)
        if x <= 0:
            return 1.0 - self.cdf(x)
        if x > STABLE_TAIL_X:
            return self.tail_asymptotic(x)
        if x * self._t_max() <= 200.0:
            return 1.0 - self._body(x)
        return self._upper_tail(x)

    def __call__(self, x):
        return self.cdf(x)


def stable_cdf(ref: StableRef, x):
    return ref.cdf(x)
