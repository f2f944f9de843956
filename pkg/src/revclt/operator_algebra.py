"""Exact computations in the function algebra spanned by ``p^j g`` and ``p^j``.

For the jump-or-stay kernel ``Qf = p f + (1 - p) int f dnu``, so

    Q(p^j g) = p^(j+1) g + (int p^j g dnu) (1 - p)
    Q(p^j)   = p^(j+1)   + (int p^j dnu)   (1 - p)

and the span is closed under ``Q``.  Inner products in ``L^2(pi)`` reduce to
moments ``int p^j g^2 dpi``, ``int p^j g dpi`` and ``int p^j dpi``, which the
built-in chains know in closed form.

When ``g`` is odd and ``p``, ``nu`` are symmetric (every built-in), ``Q^k g =
p^k g``, the autocovariances are ``c_k = int p^k g^2 dpi`` and the spectral
measure of ``g`` is the image of ``g^2 dpi`` under ``w -> p(w)``.  Most
quantities below then collapse to prefix sums of ``c_k`` or to one-dimensional
integrals against that measure.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from .chain_model import ChainSpec
from .kernels import neumaier_cumsum
from .quadrature import QuadratureError, geometric_breakpoints

__all__ = [
    "AlgebraSizeError",
    "KappaResult",
    "MomentCache",
    "N_MAX",
    "PChainFunction",
    "SpectralMeasure",
    "VarianceTable",
    "apply_Q",
    "autocovariance",
    "autocovariances",
    "dnorm_ratio",
    "inner",
    "kappa",
    "power_sum",
    "remark3_distance",
    "remark3_inner",
    "remark3_limit",
    "sigma_shifted",
    "sigma_sq",
    "sigma_sq_direct",
    "spectral_integral_check",
    "v_bar_g",
    "v_g",
    "vbar_weight",
    "vnorm_identity_check",
]

N_MAX = 2**40
# explicit coefficient vectors above this length are refused
COEFF_MAX = 10**7
# variance tables are built up to this horizon; beyond it sigma_sq integrates
TABLE_MAX = 2**25


class AlgebraSizeError(ValueError):
    """Requested object is too large to hold as explicit coefficients."""


# ---------------------------------------------------------------------------
# moments


class MomentCache:
    """Lazily extended moment sequences of one chain.

    ``closed_form=False`` forces quadrature even when the chain carries exact
    moments; that path is meant for cross-checks at small degree.
    """

    _NAMES = ("pi_p", "nu_p", "pi_pg", "nu_pg", "pi_pg2")

    def __init__(self, spec: ChainSpec, degree: int = 0, closed_form: bool = True):
        self.spec = spec
        self.closed_form = closed_form and spec.moments is not None
        self._lock = threading.Lock()
        self._data = {name: np.empty(0) for name in self._NAMES}
        self.ensure(degree)

    @property
    def degree(self) -> int:
        return self._data["pi_p"].size - 1

    def ensure(self, degree: int) -> None:
        if degree <= self.degree:
            return
        with self._lock:
            if degree <= self.degree:
                return
            # grow geometrically so repeated small extensions stay cheap
            target = max(degree, 2 * self.degree + 1)
            if not self.closed_form:
                target = degree
            start = self.degree + 1
            new = self._compute(np.arange(start, target + 1))
            for name in self._NAMES:
                self._data[name] = np.concatenate([self._data[name], new[name]])

    def _compute(self, js: np.ndarray) -> dict:
        spec = self.spec
        odd = spec.symmetry.odd_setting
        if self.closed_form:
            pi_p = np.asarray(spec.moments.pi_p(js.astype(float)), dtype=float)
            nu_p = np.asarray(spec.moments.nu_p(js.astype(float)), dtype=float)
            zeros = np.zeros(js.size)
            return {"pi_p": pi_p, "nu_p": nu_p, "pi_pg": zeros, "nu_pg": zeros.copy(), "pi_pg2": pi_p.copy()}
        out = {name: np.empty(js.size) for name in self._NAMES}
        for i, j in enumerate(js.tolist()):
            pts = geometric_breakpoints(1.0 / j) if j else ()
            pj = lambda w, j=j: spec.p(w) ** j
            out["pi_p"][i] = spec.pi.integrate(pj, points=pts)
            out["nu_p"][i] = spec.nu.integrate(pj, points=pts)
            out["pi_pg2"][i] = spec.pi.integrate(lambda w: pj(w) * spec.g(w) ** 2, points=pts)
            if odd:
                out["pi_pg"][i] = out["nu_pg"][i] = 0.0
            else:
                out["pi_pg"][i] = spec.pi.integrate(lambda w: pj(w) * spec.g(w), points=pts)
                out["nu_pg"][i] = spec.nu.integrate(lambda w: pj(w) * spec.g(w), points=pts)
        return out

    def get(self, name: str, degree: int) -> np.ndarray:
        """First ``degree + 1`` values of the named sequence."""
        self.ensure(degree)
        return self._data[name][: degree + 1]


# ---------------------------------------------------------------------------
# the algebra


def _trim(x: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(x)
    return x[: nz[-1] + 1] if nz.size else x[:1] * 0.0


@dataclass(frozen=True)
class PChainFunction:
    """``sum_j a[j] p^j g + sum_j b[j] p^j``."""

    a: np.ndarray = field(default_factory=lambda: np.zeros(1))
    b: np.ndarray = field(default_factory=lambda: np.zeros(1))

    def __post_init__(self):
        object.__setattr__(self, "a", np.atleast_1d(np.asarray(self.a, dtype=float)))
        object.__setattr__(self, "b", np.atleast_1d(np.asarray(self.b, dtype=float)))

    @classmethod
    def g(cls) -> "PChainFunction":
        return cls(a=[1.0], b=[0.0])

    @classmethod
    def constant(cls, value: float = 1.0) -> "PChainFunction":
        return cls(a=[0.0], b=[value])

    @property
    def max_degree(self) -> int:
        return max(_trim(self.a).size, _trim(self.b).size) - 1

    @property
    def pure_g(self) -> bool:
        return not np.any(self.b)

    def __add__(self, other: "PChainFunction") -> "PChainFunction":
        return PChainFunction(_padd(self.a, other.a), _padd(self.b, other.b))

    def __sub__(self, other: "PChainFunction") -> "PChainFunction":
        return self + other.scale(-1.0)

    def scale(self, s: float) -> "PChainFunction":
        return PChainFunction(s * self.a, s * self.b)

    def __call__(self, spec: ChainSpec, w):
        """Evaluate at states ``w``."""
        pw = np.asarray(spec.p(w), dtype=float)
        pa = np.polynomial.polynomial.polyval(pw, self.a)
        pb = np.polynomial.polynomial.polyval(pw, self.b)
        return pa * spec.g(w) + pb

    def coefficients(self) -> dict:
        return {
            "a": {j: float(v) for j, v in enumerate(self.a) if v},
            "b": {j: float(v) for j, v in enumerate(self.b) if v},
        }


def _padd(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    out = np.zeros(max(x.size, y.size))
    out[: x.size] += x
    out[: y.size] += y
    return out


def apply_Q(f: PChainFunction, cache: MomentCache) -> PChainFunction:
    """Image of ``f`` under the transition operator."""
    da, db = f.a.size - 1, f.b.size - 1
    mass = math.fsum(f.a * cache.get("nu_pg", da)) + math.fsum(f.b * cache.get("nu_p", db))
    a = np.concatenate([[0.0], f.a])
    b = np.concatenate([[0.0], f.b])
    b = _padd(b, np.array([mass, -mass]))
    return PChainFunction(a, b)


def inner(f: PChainFunction, h: PChainFunction, cache: MomentCache) -> float:
    """``<f, h>`` in ``L^2(pi)``."""
    aa = np.convolve(f.a, h.a)
    bb = np.convolve(f.b, h.b)
    ab = _padd(np.convolve(f.a, h.b), np.convolve(f.b, h.a))
    return math.fsum(
        np.concatenate(
            [
                aa * cache.get("pi_pg2", aa.size - 1),
                ab * cache.get("pi_pg", ab.size - 1),
                bb * cache.get("pi_p", bb.size - 1),
            ]
        )
    )


def _check_size(n: int) -> None:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n > COEFF_MAX:
        raise AlgebraSizeError(f"n = {n} exceeds {COEFF_MAX} explicit coefficients; use the streaming kernels")


def _q_powers_g(spec: ChainSpec, n: int, cache: MomentCache) -> list[PChainFunction]:
    out = [PChainFunction.g()]
    for _ in range(n - 1):
        out.append(apply_Q(out[-1], cache))
    return out


def v_bar_g(spec: ChainSpec, n: int, cache: MomentCache | None = None) -> PChainFunction:
    """``sum_{k<n} (1 - k/n) Q^k g`` as explicit coefficients."""
    _check_size(n)
    w = 1.0 - np.arange(n) / n
    if spec.symmetry.odd_setting:
        return PChainFunction(a=w, b=[0.0])
    cache = cache or MomentCache(spec)
    out = PChainFunction()
    for k, f in enumerate(_q_powers_g(spec, n, cache)):
        out = out + f.scale(w[k])
    return out


def v_g(spec: ChainSpec, n: int, cache: MomentCache | None = None) -> PChainFunction:
    """``sum_{k<n} Q^k g``."""
    _check_size(n)
    if spec.symmetry.odd_setting:
        return PChainFunction(a=np.ones(n), b=[0.0])
    cache = cache or MomentCache(spec)
    out = PChainFunction()
    for f in _q_powers_g(spec, n, cache):
        out = out + f
    return out


# ---------------------------------------------------------------------------
# autocovariances and variance


def autocovariances(spec: ChainSpec, kmax: int, cache: MomentCache | None = None) -> np.ndarray:
    """``c_0, ..., c_kmax`` with ``c_k = <g, Q^k g>``."""
    cache = cache or MomentCache(spec)
    if spec.symmetry.odd_setting:
        return cache.get("pi_pg2", kmax).copy()
    g = PChainFunction.g()
    out = np.empty(kmax + 1)
    f = g
    for k in range(kmax + 1):
        out[k] = inner(g, f, cache)
        f = apply_Q(f, cache)
    return out


def autocovariance(spec: ChainSpec, k: int, cache: MomentCache | None = None) -> float:
    if k < 0:
        raise ValueError(f"lag must be >= 0, got {k}")
    return float(autocovariances(spec, k, cache)[k])


class VarianceTable:
    """Autocovariances ``c_0..c_kmax`` with compensated prefix sums.

    ``P0[t] = sum_{k<t} c_k`` and ``P1[t] = sum_{k<t} k c_k``; every
    variance-type quantity below is a short combination of the two.
    """

    def __init__(self, spec: ChainSpec, kmax: int, cache: MomentCache | None = None):
        if kmax < 0:
            raise ValueError("kmax must be >= 0")
        if kmax > TABLE_MAX:
            raise AlgebraSizeError(f"table size {kmax} exceeds {TABLE_MAX}")
        self.spec = spec
        self.c = autocovariances(spec, kmax, cache)
        self.P0 = neumaier_cumsum(self.c)
        self.P1 = neumaier_cumsum(np.arange(kmax + 1) * self.c)

    @property
    def kmax(self) -> int:
        return self.c.size - 1

    def _need(self, t) -> None:
        if np.max(t) > self.kmax + 1:
            raise IndexError(f"table holds lags < {self.kmax + 1}, need {int(np.max(t))}")

    def window(self, lo, hi):
        """``(sum c_t, sum t c_t)`` over ``lo <= t < hi``."""
        self._need(hi)
        return self.P0[hi] - self.P0[lo], self.P1[hi] - self.P1[lo]

    def sigma_sq(self, n):
        """``sigma_n^2 = n (2 sum_{k<n} (1 - k/n) c_k - c_0)``; ``sigma_0^2 = 0``."""
        n = np.asarray(n, dtype=np.int64)
        self._need(n)
        out = 2.0 * n * self.P0[n] - 2.0 * self.P1[n] - n * self.c[0]
        return out if out.ndim else float(out)

    def ell(self, n):
        n = np.asarray(n)
        if np.any(n < 1):
            raise ValueError("ell(n) needs n >= 1")
        return self.sigma_sq(n) / n

    def vbar_inner(self, n) -> float:
        """``<g, V_bar_n g> = sum_{k<n} (1 - k/n) c_k``."""
        self._need(n)
        return float(self.P0[n] - self.P1[n] / n)

    def shifted(self, j: int, n: int) -> float:
        """``sigma_n(Q^j g)^2`` in the odd setting, where its autocovariances are ``c_{k+2j}``."""
        s0, s1 = self.window(2 * j, 2 * j + n)
        return float(2.0 * ((n + 2 * j) * s0 - s1) - n * self.c[2 * j])


def _check_n(n: int) -> None:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n > N_MAX:
        raise OverflowError(f"n = {n} exceeds 2**40")


def sigma_sq(spec: ChainSpec, n: int, table: VarianceTable | None = None) -> float:
    """Variance of ``S_n`` under stationarity.

    Up to ``TABLE_MAX`` this is a prefix-sum evaluation; beyond it (odd
    setting only) the same quantity is integrated against the spectral
    measure.
    """
    _check_n(n)
    if table is not None and n <= table.kmax + 1:
        return table.sigma_sq(n)
    if n <= TABLE_MAX:
        return VarianceTable(spec, n).sigma_sq(n)
    sm = SpectralMeasure(spec)
    c0 = sm.mass()
    return n * (2.0 * sm.vbar_integral(n) - c0)


def sigma_sq_direct(c: np.ndarray, n: int) -> float:
    """``n c_0 + 2 sum_{k=1}^{n-1} (n - k) c_k`` summed exactly rounded."""
    k = np.arange(1, n)
    return math.fsum(np.concatenate([[n * c[0]], 2.0 * (n - k) * c[1:n]]))


def sigma_shifted(spec: ChainSpec, j: int, n: int, table: VarianceTable | None = None) -> float:
    """``sigma_n(Q^j g)^2``."""
    if j < 0:
        raise ValueError("j must be >= 0")
    _check_n(n)
    if spec.symmetry.odd_setting:
        if table is None or table.kmax < n + 2 * j:
            table = VarianceTable(spec, n + 2 * j)
        return table.shifted(j, n)
    cache = MomentCache(spec)
    f = PChainFunction.g()
    for _ in range(j):
        f = apply_Q(f, cache)
    # autocovariances of f by iterating Q on it
    cs = np.empty(n)
    h = f
    for k in range(n):
        cs[k] = inner(f, h, cache)
        h = apply_Q(h, cache)
    return sigma_sq_direct(cs, n)


# ---------------------------------------------------------------------------
# closed-form kernel weights


def _faulhaber(n: int, mmax: int) -> list[int]:
    """Exact ``sum_{k<n} k^m`` for ``m = 0..mmax``."""
    P: list[int] = []
    for m in range(mmax + 1):
        acc = n ** (m + 1)
        for j in range(m):
            acc -= math.comb(m + 1, j) * P[j]
        P.append(acc // (m + 1))
    return P


_SERIES_TERMS = 9
_SERIES_SWITCH = 1e-2


def _vbar_series_coeffs(n: int) -> np.ndarray:
    # A_n(e^-u) = sum_m (-u)^m / m! * sum_{k<n} (1 - k/n) k^m
    P = _faulhaber(n, _SERIES_TERMS + 1)
    return np.array([(-1) ** m * ((n * P[m] - P[m + 1]) / (n * math.factorial(m))) for m in range(_SERIES_TERMS)])


def power_sum(n: int, u) -> np.ndarray:
    """``B_n = sum_{j=1}^n x^j`` at ``x = exp(-u)``, ``u >= 0``."""
    u = np.asarray(u, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.exp(-u) * np.expm1(-n * u) / np.expm1(-u)
    return np.where(u == 0.0, float(n), out)


def vbar_weight(n: int, u) -> np.ndarray:
    """``A_n(x) = sum_{k<n} (1 - k/n) x^k`` at ``x = exp(-u)``.

    Closed form ``(n - B_n) / (n (1 - x))``; when ``n u`` is small that loses
    about ``2 eps / (n u)`` relative accuracy, so a short series in ``u``
    with exact power-sum coefficients takes over there.
    """
    u = np.asarray(u, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        closed = (n - power_sum(n, u)) / (-n * np.expm1(-u))
    small = n * u < _SERIES_SWITCH
    if np.any(small):
        closed = np.array(closed, dtype=float)
        closed[small] = np.polynomial.polynomial.polyval(u[small], _vbar_series_coeffs(n))
    return closed if closed.ndim else float(closed)


# ---------------------------------------------------------------------------
# spectral measure


class SpectralMeasure:
    """``mu_g`` as the image of ``g^2 dpi`` under ``w -> p(w)``.

    Only valid in the odd setting.  Integrals are carried out in the chain's
    own coordinates, where the integrands are smooth.
    """

    def __init__(self, spec: ChainSpec):
        if not spec.symmetry.odd_setting:
            raise ValueError("the pushforward representation needs odd g with symmetric p and nu")
        self.spec = spec

    def _g2(self, w):
        return self.spec.g(w) ** 2

    def atoms(self) -> tuple[np.ndarray, np.ndarray]:
        """Atom locations and masses (discrete state spaces only)."""
        spec = self.spec
        if not spec.discrete:
            raise ValueError("continuous spectral measure has no atoms")
        locs: dict[float, float] = {}
        for a, wt in zip(spec.pi.atoms, spec.pi.weights):
            lam = float(spec.p(a))
            locs[lam] = locs.get(lam, 0.0) + wt * float(self._g2(a))
        lam = np.array(sorted(locs))
        return lam, np.array([locs[v] for v in lam])

    def integrate_u(self, fu: Callable, u_min: float = 0.0, points: Sequence[float] = ()) -> float:
        """``int f dmu_g`` with ``f`` given as a function of ``u = -log(lambda)``.

        Restricted to ``u >= u_min``, i.e. ``lambda <= exp(-u_min)``.
        ``points`` are breakpoints in ``u``.
        """
        spec = self.spec
        if spec.discrete:
            lam, mass = self.atoms()
            with np.errstate(divide="ignore"):
                u = -np.log(lam)
            keep = u >= u_min
            return math.fsum(mass[keep] * np.array([fu(x) for x in u[keep]], dtype=float))
        # u = neg_log_p(1/y) is increasing in y on (0, 1]
        nlp = lambda y: float(spec.neg_log_p(1.0 / y))
        y_lo = 0.0
        if u_min > 0.0:
            if u_min >= nlp(1.0):
                return 0.0
            y_lo = optimize.brentq(lambda y: nlp(y) - u_min, 1e-300, 1.0, xtol=1e-300, rtol=4 * np.finfo(float).eps)
        ypts = [y for y in points if y_lo < y < 1.0] if spec.kernel and spec.kernel[0] == 0 else ()
        return spec.pi.integrate_y(lambda y: fu(nlp(max(y, 1e-300))) * self._g2(1.0 / max(y, 1e-300)), y_lo, 1.0, points=ypts)

    def integrate(self, f: Callable, lam_max: float | None = None, points: Sequence[float] = ()) -> float:
        """``int f(lambda) dmu_g`` over ``lambda <= lam_max``."""
        u_min = 0.0 if lam_max is None else -math.log(lam_max)
        return self.integrate_u(lambda u: f(math.exp(-u)), u_min, points)

    def mass(self) -> float:
        return self.integrate_u(lambda u: 1.0)

    def moment(self, k: int) -> float:
        pts = geometric_breakpoints(1.0 / k) if k else ()
        return self.integrate_u(lambda u: math.exp(-k * u), points=pts)

    def vbar_integral(self, n: int) -> float:
        """``int A_n(lambda) dmu_g``, the spectral form of ``<g, V_bar_n g>``."""
        return self.integrate_u(lambda u: float(vbar_weight(n, u)), points=geometric_breakpoints(1.0 / n))


# ---------------------------------------------------------------------------
# kappa


@dataclass(frozen=True)
class KappaResult:
    """Outcome of ``int (1 + lambda) / (1 - lambda) dmu_g``."""

    value: float
    divergent: bool
    deltas: tuple[float, ...]
    partials: tuple[float, ...]

    @property
    def flag(self) -> str:
        return "divergent" if self.divergent else "finite"


KAPPA_DELTAS = tuple(10.0**-k for k in range(2, 9))


def kappa(spec: ChainSpec, cap: float = 1e6, deltas: Sequence[float] = KAPPA_DELTAS, rtol: float = 1e-9) -> KappaResult:
    """Evaluate ``kappa`` on ``[0, 1 - delta]`` for shrinking ``delta``.

    Finite when the partial integrals settle (last increment below ``rtol``
    relative, or increments shrinking by at least half each step);
    divergent when they keep growing without that contraction or exceed
    ``cap``.
    """
    sm = SpectralMeasure(spec)
    # (1 + x) / (1 - x) with x = e^-u, without cancellation near u = 0
    f = lambda u: (1.0 + math.exp(-u)) / -math.expm1(-u)
    partials = []
    for d in deltas:
        u_min = -math.log1p(-d)
        partials.append(sm.integrate_u(f, u_min, points=geometric_breakpoints(u_min)))
    partials_t = tuple(partials)
    value = partials[-1]
    incs = np.diff(partials)
    if value > cap:
        return KappaResult(math.inf, True, tuple(deltas), partials_t)
    if incs.size == 0 or abs(incs[-1]) <= rtol * max(abs(value), 1.0):
        return KappaResult(value, False, tuple(deltas), partials_t)
    contracting = all(abs(b) <= 0.5 * abs(a) for a, b in zip(incs[:-1], incs[1:]))
    if contracting:
        # geometric tail bound on what is left
        r = abs(incs[-1] / incs[-2]) if incs.size > 1 and incs[-2] else 0.0
        return KappaResult(value + incs[-1] * r / (1.0 - r), False, tuple(deltas), partials_t)
    return KappaResult(math.inf, True, tuple(deltas), partials_t)


# ---------------------------------------------------------------------------
# identity checks


def vnorm_identity_check(spec: ChainSpec, n: int, table: VarianceTable | None = None, cache: MomentCache | None = None):
    """``(lhs, rhs, deviation)`` for ``||V_n g||^2 = sigma_{2n-1}^2/2 - sigma_{n-1}^2 + ||g||^2/2``.

    ``lhs`` is the algebra inner product of the explicit coefficient vector;
    ``rhs`` comes from the variance table.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    cache = cache or MomentCache(spec, 2 * n)
    vn = v_g(spec, n, cache)
    lhs = inner(vn, vn, cache)
    if table is None or table.kmax < 2 * n - 1:
        table = VarianceTable(spec, 2 * n - 1, cache)
    rhs = 0.5 * table.sigma_sq(2 * n - 1) - table.sigma_sq(n - 1) + 0.5 * table.c[0]
    return lhs, rhs, abs(lhs - rhs)


def spectral_integral_check(spec: ChainSpec, n: int, table: VarianceTable | None = None):
    """``(spectral value, autocovariance value, deviation)`` for ``<g, V_bar_n g>``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    sm = SpectralMeasure(spec)
    try:
        lhs = sm.vbar_integral(n)
    except QuadratureError as exc:
        raise QuadratureError(f"spectral integral at n={n}: {exc}", exc.estimate, exc.error) from exc
    if table is None or table.kmax < n:
        table = VarianceTable(spec, n)
    rhs = table.vbar_inner(n)
    return lhs, rhs, abs(lhs - rhs)


# ---------------------------------------------------------------------------
# martingale increments D_{n,1}


def _window_sums(table: VarianceTable, m: int, kmax: int) -> np.ndarray:
    """``r_k = sum_{j<m} (1 - j/m) c_{k+j}`` for ``k = 0..kmax``."""
    k = np.arange(kmax + 1)
    table._need(kmax + m)
    s0 = table.P0[k + m] - table.P0[k]
    s1 = table.P1[k + m] - table.P1[k]
    return s0 - (s1 - k * s0) / m


def remark3_inner(table: VarianceTable, m: int, n: int) -> float:
    """``<D_{m,1}, D_{n,1}> = <(I - Q^2) V_bar_n g, V_bar_m g>`` (odd setting)."""
    if m < 1 or n < 1:
        raise ValueError("m, n must be >= 1")
    r = _window_sums(table, m, n + 1)
    w = 1.0 - np.arange(n) / n
    return math.fsum(w * (r[:n] - r[2 : n + 2]))


def _dnorm(table: VarianceTable, n: int) -> float:
    return remark3_inner(table, n, n)


def remark3_distance(spec: ChainSpec, m: int, n: int, table: VarianceTable | None = None) -> float:
    """``|| D_{n,1}/sqrt(ell(n)) - D_{m,1}/sqrt(ell(m)) ||^2``."""
    if m == n:
        return 0.0
    need = 2 * max(m, n) + 2
    if table is None or table.kmax < need:
        table = VarianceTable(spec, need)
    ln, lm = table.ell(n), table.ell(m)
    dn, dm = _dnorm(table, n), _dnorm(table, m)
    cross = remark3_inner(table, m, n)
    return dn / ln + dm / lm - 2.0 * cross / math.sqrt(ln * lm)


def remark3_limit(spec: ChainSpec, m: int, table: VarianceTable | None = None) -> float:
    """``1 + ||D_{m,1}||^2 / ell(m)``: the ``n -> inf`` limit of the distance when
    ``||D_{n,1}||^2/ell(n) -> 1`` and the cross term vanishes."""
    if table is None or table.kmax < 2 * m + 2:
        table = VarianceTable(spec, 2 * m + 2)
    return 1.0 + _dnorm(table, m) / table.ell(m)


def dnorm_ratio(spec: ChainSpec, n: int, table: VarianceTable | None = None) -> float:
    """``||D_{n,1}||^2 / ell(n)``."""
    if table is None or table.kmax < 2 * n + 2:
        table = VarianceTable(spec, 2 * n + 2)
    return _dnorm(table, n) / table.ell(n)
