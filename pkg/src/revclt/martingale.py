"""Martingale approximation of ``S_n`` along simulated paths.

With ``h = V_bar_n g`` the increments

    D_{n,k} = h(W_k) - Qh(W_{k-1})

are stationary martingale differences, ``M_{n,k} = D_{n,1} + ... + D_{n,k}``
and ``R_{n,k} = S_k - M_{n,k}``.  Since ``(I - Q) V_bar_n g = g - QV_n g / n``
the remainder telescopes:

    R_{n,k} = Qh(W_0) - Qh(W_k) + (1/n) sum_{i<=k} QV_n g(W_i).

In the odd setting ``h = g A_n(p)``, ``Qh = g p A_n(p)`` and ``QV_n g = g B_n(p)``
where ``A_n(x) = sum_{k<n} (1 - k/n) x^k`` and ``B_n(x) = x + ... + x^n`` have
closed forms, so every evaluation is O(1) per state.  When ``|g| = 1`` the
conditional variance is

    E(D_{n,k}^2 | W_{k-1} = w) = p (1 - p) A_n(p)^2 + (1 - p) int A_n(p)^2 dnu.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .chain_model import ChainSpec
from .kernels import neumaier_cumsum
from .operator_algebra import (
    PChainFunction,
    VarianceTable,
    dnorm_ratio,
    power_sum,
    remark3_inner,
    v_bar_g,
    vbar_weight,
)
from .quadrature import geometric_breakpoints
from .rng import RngStream
from .simulate import sample_nu, sample_pi, simulate_path, thread_count

__all__ = [
    "Decomposition",
    "LINDEBERG_EPS",
    "LindebergReport",
    "MartingaleKernel",
    "MaxRemainderReport",
    "NU_INNER_SAMPLE",
    "StblReport",
    "build_kernel",
    "check_lindeberg",
    "check_stbl",
    "decompose_path",
    "decompose_runs",
    "max_remainder_experiment",
    "rao_blackwell_dnorm",
    "transition_increments",
]

LINDEBERG_EPS = (0.1, 0.5, 1.0)
# nu sample used for the conditional Lindeberg expectation
NU_INNER_SAMPLE = 2**20


class MartingaleKernel:
    """Evaluators for ``h``, ``Qh``, ``QV_n g`` and the conditional variance at horizon ``n``."""

    def __init__(self, spec: ChainSpec, n: int):
        if n < 1:
            raise ValueError("n must be >= 1")
        if not spec.symmetry.odd_setting:
            raise ValueError("closed-form kernels need odd g with symmetric p and nu")
        self.spec = spec
        self.n = n

    def _u(self, w):
        return np.asarray(self.spec.neg_log_p(np.asarray(w, dtype=float)), dtype=float)

    def weight(self, w):
        """``A_n(p(w))``."""
        return vbar_weight(self.n, self._u(w))

    def h(self, w):
        return self.spec.g(w) * self.weight(w)

    def qh(self, w):
        return self.spec.g(w) * np.exp(-self._u(w)) * self.weight(w)

    def qvn(self, w):
        """``QV_n g(w) = g(w) B_n(p(w))``."""
        return self.spec.g(w) * power_sum(self.n, self._u(w))

    def h_function(self) -> PChainFunction:
        """``h`` as explicit coefficients (bounded by the algebra's size guard)."""
        return v_bar_g(self.spec, self.n)

    @property
    def unit_g(self) -> bool:
        return self.spec.g_sup == 1.0 and self.spec.variant in ("example1", "stable", "constant")

    @cached_property
    def nu_weight_sq(self) -> float:
        """``K_n = int A_n(p)^2 dnu``."""
        spec = self.spec
        if spec.discrete:
            return spec.nu.integrate(lambda w: float(self.weight(w)) ** 2)
        f = lambda y: float(vbar_weight(self.n, float(spec.neg_log_p(1.0 / max(y, 1e-300))))) ** 2
        return spec.nu.integrate_y(f, 0.0, 1.0, points=geometric_breakpoints(1.0 / self.n))

    def cond_var(self, w):
        """``E(D_{n,k}^2 | W_{k-1} = w)``; requires ``|g| = 1``."""
        if not self.unit_g:
            raise ValueError("closed-form conditional variance needs |g| = 1")
        u = self._u(w)
        p = np.exp(-u)
        q = -np.expm1(-u)
        a = vbar_weight(self.n, u)
        return p * q * a * a + q * self.nu_weight_sq

    @cached_property
    def table(self) -> VarianceTable:
        return VarianceTable(self.spec, 2 * self.n + 2)

    @cached_property
    def dnorm_sq(self) -> float:
        """``||D_{n,1}||^2 = <(I - Q^2) h, h>``."""
        return remark3_inner(self.table, self.n, self.n)

    @cached_property
    def sigma_sq(self) -> float:
        return self.table.sigma_sq(self.n)

    def dnorm_ratio(self) -> float:
        return dnorm_ratio(self.spec, self.n, self.table)


def build_kernel(spec: ChainSpec, n: int) -> MartingaleKernel:
    return MartingaleKernel(spec, n)


@dataclass(frozen=True)
class Decomposition:
    """``S``, ``M`` and ``R`` along a path, with the telescoped ``R`` alongside."""

    times: np.ndarray
    S: np.ndarray
    M: np.ndarray
    R: np.ndarray
    R_telescoped: np.ndarray

    @property
    def max_R_sq(self) -> float:
        return float(np.max(self.R**2))

    @property
    def telescoping_gap(self) -> float:
        return float(np.max(np.abs(self.R - self.R_telescoped)))


def _check_spec(kernel: MartingaleKernel, spec: ChainSpec | None) -> None:
    if spec is not None and spec.checksum != kernel.spec.checksum:
        raise ValueError("path was simulated under a different chain than the kernel")


def decompose_path(kernel: MartingaleKernel, states: np.ndarray, spec: ChainSpec | None = None) -> Decomposition:
    """Decomposition at every time ``0..n`` of a full state array ``W_0..W_n``."""
    _check_spec(kernel, spec)
    w = np.asarray(states, dtype=float)
    if w.size != kernel.n + 1:
        raise ValueError(f"expected {kernel.n + 1} states, got {w.size}")
    g = kernel.spec.g(w)
    h = kernel.h(w)
    qh = kernel.qh(w)
    d = h[1:] - qh[:-1]
    S = neumaier_cumsum(g[1:])
    M = neumaier_cumsum(d)
    R_tel = qh[0] - qh + neumaier_cumsum(kernel.qvn(w[1:])) / kernel.n
    return Decomposition(np.arange(w.size), S, M, S - M, R_tel)


def decompose_runs(kernel: MartingaleKernel, w: np.ndarray, lengths: np.ndarray, spec: ChainSpec | None = None) -> Decomposition:
    """Decomposition of a run-length path at the times where ``R`` can peak.

    Within a run the state is constant, so ``R_{n,k}`` is linear in ``k``
    there; its extremes sit after the first step of a run and at its end.
    ``times`` lists those instants (plus time 0).
    """
    _check_spec(kernel, spec)
    w = np.asarray(w, dtype=float)
    L = np.asarray(lengths, dtype=np.int64)
    if int(L.sum()) != kernel.n:
        raise ValueError("run lengths must add up to n")
    g = kernel.spec.g(w)
    h = kernel.h(w)
    qh = kernel.qh(w)
    qv = kernel.qvn(w)
    n = kernel.n
    # run 0 has W_{k-1} = W_0 throughout; later runs enter from the previous state
    prev_qh = np.concatenate([[qh[0]], qh[:-1]])
    d_first = h - prev_qh
    d_rest = h - qh
    act = L > 0
    g, qh, qv, d_first, d_rest, L, prev_qh = (x[act] for x in (g, qh, qv, d_first, d_rest, L, prev_qh))
    ends = np.cumsum(L)
    starts = ends - L + 1
    # increments over [start, start] and (start, end]
    first_S, rest_S = g, (L - 1) * g
    first_M, rest_M = d_first, (L - 1) * d_rest
    first_Q, rest_Q = qv, (L - 1) * qv
    inc_S = np.column_stack([first_S, rest_S]).ravel()
    inc_M = np.column_stack([first_M, rest_M]).ravel()
    inc_Q = np.column_stack([first_Q, rest_Q]).ravel()
    S = neumaier_cumsum(inc_S)
    M = neumaier_cumsum(inc_M)
    Qs = neumaier_cumsum(inc_Q)
    times = np.concatenate([[0], np.column_stack([starts, ends]).ravel()])
    qh_at = np.concatenate([[kernel.qh(w[:1])[0]], np.repeat(qh, 2)])
    R_tel = qh_at[0] - qh_at + Qs / n
    return Decomposition(times, S, M, S - M, R_tel)


# ---------------------------------------------------------------------------
# Monte Carlo reports


def _replicate_runs(spec: ChainSpec, n: int, seed: int, rep: int, purpose: str):
    return simulate_path(spec, n, RngStream(seed, rep, purpose), mode="regenerative")


def _pmap(fn, items, threads: int | None):
    workers = thread_count(threads)
    if workers == 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _visit_counts(lengths: np.ndarray) -> np.ndarray:
    """How often each run state occupies times ``0..n-1``."""
    c = lengths.astype(np.int64).copy()
    c[0] += 1
    c[-1] -= 1
    return c


@dataclass(frozen=True)
class StblReport:
    n: int
    values: np.ndarray

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))

    @property
    def variance(self) -> float:
        return float(np.var(self.values, ddof=1)) if self.values.size > 1 else 0.0

    def histogram(self, bins: int = 20):
        return np.histogram(self.values, bins=bins)


def check_stbl(kernel: MartingaleKernel, reps: int, seed: int, threads: int | None = None) -> StblReport:
    """Per-replicate ``(1/sigma_n^2) sum_{k<=n} E(D_{n,k}^2 | W_{k-1})``."""
    spec, n = kernel.spec, kernel.n
    sig2 = kernel.sigma_sq

    def one(rep: int) -> float:
        w, L = _replicate_runs(spec, n, seed, rep, "stbl")
        return math.fsum(_visit_counts(L) * kernel.cond_var(w)) / sig2

    return StblReport(n, np.array(_pmap(one, range(reps), threads)))


class _NuTable:
    """Sorted ``A_n(p(W'))`` over a ``nu`` sample with prefix sums of 1, a, a^2."""

    def __init__(self, kernel: MartingaleKernel, size: int, seed: int):
        w = sample_nu(kernel.spec, RngStream(seed, 0, "lindeberg-nu"), size).w
        a = np.sort(np.abs(kernel.h(w)))
        self.a = a
        self.size = a.size
        self.P1 = np.concatenate([[0.0], np.cumsum(a)])
        self.P2 = np.concatenate([[0.0], np.cumsum(a * a)])

    def _tail(self, q, t):
        # E[(a - q)^2 ; |a - q| > t] over the sample
        a, P1, P2, N = self.a, self.P1, self.P2, self.size
        hi = np.searchsorted(a, q + t, side="right")
        lo = np.searchsorted(a, q - t, side="left")
        c_hi = N - hi
        s1_hi = P1[-1] - P1[hi]
        s2_hi = P2[-1] - P2[hi]
        s1_lo, s2_lo = P1[lo], P2[lo]
        out = (s2_hi - 2 * q * s1_hi + q * q * c_hi) + (s2_lo - 2 * q * s1_lo + q * q * lo)
        return out / N

    def truncated_second_moment(self, q, t):
        """``E[(s a - q)^2 ; |s a - q| > t]`` with a symmetric sign ``s``."""
        return 0.5 * (self._tail(q, t) + self._tail(-q, t))


@dataclass(frozen=True)
class LindebergReport:
    n: int
    eps: tuple[float, ...]
    values: np.ndarray  # shape (reps, len(eps))
    inner_sample: int

    def mean(self) -> dict:
        return {e: float(np.mean(self.values[:, i])) for i, e in enumerate(self.eps)}


def check_lindeberg(
    kernel: MartingaleKernel,
    eps=LINDEBERG_EPS,
    reps: int = 100,
    seed: int = 0,
    inner_sample: int = NU_INNER_SAMPLE,
    threads: int | None = None,
) -> LindebergReport:
    """Per-replicate ``(1/sigma_n^2) sum_k E(D_{n,k}^2 1{|D_{n,k}| > eps sigma_n} | W_{k-1})``.

    Given ``W_{k-1} = w`` the chain stays (``D = (1 - p) h(w)``) or jumps to
    ``W' ~ nu`` (``D = h(W') - Qh(w)``).  The stay part is exact; the jump
    part averages over a sorted ``nu`` sample of size ``inner_sample``.
    """
    eps = tuple(float(e) for e in np.atleast_1d(eps))
    spec, n = kernel.spec, kernel.n
    sig = math.sqrt(kernel.sigma_sq)
    nu_tab = _NuTable(kernel, inner_sample, seed)

    def one(rep: int) -> np.ndarray:
        w, L = _replicate_runs(spec, n, seed, rep, "lindeberg")
        cnt = _visit_counts(L)
        keep = cnt > 0
        w, cnt = w[keep], cnt[keep]
        u = kernel._u(w)
        p = np.exp(-u)
        q = -np.expm1(-u)
        h = kernel.h(w)
        qh = kernel.qh(w)
        stay = q * h
        out = np.empty(len(eps))
        for i, e in enumerate(eps):
            t = e * sig
            s_part = p * stay * stay * (np.abs(stay) > t)
            j_part = q * nu_tab.truncated_second_moment(qh, t)
            out[i] = math.fsum(cnt * (s_part + j_part)) / kernel.sigma_sq
        return out

    vals = np.array(_pmap(one, range(reps), threads)).reshape(reps, len(eps))
    return LindebergReport(n, eps, vals, inner_sample)


@dataclass(frozen=True)
class MaxRemainderReport:
    n: int
    max_R_sq_over_sigma_sq: np.ndarray
    M_sq_over_sigma_sq: np.ndarray
    telescoping_gap: float

    @property
    def mean_max_R(self) -> float:
        return float(np.mean(self.max_R_sq_over_sigma_sq))

    @property
    def mean_M_sq(self) -> float:
        return float(np.mean(self.M_sq_over_sigma_sq))


def max_remainder_experiment(spec: ChainSpec, n: int, reps: int, seed: int, threads: int | None = None) -> MaxRemainderReport:
    """``max_k R_{n,k}^2 / sigma_n^2`` and ``M_{n,n}^2 / sigma_n^2`` over replicates."""
    kernel = build_kernel(spec, n)
    sig2 = kernel.table.sigma_sq(n)

    def one(rep: int):
        w, L = _replicate_runs(spec, n, seed, rep, "remainder")
        dec = decompose_runs(kernel, w, L)
        scale = max(1.0, float(np.max(np.abs(dec.S))))
        return dec.max_R_sq / sig2, dec.M[-1] ** 2 / sig2, dec.telescoping_gap / scale

    out = _pmap(one, range(reps), threads)
    return MaxRemainderReport(
        n,
        np.array([o[0] for o in out]),
        np.array([o[1] for o in out]),
        max(o[2] for o in out),
    )


def rao_blackwell_dnorm(kernel: MartingaleKernel, size: int, seed: int) -> tuple[float, float]:
    """``E_pi[cond_var]`` estimate of ``||D_{n,1}||^2`` and its standard error."""
    w = sample_pi(kernel.spec, RngStream(seed, 0, "rb-dnorm"), size)
    v = kernel.cond_var(w)
    return float(np.mean(v)), float(np.std(v, ddof=1) / math.sqrt(size))


def transition_increments(kernel: MartingaleKernel, transitions: int, seed: int) -> np.ndarray:
    """``D_{n,k}`` along one stationary stepwise path of the given length."""
    w = simulate_path(kernel.spec, transitions, RngStream(seed, 0, "increments"), mode="stepwise")
    return kernel.h(w[1:]) - kernel.qh(w[:-1])
