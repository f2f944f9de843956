"""Empirical-versus-reference comparisons for simulated normalized sums.

Everything here is a pure function of its inputs.  KS statistics come from
``scipy.stats`` and 1% critical values from the asymptotic Kolmogorov law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import special, stats

from .operator_algebra import VarianceTable

__all__ = [
    "MAD_CONSISTENCY",
    "BinningReport",
    "EmpiricalSummary",
    "IntegrabilityReport",
    "SlowVariationRow",
    "conditional_binning",
    "critical_value",
    "ecdf",
    "ks_one_sample",
    "ks_two_sample",
    "mad_variance",
    "nonuniform_integrability_report",
    "slow_variation_report",
    "summarize",
]

MAD_CONSISTENCY = 0.6744897501960817
KS_LEVEL = 0.01
MIN_BIN = 50

Cdf = Callable[[np.ndarray], np.ndarray]


def _sample(x) -> np.ndarray:
    a = np.asarray(x, dtype=float).ravel()
    if a.size == 0:
        raise ValueError("sample is empty")
    if not np.all(np.isfinite(a)):
        raise ValueError("sample contains non-finite values")
    return a


def ecdf(sample) -> tuple[np.ndarray, np.ndarray]:
    """Distinct sorted values and the ECDF just after each."""
    a = np.sort(_sample(sample))
    x, idx = np.unique(a, return_index=True)
    counts = np.diff(np.append(idx, a.size))
    return x, np.cumsum(counts) / a.size


def critical_value(n: int, m: int | None = None, level: float = KS_LEVEL) -> float:
    """Asymptotic KS critical distance, one-sample or (with ``m``) two-sample."""
    k = float(special.kolmogi(level))
    eff = n if m is None else n * m / (n + m)
    return k / math.sqrt(eff)


def ks_one_sample(sample, cdf: Cdf) -> float:
    """``sup_x |F_N(x) - F(x)|``, evaluated on both sides of every sample point."""
    a = _sample(sample)
    return float(stats.ks_1samp(a, lambda v: np.asarray(cdf(v), dtype=float), method="asymp").statistic)


def ks_two_sample(a, b, level: float = KS_LEVEL) -> tuple[float, bool]:
    """Two-sample KS distance and whether it rejects at ``level``."""
    a, b = _sample(a), _sample(b)
    d = float(stats.ks_2samp(a, b, method="asymp").statistic)
    return d, bool(d > critical_value(a.size, b.size, level))


def mad_variance(sample) -> float:
    """Squared normal-consistent median absolute deviation."""
    mad = stats.median_abs_deviation(_sample(sample), scale=MAD_CONSISTENCY)
    return float(mad**2)


@dataclass(frozen=True)
class EmpiricalSummary:
    sorted: np.ndarray
    raw_second_moment: float
    mean_abs: float
    mad_variance: float
    ks: dict[str, float] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.sorted.size


def summarize(sample, references: Mapping[str, Cdf] | None = None) -> EmpiricalSummary:
    a = _sample(sample)
    refs = references or {}
    return EmpiricalSummary(
        sorted=np.sort(a),
        raw_second_moment=math.fsum(a * a) / a.size,
        mean_abs=math.fsum(np.abs(a)) / a.size,
        mad_variance=mad_variance(a),
        ks={name: ks_one_sample(a, f) for name, f in refs.items()},
    )


@dataclass(frozen=True)
class IntegrabilityReport:
    raw_second_moment: float
    mad_variance: float
    mean_abs: float


def nonuniform_integrability_report(z) -> IntegrabilityReport:
    """Moment and robust scale of normalized sums ``S_n / sigma_n``.

    A vanishing heavy component keeps the raw second moment near 1 while
    the robust variance tracks the bulk of the distribution.
    """
    s = summarize(z)
    return IntegrabilityReport(s.raw_second_moment, s.mad_variance, s.mean_abs)


@dataclass(frozen=True)
class BinningReport:
    ks: np.ndarray
    sizes: np.ndarray
    edges: np.ndarray  # |W_0| range of each bin, shape (bins, 2)
    undersized: tuple[int, ...]
    critical: float

    @property
    def max_ks(self) -> float:
        return float(self.ks.max())

    @property
    def ok(self) -> bool:
        return not self.undersized


def conditional_binning(z, w0, bins: int, cdf: Cdf, min_per_bin: int = MIN_BIN) -> BinningReport:
    """Per-bin KS of ``z`` against ``cdf`` after sorting replicates by ``|W_0|``.

    Bins are equal-count slices of the ``|W_0|`` ranking (ties broken by
    replicate order), which stays well defined when ``|W_0|`` has atoms.
    """
    z = _sample(z)
    w0 = np.asarray(w0, dtype=float).ravel()
    if w0.size != z.size:
        raise ValueError("z and w0 must have the same length")
    if bins < 1:
        raise ValueError("bins must be >= 1")
    if bins > z.size:
        raise ValueError(f"{bins} bins for {z.size} samples")
    order = np.argsort(np.abs(w0), kind="stable")
    parts = np.array_split(order, bins)
    ks = np.array([ks_one_sample(z[p], cdf) for p in parts])
    sizes = np.array([p.size for p in parts])
    aw = np.abs(w0)
    edges = np.array([[aw[p].min(), aw[p].max()] for p in parts])
    small = tuple(int(i) for i in np.flatnonzero(sizes < min_per_bin))
    return BinningReport(ks, sizes, edges, small, critical_value(int(sizes.min())))


@dataclass(frozen=True)
class SlowVariationRow:
    n: int
    sigma_sq: float
    ell: float
    ell_ratio: float  # ell(2n) / ell(n)
    ratio_2nlogn: float  # sigma_n^2 / (2 n log n); nan at n = 1
    log_model: float  # 1 + log 2 / log n; nan at n = 1


def slow_variation_report(table: VarianceTable, ns: Sequence[int]) -> list[SlowVariationRow]:
    ns = [int(n) for n in ns]
    if any(n < 1 for n in ns):
        raise ValueError("grid points must be >= 1")
    if ns and 2 * max(ns) > table.kmax + 1:
        raise IndexError(f"table holds lags < {table.kmax + 1}; grid needs {2 * max(ns)}")
    rows = []
    for n in ns:
        s = table.sigma_sq(n)
        ell = s / n
        log_n = math.log(n)
        rows.append(
            SlowVariationRow(
                n=n,
                sigma_sq=s,
                ell=ell,
                ell_ratio=float(table.ell(2 * n) / ell),
                ratio_2nlogn=s / (2.0 * n * log_n) if n > 1 else math.nan,
                log_model=1.0 + math.log(2.0) / log_n if n > 1 else math.nan,
            )
        )
    return rows
