import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from revclt.chain_model import build_chain
from revclt.diagnostics import (
    MAD_CONSISTENCY,
    conditional_binning,
    critical_value,
    ecdf,
    ks_one_sample,
    ks_two_sample,
    mad_variance,
    nonuniform_integrability_report,
    slow_variation_report,
    summarize,
)
from revclt.limits import normal_cdf
from revclt.operator_algebra import VarianceTable, sigma_sq
from revclt.simulate import simulate_many

PHI = stats.norm.cdf


def test_ecdf_basic():
    x, F = ecdf([3.0, 1.0, 1.0, 2.0])
    np.testing.assert_array_equal(x, [1.0, 2.0, 3.0])
    np.testing.assert_array_equal(F, [0.5, 0.75, 1.0])


def test_ks_exact_quantiles():
    N = 1000
    q = stats.norm.ppf(np.arange(1, N + 1) / (N + 1))
    assert ks_one_sample(q, PHI) <= 1 / (N + 1) + 1e-12


def test_ks_normal_sample():
    N = 10**4
    z = np.random.default_rng(1).standard_normal(N)
    assert ks_one_sample(z, PHI) < 1.63 / math.sqrt(N)
    assert critical_value(N) == pytest.approx(1.6276 / math.sqrt(N), rel=1e-4)


def test_ks_point_mass():
    assert ks_one_sample(np.zeros(50), PHI) == pytest.approx(0.5, abs=1e-15)


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1))
def test_ks_invariant_under_cube(seed):
    z = np.random.default_rng(seed).standard_normal(500)
    d1 = ks_one_sample(z, PHI)
    d3 = ks_one_sample(z**3, lambda y: PHI(np.cbrt(y)))
    assert d1 == pytest.approx(d3, abs=1e-12)


@settings(max_examples=30)
@given(st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=1, max_size=100))
def test_ks_range(xs):
    assert 0.0 <= ks_one_sample(xs, PHI) <= 1.0


def test_ks_two_sample_examples():
    a = np.random.default_rng(2).standard_normal(10**4)
    b = np.random.default_rng(3).standard_normal(10**4)
    assert ks_two_sample(a, a) == (0.0, False)
    d, rej = ks_two_sample(np.zeros(5), np.ones(7))
    assert d == 1.0 and rej is True
    d, rej = ks_two_sample(a, b)
    assert rej is False


def test_empty_inputs():
    with pytest.raises(ValueError):
        ks_two_sample([], [1.0])
    with pytest.raises(ValueError):
        ks_one_sample([np.nan], PHI)


def test_integrability_normal():
    z = np.random.default_rng(4).standard_normal(10**5)
    r = nonuniform_integrability_report(z)
    assert r.raw_second_moment == pytest.approx(1.0, abs=0.02)
    assert r.mad_variance == pytest.approx(1.0, abs=0.03)
    assert r.mean_abs == pytest.approx(math.sqrt(2 / math.pi), abs=0.01)


def test_integrability_point_mass():
    r = nonuniform_integrability_report(np.zeros(10))
    assert (r.raw_second_moment, r.mad_variance, r.mean_abs) == (0.0, 0.0, 0.0)


def test_mad_consistency():
    assert MAD_CONSISTENCY == pytest.approx(stats.norm.ppf(0.75), rel=1e-15)
    assert mad_variance([-1.0, 0.0, 1.0]) == pytest.approx(1 / MAD_CONSISTENCY**2, rel=1e-15)


def _example1_z(batch):
    return batch.S / math.sqrt(sigma_sq(build_chain("example1"), batch.n))


def test_integrability_example1_mad(ex1_batch_1e5):
    r = nonuniform_integrability_report(_example1_z(ex1_batch_1e5))
    assert 0.4 <= r.mad_variance <= 0.6


@pytest.mark.xfail(strict=True, reason="raw second moment is 0.808 at seed 42; the heavy component is rarely sampled at 4000 reps")
def test_integrability_example1_raw(ex1_batch_1e5):
    r = nonuniform_integrability_report(_example1_z(ex1_batch_1e5))
    assert 0.9 <= r.raw_second_moment <= 1.1


def test_summarize_reproducible():
    z = np.random.default_rng(5).standard_normal(1000)
    a = summarize(z, {"n01": PHI})
    b = summarize(z.copy(), {"n01": PHI})
    assert a.ks == b.ks and a.raw_second_moment == b.raw_second_moment
    assert np.all(np.diff(a.sorted) >= 0) and a.size == 1000


def test_binning_independent_normals():
    rng = np.random.default_rng(6)
    z = rng.standard_normal(4000)
    w0 = 1.0 / rng.random(4000)
    rep = conditional_binning(z, w0, 10, PHI)
    assert rep.ok
    assert np.all(rep.sizes == 400)
    assert rep.max_ks < rep.critical


def test_binning_one_bin():
    z = np.random.default_rng(7).standard_normal(300)
    rep = conditional_binning(z, np.ones(300), 1, PHI)
    assert rep.max_ks == ks_one_sample(z, PHI)


def test_binning_flags_small_bins():
    z = np.random.default_rng(8).standard_normal(300)
    rep = conditional_binning(z, z, 10, PHI)
    assert not rep.ok and len(rep.undersized) == 10
    with pytest.raises(ValueError):
        conditional_binning(z, z[:10], 2, PHI)


def test_binning_example1_trend(ex1_batch_1e5):
    spec = build_chain("example1")
    half = lambda x: normal_cdf(0.0, 0.5, x)
    ks = []
    for n in (10**3, 10**4):
        b = simulate_many(spec, n, 4000, seed=42, mode="regenerative")
        ks.append(conditional_binning(b.S / math.sqrt(sigma_sq(spec, n)), b.W0, 10, half).max_ks)
    ks.append(conditional_binning(_example1_z(ex1_batch_1e5), ex1_batch_1e5.W0, 10, half).max_ks)
    assert all(a > b for a, b in zip(ks, ks[1:]))


def test_slow_variation_constant():
    table = VarianceTable(build_chain("constant", c=0.5), 2001)
    row = slow_variation_report(table, [1000])[0]
    assert abs(row.ell_ratio - 1.0) < 1e-3


def test_slow_variation_example1():
    table = VarianceTable(build_chain("example1"), 2 * 10**5)
    rows = slow_variation_report(table, [1, 10**5])
    assert rows[0].sigma_sq == 1.0 and rows[0].ell == 1.0
    assert math.isnan(rows[0].ratio_2nlogn)
    r = rows[1]
    assert (r.ell_ratio - 1) == pytest.approx(r.log_model - 1, rel=0.2)
    assert isinstance(r.ell_ratio, float)


def test_slow_variation_range_check():
    table = VarianceTable(build_chain("example1"), 100)
    with pytest.raises(IndexError):
        slow_variation_report(table, [60])
