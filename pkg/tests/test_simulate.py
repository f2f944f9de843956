import math

import numpy as np
import pytest

from revclt.chain_model import build_chain
from revclt.diagnostics import ks_two_sample
from revclt.operator_algebra import MomentCache, sigma_sq
from revclt.rng import RngStream
from revclt.simulate import (
    regen_blocks,
    sample_nu,
    sample_pi,
    sample_tau0,
    simulate_many,
    simulate_path,
    simulate_Sn,
    simulate_Tm,
)


@pytest.fixture(scope="module")
def ex1():
    return build_chain("example1")


@pytest.fixture(scope="module")
def blocks(ex1):
    return regen_blocks(ex1, 10**6, RngStream(11))


def test_pi_example1_tail(ex1):
    w = sample_pi(ex1, RngStream(1), 10**6)
    assert np.all(np.abs(w) >= 1.0)
    assert abs(np.mean(np.abs(w) > 2) - 0.5) < 0.003


def test_pi_constant_mean():
    w = sample_pi(build_chain("constant", c=0.5), RngStream(2), 10**6)
    assert set(np.unique(w)) == {-1.0, 1.0}
    assert abs(w.mean()) < 0.003


@pytest.mark.parametrize("y", [2.0, 4.0, 8.0])
def test_pi_stable_tail(y):
    N = 10**6
    w = sample_pi(build_chain("stable", alpha=1.5), RngStream(3), N)
    p = y**-0.5
    se = math.sqrt(p * (1 - p) / N)
    assert abs(np.mean(np.abs(w) > y) - p) < 3 * se


def test_pi_scalar_draw(ex1):
    assert isinstance(sample_pi(ex1, RngStream(4)), float)


def test_nu_acceptance_and_theta(ex1):
    s = sample_nu(ex1, RngStream(5), 10**6)
    assert s.w.size == 10**6
    assert abs(s.acceptance_rate - 1 / (math.e * -math.expm1(-1.0))) < 0.01
    inv = 1.0 / -np.expm1(-1.0 / np.abs(s.w))
    assert inv.mean() == pytest.approx(math.e, rel=0.02)


def test_nu_constant_direct():
    s = sample_nu(build_chain("constant", c=0.5), RngStream(6), 1000)
    assert s.proposals == s.accepted == 1000
    assert set(np.unique(s.w)) <= {-1.0, 1.0}


def test_tau0_tiny_p():
    spec = build_chain("constant", c=1e-9)
    t = sample_tau0(spec, 1.0, RngStream(8), 10**5)
    assert np.mean(t == 0) > 0.9999


@pytest.mark.parametrize("n", [10, 100])
def test_tau0_tail_under_pi(ex1, n):
    N = 2 * 10**5
    gen = RngStream(9, n).generator()
    w0 = sample_pi(ex1, gen, N)
    t = sample_tau0(ex1, w0, gen, N)
    p = MomentCache(ex1, n + 1).get("pi_p", n + 1)[n + 1]  # P[tau_0 >= n + 1]
    se = math.sqrt(p * (1 - p) / N)
    assert abs(np.mean(t > n) - p) < 3 * se


def test_tau0_conditional_mean(ex1):
    N = 10**6
    t = sample_tau0(ex1, 2.0, RngStream(10), N)
    p = math.exp(-0.5)
    mean = p / (1 - p)
    se = math.sqrt(p) / (1 - p) / math.sqrt(N)
    assert abs(t.mean() - mean) < 4 * se
    assert t.min() >= 0


@pytest.mark.parametrize("mode", ["stepwise", "regenerative"])
def test_s1_second_moment(ex1, mode):
    b = simulate_many(ex1, 1, 2000, seed=1, mode=mode)
    assert np.mean(b.S**2) == 1.0


def test_modes_agree_in_law(ex1):
    a = simulate_many(ex1, 1000, 10**4, seed=3, mode="stepwise")
    b = simulate_many(ex1, 1000, 10**4, seed=4, mode="regenerative")
    _, rejected = ks_two_sample(a.S, b.S)
    assert not rejected


@pytest.mark.parametrize("mode", ["stepwise", "regenerative"])
def test_path_bound(ex1, mode):
    b = simulate_many(ex1, 500, 500, seed=5, mode=mode)
    assert np.all(np.abs(b.S) <= 500)
    assert np.all(b.tau0 >= 0)


def test_second_moment_moderate_n(ex1):
    n = 10**3
    b = simulate_many(ex1, n, 2 * 10**4, seed=6)
    assert np.mean(b.S**2) / sigma_sq(ex1, n) == pytest.approx(1.0, abs=0.1)


@pytest.mark.xfail(strict=True, reason="heavy-tailed S_n^2: 4000 replicates give 0.808 at seed 42, see criterion 5")
def test_second_moment_1e5(ex1, ex1_batch_1e5):
    assert 0.9 <= np.mean(ex1_batch_1e5.S**2) / sigma_sq(ex1, 10**5) <= 1.1


def test_block_count_lln(ex1_batch_1e5):
    assert np.mean(ex1_batch_1e5.m_n / 10**5) == pytest.approx(math.exp(-1.0), rel=0.02)


def test_lemma2_percentile_bounded(ex1):
    q = [np.percentile(np.abs(b.S - b.T), 99) for b in (simulate_many(ex1, n, 1000, seed=7, mode="regenerative") for n in (10**3, 10**4, 10**5))]
    assert max(q) < 2.0 * min(q)


def test_block_means(blocks):
    assert np.all(blocks.delta_tau >= 1)
    assert np.all(np.abs(blocks.w) >= 1)
    assert blocks.delta_tau.mean() == pytest.approx(math.e, rel=0.01)
    y = blocks.y
    assert abs(y.mean()) < 3 * y.std() / math.sqrt(y.size)


def test_block_tail(blocks):
    assert 900 * np.mean(np.abs(blocks.y) >= 30) == pytest.approx(math.e, rel=0.15)


def test_block_conditional_geometric(ex1):
    # given |w| in a thin shell, delta_tau is geometric with success 1 - p(w)
    b = regen_blocks(ex1, 10**6, RngStream(12))
    sel = (np.abs(b.w) > 2.0) & (np.abs(b.w) < 2.05)
    p = math.exp(-1 / 2.025)
    assert b.delta_tau[sel].mean() == pytest.approx(1 / (1 - p), rel=0.03)


def test_tm_matches_blocks(ex1):
    assert simulate_Tm(ex1, 1000, RngStream(13)) == math.fsum(regen_blocks(ex1, 1000, RngStream(13)).y)


def test_regenerative_path_runs(ex1):
    w, ln = simulate_path(ex1, 5000, RngStream(14))
    assert ln.sum() == 5000
    assert np.all(ln[1:] >= 1)
    r = simulate_Sn(ex1, 5000, "regenerative", RngStream(14))
    assert r.W_0 == w[0]
    assert math.fsum(np.sign(w) * ln) == r.S_n


def test_stepwise_path(ex1):
    states = simulate_path(ex1, 300, RngStream(15), mode="stepwise")
    assert states.size == 301
    r = simulate_Sn(ex1, 300, "stepwise", RngStream(15))
    assert r.W_0 == states[0]
    assert np.sum(np.sign(states[1:])) == r.S_n


def test_determinism_across_threads(ex1, monkeypatch):
    monkeypatch.setenv("REVCLT_THREADS", "4")
    a = simulate_many(ex1, 2000, 64, seed=99, threads=1)
    b = simulate_many(ex1, 2000, 64, seed=99, threads=4)
    c = simulate_many(ex1, 2000, 64, seed=99, threads=4)
    for x, y in ((a, b), (b, c)):
        assert np.array_equal(x.S, y.S)
        assert np.array_equal(x.W0, y.W0)
        assert np.array_equal(x.tau0, y.tau0)


def test_replicate_streams_are_stable(ex1):
    whole = simulate_many(ex1, 100, 10, seed=3)
    tail = simulate_many(ex1, 100, 4, seed=3, first_stream=6)
    assert np.array_equal(whole.S[6:], tail.S)


def test_horizon_guards(ex1):
    with pytest.raises(ValueError):
        simulate_Sn(ex1, 0)
    with pytest.raises(OverflowError):
        simulate_Sn(ex1, 2**53 + 1)
    with pytest.raises(ValueError):
        simulate_Sn(ex1, 10, "nope")
