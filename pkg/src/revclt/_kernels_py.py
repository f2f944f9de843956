"""Pure-Python kernels; reference semantics for the compiled ones.

Both backends read uniforms from the same numpy ``Generator`` in the same
order, so for a given stream they return the same results (up to the last
ulp of ``exp``/``log1p``, which only matters when a draw lands exactly on
a floor boundary).

Stream layout
-------------
Chain kinds: ``0`` has ``y = 1/|w|`` with ``p = exp(-y)``, ``W ~ pi`` drawn
as ``y = (1 - U)**shape`` and ``nu`` obtained by rejection from ``pi`` with
acceptance ``(1 - e^-y) / (1 - e^-1)``.  ``1`` is the two-point chain with
``p = shape`` and ``nu = pi`` uniform on ``{-1, 1}``.

* regenerative: ``(mag, sign, tau0)`` for the initial state, then attempts
  of four uniforms ``(mag, accept, sign, holding)``; rejected attempts
  discard all four.
* stepwise: ``(mag, sign)`` for the initial state, then per step one
  ``stay`` uniform and, on a jump, attempts of three ``(mag, accept, sign)``.
"""

from __future__ import annotations

import math

import numpy as np

_ACCEPT_NORM = math.expm1(-1.0)


def neumaier_cumsum(x):
    """Compensated prefix sums ``out[t] = sum(x[:t])``, ``len(out) == len(x) + 1``."""
    x = np.ascontiguousarray(x, dtype=float)
    out = np.empty(x.size + 1)
    out[0] = 0.0
    s = 0.0
    comp = 0.0
    for i, v in enumerate(x.tolist()):
        t = s + v
        if abs(s) >= abs(v):
            comp += (s - t) + v
        else:
            comp += (v - t) + s
        s = t
        out[i + 1] = s + comp
    return out


def _nlp_const(kind, shape):
    return -math.log(shape) if kind == 1 else 0.0


def _pi_state(kind, shape, u_mag, u_sign):
    y = (1.0 - u_mag) ** shape if kind == 0 else 1.0
    return y, (-1.0 if u_sign < 0.5 else 1.0)


def _holding(e, nlp):
    return math.floor(e / nlp)


def _attempts(gen, kind, shape, k):
    """Draw ``k`` four-uniform attempts; return accepted (y, sign, dtau) arrays."""
    # scalar libm calls, not numpy ufuncs: numpy's power and SIMD exp/log
    # can round differently from libm, which would break bit-equality
    u = gen.random(4 * k).reshape(k, 4)
    s = np.where(u[:, 2] < 0.5, -1.0, 1.0)
    if kind == 0:
        y = np.array([math.pow(1.0 - v, shape) for v in u[:, 0].tolist()])
        thr = np.array([math.expm1(-v) / _ACCEPT_NORM for v in y.tolist()])
        acc = u[:, 1] < thr
        y, s, ug = y[acc], s[acc], u[acc, 3]
        nlp = y.tolist()
    else:
        y = np.ones(k)
        ug = u[:, 3]
        nlp = [-math.log(shape)] * k
    dtau = np.array([1.0 + math.floor(-math.log1p(-g) / c) for g, c in zip(ug.tolist(), nlp)])
    return y, s, dtau


def _chunk(remaining, kind, shape):
    # expected attempts per unit of time is below 1, so this overshoots a little
    return int(min(max(64, remaining // 2 + 16), 1 << 18))


def regen_sum(gen, kind, shape, n):
    """Regenerative ``S_n`` for one replicate.

    Returns ``(S_n, y0, sign0, tau0, m_n, T_mn)``: the initial state, its
    holding time ``tau0`` (capped at ``2**62``), the number of blocks that
    end by time ``n`` and their sum.
    """
    y0, s0, t0, runs = _regen(gen, kind, shape, n, keep=False)
    S, m_n, T = runs
    return S, y0, s0, t0, m_n, T


def regen_runs(gen, kind, shape, n):
    """Run-length encoded path ``(y, sign, length)``; run 0 is ``W_0`` held ``min(tau0, n)`` steps."""
    y0, s0, t0, runs = _regen(gen, kind, shape, n, keep=True)
    ys, ss, ls = runs
    return np.array(ys), np.array(ss), np.array(ls, dtype=np.int64)


def _regen(gen, kind, shape, n, keep):
    u = gen.random(3)
    y0, s0 = _pi_state(kind, shape, u[0], u[1])
    nlp0 = y0 if kind == 0 else _nlp_const(kind, shape)
    t0 = _holding(-math.log1p(-u[2]), nlp0)
    tau0 = min(t0, float(1 << 62))
    if keep:
        ys, ss, ls = [y0], [s0], [int(min(t0, n))]
    if t0 >= n:
        if keep:
            return y0, s0, int(tau0), (ys, ss, ls)
        return y0, s0, int(tau0), (n * s0, 0, 0.0)
    t = int(t0)
    S = t * s0
    m_n = 0
    T = 0.0
    while True:
        y, s, d = _attempts(gen, kind, shape, _chunk(n - t, kind, shape))
        if d.size == 0:
            continue
        cum = np.cumsum(d)
        hit = np.flatnonzero(cum >= n - t)
        if hit.size == 0:
            if keep:
                ys.extend(y.tolist())
                ss.extend(s.tolist())
                ls.extend(d.astype(np.int64).tolist())
            block = float(np.dot(d, s))
            S += block
            T += block
            m_n += d.size
            t += int(cum[-1])
            continue
        i = int(hit[0])
        full = float(np.dot(d[:i], s[:i]))
        before = int(cum[i - 1]) if i else 0
        last = n - t - before
        S += full + last * s[i]
        T += full
        m_n += i
        if d[i] == last:
            T += last * s[i]
            m_n += 1
        if keep:
            ys.extend(y[: i + 1].tolist())
            ss.extend(s[: i + 1].tolist())
            ls.extend(d[:i].astype(np.int64).tolist())
            ls.append(int(last))
            return y0, s0, int(tau0), (ys, ss, ls)
        return y0, s0, int(tau0), (S, m_n, T)


def regen_blocks(gen, kind, shape, m):
    """``m`` regeneration blocks ``(dtau, y, sign)`` with ``y`` drawn from ``nu``."""
    ys, ss, ds = [], [], []
    have = 0
    while have < m:
        y, s, d = _attempts(gen, kind, shape, max(64, int(1.8 * (m - have)) + 16))
        take = min(m - have, d.size)
        ys.append(y[:take])
        ss.append(s[:take])
        ds.append(d[:take])
        have += take
    return np.concatenate(ds), np.concatenate(ys), np.concatenate(ss)


class _Uniforms:
    def __init__(self, gen, chunk=4096):
        self.gen = gen
        self.chunk = chunk
        self.buf = []
        self.i = 0

    def __call__(self):
        if self.i == len(self.buf):
            self.buf = self.gen.random(self.chunk).tolist()
            self.i = 0
        v = self.buf[self.i]
        self.i += 1
        return v


def _step_states(gen, kind, shape, n, keep):
    draw = _Uniforms(gen)
    nlp_c = _nlp_const(kind, shape)
    y, s = _pi_state(kind, shape, draw(), draw())
    y0, s0 = y, s
    p = math.exp(-(y if kind == 0 else nlp_c))
    S = 0.0
    tau0 = -1
    if keep:
        ys, ss = [y], [s]
    for k in range(1, n + 1):
        if draw() >= p:
            if tau0 < 0:
                tau0 = k - 1
            while True:
                um, ua, us = draw(), draw(), draw()
                yy, ss_ = _pi_state(kind, shape, um, us)
                if kind == 1 or ua < math.expm1(-yy) / _ACCEPT_NORM:
                    break
            y, s = yy, ss_
            p = math.exp(-(y if kind == 0 else nlp_c))
        S += s
        if keep:
            ys.append(y)
            ss.append(s)
    if tau0 < 0:
        tau0 = n
    if keep:
        return np.array(ys), np.array(ss)
    return S, y0, s0, tau0


def step_sum(gen, kind, shape, n):
    """Stepwise ``S_n``; returns ``(S_n, y0, sign0, tau0)`` with ``tau0`` capped at ``n``."""
    return _step_states(gen, kind, shape, n, keep=False)


def step_path(gen, kind, shape, n):
    """States ``(y, sign)`` at times ``0..n`` of a stepwise path."""
    return _step_states(gen, kind, shape, n, keep=True)
