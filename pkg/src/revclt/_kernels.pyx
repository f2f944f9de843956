# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels.  Semantics and stream layout match ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport exp, expm1, floor, log, log1p, pow, fabs
from numpy.random cimport bitgen_t

cnp.import_array()

cdef double ACCEPT_NORM = expm1(-1.0)
cdef double TAU_CAP = <double>(1 << 62)


cdef bitgen_t* _bitgen(object gen) except NULL:
    capsule = gen.bit_generator.capsule
    return <bitgen_t*> PyCapsule_GetPointer(capsule, "BitGenerator")


cdef inline double _u(bitgen_t* rng) noexcept nogil:
    return rng.next_double(rng.state)


cdef inline double _pi_y(int kind, double shape, double u) noexcept nogil:
    if kind == 0:
        return pow(1.0 - u, shape)
    return 1.0


cdef inline double _sign(double u) noexcept nogil:
    return -1.0 if u < 0.5 else 1.0


cdef inline double _nlp(int kind, double y, double nlp_c) noexcept nogil:
    return y if kind == 0 else nlp_c


cdef inline bint _accept(int kind, double y, double u) noexcept nogil:
    if kind == 1:
        return True
    return u < expm1(-y) / ACCEPT_NORM


cdef struct Block:
    double y
    double s
    double d


cdef inline Block _block(bitgen_t* rng, int kind, double shape, double nlp_c) noexcept nogil:
    cdef double um, ua, us, ug, y
    cdef Block b
    while True:
        um = _u(rng)
        ua = _u(rng)
        us = _u(rng)
        ug = _u(rng)
        y = _pi_y(kind, shape, um)
        if _accept(kind, y, ua):
            b.y = y
            b.s = _sign(us)
            b.d = 1.0 + floor(-log1p(-ug) / _nlp(kind, y, nlp_c))
            return b


def neumaier_cumsum(x):
    """Compensated prefix sums ``out[t] = sum(x[:t])``, ``len(out) == len(x) + 1``."""
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0], i
    out_arr = np.empty(n + 1)
    cdef double[::1] out = out_arr
    cdef double s = 0.0, comp = 0.0, t, v
    out[0] = 0.0
    with nogil:
        for i in range(n):
            v = xv[i]
            t = s + v
            if fabs(s) >= fabs(v):
                comp += (s - t) + v
            else:
                comp += (v - t) + s
            s = t
            out[i + 1] = s + comp
    return out_arr


def regen_sum(gen, int kind, double shape, long long n):
    """Regenerative ``S_n``; see ``_kernels_py.regen_sum``."""
    cdef bitgen_t* rng = _bitgen(gen)
    cdef double nlp_c = -log(shape) if kind == 1 else 0.0
    cdef double y0, s0, t0, S = 0.0, T = 0.0, last
    cdef long long t, m_n = 0
    cdef Block b
    with nogil:
        y0 = _pi_y(kind, shape, _u(rng))
        s0 = _sign(_u(rng))
        t0 = floor(-log1p(-_u(rng)) / _nlp(kind, y0, nlp_c))
        if t0 >= n:
            S = n * s0
        else:
            t = <long long> t0
            S = t * s0
            while True:
                b = _block(rng, kind, shape, nlp_c)
                if b.d >= n - t:
                    last = <double>(n - t)
                    S += last * b.s
                    if b.d == last:
                        T += last * b.s
                        m_n += 1
                    break
                t += <long long> b.d
                S += b.d * b.s
                T += b.d * b.s
                m_n += 1
    return S, y0, s0, int(min(t0, TAU_CAP)), m_n, T


def regen_runs(gen, int kind, double shape, long long n):
    """Run-length encoded path ``(y, sign, length)``; run 0 is ``W_0``."""
    cdef bitgen_t* rng = _bitgen(gen)
    cdef double nlp_c = -log(shape) if kind == 1 else 0.0
    cdef double y0, s0, t0
    cdef long long t
    cdef Py_ssize_t cap = 1024, k = 1
    cdef bint done = False
    cdef Block b
    ys_arr = np.empty(cap)
    ss_arr = np.empty(cap)
    ls_arr = np.empty(cap, dtype=np.int64)
    cdef double[::1] ys = ys_arr, ss = ss_arr
    cdef long long[::1] ls = ls_arr
    with nogil:
        y0 = _pi_y(kind, shape, _u(rng))
        s0 = _sign(_u(rng))
        t0 = floor(-log1p(-_u(rng)) / _nlp(kind, y0, nlp_c))
    ys[0] = y0
    ss[0] = s0
    if t0 >= n:
        ls[0] = n
        return ys_arr[:1].copy(), ss_arr[:1].copy(), ls_arr[:1].copy()
    t = <long long> t0
    ls[0] = t
    while not done:
        with nogil:
            while k < cap:
                b = _block(rng, kind, shape, nlp_c)
                ys[k] = b.y
                ss[k] = b.s
                k += 1
                if b.d >= n - t:
                    ls[k - 1] = n - t
                    done = True
                    break
                ls[k - 1] = <long long> b.d
                t += <long long> b.d
        if not done:
            cap *= 2
            ys_arr = np.resize(ys_arr, cap)
            ss_arr = np.resize(ss_arr, cap)
            ls_arr = np.resize(ls_arr, cap)
            ys = ys_arr
            ss = ss_arr
            ls = ls_arr
    return ys_arr[:k].copy(), ss_arr[:k].copy(), ls_arr[:k].copy()


def regen_blocks(gen, int kind, double shape, long long m):
    """``m`` regeneration blocks ``(dtau, y, sign)``."""
    cdef bitgen_t* rng = _bitgen(gen)
    cdef double nlp_c = -log(shape) if kind == 1 else 0.0
    d_arr = np.empty(m)
    y_arr = np.empty(m)
    s_arr = np.empty(m)
    cdef double[::1] d = d_arr, y = y_arr, s = s_arr
    cdef long long i
    cdef Block b
    with nogil:
        for i in range(m):
            b = _block(rng, kind, shape, nlp_c)
            d[i] = b.d
            y[i] = b.y
            s[i] = b.s
    return d_arr, y_arr, s_arr


cdef inline void _jump(bitgen_t* rng, int kind, double shape, double* y, double* s) noexcept nogil:
    cdef double um, ua, us, yy
    while True:
        um = _u(rng)
        ua = _u(rng)
        us = _u(rng)
        yy = _pi_y(kind, shape, um)
        if _accept(kind, yy, ua):
            y[0] = yy
            s[0] = _sign(us)
            return


def step_sum(gen, int kind, double shape, long long n):
    """Stepwise ``S_n``; returns ``(S_n, y0, sign0, tau0)`` with ``tau0`` capped at ``n``."""
    cdef bitgen_t* rng = _bitgen(gen)
    cdef double nlp_c = -log(shape) if kind == 1 else 0.0
    cdef double y, s, y0, s0, p, S = 0.0
    cdef long long k, tau0 = -1
    with nogil:
        y = _pi_y(kind, shape, _u(rng))
        s = _sign(_u(rng))
        y0 = y
        s0 = s
        p = exp(-_nlp(kind, y, nlp_c))
        for k in range(1, n + 1):
            if _u(rng) >= p:
                if tau0 < 0:
                    tau0 = k - 1
                _jump(rng, kind, shape, &y, &s)
                p = exp(-_nlp(kind, y, nlp_c))
            S += s
    if tau0 < 0:
        tau0 = n
    return S, y0, s0, tau0


def step_path(gen, int kind, double shape, long long n):
    """States ``(y, sign)`` at times ``0..n`` of a stepwise path."""
    cdef bitgen_t* rng = _bitgen(gen)
    cdef double nlp_c = -log(shape) if kind == 1 else 0.0
    y_arr = np.empty(n + 1)
    s_arr = np.empty(n + 1)
    cdef double[::1] ys = y_arr, ss = s_arr
    cdef double y, s, p
    cdef long long k
    with nogil:
        y = _pi_y(kind, shape, _u(rng))
        s = _sign(_u(rng))
        ys[0] = y
        ss[0] = s
        p = exp(-_nlp(kind, y, nlp_c))
        for k in range(1, n + 1):
            if _u(rng) >= p:
                _jump(rng, kind, shape, &y, &s)
                p = exp(-_nlp(kind, y, nlp_c))
            ys[k] = y
            ss[k] = s
    return y_arr, s_arr
