"""Independent reference computations used only by the tests.

None of these go through the package's measures, moment caches or
prefix sums.
"""

import math

import numpy as np
from scipy import integrate


def ex1_ck_quad(k: int) -> float:
    """c_k = int p^k g^2 dpi for Example1, integrating in w over [1, inf)."""
    val, _ = integrate.quad(lambda w: math.exp(-k / w) / w**2, 1.0, np.inf, epsabs=1e-14, epsrel=1e-13, limit=500)
    return val


def ex1_ck(k: int) -> float:
    return 1.0 if k == 0 else -math.expm1(-k) / k


def stable_ck_quad(k: int, alpha: float) -> float:
    val, _ = integrate.quad(lambda w: (alpha - 1.0) * math.exp(-k / w) * w**-alpha, 1.0, np.inf, epsabs=1e-14, epsrel=1e-13, limit=500)
    return val


def constant_chain(c: float):
    """Transition matrix, stationary vector and g on the states (-1, +1)."""
    P = c * np.eye(2) + (1.0 - c) * 0.5 * np.ones((2, 2))
    return P, np.array([0.5, 0.5]), np.array([-1.0, 1.0])


def constant_ck(c: float, k: int) -> float:
    P, pi, g = constant_chain(c)
    return float(g @ (pi * (np.linalg.matrix_power(P, k) @ g)))


def constant_sigma_sq(c: float, n: int) -> float:
    """E(S_n^2) by summing the n x n covariance matrix of the 2-state chain."""
    P, pi, g = constant_chain(c)
    total = 0.0
    for i in range(n):
        for j in range(n):
            total += g @ (pi * (np.linalg.matrix_power(P, abs(i - j)) @ g))
    return float(total)


def sigma_sq_double_sum(c, n: int) -> float:
    return math.fsum(c[abs(i - j)] for i in range(n) for j in range(n))


def vnorm_double_sum(c, n: int) -> float:
    """||V_n g||^2 = sum_{j,k<n} <Q^j g, Q^k g> = sum c_{j+k} (Q self-adjoint)."""
    return math.fsum(c[j + k] for j in range(n) for k in range(n))


def riemann_gamma_alpha(alpha: float, points: int = 10**6) -> float:
    """Midpoint rule for int_0^1 y^(alpha-2)(1 - e^-y) dy."""
    y = (np.arange(points) + 0.5) / points
    return float(np.sum(y ** (alpha - 2.0) * -np.expm1(-y)) / points)


def cms_symmetric_stable(alpha: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Chambers-Mallows-Stuck draws with characteristic function exp(-|t|^alpha)."""
    v = rng.uniform(-math.pi / 2, math.pi / 2, size)
    w = rng.exponential(1.0, size)
    return np.sin(alpha * v) / np.cos(v) ** (1 / alpha) * (np.cos(v - alpha * v) / w) ** ((1 - alpha) / alpha)
