"""Seeded path simulation: stepwise transitions and regeneration blocks.

The jump-or-stay chain holds each state for a geometric time and then jumps
to a fresh ``nu`` draw, so a path is a sequence of blocks
``(dtau_j, W_{tau_j})``.  Regenerative simulation draws the blocks directly;
stepwise simulation flips one coin per time step and is kept as an
independent check.

The samplers here cover the built-in chains.  Their observables satisfy
``g(w) = sign(w)``, which is what the compiled kernels sum.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .chain_model import ChainError, ChainSpec
from .rng import RngStream

__all__ = [
    "MIN_ACCEPTANCE",
    "N_LIMIT",
    "NuSample",
    "PathResult",
    "RegenBlocks",
    "SamplingError",
    "SimulationBatch",
    "default_mode",
    "regen_blocks",
    "sample_nu",
    "sample_pi",
    "sample_tau0",
    "simulate_Sn",
    "simulate_Tm",
    "simulate_many",
    "simulate_path",
    "thread_count",
]

log = logging.getLogger(__name__)

MIN_ACCEPTANCE = 1e-3
N_LIMIT = 2**53
REGEN_THRESHOLD = 10**4
MODES = ("stepwise", "regenerative")


class SamplingError(RuntimeError):
    """A sampler cannot proceed (e.g. rejection acceptance collapsed)."""


def _kernel(spec: ChainSpec) -> tuple[int, float]:
    if spec.kernel is None:
        raise ChainError(f"{spec!r} has no simulation kernel")
    return spec.kernel


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError("rng must be an RngStream or numpy Generator")


def _states(kind: int, y: np.ndarray, sign: np.ndarray) -> np.ndarray:
    return sign / y if kind == 0 else sign.astype(float)


def sample_pi(spec: ChainSpec, rng, size: int | None = None):
    """Draws from the stationary law ``pi``."""
    kind, shape = _kernel(spec)
    gen = _as_generator(rng)
    u = gen.random((2, 1 if size is None else size))
    y = (1.0 - u[0]) ** shape if kind == 0 else np.ones(u.shape[1])
    w = _states(kind, y, np.where(u[1] < 0.5, -1.0, 1.0))
    return float(w[0]) if size is None else w


@dataclass(frozen=True)
class NuSample:
    w: np.ndarray
    proposals: int
    accepted: int

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.proposals if self.proposals else 1.0


def sample_nu(spec: ChainSpec, rng, size: int = 1, max_proposals: int | None = None) -> NuSample:
    """Draws from the jump law ``nu``.

    Continuous chains propose from ``pi`` and accept with probability
    ``(1 - p(w)) / (1 - e^-1)``, exact because ``dnu/dpi = theta (1 - p)``
    is bounded and ``1 - p`` peaks at ``|w| = 1``.
    """
    kind, shape = _kernel(spec)
    gen = _as_generator(rng)
    if kind == 1:
        u = gen.random(size)
        return NuSample(np.where(u < 0.5, -1.0, 1.0), size, size)
    norm = -math.expm1(-1.0)
    out: list[np.ndarray] = []
    have = 0
    proposals = 0
    max_proposals = max_proposals or max(1000, int(size / MIN_ACCEPTANCE))
    while have < size:
        k = max(64, int(1.8 * (size - have)) + 16)
        u = gen.random((3, k))
        y = (1.0 - u[0]) ** shape
        acc = u[1] < -np.expm1(-y) / norm
        proposals += k
        got = _states(kind, y[acc], np.where(u[2][acc] < 0.5, -1.0, 1.0))
        out.append(got)
        have += got.size
        if proposals >= 1000 and have / proposals < MIN_ACCEPTANCE:
            raise SamplingError(f"nu rejection acceptance {have / proposals:.2e} below {MIN_ACCEPTANCE:g} for {spec!r}")
        if proposals > max_proposals and have < size:
            raise SamplingError(f"nu rejection needed more than {max_proposals} proposals")
    w = np.concatenate(out)
    # surplus accepted draws are dropped but still count toward the rate
    sample = NuSample(w[:size], proposals, have)
    log.debug("nu sampler: %d draws, acceptance %.4f", size, have / proposals)
    return sample


def sample_tau0(spec: ChainSpec, w0, rng, size: int | None = None):
    """Holding time of the initial state: ``P[tau_0 >= k] = p(w0)^k`` on ``{0, 1, ...}``."""
    gen = _as_generator(rng)
    nlp = np.asarray(spec.neg_log_p(np.asarray(w0, dtype=float)), dtype=float)
    u = gen.random(1 if size is None else size)
    with np.errstate(divide="ignore"):
        t = np.floor(-np.log1p(-u) / nlp)
    t = np.minimum(t, float(N_LIMIT))
    return int(t[0]) if size is None else t.astype(np.int64)


@dataclass(frozen=True)
class PathResult:
    S_n: float
    W_0: float
    tau_0: int
    n: int
    mode: str
    # regenerative mode only: blocks completed by time n and their sum
    m_n: int | None = None
    T_mn: float | None = None


def default_mode(n: int) -> str:
    return "regenerative" if n >= REGEN_THRESHOLD else "stepwise"


def _check_horizon(n: int) -> None:
    if n < 1:
        raise ValueError(f"horizon must be >= 1, got {n}")
    if n > N_LIMIT:
        raise OverflowError(f"horizon {n} exceeds 2**53")


def _one(spec: ChainSpec, n: int, mode: str, gen: np.random.Generator, kmod) -> PathResult:
    kind, shape = _kernel(spec)
    if mode == "regenerative":
        S, y0, s0, t0, m_n, T = kmod.regen_sum(gen, kind, shape, n)
        return PathResult(float(S), float(_states(kind, np.array([y0]), np.array([s0]))[0]), int(t0), n, mode, int(m_n), float(T))
    if mode == "stepwise":
        S, y0, s0, t0 = kmod.step_sum(gen, kind, shape, n)
        return PathResult(float(S), float(_states(kind, np.array([y0]), np.array([s0]))[0]), int(t0), n, mode)
    raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def simulate_Sn(spec: ChainSpec, n: int, mode: str | None = None, rng=None, backend: str | None = None) -> PathResult:
    """One stationary replicate of ``S_n = g(W_1) + ... + g(W_n)``.

    In regenerative mode the final block is clipped at ``n``:
    ``S_n = min(n, tau_0) g(W_0) + sum_j (min(n, tau_j) - min(n, tau_{j-1})) g(W_{tau_j})``.
    """
    _check_horizon(n)
    mode = mode or default_mode(n)
    gen = _as_generator(rng if rng is not None else RngStream(0))
    return _one(spec, n, mode, gen, kernels.get_backend(backend))


def simulate_path(spec: ChainSpec, n: int, rng, mode: str = "regenerative", backend: str | None = None):
    """Path as runs ``(w, length)`` with ``sum(length) == n``.

    ``W_0 = w[0]`` and the states at times ``1..n`` are ``repeat(w, length)``;
    run 0 has length ``min(tau_0, n)`` and may be empty.  Stepwise mode
    returns the state array for times ``0..n`` instead.
    """
    _check_horizon(n)
    kind, shape = _kernel(spec)
    kmod = kernels.get_backend(backend)
    gen = _as_generator(rng)
    if mode == "regenerative":
        y, s, ln = kmod.regen_runs(gen, kind, shape, n)
        return _states(kind, y, s), ln
    if mode == "stepwise":
        y, s = kmod.step_path(gen, kind, shape, n)
        return _states(kind, y, s)
    raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


@dataclass(frozen=True)
class RegenBlocks:
    delta_tau: np.ndarray
    w: np.ndarray

    @property
    def y(self) -> np.ndarray:
        """Block sums ``Y_j = delta_tau_j g(W_{tau_j})`` for ``g = sign``."""
        return self.delta_tau * np.sign(self.w)


def regen_blocks(spec: ChainSpec, m: int, rng, backend: str | None = None) -> RegenBlocks:
    """``m`` i.i.d. blocks: ``w ~ nu`` and ``delta_tau | w`` geometric on ``{1, 2, ...}``."""
    if m < 1:
        raise ValueError("m must be >= 1")
    kind, shape = _kernel(spec)
    d, y, s = kernels.get_backend(backend).regen_blocks(_as_generator(rng), kind, shape, m)
    return RegenBlocks(d, _states(kind, y, s))


def simulate_Tm(spec: ChainSpec, m: int, rng, backend: str | None = None) -> float:
    """``T_m = Y_1 + ... + Y_m``."""
    return math.fsum(regen_blocks(spec, m, rng, backend).y)


def thread_count(requested: int | None = None) -> int:
    env = os.environ.get("REVCLT_THREADS")
    cap = int(env) if env else (os.cpu_count() or 1)
    n = requested if requested is not None else cap
    return max(1, min(n, cap))


@dataclass(frozen=True)
class SimulationBatch:
    n: int
    mode: str
    seed: int
    S: np.ndarray
    W0: np.ndarray
    tau0: np.ndarray
    m_n: np.ndarray | None
    T: np.ndarray | None

    @property
    def reps(self) -> int:
        return self.S.size


def simulate_many(
    spec: ChainSpec,
    n: int,
    reps: int,
    seed: int,
    mode: str | None = None,
    threads: int | None = None,
    backend: str | None = None,
    purpose: str = "path",
    first_stream: int = 0,
) -> SimulationBatch:
    """``reps`` independent replicates; replicate ``i`` uses stream ``first_stream + i``.

    Results do not depend on the thread count.
    """
    _check_horizon(n)
    if reps < 1:
        raise ValueError("reps must be >= 1")
    mode = mode or default_mode(n)
    kmod = kernels.get_backend(backend)
    base = RngStream(seed, 0, purpose)

    def run(i: int) -> PathResult:
        return _one(spec, n, mode, base.replicate(first_stream + i).generator(), kmod)

    workers = thread_count(threads)
    if workers == 1:
        results = [run(i) for i in range(reps)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(reps)))
    regen = mode == "regenerative"
    return SimulationBatch(
        n=n,
        mode=mode,
        seed=seed,
        S=np.array([r.S_n for r in results]),
        W0=np.array([r.W_0 for r in results]),
        tau0=np.array([r.tau_0 for r in results], dtype=np.int64),
        m_n=np.array([r.m_n for r in results], dtype=np.int64) if regen else None,
        T=np.array([r.T_mn for r in results]) if regen else None,
    )
