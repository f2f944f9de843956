"""Reversible jump-or-stay chains and their built-in instances.

A chain of this family stays put with probability ``p(w)`` and otherwise
jumps to a fresh draw from ``nu``::

    Q(w; B) = p(w) 1_B(w) + (1 - p(w)) nu(B)

Its stationary law is ``pi = nu / (theta (1 - p))`` with
``theta = int dnu / (1 - p)``, and the kernel is reversible with respect to
``pi``.

Continuous state spaces live on ``|w| >= 1`` and every measure there is
sign-symmetric, so measures are described by the density of ``y = 1/|w|``
on ``(0, 1]``.  Integrands such as ``exp(-k/|w|) / w**2`` become smooth in
``y``, which is what the quadrature sees.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .quadrature import QuadratureError, integrate_interval

__all__ = [
    "ChainError",
    "ChainSpec",
    "ClosedFormMoments",
    "DiscreteMeasure",
    "ReversibilityReport",
    "StationarityReport",
    "Symmetry",
    "TailMeasure",
    "VARIANTS",
    "broken_copy",
    "default_test_functions",
    "build_chain",
    "chain_from_json",
    "gamma_alpha",
    "stationarity_check",
    "validate_reversibility",
    "validate_spec",
]

VARIANTS = ("example1", "stable", "constant")
VALIDATION_TOL = 1e-10
# QAWS samples the left endpoint; y = 0 is the point at infinity in w
_Y_FLOOR = 1e-300


class ChainError(ValueError):
    """Invalid chain parameters or a (p, nu) pair that fails validation."""


Interval = tuple[float, float]


@dataclass(frozen=True)
class TailMeasure:
    """Sign-symmetric measure on ``|w| >= 1``.

    The mass of ``y = 1/|w|`` has density ``y**power * weight(y)`` on
    ``(0, 1]``; each sign carries half of it.  A nonzero ``power`` is
    integrated exactly as an algebraic endpoint weight.
    """

    weight: Callable
    power: float = 0.0

    discrete = False

    def density(self, w):
        """Lebesgue density in ``w`` (zero on ``|w| < 1``)."""
        w = np.asarray(w, dtype=float)
        aw = np.abs(w)
        with np.errstate(divide="ignore", invalid="ignore"):
            y = 1.0 / aw
            out = 0.5 * y**self.power * self.weight(y) * y**2
        return np.where(aw >= 1.0, out, 0.0)

    def _y_ranges(self, support: Interval | None):
        if support is None:
            return [(1.0, 0.0, 1.0), (-1.0, 0.0, 1.0)]
        lo, hi = support
        out = []
        # positive half-line
        a, b = max(lo, 1.0), hi
        if a <= b:
            out.append((1.0, 1.0 / b if np.isfinite(b) else 0.0, 1.0 / a))
        # negative half-line, in |w|
        a, b = max(-hi, 1.0), -lo
        if a <= b:
            out.append((-1.0, 1.0 / b if np.isfinite(b) else 0.0, 1.0 / a))
        return out

    def integrate(self, f: Callable, points: Sequence[float] = (), support: Interval | None = None) -> float:
        """Integrate ``f(w)`` against the measure, optionally restricted to ``support``.

        ``points`` are breakpoints in ``y``.
        """
        if support is None:
            # fold both signs into one pass
            def fy(y):
                y = max(y, _Y_FLOOR)
                return 0.5 * (f(1.0 / y) + f(-1.0 / y)) * self.weight(y)

            return integrate_interval(fy, 0.0, 1.0, points=points, left_power=self.power)
        total = 0.0
        for sign, ylo, yhi in self._y_ranges(support):
            total += self.integrate_y(lambda y, s=sign: 0.5 * f(s / max(y, _Y_FLOOR)), ylo, yhi, points=points)
        return total

    def integrate_y(self, fy: Callable, lo: float = 0.0, hi: float = 1.0, points: Sequence[float] = ()) -> float:
        """Integrate ``fy(y) * y**power * weight(y)`` over ``[lo, hi]``."""
        if lo <= 0.0:
            return integrate_interval(lambda y: fy(y) * self.weight(y), 0.0, hi, points=points, left_power=self.power)
        return integrate_interval(lambda y: fy(y) * self.weight(y) * y**self.power, lo, hi, points=points)

    def mass(self, support: Interval | None = None) -> float:
        return self.integrate(lambda w: 1.0, support=support)


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finitely many atoms with nonnegative weights."""

    atoms: tuple[float, ...]
    weights: tuple[float, ...]

    discrete = True

    def integrate(self, f: Callable, points: Sequence[float] = (), support: Interval | None = None) -> float:
        total = 0.0
        for a, wt in zip(self.atoms, self.weights):
            if support is not None and not (support[0] <= a <= support[1]):
                continue
            total += wt * float(f(a))
        return total

    def mass(self, support: Interval | None = None) -> float:
        return self.integrate(lambda w: 1.0, support=support)


@dataclass(frozen=True)
class Symmetry:
    p_symmetric: bool
    nu_symmetric: bool
    g_odd: bool

    @property
    def odd_setting(self) -> bool:
        """True when ``Q^k g = p^k g`` for every ``k``."""
        return self.p_symmetric and self.nu_symmetric and self.g_odd


@dataclass(frozen=True)
class ClosedFormMoments:
    """Exact ``int p^k dpi`` and ``int p^k dnu`` for a built-in chain.

    All built-ins have ``g**2 == 1`` and odd ``g``, so these two sequences
    determine every moment the operator algebra needs.
    """

    pi_p: Callable[[np.ndarray], np.ndarray]
    nu_p: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ChainSpec:
    """One reversible chain of the jump-or-stay family together with ``g``.

    Immutable; safe to share between threads.
    """

    variant: str
    params: tuple[tuple[str, float], ...]
    p: Callable
    neg_log_p: Callable
    g: Callable
    nu: TailMeasure | DiscreteMeasure
    pi: TailMeasure | DiscreteMeasure
    theta: float
    symmetry: Symmetry
    g_sup: float = 1.0
    # (kind, shape) understood by the simulation kernels; None if unsupported
    kernel: tuple[int, float] | None = None
    moments: ClosedFormMoments | None = field(default=None, compare=False)

    @property
    def param_dict(self) -> dict:
        return dict(self.params)

    @property
    def discrete(self) -> bool:
        return self.pi.discrete

    @property
    def checksum(self) -> str:
        blob = self.variant + "|" + json.dumps(self.param_dict, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def pi_density(self, w):
        return self.pi.density(w)

    def nu_density(self, w):
        return self.nu.density(w)

    def one_minus_p(self, w):
        return -np.expm1(-self.neg_log_p(w))

    def Q(self, f: Callable) -> Callable:
        """The function ``Qf(w) = p(w) f(w) + (1 - p(w)) int f dnu``."""
        nu_f = self.nu.integrate(f, points=(0.1, 0.5))

        def qf(w):
            pw = self.p(w)
            return pw * f(w) + (1.0 - pw) * nu_f

        return qf

    def to_json(self) -> dict:
        return {
            "variant": self.variant,
            "params": self.param_dict,
            "theta": self.theta,
            "checksum": self.checksum,
        }

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v}" for k, v in self.params)
        return f"ChainSpec({self.variant}{', ' if args else ''}{args}, theta={self.theta:.10g})"


def _exp_integral(k):
    """``int_0^1 exp(-k y) dy`` for an array of ``k >= 0``."""
    k = np.asarray(k, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -np.expm1(-k) / k
    return np.where(k == 0, 1.0, out)


def _example1_nu_moment(k):
    # e * int_0^1 exp(-k y)(1 - exp(-y)) dy, written without cancellation
    k = np.asarray(k, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        num = 1.0 - np.exp(-k) * (k + 1.0 - k * math.exp(-1.0))
        out = math.e * num / (k * (k + 1.0))
    return np.where(k == 0, 1.0, out)


def _power_exp_integral(k, s):
    """``int_0^1 exp(-k y) y**(s - 1) dy`` for ``s > 0``."""
    k = np.asarray(k, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = special.gamma(s) * special.gammainc(s, k) * k ** (-s)
    return np.where(k == 0, 1.0 / s, out)


def gamma_alpha(alpha: float) -> float:
    """``int_0^1 y**(alpha - 2) (1 - exp(-y)) dy`` by adaptive quadrature."""
    return integrate_interval(lambda y: -math.expm1(-y), 0.0, 1.0, left_power=alpha - 2.0)


def _sign(w):
    return np.sign(w)


def _example1() -> ChainSpec:
    e = math.e
    return ChainSpec(
        variant="example1",
        params=(),
        p=lambda w: np.exp(-1.0 / np.abs(w)),
        neg_log_p=lambda w: 1.0 / np.abs(w),
        g=_sign,
        nu=TailMeasure(weight=lambda y: -e * np.expm1(-y)),
        pi=TailMeasure(weight=lambda y: np.ones_like(y) if isinstance(y, np.ndarray) else 1.0),
        theta=e,
        symmetry=Symmetry(True, True, True),
        kernel=(0, 1.0),
        moments=ClosedFormMoments(pi_p=_exp_integral, nu_p=_example1_nu_moment),
    )


def _stable(alpha: float) -> ChainSpec:
    if not (1.0 < alpha < 2.0):
        raise ChainError(f"alpha must lie in (1, 2), got {alpha}")
    ga = gamma_alpha(alpha)
    s = alpha - 1.0
    return ChainSpec(
        variant="stable",
        params=(("alpha", float(alpha)),),
        p=lambda w: np.exp(-1.0 / np.abs(w)),
        neg_log_p=lambda w: 1.0 / np.abs(w),
        g=_sign,
        nu=TailMeasure(weight=lambda y: -np.expm1(-y) / ga, power=alpha - 2.0),
        pi=TailMeasure(weight=lambda y: s * np.ones_like(y) if isinstance(y, np.ndarray) else s, power=alpha - 2.0),
        theta=1.0 / (s * ga),
        symmetry=Symmetry(True, True, True),
        kernel=(0, 1.0 / s),
        moments=ClosedFormMoments(
            pi_p=lambda k: s * _power_exp_integral(k, s),
            nu_p=lambda k: (_power_exp_integral(k, s) - _power_exp_integral(np.asarray(k) + 1.0, s)) / ga,
        ),
    )


def _constant(c: float) -> ChainSpec:
    if not (0.0 < c < 1.0):
        raise ChainError(f"c must lie in (0, 1), got {c}")
    half = (0.5, 0.5)
    return ChainSpec(
        variant="constant",
        params=(("c", float(c)),),
        p=lambda w: c * np.ones_like(np.asarray(w, dtype=float)),
        neg_log_p=lambda w: -math.log(c) * np.ones_like(np.asarray(w, dtype=float)),
        g=lambda w: np.asarray(w, dtype=float),
        nu=DiscreteMeasure(atoms=(-1.0, 1.0), weights=half),
        pi=DiscreteMeasure(atoms=(-1.0, 1.0), weights=half),
        theta=1.0 / (1.0 - c),
        symmetry=Symmetry(True, True, True),
        kernel=(1, float(c)),
        moments=ClosedFormMoments(
            pi_p=lambda k: c ** np.asarray(k, dtype=float),
            nu_p=lambda k: c ** np.asarray(k, dtype=float),
        ),
    )


def build_chain(variant: str, *, alpha: float | None = None, c: float | None = None, validate: bool = True) -> ChainSpec:
    """Instantiate and validate a built-in chain.

    Parameters
    ----------
    variant : {"example1", "stable", "constant"}
        ``example1``: ``p(w) = exp(-1/|w|)``, ``pi(dw) = dw / (2 w**2)``.
        ``stable``: same ``p`` with ``pi(dw) = (alpha - 1) / (2 |w|**alpha) dw``.
        ``constant``: ``p = c`` on the two-point space ``{-1, 1}``.
    alpha : float, optional
        Tail exponent in ``(1, 2)`` for ``stable``.
    c : float, optional
        Holding probability in ``(0, 1)`` for ``constant``.

    Raises
    ------
    ChainError
        Out-of-range parameters, or a pair that fails validation.
    """
    key = variant.lower().replace("_", "")
    if key in ("example1", "ex1"):
        spec = _example1()
    elif key in ("stable", "example2", "stableexample"):
        if alpha is None:
            raise ChainError("stable chain needs alpha")
        spec = _stable(float(alpha))
    elif key in ("constant", "constantp"):
        if c is None:
            raise ChainError("constant chain needs c")
        spec = _constant(float(c))
    else:
        raise ChainError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    if validate:
        validate_spec(spec)
    return spec


def chain_from_json(doc: dict) -> ChainSpec:
    spec = build_chain(doc["variant"], **doc.get("params", {}))
    if "checksum" in doc and doc["checksum"] != spec.checksum:
        raise ChainError(f"checksum mismatch: document {doc['checksum']}, rebuilt {spec.checksum}")
    return spec


def validate_spec(spec: ChainSpec, tol: float = VALIDATION_TOL) -> None:
    """Check normalization, theta, centering of ``g`` and oddness closure.

    Raises
    ------
    ChainError
        If any invariant fails; quadrature failures are re-raised as such.
    """
    try:
        nu_mass = spec.nu.mass()
        if abs(nu_mass - 1.0) > tol:
            raise ChainError(f"nu has mass {nu_mass!r}, expected 1")
        theta = spec.nu.integrate(lambda w: 1.0 / spec.one_minus_p(w))
        if not np.isfinite(theta) or abs(theta - spec.theta) > tol * max(1.0, spec.theta):
            raise ChainError(f"theta by quadrature {theta!r} disagrees with {spec.theta!r}")
        pi_mass = spec.pi.mass()
        if abs(pi_mass - 1.0) > tol:
            raise ChainError(f"pi has mass {pi_mass!r}, expected 1")
        mean_g = spec.pi.integrate(spec.g)
        if abs(mean_g) > tol:
            raise ChainError(f"g is not centred under pi: {mean_g!r}")
        if spec.symmetry.odd_setting:
            for j in range(9):
                m = spec.nu.integrate(lambda w, j=j: spec.p(w) ** j * spec.g(w))
                if abs(m) > tol:
                    raise ChainError(f"int p^{j} g dnu = {m!r} should vanish for odd g")
    except QuadratureError as exc:
        raise ChainError(f"quadrature failed while validating {spec!r}: {exc}") from exc


def _indicator(lo, hi):
    return lambda w: np.where((np.asarray(w) >= lo) & (np.asarray(w) <= hi), 1.0, 0.0)


def default_test_functions() -> list[Callable]:
    # the constant is needed: with symmetric nu the other pairs cancel and
    # cannot see a wrong stationary law
    return [
        np.sign,
        lambda w: 1.0 / np.asarray(w, dtype=float),
        _indicator(1.0, 2.0),
        lambda w: np.where(np.abs(w) <= 10.0, w, 0.0),
        lambda w: np.ones_like(np.asarray(w, dtype=float)),
    ]


@dataclass
class ReversibilityReport:
    max_deviation: float
    deviations: np.ndarray
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_deviation < self.tol


def validate_reversibility(
    spec: ChainSpec,
    test_functions: Sequence[Callable] | None = None,
    tol: float = 1e-8,
    points: Sequence[float] = (0.1, 0.5),
) -> ReversibilityReport:
    """Largest ``|<f, Qh> - <Qf, h>|`` over pairs of test functions.

    ``points`` are breakpoints in ``y = 1/|w|`` where test functions jump;
    the defaults match the default test functions.
    """
    fs = list(default_test_functions() if test_functions is None else test_functions)
    if len(fs) < 4:
        raise ValueError("need at least four test functions")
    qfs = [spec.Q(f) for f in fs]
    dev = np.zeros((len(fs), len(fs)))
    for i, f in enumerate(fs):
        for j, h in enumerate(fs):
            if j <= i:
                continue
            lhs = spec.pi.integrate(lambda w: f(w) * qfs[j](w), points=points)
            rhs = spec.pi.integrate(lambda w: qfs[i](w) * h(w), points=points)
            dev[i, j] = dev[j, i] = abs(lhs - rhs)
    return ReversibilityReport(float(dev.max()), dev, tol)


@dataclass
class StationarityReport:
    intervals: list[Interval]
    lhs: np.ndarray
    rhs: np.ndarray
    tol: float

    @property
    def deviations(self) -> np.ndarray:
        return np.abs(self.lhs - self.rhs)

    @property
    def passed(self) -> bool:
        return bool(np.all(self.deviations < self.tol))


def stationarity_check(spec: ChainSpec, test_sets: Sequence[Interval], tol: float = 1e-8) -> StationarityReport:
    """Compare ``int Q(w; B) pi(dw)`` with ``pi(B)`` for closed intervals ``B``."""
    one_minus_p = spec.pi.integrate(spec.one_minus_p)
    lhs, rhs = [], []
    for B in test_sets:
        stay = spec.pi.integrate(spec.p, support=B)
        lhs.append(stay + spec.nu.mass(B) * one_minus_p)
        rhs.append(spec.pi.mass(B))
    return StationarityReport(list(test_sets), np.array(lhs), np.array(rhs), tol)


def broken_copy(spec: ChainSpec) -> ChainSpec:
    """The same kernel paired with ``nu`` in place of its stationary law."""
    return replace(spec, pi=spec.nu, variant=spec.variant + "-broken")
