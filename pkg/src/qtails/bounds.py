"""Rate functions and tail bounds for sums of i.i.d. variables.

The rate function is the supremum of ``theta*x - phi(theta)``, evaluated by
scanning the strength parameter a on a log grid (theta is monotone in a)
and refining with golden-section search.  From it come the standard
Chernoff bound, the compact-support deformed bound, the fat-tail bounds and
the two asymptotic envelopes.  Asymptotic kinds are valid for large n only
and may exceed 1 at small n; they are reported raw, never clamped.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .deformed import Deformation, exp_q, ln_q
from .distributions import Distribution, QExponential, q_exp_tail
from .errors import DivergenceError, DomainError
from .moments import (
    Regime,
    classical_log_mgf,
    deformed_mgf,
    mgf_pole,
    phi_from_mgf,
    theta_of_a,
)
from .tolerances import OPTIMIZER_A_RTOL

__all__ = [
    "RateResult",
    "BoundKind",
    "BoundCurve",
    "LDPUnavailableWarning",
    "rate_function",
    "classical_rate",
    "chernoff_standard",
    "compact_deformed_bound",
    "markov_fixed_a_bound",
    "fat_fixed_a_bound",
    "lower_bound_sum",
    "fat_change_of_variable",
    "eta_n_asymptotic",
    "xi_asymptotic",
    "fixed_a_asymptotic",
    "bound_curve",
]

_GRID_PER_DECADE = 64
_A_FLOOR = 1e-9
_POLE_BACKOFF = 1e-12
_PROBE_CAP = 1e12
#: Objective values beyond this at the probe edge are reported as an
#: unbounded rate (+inf).
_UNBOUNDED_OBJECTIVE = 1e6
#: Objective maxima below this are floating-point noise around zero (the
#: closed forms are accurate to ~1e-16, quadrature to ~1e-12) and collapse
#: to the exact zero rate.
_OBJECTIVE_FLOOR = 1e-11
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class LDPUnavailableWarning(UserWarning):
    """The classical moment generating function does not exist (fat tail)."""


@dataclass(frozen=True)
class RateResult:
    """Value of the Legendre supremum at one x."""

    x: float
    rate: float
    theta_star: float
    a_star: float


class BoundKind(enum.Enum):
    CHERNOFF_STANDARD = "chernoff_standard"
    COMPACT_DEFORMED = "compact_deformed"
    MARKOV_FIXED_A = "markov_fixed_a"
    LOWER_SUM = "lower_sum"
    FAT_UPPER_MC = "fat_upper_mc"
    XI_ASYMPTOTIC = "xi_asymptotic"
    FIXED_A_ASYMPTOTIC = "fixed_a_asymptotic"

    @property
    def is_asymptotic(self) -> bool:
        return self in (BoundKind.XI_ASYMPTOTIC, BoundKind.FIXED_A_ASYMPTOTIC)

    @property
    def is_lower(self) -> bool:
        return self is BoundKind.LOWER_SUM


@dataclass(frozen=True)
class BoundCurve:
    """Tabulated bound values over a strictly increasing x grid.

    Non-asymptotic kinds are clamped into [0, 1] (an upper bound above 1 is
    vacuous but valid); asymptotic envelopes are kept raw so their small-n
    invalidity stays visible.
    """

    kind: BoundKind
    n: int
    q: float | None
    a: float | None
    grid: tuple[tuple[float, float], ...]

    def __post_init__(self):
        xs = [p[0] for p in self.grid]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise DomainError("bound curve grid must be strictly increasing in x")
        if not self.kind.is_asymptotic:
            bad = [v for _, v in self.grid if not (0.0 <= v <= 1.0)]
            if bad:
                raise DomainError(f"non-asymptotic bound values outside [0,1]: {bad[:3]}")

    @property
    def xs(self) -> list[float]:
        return [p[0] for p in self.grid]

    @property
    def values(self) -> list[float]:
        return [p[1] for p in self.grid]


def _golden_max(fn, lo: float, hi: float, rtol: float) -> tuple[float, float]:
    """Golden-section maximum of fn over [lo, hi] in log coordinates."""
    tlo, thi = math.log(lo), math.log(hi)
    t1 = thi - _GOLDEN * (thi - tlo)
    t2 = tlo + _GOLDEN * (thi - tlo)
    f1, f2 = fn(math.exp(t1)), fn(math.exp(t2))
    while thi - tlo > rtol:
        if f1 >= f2:
            thi, t2, f2 = t2, t1, f1
            t1 = thi - _GOLDEN * (thi - tlo)
            f1 = fn(math.exp(t1))
        else:
            tlo, t1, f1 = t1, t2, f2
            t2 = tlo + _GOLDEN * (thi - tlo)
            f2 = fn(math.exp(t2))
    t = 0.5 * (tlo + thi)
    a = math.exp(t)
    return a, fn(a)


def _scan_and_refine(objective, a_lo: float, a_hi: float) -> tuple[float, float, int]:
    """Log-grid scan (64 points per decade) plus golden-section refinement.

    Returns (a_star, best value, index flag) where the flag is 1 when the
    maximum sat on the upper edge of the grid.
    """
    decades = max(1.0, math.log10(a_hi / a_lo))
    npts = int(decades * _GRID_PER_DECADE) + 1
    grid = np.geomspace(a_lo, a_hi, npts)
    vals = np.array([objective(a) for a in grid])
    i = int(np.argmax(vals))
    if vals[i] <= _OBJECTIVE_FLOOR:
        return 0.0, 0.0, 0
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, npts - 1)]
    a_star, best = _golden_max(objective, lo, hi, OPTIMIZER_A_RTOL)
    if vals[i] > best:
        a_star, best = grid[i], vals[i]
    return a_star, best, int(i == npts - 1)


def rate_function(x: float, model: Distribution, d: Deformation, r: Regime) -> RateResult:
    """Legendre supremum ``sup_theta (theta*x - phi(theta))`` at one x.

    The supremum over theta is taken by maximizing over the strength a it is
    parameterized by.  Returns a zero rate when the objective never becomes
    positive (x at or below the mean), and an infinite rate when the
    objective grows past any bound along the probe (x beyond the support).
    """
    pole = mgf_pole(model, d, r)
    if pole == 0.0:
        raise DivergenceError(
            f"deformed MGF diverges for every a > 0; {r.value} regime "
            f"inapplicable to {model!r}"
        )
    if pole < math.inf:
        a_hi = pole * (1.0 - _POLE_BACKOFF)
    else:
        # Double until theta stagnates; past that point the objective can
        # only change through phi, which is bounded monotone.
        a_hi = 1.0
        t_prev = _theta_phi(model, a_hi, d, r)[0]
        while a_hi < _PROBE_CAP:
            t_new = _theta_phi(model, 2.0 * a_hi, d, r)[0]
            a_hi *= 2.0
            if t_new - t_prev <= 1e-12 * t_new:
                break
            t_prev = t_new

    def objective(a: float) -> float:
        theta, phi = _theta_phi(model, a, d, r)
        if not math.isfinite(phi):
            return -math.inf
        return theta * x - phi

    a_star, best, on_edge = _scan_and_refine(objective, _A_FLOOR, a_hi)
    if a_star == 0.0:
        return RateResult(x=x, rate=0.0, theta_star=0.0, a_star=0.0)
    theta_star, phi_star = _theta_phi(model, a_star, d, r)
    if on_edge and best > _UNBOUNDED_OBJECTIVE:
        return RateResult(x=x, rate=math.inf, theta_star=theta_star, a_star=a_star)
    return RateResult(x=x, rate=best, theta_star=theta_star, a_star=a_star)


def _theta_phi(model, a, d, r):
    A = deformed_mgf(model, a, d, r)
    if A == math.inf:
        return math.inf, math.inf
    return theta_of_a(a, A, d, r), phi_from_mgf(A, d, r)


def classical_rate(x: float, model: Distribution) -> RateResult:
    """Un-deformed Legendre supremum ``sup_t (t*x - log E e^{tX})``."""
    if model.pdf_tail_exponent < math.inf:
        raise DomainError(
            f"{model!r} has no finite classical MGF for t > 0"
        )

    def objective(t: float) -> float:
        return t * x - classical_log_mgf(model, t)

    a_star, best, on_edge = _scan_and_refine(objective, _A_FLOOR, _PROBE_CAP)
    if a_star == 0.0:
        return RateResult(x=x, rate=0.0, theta_star=0.0, a_star=0.0)
    if on_edge and best > _UNBOUNDED_OBJECTIVE:
        return RateResult(x=x, rate=math.inf, theta_star=a_star, a_star=a_star)
    return RateResult(x=x, rate=best, theta_star=a_star, a_star=a_star)


def chernoff_standard(x: float, n: int, model: Distribution) -> float:
    """Classical Chernoff bound ``exp(-n I(x))`` on Prob(mean >= x).

    For sources without a finite moment generating function the bound
    degenerates to the trivial value 1; an LDPUnavailableWarning flags it.
    """
    _check_n(n)
    if model.pdf_tail_exponent < math.inf:
        warnings.warn(
            "classical MGF does not exist for this source; "
            "returning the trivial bound 1",
            LDPUnavailableWarning,
            stacklevel=2,
        )
        return 1.0
    rate = classical_rate(x, model).rate
    return min(1.0, math.exp(-n * rate))


def compact_deformed_bound(x: float, n: int, model: Distribution, d: Deformation) -> float:
    """Optimized compact-support bound ``exp_q(-I(x)) ** n`` on Prob(mean >= x)."""
    _check_n(n)
    rate = rate_function(x, model, d, Regime.COMPACT_SUPPORT).rate
    return min(1.0, exp_q(-rate, d.q) ** n)


def markov_fixed_a_bound(x: float, n: int, a: float, model: Distribution,
                         d: Deformation) -> float:
    """Un-optimized compact-regime bound ``[exp_q(-a x) * A(a)] ** n``.

    Requires (1-q)*a*x < 1; the optimized bound is its infimum over
    admissible a.  May exceed 1 (vacuous) or be infinite when A diverges.
    """
    _check_n(n)
    if not a > 0.0:
        raise DomainError(f"a must be positive, got {a!r}")
    if not (1.0 - d.q) * a * x < 1.0:
        raise DomainError(
            f"fixed-a bound needs (1-q)*a*x < 1, got a={a!r}, x={x!r}, q={d.q!r}"
        )
    A = deformed_mgf(model, a, d, Regime.COMPACT_SUPPORT)
    if A == math.inf:
        return math.inf
    return (exp_q(-a * x, d.q) * A) ** n


def fat_fixed_a_bound(x: float, n: int, a: float, model: Distribution,
                      d: Deformation) -> float:
    """Fat-regime product bound ``exp_{2-q}(-a n x) * A(a) ** n``.

    Loose for large n (the A**n factor grows exponentially); mainly used at
    n = 1.  For n > 1 the underlying product inequality needs non-negative
    variables, so real-valued sources are rejected there.
    """
    _check_n(n)
    if not (a > 0.0 and x > 0.0):
        raise DomainError(f"need a > 0 and x > 0, got a={a!r}, x={x!r}")
    if n > 1 and model.support[0] < 0.0:
        raise DomainError(
            "the n > 1 product bound requires a non-negative source; "
            "use n = 1 for real-valued models"
        )
    A = deformed_mgf(model, a, d, Regime.FAT_TAIL)
    if A == math.inf:
        return math.inf
    return exp_q(-a * n * x, d.q_star) * A ** n


def lower_bound_sum(x: float, n: int, model: Distribution) -> float:
    """Single-large-summand lower bound ``1 - (1 - tail(n x)) ** n``.

    Evaluated through log1p/expm1 so tiny tails do not cancel.
    """
    _check_n(n)
    if not x > 0.0:
        raise DomainError(f"x must be positive, got {x!r}")
    t = float(model.tail(n * x))
    t = min(max(t, 0.0), 1.0)
    if t == 1.0:
        return 1.0
    return -math.expm1(n * math.log1p(-t))


def fat_change_of_variable(x: float, a: float, A: float, d: Deformation) -> float:
    """Transformed threshold ``y = a * A**(q-1) * x - ln_{2-q}(A)``.

    Defined when ``x > ln_q(A)/a``, which makes y positive; the tail of the
    mean at x is then bounded above by the deformed-exponential sum tail at y.
    """
    if not a > 0.0:
        raise DomainError(f"a must be positive, got {a!r}")
    if not (0.0 < A < math.inf):
        raise DomainError(f"A must be finite positive, got {A!r}")
    threshold = ln_q(A, d.q) / a
    if not x > threshold:
        raise DomainError(
            f"change of variable needs x > ln_q(A)/a = {threshold!r}, got x={x!r}"
        )
    return a * A ** (1.0 - d.q_star) * x - ln_q(A, d.q_star)


def eta_n_asymptotic(x: float, n: int, d: Deformation) -> float:
    """Large-n tail of the deformed-exponential sample mean: ``n * tail(n(x - mean))``."""
    _check_n(n)
    mean = 1.0 / d.q
    if not x > mean:
        raise DomainError(f"asymptotic needs x > {mean!r} (the mean), got {x!r}")
    return n * float(q_exp_tail(n * (x - mean), d))


def xi_asymptotic(x: float, n: int, model: Distribution, d: Deformation) -> float:
    """Fat-tail envelope ``n * exp_{2-q}(n/q - n I(x))`` with I from the fat regime."""
    _check_n(n)
    rate = rate_function(x, model, d, Regime.FAT_TAIL).rate
    return n * exp_q(n / d.q - n * rate, d.q_star)


def fixed_a_asymptotic(x: float, n: int, a: float, model: Distribution,
                       d: Deformation) -> float:
    """Fat-tail envelope at fixed strength a (no optimization over theta).

    ``n * exp_{2-q}(n/q + n/(1-q) - n/(1-q) * (1 + (1-q) a x) / A(a)**(1-q))``;
    equals ``n * exp_{2-q}(n/q + n phi - n theta x)`` at theta = theta(a).
    Infinite when the argument reaches the dual-order pole, which happens for
    small x where the envelope is vacuous anyway.
    """
    _check_n(n)
    if not a > 0.0:
        raise DomainError(f"a must be positive, got {a!r}")
    q = d.q
    A = deformed_mgf(model, a, d, Regime.FAT_TAIL)
    if A == math.inf:
        return math.inf
    arg = n / q + n / (1.0 - q) * (1.0 - (1.0 + (1.0 - q) * a * x) / A ** (1.0 - q))
    return n * exp_q(arg, d.q_star)


def _check_n(n: int) -> None:
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise DomainError(f"n must be an integer >= 1, got {n!r}")


def bound_curve(kind: BoundKind, model: Distribution, n: int, xs,
                d: Deformation | None = None, a: float | None = None,
                samples: int | None = None, seed: int | None = None,
                workers: int = 1) -> BoundCurve:
    """Tabulate one bound kind over an x grid.

    Non-asymptotic values are clamped into [0, 1].  FAT_UPPER_MC estimates
    the transformed sum tail by Monte Carlo (needs samples and seed); grid
    points where the change of variable is undefined get the trivial value 1.
    """
    xs = [float(v) for v in xs]
    vals: list[float]
    if kind is BoundKind.LOWER_SUM:
        vals = [lower_bound_sum(x, n, model) for x in xs]
    elif kind is BoundKind.CHERNOFF_STANDARD:
        vals = [chernoff_standard(x, n, model) for x in xs]
    elif kind is BoundKind.COMPACT_DEFORMED:
        vals = [compact_deformed_bound(x, n, model, _need_d(d)) for x in xs]
    elif kind is BoundKind.MARKOV_FIXED_A:
        vals = [markov_fixed_a_bound(x, n, _need_a(a), model, _need_d(d)) for x in xs]
    elif kind is BoundKind.XI_ASYMPTOTIC:
        vals = [xi_asymptotic(x, n, model, _need_d(d)) for x in xs]
    elif kind is BoundKind.FIXED_A_ASYMPTOTIC:
        vals = [fixed_a_asymptotic(x, n, _need_a(a), model, _need_d(d)) for x in xs]
    elif kind is BoundKind.FAT_UPPER_MC:
        vals = _fat_upper_mc(model, n, xs, _need_d(d), _need_a(a), samples, seed, workers)
    else:
        raise DomainError(f"unknown bound kind {kind!r}")
    if not kind.is_asymptotic:
        vals = [min(1.0, max(0.0, v)) for v in vals]
    return BoundCurve(kind=kind, n=n, q=None if d is None else d.q, a=a,
                      grid=tuple(zip(xs, vals)))


def _fat_upper_mc(model, n, xs, d, a, samples, seed, workers):
    from .montecarlo import estimate_curve

    if samples is None or seed is None:
        raise DomainError("FAT_UPPER_MC needs samples and seed")
    A = deformed_mgf(model, a, d, Regime.FAT_TAIL)
    if A == math.inf:
        raise DivergenceError(f"deformed MGF diverges at a={a!r}; no MC upper bound")
    threshold = ln_q(A, d.q) / a
    ys = [fat_change_of_variable(x, a, A, d) if x > threshold else None for x in xs]
    valid = [y for y in ys if y is not None]
    vals = [1.0] * len(xs)
    if valid:
        comparison = QExponential(d)
        estimates = estimate_curve(comparison, n, valid, samples, seed, workers=workers)
        it = iter(estimates)
        for i, y in enumerate(ys):
            if y is not None:
                vals[i] = next(it).p_hat
    return vals
