"""Deformed moment-generating functions and the Legendre reparameterization.

Two regimes share one interface.  For compact-support sources the weight is
the dual-order exponential, ``A(a) = E exp_{2-q}(a X)``, with
``theta = A**(1-q) * a`` and ``phi = ln_q(A)``.  For fat-tailed sources the
weight is the base-order exponential, ``A(a) = E exp_q(a X)``, with
``theta = a / A**(1-q)`` and ``phi = ln_{2-q}(A)``.  In both regimes theta
is strictly increasing in a, so the map can be inverted by bisection.

Divergent expectations are values (``math.inf``), not faults: the dual-order
weight has a pole at ``x = 1/((1-q) a)``, so any source with mass at or above
it yields an infinite A, and the base-order weight grows like
``x**(1/(1-q))``, so an algebraic tail of the source can defeat integrability.
Both conditions are detected analytically before any quadrature runs.

Quadrature notes: expectations are evaluated piecewise with an explicit
substitution ``x = c + t/(1-t)`` on infinite tails (the integrands decay only
algebraically there, which the substitution turns into an endpoint
singularity that adaptive quadrature handles well).  Finite segments receive
the model's anchor points so that narrowly concentrated mass is never
stepped over.  Results are cached on the (model, a, order) key; models are
immutable, so the cache is safe.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

from scipy.integrate import quad

from .deformed import Deformation, exp_q, ln_q
from .distributions import Distribution, Uniform
from .errors import DivergenceError, DomainError, QuadratureError, RangeError
from .tolerances import (
    INVERT_THETA_RTOL,
    QUAD_ACCEPT_RTOL,
    QUAD_EPSABS,
    QUAD_EPSREL,
)

__all__ = [
    "Regime",
    "ThetaPoint",
    "ThetaRange",
    "deformed_mgf",
    "classical_log_mgf",
    "deformed_power_moment",
    "theta_of_a",
    "phi_from_mgf",
    "phi_of_theta",
    "theta_point",
    "theta_range",
    "invert_theta",
    "mgf_pole",
]

#: Largest a probed when searching for the supremum of theta(a).
THETA_PROBE_CAP = 1e12
#: theta above this is reported as an unbounded supremum.
THETA_UNBOUNDED = 1e8
_QUAD_LIMIT = 300


class Regime(enum.Enum):
    """Which deformed weight multiplies the source under the expectation."""

    COMPACT_SUPPORT = "compact"
    FAT_TAIL = "fat"

    def weight_order(self, d: Deformation) -> float:
        return d.q_star if self is Regime.COMPACT_SUPPORT else d.q


@dataclass(frozen=True)
class ThetaPoint:
    """One evaluation (a, A(a), theta(a), phi(theta)) of the Legendre structure."""

    a: float
    A: float
    theta: float
    phi: float


@dataclass(frozen=True)
class ThetaRange:
    """Probed supremum of theta(a).

    ``unbounded`` is the verdict of geometric probing: True means theta was
    still growing when the probe hit its cap (the supremum is reported as
    ``math.inf``), False means theta stagnated and ``theta_bar`` is the
    observed limit.  ``probe_a`` is the largest a examined.
    """

    theta_bar: float
    unbounded: bool
    probe_a: float


def _quad_segment(fn, lo: float, hi: float, anchors=()) -> tuple[float, float]:
    pts = sorted(p for p in anchors if lo < p < hi)
    val, err, *rest = quad(
        fn, lo, hi,
        epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=_QUAD_LIMIT,
        points=pts or None, full_output=1,
    )
    if len(rest) > 1 and err > QUAD_ACCEPT_RTOL * (1.0 + abs(val)):
        raise QuadratureError(
            f"quadrature did not converge on [{lo}, {hi}]: {rest[1]}", estimate=err
        )
    return val, err


def _integrate(fn, lo: float, hi: float, anchors=()) -> float:
    """Integrate fn over [lo, hi], substituting x = c +/- t/(1-t) on infinite ends."""
    total = 0.0
    if lo == -math.inf:
        c = min(hi, 0.0) - 1.0

        def left(t):
            return fn(c - t / (1.0 - t)) / (1.0 - t) ** 2

        total += _quad_segment(left, 0.0, 1.0)[0]
        lo = c
    if hi == math.inf:
        c = max(lo, 0.0) + 1.0

        def right(t):
            return fn(c + t / (1.0 - t)) / (1.0 - t) ** 2

        total += _quad_segment(right, 0.0, 1.0)[0]
        hi = c
    if lo < hi:
        total += _quad_segment(fn, lo, hi, anchors)[0]
    return total


def mgf_pole(model: Distribution, d: Deformation, r: Regime) -> float:
    """Smallest a at which the deformed MGF diverges; inf if it never does."""
    if r is Regime.COMPACT_SUPPORT:
        hi = model.support[1]
        if hi == math.inf:
            return 0.0
        if hi > 0.0:
            return 1.0 / ((1.0 - d.q) * hi)
        return math.inf
    # Fat tail: divergence is governed by the source's algebraic decay, not
    # by the size of a; either every a > 0 converges or none does.
    alpha = model.pdf_tail_exponent
    if alpha < math.inf and d.q >= 1.0 - 1.0 / (alpha - 1.0):
        return 0.0
    return math.inf


def _mgf_quadrature(model: Distribution, a: float, p: float) -> float:
    lo, hi = model.support
    if p < 1.0:
        # The weight vanishes left of the bracket zero.
        lo = max(lo, -1.0 / ((1.0 - p) * a))

    def integrand(x: float) -> float:
        return float(model.pdf(x)) * exp_q(a * x, p)

    return _integrate(integrand, lo, hi, anchors=(0.0,) + model.quad_anchors)


@lru_cache(maxsize=200_000)
def _deformed_mgf_cached(model, a, d, r, method):
    q = d.q
    p = r.weight_order(d)
    if a >= mgf_pole(model, d, r):
        return math.inf
    if method != "quadrature" and r is Regime.COMPACT_SUPPORT and isinstance(model, Uniform):
        # Antiderivative of the dual-order weight: d/dx exp_p(a x)**(2-p) =
        # a (2-p) exp_p(a x), with 2 - q_star = q.  The endpoint difference is
        # taken in the log domain via expm1, otherwise A loses absolute
        # accuracy near a = 0 where both endpoint powers approach 1.
        def log_weight_pow_q(v: float) -> float:
            return -(q / (1.0 - q)) * math.log1p(-(1.0 - q) * v)

        m0 = log_weight_pow_q(a * model.lo)
        m1 = log_weight_pow_q(a * model.hi)
        return math.exp(m0) * math.expm1(m1 - m0) / (q * a * (model.hi - model.lo))
    if method == "closed":
        raise DomainError(f"no closed-form deformed MGF for {model!r} in {r.value} regime")
    return _mgf_quadrature(model, a, p)


def deformed_mgf(model: Distribution, a: float, d: Deformation, r: Regime,
                 method: str = "auto") -> float:
    """Expectation of the regime's deformed exponential weight at strength a.

    Returns ``math.inf`` when the expectation diverges (pole inside the
    support in the compact regime, non-integrable tail in the fat regime).
    ``method`` selects "auto" (closed form when registered, else quadrature),
    "closed" or "quadrature".
    """
    if not a > 0.0:
        raise DomainError(f"strength a must be positive, got {a!r}")
    if method not in ("auto", "closed", "quadrature"):
        raise DomainError(f"unknown method {method!r}")
    return _deformed_mgf_cached(model, float(a), d, r, method)


def classical_log_mgf(model: Distribution, a: float) -> float:
    """log E exp(a X); inf for sources with an algebraic tail (no finite MGF)."""
    if not a > 0.0:
        raise DomainError(f"strength a must be positive, got {a!r}")
    if model.pdf_tail_exponent < math.inf:
        return math.inf
    if isinstance(model, Uniform):
        width = a * (model.hi - model.lo)
        # a*hi + log((1 - e^{-width}) / width), stable for large a.
        return a * model.hi + math.log1p(-math.exp(-width)) - math.log(width)
    lo, hi = model.support
    val = _integrate(lambda x: float(model.pdf(x)) * math.exp(a * x), lo, hi,
                     anchors=(0.0,) + model.quad_anchors)
    return math.log(val)


def deformed_power_moment(model: Distribution, a: float, p: float, s: float) -> float:
    """E[exp_p(a X) ** s] by quadrature (right-hand sides of the derivative identities)."""
    if not a > 0.0:
        raise DomainError(f"strength a must be positive, got {a!r}")
    lo, hi = model.support
    if p < 1.0:
        lo = max(lo, -1.0 / ((1.0 - p) * a))
    return _integrate(lambda x: float(model.pdf(x)) * exp_q(a * x, p) ** s,
                      lo, hi, anchors=(0.0,) + model.quad_anchors)


def theta_of_a(a: float, A: float, d: Deformation, r: Regime) -> float:
    """Reparameterized strength: ``A**(1-q) * a`` (compact) or ``a / A**(1-q)`` (fat)."""
    if not a > 0.0:
        raise DomainError(f"strength a must be positive, got {a!r}")
    if not (0.0 < A < math.inf):
        raise DomainError(f"theta needs a finite positive A, got {A!r}")
    scale = A ** (1.0 - d.q)
    return scale * a if r is Regime.COMPACT_SUPPORT else a / scale


def phi_from_mgf(A: float, d: Deformation, r: Regime) -> float:
    """Deformed log of the MGF: ``ln_q(A)`` (compact) or ``ln_{2-q}(A)`` (fat)."""
    order = d.q if r is Regime.COMPACT_SUPPORT else d.q_star
    return ln_q(A, order)


def phi_of_theta(p: ThetaPoint, d: Deformation, r: Regime) -> float:
    """Potential at an evaluated point; phi(0+) = 0 since A(0+) = 1."""
    return phi_from_mgf(p.A, d, r)


def theta_point(model: Distribution, a: float, d: Deformation, r: Regime) -> ThetaPoint:
    """Evaluate (a, A, theta, phi) in one go; requires A finite."""
    A = deformed_mgf(model, a, d, r)
    if A == math.inf:
        raise DivergenceError(f"deformed MGF diverges at a={a!r} in {r.value} regime")
    return ThetaPoint(a=a, A=A, theta=theta_of_a(a, A, d, r), phi=phi_from_mgf(A, d, r))


def _theta_at(model, a, d, r) -> float:
    A = deformed_mgf(model, a, d, r)
    if A == math.inf:
        raise DivergenceError(f"deformed MGF diverges at a={a!r}")
    return theta_of_a(a, A, d, r)


def theta_range(model: Distribution, d: Deformation, r: Regime) -> ThetaRange:
    """Estimate sup theta(a) by geometric probing.

    Toward a finite pole the probe approaches it geometrically from below;
    otherwise a doubles until theta stagnates or the cap is reached.  The
    verdict is reported, never assumed.
    """
    pole = mgf_pole(model, d, r)
    if pole == 0.0:
        raise DivergenceError(
            f"deformed MGF diverges for every a > 0 ({r.value} regime inapplicable)"
        )
    if pole < math.inf:
        theta_prev = _theta_at(model, pole * 0.5, d, r)
        a = pole * 0.5
        for k in range(2, 45):
            a = pole * (1.0 - 2.0 ** (-k))
            theta = _theta_at(model, a, d, r)
            if theta > THETA_UNBOUNDED:
                return ThetaRange(theta_bar=math.inf, unbounded=True, probe_a=a)
            if theta - theta_prev <= 1e-9 * theta:
                return ThetaRange(theta_bar=theta, unbounded=False, probe_a=a)
            theta_prev = theta
        # Still growing at float resolution next to the pole.
        return ThetaRange(theta_bar=math.inf, unbounded=True, probe_a=a)
    a = 1.0
    theta = _theta_at(model, a, d, r)
    while a < THETA_PROBE_CAP:
        a *= 2.0
        theta_new = _theta_at(model, a, d, r)
        if theta_new > THETA_UNBOUNDED:
            return ThetaRange(theta_bar=math.inf, unbounded=True, probe_a=a)
        if theta_new - theta <= 1e-12 * theta:
            return ThetaRange(theta_bar=theta_new, unbounded=False, probe_a=a)
        theta = theta_new
    return ThetaRange(theta_bar=math.inf, unbounded=True, probe_a=a)


def invert_theta(target_theta: float, model: Distribution, d: Deformation,
                 r: Regime) -> float:
    """Solve theta(a) = target by bisection on the monotone map.

    Stops once ``|theta(a) - target| <= INVERT_THETA_RTOL * (1 + target)``.
    Raises RangeError when the target is not below the probed supremum.
    """
    if not target_theta > 0.0:
        raise DomainError(f"target theta must be positive, got {target_theta!r}")
    tr = theta_range(model, d, r)
    if target_theta >= tr.theta_bar:
        raise RangeError(
            f"target theta {target_theta!r} is not below the attainable "
            f"supremum {tr.theta_bar!r}"
        )
    ftol = INVERT_THETA_RTOL * (1.0 + target_theta)
    pole = mgf_pole(model, d, r)

    hi = min(1.0, 0.5 * pole)
    k = 0
    while _theta_at(model, hi, d, r) < target_theta:
        k += 1
        hi = pole * (1.0 - 2.0 ** (-k - 1)) if pole < math.inf else hi * 2.0
        if k > 60:
            raise RangeError(f"could not bracket theta = {target_theta!r}")
    lo = hi * 0.5
    while _theta_at(model, lo, d, r) > target_theta:
        lo *= 0.5
        if lo < 1e-300:
            raise RangeError(f"could not bracket theta = {target_theta!r} from below")

    for _ in range(500):
        mid = math.sqrt(lo * hi)
        t_mid = _theta_at(model, mid, d, r)
        if abs(t_mid - target_theta) <= ftol:
            return mid
        if t_mid < target_theta:
            lo = mid
        else:
            hi = mid
    raise RangeError(f"bisection failed to reach tolerance for theta = {target_theta!r}")
