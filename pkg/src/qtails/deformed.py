"""Deformed logarithm and exponential with extended-real semantics.

The deformed logarithm of order ``p`` is ``(u**(1-p) - 1) / (1-p)`` for
``u > 0``.  Its inverse, the deformed exponential, is the positive part
``[1 + (1-p)*u]_+ ** (1/(1-p))``.  For ``p < 1`` the exponential vanishes
left of ``u = -1/(1-p)``; for ``p > 1`` it has a pole at ``u = 1/(p-1)``
and evaluates to ``math.inf`` at and beyond it.  Infinity is a regular
value here, not an error: the fat-tail bound pipeline legitimately
produces infinite (trivially true) bounds.

All functions are pure and operate on Python floats; ``math.inf`` plays
the role of the extended-real marker.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = ["Deformation", "ln_q", "exp_q", "duality_product"]


def _check_order(p: float) -> None:
    if not (0.0 < p < 2.0) or p == 1.0:
        raise DomainError(
            f"deformation order must lie in (0, 2) and differ from 1, got {p!r}"
        )


@dataclass(frozen=True)
class Deformation:
    """A deformation parameter ``q`` in (0, 1) together with its dual ``2 - q``.

    The dual order ``q_star`` is always derived, never stored, which rules
    out the classic q-versus-dual sign bugs.
    """

    q: float

    def __post_init__(self):
        if not (0.0 < self.q < 1.0):
            raise DomainError(f"q must satisfy 0 < q < 1 strictly, got {self.q!r}")

    @property
    def q_star(self) -> float:
        return 2.0 - self.q


def ln_q(u: float, p: float) -> float:
    """Deformed logarithm ``(u**(1-p) - 1) / (1-p)``.

    Strictly increasing in ``u`` with ``ln_q(1, p) == 0`` exactly.
    Evaluated through ``expm1`` so that values near ``u = 1`` keep full
    relative precision.
    """
    _check_order(p)
    if not u > 0.0:
        raise DomainError(f"ln_q requires u > 0, got {u!r}")
    if u == math.inf:
        return math.inf if p < 1.0 else 1.0 / (p - 1.0)
    try:
        return math.expm1((1.0 - p) * math.log(u)) / (1.0 - p)
    except OverflowError:
        # u**(1-p) overflows: +inf for p < 1 (huge u), -inf for p > 1 (tiny u).
        return math.inf if p < 1.0 else -math.inf


def exp_q(u: float, p: float) -> float:
    """Deformed exponential ``[1 + (1-p)*u]_+ ** (1/(1-p))``.

    Total on the extended reals: for ``p < 1`` the result is 0 once the
    bracket is non-positive, for ``p > 1`` it is ``math.inf`` (the pole at
    ``u = 1/(p-1)`` and beyond).  ``exp_q(0, p) == 1`` exactly.
    """
    _check_order(p)
    if math.isnan(u):
        return math.nan
    b = 1.0 + (1.0 - p) * u
    if b <= 0.0:
        return 0.0 if p < 1.0 else math.inf
    if b == math.inf:
        return math.inf if p < 1.0 else 0.0
    if b == 1.0:
        return 1.0
    # Power via exp(log .): the base-zero cases are handled above, so the
    # logarithm is always finite here.
    try:
        return math.exp(math.log(b) / (1.0 - p))
    except OverflowError:
        return math.inf


def duality_product(u: float, d: Deformation) -> float:
    """Product ``exp_q(u) * exp_{2-q}(-u)`` for ``1 + (1-q)*u > 0``.

    Equals 1 up to floating-point roundoff; the identity couples the two
    deformation orders.
    """
    if not 1.0 + (1.0 - d.q) * u > 0.0:
        raise DomainError(
            f"duality product needs 1 + (1-q)*u > 0, got u={u!r} at q={d.q!r}"
        )
    return exp_q(u, d.q) * exp_q(-u, d.q_star)
