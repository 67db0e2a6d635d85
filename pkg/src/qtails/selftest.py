"""Programmatic invariant suite behind the `selftest` CLI subcommand.

Each check returns (name, ok, detail).  The suite covers the algebraic
identities, the Legendre monotonicity and derivative identities, the
closed-form rate agreement, bound orderings, and a reduced Monte Carlo
sandwich.  Tolerances come from :mod:`qtails.tolerances`.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from .bounds import (
    chernoff_standard,
    compact_deformed_bound,
    eta_n_asymptotic,
    fat_change_of_variable,
    fat_fixed_a_bound,
    lower_bound_sum,
    markov_fixed_a_bound,
    rate_function,
)
from .deformed import Deformation, duality_product, exp_q, ln_q
from .distributions import QExponential, StudentT, Uniform, q_exp_tail
from .moments import Regime, deformed_mgf, deformed_power_moment, theta_point
from .montecarlo import estimate_tail_of_mean
from .tolerances import (
    CLOSED_FORM_ATOL,
    CONVEXITY_TOL,
    DERIVATIVE_RTOL,
    IDENTITY_RTOL,
)

__all__ = ["run_selftest", "DEFAULT_SELFTEST_SAMPLES"]

DEFAULT_SELFTEST_SAMPLES = 1_000_000
_N_RANDOM = 10_000


def _check_roundtrip(rng):
    u = np.exp(rng.uniform(-14.0, 14.0, _N_RANDOM))
    p = rng.uniform(0.02, 1.98, _N_RANDOM)
    p[np.abs(p - 1.0) < 1e-3] = 0.5
    worst = 0.0
    for ui, pi in zip(u, p):
        v = exp_q(ln_q(float(ui), float(pi)), float(pi))
        worst = max(worst, abs(v / ui - 1.0))
    return worst <= IDENTITY_RTOL, f"worst relative error {worst:.3e}"


def _check_duality(rng):
    q = rng.uniform(0.01, 0.99, _N_RANDOM)
    # Admissible u: 1 + (1-q) u > 0.
    u = rng.uniform(-0.99 / (1.0 - q), 50.0)
    worst = max(abs(duality_product(float(ui), Deformation(float(qi))) - 1.0)
                for ui, qi in zip(u, q))
    return worst <= IDENTITY_RTOL, f"worst |product - 1| = {worst:.3e}"


def _check_product_inequalities(rng):
    bad = 0
    for _ in range(_N_RANDOM):
        q = float(rng.uniform(0.01, 0.99))
        a, b = (float(v) for v in rng.uniform(0.0, 30.0, 2))
        lhs = exp_q(a + b, q)
        rhs = exp_q(a, q) * exp_q(b, q)
        if lhs > rhs * (1.0 + IDENTITY_RTOL) + IDENTITY_RTOL:
            bad += 1
        qs = 2.0 - q
        lhs2 = exp_q(-a - b, qs)
        rhs2 = exp_q(-a, qs) * exp_q(-b, qs)
        if lhs2 < rhs2 * (1.0 - IDENTITY_RTOL) - IDENTITY_RTOL:
            bad += 1
    return bad == 0, f"{bad} violations in {2 * _N_RANDOM} comparisons"


def _check_tail_product(rng):
    bad = 0
    for _ in range(_N_RANDOM):
        d = Deformation(float(rng.uniform(0.01, 0.99)))
        a, b = (float(v) for v in rng.uniform(0.0, 50.0, 2))
        if float(q_exp_tail(a, d)) * float(q_exp_tail(b, d)) > \
                float(q_exp_tail(a + b, d)) + IDENTITY_RTOL:
            bad += 1
    return bad == 0, f"{bad} violations in {_N_RANDOM} pairs"


def _check_log_curvature(rng):
    bad = 0
    for _ in range(_N_RANDOM):
        p = float(rng.uniform(0.05, 1.95))
        if abs(p - 1.0) < 1e-3:
            continue
        # Points where exp_q is finite positive: bracket 1 + (1-p)x > 0.
        edge = 1.0 / abs(1.0 - p)
        xs = sorted(rng.uniform(-0.95 * edge if p < 1 else -20.0,
                                20.0 if p < 1 else 0.95 * edge, 3))
        x1, x2, x3 = (float(v) for v in xs)
        if x2 - x1 < 1e-9 or x3 - x2 < 1e-9:
            continue
        f = [math.log(exp_q(v, p)) for v in (x1, x2, x3)]
        curv = (f[2] - f[1]) / (x3 - x2) - (f[1] - f[0]) / (x2 - x1)
        if p < 1.0 and curv > CONVEXITY_TOL:
            bad += 1
        if p > 1.0 and curv < -CONVEXITY_TOL:
            bad += 1
    return bad == 0, f"{bad} curvature sign violations"


def _check_normalization():
    worst = 0.0
    qe = QExponential(Deformation(0.5))
    v, _ = quad(lambda t: float(qe.pdf(t / (1 - t))) / (1 - t) ** 2, 0, 1,
                epsabs=1e-12, epsrel=1e-11, limit=200)
    worst = max(worst, abs(v - 1.0))
    st = StudentT(3)
    v, _ = quad(lambda t: float(st.pdf(math.tan(t))) / math.cos(t) ** 2,
                -math.pi / 2, math.pi / 2, epsabs=1e-12, epsrel=1e-11, limit=200)
    worst = max(worst, abs(v - 1.0))
    return worst <= 1e-8, f"worst |integral - 1| = {worst:.3e}"


def _check_student_tail():
    st = StudentT(3)
    worst = 0.0
    for x in np.linspace(0.0, 30.0, 11):
        closed = float(st.tail(x))
        head, _ = quad(lambda t: float(st.pdf(t)), 0.0, float(x),
                       epsabs=1e-13, epsrel=1e-12, limit=200)
        worst = max(worst, abs(closed - (0.5 - head)))
    return worst <= 1e-9, f"worst |closed - quadrature| = {worst:.3e}"


def _theta_of(model, a, d, r):
    return theta_point(model, a, d, r).theta


def _check_theta_monotone():
    cases = [
        (Uniform(0.0, 1.0), Deformation(0.5), Regime.COMPACT_SUPPORT, 1e-3, 1.9),
        (StudentT(3), Deformation(0.6), Regime.FAT_TAIL, 1e-2, 1e3),
    ]
    for model, d, r, lo, hi in cases:
        for a in np.geomspace(lo, hi, 100):
            h = 1e-5 * a
            slope = (_theta_of(model, a + h, d, r) - _theta_of(model, a - h, d, r)) / (2 * h)
            if not slope > 0.0:
                return False, f"non-positive dtheta/da at a={a:.4g} ({r.value})"
    return True, "positive at 100 log-spaced strengths per regime"


def _check_derivative_identities():
    worst = 0.0
    u, d = Uniform(0.0, 1.0), Deformation(0.5)
    for a in (0.2, 0.7, 1.3, 1.8):
        h = 1e-5 * a
        fd = (_theta_of(u, a + h, d, Regime.COMPACT_SUPPORT)
              - _theta_of(u, a - h, d, Regime.COMPACT_SUPPORT)) / (2 * h)
        A = deformed_mgf(u, a, d, Regime.COMPACT_SUPPORT)
        rhs = A ** (-d.q) * deformed_power_moment(u, a, d.q_star, d.q_star)
        worst = max(worst, abs(fd / rhs - 1.0))
    st, d6 = StudentT(3), Deformation(0.6)
    for a in (0.5, 2.0, 8.0):
        h = 1e-5 * a
        fd = (_theta_of(st, a + h, d6, Regime.FAT_TAIL)
              - _theta_of(st, a - h, d6, Regime.FAT_TAIL)) / (2 * h)
        pt = theta_point(st, a, d6, Regime.FAT_TAIL)
        rhs = pt.theta / (a * pt.A) * deformed_power_moment(st, a, d6.q, d6.q)
        worst = max(worst, abs(fd / rhs - 1.0))
    return worst <= DERIVATIVE_RTOL, f"worst relative mismatch {worst:.3e}"


def _check_uniform_rate():
    u, d = Uniform(0.0, 1.0), Deformation(0.5)
    worst_i, worst_a = 0.0, 0.0
    for x in np.arange(0.55, 0.951, 0.05):
        res = rate_function(float(x), u, d, Regime.COMPACT_SUPPORT)
        worst_i = max(worst_i, abs(res.rate - (2.0 - 4.0 * math.sqrt(x * (1.0 - x)))))
        worst_a = max(worst_a, abs(res.a_star / (4.0 * (x - 0.5) / x) - 1.0))
    ok = worst_i <= CLOSED_FORM_ATOL and worst_a <= 1e-4
    return ok, f"|dI| = {worst_i:.2e}, |da*|/a* = {worst_a:.2e}"


def _check_bound_ordering():
    u, d = Uniform(0.0, 1.0), Deformation(0.5)
    for x in np.linspace(0.51, 0.99, 25):
        deformed = compact_deformed_bound(float(x), 1, u, d)
        standard = chernoff_standard(float(x), 1, u)
        if standard > deformed + 1e-12:
            return False, f"ordering violated at x={x:.3f}"
    return True, "standard bound below deformed bound on (0.5, 1)"


def _check_markov_infimum():
    u, d, x = Uniform(0.0, 1.0), Deformation(0.5), 0.75
    res = minimize_scalar(lambda a: markov_fixed_a_bound(x, 1, a, u, d),
                          bounds=(1e-6, 1.0 / ((1.0 - d.q) * x) - 1e-9),
                          method="bounded", options={"xatol": 1e-12})
    target = compact_deformed_bound(x, 1, u, d)
    diff = abs(res.fun - target)
    return diff <= 1e-6, f"|inf_a fixed-a bound - optimized bound| = {diff:.2e}"


def _check_ldp_witness():
    d, x = Deformation(0.5), 4.0
    qe = QExponential(d)
    limit = (1.0 / ((1.0 - d.q) * x)) ** (1.0 / (1.0 - d.q))
    n = 10_000
    val = n ** (d.q / (1.0 - d.q)) * lower_bound_sum(x, n, qe)
    rel = abs(val / limit - 1.0)
    return rel <= 0.05, f"n={n}: scaled lower bound {val:.5f} vs limit {limit:.5f}"


def _check_mc_sandwich(samples, seed):
    d = Deformation(0.5)
    qe = QExponential(d)
    n, x = 5, 4.0
    est = estimate_tail_of_mean(qe, n, x, samples, seed)
    lower = lower_bound_sum(x, n, qe)
    if lower - 3.0 * est.stderr > est.p_hat:
        return False, f"lower bound {lower:.5f} above MC {est.p_hat:.5f}"
    d_loose = Deformation(0.3)
    uppers = [fat_fixed_a_bound(x, n, a, qe, d_loose) for a in (0.05, 0.2, 0.5)]
    A = deformed_mgf(qe, 0.2, d_loose, Regime.FAT_TAIL)
    y = fat_change_of_variable(x, 0.2, A, d_loose)
    mc_upper = estimate_tail_of_mean(QExponential(d_loose), n, y, samples, seed).p_hat
    uppers.append(mc_upper)
    if est.p_hat - 3.0 * est.stderr > min(uppers):
        return False, f"MC {est.p_hat:.5f} above best upper bound {min(uppers):.5f}"
    return True, (f"lower {lower:.5f} <= MC {est.p_hat:.5f} "
                  f"<= best upper {min(uppers):.5f}")


def _check_eta_asymptotic(samples, seed):
    d = Deformation(0.5)
    qe = QExponential(d)
    n, x = 20, 4.0
    est = estimate_tail_of_mean(qe, n, x, samples, seed)
    asym = eta_n_asymptotic(x, n, d)
    rel = abs(est.p_hat / asym - 1.0)
    return rel <= 0.20, f"MC/asymptotic ratio off by {rel:.3f} (limit 0.20)"


def _check_determinism(samples, seed):
    qe = QExponential(Deformation(0.5))
    a = estimate_tail_of_mean(qe, 3, 3.0, max(1000, samples // 10), seed)
    b = estimate_tail_of_mean(qe, 3, 3.0, max(1000, samples // 10), seed)
    c = estimate_tail_of_mean(qe, 3, 3.0, max(1000, samples // 10), seed, workers=4)
    ok = a == b == c
    return ok, "bit-identical across repeats and worker counts" if ok else "mismatch"


def _info_stationarity() -> str:
    # Residual of the fixed-point condition the optimizing strength satisfies
    # for the uniform source at q = 1/2 (logged, not asserted).
    d, x = Deformation(0.5), 0.75
    res = rate_function(x, Uniform(0.0, 1.0), d, Regime.COMPACT_SUPPORT)
    a = res.a_star
    lhs = exp_q(a, d.q_star)
    rhs = 1.0 + a / (1.0 - a + a * x * d.q)
    return (f"INFO stationarity residual at x={x}, a*={a:.8f}: "
            f"|lhs - rhs| = {abs(lhs - rhs):.3e}")


def run_selftest(samples: int = DEFAULT_SELFTEST_SAMPLES, seed: int = 20240601,
                 verbose: bool = True) -> bool:
    """Run every check; print one line per check; True when all pass."""
    rng = np.random.default_rng(seed)
    checks = [
        ("roundtrip identity", lambda: _check_roundtrip(rng)),
        ("duality product", lambda: _check_duality(rng)),
        ("product inequalities", lambda: _check_product_inequalities(rng)),
        ("tail product inequality", lambda: _check_tail_product(rng)),
        ("log curvature", lambda: _check_log_curvature(rng)),
        ("pdf normalization", _check_normalization),
        ("student-t closed tail", _check_student_tail),
        ("theta monotonicity", _check_theta_monotone),
        ("derivative identities", _check_derivative_identities),
        ("uniform rate closed form", _check_uniform_rate),
        ("bound ordering", _check_bound_ordering),
        ("fixed-a infimum", _check_markov_infimum),
        ("LDP failure witness", _check_ldp_witness),
        ("MC sandwich", lambda: _check_mc_sandwich(samples, seed)),
        ("sum-tail asymptotic", lambda: _check_eta_asymptotic(samples, seed)),
        ("MC determinism", lambda: _check_determinism(samples, seed)),
    ]
    all_ok = True
    for name, fn in checks:
        ok, detail = fn()
        all_ok &= ok
        if verbose:
            print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    if verbose:
        print(_info_stationarity())
    return all_ok
