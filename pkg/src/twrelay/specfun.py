"""Integer-parameter special functions and adaptive quadrature.

Everything the closed-form outage bound needs: factorial-based gamma,
lower/upper incomplete gamma with integer shape, integer-order modified
Bessel functions of the second kind, and binomial coefficients.  The
Gauss-Kronrod integrator doubles as production machinery (the
semi-analytic bound) and as the independent oracle the tests compare the
closed forms against.

All functions are pure and thread-safe.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

from .errors import ConvergenceError, DomainError

_LN2 = math.log(2.0)


def gamma_int(n: int) -> float:
    """Gamma(n) = (n-1)! for integer n >= 1.

    Exact (integer arithmetic) through n = 20, log-domain beyond.
    """
    if n < 1:
        raise DomainError(f"gamma_int requires n >= 1, got {n}")
    if n <= 20:
        return math.factorial(n - 1)
    return math.exp(math.lgamma(n))


def reciprocal_gamma_int(n: int) -> float:
    """1 / Gamma(n) for integer n >= 0, with the pole value 1/Gamma(0) = 0."""
    if n < 0:
        raise DomainError(f"reciprocal_gamma_int requires n >= 0, got {n}")
    if n == 0:
        return 0.0
    return 1.0 / gamma_int(n)


def binomial(n: int, k: int) -> int:
    """Exact binomial coefficient for 0 <= k <= n <= 64."""
    if not 0 <= k <= n:
        raise DomainError(f"binomial requires 0 <= k <= n, got n={n}, k={k}")
    if n > 64:
        raise DomainError(f"binomial supports n <= 64, got {n}")
    return math.comb(n, k)


def upper_incomplete_gamma(a: int, x: float) -> float:
    """Gamma(a, x) = integral_x^inf t^(a-1) e^(-t) dt for integer a >= 1.

    Uses the positive-term closed form
    Gamma(a, x) = (a-1)! e^(-x) sum_{i=0}^{a-1} x^i / i!,
    which is cancellation-free for every x >= 0.
    """
    if a < 1:
        raise DomainError(f"upper_incomplete_gamma requires a >= 1, got {a}")
    if x < 0:
        raise DomainError(f"upper_incomplete_gamma requires x >= 0, got {x}")
    s = 1.0
    term = 1.0
    for i in range(1, a):
        term *= x / i
        s += term
    return gamma_int(a) * math.exp(-x) * s


def lower_incomplete_gamma(a: int, x: float) -> float:
    """gamma(a, x) = integral_0^x t^(a-1) e^(-t) dt for integer a >= 1.

    Equals Gamma(a) [1 - e^(-x) sum_{i=0}^{a-1} x^i / i!]; evaluated via a
    power series when x is small (the bracketed difference would lose all
    precision there) and via the complement otherwise.
    """
    if a < 1:
        raise DomainError(f"lower_incomplete_gamma requires a >= 1, got {a}")
    if x < 0:
        raise DomainError(f"lower_incomplete_gamma requires x >= 0, got {x}")
    if x == 0.0:
        return 0.0
    if x >= a + 1.0:
        return gamma_int(a) - upper_incomplete_gamma(a, x)
    # gamma(a, x) = x^a e^(-x) sum_{k>=0} x^k / (a (a+1) ... (a+k))
    term = 1.0 / a
    total = term
    for k in range(1, 500):
        term *= x / (a + k)
        total += term
        if term <= total * 1e-17:
            break
    return x**a * math.exp(-x) * total


def bessel_k_int(order: int, x: float, spec: "QuadratureSpec | None" = None) -> float:
    """Modified Bessel function K_nu(x) for integer nu and x > 0.

    K_0 and K_1 come from adaptive quadrature of the integral
    representation K_nu(x) = integral_0^inf e^(-x cosh t) cosh(nu t) dt;
    higher orders follow the upward recurrence
    K_{nu+1}(x) = K_{nu-1}(x) + (2 nu / x) K_nu(x), which is stable because
    K grows with the order.  K_{-nu} = K_nu.
    """
    if x <= 0:
        raise DomainError(f"bessel_k_int requires x > 0, got {x}")
    nu = abs(order)
    k_prev = _bessel_k_quadrature(0, x, spec)
    if nu == 0:
        return k_prev
    k_cur = _bessel_k_quadrature(1, x, spec)
    for m in range(1, nu):
        k_prev, k_cur = k_cur, k_prev + (2.0 * m / x) * k_cur
    return k_cur


_BESSEL_QUAD = None  # default spec, set after QuadratureSpec is defined


def _bessel_k_quadrature(nu: int, x: float, spec: "QuadratureSpec | None" = None) -> float:
    """Direct quadrature of the K_nu integral representation."""
    return integrate_adaptive(_bessel_k_integrand(nu, x), 0.0, math.inf, spec or _BESSEL_QUAD).value


def _bessel_k_integrand(nu: int, x: float) -> Callable[[float], float]:
    """e^(-x cosh t) cosh(nu t), assembled in log space to dodge overflow."""
    log_x = math.log(x)

    def f(t: float) -> float:
        if t <= 30.0:
            xcosh = x * math.cosh(t)
        elif log_x + t - _LN2 > 709.0:
            return 0.0
        else:
            xcosh = math.exp(log_x + t - _LN2)  # cosh t = e^t/2 to ~1e-26 here
        u = nu * t
        log_cosh_nu = u - _LN2 + math.log1p(math.exp(-2.0 * u)) if u > 0.0 else 0.0
        arg = log_cosh_nu - xcosh
        return math.exp(arg) if arg > -745.0 else 0.0

    return f


# --------------------------------------------------------------------------
# Adaptive Gauss-Kronrod quadrature
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and budget for adaptive integration."""

    abs_tol: float = 1e-14
    rel_tol: float = 1e-11
    max_subdivisions: int = 4000

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


_BESSEL_QUAD = QuadratureSpec(abs_tol=1e-305, rel_tol=5e-12, max_subdivisions=4000)


@dataclass(frozen=True)
class IntegralResult:
    """Integral estimate with its error bound and (for infinite ranges) the
    analytic bound on the truncated tail."""

    value: float
    error_bound: float
    tail_bound: float
    subdivisions: int

    def __float__(self) -> float:
        return self.value


# 15-point Kronrod extension of 7-point Gauss on [-1, 1]:
# (node, Gauss-7 weight, Kronrod-15 weight).
_G7K15 = (
    (+0.991455371120813, 0.0, 0.022935322010529),
    (-0.991455371120813, 0.0, 0.022935322010529),
    (+0.949107912342759, 0.129484966168870, 0.063092092629979),
    (-0.949107912342759, 0.129484966168870, 0.063092092629979),
    (+0.864864423359769, 0.0, 0.104790010322250),
    (-0.864864423359769, 0.0, 0.104790010322250),
    (+0.741531185599394, 0.279705391489277, 0.140653259715525),
    (-0.741531185599394, 0.279705391489277, 0.140653259715525),
    (+0.586087235467691, 0.0, 0.169004726639267),
    (-0.586087235467691, 0.0, 0.169004726639267),
    (+0.405845151377397, 0.381830050505119, 0.190350578064785),
    (-0.405845151377397, 0.381830050505119, 0.190350578064785),
    (+0.207784955007898, 0.0, 0.204432940075298),
    (-0.207784955007898, 0.0, 0.204432940075298),
    (0.0, 0.417959183673469, 0.209482141084728),
)

_MAX_WINDOWS = 64


def _panel(f: Callable[[float], float], lo: float, hi: float) -> tuple[float, float]:
    """One G7/K15 panel: (Kronrod estimate, |Kronrod - Gauss| error proxy)."""
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    gauss = 0.0
    kronrod = 0.0
    for node, wg, wk in _G7K15:
        y = f(mid + half * node)
        gauss += wg * y
        kronrod += wk * y
    return half * kronrod, half * abs(kronrod - gauss)


def _refine(f, lo: float, hi: float, abs_tol: float, rel_tol: float,
            budget: int) -> tuple[float, float, int]:
    """Bisect the worst panel until the summed error proxy meets tolerance.

    Returns (value, error, panels used); may return with error above
    tolerance once the budget is exhausted or panels hit float resolution.
    """
    value, err = _panel(f, lo, hi)
    heap = [(-err, lo, hi, value, err)]
    total, total_err = value, err
    used = 1
    while total_err > max(abs_tol, rel_tol * abs(total)) and used < budget and heap:
        _, a, b, v, e = heapq.heappop(heap)
        m = 0.5 * (a + b)
        if not a < m < b:  # interval below float resolution
            total_err = max(total_err, e)
            break
        v1, e1 = _panel(f, a, m)
        v2, e2 = _panel(f, m, b)
        total += (v1 + v2) - v
        total_err += (e1 + e2) - e
        heapq.heappush(heap, (-e1, a, m, v1, e1))
        heapq.heappush(heap, (-e2, m, b, v2, e2))
        used += 1
    return total, total_err, used


def integrate_adaptive(f: Callable[[float], float], lo: float, hi: float,
                       spec: QuadratureSpec | None = None) -> IntegralResult:
    """Adaptive Gauss-Kronrod integral of f over [lo, hi], hi may be +inf.

    Infinite upper limits are truncated window by window (doubling widths);
    integration stops once the window contributions decay geometrically and
    the geometric-series bound on the remaining tail drops below tolerance.
    That tail bound is returned alongside the estimate.  Raises
    ConvergenceError (carrying the best estimate and its error bound) if the
    subdivision budget runs out first.
    """
    spec = spec or QuadratureSpec()
    if math.isnan(lo) or math.isnan(hi):
        raise ValueError("integration limits must not be NaN")
    if math.isinf(lo):
        raise ValueError("lower limit must be finite")
    if not math.isinf(hi):
        if hi < lo:
            raise ValueError("upper limit must be >= lower limit")
        if hi == lo:
            return IntegralResult(0.0, 0.0, 0.0, 0)
        value, err, used = _refine(f, lo, hi, spec.abs_tol, spec.rel_tol,
                                   spec.max_subdivisions)
        if err > max(spec.abs_tol, spec.rel_tol * abs(value)):
            raise ConvergenceError("quadrature did not reach tolerance", value, err)
        return IntegralResult(value, err, 0.0, used)
    return _integrate_semi_infinite(f, lo, spec)


def _integrate_semi_infinite(f, lo: float, spec: QuadratureSpec) -> IntegralResult:
    total = 0.0
    total_err = 0.0
    used = 0
    prev_abs = None
    zero_run = 0
    left = lo
    width = 1.0
    for _ in range(_MAX_WINDOWS):
        budget = spec.max_subdivisions - used
        if budget <= 0:
            raise ConvergenceError("subdivision budget exhausted before the tail decayed",
                                   total, total_err + (prev_abs or abs(total)))
        v, e, u = _refine(f, left, left + width, spec.abs_tol / 8.0,
                          spec.rel_tol / 4.0, budget)
        total += v
        total_err += e
        used += u
        cur = abs(v)
        tol_now = max(spec.abs_tol, spec.rel_tol * abs(total))
        if prev_abs is not None and cur <= prev_abs:
            if cur == 0.0:
                zero_run += 1
                if zero_run >= 3 and prev_abs == 0.0:
                    return _finish(total, total_err, 0.0, used, spec)
            else:
                zero_run = 0
                ratio = cur / prev_abs
                if ratio < 0.95:
                    tail = cur * ratio / (1.0 - ratio)
                    if tail <= 0.5 * tol_now:
                        return _finish(total, total_err, tail, used, spec)
        else:
            zero_run = zero_run + 1 if cur == 0.0 else 0
        prev_abs = cur
        left += width
        width *= 2.0
    raise ConvergenceError("window limit reached before the tail decayed",
                           total, total_err + (prev_abs or abs(total)))


def _finish(total, total_err, tail, used, spec) -> IntegralResult:
    bound = total_err + tail
    if bound > max(spec.abs_tol, spec.rel_tol * abs(total)):
        raise ConvergenceError("accumulated error above tolerance", total, bound)
    return IntegralResult(total, bound, tail, used)
