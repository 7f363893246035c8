"""Scalar special functions used by the closed-form channel expressions.

Everything here is a pure function of its arguments.
"""
from __future__ import annotations

import math

from scipy import special as _sp

from .errors import ConvergenceError, DomainError, PoleError
from .quadrature import QuadSpec, integrate

EULER_GAMMA = 0.5772156649015329

_LOG_QUAD = QuadSpec(abs_tol=1e-300, rel_tol=1e-13, max_subdivisions=500)


def ln_gamma(x: float) -> float:
    if not x > 0:
        raise DomainError(f"ln_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def _is_int(a) -> bool:
    return float(a).is_integer()


def finite_upper_gamma(n: int, x: float) -> float:
    """Gamma(n, x) = (n-1)! e^{-x} sum_{j<n} x^j / j! for integer n >= 1.

    The finite sum is entire in ``x``, so negative arguments are allowed; the
    channel constants need them whenever z < phi**2.
    """
    if not (_is_int(n) and n >= 1):
        raise DomainError(f"finite_upper_gamma requires integer n >= 1, got {n}")
    n = int(n)
    term, total = 1.0, 1.0
    for j in range(1, n):
        term *= x / j
        total += term
    return math.factorial(n - 1) * math.exp(-x) * total


def upper_inc_gamma(a: float, x: float, method: str = "auto") -> float:
    """Upper incomplete gamma Gamma(a, x) for a > 0, x >= 0.

    ``method="finite"`` uses the terminating sum (integer ``a`` only),
    ``method="general"`` the regularized series/continued-fraction route of
    ``scipy.special.gammaincc``; ``"auto"`` picks finite for integer ``a``.
    """
    if not a > 0 or not x >= 0:
        raise DomainError(f"upper_inc_gamma requires a > 0 and x >= 0, got a={a}, x={x}")
    if method == "auto":
        method = "finite" if _is_int(a) and a <= 60 else "general"
    if method == "finite":
        return finite_upper_gamma(a, x)
    if method != "general":
        raise ValueError(f"unknown method {method!r}")
    if x == 0:
        return math.gamma(a)
    return float(_sp.gammaincc(a, x)) * math.gamma(a)


def lower_inc_gamma(a: float, x: float) -> float:
    """gamma(a, x) = Gamma(a) - Gamma(a, x), computed without cancellation."""
    if not a > 0 or not x >= 0:
        raise DomainError(f"lower_inc_gamma requires a > 0 and x >= 0, got a={a}, x={x}")
    return float(_sp.gammainc(a, x)) * math.gamma(a)


def log_weighted_upper_gamma(s: float, x: float, j: int) -> float:
    """Integral of t**(s-1) e**(-t) ln(t)**j over [x, inf) for j in {0, 1, 2}.

    For j >= 1 this is d^j Gamma(s, x) / ds^j.
    """
    if j not in (0, 1, 2):
        raise DomainError(f"log moment order must be 0, 1 or 2, got {j}")
    if not s > 0 or not x >= 0:
        raise DomainError(f"log_weighted_upper_gamma requires s > 0, x >= 0, got s={s}, x={x}")
    if j == 0:
        return upper_inc_gamma(s, x)

    def f(t):
        if t == 0.0:
            return 0.0
        lt = math.log(t)
        return math.exp((s - 1.0) * lt - t) * lt ** j

    # ln t changes sign at t = 1; integrate the pieces separately so the
    # relative tolerance applies to each signed part.
    total = 0.0
    if x < 1.0:
        mode = "open-left" if s < 1.0 else "closed"
        total += integrate(f, x, 1.0, QuadSpec(abs_tol=1e-300, rel_tol=1e-13,
                                               max_subdivisions=500,
                                               endpoint_handling=mode)).value
        start = 1.0
    else:
        start = x
    # the integrand peaks near t = s - 1; split there to help the mapping
    peak = max(start, s - 1.0)
    if peak > start:
        total += integrate(f, start, peak, _LOG_QUAD).value
    total += integrate(f, peak, math.inf, _LOG_QUAD).value
    return total


def log_weighted_lower_gamma(s: float, x: float, j: int) -> float:
    """Integral of t**(s-1) e**(-t) ln(t)**j over [0, x], j in {0, 1, 2}."""
    if j not in (0, 1, 2):
        raise DomainError(f"log moment order must be 0, 1 or 2, got {j}")
    if not s > 0 or not x >= 0:
        raise DomainError(f"log_weighted_lower_gamma requires s > 0, x >= 0, got s={s}, x={x}")
    if j == 0:
        return lower_inc_gamma(s, x)
    if x > s + 1.0:
        return gamma_derivative(s, j) - log_weighted_upper_gamma(s, x, j)
    if x == 0.0:
        return 0.0

    def f(t):
        if t == 0.0:
            return 0.0
        lt = math.log(t)
        return math.exp((s - 1.0) * lt - t) * lt ** j

    mode = "open-left" if s < 1.0 else "closed"
    spec = QuadSpec(abs_tol=1e-300, rel_tol=1e-13, max_subdivisions=500, endpoint_handling=mode)
    if x <= 1.0:
        return integrate(f, 0.0, x, spec).value
    return integrate(f, 0.0, 1.0, spec).value + integrate(f, 1.0, x, _LOG_QUAD).value


def lower_gamma_log_ratio(s: float, x: float, j: int) -> float:
    """Integral of t**(s-1) e**(-t) ln(x/t)**j over [0, x], any integer j >= 0.

    With t = x e^(-w) the integrand is exp(s (ln x - w) - x e^(-w)) w^j on
    w >= 0, which is positive and smooth. No cancellation occurs, unlike
    assembling the same value from Gamma(s), psi(s) and upper log moments
    when x << s.
    """
    if int(j) != j or j < 0:
        raise DomainError(f"log moment order must be a non-negative integer, got {j}")
    if not s > 0 or not x >= 0:
        raise DomainError(f"lower_gamma_log_ratio requires s > 0, x >= 0, got s={s}, x={x}")
    if x == 0.0:
        return 0.0
    if j == 0:
        return lower_inc_gamma(s, x)
    lx = math.log(x)

    def f(w):
        return math.exp(s * (lx - w) - x * math.exp(-w)) * w ** j

    # the integrand peaks near w = ln(x/s) when x > s
    peak = max(lx - math.log(s), 0.0)
    total = integrate(f, 0.0, peak, _LOG_QUAD).value if peak > 0 else 0.0
    return total + integrate(f, peak, math.inf, _LOG_QUAD).value


def meijer_g_ln1(x: float, s: float) -> float:
    """G^{3,0}_{2,3}(x | 1,1; 0,0,s) = int_x^inf t^(s-1) e^(-t) ln(t/x) dt."""
    return log_weighted_upper_gamma(s, x, 1) - math.log(x) * upper_inc_gamma(s, x)


def meijer_g_ln2(x: float, s: float) -> float:
    """G^{4,0}_{3,4}(x | 1,1,1; 0,0,0,s) = (1/2) int_x^inf t^(s-1) e^(-t) ln(t/x)^2 dt."""
    lx = math.log(x)
    return 0.5 * (log_weighted_upper_gamma(s, x, 2)
                  - 2.0 * lx * log_weighted_upper_gamma(s, x, 1)
                  + lx * lx * upper_inc_gamma(s, x))


def gamma_derivative(s: float, j: int) -> float:
    """d^j Gamma(s) / ds^j for j in {0, 1, 2}."""
    g = math.gamma(s)
    if j == 0:
        return g
    psi = digamma(s)
    if j == 1:
        return g * psi
    if j == 2:
        return g * (psi * psi + trigamma(s))
    raise DomainError(f"derivative order must be 0, 1 or 2, got {j}")


def erf(x: float) -> float:
    return math.erf(x)


def q_function(x: float) -> float:
    """Gaussian tail probability Q(x) = 0.5 erfc(x / sqrt 2)."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def digamma(x: float) -> float:
    if not x > 0:
        raise DomainError(f"digamma requires x > 0, got {x}")
    return float(_sp.digamma(x))


def trigamma(x: float) -> float:
    if not x > 0:
        raise DomainError(f"trigamma requires x > 0, got {x}")
    return float(_sp.polygamma(1, x))


def _nonpos_int(v) -> bool:
    return _is_int(v) and v <= 0


def kummer_1f1(a: float, b: float, z: float, *, max_terms: int = 500,
               tol: float = 1e-12) -> float:
    """Confluent hypergeometric 1F1(a; b; z) by Kahan-summed power series.

    When ``a`` is a non-positive integer the series terminates after
    ``-a`` terms; this is also how a non-positive integer ``b`` is accepted
    (it must satisfy ``|a| <= |b|`` so no denominator vanishes first).
    """
    if _nonpos_int(b) and not (_nonpos_int(a) and a >= b):
        raise PoleError(f"1F1 pole: b={b} is a non-positive integer (a={a})")
    if abs(z) > 30 and not _nonpos_int(a):
        raise DomainError(f"1F1 series limited to |z| <= 30, got z={z}")
    n_stop = int(-a) if _nonpos_int(a) else None

    total, comp = 1.0, 0.0
    term = 1.0
    for n in range(max_terms):
        if n_stop is not None and n >= n_stop:
            return total
        term *= (a + n) / (b + n) * z / (n + 1)
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if n_stop is None and abs(term) <= tol * abs(total) and n > abs(z):
            return total
    if n_stop is not None:
        return total
    raise ConvergenceError(f"1F1({a}; {b}; {z}) did not converge in {max_terms} terms")
