"""Adaptive one-dimensional quadrature.

Thin contract layer over QUADPACK (``scipy.integrate.quad``): tolerances,
endpoint substitutions and error reporting are handled here so callers get
either a converged value or an exception, never a silent warning.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple

from scipy import integrate as _integrate

from .errors import DomainError, NanIntegrandError, NotConvergedError

ENDPOINT_MODES = ("closed", "open-left", "open-right")


@dataclass(frozen=True)
class QuadSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 2000
    endpoint_handling: str = "closed"

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")
        if self.endpoint_handling not in ENDPOINT_MODES:
            raise DomainError(f"endpoint_handling must be one of {ENDPOINT_MODES}")


class QuadResult(NamedTuple):
    value: float
    error_estimate: float


DEFAULT_SPEC = QuadSpec()


def _checked(f):
    def g(x):
        y = f(x)
        if not math.isfinite(y):
            raise NanIntegrandError(x, y)
        return y

    return g


def integrate(f: Callable[[float], float], lo: float, hi: float,
              spec: QuadSpec | None = None, points=None) -> QuadResult:
    """Integrate ``f`` over ``[lo, hi]``.

    ``hi`` may be ``math.inf``; the half line is mapped onto ``[0, 1)`` with
    ``x = lo + t/(1-t)``. ``open-left`` / ``open-right`` apply the root
    substitution ``x = lo + u**2`` (resp. ``hi - u**2``), which removes an
    inverse square-root singularity at that endpoint.
    """
    spec = spec or DEFAULT_SPEC
    if not (math.isfinite(lo) and not math.isnan(hi)) or not lo < hi:
        raise DomainError(f"need finite lo < hi, got [{lo}, {hi}]")
    g = _checked(f)

    if math.isinf(hi):
        if spec.endpoint_handling == "open-left":
            # x = lo + (t/(1-t))**2
            def h(t):
                if t >= 1.0:
                    return 0.0
                s = t / (1.0 - t)
                return g(lo + s * s) * 2.0 * s / (1.0 - t) ** 2
        else:
            def h(t):
                if t >= 1.0:
                    return 0.0
                return g(lo + t / (1.0 - t)) / (1.0 - t) ** 2
        a, b, pts = 0.0, 1.0, None
    elif spec.endpoint_handling == "open-left":
        def h(u):
            return g(lo + u * u) * 2.0 * u
        a, b = 0.0, math.sqrt(hi - lo)
        pts = None if points is None else [math.sqrt(p - lo) for p in points if lo < p < hi]
    elif spec.endpoint_handling == "open-right":
        def h(u):
            return g(hi - u * u) * 2.0 * u
        a, b = 0.0, math.sqrt(hi - lo)
        pts = None if points is None else [math.sqrt(hi - p) for p in points if lo < p < hi]
    else:
        h, a, b = g, lo, hi
        pts = None if points is None else [p for p in points if lo < p < hi]

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _integrate.IntegrationWarning)
        value, err, info, *rest = _integrate.quad(
            h, a, b, epsabs=spec.abs_tol, epsrel=spec.rel_tol,
            limit=spec.max_subdivisions, points=pts or None, full_output=1)
    # a trailing message is only returned when QUADPACK flags a problem
    if rest and err > max(spec.abs_tol, spec.rel_tol * abs(value)):
        raise NotConvergedError(
            f"quadrature on [{lo}, {hi}] did not converge: value={value:.6g}, "
            f"error estimate={err:.3g}, neval={info['neval']}")
    return QuadResult(float(value), float(err))
