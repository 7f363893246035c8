"""Exponential polynomials  sum_i c_i v**p_i exp(-lam_i v)  on v >= 0.

With integer fog shape k every per-hop CDF is such a sum in the log-gain
variable u = ln(a / sqrt(gamma/gamma0)), and so are the DF products of two
hops. Averages over the end-to-end SNR then reduce to Laplace-type moments
of these sums, which this module evaluates term by term.
"""
from __future__ import annotations

import math
from collections import defaultdict

import numpy as np

from . import specfun
from .errors import DomainError


class ExpPoly:
    __slots__ = ("terms",)

    def __init__(self, terms=None):
        # {(power, rate): coefficient}
        self.terms: dict[tuple[int, float], float] = {}
        if terms:
            for (p, lam), c in dict(terms).items():
                if c != 0.0:
                    self.terms[(int(p), float(lam))] = self.terms.get((int(p), float(lam)), 0.0) + c

    @classmethod
    def constant(cls, c: float) -> "ExpPoly":
        return cls({(0, 0.0): c})

    def __repr__(self):
        body = " + ".join(f"{c:.6g}*v^{p}*e^(-{lam:.6g}v)" for (p, lam), c in self.terms.items())
        return f"ExpPoly({body or '0'})"

    def __call__(self, v):
        v = np.asarray(v, dtype=float)
        out = np.zeros_like(v)
        for (p, lam), c in self.terms.items():
            out = out + c * v ** p * np.exp(-lam * v)
        return out if out.ndim else float(out)

    def __add__(self, other):
        if not isinstance(other, ExpPoly):
            other = ExpPoly.constant(float(other))
        acc = defaultdict(float, self.terms)
        for key, c in other.terms.items():
            acc[key] += c
        return ExpPoly(acc)

    __radd__ = __add__

    def __neg__(self):
        return ExpPoly({key: -c for key, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, ExpPoly):
            return ExpPoly({key: c * other for key, c in self.terms.items()})
        acc = defaultdict(float)
        for (p1, l1), c1 in self.terms.items():
            for (p2, l2), c2 in other.terms.items():
                acc[(p1 + p2, l1 + l2)] += c1 * c2
        return ExpPoly(acc)

    __rmul__ = __mul__

    def shift(self, delta: float) -> "ExpPoly":
        """Return v -> self(v + delta)."""
        acc = defaultdict(float)
        for (p, lam), c in self.terms.items():
            scale = c * math.exp(-lam * delta)
            for q in range(p + 1):
                acc[(q, lam)] += scale * math.comb(p, q) * delta ** (p - q)
        return ExpPoly(acc)

    def derivative(self) -> "ExpPoly":
        acc = defaultdict(float)
        for (p, lam), c in self.terms.items():
            if p:
                acc[(p - 1, lam)] += c * p
            acc[(p, lam)] -= c * lam
        return ExpPoly(acc)

    def laplace(self, s: float = 0.0) -> float:
        """int_0^inf exp(-s v) self(v) dv."""
        total = 0.0
        for (p, lam), c in self.terms.items():
            rate = lam + s
            if not rate > 0:
                raise DomainError(f"divergent term v^{p} exp(-{rate} v)")
            total += c * math.factorial(p) / rate ** (p + 1)
        return total

    def gaussian_kernel_moment(self, big_t: float) -> float:
        """sum_i c_i T**(-lam_i/2) 2**(-p_i) J_{p_i}((lam_i + 1)/2, T).

        J_p(s, T) = int_0^T t^(s-1) e^(-t) ln(T/t)^p dt. This is the
        image of the sum under the average-BER kernel once the SNR is written
        as gamma = (2T/B) exp(-2v); see ``analytic.avg_ber``.
        """
        lt = math.log(big_t)
        total = 0.0
        for (p, lam), c in self.terms.items():
            jp = specfun.lower_gamma_log_ratio(0.5 * (lam + 1.0), big_t, p)
            total += c * math.exp(-0.5 * lam * lt) * 0.5 ** p * jp
        return total
