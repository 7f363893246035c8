"""End-to-end SNR of a dual-hop link with decode-and-forward (DF) or
channel-assisted amplify-and-forward (AF) relaying."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import LinkChannel, combined_snr_cdf, combined_snr_pdf
from .errors import DomainError
from .expoly import ExpPoly
from .quadrature import QuadSpec, integrate


@dataclass(frozen=True)
class RelayPair:
    hop1: LinkChannel
    hop2: LinkChannel
    gamma0: float

    def __post_init__(self):
        if not (math.isfinite(self.gamma0) and self.gamma0 > 0):
            raise DomainError(f"gamma0 must be positive, got {self.gamma0!r}")

    def ordered(self) -> "RelayPair":
        """Same pair with the weaker support edge second (a2 <= a1).

        DF is symmetric in its hops, so swapping them changes nothing but
        lets every closed form assume the longer hop is hop 2.
        """
        if self.hop2.a <= self.hop1.a:
            return self
        return RelayPair(self.hop2, self.hop1, self.gamma0)

    @property
    def edge(self) -> float:
        """Upper end of the DF support, min(a1^2, a2^2) gamma0."""
        return min(self.hop1.a, self.hop2.a) ** 2 * self.gamma0

    @property
    def delta(self) -> float:
        """ln(a1/a2) >= 0 for an ordered pair."""
        p = self.ordered()
        return math.log(p.hop1.a / p.hop2.a)

    def with_gamma0(self, gamma0: float) -> "RelayPair":
        return RelayPair(self.hop1, self.hop2, gamma0)


def df_cdf(gamma, pair: RelayPair):
    f1 = combined_snr_cdf(gamma, pair.hop1, pair.gamma0)
    f2 = combined_snr_cdf(gamma, pair.hop2, pair.gamma0)
    return f1 + f2 - f1 * f2


def df_pdf(gamma, pair: RelayPair):
    g0 = pair.gamma0
    f1 = combined_snr_pdf(gamma, pair.hop1, g0)
    f2 = combined_snr_pdf(gamma, pair.hop2, g0)
    c1 = combined_snr_cdf(gamma, pair.hop1, g0)
    c2 = combined_snr_cdf(gamma, pair.hop2, g0)
    return f1 + f2 - f1 * c2 - f2 * c1


def hop_cdfs_in_v(pair: RelayPair) -> tuple[ExpPoly, ExpPoly]:
    """Hop CDFs as exp-polynomials of v = ln(a2 / sqrt(gamma/gamma0)).

    The pair is ordered first, so v >= 0 covers the whole DF support and
    hop 1's log gain is v + ln(a1/a2).
    """
    p = pair.ordered()
    return p.hop1.cdf_expoly().shift(p.delta), p.hop2.cdf_expoly()


def df_cdf_expoly(pair: RelayPair) -> ExpPoly:
    f1, f2 = hop_cdfs_in_v(pair)
    return f1 + f2 - f1 * f2


def af_snr(gamma1, gamma2):
    """gamma1 gamma2 / (gamma1 + gamma2 + 1)."""
    g1 = np.asarray(gamma1, dtype=float)
    g2 = np.asarray(gamma2, dtype=float)
    out = g1 * g2 / (g1 + g2 + 1.0)
    return out if out.ndim else float(out)


_AF_QUAD = QuadSpec(abs_tol=1e-300, rel_tol=1e-9, max_subdivisions=400)


def af_pdf_numeric(gamma: float, pair: RelayPair, spec: QuadSpec | None = None) -> float:
    """Density of gamma1 gamma2 / (gamma1 + gamma2) at ``gamma``.

    With t = gamma/gamma1 the density is
    gamma * int f1(gamma/t) f2(gamma/(1-t)) dt / (t^2 (1-t)^2)
    over the t range that keeps both hop SNRs inside their supports.
    It is evaluated in x = ln(t/(1-t)), where it reads
    (1/gamma) int g1 f1(g1) g2 f2(g2) dx with g1 = gamma(1+e^-x), g2 = gamma(1+e^x);
    both factors are smooth densities of log-SNR, so the rule needs no splitting.
    """
    if not gamma > 0:
        raise DomainError(f"af_pdf_numeric needs gamma > 0, got {gamma}")
    g0 = pair.gamma0
    s1, s2 = pair.hop1.support(g0), pair.hop2.support(g0)
    t_min = gamma / s1
    gap = gamma / s2   # 1 - t_max, kept apart to avoid cancellation
    if not t_min < 1.0 - gap:
        return 0.0
    x_lo = math.log(t_min) - math.log1p(-t_min)
    x_hi = math.log1p(-gap) - math.log(gap)

    def integrand(x):
        g1 = min(gamma * (1.0 + math.exp(-x)), s1)
        g2 = min(gamma * (1.0 + math.exp(x)), s2)
        return (g1 * combined_snr_pdf(g1, pair.hop1, g0)) * (g2 * combined_snr_pdf(g2, pair.hop2, g0))

    return integrate(integrand, x_lo, x_hi, spec or _AF_QUAD).value / gamma
