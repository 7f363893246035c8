"""Per-hop channel laws: random fog, pointing errors, EW turbulence, and the
combined SNR density/distribution of one optical hop.

Distances are in km and the fog scale in dB/km, so the fog exponent
z = 4.343 / (beta * d) is dimensionless.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import special as _sp

from .errors import DegenerateParameterError, DomainError, SingularityError
from .expoly import ExpPoly

DB_PER_NEPER = 4.343  # 10 / ln(10), as printed in the attenuation model

# (k, beta [dB/km]) per fog class
FOG_CLASSES = {
    "light": (2.32, 13.12),
    "moderate": (5.49, 12.06),
    "thick": (6.0, 23.0),
}


class Mode(str, Enum):
    FP = "FP"     # fog + pointing errors (exact law)
    FPT = "FPT"   # fog + pointing errors + turbulence (asymptotic law)
    PT = "PT"     # deterministic path loss + pointing errors + turbulence


@dataclass(frozen=True)
class FogParams:
    k: float
    beta: float
    d: float

    def __post_init__(self):
        for name in ("k", "beta", "d"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise DomainError(f"FogParams.{name} must be positive, got {v!r}")

    @classmethod
    def from_class(cls, tag: str, d: float, k: float | None = None) -> "FogParams":
        try:
            k0, beta = FOG_CLASSES[tag]
        except KeyError:
            raise DomainError(f"unknown fog class {tag!r}; expected one of {sorted(FOG_CLASSES)}") from None
        return cls(k=k0 if k is None else k, beta=beta, d=d)

    @property
    def z(self) -> float:
        return DB_PER_NEPER / (self.beta * self.d)


@dataclass(frozen=True)
class PointingParams:
    """Receiver aperture radius ``a_r``, beamwidth ``w_z`` and jitter, all in metres.

    ``sigma_x``/``sigma_y`` default to ``sigma_s``; ``mu_x``/``mu_y`` are
    boresight offsets used by the Beckmann model. ``w_zeq`` overrides the
    equivalent beamwidth computed from ``w_z``.
    """
    a_r: float
    w_z: float
    sigma_s: float
    mu_x: float = 0.0
    mu_y: float = 0.0
    sigma_x: float | None = None
    sigma_y: float | None = None
    w_zeq_override: float | None = None

    def __post_init__(self):
        for name in ("a_r", "w_z", "sigma_s"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"PointingParams.{name} must be positive, got {v!r}")
        for name in ("sigma_x", "sigma_y", "w_zeq_override"):
            v = getattr(self, name)
            if v is not None and not (math.isfinite(v) and v > 0):
                raise DomainError(f"PointingParams.{name} must be positive, got {v!r}")

    @classmethod
    def from_normalized(cls, w_z_over_ar: float, sigma_s_over_ar: float,
                        a_r: float = 0.05, **kw) -> "PointingParams":
        return cls(a_r=a_r, w_z=w_z_over_ar * a_r, sigma_s=sigma_s_over_ar * a_r, **kw)

    @property
    def upsilon(self) -> float:
        return math.sqrt(math.pi / 2.0) * self.a_r / self.w_z

    @property
    def a0(self) -> float:
        return math.erf(self.upsilon) ** 2

    @property
    def w_zeq(self) -> float:
        if self.w_zeq_override is not None:
            return self.w_zeq_override
        v = self.upsilon
        return self.w_z * math.sqrt(math.sqrt(math.pi) * math.erf(v) / (2.0 * v * math.exp(-v * v)))

    @property
    def rho(self) -> float:
        return self.w_zeq / (2.0 * self.sigma_s)

    @property
    def jitter_x(self) -> float:
        return self.sigma_s if self.sigma_x is None else self.sigma_x

    @property
    def jitter_y(self) -> float:
        return self.sigma_s if self.sigma_y is None else self.sigma_y


@dataclass(frozen=True)
class TurbulenceParams:
    alpha_t: float
    beta_t: float
    eta_t: float

    def __post_init__(self):
        for name in ("alpha_t", "beta_t", "eta_t"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"TurbulenceParams.{name} must be positive, got {v!r}")


DEFAULT_TURBULENCE = TurbulenceParams(alpha_t=3.02, beta_t=2.80, eta_t=0.84)


# -- marginal laws ---------------------------------------------------------

def fog_pdf(h_f, p: FogParams):
    h = np.asarray(h_f, dtype=float)
    if np.any((h <= 0) | (h > 1)):
        raise DomainError("fog gain must lie in (0, 1]")
    t = -np.log(h)
    with np.errstate(divide="ignore"):
        logf = (p.k * math.log(p.z) - math.lgamma(p.k)
                + (p.k - 1.0) * np.log(t) + (p.z - 1.0) * np.log(h))
    out = np.where(t > 0, np.exp(logf), 0.0 if p.k > 1 else (p.z if p.k == 1 else np.inf))
    return out if out.ndim else float(out)


def fog_cdf(h_f, p: FogParams):
    h = np.clip(np.asarray(h_f, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore"):
        t = -np.log(h)
    out = _sp.gammaincc(p.k, p.z * t)
    return out if out.ndim else float(out)


def pointing_pdf(h_p, p: PointingParams):
    h = np.asarray(h_p, dtype=float)
    a0, r2 = p.a0, p.rho ** 2
    if np.any((h < 0) | (h > a0 * (1 + 1e-12))):
        raise DomainError(f"pointing gain must lie in [0, A0={a0:.6g}]")
    out = r2 / a0 ** r2 * h ** (r2 - 1.0)
    return out if out.ndim else float(out)


def pointing_cdf(h_p, p: PointingParams):
    u = np.clip(np.asarray(h_p, dtype=float) / p.a0, 0.0, 1.0)
    out = u ** (p.rho ** 2)
    return out if out.ndim else float(out)


def ew_turbulence_pdf(h_t, p: TurbulenceParams):
    h = np.asarray(h_t, dtype=float)
    if np.any(h < 0):
        raise DomainError("turbulence gain must be non-negative")
    x = (h / p.eta_t) ** p.beta_t
    e = np.exp(-x)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (p.alpha_t * p.beta_t / p.eta_t * (h / p.eta_t) ** (p.beta_t - 1.0)
               * e * (-np.expm1(-x)) ** (p.alpha_t - 1.0))
    # near h = 0 the density behaves like h**(alpha*beta - 1)
    ab = p.alpha_t * p.beta_t
    at_zero = 0.0 if ab > 1 else (ab / p.eta_t if ab == 1 else np.inf)
    out = np.where(h > 0, out, at_zero)
    return out if out.ndim else float(out)


def ew_turbulence_cdf(h_t, p: TurbulenceParams):
    h = np.maximum(np.asarray(h_t, dtype=float), 0.0)
    out = (-np.expm1(-(h / p.eta_t) ** p.beta_t)) ** p.alpha_t
    return out if out.ndim else float(out)


def beckmann_mgf(t: float, p: PointingParams) -> float:
    """MGF of the squared radial displacement r**2 = x**2 + y**2."""
    sx2, sy2 = p.jitter_x ** 2, p.jitter_y ** 2
    dx, dy = 1.0 - 2.0 * t * sx2, 1.0 - 2.0 * t * sy2
    if dx <= 0 or dy <= 0:
        raise SingularityError(f"Beckmann MGF undefined at t={t:.6g} (1-2t*sigma^2 = {min(dx, dy):.3g})")
    return math.exp(p.mu_x ** 2 * t / dx + p.mu_y ** 2 * t / dy) / math.sqrt(dx * dy)


# -- combined per-hop law --------------------------------------------------

@dataclass(frozen=True)
class LinkChannel:
    """One hop's combined-channel constants.

    The SNR has support (0, a**2 gamma0]. In the log-gain variable
    u = ln(a / sqrt(gamma/gamma0)) the CDF is exp-polynomial for integer k.
    """
    mode: Mode
    a: float
    phi: float
    z: float
    k: float
    m: float = field(init=False)
    c1: float = field(init=False)
    c2: float = field(init=False)
    d1: float = field(init=False)
    d2: float = field(init=False)

    def __post_init__(self):
        for name in ("a", "phi", "z", "k"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"LinkChannel.{name} must be positive, got {v!r}")
        phi2 = self.phi ** 2
        m = self.z - phi2
        if abs(m) < 1e-9:
            raise DegenerateParameterError(
                f"m = z - phi^2 = {m:.3g} vanishes (z={self.z:.6g}, phi^2={phi2:.6g})")
        set_ = object.__setattr__
        set_(self, "m", m)
        if m < 0 and not self.integer_k:
            # (z/m)^k is complex; only the real-k evaluators (which avoid
            # these constants) apply
            for name in ("c1", "c2", "d1", "d2"):
                set_(self, name, math.nan)
            return
        ratio_k = _signed_power(self.z / m, self.k)
        # C1 = z^k phi^2 / (2 m^k a^phi^2); (z/m)^k is real for integer k even if m < 0
        set_(self, "c1", ratio_k * phi2 / (2.0 * self.a ** phi2))
        set_(self, "c2", self.c1 / math.gamma(self.k))
        set_(self, "d1", ratio_k)
        set_(self, "d2", ratio_k * phi2 / math.gamma(self.k))

    @property
    def integer_k(self) -> bool:
        return float(self.k).is_integer()

    @property
    def phi2(self) -> float:
        return self.phi ** 2

    def support(self, gamma0: float) -> float:
        return self.a * self.a * gamma0

    def log_gain(self, gamma, gamma0: float):
        """u = ln(a / sqrt(gamma/gamma0)) = 0.5 ln(a^2 gamma0 / gamma)."""
        return 0.5 * np.log(self.a * self.a * gamma0 / np.asarray(gamma, dtype=float))

    # exp-polynomial pieces in u (integer k only)
    def cdf_parts(self) -> tuple[ExpPoly, ExpPoly]:
        """(D1 e^{-phi^2 u}, D2 (k-1)! sum_i m^i z^{-i-1}/i! Gamma(i+1, z u)); CDF = first - second."""
        k = self._require_integer_k()
        first = ExpPoly({(0, self.phi2): self.d1})
        acc: dict = {}
        fk = math.factorial(k - 1)
        for i in range(k):
            for j in range(i + 1):
                c = self.d2 * fk * self.m ** i * self.z ** (j - i - 1) / math.factorial(j)
                acc[(j, self.z)] = acc.get((j, self.z), 0.0) + c
        return first, ExpPoly(acc)

    def cdf_expoly(self) -> ExpPoly:
        first, second = self.cdf_parts()
        return first - second

    def density_parts(self) -> tuple[ExpPoly, ExpPoly]:
        """Density of u split as (C1 part, C2 part); density = first - second.

        The C2 part carries Gamma(k, m u) e^{-phi^2 u}, rewritten through the
        finite series as (k-1)! e^{-z u} sum_j (m u)^j / j!.
        """
        k = self._require_integer_k()
        scale = 2.0 * self.c1 * self.a ** self.phi2   # = (z/m)^k phi^2
        first = ExpPoly({(0, self.phi2): scale})
        second = ExpPoly({(j, self.z): scale * self.m ** j / math.factorial(j) for j in range(k)})
        return first, second

    def _require_integer_k(self) -> int:
        if not self.integer_k:
            raise DomainError(f"closed form needs integer fog shape k, got {self.k}")
        return int(self.k)


def damped_fog_integral(link: "LinkChannel", u):
    """e^(-phi^2 u) int_0^u x^(k-1) e^(-m x) dx for real k > 0 and either sign of m.

    For m < 0 the Kummer transformation rewrites it as
    e^(-z u) u^k / k 1F1(1; k+1; -|m| u), which stays bounded where the
    plain series would overflow.
    """
    u = np.asarray(u, dtype=float)
    k, m = link.k, link.m
    if m > 0:
        return np.exp(-link.phi2 * u) * _sp.gammainc(k, m * u) * math.exp(math.lgamma(k) - k * math.log(m))
    with np.errstate(invalid="ignore", over="ignore"):
        out = np.exp(-link.z * u) * u ** k / k * _sp.hyp1f1(1.0, k + 1.0, m * u)
    return np.where(np.isinf(u), 0.0, out)


def real_k_cdf_in_u(link: "LinkChannel", u):
    """Pr[gamma <= gamma(u)] for any real k > 0.

    The total log-loss is X + Y, X ~ Gamma(k, rate z) from fog and
    Y ~ Exp(phi^2) from the power-law fade, so
    F = Q(k, z u) + e^(-phi^2 u) z^k / Gamma(k) I(u).
    """
    u = np.asarray(u, dtype=float)
    k, z = link.k, link.z
    tail = _sp.gammaincc(k, z * u)
    return tail + math.exp(k * math.log(z) - math.lgamma(k)) * damped_fog_integral(link, u)


def _signed_power(x: float, k: float) -> float:
    if x > 0:
        return x ** k
    if float(k).is_integer():
        return x ** int(k)
    raise DomainError(f"(z/m)^k is complex for m < 0 and non-integer k={k}")


def build_link(mode, fog: FogParams, point: PointingParams,
               turb: TurbulenceParams | None = None) -> LinkChannel:
    mode = Mode(mode)
    if mode is Mode.FP:
        a, phi = point.a0, point.rho
    elif mode is Mode.FPT:
        if turb is None:
            raise DomainError("FPT mode needs turbulence parameters")
        a, phi = turbulence_pointing_params(point, turb)
    else:
        raise DomainError("PT mode has no random fog; use deterministic_link")
    return LinkChannel(mode=mode, a=a, phi=phi, z=fog.z, k=fog.k)


def turbulence_pointing_params(point: PointingParams, turb: TurbulenceParams) -> tuple[float, float]:
    """(a, phi) of the asymptotic pointing-plus-turbulence power law."""
    ab = turb.alpha_t * turb.beta_t
    mgf = beckmann_mgf(2.0 * ab / point.w_zeq ** 2, point)
    return turb.eta_t * point.a0 / mgf ** (1.0 / ab), math.sqrt(ab)


@dataclass(frozen=True)
class PowerLawLink:
    """Deterministic path gain ``loss`` times an asymptotic power-law fade on (0, a]."""
    a: float
    phi: float
    loss: float = 1.0

    @property
    def edge(self) -> float:
        return self.a * self.loss

    def pdf(self, gamma, gamma0: float):
        g = np.asarray(gamma, dtype=float)
        top = self.edge ** 2 * gamma0
        p2 = self.phi ** 2
        with np.errstate(divide="ignore"):
            out = np.where((g > 0) & (g <= top), p2 / (2.0 * g) * (g / top) ** (p2 / 2.0), 0.0)
        return out if out.ndim else float(out)

    def cdf(self, gamma, gamma0: float):
        g = np.clip(np.asarray(gamma, dtype=float), 0.0, None)
        out = np.minimum(g / (self.edge ** 2 * gamma0), 1.0) ** (self.phi ** 2 / 2.0)
        return out if out.ndim else float(out)


def deterministic_link(point: PointingParams, turb: TurbulenceParams, psi: float, d: float) -> PowerLawLink:
    if psi < 0 or d <= 0:
        raise DomainError(f"need psi >= 0 and d > 0, got psi={psi}, d={d}")
    a, phi = turbulence_pointing_params(point, turb)
    return PowerLawLink(a=a, phi=phi, loss=math.exp(-psi * d))


# -- vectorised SNR law ----------------------------------------------------

def combined_snr_pdf(gamma, link: LinkChannel, gamma0: float):
    g = np.asarray(gamma, dtype=float)
    if np.any(g <= 0):
        raise DomainError("combined_snr_pdf needs gamma > 0")
    inside = g <= link.support(gamma0)
    u = np.asarray(link.log_gain(np.where(inside, g, link.support(gamma0)), gamma0), dtype=float)
    if link.integer_k:
        scale = link.c1 * link.a ** link.phi2
        k = int(link.k)
        mu = link.m * u
        series = np.zeros_like(u)
        term = np.ones_like(u)
        for j in range(k):
            if j:
                term = term * mu / j
            series = series + term
        bracket = np.exp(-link.phi2 * u) - np.exp(-link.z * u) * series
    else:
        # density of the log-loss X + Y, then d u / d gamma = 1 / (2 gamma)
        scale = 0.5 * link.phi2 * math.exp(link.k * math.log(link.z) - math.lgamma(link.k))
        bracket = damped_fog_integral(link, u)
    out = np.where(inside, scale * bracket / g, 0.0)
    return out if out.ndim else float(out)


def combined_snr_cdf(gamma, link: LinkChannel, gamma0: float):
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0):
        raise DomainError("combined_snr_cdf needs gamma >= 0")
    poly = link.cdf_expoly()
    inside = (g > 0) & (g < link.support(gamma0))
    safe = np.where(inside, g, link.support(gamma0))
    u = link.log_gain(safe, gamma0)
    out = np.where(inside, poly(u), np.where(g > 0, 1.0, 0.0))
    out = np.clip(out, 0.0, 1.0)
    return out if out.ndim else float(out)
