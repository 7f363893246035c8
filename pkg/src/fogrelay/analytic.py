"""Closed-form performance metrics of the dual-hop DF link.

Every metric is evaluated term group by term group, in one of three forms:

``"corrected"``  the printed closed form with its known defects patched
                 (``fogrelay.transcribed`` with ``corrected=True``);
``"literal"``    the printed closed form exactly as written;
``"expansion"``  each group expanded as an exponential polynomial in the
                 log-gain variable and integrated exactly.

The corrected and expansion forms agree group by group to rounding, which is
how the defects were located. Group names are stable so a failing or
diverging group can be named in diagnostics.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Literal

from . import specfun
from .channel import LinkChannel, PointingParams, PowerLawLink, TurbulenceParams, turbulence_pointing_params
from .errors import DomainError, FogRelayError, TermError
from . import transcribed
from .expoly import ExpPoly
from .relay import RelayPair

Form = Literal["corrected", "literal", "expansion"]
FORMS = ("corrected", "literal", "expansion")

LOG2_E_OVER_2PI = math.log2(math.e / (2.0 * math.pi))
INV_LN2 = 1.0 / math.log(2.0)


class ThresholdAboveSupportWarning(UserWarning):
    """The outage threshold exceeds a^2 gamma0, so the hop is always in outage."""


@dataclass(frozen=True)
class OOK:
    A: float = 1.0
    B: float = 0.5


@dataclass(frozen=True)
class MetricResult:
    value: float
    terms: dict = field(default_factory=dict)

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class DeterministicPathLoss:
    """Fixed fog attenuation exp(-psi d); psi in 1/km, d in km."""
    psi: float
    d: float

    def __post_init__(self):
        if not (self.psi >= 0 and self.d > 0):
            raise DomainError(f"need psi >= 0 and d > 0, got psi={self.psi}, d={self.d}")

    @property
    def direct_gain(self) -> float:
        return math.exp(-self.psi * self.d)

    @property
    def relayed_gain(self) -> float:
        return math.exp(-self.psi * self.d / 2.0)


@dataclass(frozen=True)
class DiversityOrder:
    value: float
    limiter: str


def _guard(name, fn, *args):
    try:
        return fn(*args)
    except TermError:
        raise
    except (FogRelayError, ArithmeticError, ValueError) as exc:
        raise TermError(name, exc) from exc


def _total(terms: dict, extra: float = 0.0) -> MetricResult:
    return MetricResult(math.fsum(terms.values()) + extra, dict(terms))


def _check_form(form: str) -> str:
    if form not in FORMS:
        raise ValueError(f"form must be one of {FORMS}, got {form!r}")
    return form


# -- outage ----------------------------------------------------------------

def outage_per_hop(link: LinkChannel, gamma0: float, gamma_th: float) -> float:
    """Per-hop outage as a finite double sum in ln(a sqrt(gamma0/gamma_th))."""
    if not gamma_th > 0:
        raise DomainError(f"gamma_th must be positive, got {gamma_th}")
    ratio = link.a * link.a * gamma0 / gamma_th
    if ratio <= 1.0:
        if ratio < 1.0:
            warnings.warn(ThresholdAboveSupportWarning(
                f"gamma_th={gamma_th:.4g} exceeds the support edge {link.a**2 * gamma0:.4g}"), stacklevel=2)
        return 1.0
    k = link._require_integer_k()
    lg = 0.5 * math.log(ratio)
    acc = 0.0
    for i in range(k):
        for j in range(i + 1):
            acc += link.m ** i * link.z ** (j - i - 1) * lg ** j / math.factorial(j)
    p = (link.d1 * ratio ** (-link.phi2 / 2.0)
         - link.d2 * math.factorial(k - 1) * ratio ** (-link.z / 2.0) * acc)
    return min(max(p, 0.0), 1.0)


def outage_df(pair: RelayPair, gamma_th: float) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ThresholdAboveSupportWarning)
        p1 = outage_per_hop(pair.hop1, pair.gamma0, gamma_th)
        p2 = outage_per_hop(pair.hop2, pair.gamma0, gamma_th)
    return p1 + p2 - p1 * p2


def diversity_order(pair: RelayPair) -> DiversityOrder:
    """Half the smallest of (phi1^2, phi2^2, z1, z2); ties go to the earlier entry."""
    cands = [("pointing_hop1", pair.hop1.phi2), ("pointing_hop2", pair.hop2.phi2),
             ("fog_hop1", pair.hop1.z), ("fog_hop2", pair.hop2.z)]
    name, val = min(cands, key=lambda c: c[1])
    return DiversityOrder(0.5 * val, name)


# -- term groups of the DF law in v = ln(a2 / sqrt(gamma/gamma0)) ----------

AVG_SNR_GROUPS = ("C1(1)", "C1(2)", "C2(1)", "C2(2)",
                  "C1(1)D2(1)", "C1(1)D2(2)", "C1(2)D2(1)", "C1(2)D2(2)",
                  "C2(1)D1(1)", "C2(1)D1(2)", "C2(2)D1(1)", "C2(2)D1(2)")
SYMMETRIC_GROUPS = ("C(1)", "C(2)", "C(1)D(1)", "C(1)D(2)", "C(2)D(1)", "C(2)D(2)")
BER_GROUPS = ("D1(1)", "D1(2)", "D2(1)", "D2(2)",
              "D1(1)D2(1)", "D1(1)D2(2)", "D1(2)D2(1)", "D1(2)D2(2)")


def _hop_pieces(pair: RelayPair):
    """Signed density and CDF pieces of both hops as functions of v.

    Returns ((dens1, dens2), (cdf1, cdf2)) where each entry is a pair of
    signed ExpPolys (first piece, minus second piece).
    """
    p = pair.ordered()
    delta = p.delta
    out_d, out_c = [], []
    for hop, shift in ((p.hop1, delta), (p.hop2, 0.0)):
        d1, d2 = hop.density_parts()
        c1, c2 = hop.cdf_parts()
        out_d.append((d1.shift(shift), -(d2.shift(shift))))
        out_c.append((c1.shift(shift), -(c2.shift(shift))))
    return out_d, out_c


def density_groups(pair: RelayPair) -> dict[str, ExpPoly]:
    """The twelve signed pieces of f1 + f2 - f1 F2 - f2 F1 as densities in v."""
    (f1, f2), (F1, F2) = _hop_pieces(pair)
    g = {
        "C1(1)": f1[0], "C1(2)": f1[1], "C2(1)": f2[0], "C2(2)": f2[1],
    }
    for a, name_a in ((0, "C1(1)"), (1, "C1(2)")):
        for b, name_b in ((0, "D2(1)"), (1, "D2(2)")):
            g[name_a + name_b] = -(f1[a] * F2[b])
    for a, name_a in ((0, "C2(1)"), (1, "C2(2)")):
        for b, name_b in ((0, "D1(1)"), (1, "D1(2)")):
            g[name_a + name_b] = -(f2[a] * F1[b])
    return {name: g[name] for name in AVG_SNR_GROUPS}


def cdf_groups(pair: RelayPair) -> dict[str, ExpPoly]:
    """The eight signed pieces of F1 + F2 - F1 F2 as functions of v."""
    _, (F1, F2) = _hop_pieces(pair)
    g = {"D1(1)": F1[0], "D1(2)": F1[1], "D2(1)": F2[0], "D2(2)": F2[1]}
    for a, na in ((0, "D1(1)"), (1, "D1(2)")):
        for b, nb in ((0, "D2(1)"), (1, "D2(2)")):
            g[na + nb] = -(F1[a] * F2[b])
    return {name: g[name] for name in BER_GROUPS}


_V = ExpPoly({(1, 0.0): 1.0})


def _snr_moment(poly: ExpPoly, big_g: float) -> float:
    # E[gamma] contribution: int G e^{-2v} q(v) dv
    return big_g * poly.laplace(2.0)


def _rate_moment(poly: ExpPoly, big_g: float) -> float:
    # contribution to E[log2 gamma]: int (ln G - 2 v) q(v) dv / ln 2
    return INV_LN2 * (math.log(big_g) * poly.laplace(0.0) - 2.0 * (_V * poly).laplace(0.0))


# -- average SNR and ergodic rate ------------------------------------------

def avg_snr_general(pair: RelayPair, form: Form = "corrected") -> MetricResult:
    if _check_form(form) != "expansion":
        return _total(transcribed.avg_snr_general_terms(pair, corrected=form == "corrected"))
    big_g = pair.edge
    terms = {n: _guard(n, _snr_moment, q, big_g) for n, q in density_groups(pair).items()}
    return _total(terms)


def ergodic_rate_general(pair: RelayPair, form: Form = "corrected") -> MetricResult:
    """Lower bound E[log2((e/2pi) gamma)] on the ergodic rate, bits/s/Hz."""
    if _check_form(form) != "expansion":
        terms = transcribed.ergodic_rate_general_terms(pair, corrected=form == "corrected")
        return _total(terms, LOG2_E_OVER_2PI)
    big_g = pair.edge
    terms = {n: _guard(n, _rate_moment, q, big_g) for n, q in density_groups(pair).items()}
    return _total(terms, LOG2_E_OVER_2PI)


def _symmetric_groups(link: LinkChannel, gamma0: float) -> dict[str, ExpPoly]:
    pair = RelayPair(link, link, gamma0)
    g = density_groups(pair)
    # f - fF counted twice: hop-1 and hop-2 pieces coincide
    return {
        "C(1)": 2 * g["C1(1)"], "C(2)": 2 * g["C1(2)"],
        "C(1)D(1)": 2 * g["C1(1)D2(1)"], "C(1)D(2)": 2 * g["C1(1)D2(2)"],
        "C(2)D(1)": 2 * g["C1(2)D2(1)"], "C(2)D(2)": 2 * g["C1(2)D2(2)"],
    }


def avg_snr_symmetric(link: LinkChannel, gamma0: float, form: Form = "corrected") -> MetricResult:
    """Relay at the midpoint, identical hops; ``link`` is one hop (length d/2)."""
    if _check_form(form) != "expansion":
        return _total(transcribed.avg_snr_symmetric_terms(link, gamma0, corrected=form == "corrected"))
    big_g = link.support(gamma0)
    return _total({n: _guard(n, _snr_moment, q, big_g)
                   for n, q in _symmetric_groups(link, gamma0).items()})


def ergodic_rate_symmetric(link: LinkChannel, gamma0: float, form: Form = "corrected") -> MetricResult:
    if _check_form(form) != "expansion":
        terms = transcribed.ergodic_rate_symmetric_terms(link, gamma0, corrected=form == "corrected")
        return _total(terms, LOG2_E_OVER_2PI)
    big_g = link.support(gamma0)
    return _total({n: _guard(n, _rate_moment, q, big_g)
                   for n, q in _symmetric_groups(link, gamma0).items()}, LOG2_E_OVER_2PI)


def single_hop_metrics(link: LinkChannel, gamma0: float, ook: OOK = OOK()) -> dict[str, float]:
    """Average SNR, rate lower bound and BER of one hop without relaying."""
    big_g = link.support(gamma0)
    first, second = link.density_parts()
    dens = first - second
    pref = ook.A / (2.0 * math.sqrt(math.pi))
    ber = pref * link.cdf_expoly().gaussian_kernel_moment(ook.B * big_g / 2.0)
    return {
        "avg_snr": _guard("density", _snr_moment, dens, big_g),
        "ergodic_rate": LOG2_E_OVER_2PI + _guard("density", _rate_moment, dens, big_g),
        "ber": ber + ber_boundary_term(big_g, ook),
    }


def _require_k2(link: LinkChannel):
    if link.k != 2:
        raise DomainError(f"this closed form is specific to k = 2, got k={link.k}")


def avg_snr_k2(link: LinkChannel, gamma0: float) -> MetricResult:
    """Symmetric DF average SNR for k = 2 as a direct term plus a (negative) correction."""
    _require_k2(link)
    a, p2, z = link.a, link.phi2, link.z
    scale = 2.0 * (a * link.phi * z) ** 2 * gamma0
    direct = scale / ((2.0 + p2) * (2.0 + z) ** 2)
    corr = -scale * (2.0 * (1.0 + z) ** 3 + p2 * p2 * (1.0 + 2.0 * z) + p2 * (3.0 + 4.0 * z * (2.0 + z))) / (
        4.0 * (1.0 + p2) * (1.0 + z) ** 3 * (2.0 + p2 + z) ** 2)
    return MetricResult(direct + corr, {"direct": direct, "correction": corr})


def ergodic_rate_k2(link: LinkChannel, gamma0: float, form: Form = "corrected") -> MetricResult:
    """Symmetric DF rate lower bound for k = 2.

    The printed form rounds 1/(4 ln 2) = 0.3607 to 0.36; only ``"literal"``
    keeps the rounding.
    """
    _require_k2(link)
    a, p2, z = link.a, link.phi2, link.z
    c = 0.36 if _check_form(form) == "literal" else 0.25 * INV_LN2
    lead = (p2 * z * (2.0 * math.log(a) + math.log(gamma0)) - 2.0 * (2.0 * p2 + z)) / (p2 * z * math.log(2.0))
    tail = -c * (p2 * (p2 + z) ** -2 - 2.0 / p2 - 5.0 / z - 3.0 / (p2 + z)
                 + 4.0 * math.log(a) + 2.0 * math.log(gamma0))
    return MetricResult(LOG2_E_OVER_2PI + 2.0 * (lead + tail),
                        {"lead": 2.0 * lead, "tail": 2.0 * tail})


# -- deterministic path loss -----------------------------------------------

def deterministic_metrics(point: PointingParams, turb: TurbulenceParams, pl: DeterministicPathLoss,
                          gamma0: float, relayed: bool) -> dict:
    """Average SNR and rate lower bound without random fog.

    Relayed: symmetric DF over two d/2 hops with gain exp(-psi d/2) each.
    Direct: one hop of length d with gain exp(-psi d).
    """
    a, phi = turbulence_pointing_params(point, turb)
    return power_law_metrics(a, phi, pl, gamma0, relayed)


def power_law_metrics(a: float, phi: float, pl: DeterministicPathLoss, gamma0: float, relayed: bool) -> dict:
    p2 = phi * phi
    if relayed:
        e = a * pl.relayed_gain
        snr = e * e * p2 * p2 * gamma0 / (2.0 + 3.0 * p2 + p2 * p2)
        rate = LOG2_E_OVER_2PI + INV_LN2 * (p2 * math.log(e * e * gamma0) - 3.0) / p2
    else:
        e = a * pl.direct_gain
        snr = p2 * e * e * gamma0 / (2.0 + p2)
        rate = LOG2_E_OVER_2PI + 2.0 / (math.log(4.0) * p2) * (-2.0 + p2 * math.log(e * e * gamma0))
    return {"avg_snr": snr, "ergodic_rate": rate}


# -- average BER ------------------------------------------------------------

def ber_boundary_term(edge: float, ook: OOK) -> float:
    """A Q(sqrt(B G)): BER mass from SNRs at the support edge G.

    Integrating -P_e'(gamma) F(gamma) only up to G leaves out P_e(G); it is
    negligible at high SNR but restores the no-signal limit A/2.
    """
    return ook.A * specfun.q_function(math.sqrt(ook.B * edge))


def avg_ber_k2(pair: RelayPair, ook: OOK = OOK(), form: Form = "corrected") -> MetricResult:
    """Average OOK BER of the DF link for fog shape k = 2.

    The literal form integrates only up to the support edge and so lacks the
    ``boundary`` group; the other forms include it.
    """
    p = pair.ordered()
    _require_k2(p.hop1)
    _require_k2(p.hop2)
    if _check_form(form) == "expansion":
        return avg_ber_integer_k(p, ook)
    terms = transcribed.avg_ber_k2_terms(p, ook, corrected=form == "corrected")
    if form == "corrected":
        terms["boundary"] = ber_boundary_term(p.edge, ook)
    return _total(terms)


def avg_ber_integer_k(pair: RelayPair, ook: OOK = OOK()) -> MetricResult:
    """Average BER for any integer k via the same exp-polynomial expansion."""
    p = pair.ordered()
    big_g = p.edge
    big_t = ook.B * big_g / 2.0
    pref = ook.A / (2.0 * math.sqrt(math.pi))
    terms = {n: _guard(n, lambda q: pref * q.gaussian_kernel_moment(big_t), q)
             for n, q in cdf_groups(p).items()}
    terms["boundary"] = ber_boundary_term(big_g, ook)
    return _total(terms)


def avg_ber_deterministic(point: PointingParams, turb: TurbulenceParams, pl: DeterministicPathLoss,
                          gamma0: float, ook: OOK = OOK(), form: Form = "corrected") -> MetricResult:
    a, phi = turbulence_pointing_params(point, turb)
    return avg_ber_power_law(PowerLawLink(a, phi, pl.relayed_gain), gamma0, ook, form)


def avg_ber_power_law(link: PowerLawLink, gamma0: float, ook: OOK = OOK(),
                      form: Form = "corrected", relayed: bool = True) -> MetricResult:
    """Symmetric DF BER over two identical power-law hops (F = x^(phi^2/2)).

    ``relayed=False`` gives the single-hop BER; it has no printed form, so
    ``form`` is ignored there.
    """
    p2 = link.phi ** 2
    edge = link.edge ** 2 * gamma0
    big_t = ook.B * edge / 2.0
    if not relayed:
        pref = ook.A / (2.0 * math.sqrt(math.pi))
        f = pref * big_t ** (-p2 / 2.0) * specfun.lower_inc_gamma(0.5 * (1.0 + p2), big_t)
        boundary = ber_boundary_term(edge, ook)
        return MetricResult(f + boundary, {"F": f, "boundary": boundary})
    if _check_form(form) != "expansion":
        terms = transcribed.avg_ber_deterministic_terms(link, gamma0, ook, corrected=form == "corrected")
        if form == "corrected":
            terms["boundary"] = ber_boundary_term(edge, ook)
        return _total(terms)
    # F = x^(p2/2) with x = gamma/edge; 2F - F^2 under the Gaussian kernel
    pref = ook.A / (2.0 * math.sqrt(math.pi))
    s1, s2 = 0.5 * (1.0 + p2), 0.5 + p2
    two_f = 2.0 * pref * big_t ** (-p2 / 2.0) * specfun.lower_inc_gamma(s1, big_t)
    f_sq = -pref * big_t ** (-p2) * specfun.lower_inc_gamma(s2, big_t)
    boundary = ber_boundary_term(edge, ook)
    return MetricResult(two_f + f_sq + boundary, {"2F": two_f, "F^2": f_sq, "boundary": boundary})
