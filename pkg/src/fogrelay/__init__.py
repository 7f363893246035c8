"""Performance analysis of fog-impaired dual-hop optical wireless links.

Closed-form, quadrature and Monte Carlo evaluation of outage probability,
average SNR, ergodic rate and OOK bit error rate for a decode-and-forward
relay over random fog, pointing errors and exponentiated Weibull turbulence.
"""
from importlib.metadata import PackageNotFoundError, version as _version

try:
    __version__ = _version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .analytic import (OOK, DeterministicPathLoss, MetricResult, avg_ber_integer_k, avg_ber_k2,
                       avg_snr_general, avg_snr_k2, avg_snr_symmetric, diversity_order,
                       ergodic_rate_general, ergodic_rate_k2, ergodic_rate_symmetric,
                       outage_df, outage_per_hop, single_hop_metrics)
from .channel import (DEFAULT_TURBULENCE, FOG_CLASSES, FogParams, LinkChannel, Mode,
                      PointingParams, PowerLawLink, TurbulenceParams, build_link,
                      combined_snr_cdf, combined_snr_pdf)
from .errors import (ConfigError, ConvergenceError, DomainError, FogRelayError,
                     NotConvergedError, TermError)
from .relay import RelayPair, af_snr, df_cdf, df_pdf

__all__ = [
    "OOK", "DeterministicPathLoss", "MetricResult", "avg_ber_integer_k", "avg_ber_k2",
    "avg_snr_general", "avg_snr_k2", "avg_snr_symmetric", "diversity_order",
    "ergodic_rate_general", "ergodic_rate_k2", "ergodic_rate_symmetric", "outage_df",
    "outage_per_hop", "single_hop_metrics", "DEFAULT_TURBULENCE", "FOG_CLASSES", "FogParams",
    "LinkChannel", "Mode", "PointingParams", "PowerLawLink", "TurbulenceParams", "build_link",
    "combined_snr_cdf", "combined_snr_pdf", "ConfigError", "ConvergenceError", "DomainError",
    "FogRelayError", "NotConvergedError", "TermError", "RelayPair", "af_snr", "df_cdf", "df_pdf",
]
