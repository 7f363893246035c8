"""Unit conversions: dBm/dB to linear and transmit power to the SNR scale gamma0."""
from __future__ import annotations

import numpy as np

NOISE_A2_PER_GHZ = 1e-14
RESPONSIVITY = 0.5


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def linear_to_db(x):
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(np.asarray(x, dtype=float))


def dbm_to_watts(p_dbm):
    return 1e-3 * db_to_linear(p_dbm)


def noise_variance(per_ghz: float = NOISE_A2_PER_GHZ, bandwidth_ghz: float = 1.0) -> float:
    """Receiver noise variance in A^2."""
    return per_ghz * bandwidth_ghz


def gamma0_from_power(p_t_dbm, responsivity: float = RESPONSIVITY, noise_var: float | None = None):
    """gamma0 = 2 P^2 R^2 / sigma^2 with P in watts."""
    sigma2 = noise_variance() if noise_var is None else noise_var
    p = dbm_to_watts(p_t_dbm)
    out = 2.0 * p * p * responsivity ** 2 / sigma2
    return out if np.ndim(out) else float(out)

