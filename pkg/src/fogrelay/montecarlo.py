"""Seeded Monte Carlo samplers and estimators for the end-to-end SNR.

Reproducibility: the master seed is expanded with ``numpy.random.SeedSequence``
into one child per fixed-size chunk, and each chunk spawns one grandchild per
hop. A chunk's draws therefore depend only on (seed, chunk index, hop index).
Chunk statistics are merged in chunk order, so results are bit-identical for
any worker count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy import special as _sp

from .analytic import OOK
from .channel import FogParams, Mode, PointingParams, TurbulenceParams
from .errors import ConfigError, DomainError
from .relay import af_snr

PROTOCOLS = ("direct", "DF", "AF")
METRICS = ("outage", "avg_snr", "rate", "rate_bound", "ber")
CHUNK = 1 << 16
_E_OVER_2PI = math.e / (2.0 * math.pi)


# -- marginal samplers -----------------------------------------------------

def sample_fog(p: FogParams, rng: np.random.Generator, size: int | None = None):
    """h_f = exp(-G) with G ~ Gamma(shape k, rate z); any real k > 0."""
    return np.exp(-rng.gamma(p.k, 1.0 / p.z, size))


def sample_pointing(p: PointingParams, rng: np.random.Generator, size: int | None = None,
                    boresight: bool = False):
    """Pointing gain in [0, A0].

    Without boresight: inverse CDF, h_p = A0 U^(1/rho^2).
    With boresight: radial displacement from independent Gaussians
    x ~ N(mu_x, sigma_x), y ~ N(mu_y, sigma_y); h_p = A0 exp(-2 r^2 / w_zeq^2).
    """
    if not boresight:
        u = 1.0 - rng.random(size)  # (0, 1]
        return p.a0 * u ** (1.0 / p.rho ** 2)
    x = rng.normal(p.mu_x, p.jitter_x, size)
    y = rng.normal(p.mu_y, p.jitter_y, size)
    return p.a0 * np.exp(-2.0 * (x * x + y * y) / p.w_zeq ** 2)


def sample_turbulence(p: TurbulenceParams, rng: np.random.Generator, size: int | None = None):
    """Inverse CDF of the exponentiated Weibull law."""
    u = rng.random(size)
    return p.eta_t * (-np.log1p(-u ** (1.0 / p.alpha_t))) ** (1.0 / p.beta_t)


# -- scenario --------------------------------------------------------------

@dataclass(frozen=True)
class HopModel:
    """Physical description of one hop.

    Which factors are drawn depends on the mode: FP uses fog and pointing,
    FPT adds turbulence, PT replaces random fog by the fixed gain ``loss``.
    """
    point: PointingParams
    fog: FogParams | None = None
    turb: TurbulenceParams | None = None
    loss: float = 1.0
    boresight: bool = False


@dataclass(frozen=True)
class SimScenario:
    mode: Mode
    hops: tuple[HopModel, ...]
    gamma0: float

    def __post_init__(self):
        mode = Mode(self.mode)
        object.__setattr__(self, "mode", mode)
        if not self.hops or len(self.hops) > 2:
            raise ConfigError("hops", f"need one or two hops, got {len(self.hops)}")
        if not (math.isfinite(self.gamma0) and self.gamma0 > 0):
            raise ConfigError("gamma0", f"must be positive, got {self.gamma0}")
        for i, h in enumerate(self.hops):
            if mode is Mode.PT and h.fog is not None:
                raise ConfigError(f"hops[{i}].fog", "mode/fog conflict: PT mode has no random fog")
            if mode is not Mode.PT and h.fog is None:
                raise ConfigError(f"hops[{i}].fog", f"{mode.value} mode needs fog parameters")
            if mode is not Mode.FP and h.turb is None:
                raise ConfigError(f"hops[{i}].turb", f"{mode.value} mode needs turbulence parameters")
            if not 0 < h.loss <= 1:
                raise ConfigError(f"hops[{i}].loss", f"must lie in (0, 1], got {h.loss}")


@dataclass(frozen=True)
class SimConfig:
    n_samples: int
    seed: int
    protocol: str = "DF"
    workers: int = 1

    def __post_init__(self):
        if int(self.n_samples) != self.n_samples or self.n_samples < 1:
            raise ConfigError("sim.n_samples", f"must be a positive integer, got {self.n_samples}")
        if not (0 <= int(self.seed) < 2 ** 64):
            raise ConfigError("sim.seed", f"must be a 64-bit unsigned integer, got {self.seed}")
        if self.protocol not in PROTOCOLS:
            raise ConfigError("sim.protocol", f"must be one of {PROTOCOLS}, got {self.protocol!r}")
        if self.workers < 1:
            raise ConfigError("sim.workers", "must be >= 1")


@dataclass(frozen=True)
class Estimate:
    value: float
    std_error: float
    n: int


def hop_gain(hop: HopModel, mode: Mode, rng: np.random.Generator, size: int):
    """One hop's channel gain h. FPT and PT draw the exact product including h_t."""
    h = sample_pointing(hop.point, rng, size, hop.boresight)
    if mode is Mode.PT:
        h = h * hop.loss
    else:
        h = h * sample_fog(hop.fog, rng, size)
    if mode is not Mode.FP:
        h = h * sample_turbulence(hop.turb, rng, size)
    return h


def _chunk_sizes(n: int) -> list[int]:
    full, rest = divmod(n, CHUNK)
    return [CHUNK] * full + ([rest] if rest else [])


def _hop_snrs(scn: SimScenario, seq: np.random.SeedSequence, size: int) -> tuple[np.ndarray, ...]:
    out = []
    for hop, child in zip(scn.hops, seq.spawn(len(scn.hops))):
        h = hop_gain(hop, scn.mode, np.random.default_rng(child), size)
        out.append(scn.gamma0 * h * h)
    return tuple(out)


def iter_hop_snrs(scn: SimScenario, sim: SimConfig) -> Iterator[tuple[np.ndarray, ...]]:
    """Per-hop SNR arrays chunk by chunk, in chunk order."""
    sizes = _chunk_sizes(int(sim.n_samples))
    seqs = np.random.SeedSequence(int(sim.seed)).spawn(len(sizes))
    for seq, size in zip(seqs, sizes):
        yield _hop_snrs(scn, seq, size)


def combine(snrs: tuple[np.ndarray, ...], protocol: str) -> np.ndarray:
    if protocol == "direct" or len(snrs) == 1:
        return snrs[0]
    if protocol == "DF":
        return np.minimum(snrs[0], snrs[1])
    if protocol == "AF":
        return af_snr(snrs[0], snrs[1])
    raise ConfigError("sim.protocol", f"unknown protocol {protocol!r}")


def _sample_values(gamma: np.ndarray, gamma_th: float | None, ook: OOK) -> dict[str, np.ndarray]:
    vals = {
        "avg_snr": gamma,
        "rate": np.log2(1.0 + _E_OVER_2PI * gamma),
        "rate_bound": np.log2(_E_OVER_2PI * gamma),
        "ber": ook.A * 0.5 * _sp.erfc(np.sqrt(ook.B * gamma / 2.0)),
    }
    if gamma_th is not None:
        vals["outage"] = (gamma < gamma_th).astype(float)
    return vals


def _moments(x: np.ndarray) -> tuple[int, float, float]:
    mean = float(np.mean(x))
    return x.size, mean, float(np.sum((x - mean) ** 2))


def _merge(a, b):
    # Chan et al. pairwise update of (n, mean, sum of squared deviations)
    na, ma, sa = a
    nb, mb, sb = b
    n = na + nb
    d = mb - ma
    return n, ma + d * nb / n, sa + sb + d * d * na * nb / n


def _tree_merge(parts: list):
    while len(parts) > 1:
        nxt = [_merge(parts[i], parts[i + 1]) for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            nxt.append(parts[-1])
        parts = nxt
    return parts[0]


def estimate_all(scn: SimScenario, sim: SimConfig, gamma_th: float | None = None,
                 ook: OOK = OOK()) -> dict[str, Estimate]:
    """Sample-mean estimates of every metric from one set of draws.

    ``outage`` is present only when ``gamma_th`` is given.
    """
    if sim.protocol != "direct" and len(scn.hops) != 2:
        raise ConfigError("hops", f"{sim.protocol} relaying needs two hops")
    if gamma_th is not None and not gamma_th > 0:
        raise DomainError(f"gamma_th must be positive, got {gamma_th}")
    sizes = _chunk_sizes(int(sim.n_samples))
    seqs = np.random.SeedSequence(int(sim.seed)).spawn(len(sizes))

    def work(idx):
        gamma = combine(_hop_snrs(scn, seqs[idx], sizes[idx]), sim.protocol)
        return {k: _moments(v) for k, v in _sample_values(gamma, gamma_th, ook).items()}

    if sim.workers == 1:
        per_chunk = [work(i) for i in range(len(sizes))]
    else:
        with ThreadPoolExecutor(sim.workers) as pool:
            per_chunk = list(pool.map(work, range(len(sizes))))

    out = {}
    for name in per_chunk[0]:
        n, mean, ss = _tree_merge([c[name] for c in per_chunk])
        var = ss / (n - 1) if n > 1 else 0.0
        out[name] = Estimate(mean, math.sqrt(var / n), n)
    return out


def estimate(metric: str, scn: SimScenario, sim: SimConfig, gamma_th: float | None = None,
             ook: OOK = OOK()) -> Estimate:
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
    if metric == "outage" and gamma_th is None:
        raise DomainError("outage needs gamma_th")
    return estimate_all(scn, sim, gamma_th if metric == "outage" else None, ook)[metric]
