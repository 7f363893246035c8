"""JSON scenario documents: parsing, validation with field paths, and the
objects each evaluation method needs.

A scenario looks like::

    {
      "mode": "FP",                       # FP | FPT | PT
      "protocol": "DF",                   # direct | DF | AF-MC
      "fog": {"class": "light", "k": 2},  # or {"k": ..., "beta": ...}
      "geometry": {"d": 0.5, "d1": 0.25, "d2": 0.25},
      "pointing": {"w_z_over_a_r": 25, "sigma_s_over_a_r": 3, "a_r": 0.05},
      "turbulence": "default",             # or {"alpha_t", "beta_t", "eta_t"}
      "power_sweep": {"start_dbm": 0, "stop_dbm": 40, "step_db": 1},
      "gamma_th_db": 6,
      "sim": {"n_samples": 100000, "seed": 1}
    }

Distances are in km, the fog scale in dB/km and ``path_loss.psi`` in 1/km.
"""
from __future__ import annotations

import copy
import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from . import units
from .analytic import OOK
from .channel import (DEFAULT_TURBULENCE, FOG_CLASSES, FogParams, LinkChannel, Mode,
                      PointingParams, PowerLawLink, TurbulenceParams, build_link,
                      turbulence_pointing_params)
from .errors import ConfigError, DomainError
from .montecarlo import HopModel, SimConfig, SimScenario

PROTOCOLS = ("direct", "DF", "AF-MC")
METHODS = ("analytic", "quadrature", "mc")
TURBULENCE_TAGS = {"default": DEFAULT_TURBULENCE}
_DIST_TOL = 1e-9


class ConfigWarning(UserWarning):
    """A scenario field was overridden or ignored."""


def _num(doc: dict, key: str, path: str, *, default=None, positive=False, nonneg=False,
         integer=False):
    if key not in doc or doc[key] is None:
        if default is None:
            raise ConfigError(f"{path}.{key}" if path else key, "required field is missing")
        return default
    v = doc[key]
    where = f"{path}.{key}" if path else key
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(where, f"must be a finite number, got {v!r}")
    if integer and float(v) != int(v):
        raise ConfigError(where, f"must be an integer, got {v!r}")
    if positive and not v > 0:
        raise ConfigError(where, f"must be positive, got {v!r}")
    if nonneg and not v >= 0:
        raise ConfigError(where, f"must be non-negative, got {v!r}")
    return int(v) if integer else float(v)


def _section(doc: dict, key: str, required: bool = True) -> dict | None:
    v = doc.get(key)
    if v is None:
        if required:
            raise ConfigError(key, "required section is missing")
        return None
    if not isinstance(v, dict):
        raise ConfigError(key, f"must be an object, got {type(v).__name__}")
    return v


def _reject_unknown(doc: dict, allowed: set, path: str):
    extra = sorted(set(doc) - allowed)
    if extra:
        where = f"{path}.{extra[0]}" if path else extra[0]
        raise ConfigError(where, "unknown field")


@dataclass(frozen=True)
class FogSpec:
    k: float           # shape used by the simulator
    beta: float        # dB/km
    analytic_k: int | None
    tag: str | None = None

    def params(self, d: float, k: float | None = None) -> FogParams:
        return FogParams(k=self.k if k is None else k, beta=self.beta, d=d)


@dataclass(frozen=True)
class PowerSweep:
    start_dbm: float
    stop_dbm: float
    step_db: float

    def grid(self) -> np.ndarray:
        if self.stop_dbm == self.start_dbm:
            return np.array([self.start_dbm])
        n = (self.stop_dbm - self.start_dbm) / self.step_db
        return self.start_dbm + self.step_db * np.arange(int(round(n)) + 1)


@dataclass(frozen=True)
class ScenarioConfig:
    mode: Mode
    protocol: str
    fog: FogSpec | None
    hop_lengths: tuple[float, ...]
    d: float
    pointing: tuple[PointingParams, ...]   # one entry per hop
    boresight: bool
    turbulence: TurbulenceParams | None
    psi: float | None
    sweep: PowerSweep
    noise_var: float
    responsivity: float
    gamma_th_db: float
    ook: OOK
    n_samples: int
    seed: int
    workers: int
    raw: dict

    # -- parsing -----------------------------------------------------------

    @classmethod
    def from_dict(cls, doc: Any) -> "ScenarioConfig":
        if not isinstance(doc, dict):
            raise ConfigError("<root>", "scenario must be a JSON object")
        _reject_unknown(doc, {"mode", "protocol", "fog", "geometry", "pointing", "turbulence",
                              "path_loss", "power_sweep", "noise", "responsivity",
                              "gamma_th_db", "ook", "sim"}, "")
        try:
            mode = Mode(doc.get("mode"))
        except ValueError:
            raise ConfigError("mode", f"must be one of FP, FPT, PT, got {doc.get('mode')!r}") from None
        protocol = doc.get("protocol", "DF")
        if protocol not in PROTOCOLS:
            raise ConfigError("protocol", f"must be one of {PROTOCOLS}, got {protocol!r}")

        fog = _parse_fog(doc.get("fog"), mode)
        d, lengths = _parse_geometry(_section(doc, "geometry"), protocol)
        pointing, boresight = _parse_pointing(doc.get("pointing"), len(lengths))
        turb = _parse_turbulence(doc.get("turbulence"), mode)
        psi = None
        if mode is Mode.PT:
            pl = _section(doc, "path_loss")
            _reject_unknown(pl, {"psi"}, "path_loss")
            psi = _num(pl, "psi", "path_loss", nonneg=True)
        elif doc.get("path_loss") is not None:
            warnings.warn(ConfigWarning("path_loss is ignored outside PT mode"), stacklevel=2)

        sw = _section(doc, "power_sweep")
        _reject_unknown(sw, {"start_dbm", "stop_dbm", "step_db"}, "power_sweep")
        start = _num(sw, "start_dbm", "power_sweep")
        stop = _num(sw, "stop_dbm", "power_sweep")
        step = _num(sw, "step_db", "power_sweep", default=1.0)
        if stop < start:
            raise ConfigError("power_sweep.stop_dbm", "must not be below start_dbm")
        if stop > start:
            if not step > 0:
                raise ConfigError("power_sweep.step_db", "must be positive")
            n = (stop - start) / step
            if abs(n - round(n)) > 1e-9:
                raise ConfigError("power_sweep.step_db", "must divide stop_dbm - start_dbm")

        noise = _section(doc, "noise", required=False) or {}
        _reject_unknown(noise, {"sigma2_per_ghz", "bandwidth_ghz"}, "noise")
        noise_var = units.noise_variance(
            _num(noise, "sigma2_per_ghz", "noise", default=units.NOISE_A2_PER_GHZ, positive=True),
            _num(noise, "bandwidth_ghz", "noise", default=1.0, positive=True))
        resp = _num(doc, "responsivity", "", default=units.RESPONSIVITY, positive=True)
        gamma_th_db = _num(doc, "gamma_th_db", "", default=6.0)

        ook_doc = _section(doc, "ook", required=False) or {}
        _reject_unknown(ook_doc, {"A", "B"}, "ook")
        ook = OOK(_num(ook_doc, "A", "ook", default=1.0, positive=True),
                  _num(ook_doc, "B", "ook", default=0.5, positive=True))

        sim = _section(doc, "sim", required=False) or {}
        _reject_unknown(sim, {"n_samples", "seed", "workers"}, "sim")
        n_samples = _num(sim, "n_samples", "sim", default=100_000, positive=True, integer=True)
        seed = _num(sim, "seed", "sim", default=1, nonneg=True, integer=True)
        workers = _num(sim, "workers", "sim", default=1, positive=True, integer=True)

        cfg = cls(mode, protocol, fog, lengths, d, pointing, boresight, turb, psi,
                  PowerSweep(start, stop, step), noise_var, resp, gamma_th_db, ook,
                  n_samples, seed, workers, copy.deepcopy(doc))
        cfg._check_links()
        return cfg

    @classmethod
    def load(cls, path: str | Path) -> "ScenarioConfig":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError("<file>", f"cannot read {path}: {exc}") from None
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("<file>", f"invalid JSON: {exc}") from None
        return cls.from_dict(doc)

    def with_overrides(self, **scalars) -> "ScenarioConfig":
        """Re-parse with scalar overrides (``seed``, ``n_samples``, ``pt_dbm``)."""
        doc = copy.deepcopy(self.raw)
        sim = doc.setdefault("sim", {})
        if scalars.get("seed") is not None:
            sim["seed"] = scalars["seed"]
        if scalars.get("n_samples") is not None:
            sim["n_samples"] = scalars["n_samples"]
        if scalars.get("pt_dbm") is not None:
            p = scalars["pt_dbm"]
            doc["power_sweep"] = {"start_dbm": p, "stop_dbm": p, "step_db": 1.0}
        return ScenarioConfig.from_dict(doc)

    # -- derived objects ---------------------------------------------------

    @property
    def relayed(self) -> bool:
        return self.protocol != "direct"

    @property
    def gamma_th(self) -> float:
        return float(units.db_to_linear(self.gamma_th_db))

    def gamma0(self, p_t_dbm: float) -> float:
        return units.gamma0_from_power(p_t_dbm, self.responsivity, self.noise_var)

    def available_methods(self) -> tuple[str, ...]:
        return ("mc",) if self.protocol == "AF-MC" else METHODS

    def check_methods(self, methods) -> tuple[str, ...]:
        out = []
        for m in methods:
            if m not in METHODS:
                raise ConfigError("methods", f"unknown method {m!r}; expected a subset of {METHODS}")
            if m not in self.available_methods():
                raise ConfigError("methods", f"protocol {self.protocol} supports only {self.available_methods()}")
            if m != "mc" and self.mode is not Mode.PT:
                if m == "analytic" and self.fog.analytic_k is None:
                    raise ConfigError("fog.k", f"closed forms need an integer fog shape; "
                                      f"got k={self.fog.k} (set fog.analytic_k)")
                if self.mode is Mode.FP and self.boresight:
                    raise ConfigError("pointing.boresight", f"method {m} assumes zero boresight in FP mode")
            if m != "mc" and self.mode is Mode.PT and self.relayed and \
                    abs(self.hop_lengths[0] - self.hop_lengths[1]) > _DIST_TOL:
                raise ConfigError("geometry", f"method {m} in PT mode needs d1 = d2")
            if m not in out:
                out.append(m)
        return tuple(sorted(out, key=METHODS.index))

    def links(self, analytic: bool = True) -> tuple[LinkChannel, ...]:
        """Per-hop laws (FP/FPT): with the integer ``analytic_k`` for the closed
        forms, or with the simulator's real k for the quadrature oracle."""
        k = self.fog.analytic_k if analytic else self.fog.k
        return tuple(build_link(self.mode, self.fog.params(d, k), p, self.turbulence)
                     for d, p in zip(self.hop_lengths, self.pointing))

    def power_law_link(self) -> PowerLawLink:
        """First hop's deterministic-loss law (PT); hops are identical when used."""
        a, phi = turbulence_pointing_params(self.pointing[0], self.turbulence)
        return PowerLawLink(a, phi, math.exp(-self.psi * self.hop_lengths[0]))

    def sim_scenario(self, gamma0: float) -> SimScenario:
        hops = []
        for d, p in zip(self.hop_lengths, self.pointing):
            fog = None if self.mode is Mode.PT else self.fog.params(d)
            loss = math.exp(-self.psi * d) if self.mode is Mode.PT else 1.0
            turb = None if self.mode is Mode.FP else self.turbulence
            hops.append(HopModel(p, fog, turb, loss, self.boresight))
        return SimScenario(self.mode, tuple(hops), gamma0)

    def sim_config(self) -> SimConfig:
        protocol = {"direct": "direct", "DF": "DF", "AF-MC": "AF"}[self.protocol]
        return SimConfig(self.n_samples, self.seed, protocol, 1)

    def echo(self) -> dict:
        """Normalised config document; re-parsing it reproduces this scenario."""
        doc = copy.deepcopy(self.raw)
        doc.setdefault("sim", {})
        doc["sim"].update(n_samples=self.n_samples, seed=self.seed, workers=self.workers)
        return doc

    def _check_links(self):
        try:
            if self.mode is Mode.PT:
                for p in self.pointing:
                    turbulence_pointing_params(p, self.turbulence)
            else:
                self.links(analytic=False)
                if self.fog.analytic_k is not None:
                    self.links()
        except DomainError as exc:
            raise ConfigError("pointing", f"parameters outside the model's domain: {exc}") from None


def _parse_fog(doc, mode: Mode) -> FogSpec | None:
    if mode is Mode.PT:
        if doc is not None:
            raise ConfigError("fog", "mode/fog conflict: PT mode uses a deterministic path loss, "
                              "remove the fog section or change mode")
        return None
    if not isinstance(doc, dict):
        raise ConfigError("fog", "required section is missing" if doc is None else "must be an object")
    _reject_unknown(doc, {"class", "k", "beta", "analytic_k"}, "fog")
    tag = doc.get("class")
    if tag is not None:
        if tag not in FOG_CLASSES:
            raise ConfigError("fog.class", f"must be one of {sorted(FOG_CLASSES)}, got {tag!r}")
        k0, b0 = FOG_CLASSES[tag]
        for key, base in (("k", k0), ("beta", b0)):
            if key in doc and doc[key] != base:
                warnings.warn(ConfigWarning(
                    f"fog.{key}={doc[key]} overrides the {tag!r} class value {base}"), stacklevel=3)
        k = _num(doc, "k", "fog", default=k0, positive=True)
        beta = _num(doc, "beta", "fog", default=b0, positive=True)
    else:
        k = _num(doc, "k", "fog", positive=True)
        beta = _num(doc, "beta", "fog", positive=True)
    if "analytic_k" in doc:
        ak = _num(doc, "analytic_k", "fog", positive=True, integer=True)
    else:
        ak = int(k) if float(k).is_integer() else None
    return FogSpec(k, beta, ak, tag)


def _parse_geometry(doc: dict, protocol: str) -> tuple[float, tuple[float, ...]]:
    _reject_unknown(doc, {"d", "d1", "d2"}, "geometry")
    if protocol == "direct":
        d = _num(doc, "d", "geometry", positive=True)
        return d, (d,)
    d1 = _num(doc, "d1", "geometry", positive=True)
    d2 = _num(doc, "d2", "geometry", positive=True)
    d = _num(doc, "d", "geometry", default=d1 + d2, positive=True)
    if abs(d1 + d2 - d) > _DIST_TOL * max(1.0, d):
        raise ConfigError("geometry.d", f"d1 + d2 = {d1 + d2} must equal d = {d}")
    return d, (d1, d2)


_POINT_KEYS = {"w_z_over_a_r", "sigma_s_over_a_r", "a_r", "mu_x", "mu_y", "sigma_x", "sigma_y"}


def _one_pointing(doc, path: str) -> tuple[PointingParams, bool]:
    if not isinstance(doc, dict):
        raise ConfigError(path, "must be an object")
    _reject_unknown(doc, _POINT_KEYS, path)
    a_r = _num(doc, "a_r", path, default=0.05, positive=True)
    wz = _num(doc, "w_z_over_a_r", path, positive=True)
    ss = _num(doc, "sigma_s_over_a_r", path, positive=True)
    mu_x = _num(doc, "mu_x", path, default=0.0)
    mu_y = _num(doc, "mu_y", path, default=0.0)
    sx = doc.get("sigma_x")
    sy = doc.get("sigma_y")
    if sx is not None:
        sx = _num(doc, "sigma_x", path, positive=True)
    if sy is not None:
        sy = _num(doc, "sigma_y", path, positive=True)
    boresight = bool(mu_x or mu_y or sx is not None or sy is not None)
    p = PointingParams.from_normalized(wz, ss, a_r, mu_x=mu_x, mu_y=mu_y, sigma_x=sx, sigma_y=sy)
    return p, boresight


def _parse_pointing(doc, n_hops: int) -> tuple[tuple[PointingParams, ...], bool]:
    if doc is None:
        raise ConfigError("pointing", "required section is missing")
    if isinstance(doc, list):
        if len(doc) != n_hops:
            raise ConfigError("pointing", f"list must have one entry per hop ({n_hops})")
        parsed = [_one_pointing(p, f"pointing[{i}]") for i, p in enumerate(doc)]
    else:
        parsed = [_one_pointing(doc, "pointing")] * n_hops
    return tuple(p for p, _ in parsed), any(b for _, b in parsed)


def _parse_turbulence(doc, mode: Mode) -> TurbulenceParams | None:
    if doc is None:
        if mode is Mode.FP:
            return None
        return DEFAULT_TURBULENCE
    if isinstance(doc, str):
        if doc not in TURBULENCE_TAGS:
            raise ConfigError("turbulence", f"unknown tag {doc!r}; expected one of {sorted(TURBULENCE_TAGS)}")
        return TURBULENCE_TAGS[doc]
    if not isinstance(doc, dict):
        raise ConfigError("turbulence", "must be a tag or an object")
    _reject_unknown(doc, {"alpha_t", "beta_t", "eta_t"}, "turbulence")
    return TurbulenceParams(_num(doc, "alpha_t", "turbulence", positive=True),
                            _num(doc, "beta_t", "turbulence", positive=True),
                            _num(doc, "eta_t", "turbulence", positive=True))
