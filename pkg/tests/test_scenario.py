import copy
import math
import warnings

import numpy as np
import pytest

from fogrelay.channel import Mode
from fogrelay.errors import ConfigError
from fogrelay.scenario import ConfigWarning, ScenarioConfig
from fogrelay.units import db_to_linear, dbm_to_watts, gamma0_from_power, linear_to_db, noise_variance

BASE = {
    "mode": "FP",
    "protocol": "DF",
    "fog": {"class": "light", "k": 2},
    "geometry": {"d": 0.5, "d1": 0.25, "d2": 0.25},
    "pointing": {"w_z_over_a_r": 25, "sigma_s_over_a_r": 3},
    "power_sweep": {"start_dbm": 0, "stop_dbm": 40, "step_db": 5},
    "gamma_th_db": 6,
    "sim": {"n_samples": 1000, "seed": 1},
}


def doc(**changes):
    d = copy.deepcopy(BASE)
    for k, v in changes.items():
        if v is None:
            d.pop(k, None)
        else:
            d[k] = v
    return d


def load(d):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConfigWarning)
        return ScenarioConfig.from_dict(d)


def test_unit_conversions():
    assert db_to_linear(10) == pytest.approx(10)
    assert linear_to_db(100) == pytest.approx(20)
    assert dbm_to_watts(30) == pytest.approx(1.0)
    assert noise_variance() == 1e-14
    # 2 P^2 R^2 / sigma^2 with P = 1 mW, R = 0.5
    assert gamma0_from_power(0) == pytest.approx(2 * 1e-6 * 0.25 / 1e-14)
    np.testing.assert_allclose(gamma0_from_power(np.array([0.0, 10.0])), [5e7, 5e9])


def test_base_scenario():
    cfg = load(doc())
    assert cfg.mode is Mode.FP and cfg.relayed
    assert cfg.fog.k == 2 and cfg.fog.beta == 13.12
    assert cfg.gamma_th == pytest.approx(10 ** 0.6)
    np.testing.assert_allclose(cfg.sweep.grid(), np.arange(0, 41, 5))
    assert cfg.available_methods() == ("analytic", "quadrature", "mc")


def test_class_tag_expands_and_explicit_value_wins_with_warning():
    with pytest.warns(ConfigWarning):
        cfg = ScenarioConfig.from_dict(doc(fog={"class": "moderate", "k": 5}))
    assert cfg.fog.k == 5 and cfg.fog.beta == 12.06
    cfg = load(doc(fog={"class": "thick"}))
    assert (cfg.fog.k, cfg.fog.beta) == (6.0, 23.0)


def test_real_k_needs_analytic_k_for_closed_forms():
    cfg = load(doc(fog={"class": "light"}))
    assert cfg.fog.k == 2.32 and cfg.fog.analytic_k is None
    with pytest.raises(ConfigError):
        cfg.check_methods(["analytic"])
    assert cfg.check_methods(["quadrature", "mc"]) == ("quadrature", "mc")
    cfg = load(doc(fog={"class": "light", "analytic_k": 2}))
    assert cfg.links()[0].k == 2 and cfg.links(analytic=False)[0].k == 2.32


def test_pt_mode_with_fog_is_a_conflict():
    with pytest.raises(ConfigError, match="mode/fog conflict"):
        load(doc(mode="PT", path_loss={"psi": 2.0}))


def test_pt_needs_psi():
    with pytest.raises(ConfigError):
        load(doc(mode="PT", fog=None))
    cfg = load(doc(mode="PT", fog=None, path_loss={"psi": 2.329}))
    assert cfg.psi == 2.329 and cfg.turbulence is not None


def test_geometry_must_add_up():
    with pytest.raises(ConfigError, match="geometry"):
        load(doc(geometry={"d": 0.5, "d1": 0.2, "d2": 0.2}))
    assert load(doc(geometry={"d1": 0.2, "d2": 0.3})).d == pytest.approx(0.5)


def test_direct_protocol_uses_d():
    cfg = load(doc(protocol="direct", geometry={"d": 0.5}))
    assert not cfg.relayed and cfg.hop_lengths == (0.5,)


def test_empty_sweep_is_one_point():
    cfg = load(doc(power_sweep={"start_dbm": 25, "stop_dbm": 25}))
    assert cfg.sweep.grid().tolist() == [25.0]


def test_sweep_step_must_divide_span():
    with pytest.raises(ConfigError, match="power_sweep"):
        load(doc(power_sweep={"start_dbm": 0, "stop_dbm": 10, "step_db": 3}))


@pytest.mark.parametrize("bad, where", [
    ({"mode": "XX"}, "mode"),
    ({"protocol": "AF"}, "protocol"),
    ({"fog": {"class": "drizzle"}}, "fog"),
    ({"fog": {"k": -1, "beta": 13}}, "fog.k"),
    ({"gamma_th_db": "six"}, "gamma_th_db"),
    ({"sim": {"n_samples": 0}}, "sim.n_samples"),
    ({"colour": "blue"}, "colour"),
])
def test_invalid_fields_name_their_path(bad, where):
    with pytest.raises(ConfigError) as exc:
        load(doc(**bad))
    assert where in str(exc.value)


def test_fpt_singular_pointing_is_a_config_error():
    with pytest.raises(ConfigError, match="pointing"):
        load(doc(mode="FPT", pointing={"w_z_over_a_r": 10, "sigma_s_over_a_r": 3}))


def test_per_hop_pointing_list():
    cfg = load(doc(pointing=[{"w_z_over_a_r": 10, "sigma_s_over_a_r": 3},
                             {"w_z_over_a_r": 15, "sigma_s_over_a_r": 2}]))
    a1, a2 = (p.a0 for p in cfg.pointing)
    assert a1 > a2


def test_boresight_restricts_methods():
    cfg = load(doc(pointing={"w_z_over_a_r": 25, "sigma_s_over_a_r": 3, "mu_x": 0.02}))
    assert cfg.boresight
    with pytest.raises(ConfigError):
        cfg.check_methods(["analytic"])
    assert cfg.check_methods(["mc"]) == ("mc",)


def test_af_is_monte_carlo_only():
    cfg = load(doc(protocol="AF-MC"))
    assert cfg.available_methods() == ("mc",)
    assert cfg.sim_config().protocol == "AF"


def test_overrides_and_echo_round_trip():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConfigWarning)
        cfg = load(doc()).with_overrides(seed=9, n_samples=500, pt_dbm=12.5)
    assert cfg.seed == 9 and cfg.n_samples == 500 and cfg.sweep.grid().tolist() == [12.5]
    again = load(cfg.echo())
    assert again.echo() == cfg.echo()


def test_gamma0_follows_noise_and_responsivity():
    cfg = load(doc(noise={"sigma2_per_ghz": 1e-14, "bandwidth_ghz": 2.0}, responsivity=1.0))
    assert cfg.gamma0(0) == pytest.approx(2 * 1e-6 * 1.0 / 2e-14)
    assert math.isclose(load(doc()).gamma0(30), gamma0_from_power(30))
