import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate as sint, stats

from _helpers import make_pair
from fogrelay import montecarlo as mc
from fogrelay.channel import Mode, PointingParams, FogParams, combined_snr_cdf, combined_snr_pdf
from fogrelay.relay import af_pdf_numeric, af_snr, df_cdf, df_cdf_expoly, df_pdf


def test_identical_hops_cdf_and_pdf():
    pair = make_pair()
    g = np.geomspace(1e-3, 0.99, 25) * pair.edge
    f1 = combined_snr_cdf(g, pair.hop1, pair.gamma0)
    p1 = combined_snr_pdf(g, pair.hop1, pair.gamma0)
    np.testing.assert_allclose(df_cdf(g, pair), 2 * f1 - f1 * f1, rtol=1e-14)
    np.testing.assert_allclose(df_pdf(g, pair), 2 * p1 * (1 - f1), rtol=1e-9)


def test_cdf_is_one_past_the_weaker_edge():
    pair = make_pair(d1=0.2, d2=0.35, w=(25, 20))
    assert pair.edge == pytest.approx(min(pair.hop1.a, pair.hop2.a) ** 2 * pair.gamma0)
    assert df_cdf(pair.edge, pair) == pytest.approx(1.0, abs=1e-12)
    assert df_cdf(3 * pair.edge, pair) == 1.0


def test_pdf_is_derivative_of_cdf():
    pair = make_pair(d1=0.2, d2=0.35, w=(25, 20))
    for x in np.geomspace(1e-4, 0.8, 12):
        g = x * pair.edge
        h = 1e-5 * g
        fd = (df_cdf(g + h, pair) - df_cdf(g - h, pair)) / (2 * h)
        assert fd == pytest.approx(df_pdf(g, pair), rel=1e-5)


def test_pdf_normalised():
    pair = make_pair(d1=0.2, d2=0.35, k=3)
    top = pair.edge
    total, _ = sint.quad(lambda v: df_pdf(top * math.exp(-2 * v), pair) * 2 * top * math.exp(-2 * v),
                         0, 300, limit=400, epsabs=1e-12)
    assert total == pytest.approx(1.0, abs=1e-6)


def test_expoly_form_matches_cdf():
    pair = make_pair(d1=0.3, d2=0.2, k=3, w=(20, 25))
    p = pair.ordered()
    poly = df_cdf_expoly(pair)
    for x in np.geomspace(1e-6, 0.9, 15):
        g = x * pair.edge
        v = 0.5 * math.log(p.edge / g)
        assert poly(v) == pytest.approx(df_cdf(g, pair), rel=1e-11, abs=1e-15)


@settings(max_examples=30, deadline=None)
@given(x=st.floats(1e-6, 0.999), d1=st.floats(0.1, 0.5), d2=st.floats(0.1, 0.5))
def test_df_cdf_dominates_each_hop(x, d1, d2):
    pair = make_pair(d1=d1, d2=d2)
    g = x * pair.edge
    c = df_cdf(g, pair)
    assert c >= max(combined_snr_cdf(g, pair.hop1, pair.gamma0), combined_snr_cdf(g, pair.hop2, pair.gamma0)) - 1e-15


def test_ordered_puts_weaker_hop_second():
    pair = make_pair(d1=0.4, d2=0.2)
    o = pair.ordered()
    assert o.hop2.a <= o.hop1.a and o.delta >= 0
    assert df_cdf(0.3 * pair.edge, o) == pytest.approx(df_cdf(0.3 * pair.edge, pair), rel=1e-15)


def _df_samples(pair_scn, n, seed, protocol="DF"):
    return np.concatenate([mc.combine(s, protocol) for s in mc.iter_hop_snrs(pair_scn, mc.SimConfig(n, seed, protocol))])


def _scn(g0, d1=0.25, d2=0.25):
    pt = PointingParams.from_normalized(25, 3)
    return mc.SimScenario(Mode.FP, (mc.HopModel(pt, FogParams(2, 13.12, d1)), mc.HopModel(pt, FogParams(2, 13.12, d2))), g0)


def test_df_cdf_matches_sampler():
    g0 = 1e9
    pair = make_pair(g0, d1=0.2, d2=0.3)
    x = _df_samples(_scn(g0, 0.2, 0.3), 10 ** 6, 31)
    assert stats.kstest(x, lambda g: df_cdf(g, pair)).statistic < 0.002


def test_af_snr_examples():
    assert af_snr(0.0, 5.0) == 0.0
    assert af_snr(10.0, 10.0) == pytest.approx(100 / 21)
    assert af_snr(10.0, 10.0) == pytest.approx(4.7619, abs=1e-4)


@given(a=st.floats(0, 1e12), b=st.floats(0, 1e12))
def test_af_never_exceeds_df(a, b):
    assert af_snr(a, b) <= min(a, b)


def test_af_pdf_empty_range():
    pair = make_pair(1e9)
    assert af_pdf_numeric(0.9 * pair.hop1.support(1e9), pair) == 0.0


def test_af_pdf_normalised():
    pair = make_pair(1e9, d1=0.2, d2=0.3)
    top = 0.5 * pair.edge   # harmonic half-sum never exceeds half the weaker edge
    f = lambda v: af_pdf_numeric(top * math.exp(-2 * v), pair) * 2 * top * math.exp(-2 * v)
    total, _ = sint.quad(f, 0, 40, limit=200, epsrel=1e-7)
    assert total == pytest.approx(1.0, abs=1e-4)


@pytest.mark.slow
def test_af_pdf_matches_harmonic_sampler():
    g0 = 1e9
    pair = make_pair(g0, d1=0.2, d2=0.3)
    x = np.concatenate([g1 * g2 / (g1 + g2) for g1, g2 in mc.iter_hop_snrs(_scn(g0, 0.2, 0.3), mc.SimConfig(10 ** 6, 8))])
    # survival function on a quantile grid, integrated piecewise from the top of the support
    top = 0.5 * pair.edge
    grid = np.quantile(x, np.linspace(0.98, 0.02, 25))
    dens = lambda v: af_pdf_numeric(top * math.exp(-2 * v), pair) * 2 * top * math.exp(-2 * v)
    vs = np.concatenate([[0.0], 0.5 * np.log(top / grid)])
    pieces = [sint.quad(dens, a, b, epsrel=1e-7)[0] for a, b in zip(vs[:-1], vs[1:])]
    cdf = 1.0 - np.cumsum(pieces)
    emp = np.searchsorted(np.sort(x), grid) / x.size
    assert np.max(np.abs(cdf - emp)) < 0.005


def test_hop_streams_uncorrelated():
    chunks = list(mc.iter_hop_snrs(_scn(1e9), mc.SimConfig(10 ** 6, 77)))
    a = np.concatenate([c[0] for c in chunks])
    b = np.concatenate([c[1] for c in chunks])
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.01


def test_af_mean_below_df_mean_on_same_draws():
    chunks = list(mc.iter_hop_snrs(_scn(1e8), mc.SimConfig(200_000, 3)))
    af = np.concatenate([mc.combine(c, "AF") for c in chunks])
    df = np.concatenate([mc.combine(c, "DF") for c in chunks])
    assert np.all(af <= df) and af.mean() <= df.mean()
