"""Shared builders for the test modules."""
from fogrelay.channel import DEFAULT_TURBULENCE, FogParams, PointingParams, build_link
from fogrelay.relay import RelayPair


def make_link(k=2, d=0.25, beta=13.12, mode="FP", w=25.0, s=3.0):
    return build_link(mode, FogParams(k, beta, d), PointingParams.from_normalized(w, s), DEFAULT_TURBULENCE)


def make_pair(g0=1e9, k=2, d1=0.25, d2=0.25, mode="FP", beta=13.12, w=(25.0, 25.0), s=(3.0, 3.0)):
    return RelayPair(make_link(k, d1, beta, mode, w[0], s[0]), make_link(k, d2, beta, mode, w[1], s[1]), g0)
