"""Shared builders for the test suite."""

from __future__ import annotations

import numpy as np

from sigmapf.exact import parse_angle, parse_scalar
from sigmapf.orbit import OrbitSpec, split_tangent_normal
from sigmapf.roots import decompose
from sigmapf.scenario import build_frame, bundled_scenario


def scenario_data(name: str):
    sc = bundled_scenario(name)
    frame = build_frame(sc, np.random.default_rng(sc.seed))
    return sc, decompose(sc.sigma, frame, rng=np.random.default_rng(sc.seed))


def scenario_split(name: str, w=None):
    sc, data = scenario_data(name)
    w = sc.w if w is None else tuple(parse_angle(c) for c in w)
    return sc, split_tangent_normal(OrbitSpec(data, w))


def xi_of(*coords):
    return tuple(parse_scalar(c) for c in coords)
