import math
from fractions import Fraction

import numpy as np
import pytest

from helpers import scenario_split, xi_of
from sigmapf.exact import Angle
from sigmapf.pf import (
    HyperbolicFamily,
    LatticeFamily,
    PFError,
    PFSpectrum,
    austere_check_pf,
    consistency_check,
    curvature_adapted_data,
    enumerate_family,
    pf_spectrum_general,
    pf_spectrum_sigma,
)
from sigmapf.scenario import bundled_scenario_paths

F = Fraction
ALL = [p.stem for p in bundled_scenario_paths()]


def test_su2_fiber_is_lattice_only():
    _sc, split = scenario_split("su2_fiber")
    spec = pf_spectrum_sigma(split, xi_of(1))
    assert spec.zero_mult == "inf"
    assert spec.canonical() == ((), ((F(2), 2),), ())


@pytest.mark.parametrize("xi,expected", [
    (("1", "0"), ((F(1), 4), (F(2), 2))),
    (("1", "1/3"), ((F(1, 3), 2), (F(4, 3), 2), (F(5, 3), 2))),
    # <(1, -2), xi> = 0 drops that root
    (("2", "1"), ((F(3), 4),)),
])
def test_su3_fiber(xi, expected):
    _sc, split = scenario_split("su3_fiber")
    spec = pf_spectrum_sigma(split, xi_of(*xi))
    assert spec.canonical() == ((), expected, ())


def test_arctan_convention_lambda_zero():
    # equator: lambda = 0 on the root space, so the offset is 2 arctan(inf) = pi
    _sc, split = scenario_split("su2_identity_equator")
    gen = pf_spectrum_general(curvature_adapted_data(split), xi_of(1))
    ((fam,),) = [gen.hyperbolic]
    assert fam.offset == Angle.pi(1) and fam.numer == 2 and fam.mult == 2


@pytest.mark.parametrize("name", ["su2_identity_quarter", "su2_identity_generic", "su3_conj", "su3_order3"])
def test_offsets_match_float_arctan(name):
    sc, split = scenario_split(name)
    xi = sc.xis[0]
    data = curvature_adapted_data(split)
    gen = pf_spectrum_general(data, xi)
    offsets = sorted(f.offset.normalized().radians for f in gen.hyperbolic)
    direct = []
    for bucket in data.lambda_root.values():
        for ent, _m in bucket.values():
            a = float(ent.root.pair(xi))
            if a == 0:
                continue
            lam = ent.pair(xi)
            o = math.pi if lam == 0 else 2 * math.atan(a / (2 * lam))
            direct.append(Angle.rad(o).normalized().radians)
    assert np.allclose(offsets, sorted(direct), atol=1e-12)


@pytest.mark.parametrize("name", ALL)
def test_consistency_on_bundled(name):
    sc, split = scenario_split(name)
    for xi in sc.xis:
        rep = consistency_check(split, xi)
        assert rep["pass"], rep.get("mismatch")


def test_consistency_detects_change():
    sc, split = scenario_split("su3_conj")
    a = pf_spectrum_sigma(split, sc.xis[0])
    fam = a.hyperbolic[0]
    moved = PFSpectrum((HyperbolicFamily(fam.numer, fam.offset + Angle.pi(F(1, 7)), fam.mult, ""),)
                       + a.hyperbolic[1:], a.lattice, a.flat, a.xi)
    assert moved.canonical() != a.canonical()


def test_canonical_flips_negative_numerators():
    a = PFSpectrum((HyperbolicFamily(F(-2), Angle.pi(F(1, 3)), 2, ""),), (), (), (F(1),))
    b = PFSpectrum((HyperbolicFamily(F(2), Angle.pi(F(-1, 3)), 2, ""),), (), (), (F(1),))
    assert a.canonical() == b.canonical()
    vals_a = enumerate_family(a.hyperbolic[0], 3)
    vals_b = enumerate_family(b.hyperbolic[0], 3)
    assert np.allclose(vals_a, vals_b)


def test_enumerate_lattice():
    vals = enumerate_family(LatticeFamily(F(2), 2, ""), 2)
    assert np.allclose(vals, [-1 / math.pi, -1 / (2 * math.pi), 1 / (2 * math.pi), 1 / math.pi])


def test_enumerate_hyperbolic():
    o = math.pi / 2
    vals = enumerate_family(HyperbolicFamily(F(1), Angle.pi(F(1, 2)), 1, ""), 1)
    assert np.allclose(vals, sorted([1 / (o - 2 * math.pi), 1 / o, 1 / (o + 2 * math.pi)]))
    with pytest.raises(PFError):
        enumerate_family(HyperbolicFamily(F(1), Angle.pi(2), 1, ""), 1)
    with pytest.raises(PFError):
        enumerate_family(LatticeFamily(F(1), 1, ""), -1)


def test_multiplicities_add_up():
    for name in ALL:
        _sc, split = scenario_split(name)
        curvature_adapted_data(split).validate()


@pytest.mark.parametrize("name", ALL)
def test_austere_agreement(name):
    sc, split = scenario_split(name)
    rep = austere_check_pf(split)
    assert "label_violation" not in rep
    if split.spec.data.is_reduced():
        assert rep["agrees_with_finite"] is True
    if "austere_pf" in sc.expect:
        assert rep["austere"] is sc.expect["austere_pf"]


def test_bc1_austere_at_quarter_turn():
    # w = pi/2: theta = pi/2 and 3pi/2 on alpha, 2 alpha is normal (theta = 2pi)
    _sc, split = scenario_split("su3_conj_austere")
    rep = austere_check_pf(split)
    assert rep["austere"] and rep["per_root_symmetric"] and rep["finite_verdict"] == "austere"
    cert = {(c["theta"], c["mult"]) for c in rep["certificate"]}
    assert cert == {("pi/2", 2), ("3pi/2", 2)}


@pytest.mark.parametrize("w", ["pi/2", "pi/3", "2pi/3", "pi/4", "3pi/4", "pi/6", "5pi/6", "2pi/5", "pi", "0"])
def test_bc1_finite_austere_transfers(w):
    # sigma has order 2, so an austere finite orbit must give an austere lift
    _sc, split = scenario_split("su3_conj", w=[w])
    rep = austere_check_pf(split)
    if rep["finite_verdict"] == "austere":
        assert rep["austere"]
    assert "label_violation" not in rep


def test_bc1_lift_austere_without_finite():
    # w = pi/4: offsets -pi/4, 3pi/4 on alpha and, split over the line unit, -3pi/4, pi/4 on 2 alpha,
    # a symmetric set; the finite coefficients -cot(pi/8)/2, -cot(5pi/8)/2, 1 are not
    _sc, split = scenario_split("su3_conj", w=["pi/4"])
    rep = austere_check_pf(split)
    assert rep["austere"] and rep["finite_verdict"] == "not austere"
    assert not rep["reduced"] and "label_violation" not in rep
    assert not rep["per_root_symmetric"]
    thetas = {c["theta"] for c in rep["certificate"]}
    assert thetas == {"pi/4", "5pi/4", "3pi/4", "7pi/4"}
