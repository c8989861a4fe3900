import math
from fractions import Fraction

import numpy as np
import pytest

from helpers import scenario_data, scenario_split, xi_of
from sigmapf.exact import Angle, UndecidableError
from sigmapf.orbit import (
    IsometryStep,
    OrbitSpec,
    austere_check_finite,
    corrupted_tangent_basis,
    curvature_adapted_check,
    numeric_shape_oracle,
    shape_spectrum,
    spectra_agree,
    split_tangent_normal,
    weakly_reflective_witness,
)
from sigmapf.scenario import bundled_scenario_paths

ORACLE_SCENARIOS = [p.stem for p in bundled_scenario_paths()]


def test_fiber_orbit_is_a_point():
    _sc, split = scenario_split("su2_fiber")
    assert split.dim == 0 and split.codim == 3
    assert shape_spectrum(split, xi_of(1)).multiset() == []


def test_equator_is_totally_geodesic():
    _sc, split = scenario_split("su2_identity_equator")
    assert split.dim == 2 and split.principal
    assert shape_spectrum(split, xi_of(1)).multiset() == [(0.0, 2)]


def test_quarter_eigenvalue():
    # <alpha, xi> = 2 and theta = pi/2: -(2/2) cot(pi/4) = -1
    _sc, split = scenario_split("su2_identity_quarter")
    ((val, mult),) = shape_spectrum(split, xi_of(1)).multiset()
    assert val == pytest.approx(-1.0) and mult == 2


def test_cartan_embedding_split():
    # Ad(diag(i, -i)) at w = 0: theta = pi on the root space, tangent zero block empty
    _sc, split = scenario_split("su2_cartan")
    assert split.dim == 2 and split.codim == 1
    assert shape_spectrum(split, xi_of(1)).multiset() == [(0.0, 2)]


def test_bc1_split_at_generic_w():
    _sc, split = scenario_split("su3_conj")
    thetas = sorted((b.root.pairing[0], th.turns) for b, th in split.tangent_roots)
    assert thetas == [(1, Fraction(1, 5)), (1, Fraction(6, 5)), (2, Fraction(7, 5))]
    assert split.dim == 7 and split.codim == 1


@pytest.mark.parametrize("name", ORACLE_SCENARIOS)
def test_split_matches_action_image(name):
    _sc, split = scenario_split(name)
    assert split.span_residual < 1e-8
    assert split.dim + split.codim == split.spec.model.dim


@pytest.mark.parametrize("name", ORACLE_SCENARIOS)
def test_oracle_matches_closed_form(name):
    sc, split = scenario_split(name)
    if split.dim == 0:
        pytest.skip("orbit is a point")
    for xi in sc.xis:
        exact = shape_spectrum(split, xi).multiset()
        numeric = numeric_shape_oracle(split.spec, xi)
        assert spectra_agree(exact, numeric, 1e-5), (exact, numeric)


def test_oracle_detects_wrong_sign():
    _sc, split = scenario_split("su2_identity_quarter")
    exact = shape_spectrum(split, xi_of(1)).multiset()
    numeric = numeric_shape_oracle(split.spec, xi_of(1))
    assert not spectra_agree([(-v, m) for v, m in exact], numeric, 1e-5)


def test_inexact_w_near_lattice_is_undecidable():
    _sc, data = scenario_data("su2_identity_generic")
    with pytest.raises(UndecidableError):
        split_tangent_normal(OrbitSpec(data, (Angle.rad(math.pi + 1e-13),)))


def test_inexact_generic_w_is_fine():
    _sc, data = scenario_data("su2_identity_generic")
    split = split_tangent_normal(OrbitSpec(data, (Angle.rad(0.3),)))
    assert split.dim == 2


@pytest.mark.parametrize("name", ["su2_identity_quarter", "su3_conj", "su3_order3", "sp2_identity"])
def test_curvature_adapted(name):
    _sc, split = scenario_split(name)
    assert curvature_adapted_check(split)["pass"]
    bad = curvature_adapted_check(split, tangent_override=corrupted_tangent_basis(split))
    assert not bad["pass"]
    assert max(bad["preserve_residual"], bad["commutator_residual"]) > 1e-3


@pytest.mark.parametrize("name,austere", [
    ("su2_identity_equator", True),
    ("su2_identity_quarter", False),
    ("su2_cartan", True),
    ("su3_cartan_conj", True),
    ("su3_conj_austere", True),
    ("su3_conj", False),
    ("su3_identity_generic", False),
])
def test_austere_finite(name, austere):
    _sc, split = scenario_split(name)
    rep = austere_check_finite(split)
    assert rep["austere"] is austere


def test_austere_finite_inexact():
    _sc, data = scenario_data("su2_identity_generic")
    rep = austere_check_finite(split_tangent_normal(OrbitSpec(data, (Angle.rad(0.3),))))
    assert rep["verdict"] == "undecidable"


@pytest.mark.parametrize("w", ["pi/2", "pi/3", "2pi/3", "pi/4", "3pi/4", "pi/6", "5pi/6", "2pi/5"])
def test_austere_finite_bc1_against_floats(w):
    # alpha and 2 alpha share a line, so cancellation may pair different roots
    _sc, split = scenario_split("su3_conj", w=[w])
    coeffs = []
    for blk, th in split.tangent_roots:
        c = -float(blk.root.pairing[0]) / 2 * th.cot_half()
        coeffs += [c] * blk.mult
    coeffs = np.sort([c for c in coeffs if abs(c) > 1e-12])
    expected = coeffs.shape == (-coeffs[::-1]).shape and bool(np.allclose(coeffs, -coeffs[::-1], atol=1e-12))
    assert austere_check_finite(split)["austere"] is expected


def _steps(spec, *kinds):
    out = []
    for k in kinds:
        out.append(IsometryStep("inverse") if k == "inverse" else IsometryStep(k, spec.a))
    return out


def test_weakly_reflective_equator():
    _sc, split = scenario_split("su2_identity_equator")
    spec = split.spec
    good = weakly_reflective_witness(spec, xi_of(1), _steps(spec, "inverse", "left", "right"), samples=40)
    assert good["pass"]
    ident = weakly_reflective_witness(spec, xi_of(1), [], samples=40)
    assert not ident["pass"] and ident["reverses_xi_residual"] > 1e-3


def test_weakly_reflective_rejects_generic():
    _sc, split = scenario_split("su2_identity_generic")
    spec = split.spec
    rep = weakly_reflective_witness(spec, xi_of(1), _steps(spec, "inverse", "left", "right"), samples=40)
    assert not rep["pass"]
