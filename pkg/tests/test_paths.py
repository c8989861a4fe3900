import numpy as np
import pytest

from sigmapf.lie import exp_map, simple_model
from sigmapf.paths import (
    DiscreteAlgebraPath,
    DiscreteGroupPath,
    PathError,
    endpoint_map,
    gauge_action,
    omega,
    parallel_transport,
    random_smooth_algebra_function,
    random_smooth_group_path,
    upsilon,
    verify_path_diagrams,
)


@pytest.fixture(scope="module")
def su2():
    return simple_model("su", 2)


def _two_exp_path(model, a, b, n):
    """u = g^-1 g' for g(t) = exp(t a) exp(t b): u(t) = Ad(exp(-t b)) a + b, Phi(u) = exp a exp b."""
    def f(t):
        e = exp_map(model, -t * b)
        return model.coords(e @ model.matrix(a) @ np.linalg.inv(e)) + b
    return DiscreteAlgebraPath.from_function(model, f, n)


def test_transport_of_constant_is_exp(su2):
    x = su2.random_element(np.random.default_rng(0), 1.5)
    g = parallel_transport(DiscreteAlgebraPath.constant(su2, x, 16))
    assert np.abs(g - exp_map(su2, x)).max() < 1e-12


def test_transport_fourth_order():
    model = simple_model("su", 3)
    rng = np.random.default_rng(1)
    a, b = model.random_element(rng), model.random_element(rng)
    target = exp_map(model, a) @ exp_map(model, b)
    errs = [np.linalg.norm(parallel_transport(_two_exp_path(model, a, b, n)) - target) for n in (16, 32, 64)]
    order = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(np.abs(order - 4) < 0.4), order


def test_transport_stays_in_group(su2):
    u = DiscreteAlgebraPath.from_function(su2, random_smooth_algebra_function(su2, np.random.default_rng(2)), 64)
    nodes = parallel_transport(u, full=True)
    assert nodes.shape[0] == 33
    assert max(su2.group_defect(g) for g in nodes) < 1e-12


def test_odd_grid_rejected(su2):
    u = DiscreteAlgebraPath.constant(su2, np.zeros(3), 7)
    with pytest.raises(PathError):
        parallel_transport(u)
    with pytest.raises(PathError):
        upsilon(u)


def test_energy_of_one_parameter_subgroup(su2):
    x = su2.random_element(np.random.default_rng(3))
    g = DiscreteGroupPath(su2, np.array([exp_map(su2, t * x) for t in np.linspace(0, 1, 33)]))
    assert np.allclose(g.right_log_derivative(), x, atol=1e-10)
    assert g.energy() == pytest.approx(su2.norm(x) ** 2, rel=1e-10)


def test_constant_gauge_is_adjoint(su2):
    rng = np.random.default_rng(4)
    b = exp_map(su2, su2.random_element(rng))
    u = DiscreteAlgebraPath.from_function(su2, random_smooth_algebra_function(su2, rng), 32)
    gu = gauge_action(DiscreteGroupPath.constant(su2, b, 32), u)
    expect = np.array([su2.coords(b @ su2.matrix(x) @ np.linalg.inv(b)) for x in u.samples])
    assert np.abs(gu.samples - expect).max() < 1e-12


def test_gauge_equivariance_of_transport(su2):
    rng = np.random.default_rng(5)
    g = random_smooth_group_path(su2, rng)
    u = DiscreteAlgebraPath.from_function(su2, random_smooth_algebra_function(su2, rng), 256)
    lhs = parallel_transport(gauge_action(g.sample(256), u))
    rhs = g.at(0.0) @ parallel_transport(u) @ np.linalg.inv(g.at(1.0))
    # the discrete log-derivative is second order, so this is only O(h^2)
    assert np.linalg.norm(lhs - rhs) < 1e-3


def test_quadrature_identity(su2):
    rng = np.random.default_rng(6)
    u = DiscreteAlgebraPath.from_function(su2, random_smooth_algebra_function(su2, rng), 64)
    v = DiscreteAlgebraPath.from_function(su2, random_smooth_algebra_function(su2, rng), 64)
    assert abs(upsilon(u).inner(upsilon(v)) - 0.5 * u.inner(v)) < 1e-12


def test_omega_endpoints(su2):
    g = random_smooth_group_path(su2, np.random.default_rng(7)).sample(16)
    om = omega(g)
    e0, e1 = endpoint_map(om)
    assert np.array_equal(e0[:2, :2], g.samples[0]) and np.array_equal(e0[2:, 2:], g.samples[-1])
    # both halves meet at g(1/2): the endpoint lands on Delta G
    assert np.array_equal(e1[:2, :2], e1[2:, 2:])


@pytest.mark.parametrize("family,n", [("su", 2), ("su", 3)])
def test_verify_path_diagrams(family, n):
    rep = verify_path_diagrams(simple_model(family, n))
    s = rep["slopes"]
    assert rep["pass"]
    assert abs(s["upsilon_equivariance"] - 2) <= 0.3
    assert abs(s["transport_equivariance"] - 4) <= 0.3
    assert abs(s["doubling_diagram"] - 4) <= 0.3
    assert max(r["quadrature"] for r in rep["rows"]) <= 1e-12
    assert rep["exp_residual"] <= 1e-10
    assert rep["orbit_identity"]["pass"]
