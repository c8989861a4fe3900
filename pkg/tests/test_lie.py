import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from sigmapf.lie import (
    ModelError,
    ad_operator,
    bracket,
    exp_map,
    inner,
    jacobi_residual,
    model_from_descriptor,
    product_model,
    simple_model,
)

H = np.diag([1j, -1j])
X = np.array([[0, 1], [-1, 0]], dtype=complex)
Y = np.array([[0, 1j], [1j, 0]])

MODELS = [("su", 2), ("su", 3), ("so", 3), ("so", 4), ("sp", 1), ("sp", 2)]


@pytest.fixture(scope="module")
def su2():
    return simple_model("su", 2)


@pytest.mark.parametrize("family,n", MODELS)
def test_jacobi(family, n):
    assert jacobi_residual(simple_model(family, n)) < 1e-12


@pytest.mark.parametrize("family,n", MODELS)
def test_killing_negative_definite_and_invariant(family, n):
    m = simple_model(family, n)
    assert np.linalg.eigvalsh(m.killing).max() < 0
    rng = np.random.default_rng(1)
    x, y, z = (m.random_element(rng) for _ in range(3))
    # <[x, y], z> = -<y, [x, z]>
    assert abs(inner(m, bracket(m, x, y), z) + inner(m, y, bracket(m, x, z))) < 1e-12


@pytest.mark.parametrize("family,n", MODELS)
def test_default_metric_is_trace_form(family, n):
    m = simple_model(family, n)
    rng = np.random.default_rng(2)
    x, y = m.random_element(rng), m.random_element(rng)
    tr = np.real(np.trace(m.matrix(x) @ m.matrix(y).conj().T))
    assert inner(m, x, y) == pytest.approx(tr, abs=1e-12)


def test_su2_brackets(su2):
    h, x, y = su2.coords(H), su2.coords(X), su2.coords(Y)
    assert np.allclose(bracket(su2, h, x), 2 * y)
    assert np.allclose(bracket(su2, h, y), -2 * x)
    assert np.allclose(bracket(su2, x, y), 2 * h)
    assert inner(su2, h, h) == pytest.approx(2.0)
    assert inner(su2, h, x) == pytest.approx(0.0)


def test_su2_ad_squared(su2):
    h = su2.coords(H)
    ad2 = ad_operator(su2, h) @ ad_operator(su2, h)
    for v in (X, Y):
        assert np.allclose(ad2 @ su2.coords(v), -4 * su2.coords(v))
    assert np.allclose(ad2 @ h, 0)


def test_su2_killing_scale(su2):
    # B(x, y) = 4 tr(xy) on su(2), so the trace form is c = 1/4
    assert su2.metric_scale == pytest.approx((0.25,))


def test_metric_scale_override():
    m = simple_model("su", 2, metric_scale=1.0)
    assert inner(m, m.coords(H), m.coords(H)) == pytest.approx(8.0)
    with pytest.raises(ModelError):
        simple_model("su", 2, metric_scale=-1)


def test_exp_examples(su2):
    t = 0.7
    assert np.allclose(exp_map(su2, t * su2.coords(H)), np.diag([np.exp(1j * t), np.exp(-1j * t)]))
    assert np.allclose(exp_map(su2, np.pi / 2 * su2.coords(X)), X)
    assert np.allclose(exp_map(su2, np.pi * su2.coords(H)), -np.eye(2))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1), st.sampled_from(MODELS))
def test_exp_lands_in_group(seed, fam):
    m = simple_model(*fam)
    x = m.random_element(np.random.default_rng(seed), 2.0)
    g = exp_map(m, x)
    assert m.group_defect(g) < 1e-10
    assert abs(np.linalg.det(g) - 1) < 1e-10
    if np.linalg.norm(m.matrix(x), 2) < 3.0:
        # principal branch of log inverts exp away from the cut locus
        assert np.allclose(scipy.linalg.logm(g), m.matrix(x), atol=1e-8)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_coords_round_trip(seed):
    m = simple_model("su", 3)
    x = m.random_element(np.random.default_rng(seed))
    assert np.allclose(m.coords(m.matrix(x)), x)
    assert m.element_defect(m.matrix(x)) < 1e-12
    assert m.element_defect(np.eye(3)) > 0.5


def test_product_model():
    p = product_model(simple_model("su", 2), simple_model("su", 3))
    assert p.dim == 11 and p.matrix_size == 5
    assert jacobi_residual(p) < 1e-12
    gram = p.gram
    assert np.allclose(gram[:3, 3:], 0)
    q = model_from_descriptor({"product": [{"family": "su", "n": 2}, {"family": "su", "n": 2}]})
    assert q.dim == 6


def test_descriptor_errors():
    with pytest.raises(ModelError):
        model_from_descriptor({"family": "g", "n": 2})
    with pytest.raises(ModelError):
        model_from_descriptor({"n": 2})
