import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from qlslab.nonlinearity import (
    FSpec,
    HSpec,
    ModelSpec,
    PotentialSpec,
    classify_constants,
    eval_F_G,
    eval_h,
    eval_h_weight,
    eval_Htilde,
    eval_potential,
    eval_potential_virial,
)


def test_eval_h_examples():
    assert eval_h(HSpec("power", 1.0), 4.0) == (4.0, 1.0, 0.0)
    assert eval_h(HSpec(), 7.0) == (0.0, 0.0, 0.0)
    assert eval_h(HSpec("power", 2.0), 3.0) == pytest.approx((9.0, 6.0, 2.0))


def test_eval_h_rejects_negative_density():
    with pytest.raises(ValueError):
        eval_h(HSpec("power", 1.0), -1.0)


def test_eval_F_G_examples():
    F, dF, G, G1, G2 = eval_F_G(FSpec(((-1.0, 1.0),)), 2.0)
    assert (F, G) == (-2.0, -2.0)
    assert eval_F_G(FSpec(), 3.3) == (0.0, 0.0, 0.0, 0.0, 0.0)
    F, dF, G, G1, G2 = eval_F_G(FSpec(((1.0, 1.0), (-1.0, 2.0))), 1.0)
    assert G1 == pytest.approx(0.5)
    assert G2 == pytest.approx(1.0 / 3.0)
    assert G == pytest.approx(1.0 / 6.0)


@settings(max_examples=50, deadline=None)
@given(s=st.floats(0.0, 5.0), b=st.floats(-2.0, 2.0), beta=st.floats(0.3, 3.0))
def test_G_is_primitive_of_F(s, b, beta):
    spec = FSpec(((b, beta),))
    G = eval_F_G(spec, s)[2]
    ref = quad(lambda x: eval_F_G(spec, x)[0], 0.0, s)[0]
    assert G == pytest.approx(ref, rel=1e-8, abs=1e-10)


def test_Htilde_examples():
    assert eval_Htilde(HSpec("power", 1.0), 2.0) == pytest.approx(2.0)
    assert eval_Htilde(HSpec(), 5.0) == 0.0
    assert eval_Htilde(HSpec("power", 0.5), 4.0) == pytest.approx(1.0)


@settings(max_examples=30, deadline=None)
@given(s=st.floats(0.01, 4.0), alpha=st.floats(0.5, 3.0))
def test_Htilde_quadrature(s, alpha):
    spec = HSpec("power", alpha)
    ref = quad(lambda x: eval_h(spec, x)[1] ** 2 * x, 0.0, s)[0]
    assert eval_Htilde(spec, s) == pytest.approx(ref, rel=1e-8)


@settings(max_examples=30, deadline=None)
@given(s=st.floats(0.01, 4.0), alpha=st.floats(0.5, 3.0))
def test_h_weight_matches_derivatives(s, alpha):
    spec = HSpec("power", alpha)
    h, h1, h2 = eval_h(spec, s)
    assert eval_h_weight(spec, s) == pytest.approx((2 * h2 * h1 * s + h1 * h1) * s, rel=1e-10)


def test_potential_examples():
    assert eval_potential(PotentialSpec(), np.array([1.0, 2.0, 3.0])) == 0.0
    v = eval_potential(PotentialSpec("smoothed-inverse-power", 1.0, 2.0, 0.0), np.array([0.0, 2.0]))
    assert v == pytest.approx(-0.25)
    assert eval_potential(PotentialSpec("bounded-rational", 1.0), 0.0) == 0.0


@pytest.mark.parametrize("spec", [
    PotentialSpec("smoothed-inverse-power", 1.3, 1.5, 0.4),
    PotentialSpec("bounded-rational", 0.7),
])
def test_potential_virial_finite_difference(spec):
    x = np.array([0.3, -0.8, 1.1])
    h = 1e-6
    g = [(eval_potential(spec, x + h * e) - eval_potential(spec, x - h * e)) / (2 * h) for e in np.eye(3)]
    assert eval_potential_virial(spec, x) == pytest.approx(float(np.dot(x, g)), rel=1e-7)


def test_classify_quasilinear_cubic_3d():
    m = ModelSpec(3, HSpec("power", 1.0), FSpec(((-1.0, 1.0),)))
    cc = classify_constants(m)
    assert cc.k1 == 1.0
    assert cc.k2 == pytest.approx(0.5)
    assert cc.l == 1.0
    assert cc.case == "Case2"


def test_classify_septic_1d_is_case1():
    cc = classify_constants(ModelSpec(1, f=FSpec(((-1.0, 3.0),))))
    assert cc.case == "Case1"
    assert cc.l == 0.0


def test_classify_zero_model():
    cc = classify_constants(ModelSpec())
    assert cc.case == "Case1" and cc.l == 0.0


def test_classify_potential_constants():
    v = PotentialSpec("smoothed-inverse-power", 1.0, 1.5, 0.1)
    cc = classify_constants(ModelSpec(3, v=v))
    assert cc.k4 == pytest.approx(0.5)
    assert cc.case == "Case2"
    cc = classify_constants(ModelSpec(3, v=PotentialSpec("smoothed-inverse-power", 1.0, 2.0, 0.1)))
    assert cc.k4 == 0.0 and cc.case == "Case1"


@settings(max_examples=50, deadline=None)
@given(N=st.integers(1, 3), beta=st.floats(0.2, 1.9))
def test_defocusing_sign_identity(N, beta):
    # N F s - (N+2) G = (2 - N beta) |G| for F = -s^beta
    s = 1.7
    F, _, G, _, _ = eval_F_G(FSpec(((-1.0, beta),)), s)
    assert N * F * s - (N + 2) * G == pytest.approx((2 - N * beta) * abs(G), rel=1e-10)
    cc = classify_constants(ModelSpec(N, f=FSpec(((-1.0, beta),))), "primitive")
    assert (cc.case == "Case1") == (N * beta >= 2)
    if N * beta < 2:
        assert cc.l == pytest.approx(2 - N * beta)
