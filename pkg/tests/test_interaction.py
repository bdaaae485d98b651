import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from qlslab import interaction as ia
from qlslab.grid import Grid
from qlslab.nonlinearity import FSpec, HSpec, ModelSpec, PotentialSpec
from qlslab.solver import Problem, SolverConfig, run


def _random_field(grid, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)


@pytest.mark.parametrize("dim,M,kernel", [(1, 64, "sign"), (1, 256, "abs"), (3, 16, "abs"),
                                          (2, 32, "mollified2d")])
def test_pair_action_fft_matches_double_sum(dim, M, kernel):
    g = Grid(dim, M, 3.0)
    u = _random_field(g, dim + M)
    r0 = 2 * g.dx if kernel == "mollified2d" else None
    fast = ia.action_pair(g, u, kernel, r0)
    slow = ia.action_pair_direct(g, u, kernel, r0)
    assert abs(fast - slow) <= 1e-10 * max(1.0, abs(slow))


def test_pair_action_small_1d_grid():
    g = Grid(1, 16, 2.0)
    u = _random_field(g, 7)
    assert ia.action_pair(g, u, "sign") == pytest.approx(ia.action_pair_direct(g, u, "sign"), abs=1e-12)


def test_pair_action_real_field_vanishes():
    g = Grid(1, 64, 5.0)
    assert ia.action_pair(g, np.exp(-g.x1d ** 2), "sign") == pytest.approx(0.0, abs=1e-14)


@settings(max_examples=10, deadline=None)
@given(shift=st.integers(-20, 20))
def test_pair_action_translation_invariant(shift):
    g = Grid(1, 256, 20.0)
    x = g.x1d
    u = np.exp(-x ** 2 / 2 + 0.7j * x + 0.1j * x ** 2)
    base = ia.action_pair(g, u, "abs")
    assert ia.action_pair(g, np.roll(u, shift), "abs") == pytest.approx(base, abs=1e-10)


def test_difference_functional_matches_double_sum():
    g = Grid(2, 32, 4.0)
    rng = np.random.default_rng(3)
    rho = rng.random(g.shape)
    f = rng.random(g.shape)
    for other in (None, f):
        fast = ia.difference_functional_2d(g, rho, 2 * g.dx, other)
        slow = ia.difference_functional_2d_direct(g, rho, 2 * g.dx, other)
        assert abs(fast - slow) <= 1e-10 * abs(slow)


def test_difference_functional_constant_density():
    g = Grid(2, 32, 4.0)
    assert ia.difference_functional_2d(g, np.full(g.shape, 2.5), 0.5) == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(ValueError):
        ia.difference_functional_2d(g, np.ones(g.shape), 0.1 * g.dx)


def test_difference_functional_r0_refinement():
    # the truncation defect is O(r0) against a functional that scales with the
    # density width, so resolve the width first
    g = Grid(2, 128, 16.0)
    rho = np.exp(-g.r2 / 9.0)
    a = ia.difference_functional_2d(g, rho, 4 * g.dx)
    b = ia.difference_functional_2d(g, rho, 2 * g.dx)
    assert abs(a - b) < 0.1 * abs(b)


def test_d_half_single_mode():
    g = Grid(2, 32, np.pi)
    eps, k = 0.3, 2
    rho = 1.0 + eps * np.cos(k * g.coords[0]) + 0.0 * g.coords[1]
    area = (2 * np.pi) ** 2
    assert ia.d_half_norm_sq(g, rho) == pytest.approx(eps ** 2 * k * area / 2, rel=1e-12)


@pytest.mark.parametrize("r", [0.05, 0.3, 0.99, 1.0, 2.5, 10.0])
def test_mollified_profile_laplacian(r):
    r0 = 1.0
    h = 1e-5
    ap = lambda x: float(ia.mollified2d_profile(x, r0))
    lap = (ap(r + h) - ap(r - h)) / (2 * h) + ap(r) / r
    ref = quad(lambda s: s * np.log(s / r) * s ** -3, max(r, r0), np.inf)[0]
    assert lap == pytest.approx(ref, rel=1e-6)


def test_erf_weight_derivative():
    x = np.linspace(-3, 3, 13)
    h = 1e-6
    a_plus, _ = ia.erf_weight(x + h, 0.5)
    a_minus, _ = ia.erf_weight(x - h, 0.5)
    _, ap = ia.erf_weight(x, 0.5)
    assert np.allclose((a_plus - a_minus) / (2 * h), ap, atol=1e-7)


def test_action_1d_matches_direct():
    g = Grid(1, 128, 8.0)
    u = np.exp(-g.x1d ** 2 / 2) * np.exp(1j * np.sin(g.x1d))
    assert ia.action_1d(g, u, 0.5) == pytest.approx(ia.action_1d_direct(g, u, 0.5), abs=1e-12)


def test_action_1d_symmetries():
    g = Grid(1, 256, 16.0)
    x = g.x1d
    assert ia.action_1d(g, np.exp(-x ** 2 / 2), 0.5) == pytest.approx(0.0, abs=1e-14)
    # rho and p both even (boosted even profile): the odd weight integrates to zero
    boosted = np.exp(-x ** 2 / 2 + 0.8j * x)
    assert ia.action_1d(g, boosted, 0.5) == pytest.approx(0.0, abs=1e-12)
    # an even u with a chirp has odd p and gives a strictly positive action
    chirp = np.exp(-x ** 2 / 2 - 0.3j * x ** 2)
    assert ia.action_1d(g, chirp, 0.5) > 1e-3


def test_eps_resolution_enforced():
    g = Grid(1, 64, 16.0)
    with pytest.raises(ValueError):
        ia.action_1d(g, np.exp(-g.x1d ** 2) + 0j, g.dx)


@pytest.mark.parametrize("model", [
    ModelSpec(1, f=FSpec(((-1.0, 1.0),))),
    ModelSpec(1, f=FSpec(((-1.0, 1.0),)), v=PotentialSpec("smoothed-inverse-power", 0.5, 1.0, 1.0),
              w=PotentialSpec("smoothed-inverse-power", 0.3, 1.0, 1.0)),
])
def test_identity_1d_residual(model):
    g = Grid(1, 256, 32.0)
    p = Problem(model, g)
    u0 = np.exp(-g.x1d ** 2 / 2) + 0j
    tr = run(p, SolverConfig(1e-3, 0.6, sample_every=10), u0, [lambda s: s.u])
    res = ia.interaction_1d(p, tr.times, tr.observations[0], 0.5)
    assert np.max(np.abs(res["residual"])) <= 1e-3 * res["scale"]
    assert np.all(res["dM_dt"] >= -1e-6 * res["scale"])


def test_identity_1d_quasilinear_residual():
    g = Grid(1, 256, 24.0)
    p = Problem(ModelSpec(1, HSpec("power", 1.0), FSpec(((-1.0, 1.0),))), g)
    u0 = 0.6 * np.exp(-g.x1d ** 2 / 2) + 0j
    tr = run(p, SolverConfig(1e-3, 0.4, "ifrk4", sample_every=10), u0, [lambda s: s.u])
    res = ia.interaction_1d(p, tr.times, tr.observations[0], 0.5)
    assert np.max(np.abs(res["residual"])) <= 1e-3 * res["scale"]


def test_interaction_3d_free_gaussian():
    g = Grid(3, 32, 12.0)
    p = Problem(ModelSpec(3), g)
    u0 = np.exp(-g.r2 / 2) + 0j
    tr = run(p, SolverConfig(1e-2, 2.0, sample_every=20), u0, [lambda s: s.u])
    res = ia.interaction_lhs_3d(p, tr.times, tr.observations[0])
    assert np.isfinite(res["lhs"][-1]) and res["lhs"][-1] > 0
    assert np.all(res["htilde"] == 0.0)
    assert res["measured_C"] > 0


def test_lower_bound_3d_zero_field():
    g = Grid(3, 16, 4.0)
    assert ia.lower_bound_3d(Problem(ModelSpec(3), g), np.zeros(g.shape)) == 0.0
