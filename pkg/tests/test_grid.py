import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qlslab import grid as gs
from qlslab.grid import BoundaryMassWarning, Grid


def test_laplacian_eigenmodes():
    g = Grid(1, 8, np.pi)
    x = g.x1d
    assert np.allclose(gs.laplacian(g, np.exp(1j * x)), -np.exp(1j * x), atol=1e-13)
    assert np.allclose(gs.laplacian(g, np.exp(2j * x)), -4 * np.exp(2j * x), atol=1e-12)
    assert np.allclose(gs.laplacian(g, np.full(8, 3.0 + 0j)), 0.0, atol=1e-14)


def test_gradient_examples():
    g = Grid(1, 32, np.pi)
    x = g.x1d
    (d,) = gs.gradient(g, np.exp(1j * x))
    assert np.allclose(d, 1j * np.exp(1j * x), atol=1e-13)
    (d,) = gs.gradient(g, np.full(32, 2.0))
    assert np.allclose(d, 0.0, atol=1e-14)
    (d,) = gs.gradient(g, np.sin(x))
    assert np.max(np.abs(d - np.cos(x))) < 1e-12


def test_hartree_delta_kernel_is_identity():
    g = Grid(2, 16, 3.0)
    rng = np.random.default_rng(1)
    rho = rng.random(g.shape)
    w = np.zeros(g.shape)
    w[8, 8] = 1.0 / g.cell
    assert np.allclose(gs.hartree(g, w, rho), rho, atol=1e-13)
    assert np.allclose(gs.hartree(g, w, np.zeros(g.shape)), 0.0)


def test_hartree_matches_direct_sum():
    g = Grid(1, 16, 2.0)
    rng = np.random.default_rng(2)
    w = rng.standard_normal(16)
    rho = rng.standard_normal(16)
    M = g.M
    direct = np.array([sum(w[(i - j) % M + M // 2 - M if (i - j) % M >= M // 2 else (i - j) % M + M // 2]
                           * rho[j] for j in range(M)) for i in range(M)]) * g.dx
    assert np.max(np.abs(gs.hartree(g, w, rho) - direct)) < 1e-12


def test_hartree_direct_sum_2d():
    g = Grid(2, 16, 2.0)
    rng = np.random.default_rng(3)
    w = rng.standard_normal(g.shape)
    rho = rng.standard_normal(g.shape)
    M = g.M
    idx = lambda d: (d + M // 2) % M  # offset d sits at index M/2 + d
    direct = np.zeros(g.shape)
    for i in range(M):
        for j in range(M):
            acc = 0.0
            for a in range(M):
                for b in range(M):
                    acc += w[idx(i - a), idx(j - b)] * rho[a, b]
            direct[i, j] = acc * g.cell
    assert np.max(np.abs(gs.hartree(g, w, rho) - direct)) < 1e-12


def test_fractional_examples():
    g = Grid(1, 16, np.pi)
    x = g.x1d
    assert np.allclose(gs.fractional(g, np.exp(1j * x), 2.0), np.exp(1j * x), atol=1e-13)
    u = np.exp(3j * x) - np.exp(-1j * x)
    assert np.allclose(gs.fractional(g, u, 0.0), u, atol=1e-13)
    assert np.allclose(gs.fractional(g, np.exp(2j * x), -1.0), 0.5 * np.exp(2j * x), atol=1e-13)


@settings(max_examples=25, deadline=None)
@given(s=st.floats(-1.5, 2.5), t=st.floats(-1.5, 2.5))
def test_fractional_semigroup(s, t):
    g = Grid(1, 32, np.pi)
    rng = np.random.default_rng(4)
    u = rng.standard_normal(32) + 1j * rng.standard_normal(32)
    u -= u.mean()
    lhs = gs.fractional(g, gs.fractional(g, u, s), t)
    assert np.allclose(lhs, gs.fractional(g, u, s + t), atol=1e-9 * np.max(np.abs(lhs)) + 1e-9)


def test_integrate_examples():
    g = Grid(1, 64, np.pi)
    assert gs.integrate(g, np.ones(64)) == pytest.approx(2 * np.pi, rel=1e-14)
    assert gs.integrate(g, np.zeros(64)) == 0.0
    g = Grid(1, 512, 20.0)
    assert abs(gs.integrate(g, np.exp(-g.x1d ** 2)) - np.sqrt(np.pi)) < 1e-10


def test_moments_examples():
    g = Grid(1, 512, 20.0)
    u = np.exp(-g.x1d ** 2 / 2)
    m = gs.moments(g, u)
    assert m["dilation"] == pytest.approx(0.0, abs=1e-14)
    assert m["variance"] == pytest.approx(np.sqrt(np.pi) / 2, rel=1e-10)
    shifted = gs.moments(g, np.exp(-(g.x1d - 1.5) ** 2 / 2))
    assert shifted["variance"] > m["variance"]


def test_moments_warn_for_undecayed_field():
    g = Grid(1, 64, np.pi)
    with pytest.warns(BoundaryMassWarning):
        gs.moments(g, np.exp(1j * g.x1d))


def test_parseval_and_grad_norm():
    g = Grid(2, 32, 4.0)
    u = np.exp(-g.r2) * np.exp(1j * g.coords[0])
    grads = gs.gradient(g, u)
    direct = sum(gs.integrate(g, np.abs(d) ** 2) for d in grads)
    assert gs.grad_norm2(g, u) == pytest.approx(direct, rel=1e-12)


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid(1, 100, 1.0)
    with pytest.raises(ValueError):
        Grid(4, 16, 1.0)
    with pytest.raises(ValueError):
        Grid(1, 16, 1.0).check(np.zeros(8))


def test_boundary_fraction_for_localised_field():
    g = Grid(1, 256, 20.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert gs.boundary_fraction(g, np.exp(-g.x1d ** 2)) < 1e-100
