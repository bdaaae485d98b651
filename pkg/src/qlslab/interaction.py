"""Interaction Morawetz actions and the spacetime quantities they control.

Pair correlations are linear (zero-padded) FFT convolutions, so they agree
with the literal double sums over grid points; small-grid brute-force
oracles are provided for checking.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.special import erf

from . import grid as gs
from .grid import Grid
from .nonlinearity import eval_F_G, eval_h, eval_Htilde
from .solver import Problem

__all__ = [
    "KERNELS",
    "kernel_gradient",
    "mollified2d_profile",
    "density_momentum",
    "linear_convolve",
    "action_pair",
    "action_pair_direct",
    "hdot_half_sq",
    "PairAction",
    "interaction_lhs_3d",
    "lower_bound_3d",
    "difference_functional_2d",
    "difference_functional_2d_direct",
    "d_half_norm_sq",
    "interaction_2d",
    "erf_weight",
    "action_1d",
    "action_1d_direct",
    "identity_rhs_1d",
    "lhs_density_1d",
    "interaction_1d",
]

KERNELS = ("sign", "abs", "mollified2d")


def _offsets(grid: Grid) -> list:
    """Offset coordinates (-M..M-1) dx along each axis, in FFT order."""
    n = 2 * grid.M
    o = np.fft.fftfreq(n, d=1.0 / n) * grid.dx
    return list(np.meshgrid(*([o] * grid.dim), indexing="ij", sparse=True))


def mollified2d_profile(r, r0: float):
    """Radial derivative a'(r) of the weight with
    ``Lap a(r) = int_r^inf s log(s/r) w_r0(s) ds`` and ``w_r0 = s^-3 1{s >= r0}``.
    """
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        inner = (r / r0) * (0.75 + 0.5 * np.log(r0 / r))
        outer = 1.0 - r0 / (4.0 * r)
    out = np.where(r >= r0, outer, inner)
    return np.where(r == 0, 0.0, out)


def kernel_gradient(kind: str, xs, r0: float | None = None) -> list:
    """Components of ``grad a`` at the offsets ``xs`` (sparse meshgrid list)."""
    N = len(xs)
    if kind == "sign":
        if N != 1:
            raise ValueError("kernel 'sign' is one-dimensional")
        return [np.sign(xs[0])]
    r2 = sum(c * c for c in xs)
    r = np.sqrt(r2)
    with np.errstate(divide="ignore", invalid="ignore"):
        unit = [np.where(r > 0, c / r, 0.0) for c in xs]
    if kind == "abs":
        if N == 2:
            raise ValueError("kernel 'abs' is for N = 1 or N >= 3")
        return unit
    if kind == "mollified2d":
        if N != 2:
            raise ValueError("kernel 'mollified2d' is two-dimensional")
        if r0 is None or not r0 > 0:
            raise ValueError("mollified2d needs r0 > 0")
        ap = mollified2d_profile(r, r0)
        return [ap * e for e in unit]
    raise ValueError(f"unknown kernel {kind!r}")


def linear_convolve(grid: Grid, kern, f) -> np.ndarray:
    """``sum_j kern(x_i - x_j) f_j dx^N`` with kern sampled on the doubled offsets."""
    n = 2 * grid.M
    pad = np.zeros((n,) * grid.dim, dtype=np.result_type(f, float))
    pad[(slice(0, grid.M),) * grid.dim] = f
    out = gs.ifft(gs.fft(pad) * gs.fft(np.broadcast_to(kern, pad.shape)))
    out = out[(slice(0, grid.M),) * grid.dim] * grid.cell
    return out.real if np.isrealobj(f) and np.isrealobj(kern) else out


def density_momentum(grid: Grid, u):
    """``rho = |u|^2`` and ``p~ = Im(u grad conj(u))`` (list of components)."""
    u = grid.check(u)
    grads = gs.gradient(grid, u)
    return np.abs(u) ** 2, [np.imag(u * np.conj(g)) for g in grads]


def action_pair(grid: Grid, u, kernel: str, r0: float | None = None) -> float:
    """Pair action ``M = 4 int p~(x) . (grad a * rho)(x) dx``.

    Equal to ``2 iint grad a(x-y) . [rho(y) p~(x) - rho(x) p~(y)]``.
    """
    rho, p = density_momentum(grid, u)
    ga = kernel_gradient(kernel, _offsets(grid), r0)
    tot = 0.0
    for pc, gc in zip(p, ga):
        tot += float(np.sum(pc * linear_convolve(grid, gc, rho)) * grid.cell)
    return 4.0 * tot


def action_pair_direct(grid: Grid, u, kernel: str, r0: float | None = None) -> float:
    """Literal double sum of ``2 iint grad a(x-y) . [rho_y p~_x - rho_x p~_y]``."""
    if grid.M ** grid.dim > 4096:
        raise ValueError("direct double sum limited to 4096 points")
    rho, p = density_momentum(grid, u)
    pts = grid.points().reshape(-1, grid.dim)
    d = pts[:, None, :] - pts[None, :, :]
    ga = kernel_gradient(kernel, [d[..., j] for j in range(grid.dim)], r0)
    rf = rho.ravel()
    tot = 0.0
    for j in range(grid.dim):
        pj = p[j].ravel()
        tot += np.sum(ga[j] * (rf[None, :] * pj[:, None] - rf[:, None] * pj[None, :]))
    return float(2.0 * tot * grid.cell ** 2)


def hdot_half_sq(grid: Grid, u) -> float:
    """``||u||^2`` in the homogeneous H^(1/2) norm, ``int |k| |u^|^2``."""
    uh = gs.fft(grid.check(u))
    return float(np.sum(grid.kabs * np.abs(uh) ** 2) * grid.cell / np.prod(grid.shape))


def d_half_norm_sq(grid: Grid, f) -> float:
    """``||D^(1/2) f||^2_{L^2}`` for a real field."""
    return hdot_half_sq(grid, f)


@dataclass(frozen=True)
class PairAction:
    t: np.ndarray
    M: np.ndarray
    lhs_terms: dict


def _trapz_acc(t, y):
    return cumulative_trapezoid(np.asarray(y, dtype=float), np.asarray(t, dtype=float), initial=0.0)


# -- N = 3 ------------------------------------------------------------------

def lower_bound_3d(problem: Problem, u) -> float:
    """Right side of the sign inequality at N = 3: ``16 pi int (4 H~ + s) s``."""
    s = np.abs(u) ** 2
    Ht = eval_Htilde(problem.model.h, s)
    return float(16.0 * np.pi * gs.integrate(problem.grid, (4.0 * Ht + s) * s))


def interaction_lhs_3d(problem: Problem, times, fields) -> dict:
    """Accumulated ``int int |u|^4 + H~ |u|^2``, its fractional form and sups."""
    g = problem.grid
    if g.dim != 3:
        raise ValueError("interaction_lhs_3d needs N = 3")
    quart, htw, frac, act, hh = [], [], [], [], []
    for u in fields:
        s = np.abs(u) ** 2
        Ht = np.asarray(eval_Htilde(problem.model.h, s)) + 0.0 * s
        quart.append(gs.integrate(g, s * s))
        htw.append(gs.integrate(g, Ht * s))
        frac.append(gs.integrate(g, (s + np.sqrt(s * Ht)) ** 2))
        act.append(action_pair(g, u, "abs"))
        hh.append(hdot_half_sq(g, u))
    t = np.asarray(times, dtype=float)
    lhs = _trapz_acc(t, np.add(quart, htw))
    sup_h = float(np.max(hh)) if hh else 0.0
    return {
        "t": t,
        "quartic": _trapz_acc(t, quart),
        "htilde": _trapz_acc(t, htw),
        "lhs": lhs,
        "fractional": _trapz_acc(t, frac),
        "action": np.asarray(act),
        "sup_action": float(np.max(np.abs(act))) if act else 0.0,
        "sup_hdot_half": sup_h,
        "measured_C": float(lhs[-1] / sup_h) if sup_h > 0 else 0.0,
    }


# -- N = 2 ------------------------------------------------------------------

def _w_trunc(xs, r0):
    r = np.sqrt(sum(c * c for c in xs))
    with np.errstate(divide="ignore"):
        return np.where(r >= r0, 1.0 / np.maximum(r, r0) ** 3, 0.0)


def difference_functional_2d(grid: Grid, rho, r0: float, other=None) -> float:
    """``iint w_r0(|x-y|) [rho(x)-rho(y)][f(x)-f(y)]`` with ``f = other or rho``."""
    if grid.dim != 2:
        raise ValueError("difference functional is two-dimensional")
    if r0 < grid.dx * (1 - 1e-12):
        raise ValueError("r0 must be at least one grid spacing")
    f = rho if other is None else other
    w = _w_trunc(_offsets(grid), r0)
    S = linear_convolve(grid, w, np.ones(grid.shape))
    wf = linear_convolve(grid, w, f)
    wr = linear_convolve(grid, w, rho)
    c = grid.cell
    val = np.sum(rho * f * S) * 2 * c - np.sum(rho * wf) * c - np.sum(f * wr) * c
    return float(val)


def difference_functional_2d_direct(grid: Grid, rho, r0: float, other=None) -> float:
    if grid.M ** grid.dim > 4096:
        raise ValueError("direct double sum limited to 4096 points")
    f = (rho if other is None else other).ravel()
    rf = rho.ravel()
    pts = grid.points().reshape(-1, 2)
    d = pts[:, None, :] - pts[None, :, :]
    w = _w_trunc([d[..., 0], d[..., 1]], r0)
    val = np.sum(w * (rf[:, None] - rf[None, :]) * (f[:, None] - f[None, :]))
    return float(val * grid.cell ** 2)


def interaction_2d(problem: Problem, times, fields, r0: float) -> dict:
    """Accumulated difference functional (plus the H~ cross term) and D^(1/2) norm."""
    g = problem.grid
    diff, cross, dn, hh = [], [], [], []
    for u in fields:
        s = np.abs(u) ** 2
        Ht = np.asarray(eval_Htilde(problem.model.h, s)) + 0.0 * s
        diff.append(difference_functional_2d(g, s, r0))
        cross.append(difference_functional_2d(g, s, r0, Ht) if problem.model.delta else 0.0)
        dn.append(d_half_norm_sq(g, s))
        hh.append(hdot_half_sq(g, u))
    t = np.asarray(times, dtype=float)
    sup_h = float(np.max(hh)) if hh else 0.0
    lhs = _trapz_acc(t, np.add(diff, cross))
    return {"t": t, "difference": _trapz_acc(t, diff), "cross": _trapz_acc(t, cross),
            "lhs": lhs, "d_half": _trapz_acc(t, dn), "sup_hdot_half": sup_h,
            "measured_C": float(lhs[-1] / sup_h) if sup_h > 0 else 0.0}


# -- N = 1 ------------------------------------------------------------------

def erf_weight(x, eps: float):
    """``a(x) = int_0^(x/eps) exp(-t^2) dt`` and ``a'(x) = exp(-x^2/eps^2)/eps``."""
    x = np.asarray(x, dtype=float)
    return 0.5 * np.sqrt(np.pi) * erf(x / eps), np.exp(-(x / eps) ** 2) / eps


def _check_eps(grid: Grid, eps: float):
    if grid.dim != 1:
        raise ValueError("the erf action is one-dimensional")
    if eps < 2.0 * grid.dx * (1 - 1e-12):
        raise ValueError("eps must be at least two grid spacings")


def _rho_p_1d(grid, u):
    ux = gs.gradient(grid, u)[0]
    return 0.5 * np.abs(u) ** 2, np.imag(u * np.conj(ux)), ux


def action_1d(grid: Grid, u, eps: float) -> float:
    """``M_a = iint a(x-y) rho(y) p(x)`` with ``rho = |u|^2/2``, ``p = Im(u conj(u_x))``."""
    _check_eps(grid, eps)
    rho, p, _ = _rho_p_1d(grid, u)
    a, _ = erf_weight(_offsets(grid)[0], eps)
    return float(np.sum(p * linear_convolve(grid, a, rho)) * grid.cell)


def action_1d_direct(grid: Grid, u, eps: float) -> float:
    rho, p, _ = _rho_p_1d(grid, u)
    x = grid.x1d
    a, _ = erf_weight(x[:, None] - x[None, :], eps)
    return float(np.sum(a * p[:, None] * rho[None, :]) * grid.cell ** 2)


def identity_rhs_1d(problem: Problem, u, eps: float) -> dict:
    """The seven terms of the ``d/dt M_a`` identity, by quadrature."""
    g = problem.grid
    _check_eps(g, eps)
    u = g.check(u)
    rho, p, ux = _rho_p_1d(g, u)
    s = 2.0 * rho
    off = _offsets(g)[0]
    a, K = erf_weight(off, eps)
    Kr = linear_convolve(g, K, rho)
    Ks = 2.0 * Kr
    with np.errstate(divide="ignore", invalid="ignore"):
        rx_over = np.where(s > 0, 2.0 * np.real(np.conj(u) * ux) ** 2 / s, 0.0)
        p_over = np.where(s > 0, 2.0 * p ** 2 / s, 0.0)
    # rho_x^2 / rho = 2 (Re conj(u) u_x)^2 / |u|^2, bounded by 2 |u_x|^2
    c = g.cell
    terms = {}
    terms["density_gradient"] = float(np.sum(Kr * rx_over) * c)
    terms["momentum_spread"] = float(np.sum(Kr * p_over) * c - np.sum(linear_convolve(g, K, p) * p) * c)
    rxx = gs.laplacian(g, rho)
    terms["dispersion"] = float(-np.sum(Kr * rxx) * c)
    if problem.model.delta:
        h, h1, _ = eval_h(problem.model.h, s)
        hx = gs.gradient(g, h)[0]
        hxx = gs.laplacian(g, h)
        terms["quasilinear_h"] = float(-np.sum(Ks * h1 * s * hxx) * c)
        terms["quasilinear_grad"] = float(0.5 * np.sum(Ks * hx * hx) * c)
    else:
        terms["quasilinear_h"] = 0.0
        terms["quasilinear_grad"] = 0.0
    F, _, G, _, _ = eval_F_G(problem.model.f, s)
    terms["nonlinear"] = float(0.5 * np.sum(Ks * (np.asarray(G) - np.asarray(F) * s)) * c)
    force = gs.gradient(g, problem.v)[0] if problem.has_v else np.zeros(g.shape)
    if problem.has_w:
        wx = gs.gradient(g, problem.w)[0]
        force = force + gs.hartree(g, wx, s).real
    af = linear_convolve(g, a, s)
    # iint a(x-y) f(x) s(x) s(y) = int f s (a * s), a odd
    terms["potential"] = float(0.5 * np.sum(force * s * af) * c)
    terms["total"] = float(sum(v for k, v in terms.items()))
    return terms


def lhs_density_1d(problem: Problem, u) -> float:
    """``int {[5h' + 2h'' s] h' s + 1} (s_x)^2 + (G - F s) s`` at one state."""
    g = problem.grid
    s = np.abs(g.check(u)) ** 2
    sx = gs.gradient(g, s)[0]
    if problem.model.delta:
        _, h1, h2 = eval_h(problem.model.h, s)
        wgt = (5.0 * h1 + 2.0 * h2 * s) * h1 * s + 1.0
    else:
        wgt = 1.0
    F, _, G, _, _ = eval_F_G(problem.model.f, s)
    return float(gs.integrate(g, wgt * sx * sx + (np.asarray(G) - np.asarray(F) * s) * s))


def interaction_1d(problem: Problem, times, fields, eps: float) -> dict:
    """``M_a(t)``, the identity residual and the accumulated left side."""
    g = problem.grid
    _check_eps(g, eps)
    t = np.asarray(times, dtype=float)
    if t.size < 3:
        raise ValueError("need at least 3 samples")
    Ma = np.array([action_1d(g, u, eps) for u in fields])
    rhs = np.array([identity_rhs_1d(problem, u, eps)["total"] for u in fields])
    dM = (Ma[2:] - Ma[:-2]) / (t[2:] - t[:-2])
    resid = dM - rhs[1:-1]
    dens = [lhs_density_1d(problem, u) for u in fields]
    hh = [hdot_half_sq(g, u) for u in fields]
    sup_h = float(np.max(hh))
    lhs = _trapz_acc(t, dens)
    return {"t": t, "M": Ma, "rhs": rhs, "dM_dt": dM, "residual": resid,
            "scale": float(np.max(np.abs(dM))), "lhs": lhs, "sup_hdot_half": sup_h,
            "measured_C": float(lhs[-1] / sup_h) if sup_h > 0 else 0.0}
