"""Scalar functionals of a state or trajectory.

Mass, energy, virial quantities, the pseudoconformal functional P(t) and its
rate theta(t), the defect density Phi, the weighted Morawetz integrals with
their bound constants, mixed-norm spacetime bounds and decay-rate fits.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import astuple, dataclass, fields

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.special import gamma as _gamma

from . import grid as gs
from .checker import HypothesisError, cr_terms, theorem3_weight
from .nonlinearity import ModelSpec, classify_constants, eval_F_G, eval_h, eval_h_weight
from .solver import Problem

__all__ = [
    "DiagnosticRecord",
    "RECORD_FIELDS",
    "record",
    "Recorder",
    "invariants",
    "phi",
    "phi_density",
    "virial",
    "pseudoconformal",
    "pseudoconformal_forms",
    "WeightSpec",
    "MorawetzObserver",
    "MorawetzResult",
    "morawetz_estimates",
    "morawetz_bound",
    "decay_bound",
    "spacetime_bounds",
    "bound_f_constant",
    "DecayFit",
    "decay_fit",
    "predicted_decay",
    "cr_constant",
    "gradient_limit",
    "monotone_bound_check",
    "g1_absorption",
    "records_to_arrays",
]


@dataclass(frozen=True)
class DiagnosticRecord:
    """All scalar functionals at one sampled time (CSV column order)."""

    t: float
    mass: float
    energy: float
    variance: float
    dilation: float
    P: float
    theta: float
    phi: float
    grad_l2: float
    gradh_l2: float
    pot_mass: float
    hartree_quart: float
    g_int: float
    g1_int: float
    g2_int: float

    def as_row(self) -> tuple:
        return astuple(self)


RECORD_FIELDS = tuple(f.name for f in fields(DiagnosticRecord))


def _h_of(problem: Problem, s):
    if problem.model.delta == 0:
        return None
    return eval_h(problem.model.h, s)[0]


def _parts(problem: Problem, u, t: float, with_moments: bool = True) -> dict:
    g = problem.grid
    model = problem.model
    u = g.check(u)
    s = np.abs(u) ** 2
    d = {"t": float(t), "mass": gs.integrate(g, s), "grad_l2": gs.grad_norm2(g, u)}
    hv = _h_of(problem, s)
    d["gradh_l2"] = gs.grad_norm2(g, hv) if hv is not None else 0.0
    F, _, G, G1, G2 = eval_F_G(model.f, s)
    d["g_int"] = gs.integrate(g, np.asarray(G) + 0.0 * s)
    d["g1_int"] = gs.integrate(g, np.asarray(G1) + 0.0 * s)
    d["g2_int"] = gs.integrate(g, np.asarray(G2) + 0.0 * s)
    d["fs_int"] = gs.integrate(g, np.asarray(F) * s + 0.0 * s)
    d["v_int"] = gs.integrate(g, problem.v * s)
    d["pot_mass"] = gs.integrate(g, np.abs(problem.v) * s)
    d["vvir_int"] = gs.integrate(g, (2.0 * problem.v + problem.xgradv) * s)
    if problem.has_w:
        d["w_quart"] = gs.integrate(g, problem.hartree(s) * s)
        d["hartree_quart"] = gs.integrate(g, problem.convolve(problem.absw_hat, s) * s)
        d["wvir_quart"] = gs.integrate(g, problem.convolve(problem.wvir_hat, s) * s)
    else:
        d["w_quart"] = d["hartree_quart"] = d["wvir_quart"] = 0.0
    if model.delta:
        grads = gs.gradient(g, u)
        du2 = sum(np.abs(c) ** 2 for c in grads)
        d["hq_int"] = gs.integrate(g, eval_h_weight(model.h, s) * du2)
    else:
        d["hq_int"] = 0.0
    if with_moments:
        mom = gs.moments(g, u)
        d["variance"] = mom["variance"]
        d["dilation"] = mom["dilation"]
    return d


def _energy(delta, p) -> float:
    return (0.5 * p["grad_l2"] + 0.5 * delta * p["gradh_l2"] - 0.5 * p["v_int"]
            - 0.5 * p["g_int"] - 0.25 * p["w_quart"])


def _phi(delta, p) -> float:
    return (delta * p["gradh_l2"] + p["g1_int"] + p["g2_int"] + p["pot_mass"]
            + 0.5 * p["hartree_quart"])


def _theta(N, delta, p) -> float:
    q = -4.0 * N * delta * p["hq_int"]
    q -= (N + 2.0) * p["g_int"] - N * p["fs_int"]
    q -= p["vvir_int"]
    q -= p["wvir_quart"]
    return q


def _P(t, delta, p) -> float:
    """Expanded pseudoconformal functional; ``|(x - 2it grad)u|^2`` is split
    into variance, ``4t * dilation`` and ``4t^2 int |grad u|^2``."""
    t2 = t * t
    return (p["variance"] + 4.0 * t * p["dilation"] + 4.0 * t2 * p["grad_l2"]
            + 4.0 * t2 * delta * p["gradh_l2"] - 4.0 * t2 * p["g_int"]
            - 4.0 * t2 * p["v_int"] - 2.0 * t2 * p["w_quart"])


def record(problem: Problem, u, t: float = 0.0) -> DiagnosticRecord:
    """Evaluate every functional of :class:`DiagnosticRecord` at one state."""
    p = _parts(problem, u, t)
    delta = problem.model.delta
    return DiagnosticRecord(
        t=float(t), mass=p["mass"], energy=_energy(delta, p), variance=p["variance"],
        dilation=p["dilation"], P=_P(t, delta, p), theta=_theta(problem.model.dim, delta, p),
        phi=_phi(delta, p), grad_l2=p["grad_l2"], gradh_l2=p["gradh_l2"],
        pot_mass=p["pot_mass"], hartree_quart=p["hartree_quart"], g_int=p["g_int"],
        g1_int=p["g1_int"], g2_int=p["g2_int"])


class Recorder:
    """Observer returning a :class:`DiagnosticRecord` per sampled state."""

    def __init__(self, problem: Problem):
        self.problem = problem

    def __call__(self, state) -> DiagnosticRecord:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", gs.BoundaryMassWarning)
            return record(self.problem, state.u, state.t)


def invariants(problem: Problem, u) -> dict:
    """Mass ``int |u|^2`` and the conserved energy."""
    p = _parts(problem, u, 0.0, with_moments=False)
    return {"mass": p["mass"], "energy": _energy(problem.model.delta, p)}


def phi_density(problem: Problem, u) -> np.ndarray:
    """Pointwise defect density Phi (nonnegative)."""
    g = problem.grid
    s = np.abs(g.check(u)) ** 2
    _, _, _, G1, G2 = eval_F_G(problem.model.f, s)
    out = np.abs(G1) + np.abs(G2) + np.abs(problem.v) * s
    if problem.model.delta:
        hv = eval_h(problem.model.h, s)[0]
        out = out + sum(np.abs(c) ** 2 for c in gs.gradient(g, hv))
    if problem.has_w:
        out = out + 0.5 * problem.convolve(problem.absw_hat, s) * s
    return np.asarray(out, dtype=float)


def phi(problem: Problem, u) -> float:
    """``int Phi dx``."""
    p = _parts(problem, u, 0.0, with_moments=False)
    return _phi(problem.model.delta, p)


def records_to_arrays(records) -> dict:
    """Column arrays keyed by field name."""
    rows = np.array([r.as_row() for r in records], dtype=float).reshape(-1, len(RECORD_FIELDS))
    return {name: rows[:, j] for j, name in enumerate(RECORD_FIELDS)}


# -- virial and pseudoconformal identities ---------------------------------

def virial(times, variance, dilation) -> dict:
    """Residual of ``d/dt variance = -4 dilation`` by centered differences.

    The residual is reported at interior samples, in units of variance per
    unit time, together with the scale ``max |d/dt variance|``.
    """
    t = np.asarray(times, dtype=float)
    var = np.asarray(variance, dtype=float)
    dil = np.asarray(dilation, dtype=float)
    if t.size < 3:
        raise ValueError("the virial residual needs at least 3 samples")
    dvar = (var[2:] - var[:-2]) / (t[2:] - t[:-2])
    res = dvar + 4.0 * dil[1:-1]
    return {"t": t[1:-1], "dvar_dt": dvar, "residual": res,
            "scale": float(np.max(np.abs(dvar))) if dvar.size else 0.0}


def pseudoconformal(times, P, theta) -> dict:
    """Residual ``R(t) = P(t) - P(0) - 4 int_0^t tau theta(tau) dtau`` (trapezoid)."""
    t = np.asarray(times, dtype=float)
    P = np.asarray(P, dtype=float)
    th = np.asarray(theta, dtype=float)
    acc = cumulative_trapezoid(t * th, t, initial=0.0)
    R = P - P[0] - 4.0 * acc
    return {"t": t, "P": P, "theta": th, "R": R,
            "scale": np.maximum(np.abs(P[0]), np.abs(P))}


def pseudoconformal_forms(problem: Problem, u, t: float) -> dict:
    """Direct ``int |(x - 2it grad)u|^2`` versus its expanded evaluation."""
    g = problem.grid
    grads = gs.gradient(g, g.check(u))
    direct = sum(gs.integrate(g, np.abs(c * u - 2j * t * d) ** 2) for c, d in zip(g.coords, grads))
    p = _parts(problem, u, t)
    expanded = p["variance"] + 4.0 * t * p["dilation"] + 4.0 * t * t * p["grad_l2"]
    return {"direct": float(direct), "expanded": float(expanded),
            "difference": float(direct - expanded)}


# -- Morawetz weights and estimates -----------------------------------------

ESTIMATES = ("A", "B", "C", "D", "E")


@dataclass(frozen=True)
class WeightSpec:
    """Weight families for the Morawetz integrals.

    ``constant``: 1. ``poly-x``: ``a(x) = (1+|x|^2)^sigma`` with exponent theta
    on Phi. ``poly-t``: ``b0 + t^k``. ``poly-xt``: ``(c(x) + t)^k`` with
    ``c(x) = c0`` or ``c0 (1+|x|^2)^(1/2)`` when ``radial`` is set.
    """

    kind: str = "constant"
    theta: float = 1.0
    sigma: float = 0.0
    k: float = 2.0
    b0: float = 0.0
    c0: float = 0.0
    radial: bool = False

    def __post_init__(self):
        if self.kind not in ("constant", "poly-x", "poly-t", "poly-xt"):
            raise ValueError(f"unknown weight kind {self.kind!r}")

    @property
    def estimate(self) -> str:
        return {"constant": "C", "poly-x": "A", "poly-t": "B", "poly-xt": "D"}[self.kind]

    @property
    def c_min(self) -> float:
        return self.c0

    def spatial(self, grid) -> np.ndarray | float:
        if self.kind == "poly-x":
            return (1.0 + grid.r2) ** self.sigma
        if self.kind == "poly-xt" and self.radial:
            return self.c0 * np.sqrt(1.0 + grid.r2)
        if self.kind == "poly-xt":
            return self.c0
        return 1.0

    def integral_inverse(self, N: int) -> float:
        """``(int a^(-1/(1-theta)) dx)^(1-theta)`` for ``a = (1+|x|^2)^sigma``."""
        qq = self.sigma / (1.0 - self.theta)
        if not qq > N / 2.0:
            raise HypothesisError("1/a in L^(1/(1-theta)) needs 2 sigma/(1-theta) > N")
        val = math.pi ** (N / 2.0) * _gamma(qq - N / 2.0) / _gamma(qq)
        return float(val ** (1.0 - self.theta))


def validate_weight(weight: WeightSpec, estimate: str, N: int, l: float = 0.0,
                    cr: float = 0.0, defocusing: bool = True) -> None:
    """Raise :class:`HypothesisError` naming the first violated inequality."""
    rep = theorem3_weight(estimate, N=N, theta=weight.theta, sigma=weight.sigma, k=weight.k,
                          b0=weight.b0, c_min=weight.c_min, l=l, cr=cr, defocusing=defocusing)
    if rep.failed:
        raise HypothesisError(f"estimate ({estimate}): {rep.failed[0].name} fails")


class MorawetzObserver:
    """Spatial integrand of one Morawetz estimate at each sampled state."""

    def __init__(self, problem: Problem, weight: WeightSpec, estimate: str | None = None):
        self.problem = problem
        self.weight = weight
        self.estimate = estimate or weight.estimate
        if self.estimate not in ESTIMATES:
            raise ValueError(f"unknown estimate {self.estimate!r}")
        self._a = weight.spatial(problem.grid)

    def value(self, u, t: float) -> float:
        g = self.problem.grid
        dens = phi_density(self.problem, u)
        w = self.weight
        est = self.estimate
        if est == "A":
            return gs.integrate(g, dens ** w.theta / self._a)
        if est in ("C", "E"):
            return gs.integrate(g, dens)
        if est == "B":
            return t * t * gs.integrate(g, dens) / (w.b0 + t ** w.k) if t > 0 or w.b0 > 0 else 0.0
        # D
        den = (self._a + t) ** w.k
        if t == 0 and np.all(np.asarray(den) == 0):
            return 0.0
        return t * t * gs.integrate(g, dens / den)

    def __call__(self, state) -> float:
        return self.value(state.u, state.t)


def morawetz_bound(estimate: str, E: float, C: float, weight: WeightSpec, N: int,
                   l: float = 0.0, cr: float = 0.0, defocusing: bool = True) -> dict:
    """Bound constants M1..M5 from ``E = E(u0)`` and ``C = int |x u0|^2``.

    Returns ``{"bound": value, "variant": ...}``. For (D) and (E) ``bound`` is
    the printed display and ``variant`` the value the integration steps of
    the derivation produce; for (C) in the combined case ``bound`` uses the
    factor ``(1+C_r)/(1-C_r)`` and ``variant`` the printed ``(1 + C(u0))``.
    """
    k = weight.k
    f = 1.0 if defocusing else (1.0 + cr) / (1.0 - cr)
    out = {"estimate": estimate}
    if estimate == "A":
        th = weight.theta
        core = (2.0 * E) ** th + (C / 4.0) ** th / (2.0 * th - 1.0)
        out["bound"] = f ** th * core * weight.integral_inverse(N)
    elif estimate == "B":
        second = 2.0 * E / (3.0 * weight.b0) if weight.b0 > 0 else 2.0 * E / (3.0 - k)
        out["bound"] = f * (second + C / (4.0 * (k - 1.0)))
    elif estimate == "C":
        out["bound"] = f * (2.0 * E + C / 4.0)
        if not defocusing:
            out["variant"] = (1.0 + C) / (1.0 - cr) * (2.0 * E + C / 4.0)
    elif estimate == "D":
        first = 2.0 * E / (3.0 * weight.c0 ** k) if weight.c0 > 0 else 2.0 * E / (3.0 - k)
        if defocusing:
            tail = 4.0 * l * E + C
            out["bound"] = first + C / (4.0 * (k - 1.0)) + tail / (4.0 * l * (k - (l + 1.0)))
            if weight.c0 > 0:
                out["bound"] = first + tail / (4.0 * l * (k - (l + 1.0)))
            out["variant"] = first + C / (4.0 * (k - 1.0)) + tail / (4.0 * (k - (l + 1.0)))
        else:
            tail = 4.0 * l * E * (1 + cr) + C * (1 - cr)
            den = 4.0 * ((k - 1.0) * (1 - cr) - l * (1 + cr))
            out["bound"] = f * (first + C / (4.0 * (k - 1.0)) + tail / den)
    elif estimate == "E":
        if defocusing:
            tail = 4.0 * l * E + C
            out["bound"] = 2.0 * E + C / 4.0 + tail / (4.0 * l * (1.0 - l))
            out["variant"] = 2.0 * E + C / 4.0 + tail / (4.0 * (1.0 - l))
        else:
            tail = 4.0 * l * E * (1 + cr) + C * (1 - cr)
            out["bound"] = f * (2.0 * E + C / 4.0 + tail / (4.0 * ((1 - cr) - l * (1 + cr))))
    else:
        raise ValueError(f"unknown estimate {estimate!r}")
    return out


def decay_bound(t, E: float, C: float, l: float = 0.0, cr: float = 0.0,
                defocusing: bool = True):
    """Pointwise-in-time upper bound on ``int Phi`` (valid for t >= 1)."""
    t = np.asarray(t, dtype=float)
    if defocusing:
        if l == 0:
            return C / (4.0 * t ** 2)
        return C / (4.0 * t ** 2) + (4.0 * l * E + C) / (4.0 * t ** (2.0 - l))
    rho = (1 + cr) / (1 - cr)
    if l == 0:
        return C * rho / (4.0 * t ** 2)
    lam = l * rho
    return rho / 4.0 * (C / t ** 2 + (4 * l * E * (1 + cr) + C * (1 - cr)) / ((1 - cr) * t ** (2 - lam)))


@dataclass(frozen=True)
class MorawetzResult:
    times: np.ndarray
    accumulated: np.ndarray
    bound: float
    variant: float | None
    margin: np.ndarray
    tail_estimate: float
    tail_ok: bool

    @property
    def holds(self) -> bool:
        return bool(np.all(self.margin >= 0))


def morawetz_estimates(problem: Problem, times, values, u0, weight: WeightSpec,
                       estimate: str | None = None, cr: float = 0.0) -> MorawetzResult:
    """Accumulate a sampled Morawetz integrand and compare with its bound.

    ``values`` are the spatial integrals from :class:`MorawetzObserver`. The
    weight is validated against the estimate's hypotheses first.
    """
    model = problem.model
    est = estimate or weight.estimate
    cc = classify_constants(model)
    validate_weight(weight, est, model.dim, l=cc.l, cr=cr, defocusing=model.defocusing)
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    acc = cumulative_trapezoid(y, t, initial=0.0)
    inv = invariants(problem, u0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", gs.BoundaryMassWarning)
        C0 = gs.moments(problem.grid, u0)["variance"]
    b = morawetz_bound(est, inv["energy"], C0, weight, model.dim, cc.l, cr, model.defocusing)
    T = float(t[-1]) if t.size else 0.0
    tail = _tail_estimate(est, weight, inv["energy"], C0, cc.l, T)
    tail_ok = bool(acc.size and acc[-1] > 0 and tail <= 0.05 * acc[-1]) or not np.any(y)
    return MorawetzResult(t, acc, float(b["bound"]), b.get("variant"),
                          b["bound"] - acc, float(tail), tail_ok)


def _tail_estimate(est, weight, E, C, l, T) -> float:
    """Upper estimate of the integral beyond T from the pointwise decay bound."""
    if T <= 1.0:
        return math.inf
    if est == "A":
        th = weight.theta
        return (C / 4.0) ** th * T ** (1 - 2 * th) / (2 * th - 1) * weight.integral_inverse(1)
    if est == "B":
        return C / (4.0 * (weight.k - 1.0)) * T ** (1 - weight.k)
    if est == "C":
        return C / (4.0 * T)
    if est == "D":
        k = weight.k
        return C / (4 * (k - 1)) * T ** (1 - k) + (4 * l * E + C) / (4 * (k - l - 1)) * T ** (1 + l - k)
    if est == "E":
        return C / (4 * T) + (4 * l * E + C) / (4 * (1 - l)) * T ** (l - 1)
    raise ValueError(est)


# -- spacetime bounds ----------------------------------------------------------

def _tail_slope(t, y):
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    T = t[-1]
    sel = (t >= T / 2.0) & (y > 0)
    if sel.sum() < 2:
        return -math.inf
    return float(np.polyfit(np.log(t[sel]), np.log(y[sel]), 1)[0])


def spacetime_bounds(times, spatial, p: float, theta: float = 1.0) -> dict:
    """Mixed norm ``(int (int w Phi^theta dx)^p dt)^(1/p)`` on samples.

    ``spatial`` holds the sampled ``int w Phi^theta dx``. The verdict is
    ``finite`` when the tail slope s of the inner integral on [T/2, T] gives
    an integrable power, i.e. ``p * s < -1``, and ``growing`` otherwise.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(spatial, dtype=float)
    if not np.any(y):
        return {"lhs": 0.0, "slope": -math.inf, "verdict": "finite"}
    lhs = float(np.trapezoid(y ** p, t) ** (1.0 / p))
    s = _tail_slope(t, y)
    return {"lhs": lhs, "slope": s, "verdict": "finite" if p * s < -1.0 else "growing"}


def bound_f_constant(E: float, C: float, p: float, l: float = 0.0, c_w: float = 1.0,
                     theta: float = 1.0) -> float:
    """Right side of Bound (F) in the defocusing case.

    For ``theta = 1`` the weight is bounded by ``c_w``; for ``theta < 1``
    ``c_w`` is the bound on ``int w^(1/(1-theta)) dx`` and enters as
    ``c_w^(1-theta)``. ``l = 0`` (Case 1) drops the slower-decay term.
    """
    pe = theta * p
    ct = 1.0 if pe < 1 else 2.0 ** ((pe - 1.0) / pe)
    cw = c_w if theta == 1.0 else c_w ** (1.0 - theta)
    inner = (2.0 * E) ** theta + ct * ct * C ** theta / (4.0 ** theta * (2 * pe - 1) ** (1 / p))
    if l:
        inner += ct * ct * (4 * l * E + C) ** theta / (4.0 ** theta * ((2 - l) * pe - 1) ** (1 / p))
    return float(cw * ct * inner)


# -- decay ------------------------------------------------------------------

@dataclass(frozen=True)
class DecayFit:
    iota: float
    stderr: float
    t_lo: float
    t_hi: float
    n: int
    predicted: float | None = None


def decay_fit(t, y, window: tuple | None = None, predicted: float | None = None) -> DecayFit:
    """Least-squares ``iota`` in ``y ~ C t^(-iota)`` on a log-log window.

    The window must lie in ``t >= 1`` and span at least one decade.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    lo, hi = window if window is not None else (max(1.0, float(t.min(initial=1.0))), float(t.max(initial=1.0)))
    sel = (t >= lo) & (t <= hi) & (y > 0)
    # the window must span a decade and the samples must cover 90% of it in log t
    if (lo < 1.0 or hi < 10.0 * lo * (1 - 1e-12) or sel.sum() < 3
            or np.log(t[sel].max() / t[sel].min()) < 0.9 * np.log(hi / lo)):
        raise ValueError("decay fit needs at least one decade of t past t = 1")
    X = np.log(t[sel])
    Y = np.log(y[sel])
    A = np.vstack([X, np.ones_like(X)]).T
    coef, res, _, _ = np.linalg.lstsq(A, Y, rcond=None)
    n = int(sel.sum())
    resid = Y - A @ coef
    s2 = float(resid @ resid) / max(n - 2, 1)
    cov = s2 * np.linalg.inv(A.T @ A)
    return DecayFit(float(-coef[0]), float(math.sqrt(cov[0, 0])), float(t[sel].min()),
                    float(t[sel].max()), n, predicted)


def predicted_decay(model: ModelSpec, cr: float = 0.0) -> float:
    """``2``, ``2 - l`` or ``2 - l(1+C_r)/(1-C_r)`` by sign case."""
    cc = classify_constants(model)
    if cc.case == "Case1":
        return 2.0
    if model.defocusing:
        return 2.0 - cc.l
    return 2.0 - cc.l * (1 + cr) / (1 - cr)


def cr_constant(model: ModelSpec, u0=None, grid=None, mass: float | None = None,
                C_s: float | None = None, constants: dict | None = None) -> float:
    """C_r(u0) from the closed-form power-family constants.

    Pass either ``mass`` (``||u0||^2``) or ``u0`` with its grid.
    """
    if model.dim < 3:
        raise ValueError("C_r is not applicable for N < 3")
    if mass is None:
        mass = gs.integrate(grid, np.abs(u0) ** 2)
    T3, T4, _ = cr_terms(model, mass, C_s=C_s, constants=constants)
    return float(T3 + T4)


def gradient_limit(records, E0: float) -> dict:
    """Gap ``2E(u0) - int |grad u|^2`` as a time series (nonnegative when defocusing)."""
    a = records_to_arrays(records)
    gap = 2.0 * E0 - a["grad_l2"]
    return {"t": a["t"], "grad_l2": a["grad_l2"], "gap": gap, "abs_gap": np.abs(gap),
            "phi": a["phi"]}


def monotone_bound_check(records, C0: float) -> dict:
    """``t^2 int Phi <= C(u0)/4`` for t >= 1."""
    a = records_to_arrays(records)
    sel = a["t"] >= 1.0
    vals = a["t"][sel] ** 2 * a["phi"][sel]
    return {"t": a["t"][sel], "t2phi": vals, "bound": C0 / 4.0,
            "holds": bool(np.all(vals <= C0 / 4.0))}


def g1_absorption(records, cr: float) -> dict:
    """``int |G1| <= C_r int |grad h|^2`` at every sampled state."""
    a = records_to_arrays(records)
    lhs = np.abs(a["g1_int"])
    rhs = cr * a["gradh_l2"]
    return {"t": a["t"], "lhs": lhs, "rhs": rhs, "holds": bool(np.all(lhs <= rhs))}
