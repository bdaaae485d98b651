"""Model families for the quasilinear Schrodinger equation.

The simulated equation is

    i u_t = Lap u + 2 delta_h u h'(|u|^2) Lap h(|u|^2) + V u + F(|u|^2) u + (W * |u|^2) u

with h a power (or absent), F a finite sum of signed monomials and V, W drawn
from a small menu of radial potentials. Everything here is pointwise and closed
form; grid concerns live in :mod:`qlslab.grid`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "HSpec",
    "FSpec",
    "PotentialSpec",
    "ModelSpec",
    "ClassConstants",
    "UnsupportedFamilyError",
    "eval_h",
    "eval_h_weight",
    "eval_F_G",
    "eval_Htilde",
    "eval_potential",
    "eval_potential_virial",
    "classify_constants",
]

H_KINDS = ("none", "power")
POTENTIAL_KINDS = ("zero", "smoothed-inverse-power", "bounded-rational")


class UnsupportedFamilyError(ValueError):
    """Raised when a closed-form rule is requested for a family it does not cover."""


def _check_nonneg(s):
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("density argument s must be nonnegative")
    return s


@dataclass(frozen=True)
class HSpec:
    """Quasilinear profile ``h(s) = s**alpha`` or no quasilinear term."""

    kind: str = "none"
    alpha: float = 1.0

    def __post_init__(self):
        if self.kind not in H_KINDS:
            raise ValueError(f"unknown h kind {self.kind!r}")
        if self.kind == "power" and self.alpha < 0.5:
            raise ValueError("power h requires alpha >= 1/2")

    @property
    def delta(self) -> int:
        """The switch delta_h: 1 when a quasilinear term is present."""
        return 0 if self.kind == "none" else 1


@dataclass(frozen=True)
class FSpec:
    """Power-law nonlinearity ``F(s) = sum_j b_j s**beta_j``.

    Parameters
    ----------
    terms : sequence of (b, beta)
        Signed coefficients and positive exponents, exponents strictly
        increasing.
    """

    terms: tuple = ()

    def __post_init__(self):
        terms = tuple((float(b), float(beta)) for b, beta in self.terms)
        betas = [beta for _, beta in terms]
        if any(beta <= 0 for beta in betas):
            raise ValueError("exponents must be positive")
        if any(b2 <= b1 for b1, b2 in zip(betas, betas[1:])):
            raise ValueError("exponents must be strictly increasing")
        object.__setattr__(self, "terms", terms)

    @property
    def defocusing(self) -> bool:
        return all(b <= 0 for b, _ in self.terms)

    @property
    def focusing_terms(self):
        return tuple((b, beta) for b, beta in self.terms if b > 0)

    @property
    def defocusing_terms(self):
        return tuple((b, beta) for b, beta in self.terms if b < 0)


@dataclass(frozen=True)
class PotentialSpec:
    """Radial potential used for V and, reused, for the Hartree kernel W.

    ``smoothed-inverse-power`` is ``-a (|x|^2 + eps^2)^(-m/2)``; ``eps=None``
    defers to the grid spacing when sampled. ``bounded-rational`` is
    ``-a |x|^2 / (|x|^2 + 1)``.
    """

    kind: str = "zero"
    a: float = 0.0
    m: float = 1.0
    eps: float | None = None

    def __post_init__(self):
        if self.kind not in POTENTIAL_KINDS:
            raise ValueError(f"unknown potential kind {self.kind!r}")
        if self.a < 0:
            raise ValueError("potential amplitude must be nonnegative")
        if self.m <= 0:
            raise ValueError("potential exponent must be positive")
        if self.eps is not None and self.eps < 0:
            raise ValueError("regularization eps must be nonnegative")

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero" or self.a == 0.0


@dataclass(frozen=True)
class ModelSpec:
    """One member of the equation family."""

    dim: int = 1
    h: HSpec = field(default_factory=HSpec)
    f: FSpec = field(default_factory=FSpec)
    v: PotentialSpec = field(default_factory=PotentialSpec)
    w: PotentialSpec = field(default_factory=PotentialSpec)

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError("dim must be 1, 2 or 3")

    @property
    def delta(self) -> int:
        return self.h.delta

    @property
    def defocusing(self) -> bool:
        return self.f.defocusing

    @property
    def linear(self) -> bool:
        return (self.h.kind == "none" and not self.f.terms
                and self.v.is_zero and self.w.is_zero)


def eval_h(spec: HSpec, s):
    """Return ``(h, h', h'')`` at ``s``.

    Examples
    --------
    >>> eval_h(HSpec("power", 2.0), 3.0)
    (9.0, 6.0, 2.0)
    """
    s = _check_nonneg(s)
    if spec.kind == "none":
        z = np.zeros_like(s)
        return _scalar(z), _scalar(z), _scalar(z)
    a = spec.alpha
    with np.errstate(divide="ignore", invalid="ignore"):
        h = s ** a
        h1 = a * s ** (a - 1.0) if a != 1.0 else np.ones_like(s)
        if a == 1.0:
            h2 = np.zeros_like(s)
        elif a == 2.0:
            h2 = np.full_like(s, 2.0)
        else:
            h2 = a * (a - 1.0) * s ** (a - 2.0)
    return _scalar(h), _scalar(h1), _scalar(h2)


def eval_h_weight(spec: HSpec, s):
    """Return ``[2 h'' h' s + h'^2] s``, the density weight of the quasilinear θ term.

    For ``h = s**alpha`` this is ``alpha^2 (2 alpha - 1) s^(2 alpha - 1)``,
    which stays finite at ``s = 0`` for every admissible alpha.
    """
    s = _check_nonneg(s)
    if spec.kind == "none":
        return _scalar(np.zeros_like(s))
    a = spec.alpha
    if a == 0.5:
        return _scalar(np.zeros_like(s))
    return _scalar(a * a * (2.0 * a - 1.0) * s ** (2.0 * a - 1.0))


def eval_F_G(spec: FSpec, s):
    """Return ``(F, F', G, G1, G2)`` at ``s``.

    ``G`` is the primitive of ``F`` vanishing at zero; ``G1`` collects the
    positive-coefficient monomials and ``G2`` the negated negative ones, so
    ``G = G1 - G2`` with both parts nonnegative.
    """
    s = _check_nonneg(s)
    F = np.zeros_like(s)
    dF = np.zeros_like(s)
    G1 = np.zeros_like(s)
    G2 = np.zeros_like(s)
    with np.errstate(divide="ignore", invalid="ignore"):
        for b, beta in spec.terms:
            sb = s ** beta
            F = F + b * sb
            dF = dF + b * beta * (s ** (beta - 1.0) if beta != 1.0 else 1.0)
            g = abs(b) * sb * s / (beta + 1.0)
            if b > 0:
                G1 = G1 + g
            else:
                G2 = G2 + g
    G = G1 - G2
    return tuple(_scalar(x) for x in (F, dF, G, G1, G2))


def eval_Htilde(spec: HSpec, s):
    """Closed form of ``int_0^s h'(sigma)^2 sigma d sigma``.

    For ``h = s**alpha`` this is ``alpha s^(2 alpha) / 2``.
    """
    s = _check_nonneg(s)
    if spec.kind == "none":
        return _scalar(np.zeros_like(s))
    return _scalar(0.5 * spec.alpha * s ** (2.0 * spec.alpha))


def _radius2(x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        return x * x
    return np.sum(x * x, axis=-1)


def _eps_of(spec: PotentialSpec, eps):
    if eps is not None:
        return float(eps)
    if spec.eps is None:
        raise ValueError("eps is unset; pass it explicitly or sample on a grid")
    return float(spec.eps)


def eval_potential(spec: PotentialSpec, x, eps: float | None = None):
    """Evaluate the potential at point(s) ``x``.

    ``x`` is a scalar (one dimension) or an array whose last axis holds the
    Cartesian components. ``eps`` overrides the regularization stored on the potential.
    """
    r2 = _radius2(x)
    if spec.is_zero:
        return _scalar(np.zeros_like(r2))
    if spec.kind == "bounded-rational":
        return _scalar(-spec.a * r2 / (r2 + 1.0))
    e = _eps_of(spec, eps)
    with np.errstate(divide="ignore"):
        return _scalar(-spec.a * (r2 + e * e) ** (-0.5 * spec.m))


def eval_potential_virial(spec: PotentialSpec, x, eps: float | None = None):
    """Return ``x . grad V`` at point(s) ``x`` in closed form."""
    r2 = _radius2(x)
    if spec.is_zero:
        return _scalar(np.zeros_like(r2))
    if spec.kind == "bounded-rational":
        return _scalar(-2.0 * spec.a * r2 / (r2 + 1.0) ** 2)
    e = _eps_of(spec, eps)
    with np.errstate(divide="ignore", invalid="ignore"):
        return _scalar(spec.a * spec.m * r2 * (r2 + e * e) ** (-0.5 * spec.m - 1.0))


def _scalar(a):
    a = np.asarray(a)
    return float(a) if a.ndim == 0 else a


@dataclass(frozen=True)
class ClassConstants:
    """Sign-class verdict and the closed-form constants k1..k5, l.

    ``contributing`` names the constants whose Case-1 sign condition fails.
    ``l`` uses k1 as printed for the power profile; ``l_general`` applies the
    ``N k1`` weighting of the general rule.
    """

    case: str
    k1: float
    k2: float
    k3: float
    k4: float
    k5: float
    l: float
    l_general: float
    contributing: tuple = ()


def _f_monomial_k(N: int, beta: float, normalization: str) -> float:
    if normalization == "monomial":
        return abs(N * beta - 2.0) / (beta + 1.0)
    if normalization == "primitive":
        return abs(N * beta - 2.0)
    raise ValueError(f"unknown normalization {normalization!r}")


def _potential_k(spec: PotentialSpec):
    """Return (k, case1_holds) for ``2V + x.grad V`` against ``|V|``."""
    if spec.is_zero:
        return 0.0, True
    if spec.kind == "bounded-rational":
        # 2V + x.V' = -a r^2 (2 + 2/(r^2+1)) / (r^2+1): ratio to |V| peaks at 4
        return 4.0, False
    k = max(0.0, 2.0 - spec.m)
    return k, spec.m >= 2.0


def classify_constants(model: ModelSpec, normalization: str = "monomial") -> ClassConstants:
    """Classify a model into the two sign cases of the Morawetz estimates.

    Parameters
    ----------
    model : ModelSpec
    normalization : {"monomial", "primitive"}
        How the F constant is normalised. ``"monomial"`` gives
        ``|N beta - 2| / (beta + 1)``; ``"primitive"`` gives
        ``|N beta - 2|``, the ratio against ``|G|`` used by the scattering
        windows.

    Returns
    -------
    ClassConstants
        The closed-form constants are always reported; only those whose
        Case-1 sign condition fails enter ``l``.
    """
    N = model.dim
    contributing = []
    k1 = 0.0
    if model.h.kind == "power":
        k1 = 2.0 * model.h.alpha - 1.0
        if k1 > 0:
            contributing.append("k1")
    k2 = 0.0
    f_fails = False
    for b, beta in model.f.terms:
        k2 = max(k2, _f_monomial_k(N, beta, normalization))
        # defocusing monomials need N beta >= 2, focusing ones N beta <= 2
        if (b < 0 and N * beta < 2.0) or (b > 0 and N * beta > 2.0):
            f_fails = True
    k2_eff = 0.0
    if f_fails:
        k2_eff = max(_f_monomial_k(N, beta, normalization)
                     for b, beta in model.f.terms
                     if (b < 0 and N * beta < 2.0) or (b > 0 and N * beta > 2.0))
        contributing.append("k2")
    k3 = 0.0
    k4, v_ok = _potential_k(model.v)
    if not v_ok:
        contributing.append("k4")
    k5, w_ok = _potential_k(model.w)
    if not w_ok:
        contributing.append("k5")
    vals = {"k1": k1, "k2": k2_eff, "k4": k4, "k5": k5}
    l = max([vals[c] for c in contributing], default=0.0)
    weighted = dict(vals, k1=N * k1)
    l_general = max([weighted[c] for c in contributing], default=0.0)
    case = "Case2" if contributing else "Case1"
    return ClassConstants(case, k1, k2, k3, k4, k5, l, l_general, tuple(contributing))
