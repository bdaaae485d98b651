"""Closed-form checks of exponent and sign hypotheses for power-law families.

Every comparison runs on exact rationals when the inputs are rational
(floats are read as the decimal they print as) and otherwise with a 1e-12
guard band. Ties count as failures and carry a boundary flag, since every
hypothesis here is a strict inequality.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

from scipy.special import gamma as _gamma

from .nonlinearity import ModelSpec, classify_constants

__all__ = [
    "Condition",
    "TheoremReport",
    "AdmissiblePair",
    "WVReport",
    "HypothesisError",
    "SOBOLEV_CONSTANTS",
    "sobolev_constant",
    "critical_exponent",
    "admissible_pair",
    "check_wv",
    "check_theorem1",
    "check_theorem3",
    "check_theorem4",
    "check_theorem6",
    "check_theorem7",
    "check_corollary65",
    "beta0",
    "remark63_lower",
    "theorem3_weight",
    "THEOREMS",
]

GUARD = 1e-12


class HypothesisError(ValueError):
    """A weight or exponent choice violates the hypotheses of an estimate."""


def sobolev_constant(N: int) -> float:
    """Best constant C_s in ``int w^(2*) <= C_s (int |grad w|^2)^(2*/2)``.

    Aubin-Talenti closed form: ``C_s = S_N^(2*)`` with
    ``S_N = (pi N (N-2))^(-1/2) (Gamma(N) / Gamma(N/2))^(1/N)``.
    """
    if N < 3:
        raise ValueError("the sharp Sobolev constant needs N >= 3")
    S = (math.pi * N * (N - 2)) ** -0.5 * (_gamma(N) / _gamma(N / 2)) ** (1.0 / N)
    return float(S ** (2.0 * N / (N - 2)))


SOBOLEV_CONSTANTS = {3: sobolev_constant(3)}


def critical_exponent(N: int):
    """``2* = 2N/(N-2)`` for N >= 3, infinity otherwise."""
    return Fraction(2 * N, N - 2) if N >= 3 else math.inf


# -- exact/guarded arithmetic ------------------------------------------------

def q(x):
    """Promote to an exact Fraction when the value is rational as written."""
    if isinstance(x, (Fraction, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float) and math.isfinite(x):
        return Fraction(repr(x))
    return x


def _cmp(a, b) -> int:
    """Sign of a - b; 0 inside the guard band for irrational operands."""
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return (a > b) - (a < b)
    fa, fb = float(a), float(b)
    if math.isinf(fa) or math.isinf(fb):
        return (fa > fb) - (fa < fb)
    if abs(fa - fb) <= GUARD * max(1.0, abs(fa), abs(fb)):
        return 0
    return 1 if fa > fb else -1


def _f(x) -> float:
    return float(x)


@dataclass(frozen=True)
class Condition:
    """One named inequality and its outcome."""

    name: str
    holds: bool
    boundary: bool = False
    detail: str = ""

    def as_dict(self):
        d = {"name": self.name, "holds": self.holds}
        if self.boundary:
            d["boundary"] = True
        if self.detail:
            d["detail"] = self.detail
        return d


def lt(name, a, b, detail="") -> Condition:
    c = _cmp(a, b)
    return Condition(name, c < 0, c == 0, detail)


def le(name, a, b, detail="") -> Condition:
    c = _cmp(a, b)
    return Condition(name, c <= 0, False, detail)


def _jsonable(v):
    if isinstance(v, Fraction):
        return float(v)
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


@dataclass(frozen=True)
class TheoremReport:
    """Verdict with every tested condition and the derived constants."""

    theorem: str
    verdict: str
    conditions: tuple = ()
    constants: dict = field(default_factory=dict)
    windows: dict = field(default_factory=dict)
    notes: tuple = ()

    @property
    def failed(self) -> tuple:
        return tuple(c for c in self.conditions if not c.holds)

    def to_record(self) -> str:
        """Single-line JSON with sorted keys; byte-stable for equal inputs."""
        d = {
            "theorem": self.theorem,
            "verdict": self.verdict,
            "failed": [c.name for c in self.failed],
            "conditions": [c.as_dict() for c in self.conditions],
            "constants": _jsonable(self.constants),
            "windows": _jsonable(self.windows),
            "notes": list(self.notes),
        }
        return json.dumps(d, sort_keys=True, separators=(",", ":"))

    def to_text(self) -> str:
        lines = [f"theorem {self.theorem}: {self.verdict}"]
        for c in self.conditions:
            mark = "ok  " if c.holds else ("TIE " if c.boundary else "FAIL")
            lines.append(f"  [{mark}] {c.name}" + (f"  ({c.detail})" if c.detail else ""))
        for k in sorted(self.constants):
            lines.append(f"  {k} = {_jsonable(self.constants[k])}")
        for k in sorted(self.windows):
            lines.append(f"  window {k} = {_jsonable(self.windows[k])}")
        for n in self.notes:
            lines.append(f"  note: {n}")
        return "\n".join(lines)


def _verdict(conds) -> str:
    return "applies" if all(c.holds for c in conds) else "fails"


# -- intervals ---------------------------------------------------------------

@dataclass(frozen=True)
class Interval:
    """Interval with an open left end; ``hi_closed`` marks a closed right end.

    The left end is always open, so the interval is empty once lo >= hi.
    """

    lo: object
    hi: object
    hi_closed: bool = False

    @property
    def empty(self) -> bool:
        return _cmp(self.lo, self.hi) >= 0

    def meet_lo(self, lo):
        return Interval(lo, self.hi, self.hi_closed) if _cmp(lo, self.lo) > 0 else self

    def meet_hi(self, hi):
        c = _cmp(hi, self.hi)
        if c < 0 or (c == 0 and self.hi_closed):
            return Interval(self.lo, hi, False)
        return self

    def as_list(self):
        return [_f(self.lo), _f(self.hi)]


def _window_condition(name, iv: Interval) -> Condition:
    c = _cmp(iv.lo, iv.hi)
    return Condition(name, c < 0, c == 0, f"({_f(iv.lo):.6g}, {_f(iv.hi):.6g})")


# -- admissible pairs --------------------------------------------------------

@dataclass(frozen=True)
class AdmissiblePair:
    """Strichartz pair with ``2/q = N (1/2 - 1/r)``; q may be infinite."""

    N: int
    q: object
    r: object

    @property
    def q_conj(self):
        return Fraction(1) if self.q == math.inf else 1 / (1 - 1 / self.q)

    @property
    def r_conj(self):
        return 1 / (1 - 1 / self.r)


def admissible_pair(N: int, r) -> AdmissiblePair:
    """Solve ``2/q = N(1/2 - 1/r)`` for q; r = 2 gives q = infinity.

    >>> admissible_pair(2, 4).q
    Fraction(4, 1)
    """
    r = q(r)
    top = critical_exponent(N)
    if _cmp(r, 2) < 0 or (N >= 3 and _cmp(r, top) > 0):
        raise ValueError(f"r = {r} outside the admissible range for N = {N}")
    rhs = N * (Fraction(1, 2) - 1 / r) if isinstance(r, Fraction) else N * (0.5 - 1.0 / r)
    if rhs == 0:
        return AdmissiblePair(N, math.inf, r)
    return AdmissiblePair(N, 2 / rhs, r)


# -- WV1 / WV2 ---------------------------------------------------------------

@dataclass(frozen=True)
class WVReport:
    kind: str
    p1_window: tuple
    p2_window: tuple
    conditions: tuple = ()


def _power_window(spec, N, lower):
    """Window of p with the near-origin part of the potential in L^p."""
    if spec.is_zero or spec.kind == "bounded-rational":
        return (lower, math.inf)
    return (lower, q(Fraction(N)) / q(spec.m))


def check_wv(model: ModelSpec) -> WVReport:
    """Which integrability assumption the potentials satisfy.

    The singular power is split at the unit sphere: the outer part is bounded,
    the inner part lies in L^p iff ``p m < N``.
    """
    N = model.dim
    lo1 = max(Fraction(1), Fraction(N, 2))
    lo2 = max(Fraction(1), Fraction(N, 4))
    w1 = _power_window(model.v, N, lo1)
    w2 = _power_window(model.w, N, lo2)
    if model.h.kind == "none":
        conds = (
            lt("V in L^p1 + L^inf for some p1 > max(1, N/2)", w1[0], w1[1]),
            lt("W in L^p2 + L^inf for some p2 > max(1, N/4)", w2[0], w2[1]),
        )
        kind = "WV1" if all(c.holds for c in conds) else "neither"
        return WVReport(kind, w1, w2, conds)
    v_bounded = model.v.is_zero or model.v.kind == "bounded-rational"
    conds = [Condition("V in L^inf", v_bounded,
                       detail="" if v_bounded else "singular power is unbounded at 0")]
    if model.w.is_zero:
        conds.append(Condition("W in L^1", True))
    elif model.w.kind == "bounded-rational":
        conds.append(Condition("W in L^1 at infinity", False, detail="W tends to -a"))
    else:
        conds.append(lt("W in L^1 near the origin (n < N)", q(model.w.m), q(Fraction(N))))
        conds.append(lt("W in L^1 at infinity (n > N)", q(Fraction(N)), q(model.w.m)))
    conds.append(lt("W in L^p2 + L^inf for some p2 > max(1, N/4)", w2[0], w2[1]))
    kind = "WV2" if all(c.holds for c in conds) else "neither"
    return WVReport(kind, w1, w2, tuple(conds))


# -- Theorem 1 and the C_r constant ------------------------------------------

def _focusing_profile(model: ModelSpec):
    foc = model.f.focusing_terms
    B = sum(b / (beta + 1.0) for b, beta in foc)
    return foc, B


def _tau_power(N):
    """Exponent pair (2/N, (N-2)/N) of the smallness products."""
    return 2.0 / N, (N - 2.0) / N


def smallness_term(c, cp, mass, N, C_s) -> float:
    """``(c * mass)^(2/N) (2^(2*-1) c' C_s)^((N-2)/N)``."""
    a, b = _tau_power(N)
    two_star = 2.0 * N / (N - 2.0)
    return float((c * mass) ** a * (2.0 ** (two_star - 1.0) * cp * C_s) ** b)


def _gamma_ratio(g1, g2, N):
    two_star = 2.0 * N / (N - 2.0)
    return two_star * (1.0 - g1) / (2.0 * (g2 - g1))


def check_theorem1(model: ModelSpec, mass: float, energy: float, C_s: float | None = None,
                   constants: dict | None = None) -> TheoremReport:
    """Global-existence criteria for the defocusing and combined cases.

    ``mass`` is ``||u0||_{L^2}^2``. In the combined case the gamma pairs and
    c-constants come from the sufficient closed forms for power families
    (``|G1| <= B s^(beta+1)`` with B the summed focusing coefficient), unless
    ``constants`` supplies ``gamma1, gamma2, c1, c1p`` and/or
    ``gamma1t, gamma2t, c2, c2p`` explicitly.
    """
    N = model.dim
    conds = []
    wv = check_wv(model)
    conds.append(Condition("V <= 0 and W <= 0", True, detail="all implemented families are nonpositive"))
    conds.append(Condition("(WV1) or (WV2)", wv.kind != "neither", detail=wv.kind))
    notes = []
    if model.defocusing:
        conds.append(lt("0 < M(u0)", 0.0, mass))
        conds.append(le("0 <= E(u0)", 0.0, energy))
        conds.append(Condition("E(u0) < inf", math.isfinite(energy)))
        return TheoremReport("1", _verdict(conds), tuple(conds),
                             {"case": "Case1"}, notes=("defocusing case",))
    if N < 3 or model.h.kind == "none":
        return TheoremReport("1", "not-applicable", tuple(conds), {"case": "Case2"},
                             notes=("combined case needs N >= 3 and h present",))
    C_s = sobolev_constant(N) if C_s is None else C_s
    foc, B = _focusing_profile(model)
    bmin = min(beta for _, beta in foc)
    bmax = max(beta for _, beta in foc)
    alpha = model.h.alpha
    ts = 2.0 * N / (N - 2.0)
    consts = {"case": "Case2", "C_s": C_s, "B": B, "variant": "[s^(1/2)+h(s)]^(2*)"}
    if constants:
        g1, g2 = constants.get("gamma1"), constants.get("gamma2")
        g1t, g2t = constants.get("gamma1t"), constants.get("gamma2t")
        ratio1 = _gamma_ratio(g1, g2, N) if g1 is not None else None
        ratio2 = _gamma_ratio(g1t, g2t, N) if g1t is not None else None
        T1 = smallness_term(constants["c1"], constants["c1p"], mass, N, C_s) if "c1" in constants else None
        T2 = smallness_term(constants["c2"], constants["c2p"], mass, N, C_s) if "c2" in constants else None
        eq1 = ratio1 is not None and abs(ratio1 - 1.0) <= 1e-12
        eq2 = ratio2 is not None and abs(ratio2 - 1.0) <= 1e-12
        st1 = ratio1 is not None and ratio1 < 1.0 - 1e-12
        st2 = ratio2 is not None and ratio2 < 1.0 - 1e-12
        notes.append("constants supplied by the caller")
        consts.update({"ratio1": ratio1, "ratio2": ratio2, "T1": T1, "T2": T2})
    else:
        g1 = 1.0 / (bmin + 1.0)
        g2 = ts / 2.0 - g1 * (ts / 2.0 - 1.0)
        g1t = 1.0 / (bmax + 1.0)
        g2t = ts / 2.0 - g1t * (ts / 2.0 - 1.0)
        # with the equality ratio the c-exponents sum to one, so T = B * ...
        T1 = smallness_term(B ** g1, B ** g2, mass, N, C_s)
        T2 = smallness_term(B ** g1t, B ** g2t, mass, N, C_s)
        eq1 = _cmp(q(bmin), Fraction(2, N)) >= 0
        st1 = True
        top = q(2 * alpha) - Fraction(N - 2, N) if isinstance(q(alpha), Fraction) else 2 * alpha - (N - 2) / N
        eq2 = _cmp(q(bmax), top) <= 0
        st2 = _cmp(q(bmax), top) < 0
        consts.update({"gamma1": g1, "gamma2": g2, "gamma1t": g1t, "gamma2t": g2t,
                       "T1": T1, "T2": T2, "beta_min": bmin, "beta_max": bmax})
        notes.append("closed-form sufficient constants for power families")
    options = []
    if eq1 and st2 and T1 is not None:
        options.append(("ratio1 = 1, ratio2 < 1", T1))
    if st1 and eq2 and T2 is not None:
        options.append(("ratio1 < 1, ratio2 = 1", T2))
    if eq1 and eq2 and T1 is not None and T2 is not None:
        options.append(("ratio1 = 1, ratio2 = 1", T1 + T2))
    if not options:
        conds.append(Condition("an admissible gamma configuration exists", False,
                               detail="no equality configuration is feasible"))
    else:
        best = min(options, key=lambda o: o[1])
        conds.append(Condition("an admissible gamma configuration exists", True, detail=best[0]))
        conds.append(lt("smallness product < 1/4", best[1], 0.25, detail=f"{best[1]:.6g}"))
        consts["smallness"] = best[1]
        consts["configuration"] = best[0]
    conds.append(le("0 <= E(u0)", 0.0, energy))
    return TheoremReport("1", _verdict(conds), tuple(conds), consts, notes=tuple(notes))


def cr_terms(model: ModelSpec, mass: float, C_s: float | None = None, constants: dict | None = None):
    """The two summands of C_r(u0) (variant with ``[h(s)]^(2*)``).

    On [0, 1] the bounds use G1; for s > 1 they use G and G2, exactly as in
    the combined-case hypotheses of the Morawetz estimates.
    """
    N = model.dim
    if N < 3:
        raise ValueError("C_r is defined for N >= 3")
    C_s = sobolev_constant(N) if C_s is None else C_s
    if constants:
        T3 = smallness_term(constants["c3"], constants["c3p"], mass, N, C_s)
        T4 = smallness_term(constants["c4"], constants["c4p"], mass, N, C_s) if "c4" in constants else 0.0
        return T3, T4, {"source": "caller"}
    foc, B1 = _focusing_profile(model)
    if not foc:
        return 0.0, 0.0, {"source": "no focusing part"}
    if model.h.kind == "none":
        return math.inf, math.inf, {"source": "h absent"}
    ts = 2.0 * N / (N - 2.0)
    alpha = model.h.alpha
    bmin = min(beta for _, beta in foc)
    info = {"source": "closed form"}
    # [0,1]: gamma3 >= 1/(beta+1) and gamma4 (beta+1) >= alpha 2*
    g3 = 1.0 / (bmin + 1.0)
    g4 = ts / 2.0 - g3 * (ts / 2.0 - 1.0)
    feasible3 = g4 * (bmin + 1.0) >= alpha * ts - 1e-12
    T3 = smallness_term(B1 ** g3, B1 ** g4, mass, N, C_s) if feasible3 else math.inf
    info.update(gamma3=g3, gamma4=g4, feasible3=feasible3)
    dfc = model.f.defocusing_terms
    if not dfc:
        return T3, 0.0, info
    Ball = sum(abs(b) / (beta + 1.0) for b, beta in model.f.terms)
    B2 = sum(abs(b) / (beta + 1.0) for b, beta in dfc)
    ba = max(beta for _, beta in model.f.terms)
    b2 = max(beta for _, beta in dfc)
    hi = 1.0 / (ba + 1.0)
    lo = max((ts / 2.0 - alpha * ts / (b2 + 1.0)) / (ts / 2.0 - 1.0), 1e-300)
    if lo > hi + 1e-12:
        info["feasible4"] = False
        return T3, math.inf, info
    a, b = _tau_power(N)
    best = math.inf
    for gt3 in (lo, hi):
        gt4 = ts / 2.0 - gt3 * (ts / 2.0 - 1.0)
        best = min(best, smallness_term(Ball ** gt3, B2 ** gt4, mass, N, C_s))
    info["feasible4"] = True
    return T3, best, info


# -- Theorem 3 ---------------------------------------------------------------

def check_theorem3(model: ModelSpec, normalization: str = "monomial") -> TheoremReport:
    """Sign-case classification with the closed-form constants k1..k5 and l."""
    cc = classify_constants(model, normalization)
    N = model.dim
    conds = []
    if model.h.kind == "power":
        conds.append(Condition("h term: k1 = 2 alpha - 1", True, detail=f"k1 = {cc.k1:g}"))
    for b, beta in model.f.terms:
        if b < 0:
            conds.append(Condition(f"N F2 s - (N+2) G2 >= 0 for beta = {beta:g} (N beta >= 2)",
                                   N * beta >= 2.0))
        else:
            conds.append(Condition(f"(N+2) G1 - N F1 s >= 0 for beta = {beta:g} (N beta <= 2)",
                                   N * beta <= 2.0))
    for name, spec in (("V", model.v), ("W", model.w)):
        if spec.is_zero:
            continue
        if spec.kind == "bounded-rational":
            conds.append(Condition(f"2{name} + x.grad {name} >= 0", False, detail="ratio to |%s| up to 4" % name))
        else:
            conds.append(Condition(f"2{name} + x.grad {name} >= 0 (exponent >= 2)", spec.m >= 2.0,
                                   boundary=spec.m == 2.0))
    consts = {"case": cc.case, "k1": cc.k1, "k2": cc.k2, "k3": cc.k3, "k4": cc.k4,
              "k5": cc.k5, "l": cc.l, "l_general": cc.l_general,
              "normalization": normalization}
    notes = ["Case-1 sign conditions that fail contribute to l; the h term follows the printed k1 rule"]
    if not model.defocusing and N < 3:
        return TheoremReport("3", "not-applicable", tuple(conds), consts,
                             notes=("combined case needs N >= 3",))
    return TheoremReport("3", "applies", tuple(conds), consts, notes=tuple(notes))


def theorem3_weight(estimate: str, *, N: int, theta=None, sigma=None, k=None, b0=0.0,
                    c_min=0.0, l=0.0, cr=0.0, defocusing=True) -> TheoremReport:
    """Validate a weight against the hypotheses of estimates (A)-(E)."""
    conds = []
    if estimate == "A":
        conds.append(lt("1/2 < theta", 0.5, theta))
        conds.append(lt("theta < 1", theta, 1.0))
        if theta is not None and theta < 1:
            conds.append(lt("1/a in L^(1/(1-theta)): 2 sigma/(1-theta) > N", N, 2.0 * sigma / (1.0 - theta)))
    elif estimate == "B":
        conds.append(lt("1 < k", 1.0, k))
        if b0 <= 0:
            conds.append(lt("k < 3 (b(x) >= 0)", k, 3.0))
    elif estimate in ("C",):
        pass
    elif estimate == "D":
        if defocusing:
            conds.append(lt("l + 1 < k", l + 1.0, k))
            if c_min <= 0:
                conds.append(lt("k < 3 (c(x) >= 0)", k, 3.0))
                conds.append(lt("l < 2", l, 2.0))
        else:
            conds.append(lt("k > 1 + l(1+C_r)/(1-C_r)", 1.0 + l * (1 + cr) / (1 - cr), k))
    elif estimate == "E":
        if defocusing:
            conds.append(lt("l < 1", l, 1.0))
        else:
            conds.append(lt("l < (1-C_r)/(1+C_r)", l, (1 - cr) / (1 + cr)))
    else:
        raise ValueError(f"unknown estimate {estimate!r}")
    return TheoremReport(f"3{estimate}", _verdict(conds), tuple(conds))


# -- Theorem 4 ---------------------------------------------------------------

def check_theorem4(model: ModelSpec, p: float, theta: float, weight: str = "constant",
                   cr: float = 0.0, r: float | None = None, qexp: float | None = None,
                   gammas: dict | None = None) -> TheoremReport:
    """Exponent ranges of the weighted spacetime bounds.

    ``weight`` is ``"constant"`` (bounded weight, class w1) or ``"gaussian"``
    (integrable weight, class w2). Bound (G) is checked when ``r`` and
    ``qexp`` are given and N >= 3, with gamma1, gamma2 taken from ``gammas``
    or from the closed forms of :func:`check_theorem1`.
    """
    cc = classify_constants(model)
    l = cc.l
    conds = [lt("0 < theta", 0.0, theta), le("theta <= 1", theta, 1.0)]
    if theta == 1:
        conds.append(Condition("w bounded (w1)", weight in ("constant", "gaussian")))
    else:
        conds.append(Condition("w in L^(1/(1-theta)) (w2)", weight == "gaussian",
                               detail="a constant weight is not integrable"))
    if model.defocusing:
        conds.append(lt("p > 1/(2 theta)", 1.0 / (2.0 * theta), p))
    else:
        if model.dim < 3:
            return TheoremReport("4", "not-applicable", tuple(conds), {"l": l},
                                 notes=("combined case needs N >= 3",))
        lim = 2.0 * (1 - cr) / (1 + cr)
        conds.append(lt("C_r < 1", cr, 1.0))
        if cc.case == "Case2":
            conds.append(lt("0 < l < 2(1-C_r)/(1+C_r)", l, lim))
            den = theta * (2 * (1 - cr) - l * (1 + cr))
            pmin = max(1.0 / (2 * theta), (1 - cr) / den if den > 0 else math.inf)
        else:
            pmin = 1.0 / (2 * theta)
        conds.append(lt("p > p_min", pmin, p, detail=f"p_min = {pmin:.6g}"))
    consts = {"l": l, "case": cc.case}
    if r is not None and qexp is not None:
        if model.dim < 3:
            conds.append(Condition("Bound (G) needs N >= 3", False))
        else:
            if gammas is None:
                rep = check_theorem1(model, 1.0, 0.0)
                gammas = {k: rep.constants.get(k) for k in ("gamma1", "gamma2", "gamma1t", "gamma2t")}
            g1, g2 = gammas.get("gamma1"), gammas.get("gamma2")
            g1t, g2t = gammas.get("gamma1t"), gammas.get("gamma2t")
            if g1 is None:
                conds.append(Condition("Bound (G) needs a focusing part", False))
            else:
                ts = 2.0 * model.dim / (model.dim - 2.0)
                sig = 1.0
                conds.append(le("1 <= r", 1.0, r))
                conds.append(lt("r < gamma2", r, g2))
                conds.append(lt("r < gamma2~", r, g2t))
                for a1, a2, tag in ((g1, g2, ""), (g1t, g2t, "~")):
                    if cc.case == "Case2":
                        den = ts * (r * sig - a1) * (2 * (1 - cr) - l * (1 + cr))
                        qmin = 2 * r * sig * (a2 - a1) * (1 - cr) / den if den > 0 else math.inf
                    else:
                        qmin = r * sig * (a2 - a1) / (ts * (r * sig - a1)) if r * sig > a1 else math.inf
                    conds.append(lt(f"q > q_min{tag}", qmin, qexp, detail=f"q_min = {qmin:.6g}"))
    return TheoremReport("4", _verdict(conds), tuple(conds), consts)


# -- Theorem 6 ---------------------------------------------------------------

def _scattering_l(model: ModelSpec):
    """Decay loss l for the L^2 scattering windows (ratio taken against |G|)."""
    N = model.dim
    parts = {}
    if not model.v.is_zero and model.v.m < 2:
        parts["V"] = 2 - q(model.v.m)
    if not model.w.is_zero and model.w.m < 2:
        parts["W"] = 2 - q(model.w.m)
    for b, beta in model.f.terms:
        if b < 0 and N * beta < 2:
            parts[f"F{beta:g}"] = 2 - N * q(beta)
    l = max(parts.values(), default=Fraction(0))
    return l, parts


def check_theorem6(model: ModelSpec) -> TheoremReport:
    """L^2 scattering windows for ``-a/|x|^m u + F u + (-c/|x|^n * |u|^2) u``.

    Windows are written in rho = r' (dual Strichartz exponent). Each of the
    five exponents (V near/far, F, W near/far) must admit a value in
    ``(max(1, 2N/(N+2)), 2)`` meeting its integrability condition. The
    potential exponents also need the time-decay requirement
    ``(2-l) q'/2 > 1``, i.e. ``rho < 2N/(N+2l)``; for F the decay enters
    through a linear inequality in rho.
    """
    N = model.dim
    notes = []
    if model.h.kind != "none":
        return TheoremReport("6", "not-applicable", notes=("semilinear models only",))
    if not model.f.defocusing:
        return TheoremReport("6", "not-applicable", notes=("defocusing F only",))
    for spec in (model.v, model.w):
        if not spec.is_zero and spec.kind != "smoothed-inverse-power":
            return TheoremReport("6", "not-applicable", notes=("power-law potentials only",))
    l, parts = _scattering_l(model)
    base_lo = max(Fraction(1), Fraction(2 * N, N + 2))
    decay_hi = Fraction(2 * N) / (N + 2 * l) if isinstance(l, Fraction) else 2 * N / (N + 2 * l)
    base = Interval(base_lo, Fraction(2)).meet_hi(decay_hi)
    windows = {}
    conds = []
    if not model.v.is_zero:
        m = q(model.v.m)
        cut = Fraction(2 * N) / (N + m) if isinstance(m, Fraction) else 2 * N / (N + m)
        windows["r1'"] = base.meet_hi(cut)
        windows["r2'"] = base.meet_lo(cut)
    if not model.w.is_zero:
        n = q(model.w.m)
        cut = Fraction(4 * N) / (2 * N + n) if isinstance(n, Fraction) else 4 * N / (2 * N + n)
        windows["r1~'"] = base.meet_hi(cut)
        windows["r2~'"] = base.meet_lo(cut)
    for b, beta in model.f.terms:
        be = q(beta)
        th = 2 / (2 * be + 1)
        p = (2 * be + 2) / (2 * be + 1)
        # the time decay of the F term is carried by the linear inequality below
        iv = Interval(base_lo, Fraction(2)).meet_lo(th).meet_hi(p)
        two_l = 2 - l
        coef = 4 * two_l - (p - th) * (4 + N)
        rhs = 4 * two_l * th - 2 * N * (p - th)
        # coef * rho > rhs
        if _cmp(coef, 0) > 0:
            iv = iv.meet_lo(rhs / coef)
        elif _cmp(coef, 0) < 0:
            iv = iv.meet_hi(rhs / coef)
        elif _cmp(rhs, 0) >= 0:
            iv = Interval(iv.lo, iv.lo)
        windows[f"r3'(beta={beta:g})"] = iv
    for name in sorted(windows):
        conds.append(_window_condition(f"window {name} nonempty", windows[name]))
    consts = {"l": l, "case": "Case2" if _cmp(l, 0) > 0 else "Case1",
              "l_parts": {k: v for k, v in sorted(parts.items())}}
    return TheoremReport("6", _verdict(conds), tuple(conds), consts,
                         {k: v.as_list() for k, v in sorted(windows.items())}, tuple(notes))


def beta0(N: int) -> float:
    """``(4 - 3N + sqrt(9N^2 + 40N + 16)) / (8N)``."""
    return (4.0 - 3.0 * N + math.sqrt(9.0 * N * N + 40.0 * N + 16.0)) / (8.0 * N)


def check_corollary65(N: int, m, n, beta) -> TheoremReport:
    """The three printed parameter cases for L^2 scattering of the power model."""
    m, n, beta = q(m), q(n), q(beta)
    Nb = N * beta
    ts = critical_exponent(N)
    b0 = beta0(N)
    cases = {
        "I": [
            lt("N >= 2", 1, N),
            lt("4/3 < m", Fraction(4, 3), m), lt("m < 2", m, 2),
            lt("m < n", m, n), lt("n < 4", n, 4),
            lt("m < N beta", m, Nb), lt("N beta < 2*", Nb, ts),
            lt("8 < 4m + n", 8, 4 * m + n),
        ],
        "II": [
            lt("N >= 2", 1, N),
            lt("beta0 < N beta", b0, Nb), lt("N beta < m", Nb, m), lt("m < 2", m, 2),
            lt("N beta < n", Nb, n), lt("n < 4", n, 4),
            lt("4 < 2 N beta + m", 4, 2 * Nb + m),
            lt("8 < 4 N beta + n", 8, 4 * Nb + n),
        ],
        "III": [
            lt("N >= 2", 1, N),
            lt("8/5 < n", Fraction(8, 5), n), lt("n < m", n, m), lt("m < 2", m, 2),
            lt("n < N beta", n, Nb), lt("N beta < 2*", Nb, ts),
        ],
    }
    hit = [k for k, cs in cases.items() if all(c.holds for c in cs)]
    conds = []
    for k, cs in cases.items():
        conds.extend(Condition(f"({k}) {c.name}", c.holds, c.boundary, c.detail) for c in cs)
    # a passing case makes the report pass even though other cases fail
    verdict = "applies" if hit else "fails"
    consts = {"beta0": b0, "cases_met": hit}
    rep = TheoremReport("cor6.5", verdict, tuple(conds), consts)
    return rep


def corollary65_failed(rep: TheoremReport, case: str) -> list:
    """Names of the failed conditions of one printed case."""
    tag = f"({case}) "
    return [c.name[len(tag):] for c in rep.conditions if c.name.startswith(tag) and not c.holds]


# -- Theorem 7 ---------------------------------------------------------------

def remark63_lower(N: int) -> float:
    """Lower end ``(2 - N + sqrt(N^2 + 12N + 4)) / (4N)`` of the beta window."""
    return (2.0 - N + math.sqrt(N * N + 12.0 * N + 4.0)) / (4.0 * N)


def check_theorem7(model: ModelSpec) -> TheoremReport:
    """Sigma scattering for sums of defocusing monomials without potentials.

    Uses ``theta_j = 1/beta``, ``p_j = (beta+1)/beta`` at the smallest and
    largest exponents. In ``s = r/(r-2)`` the conditions read
    ``theta < s < p`` and ``2(2-l)(s-theta) > (2s-N)(p-theta)``, with
    ``l = 2 - N beta_1`` when ``N beta_1 < 2`` and ``l = 0`` otherwise.
    """
    N = model.dim
    if model.h.kind != "none" or not model.v.is_zero or not model.w.is_zero:
        return TheoremReport("7", "not-applicable", notes=("needs V = W = 0 and h absent",))
    if not model.f.terms or not model.f.defocusing:
        return TheoremReport("7", "not-applicable", notes=("needs defocusing monomials",))
    betas = [q(beta) for _, beta in model.f.terms]
    b1, bm = betas[0], betas[-1]
    l = 2 - N * b1 if _cmp(N * b1, 2) < 0 else Fraction(0)
    lo = Fraction(N, 2) if N >= 3 else Fraction(1)
    iv = Interval(lo, math.inf)
    conds = []
    ts = critical_exponent(N)
    if N >= 3:
        conds.append(lt("growth condition (G): beta_m < 2*/N", bm, ts / N))
    for tag, be in (("1", b1), ("2", bm)):
        th = 1 / be
        p = (be + 1) / be
        iv = iv.meet_lo(th).meet_hi(p)
        # 2(2-l)(s-th) > (2s-N)(p-th)  <=>  s [2(2-l) - 2(p-th)] > 2(2-l) th - N (p-th)
        coef = 2 * (2 - l) - 2 * (p - th)
        rhs = 2 * (2 - l) * th - N * (p - th)
        if _cmp(coef, 0) > 0:
            iv = iv.meet_lo(rhs / coef)
        elif _cmp(coef, 0) < 0:
            iv = iv.meet_hi(rhs / coef)
        elif _cmp(rhs, 0) >= 0:
            iv = Interval(iv.lo, iv.lo)
    conds.append(_window_condition("s = r/(r-2) window nonempty", iv))
    windows = {"s": [_f(iv.lo), _f(iv.hi)]}
    if not iv.empty:
        s_lo, s_hi = _f(iv.lo), _f(iv.hi)
        r_hi = 2 * s_lo / (s_lo - 1) if s_lo > 1 else math.inf
        r_lo = 2 * s_hi / (s_hi - 1) if math.isfinite(s_hi) else 2.0
        windows["r"] = [r_lo, r_hi]
    consts = {"l": l, "case": "Case2" if _cmp(l, 0) > 0 else "Case1",
              "beta_window": [remark63_lower(N), ts / N if N >= 3 else math.inf]}
    return TheoremReport("7", _verdict(conds), tuple(conds), consts, windows)


THEOREMS = ("1", "3", "4", "6", "7", "cor6.5")
