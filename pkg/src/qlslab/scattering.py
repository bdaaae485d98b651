"""Free-evolution pullback, the (x - 2it grad) operator and Cauchy gaps.

The solver's free flow multiplies by ``exp(+i t |k|^2)``; the pullback
``v(t) = e^{it Lap} u(t)`` multiplies by ``exp(-i t |k|^2)``.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import grid as gs
from .grid import Grid

__all__ = [
    "free_pullback",
    "free_flow",
    "h_operator",
    "h_norm_sq",
    "PullbackSeries",
    "cauchy_gaps",
    "doubling_gaps",
    "mb_bound_check",
]


def free_pullback(grid: Grid, u, t: float) -> np.ndarray:
    """Apply the Fourier multiplier ``exp(-i t |k|^2)``."""
    u = grid.check(u)
    if t == 0:
        return np.array(u, dtype=complex)
    return gs.ifft(np.exp(-1j * t * grid.k2) * gs.fft(u))


def free_flow(grid: Grid, u, t: float) -> np.ndarray:
    """Exact free solution at time t: multiplier ``exp(+i t |k|^2)``."""
    return free_pullback(grid, u, -t)


def h_operator(grid: Grid, u, t: float) -> list:
    """Components ``x_j u - 2it d_j u``."""
    u = grid.check(u)
    _boundary_warn(grid, u)
    grads = gs.gradient(grid, u)
    return [c * u - 2j * t * d for c, d in zip(grid.coords, grads)]


def _boundary_warn(grid, u, tol=1e-8):
    if gs._shell_max(grid, u) >= tol:
        warnings.warn("field not decayed at the box boundary", gs.BoundaryMassWarning, stacklevel=3)


def h_norm_sq(grid: Grid, u, t: float) -> float:
    """``int |(x - 2it grad) u|^2``."""
    return float(sum(gs.integrate(grid, np.abs(c) ** 2) for c in h_operator(grid, u, t)))


def _l2(grid, f) -> float:
    return float(np.sqrt(gs.integrate(grid, np.abs(f) ** 2)))


@dataclass
class PullbackSeries:
    """Pullbacks at checkpoints and their pairwise gaps.

    ``gaps[name]`` is a symmetric matrix over ``times`` for name in
    ``l2``, ``h1`` (homogeneous), ``x`` (x-weighted) and ``sigma`` (their sum).
    """

    times: np.ndarray
    v: list = field(repr=False)
    gaps: dict = field(default_factory=dict)

    @property
    def u_plus(self) -> np.ndarray:
        return self.v[-1]

    @property
    def error_bar(self) -> float:
        return float(self.gaps["l2"][-1, -2]) if len(self.times) > 1 else 0.0

    def gap(self, t1: float, t2: float, norm: str = "l2") -> float:
        i = _index(self.times, t1)
        j = _index(self.times, t2)
        return float(self.gaps[norm][i, j])

    def rows(self):
        """Flattened (t_i, t_j, l2, h1, x, sigma) rows for i < j."""
        n = len(self.times)
        for i, j in itertools.combinations(range(n), 2):
            yield (float(self.times[i]), float(self.times[j]),
                   *(float(self.gaps[k][i, j]) for k in ("l2", "h1", "x", "sigma")))


def _index(times, t):
    d = np.abs(np.asarray(times) - t)
    i = int(np.argmin(d))
    if d[i] > 1e-9 * max(1.0, abs(t)):
        raise KeyError(f"checkpoint t = {t} missing")
    return i


def cauchy_gaps(grid: Grid, snapshots: dict, checkpoints=None, sigma: bool = True) -> PullbackSeries:
    """Gap matrices of the pullbacks at the requested checkpoint times.

    ``snapshots`` maps time to field (e.g. ``Trajectory.snapshots``).
    """
    keys = np.array(sorted(snapshots))
    if checkpoints is None:
        checkpoints = keys
    times = np.array(sorted(float(t) for t in checkpoints))
    v = []
    for t in times:
        i = _index(keys, t)
        v.append(free_pullback(grid, snapshots[keys[i]], float(keys[i])))
    n = len(times)
    names = ("l2", "h1", "x", "sigma")
    gaps = {k: np.zeros((n, n)) for k in names}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", gs.BoundaryMassWarning)
        for i, j in itertools.combinations(range(n), 2):
            d = v[i] - v[j]
            l2 = _l2(grid, d)
            if sigma:
                h1 = float(np.sqrt(gs.grad_norm2(grid, d)))
                xw = float(np.sqrt(gs.integrate(grid, grid.r2 * np.abs(d) ** 2)))
            else:
                h1 = xw = 0.0
            for k, val in zip(names, (l2, h1, xw, l2 + h1 + xw)):
                gaps[k][i, j] = gaps[k][j, i] = val
    return PullbackSeries(times, v, gaps)


def doubling_gaps(series: PullbackSeries, Ts, norm: str = "l2") -> np.ndarray:
    """``gap(T, 2T)`` for each T."""
    return np.array([series.gap(T, 2 * T, norm) for T in Ts])


def mb_bound_check(grid: Grid, times, fields, l: float = 0.0, growth_tol: float = 0.5) -> dict:
    """``||H(t) u(t)||^2`` and ``||H(t) u(t)||^2 / t^l`` with the measured sup.

    ``bounded`` is False when the tail log-slope of the normalised series
    exceeds ``growth_tol``.
    """
    t = np.asarray(times, dtype=float)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", gs.BoundaryMassWarning)
        hs = np.array([h_norm_sq(grid, u, tt) for u, tt in zip(fields, t)])
    with np.errstate(divide="ignore"):
        norm = np.where(t > 0, hs / np.maximum(t, 1.0) ** l, hs)
    sel = t >= max(t[-1] / 2.0, 1e-300) if t.size else t
    slope = 0.0
    if np.count_nonzero(sel) >= 2 and t[sel].min() > 0:
        slope = float(np.polyfit(np.log(t[sel]), np.log(norm[sel]), 1)[0])
    return {"t": t, "h_norm_sq": hs, "normalised": norm, "sup": float(norm.max()),
            "tail_slope": slope, "bounded": slope <= growth_tol}
