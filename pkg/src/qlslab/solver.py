"""Time integration: Strang splitting (semilinear) and integrating-factor RK4.

The free flow of ``i u_t = Lap u`` is ``u^(t) = exp(+i t |k|^2) u^(0)``. Both
schemes share that multiplier.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import grid as gs
from .grid import Grid
from .nonlinearity import ModelSpec, PotentialSpec, eval_h, eval_potential, eval_potential_virial

__all__ = [
    "Problem",
    "SolverConfig",
    "State",
    "Trajectory",
    "DivergedError",
    "BoundaryMassError",
    "ConfigError",
    "rhs",
    "step",
    "run",
]

log = logging.getLogger(__name__)

IFRK4_MARGIN = 40.0


class DivergedError(RuntimeError):
    """Non-finite values or a mass drift above 1 percent."""

    def __init__(self, msg, trajectory=None):
        super().__init__(msg)
        self.trajectory = trajectory


class BoundaryMassError(RuntimeError):
    """Boundary-shell mass above tolerance in a strict run."""


class ConfigError(ValueError):
    """An inconsistent solver or run configuration."""


def sample_potential(spec: PotentialSpec, grid: Grid) -> np.ndarray:
    """Sample V (or W) on the grid; unset eps defaults to one grid spacing."""
    eps = spec.eps if spec.eps is not None else grid.dx
    return np.asarray(eval_potential(spec, grid.points(), eps=eps), dtype=float)


def sample_virial(spec: PotentialSpec, grid: Grid) -> np.ndarray:
    """Sample ``x . grad V`` in closed form on the grid."""
    eps = spec.eps if spec.eps is not None else grid.dx
    return np.asarray(eval_potential_virial(spec, grid.points(), eps=eps), dtype=float)


def _spectral_virial(grid: Grid, v) -> np.ndarray:
    grads = gs.gradient(grid, np.asarray(v, dtype=float))
    return sum(c * g for c, g in zip(grid.coords, grads)).real


@dataclass
class Problem:
    """A model bound to a grid, with V and the Hartree kernel pre-sampled.

    ``v`` and ``w`` may be overridden with arbitrary real arrays.
    """

    model: ModelSpec
    grid: Grid
    v: np.ndarray | None = None
    w: np.ndarray | None = None
    w_hat: np.ndarray | None = field(default=None, repr=False)
    xgradv: np.ndarray | None = field(default=None, repr=False)
    xgradw: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.model.dim != self.grid.dim:
            raise ConfigError("model and grid dimensions differ")
        g = self.grid
        if self.v is None:
            self.v = sample_potential(self.model.v, g)
            self.xgradv = sample_virial(self.model.v, g)
        if self.xgradv is None:
            self.xgradv = _spectral_virial(g, self.v)
        if self.w is None and not self.model.w.is_zero:
            self.w = sample_potential(self.model.w, g)
            self.xgradw = sample_virial(self.model.w, g)
        if self.w is not None:
            if self.xgradw is None:
                self.xgradw = _spectral_virial(g, self.w)
            if self.w_hat is None:
                self.w_hat = gs.kernel_hat(g, self.w)
            self.absw_hat = gs.kernel_hat(g, np.abs(self.w))
            self.wvir_hat = gs.kernel_hat(g, self.w + 0.5 * self.xgradw)

    @property
    def eps_v(self) -> float:
        return self.model.v.eps if self.model.v.eps is not None else self.grid.dx

    @property
    def eps_w(self) -> float:
        return self.model.w.eps if self.model.w.eps is not None else self.grid.dx

    def convolve(self, what, rho) -> np.ndarray:
        """Periodic convolution with a precomputed kernel transform."""
        return gs.hartree(self.grid, None, rho, what=what).real

    @property
    def has_v(self) -> bool:
        return bool(np.any(self.v != 0))

    @property
    def has_w(self) -> bool:
        return self.w is not None

    def hartree(self, rho) -> np.ndarray:
        if self.w is None:
            return np.zeros(self.grid.shape)
        return gs.hartree(self.grid, self.w, rho, what=self.w_hat).real

    def phase_potential(self, u) -> np.ndarray:
        """Real multiplier ``V + F(|u|^2) + W * |u|^2``."""
        s = np.abs(u) ** 2
        out = self.v + 0.0
        for b, beta in self.model.f.terms:
            out = out + b * (s if beta == 1.0 else s ** beta)
        if self.w is not None:
            out = out + self.hartree(s)
        return out

    def quasilinear(self, u) -> np.ndarray:
        """``2 u h'(|u|^2) Lap h(|u|^2)``; zero when delta_h = 0."""
        if self.model.delta == 0:
            return np.zeros_like(u)
        s = np.abs(u) ** 2
        h, h1, _ = eval_h(self.model.h, s)
        return 2.0 * u * h1 * gs.laplacian(self.grid, h)


@dataclass(frozen=True)
class SolverConfig:
    dt: float
    t_end: float
    scheme: str = "strang"
    sample_every: int = 10
    boundary_mass_tol: float = 1e-8
    strict_boundary: bool = False

    def __post_init__(self):
        if self.scheme not in ("strang", "ifrk4"):
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        if not self.dt > 0:
            raise ConfigError("dt must be positive")
        if self.t_end < 0:
            raise ConfigError("t_end must be nonnegative")
        if self.sample_every < 1:
            raise ConfigError("sample_every must be a positive integer")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def validate(self, problem: Problem) -> None:
        if self.scheme == "strang" and problem.model.delta != 0:
            raise ConfigError("strang requires δ_h = 0")
        if problem.model.delta != 0 and problem.model.h.alpha < 1.0:
            raise ConfigError("quasilinear runs require alpha >= 1")
        if self.scheme == "ifrk4":
            margin = self.dt * problem.grid.k2max
            if margin > IFRK4_MARGIN:
                raise ConfigError(f"dt·max|k|² = {margin:.4g} exceeds {IFRK4_MARGIN:g}")


@dataclass(frozen=True)
class State:
    t: float
    u: np.ndarray

    @classmethod
    def snapshot(cls, t, u):
        v = np.array(u, dtype=complex, copy=True)
        v.setflags(write=False)
        return cls(float(t), v)


@dataclass
class Trajectory:
    """Sampled run output.

    ``observations`` holds one list per observer with its return values;
    ``snapshots`` maps checkpoint times to frozen fields.
    """

    times: list = field(default_factory=list)
    observations: list = field(default_factory=list)
    snapshots: dict = field(default_factory=dict)
    masses: list = field(default_factory=list)
    boundary_warnings: list = field(default_factory=list)
    final: State | None = None


def rhs(problem: Problem, u) -> np.ndarray:
    """Time derivative ``u_t`` of the full equation."""
    u = problem.grid.check(u)
    out = gs.laplacian(problem.grid, u) + problem.quasilinear(u) + problem.phase_potential(u) * u
    out = -1j * out
    if not np.all(np.isfinite(out)):
        raise DivergedError("non-finite right-hand side")
    return out


class _Stepper:
    """Precomputes the free-flow multipliers for one (problem, dt) pair."""

    def __init__(self, problem: Problem, scheme: str, dt: float):
        self.p = problem
        self.scheme = scheme
        self.dt = dt
        k2 = problem.grid.k2
        self.full = np.exp(1j * dt * k2)
        self.half = np.exp(0.5j * dt * k2)

    def _nl_hat(self, uh):
        u = gs.ifft(uh)
        n = problem_nl(self.p, u)
        return gs.fft(-1j * n)

    def __call__(self, u):
        if self.scheme == "strang":
            hdt = 0.5 * self.dt
            u = u * np.exp(-1j * hdt * self.p.phase_potential(u))
            u = gs.ifft(self.full * gs.fft(u))
            u = u * np.exp(-1j * hdt * self.p.phase_potential(u))
            return u
        # Lawson RK4 on v = exp(-i t |k|^2) u^
        dt, E, E2 = self.dt, self.half, self.full
        uh = gs.fft(u)
        a = self._nl_hat(uh)
        b = self._nl_hat(E * (uh + 0.5 * dt * a))
        c = self._nl_hat(E * uh + 0.5 * dt * b)
        d = self._nl_hat(E2 * uh + dt * E * c)
        uh = E2 * uh + (dt / 6.0) * (E2 * a + 2.0 * E * (b + c) + d)
        return gs.ifft(uh)


def problem_nl(problem: Problem, u) -> np.ndarray:
    """Everything on the right of ``i u_t = Lap u + ...`` except the Laplacian."""
    return problem.quasilinear(u) + problem.phase_potential(u) * u


def step(problem: Problem, config: SolverConfig, state: State, dt: float | None = None) -> State:
    """Advance one step; ``dt`` overrides the configured step (negative runs backwards)."""
    h = config.dt if dt is None else dt
    config.validate(problem)
    u = _Stepper(problem, config.scheme, h)(np.asarray(state.u, dtype=complex))
    if not np.all(np.isfinite(u)):
        raise DivergedError("non-finite field")
    return State.snapshot(state.t + h, u)


def evolve(problem: Problem, config: SolverConfig, u0, n_steps: int, dt: float | None = None):
    """Advance ``n_steps`` without observers; returns the final field."""
    h = config.dt if dt is None else dt
    st = _Stepper(problem, config.scheme, h)
    u = np.asarray(u0, dtype=complex)
    for _ in range(n_steps):
        u = st(u)
    if not np.all(np.isfinite(u)):
        raise DivergedError("non-finite field")
    return u


def run(problem: Problem, config: SolverConfig, u0, observers: Sequence[Callable] = (),
        checkpoints: Sequence[float] = ()) -> Trajectory:
    """Integrate to ``t_end`` calling observers every ``sample_every`` steps.

    Observers receive a read-only :class:`State`; their return values are
    collected in ``Trajectory.observations``. Fields at ``checkpoints`` (rounded
    to the nearest step) are kept in ``Trajectory.snapshots``.
    """
    config.validate(problem)
    grid = problem.grid
    u = np.array(grid.check(u0), dtype=complex)
    n = config.n_steps
    dt = config.dt
    ck_steps = {}
    for tc in checkpoints:
        j = int(round(tc / dt))
        if j < 0 or j > n:
            raise ConfigError(f"checkpoint t = {tc} outside [0, t_end]")
        ck_steps[j] = float(tc)
    traj = Trajectory(observations=[[] for _ in observers])
    mass0 = gs.integrate(grid, np.abs(u) ** 2)
    stepper = _Stepper(problem, config.scheme, dt)

    def sample(j, u):
        t = j * dt
        vals = np.abs(u) ** 2
        if not np.all(np.isfinite(vals)):
            traj.final = None
            raise DivergedError(f"non-finite field at t = {t:g}", traj)
        mass = gs.integrate(grid, vals)
        if mass0 > 0 and abs(mass - mass0) > 0.01 * mass0:
            raise DivergedError(f"mass drift above 1% at t = {t:g}", traj)
        frac = gs.boundary_fraction(grid, u)
        if frac > config.boundary_mass_tol:
            traj.boundary_warnings.append((t, frac))
            if config.strict_boundary:
                raise BoundaryMassError(f"boundary mass fraction {frac:.3e} at t = {t:g}")
        st = State.snapshot(t, u)
        traj.times.append(t)
        traj.masses.append(mass)
        for obs, store in zip(observers, traj.observations):
            store.append(obs(st))
        return st

    def keep(j, u):
        if j in ck_steps:
            traj.snapshots[ck_steps[j]] = State.snapshot(j * dt, u).u

    sample(0, u)
    keep(0, u)
    for j in range(1, n + 1):
        u = stepper(u)
        keep(j, u)
        if j % config.sample_every == 0 or j == n:
            sample(j, u)
    if traj.boundary_warnings:
        t_w, f_w = traj.boundary_warnings[0]
        log.warning("boundary mass fraction %.2e first exceeded tolerance at t = %g", f_w, t_w)
    traj.final = State.snapshot(n * dt, u)
    return traj
