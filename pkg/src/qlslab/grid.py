"""Periodic grids on [-L, L)^N and the Fourier-side operators used everywhere.

Transform convention: ``(Lap f)^ = -|k|^2 f^``. Fields are plain complex (or
real) numpy arrays of shape ``(M,) * N``; the owning :class:`Grid` is passed
alongside.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as sfft

__all__ = [
    "Grid",
    "BoundaryMassWarning",
    "fft",
    "ifft",
    "laplacian",
    "gradient",
    "hartree",
    "fractional",
    "integrate",
    "moments",
    "grad_norm2",
    "boundary_fraction",
    "set_workers",
]

_WORKERS = 1


def set_workers(n: int) -> None:
    """Set the number of threads used by the FFT backend (1 = deterministic)."""
    global _WORKERS
    _WORKERS = int(n)


class BoundaryMassWarning(UserWarning):
    """The field is not numerically supported inside the periodic box."""


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid.

    Parameters
    ----------
    dim : int
        Spatial dimension N in {1, 2, 3}.
    M : int
        Points per axis, a power of two, at least 8.
    L : float
        Half-width; the box is ``[-L, L)`` along every axis.
    """

    dim: int
    M: int
    L: float

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError("dim must be 1, 2 or 3")
        if self.M < 8 or self.M & (self.M - 1):
            raise ValueError("M must be a power of two and at least 8")
        if not self.L > 0:
            raise ValueError("L must be positive")

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.M

    @property
    def shape(self) -> tuple:
        return (self.M,) * self.dim

    @property
    def cell(self) -> float:
        """Volume element dx^N."""
        return self.dx ** self.dim

    @cached_property
    def x1d(self) -> np.ndarray:
        return -self.L + self.dx * np.arange(self.M)

    @cached_property
    def k1d(self) -> np.ndarray:
        # (pi / L) times the signed integer index; one Nyquist mode at -M/2
        return (np.pi / self.L) * np.fft.fftfreq(self.M, d=1.0 / self.M)

    @cached_property
    def coords(self) -> tuple:
        return tuple(np.meshgrid(*([self.x1d] * self.dim), indexing="ij", sparse=True))

    @cached_property
    def wavenumbers(self) -> tuple:
        return tuple(np.meshgrid(*([self.k1d] * self.dim), indexing="ij", sparse=True))

    @cached_property
    def r2(self) -> np.ndarray:
        out = np.zeros(self.shape)
        for c in self.coords:
            out = out + c * c
        return out

    @cached_property
    def k2(self) -> np.ndarray:
        out = np.zeros(self.shape)
        for k in self.wavenumbers:
            out = out + k * k
        return out

    @cached_property
    def kabs(self) -> np.ndarray:
        return np.sqrt(self.k2)

    @property
    def k2max(self) -> float:
        return float(self.dim * (np.pi / self.dx) ** 2)

    def points(self) -> np.ndarray:
        """Coordinates as an array of shape ``grid.shape + (N,)``."""
        return np.stack(np.meshgrid(*([self.x1d] * self.dim), indexing="ij"), axis=-1)

    def check(self, u) -> np.ndarray:
        u = np.asarray(u)
        if u.shape != self.shape:
            raise ValueError(f"field of shape {u.shape} does not live on grid {self.shape}")
        return u


def fft(u):
    return sfft.fftn(u, workers=_WORKERS)


def ifft(u):
    return sfft.ifftn(u, workers=_WORKERS)


def _apply(grid: Grid, u, mult, real_ok: bool):
    u = grid.check(u)
    out = ifft(mult * fft(u))
    if real_ok and np.isrealobj(u):
        return out.real
    return out


def laplacian(grid: Grid, u):
    """Spectral Laplacian, exact for band-limited fields."""
    return _apply(grid, u, -grid.k2, True)


def gradient(grid: Grid, u) -> list:
    """Spectral gradient as a list of N components."""
    u = grid.check(u)
    uh = fft(u)
    out = []
    for k in grid.wavenumbers:
        d = ifft(1j * k * uh)
        out.append(d.real if np.isrealobj(u) else d)
    return out


def grad_norm2(grid: Grid, u) -> float:
    """``int |grad u|^2`` evaluated on the Fourier side."""
    uh = fft(grid.check(u))
    return float(np.sum(grid.k2 * np.abs(uh) ** 2) * grid.cell / np.prod(grid.shape))


def kernel_hat(grid: Grid, wker) -> np.ndarray:
    """Transform of a kernel sampled on the grid coordinates, scaled by dx^N.

    The sample at the box centre (index M/2 per axis) is the origin offset.
    """
    wker = grid.check(wker)
    return fft(np.fft.ifftshift(wker)) * grid.cell


def hartree(grid: Grid, wker, rho, what=None):
    """Periodic convolution ``W * rho`` of a kernel sampled on the grid coordinates.

    ``what`` may carry a precomputed :func:`kernel_hat` to skip one transform.
    """
    rho = grid.check(rho)
    if what is None:
        what = kernel_hat(grid, wker)
    out = ifft(what * fft(rho))
    if np.isrealobj(rho) and (wker is None or np.isrealobj(wker)):
        return out.real
    return out


def fractional(grid: Grid, u, s: float):
    """Apply the multiplier ``|k|^s``; for s < 0 the zero mode is annihilated."""
    if s < 0:
        with np.errstate(divide="ignore"):
            mult = np.where(grid.k2 > 0, grid.kabs ** s, 0.0)
    else:
        mult = grid.kabs ** s
    return _apply(grid, u, mult, True)


def integrate(grid: Grid, f):
    """Riemann sum ``dx^N * sum f``."""
    f = grid.check(f)
    total = np.sum(f) * grid.cell
    return complex(total) if np.iscomplexobj(total) else float(total)


def boundary_fraction(grid: Grid, u) -> float:
    """Share of the mass carried by the outermost shell of cells."""
    u = grid.check(u)
    dens = np.abs(u) ** 2
    total = float(np.sum(dens))
    if total == 0.0:
        return 0.0
    inner = np.zeros(grid.shape, dtype=bool)
    inner[(slice(1, -1),) * grid.dim] = True
    return float(np.sum(dens[~inner])) / total


def _shell_max(grid: Grid, u) -> float:
    a = np.abs(u)
    inner = np.zeros(grid.shape, dtype=bool)
    inner[(slice(1, -1),) * grid.dim] = True
    return float(np.max(a[~inner]))


def moments(grid: Grid, u, tol: float = 1e-8) -> dict:
    """Variance, dilation and the x-weighted field.

    Returns
    -------
    dict
        ``variance`` = int |x|^2 |u|^2, ``dilation`` = Im int conj(u) x.grad u,
        ``xweighted`` = list of components x_j u.

    Warns
    -----
    BoundaryMassWarning
        When ``|u|`` on the outermost shell is not below ``tol``.
    """
    u = grid.check(u)
    if _shell_max(grid, u) >= tol:
        warnings.warn("field not decayed at the box boundary; x-weighted moments "
                      "are unreliable", BoundaryMassWarning, stacklevel=2)
    variance = integrate(grid, grid.r2 * np.abs(u) ** 2)
    grads = gradient(grid, u)
    xg = sum(c * g for c, g in zip(grid.coords, grads))
    dilation = float(np.imag(np.sum(np.conj(u) * xg)) * grid.cell)
    return {"variance": float(variance), "dilation": dilation,
            "xweighted": [c * u for c in grid.coords]}
