"""Defocusing quintic in 1D: conservation, Morawetz decay and scattering gaps.

Run with ``python3 demos/quintic_decay.py``. Takes about half a minute.
"""

import math

import numpy as np

from qlslab import diagnostics as dg
from qlslab import scattering as sc
from qlslab.grid import Grid
from qlslab.nonlinearity import FSpec, ModelSpec
from qlslab.solver import Problem, SolverConfig, run

# Box [-512, 512) with dx = 0.125, wide enough that nothing reaches the edge by t = 20
grid = Grid(1, 8192, 512.0)
problem = Problem(ModelSpec(1, f=FSpec(((-1.0, 2.0),))), grid)
u0 = np.exp(-grid.x1d ** 2 / 2) + 0j

traj = run(problem, SolverConfig(1e-3, 20.0, sample_every=10), u0,
           [dg.Recorder(problem)], checkpoints=[2.5, 5.0, 10.0, 20.0])
a = dg.records_to_arrays(traj.observations[0])

# Mass and energy should hold to round-off and splitting error
E0 = a["energy"][0]
print("mass drift   ", np.max(np.abs(a["mass"] / a["mass"][0] - 1)))
print("energy drift ", np.max(np.abs(a["energy"] / E0 - 1)))

# int Phi decays like t^-2 in the case where N F s - (N+2) G vanishes
fit = dg.decay_fit(a["t"], a["phi"], (2.0, 20.0), predicted=dg.predicted_decay(problem.model))
print(f"decay rate    {fit.iota:.3f} +/- {fit.stderr:.1e} (predicted {fit.predicted:g})")

# The kinetic energy absorbs all of 2E as the potential part disperses
gl = dg.gradient_limit(traj.observations[0], E0)
print(f"2E - |grad u|^2 at t = 20: {gl['gap'][-1]:.3e}")

# Pullbacks e^{it Lap} u(t) settle down, so the doubling gaps shrink
series = sc.cauchy_gaps(grid, traj.snapshots)
gaps = sc.doubling_gaps(series, [2.5, 5.0, 10.0])
print("gap(T, 2T)   ", ", ".join(f"{g:.4f}" for g in gaps))
print("ratio        ", ", ".join(f"{r:.3f}" for r in gaps[1:] / gaps[:-1]))
print(f"||u0||       {math.sqrt(a['mass'][0]):.4f}")
