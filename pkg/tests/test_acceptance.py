"""Acceptance criteria on the reference fixtures.

Fixtures (box half-width L, so the periodic box is [-L, L)):
  A1  1D defocusing quintic, u0 = exp(-x^2/2), dt = 1e-3, T = 50
  A2  1D defocusing cubic, same datum, T = 20
  A3  3D free and cubic runs, M = 32, L = 12, T = 2
  A4  1D quasilinear h = s, F = -s, ifrk4, dt = 2e-4, T = 2

A1 and A2 use boxes large enough that the dispersing tail never reaches
the boundary over the run (checked through the edge amplitude).
"""

import math
import time

import numpy as np
import pytest

from qlslab import checker as ck
from qlslab import diagnostics as dg
from qlslab import grid as gs
from qlslab import interaction as ia
from qlslab import io as qio
from qlslab import scattering as sc
from qlslab.grid import Grid
from qlslab.nonlinearity import FSpec, HSpec, ModelSpec, PotentialSpec
from qlslab.solver import Problem, SolverConfig, run

CUBIC = FSpec(((-1.0, 1.0),))
QUINTIC = FSpec(((-1.0, 2.0),))
CHECKPOINTS = (2.5, 5.0, 10.0, 20.0, 40.0)


def _fixture_run(model, grid, dt, T, scheme="strang", checkpoints=()):
    p = Problem(model, grid)
    u0 = np.exp(-grid.x1d ** 2 / 2) + 0j
    t0 = time.perf_counter()
    tr = run(p, SolverConfig(dt, T, scheme, sample_every=10), u0, [dg.Recorder(p)], list(checkpoints))
    wall = time.perf_counter() - t0
    recs = tr.observations[0]
    return {"problem": p, "u0": u0, "traj": tr, "records": recs,
            "a": dg.records_to_arrays(recs), "wall": wall,
            "edge": float(np.max(np.abs(tr.final.u[:8])))}


@pytest.fixture(scope="module")
def a1():
    return _fixture_run(ModelSpec(1, f=QUINTIC), Grid(1, 16384, 1024.0), 1e-3, 50.0,
                        checkpoints=CHECKPOINTS)


@pytest.fixture(scope="module")
def a2():
    return _fixture_run(ModelSpec(1, f=CUBIC), Grid(1, 8192, 512.0), 1e-3, 20.0)


@pytest.fixture(scope="module")
def a4():
    model = ModelSpec(1, HSpec("power", 1.0), CUBIC)
    return _fixture_run(model, Grid(1, 2048, 60.0), 2e-4, 2.0, "ifrk4")


def _drifts(a):
    m = np.max(np.abs(a["mass"] - a["mass"][0])) / a["mass"][0]
    e = np.max(np.abs(a["energy"] - a["energy"][0])) / abs(a["energy"][0])
    return float(m), float(e)


def _accumulated(a):
    t, y = a["t"], a["phi"]
    return np.concatenate([[0.0], np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(t))])


# -- 1. conservation ----------------------------------------------------------

@pytest.mark.slow
def test_c01_conservation_a1(a1, report):
    m, e = _drifts(a1["a"])
    ok = m <= 1e-8 and e <= 1e-6 and a1["wall"] < 600 and a1["edge"] < 1e-6
    assert report("1.A1", "conservation A1", ok,
                  f"mass {m:.2e} <= 1e-8, energy {e:.2e} <= 1e-6, wall {a1['wall']:.0f} s")


def test_c01_conservation_a2(a2, report):
    m, e = _drifts(a2["a"])
    ok = m <= 1e-8 and e <= 1e-6 and a2["wall"] < 600 and a2["edge"] < 1e-6
    assert report("1.A2", "conservation A2", ok,
                  f"mass {m:.2e} <= 1e-8, energy {e:.2e} <= 1e-6, wall {a2['wall']:.0f} s")


def test_c01_conservation_a4(a4, report):
    m, e = _drifts(a4["a"])
    ok = m <= 1e-8 and e <= 1e-4 and a4["wall"] < 600
    assert report("1.A4", "conservation A4 (quasilinear, ifrk4)", ok,
                  f"mass {m:.2e} <= 1e-8, energy {e:.2e} <= 1e-4, wall {a4['wall']:.0f} s")


# -- 2. exact plane wave --------------------------------------------------------

def test_c02_plane_wave(report):
    g = Grid(1, 16, math.pi)
    p = Problem(ModelSpec(1, f=CUBIC), g)
    A, k = 1.0, 1.0
    u0 = A * np.exp(1j * k * g.x1d)
    tr = run(p, SolverConfig(1e-3, 1.0), u0, checkpoints=[1.0])
    omega = k ** 2 + A ** 2
    err = float(np.max(np.abs(tr.snapshots[1.0] - A * np.exp(1j * (k * g.x1d + omega)))))
    assert report("2", "exact plane wave at t = 1", err <= 1e-8, f"max error {err:.2e} <= 1e-8")


# -- 3. virial -------------------------------------------------------------------

@pytest.mark.slow
def test_c03_virial(a1, report):
    a = a1["a"]
    v = dg.virial(a["t"], a["variance"], a["dilation"])
    ratio = float(np.max(np.abs(v["residual"])) / v["scale"])
    assert report("3", "virial identity A1", ratio <= 1e-4, f"residual / scale {ratio:.2e} <= 1e-4")


# -- 4. pseudoconformal residual ---------------------------------------------------

def test_c04_pseudoconformal_a2(a2, report):
    a = a2["a"]
    pc = dg.pseudoconformal(a["t"], a["P"], a["theta"])
    ratio = float(np.max(np.abs(pc["R"]) / pc["scale"]))
    assert report("4.A2", "pseudoconformal residual A2", ratio <= 1e-3,
                  f"max |R| / max(P(0), P(t)) {ratio:.2e} <= 1e-3")


@pytest.mark.slow
def test_c04_pseudoconformal_a1(a1, report):
    a = a1["a"]
    theta_max = float(np.max(np.abs(a["theta"])))
    pc = dg.pseudoconformal(a["t"], a["P"], a["theta"])
    ratio = float(np.max(np.abs(pc["R"])) / a["P"][0])
    # N F s - (N+2) G vanishes identically; only round-off remains
    ok = ratio <= 1e-6 and theta_max <= 1e-12
    assert report("4.A1", "pseudoconformal residual A1 (theta term vanishes)", ok,
                  f"max |R| / P(0) {ratio:.2e} <= 1e-6, max |theta| = {theta_max:.1e}")


# -- 5. estimate (C) --------------------------------------------------------------

@pytest.mark.slow
def test_c05_estimate_c(a1, report):
    a = a1["a"]
    E0 = a["energy"][0]
    g = a1["problem"].grid
    C0 = gs.integrate(g, g.x1d ** 2 * np.abs(a1["u0"]) ** 2)
    M3 = dg.morawetz_bound("C", E0, C0, dg.WeightSpec("constant"), 1)["bound"]
    acc = _accumulated(a)
    ok = bool(np.all(acc <= M3)) and M3 == pytest.approx(2 * E0 + C0 / 4, rel=1e-14)
    assert report("5", "estimate (C) bound A1", ok,
                  f"max accumulated {acc.max():.4f} <= M3 = {M3:.4f}")


# -- 6. decay rate -----------------------------------------------------------------

@pytest.mark.slow
def test_c06_decay_a1(a1, report):
    a = a1["a"]
    fit = dg.decay_fit(a["t"], a["phi"], (5.0, 50.0), predicted=2.0)
    ok = 1.6 <= fit.iota <= 2.4
    assert report("6.A1", "decay rate A1 on [5, 50]", ok, f"iota {fit.iota:.3f} in [1.6, 2.4]")


def test_c06_decay_a2(a2, report):
    a = a2["a"]
    t = a["t"]
    w = t ** 1.5 * a["phi"]
    i5 = int(np.argmin(np.abs(t - 5.0)))
    sel = (t >= 5.0) & (t <= 20.0)
    ratio = float(w[sel].max() / w[i5])
    assert report("6.A2", "t^1.5 int Phi bounded A2 on [5, 20]", ratio <= 2.0,
                  f"sup / value at t = 5 is {ratio:.3f} <= 2")


# -- 7. gradient limit ---------------------------------------------------------------

@pytest.mark.slow
def test_c07_gradient_limit(a1, report):
    a = a1["a"]
    E0 = a["energy"][0]
    gl = dg.gradient_limit(a1["records"], E0)
    within = bool(np.all(gl["abs_gap"] <= 2.0 * gl["phi"]))
    final = float(gl["abs_gap"][-1])
    ok = within and final < 1e-2 * E0
    assert report("7", "gradient limit A1", ok,
                  f"gap <= 2 int Phi at all t: {within}, final gap {final:.2e} < {1e-2 * E0:.2e}")


# -- 8. interaction oracle --------------------------------------------------------------

def test_c08_pair_action_oracle(report):
    worst = 0.0
    cases = [(1, 4096, "sign", 0), (1, 4096, "abs", 0), (1, 1024, "sign", 0), (2, 64, "mollified2d", 2),
             (2, 32, "mollified2d", 5), (3, 16, "abs", 0)]
    for dim, M, kernel, r0_dx in cases:
        g = Grid(dim, M, 3.0)
        rng = np.random.default_rng(dim * M)
        u = rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
        r0 = r0_dx * g.dx if kernel == "mollified2d" else None
        fast = ia.action_pair(g, u, kernel, r0)
        slow = ia.action_pair_direct(g, u, kernel, r0)
        worst = max(worst, abs(fast - slow) / max(1.0, abs(slow)))
    assert report("8", "FFT pair action equals direct double sum", worst <= 1e-10,
                  f"worst relative difference {worst:.1e} <= 1e-10 over {len(cases)} grids")


# -- 9. 1D interaction identity -----------------------------------------------------------

def test_c09_interaction_identity(report):
    g = Grid(1, 256, 32.0)
    p = Problem(ModelSpec(1, f=CUBIC), g)
    u0 = np.exp(-g.x1d ** 2 / 2) + 0j
    tr = run(p, SolverConfig(1e-3, 2.0, sample_every=10), u0, [lambda s: s.u])
    res = ia.interaction_1d(p, tr.times, tr.observations[0], 0.5)
    ratio = float(np.max(np.abs(res["residual"])) / res["scale"])
    low = float(res["dM_dt"].min())
    ok = ratio <= 1e-3 and low >= -1e-6 * res["scale"]
    assert report("9", "1D interaction identity (eps = 0.5, M = 256)", ok,
                  f"residual / scale {ratio:.2e} <= 1e-3, min dM/dt {low:.3e}")


# -- 10. scattering gaps -------------------------------------------------------------------

@pytest.mark.slow
def test_c10_cauchy_gaps(a1, report):
    g = a1["problem"].grid
    series = sc.cauchy_gaps(g, a1["traj"].snapshots)
    Ts = [2.5, 5.0, 10.0, 20.0]
    l2 = sc.doubling_gaps(series, Ts)
    sig = sc.doubling_gaps(series, Ts, "sigma")
    norm0 = math.sqrt(a1["a"]["mass"][0])
    ok = bool(np.all(np.diff(l2) < 0) and np.all(np.diff(sig) < 0) and l2[-1] < 0.05 * norm0)
    assert report("10", "Cauchy gaps of the pullback A1", ok,
                  "L2 gaps " + ", ".join(f"{x:.4f}" for x in l2)
                  + f"; final < {0.05 * norm0:.4f}; sigma decreasing {bool(np.all(np.diff(sig) < 0))}")


# -- 11. checker golden suite ----------------------------------------------------------------

def _model6(N, m, n, beta):
    pw = lambda e: PotentialSpec("smoothed-inverse-power", 1.0, e, 0.1)
    return ModelSpec(N, f=FSpec(((-1.0, beta),)), v=pw(m), w=pw(n))


def test_c11_checker_golden(report):
    failures = []
    for N, m, n, beta, case in [(2, 1.5, 2.5, 1, "I"), (3, 1.9, 3.0, 0.8, "I"), (2, 1.8, 3.0, 0.75, "II"),
                                (3, 1.9, 3.5, 0.55, "II"), (3, 1.9, 1.7, 1.0, "III")]:
        rep = ck.check_corollary65(N, m, n, beta)
        if rep.verdict != "applies" or case not in rep.constants["cases_met"]:
            failures.append(f"case {case} at {(N, m, n, beta)}")
        if ck.check_theorem6(_model6(N, m, n, beta)).verdict != "applies":
            failures.append(f"windows at {(N, m, n, beta)}")
    bad = ck.check_corollary65(2, 1.5, 2.0, 1)
    if bad.verdict != "fails" or ck.corollary65_failed(bad, "I") != ["8 < 4m + n"]:
        failures.append("n = 2.0 must fail on 8 < 4m + n")
    if abs(ck.remark63_lower(1) - (1 + math.sqrt(17)) / 4) >= 1e-10:
        failures.append("N = 1 lower endpoint")
    for N in (1, 2, 3):
        lo = ck.remark63_lower(N)
        mk = lambda b: ModelSpec(N, f=FSpec(((-1.0, b),)))
        if (ck.check_theorem7(mk(lo * (1 + 1e-6))).verdict, ck.check_theorem7(mk(lo * (1 - 1e-6))).verdict) \
                != ("applies", "fails"):
            failures.append(f"window edge N = {N}")
    makers = [lambda: ck.check_corollary65(2, 1.5, 2.5, 1), lambda: ck.check_corollary65(2, 1.5, 2.0, 1),
              lambda: ck.check_theorem6(_model6(3, 1.5, 2.5, 1)),
              lambda: ck.check_theorem7(ModelSpec(1, f=QUINTIC)),
              lambda: ck.check_theorem3(ModelSpec(3, HSpec("power", 1.0), CUBIC)),
              lambda: ck.check_theorem4(ModelSpec(1, f=QUINTIC), 1.0, 1.0)]
    if any(mk().to_record() != mk().to_record() for mk in makers):
        failures.append("report not byte-stable")
    assert report("11", "checker golden suite", not failures, "; ".join(failures) or "all cases reproduce")


# -- 12. round trips and determinism -------------------------------------------------------

DET_CONFIG = """\
[model]
dim = 1
f = -1:1
[grid]
M = 2048
L = 60
[solver]
dt = 1e-3
t_end = 1
[diagnostics]
functionals = records, morawetz, interaction1d, mb, scattering
checkpoints = 0.5, 1
[run]
workers = 1
"""


def test_c12_round_trip_and_determinism(tmp_path, report):
    g = Grid(1, 2048, 60.0)
    rng = np.random.default_rng(12)
    u = rng.standard_normal(2048) + 1j * rng.standard_normal(2048)
    qio.write_checkpoint(tmp_path / "c.bin", g, u, 1.25)
    _, u2, t2 = qio.read_checkpoint(tmp_path / "c.bin")
    cp_ok = u2.tobytes() == u.tobytes() and t2 == 1.25
    rows = rng.standard_normal((50, 4)) * 10.0 ** rng.integers(-200, 200, (50, 4))
    qio.write_rows(tmp_path / "r.csv", ("a", "b", "c", "d"), rows)
    cols = qio.read_csv(tmp_path / "r.csv")
    csv_ok = np.array_equal(np.column_stack(list(cols.values())), rows)
    cfg_path = tmp_path / "det.cfg"
    cfg_path.write_text(DET_CONFIG)
    qio.orchestrate(qio.load_config(cfg_path), tmp_path / "a")
    qio.orchestrate(qio.load_config(cfg_path), tmp_path / "b")
    names = sorted(p.name for p in (tmp_path / "a").iterdir() if p.name != "manifest.json")
    det_ok = len(names) >= 7 and all((tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes()
                                     for n in names)
    ok = cp_ok and csv_ok and det_ok
    assert report("12", "checkpoint / CSV round trip and determinism", ok,
                  f"checkpoint {cp_ok}, csv {csv_ok}, {len(names)} outputs identical {det_ok}")


# -- A3: small 3D run (supporting fixture) -------------------------------------------------------

@pytest.mark.parametrize("f", [FSpec(), CUBIC], ids=["free", "cubic"])
def test_a3_three_dimensional(f):
    g = Grid(3, 32, 12.0)
    p = Problem(ModelSpec(3, f=f), g)
    u0 = np.exp(-g.r2 / 2) + 0j
    tr = run(p, SolverConfig(1e-2, 2.0, sample_every=10), u0, [dg.Recorder(p), lambda s: s.u])
    m, e = _drifts(dg.records_to_arrays(tr.observations[0]))
    assert m <= 1e-12 and e <= 1e-4
    lhs = ia.interaction_lhs_3d(p, tr.times, tr.observations[1])
    assert np.all(np.diff(lhs["lhs"]) >= 0) and lhs["measured_C"] > 0
